#pragma once

// Pixel-matched quadruplets: two possible and two impossible movies spliced from a
// pair of possible world lines that differ only in one target object.

#include <array>
#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "voebench/scene.hpp"

namespace voebench {

enum class BlockId : std::uint8_t { O1, O2, O3 };

struct Block {
  BlockId id;
  std::string_view principle;
};

const std::array<Block, 3>& all_blocks();
std::string_view to_string(BlockId b);
BlockId parse_block(std::string_view s);

enum class Visibility : std::uint8_t { visible, occluded };
std::string_view to_string(Visibility v);
Visibility parse_visibility(std::string_view s);

struct ScenarioSpec {
  BlockId block = BlockId::O1;
  Visibility visibility = Visibility::visible;
  Motion motion = Motion::stationary;
  int n_objects = 1;

  /// e.g. "occluded_dynamic_1_2"; unique within a block.
  std::string name() const;
  friend bool operator==(const ScenarioSpec&, const ScenarioSpec&) = default;
};

/// Visibility-major, then motion, then object count.
std::vector<ScenarioSpec> enumerate_scenarios(BlockId block);

struct SpliceWindow {
  int start_frame = 0;
  int end_frame = 0;  ///< inclusive

  int switch_frame() const { return (start_frame + end_frame) / 2; }
  friend bool operator==(const SpliceWindow&, const SpliceWindow&) = default;
};

enum class Source : std::uint8_t { A, B };
enum class Label : std::uint8_t { possible, impossible };
std::string_view to_string(Label l);
Label parse_label(std::string_view s);

struct FrameRef {
  Source source = Source::A;
  int frame = 0;
  friend bool operator==(const FrameRef&, const FrameRef&) = default;
};

struct Movie {
  std::string movie_id;
  std::vector<FrameRef> frames;
  Label label = Label::possible;
  ScenarioSpec scenario;
  std::string pattern;  ///< source sequence such as "AB" or "BAB"
};

struct WorldPair {
  WorldLine a, b;
  std::vector<SpliceWindow> windows;
  int target_id = 0;
};

struct Quadruplet {
  std::string set_id;
  std::uint64_t seed = 0;  ///< drives movie order and per-movie mask shuffles
  std::array<Movie, 4> movies;
  std::shared_ptr<const WorldPair> parents;
};

struct ForgeConfig {
  int n_frames = 100;
  double d_max = 0.15;
  int w_min = 5;
  int max_attempts = 400;
  double aspect = 1.0;         ///< image width / height, for the in-view check
  double view_margin = 0.04;   ///< in normalized image-plane units
};

/// Draws a random pair for the scenario. The target object has id 0 and is the only
/// thing that differs between A and B. NoValidSplice when no attempt yields windows.
WorldPair build_world_pair(const ScenarioSpec& scenario, std::uint64_t seed, const ForgeConfig& cfg = {});

/// Maximal runs of frames where the target is hidden (absent or fully occluded) in both
/// world lines, at least w_min long. Returns the `count` longest, in time order.
std::vector<SpliceWindow> find_splice_windows(const WorldLine& a, const WorldLine& b, int target_id, int count,
                                              int w_min);

/// Throws WindowViolation when the windows do not suit the scenario.
void check_windows(const WorldPair& pair, const std::vector<SpliceWindow>& windows, const ScenarioSpec& scenario);

/// Movie ids are "<set_id>_<k>" with k in 1..4 assigned in a seeded random order.
Quadruplet compose_quadruplet(std::shared_ptr<const WorldPair> parents, const std::vector<SpliceWindow>& windows,
                              const ScenarioSpec& scenario, const std::string& set_id, std::uint64_t order_seed);

/// Frame references of a movie following `pattern` and switching at each window midpoint.
std::vector<FrameRef> splice_frames(std::string_view pattern, const std::vector<SpliceWindow>& windows, int n_frames);

/// Random possible-only scene for the training split; may include bounces and screens.
WorldLine random_training_world(std::uint64_t seed, const ForgeConfig& cfg = {});

}  // namespace voebench
