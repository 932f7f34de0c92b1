#pragma once

// On-disk layout:
//   <out>/<split>/manifest.json
//   <out>/<split>/<block>/answers.json                      (dev/test only)
//   <out>/<split>/<block>/<set_id>/<movie_id>/status.json
//   <out>/<split>/<block>/<set_id>/<movie_id>/{rgb,depth,mask}/%03d.png

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "voebench/forge.hpp"
#include "voebench/movie.hpp"
#include "voebench/renderer.hpp"

namespace voebench {

namespace fs = std::filesystem;

inline constexpr int kFormatVersion = 1;

enum class Split : std::uint8_t { train, dev, test };
std::string_view to_string(Split s);
Split parse_split(std::string_view s);

struct SplitSpec {
  Split split = Split::dev;
  int movies_per_scenario = 20;  ///< for train: possible movies per block / 18
};

struct MovieEntry {
  std::string movie_id;
  std::string digest;  ///< hex digest over the movie's RGB frame hashes
  friend bool operator==(const MovieEntry&, const MovieEntry&) = default;
};

struct SetEntry {
  std::string set_id;
  std::optional<ScenarioSpec> scenario;  ///< empty for training movies
  int scenario_index = -1;
  int instance = 0;
  std::vector<MovieEntry> movies;
  friend bool operator==(const SetEntry&, const SetEntry&) = default;
};

struct BlockEntry {
  BlockId block = BlockId::O1;
  std::vector<SetEntry> sets;
  friend bool operator==(const BlockEntry&, const BlockEntry&) = default;
};

struct SplitManifest {
  int format_version = kFormatVersion;
  Split split = Split::dev;
  std::uint64_t seed = 0;
  int movies_per_scenario = 0;
  int width = 288, height = 288;
  double far_clip = 20.0;
  int n_frames = 100;
  double d_max = 0.15;
  int w_min = 5;
  std::vector<BlockEntry> blocks;

  int movie_count() const;
  RenderConfig render_config() const;
  ForgeConfig forge_config() const;
  friend bool operator==(const SplitManifest&, const SplitManifest&) = default;
};

std::string manifest_to_json(const SplitManifest& m);
SplitManifest manifest_from_json(std::string_view text);
SplitManifest read_manifest(const fs::path& split_dir);
/// Hex FNV-1a digest of the canonical manifest JSON.
std::string manifest_digest(const SplitManifest& m);

struct DatasetSpec {
  std::vector<BlockId> blocks;
  std::vector<SplitSpec> splits;
  std::uint64_t seed = 0;
  RenderConfig render;
  ForgeConfig forge;
  int jobs = 0;  ///< 0 = all logical cores; output does not depend on it
};

/// Writes every requested split under out_dir. ConfigError on empty/zero counts,
/// IoFailure when files cannot be written.
std::vector<SplitManifest> write_dataset(const DatasetSpec& spec, const fs::path& out_dir);

/// Seed of one quadruplet; the manifest keeps (seed, split, block, scenario, instance)
/// so sets can be regenerated for auditing.
std::uint64_t set_seed(std::uint64_t seed, Split split, BlockId block, int scenario_index, int instance);
std::string make_set_id(BlockId block, const ScenarioSpec& scenario, int instance);

/// Builds one quadruplet exactly as write_dataset would.
Quadruplet forge_set(BlockId block, Split split, int scenario_index, int instance, std::uint64_t seed,
                     const ForgeConfig& cfg);

/// per_scenario quadruplets for each scenario of the block, scenario-major, computed in parallel.
std::vector<Quadruplet> forge_block(BlockId block, Split split, int per_scenario, std::uint64_t seed,
                                    const ForgeConfig& cfg, int jobs);

// set_id -> movie_id -> label
using Answers = std::map<std::string, std::map<std::string, Label>>;
std::string answers_to_json(const Answers& a);
Answers read_answers(const fs::path& path);
Answers answers_for(const std::vector<Quadruplet>& sets);

fs::path movie_dir(const fs::path& split_dir, BlockId block, const std::string& set_id, const std::string& movie_id);
std::string frame_name(int t);  ///< "%03d.png"

/// Loads the redacted view of a movie: images plus intrinsics, nothing else.
MovieFrames load_movie(const fs::path& dir);

using Submission = std::map<std::string, double>;

/// JSON object {movie_id: score} or two-column CSV (chosen by .csv extension).
/// Errors: MissingMovie, DuplicateMovie, NonFiniteScore, ParseError for unknown ids or syntax.
Submission read_submission(const fs::path& path, const std::vector<std::string>& expected_ids);
Submission parse_submission_json(std::string_view text, const std::vector<std::string>& expected_ids);
Submission parse_submission_csv(std::string_view text, const std::vector<std::string>& expected_ids);
void write_submission(const fs::path& path, const Submission& sub);
std::string submission_to_json(const Submission& sub);

std::vector<std::string> movie_ids(const SplitManifest& m);

std::string hex64(std::uint64_t v);
/// Digest stored in the manifest: a chained mix over the per-frame rgb_hash values.
std::string movie_digest(const std::vector<std::uint64_t>& rgb_hashes);

}  // namespace voebench
