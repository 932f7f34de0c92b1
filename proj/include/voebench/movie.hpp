#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "voebench/forge.hpp"
#include "voebench/renderer.hpp"

namespace voebench {

/// What a system under test may see of a dev/test movie: images and intrinsics only.
struct MovieFrames {
  std::string movie_id;
  Intrinsics intrinsics;
  double far_clip = 20.0;
  std::vector<Plane<std::uint8_t>> rgb;
  std::vector<Plane<std::uint16_t>> depth;
  std::vector<Plane<std::uint8_t>> mask;

  int n_frames() const { return static_cast<int>(rgb.size()); }
};

/// Seed of the label permutation of frame t of the k-th movie of a set.
std::uint64_t mask_shuffle_seed(const Quadruplet& q, int k, int t);

/// One world-line frame, rendered once and shared by every movie that shows it.
struct SharedFrame {
  FrameBundle bundle;
  std::uint64_t rgb_hash = 0;
};

struct RenderedPair {
  std::vector<SharedFrame> a, b;
  const SharedFrame& at(const FrameRef& r) const { return r.source == Source::A ? a[r.frame] : b[r.frame]; }
};

RenderedPair render_pair(const WorldPair& pair, const RenderConfig& cfg);

/// Full bundle (with hidden truth) of frame t of movie k, labels shuffled as on disk.
FrameBundle movie_frame(const Quadruplet& q, const RenderedPair& frames, int k, int t);

/// The four movies of a set as redacted in-memory views, in the set's movie order.
std::array<MovieFrames, 4> render_quadruplet(const Quadruplet& q, const RenderConfig& cfg);

}  // namespace voebench
