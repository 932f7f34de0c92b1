#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "voebench/scene.hpp"

namespace voebench {

template <typename T>
using Plane = Eigen::Array<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

using Rgb = std::array<std::uint8_t, 3>;

/// Screens are drawn unshaded in this color; no palette entry or room surface uses it.
inline constexpr Rgb kOccluderRgb{128, 128, 128};

std::vector<Rgb> default_palette();

struct RenderConfig {
  int width = 288;
  int height = 288;
  double far_clip = 20.0;  ///< meters; depth saturates here
  std::vector<Rgb> palette = default_palette();
};

enum class EntityKind : std::uint8_t { background, object, occluder };

struct EntityRef {
  EntityKind kind = EntityKind::background;
  int id = -1;

  friend bool operator==(const EntityRef&, const EntityRef&) = default;
};

struct FrameBundle {
  Plane<std::uint8_t> rgb;     ///< height x (3 * width), interleaved RGB
  Plane<std::uint16_t> depth;  ///< camera-axis depth in millimeters
  Plane<std::uint8_t> mask;    ///< instance labels, 0 = background, shuffled
  std::vector<EntityRef> hidden_truth;  ///< label -> entity; index 0 is background

  int width() const { return static_cast<int>(depth.cols()); }
  int height() const { return static_cast<int>(depth.rows()); }
  int label_count() const { return static_cast<int>(hidden_truth.size()) - 1; }
};

/// Ray-casts one frame. Every connected visible piece of an entity gets its own
/// label; labels are then permuted with a stream derived from (shuffle_seed, frame).
FrameBundle render_frame(const WorldLine& world, int frame, const RenderConfig& cfg, std::uint64_t shuffle_seed);

/// Applies a fresh random permutation to the labels 1..k of the bundle.
void shuffle_labels(FrameBundle& bundle, std::uint64_t seed);

/// 64-bit FNV-1a digest over the RGB bytes only.
std::uint64_t rgb_hash(const Plane<std::uint8_t>& rgb);
inline std::uint64_t frame_hash(const FrameBundle& bundle) { return rgb_hash(bundle.rgb); }

/// Pixel count of each object in the frame, summed over its pieces.
int object_pixel_count(const FrameBundle& bundle, int object_id);

}  // namespace voebench
