#pragma once

// Closed-form kinematic scenes: rigid objects, rising screens and a fixed camera.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "voebench/geometry.hpp"

namespace voebench {

enum class Shape : std::uint8_t { sphere, cube, cone };
enum class Motion : std::uint8_t { stationary, dynamic_1, dynamic_2 };

std::string_view to_string(Shape s);
std::string_view to_string(Motion m);
Shape parse_shape(std::string_view s);
Motion parse_motion(std::string_view s);

struct ObjectSpec {
  int object_id = 0;
  Shape shape = Shape::sphere;
  double size = 0.5;  ///< diameter / edge / cone height, meters
  int texture_id = 0;
  double yaw = 0.0;  ///< radians about +z; constant over the world line
};

struct TrajectorySpec {
  Motion kind = Motion::stationary;
  Vec3 initial_position = Vec3::Zero();  ///< bounding-box center
  Vec3 initial_velocity = Vec3::Zero();  ///< m/frame
  double gravity = 0.0;                  ///< m/frame^2 along -z
};

struct Keyframe {
  int frame = 0;
  double elevation = 0.0;  ///< fraction of the screen height that is raised, [0, 1]
};

/// A vertical screen in the plane y = base_position.y that slides up from its base.
struct OccluderSpec {
  int occluder_id = 0;
  Vec3 base_position = Vec3::Zero();  ///< bottom-center
  double width = 1.0;
  double height = 1.0;
  std::vector<Keyframe> schedule;

  double elevation_at(int frame) const;
  /// Corners of the raised part, CCW seen from -y; empty when fully lowered.
  std::vector<Vec3> corners_at(int frame) const;
};

struct CameraSpec {
  Vec3 position = Vec3(0, 0.5, 1.7);
  Vec3 look_at = Vec3(0, 6.5, 0.5);
  double vertical_fov = 55.0;  ///< degrees
};

/// Pinhole model derived from a CameraSpec. Camera coordinates: x right, y up,
/// z forward (depth).
template <typename Scalar>
struct PinholeT {
  Vec3T<Scalar> eye, right, up, forward;
  Scalar tan_half_fov;

  explicit PinholeT(const CameraSpec& cam)
      : eye(cam.position.template cast<Scalar>()),
        tan_half_fov(static_cast<Scalar>(std::tan(cam.vertical_fov * M_PI / 360.0))) {
    forward = (cam.look_at - cam.position).normalized().template cast<Scalar>();
    right = forward.cross(Vec3T<Scalar>::UnitZ()).normalized();
    up = right.cross(forward);
  }

  Vec3T<Scalar> to_camera(const Vec3T<Scalar>& p) const {
    const Vec3T<Scalar> d = p - eye;
    return {d.dot(right), d.dot(up), d.dot(forward)};
  }

  /// Image-plane coordinates scaled so the vertical field of view spans [-1, 1];
  /// y grows upward.
  Vec2T<Scalar> to_plane(const Vec3T<Scalar>& p) const {
    const Vec3T<Scalar> c = to_camera(p);
    return {c.x() / (c.z() * tan_half_fov), c.y() / (c.z() * tan_half_fov)};
  }
};
using Pinhole = PinholeT<double>;

struct Intrinsics {
  int width = 0;
  int height = 0;
  double fx = 0, fy = 0, cx = 0, cy = 0;

  static Intrinsics from_camera(const CameraSpec& cam, int width, int height);
};

struct Arena {
  Vec3 min = Vec3(-5, 0, 0);
  Vec3 max = Vec3(5, 10, 5);
  bool draw_room = true;  ///< floor and walls; off for bare test scenes
};

struct ObjectState {
  int object_id = 0;
  Vec3 position = Vec3::Zero();
  double yaw = 0.0;
};

struct SceneRecipe {
  std::vector<std::pair<ObjectSpec, TrajectorySpec>> objects;
  std::vector<OccluderSpec> occluders;
  CameraSpec camera;
  int n_frames = 100;
  std::uint64_t rng_seed = 0;
  double d_max = 0.15;
  double size_min = 0.2;
  double size_max = 1.2;
  Arena arena;
};

struct WorldLine {
  std::vector<ObjectSpec> objects;             ///< constant over frames
  std::vector<std::vector<ObjectState>> frames;  ///< frames[t][i] is objects[i] at t
  std::vector<OccluderSpec> occluders;
  CameraSpec camera;
  int n_frames = 0;
  double d_max = 0.15;
  Arena arena;
  std::uint64_t rng_seed = 0;

  const ObjectSpec* find_object(int object_id) const;
  int object_index(int object_id) const;  ///< -1 when absent
};

enum class OcclusionState : std::uint8_t { fully_visible, partially_occluded, fully_occluded };
std::string_view to_string(OcclusionState s);

/// Closed-form ballistic height above rest with a perfectly elastic floor.
double bounce_height(double h0, double vz, double gravity, double t);

/// Evaluates every trajectory at integer frames. Throws SpawnCollision, OutOfBounds,
/// or ConfigError for malformed recipes (including per-frame motion above d_max).
WorldLine simulate(const SceneRecipe& recipe);

OcclusionState occlusion_state(const WorldLine& w, int frame, int object_id);

/// Conservative outline of the object on the image plane (see PinholeT::to_plane).
std::vector<Vec2> silhouette(const ObjectSpec& spec, const ObjectState& state, const Pinhole& cam);

/// World-space corners of the object's (yaw-rotated) bounding box.
std::vector<Vec3> bounding_corners(const ObjectSpec& spec, const ObjectState& state);
double bounding_radius(const ObjectSpec& spec);

/// Continuity and conservation; returns a description of the first failure.
std::optional<std::string> check_world_line(const WorldLine& w);

}  // namespace voebench
