#include "voebench/scene.hpp"

#include <cmath>
#include <set>
#include <sstream>

#include "voebench/error.hpp"

namespace voebench {

namespace {

constexpr int kSilhouetteSegments = 32;
constexpr double kPlaneMargin = 1e-4;

std::string describe(const Vec3& v) {
  std::ostringstream os;
  os << "(" << v.x() << ", " << v.y() << ", " << v.z() << ")";
  return os.str();
}

void append_circle(std::vector<Vec3>& out, const Vec3& center, const Vec3& normal, double radius) {
  // Circumscribing polygon so that its projection contains the disc's projection.
  const double r = radius / std::cos(M_PI / kSilhouetteSegments);
  Vec3 a = normal.unitOrthogonal();
  Vec3 b = normal.cross(a).normalized();
  for (int i = 0; i < kSilhouetteSegments; ++i) {
    const double th = 2.0 * M_PI * i / kSilhouetteSegments;
    out.push_back(center + r * (std::cos(th) * a + std::sin(th) * b));
  }
}

}  // namespace

std::string_view to_string(Shape s) {
  switch (s) {
    case Shape::sphere: return "sphere";
    case Shape::cube: return "cube";
    case Shape::cone: return "cone";
  }
  return "?";
}

std::string_view to_string(Motion m) {
  switch (m) {
    case Motion::stationary: return "static";
    case Motion::dynamic_1: return "dynamic_1";
    case Motion::dynamic_2: return "dynamic_2";
  }
  return "?";
}

std::string_view to_string(OcclusionState s) {
  switch (s) {
    case OcclusionState::fully_visible: return "fully_visible";
    case OcclusionState::partially_occluded: return "partially_occluded";
    case OcclusionState::fully_occluded: return "fully_occluded";
  }
  return "?";
}

Shape parse_shape(std::string_view s) {
  if (s == "sphere") return Shape::sphere;
  if (s == "cube") return Shape::cube;
  if (s == "cone") return Shape::cone;
  throw Error(ErrorCode::ParseError, "unknown shape '" + std::string(s) + "'");
}

Motion parse_motion(std::string_view s) {
  if (s == "static") return Motion::stationary;
  if (s == "dynamic_1") return Motion::dynamic_1;
  if (s == "dynamic_2") return Motion::dynamic_2;
  throw Error(ErrorCode::ParseError, "unknown motion '" + std::string(s) + "'");
}

double OccluderSpec::elevation_at(int frame) const {
  if (schedule.empty()) return 0.0;
  if (frame <= schedule.front().frame) return schedule.front().elevation;
  for (std::size_t i = 1; i < schedule.size(); ++i) {
    const auto& k0 = schedule[i - 1];
    const auto& k1 = schedule[i];
    if (frame <= k1.frame) {
      const double a = static_cast<double>(frame - k0.frame) / (k1.frame - k0.frame);
      return k0.elevation + a * (k1.elevation - k0.elevation);
    }
  }
  return schedule.back().elevation;
}

std::vector<Vec3> OccluderSpec::corners_at(int frame) const {
  const double e = elevation_at(frame);
  if (e <= 0.0) return {};
  const double x0 = base_position.x() - width / 2, x1 = base_position.x() + width / 2;
  const double y = base_position.y();
  const double z0 = base_position.z(), z1 = base_position.z() + e * height;
  return {Vec3(x0, y, z0), Vec3(x1, y, z0), Vec3(x1, y, z1), Vec3(x0, y, z1)};
}

Intrinsics Intrinsics::from_camera(const CameraSpec& cam, int width, int height) {
  Intrinsics k;
  k.width = width;
  k.height = height;
  k.fy = (height / 2.0) / std::tan(cam.vertical_fov * M_PI / 360.0);
  k.fx = k.fy;
  k.cx = width / 2.0;
  k.cy = height / 2.0;
  return k;
}

const ObjectSpec* WorldLine::find_object(int object_id) const {
  const int i = object_index(object_id);
  return i < 0 ? nullptr : &objects[i];
}

int WorldLine::object_index(int object_id) const {
  for (std::size_t i = 0; i < objects.size(); ++i)
    if (objects[i].object_id == object_id) return static_cast<int>(i);
  return -1;
}

double bounce_height(double h0, double vz, double gravity, double t) {
  if (gravity <= 0.0) return std::abs(h0 + vz * t);
  const double vi = std::sqrt(vz * vz + 2.0 * gravity * h0);
  const double t1 = (vz + vi) / gravity;
  if (t <= t1) return h0 + vz * t - 0.5 * gravity * t * t;
  if (vi == 0.0) return 0.0;
  const double period = 2.0 * vi / gravity;
  const double tau = std::fmod(t - t1, period);
  return std::max(0.0, vi * tau - 0.5 * gravity * tau * tau);
}

double bounding_radius(const ObjectSpec& spec) {
  switch (spec.shape) {
    case Shape::sphere: return spec.size / 2;
    case Shape::cube: return spec.size * std::sqrt(3.0) / 2;
    case Shape::cone: return spec.size / std::sqrt(2.0);
  }
  return spec.size;
}

std::vector<Vec3> bounding_corners(const ObjectSpec& spec, const ObjectState& state) {
  const double h = spec.size / 2;
  const double yaw = spec.shape == Shape::cube ? state.yaw : 0.0;
  const Eigen::Matrix3d rot = Eigen::AngleAxisd(yaw, Vec3::UnitZ()).toRotationMatrix();
  std::vector<Vec3> out;
  out.reserve(8);
  for (int i = 0; i < 8; ++i) {
    const Vec3 local((i & 1) ? h : -h, (i & 2) ? h : -h, (i & 4) ? h : -h);
    out.push_back(state.position + rot * local);
  }
  return out;
}

std::vector<Vec2> silhouette(const ObjectSpec& spec, const ObjectState& state, const Pinhole& cam) {
  std::vector<Vec3> pts;
  const double r = spec.size / 2;
  switch (spec.shape) {
    case Shape::sphere: {
      const Vec3 to_eye = cam.eye - state.position;
      const double d = to_eye.norm();
      const Vec3 u = to_eye / d;
      const double ratio = std::min(r / d, 0.999);
      append_circle(pts, state.position + r * ratio * u, u, r * std::sqrt(1.0 - ratio * ratio));
      break;
    }
    case Shape::cube:
      pts = bounding_corners(spec, state);
      break;
    case Shape::cone:
      append_circle(pts, state.position - Vec3(0, 0, r), Vec3::UnitZ(), r);
      pts.push_back(state.position + Vec3(0, 0, r));
      break;
  }
  std::vector<Vec2> projected;
  projected.reserve(pts.size());
  for (const auto& p : pts) projected.push_back(cam.to_plane(p));
  return convex_hull(std::move(projected));
}

OcclusionState occlusion_state(const WorldLine& w, int frame, int object_id) {
  const int idx = w.object_index(object_id);
  if (idx < 0 || frame < 0 || frame >= w.n_frames)
    throw Error(ErrorCode::ConfigError, "occlusion_state: no object " + std::to_string(object_id) +
                                            " at frame " + std::to_string(frame));
  const Pinhole cam(w.camera);
  const ObjectSpec& spec = w.objects[idx];
  const ObjectState& state = w.frames[frame][idx];
  const auto hull = silhouette(spec, state, cam);
  const auto corners = bounding_corners(spec, state);

  bool partial = false;
  for (const auto& occ : w.occluders) {
    const auto quad3 = occ.corners_at(frame);
    if (quad3.empty()) continue;
    bool behind_camera = false;
    for (const auto& q : quad3) behind_camera |= cam.to_camera(q).z() <= 1e-6;
    if (behind_camera) continue;

    const double py = occ.base_position.y();
    const double eye_side = cam.eye.y() - py;
    int far = 0;
    for (const auto& c : corners) far += (c.y() - py) * eye_side < 0.0 ? 1 : 0;
    if (far == 0) continue;

    std::vector<Vec2> quad;
    for (const auto& q : quad3) quad.push_back(cam.to_plane(q));
    quad = convex_hull(std::move(quad));

    if (far == static_cast<int>(corners.size())) {
      bool contained = true;
      for (const auto& p : hull) contained &= inside_convex(quad, p, kPlaneMargin);
      if (contained) return OcclusionState::fully_occluded;
    }
    partial |= convex_overlap(hull, quad);
  }
  return partial ? OcclusionState::partially_occluded : OcclusionState::fully_visible;
}

WorldLine simulate(const SceneRecipe& recipe) {
  if (recipe.n_frames < 1) throw Error(ErrorCode::ConfigError, "n_frames must be positive");
  const auto& cam = recipe.camera;
  if ((cam.position - cam.look_at).norm() < 1e-9)
    throw Error(ErrorCode::ConfigError, "camera position equals look_at");
  if (!(cam.vertical_fov > 10.0 && cam.vertical_fov < 120.0))
    throw Error(ErrorCode::ConfigError, "vertical_fov outside (10, 120) degrees");
  if ((cam.look_at - cam.position).normalized().cross(Vec3::UnitZ()).norm() < 1e-6)
    throw Error(ErrorCode::ConfigError, "camera looks straight up or down");

  std::set<int> ids;
  for (const auto& [obj, traj] : recipe.objects) {
    if (!ids.insert(obj.object_id).second)
      throw Error(ErrorCode::ConfigError, "duplicate object_id " + std::to_string(obj.object_id));
    if (!(obj.size >= recipe.size_min && obj.size <= recipe.size_max))
      throw Error(ErrorCode::ConfigError, "object " + std::to_string(obj.object_id) + " size out of range");
    if (traj.kind == Motion::stationary && !traj.initial_velocity.isZero(0.0))
      throw Error(ErrorCode::ConfigError, "static trajectory with non-zero velocity");
    if (!(traj.gravity >= 0.0)) throw Error(ErrorCode::ConfigError, "gravity must be non-negative");
    if (!traj.initial_position.allFinite() || !traj.initial_velocity.allFinite())
      throw Error(ErrorCode::ConfigError, "non-finite trajectory");
  }
  for (const auto& occ : recipe.occluders) {
    if (!(occ.width > 0 && occ.height > 0)) throw Error(ErrorCode::ConfigError, "degenerate occluder");
    for (std::size_t i = 0; i < occ.schedule.size(); ++i) {
      const auto& k = occ.schedule[i];
      if (!(k.elevation >= 0.0 && k.elevation <= 1.0))
        throw Error(ErrorCode::ConfigError, "occluder elevation outside [0, 1]");
      if (i > 0 && k.frame <= occ.schedule[i - 1].frame)
        throw Error(ErrorCode::ConfigError, "occluder schedule not monotone");
    }
  }

  for (std::size_t i = 0; i < recipe.objects.size(); ++i) {
    for (std::size_t j = i + 1; j < recipe.objects.size(); ++j) {
      const auto& [a, ta] = recipe.objects[i];
      const auto& [b, tb] = recipe.objects[j];
      if ((ta.initial_position - tb.initial_position).norm() < bounding_radius(a) + bounding_radius(b))
        throw Error(ErrorCode::SpawnCollision, "objects " + std::to_string(a.object_id) + " and " +
                                                   std::to_string(b.object_id) + " overlap at spawn");
    }
  }

  WorldLine w;
  w.camera = recipe.camera;
  w.occluders = recipe.occluders;
  w.n_frames = recipe.n_frames;
  w.d_max = recipe.d_max;
  w.arena = recipe.arena;
  w.rng_seed = recipe.rng_seed;
  for (const auto& [obj, traj] : recipe.objects) w.objects.push_back(obj);
  w.frames.assign(recipe.n_frames, {});

  constexpr double kTol = 1e-9;
  for (int t = 0; t < recipe.n_frames; ++t) {
    auto& frame = w.frames[t];
    frame.reserve(recipe.objects.size());
    for (const auto& [obj, traj] : recipe.objects) {
      const double rest = obj.size / 2;
      const double h0 = traj.initial_position.z() - w.arena.min.z() - rest;
      if (h0 < -kTol)
        throw Error(ErrorCode::OutOfBounds, "object " + std::to_string(obj.object_id) + " starts below the floor");
      Vec3 p = traj.initial_position + traj.initial_velocity * t;
      p.z() = w.arena.min.z() + rest + bounce_height(std::max(h0, 0.0), traj.initial_velocity.z(), traj.gravity, t);
      ObjectState st{obj.object_id, p, obj.yaw};
      for (const auto& c : bounding_corners(obj, st)) {
        if ((c.array() < w.arena.min.array() - kTol).any() || (c.array() > w.arena.max.array() + kTol).any())
          throw Error(ErrorCode::OutOfBounds, "object " + std::to_string(obj.object_id) + " leaves the arena at frame " +
                                                  std::to_string(t) + " near " + describe(c));
      }
      frame.push_back(st);
    }
  }
  if (auto err = check_world_line(w)) throw Error(ErrorCode::ConfigError, *err);
  return w;
}

std::optional<std::string> check_world_line(const WorldLine& w) {
  if (static_cast<int>(w.frames.size()) != w.n_frames) return "frame count mismatch";
  for (int t = 0; t < w.n_frames; ++t) {
    const auto& f = w.frames[t];
    if (f.size() != w.objects.size()) return "object count changes at frame " + std::to_string(t);
    for (std::size_t i = 0; i < f.size(); ++i) {
      if (f[i].object_id != w.objects[i].object_id) return "object identity changes at frame " + std::to_string(t);
      if (!f[i].position.allFinite()) return "non-finite position at frame " + std::to_string(t);
      if (t > 0) {
        const double step = (f[i].position - w.frames[t - 1][i].position).norm();
        if (step > w.d_max + 1e-9)
          return "object " + std::to_string(f[i].object_id) + " moves " + std::to_string(step) +
                 " m between frames " + std::to_string(t - 1) + " and " + std::to_string(t);
        if (f[i].yaw != w.frames[t - 1][i].yaw) return "orientation jump at frame " + std::to_string(t);
      }
    }
  }
  return std::nullopt;
}

}  // namespace voebench
