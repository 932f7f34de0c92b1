#include "voebench/renderer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "voebench/error.hpp"
#include "voebench/rng.hpp"

namespace voebench {

namespace {

constexpr double kEps = 1e-9;
constexpr double kAmbient = 0.35;
constexpr double kDiffuse = 0.65;
constexpr Rgb kSky{215, 226, 240};
constexpr Rgb kFloorA{196, 182, 150};
constexpr Rgb kFloorB{170, 156, 124};
constexpr Rgb kBackWall{158, 176, 196};
constexpr Rgb kSideWall{146, 166, 150};

const Vec3& light_dir() {
  static const Vec3 l = Vec3(-0.45, -0.6, 0.65).normalized();
  return l;
}

struct Hit {
  double t = std::numeric_limits<double>::infinity();
  Vec3 normal = Vec3::UnitZ();
  int entity = 0;  ///< 0 = room / sky, 1.. objects, then occluders
  Rgb room_color = kSky;  ///< already shaded once it comes out of room_hits
};

struct Ray {
  Vec3 o, d;
  Vec3 at(double t) const { return o + t * d; }
};

bool hit_sphere(const Ray& r, const Vec3& c, double radius, double& t, Vec3& n) {
  const Vec3 oc = r.o - c;
  const double a = r.d.squaredNorm();
  const double b = 2.0 * r.d.dot(oc);
  const double cc = oc.squaredNorm() - radius * radius;
  const double disc = b * b - 4 * a * cc;
  if (disc < 0) return false;
  const double s = std::sqrt(disc);
  double t0 = (-b - s) / (2 * a);
  if (t0 <= kEps) t0 = (-b + s) / (2 * a);
  if (t0 <= kEps) return false;
  t = t0;
  n = (r.at(t) - c).normalized();
  return true;
}

bool hit_box(const Ray& r, const Vec3& c, double half, double yaw, double& t, Vec3& n) {
  const Eigen::Matrix3d rot = Eigen::AngleAxisd(yaw, Vec3::UnitZ()).toRotationMatrix();
  const Vec3 o = rot.transpose() * (r.o - c);
  const Vec3 d = rot.transpose() * r.d;
  double tmin = -std::numeric_limits<double>::infinity(), tmax = std::numeric_limits<double>::infinity();
  int axis = -1;
  double sign = 0;
  for (int k = 0; k < 3; ++k) {
    if (std::abs(d[k]) < 1e-15) {
      if (o[k] < -half || o[k] > half) return false;
      continue;
    }
    double t1 = (-half - o[k]) / d[k];
    double t2 = (half - o[k]) / d[k];
    double s = -1;
    if (t1 > t2) {
      std::swap(t1, t2);
      s = 1;
    }
    if (t1 > tmin) {
      tmin = t1;
      axis = k;
      sign = s;
    }
    tmax = std::min(tmax, t2);
    if (tmin > tmax) return false;
  }
  if (tmin <= kEps || axis < 0) return false;
  t = tmin;
  Vec3 ln = Vec3::Zero();
  ln[axis] = sign;
  n = rot * ln;
  return true;
}

bool hit_cone(const Ray& r, const Vec3& center, double size, double& t, Vec3& n) {
  const double h = size, rad = size / 2, k2 = (rad / h) * (rad / h);
  const Vec3 o = r.o - (center - Vec3(0, 0, h / 2));
  const Vec3& d = r.d;
  bool found = false;
  double best = std::numeric_limits<double>::infinity();
  const double A = d.x() * d.x() + d.y() * d.y() - k2 * d.z() * d.z();
  const double B = 2 * (o.x() * d.x() + o.y() * d.y() + k2 * (h - o.z()) * d.z());
  const double C = o.x() * o.x() + o.y() * o.y() - k2 * (h - o.z()) * (h - o.z());
  auto try_lateral = [&](double tc) {
    if (tc <= kEps || tc >= best) return;
    const double z = o.z() + tc * d.z();
    if (z < 0 || z > h) return;
    best = tc;
    const Vec3 p = o + tc * d;
    n = Vec3(p.x(), p.y(), k2 * (h - z)).normalized();
    found = true;
  };
  if (std::abs(A) > 1e-15) {
    const double disc = B * B - 4 * A * C;
    if (disc >= 0) {
      const double s = std::sqrt(disc);
      try_lateral((-B - s) / (2 * A));
      try_lateral((-B + s) / (2 * A));
    }
  } else if (std::abs(B) > 1e-15) {
    try_lateral(-C / B);
  }
  if (std::abs(d.z()) > 1e-15) {
    const double tb = -o.z() / d.z();
    if (tb > kEps && tb < best) {
      const Vec3 p = o + tb * d;
      if (p.x() * p.x() + p.y() * p.y() <= rad * rad) {
        best = tb;
        n = -Vec3::UnitZ();
        found = true;
      }
    }
  }
  if (found) t = best;
  return found;
}

void hit_room(const Ray& r, const Arena& arena, Hit& hit) {
  auto consider = [&](double tc, const Vec3& normal, Rgb color) {
    if (tc > kEps && tc < hit.t) {
      hit.t = tc;
      hit.normal = normal;
      hit.room_color = color;
      hit.entity = 0;
    }
  };
  const Vec3& lo = arena.min;
  const Vec3& hi = arena.max;
  if (std::abs(r.d.z()) > 1e-15) {
    const double tf = (lo.z() - r.o.z()) / r.d.z();
    const Vec3 p = r.at(tf);
    if (p.x() >= lo.x() && p.x() <= hi.x() && p.y() >= lo.y() && p.y() <= hi.y()) {
      const bool odd = (static_cast<long>(std::floor(p.x())) + static_cast<long>(std::floor(p.y()))) & 1;
      consider(tf, Vec3::UnitZ(), odd ? kFloorB : kFloorA);
    }
  }
  if (std::abs(r.d.y()) > 1e-15) {
    const double tb = (hi.y() - r.o.y()) / r.d.y();
    const Vec3 p = r.at(tb);
    if (p.x() >= lo.x() && p.x() <= hi.x() && p.z() >= lo.z() && p.z() <= hi.z())
      consider(tb, -Vec3::UnitY(), kBackWall);
  }
  if (std::abs(r.d.x()) > 1e-15) {
    for (double wx : {lo.x(), hi.x()}) {
      const double ts = (wx - r.o.x()) / r.d.x();
      const Vec3 p = r.at(ts);
      if (p.y() >= lo.y() && p.y() <= hi.y() && p.z() >= lo.z() && p.z() <= hi.z())
        consider(ts, wx < 0 ? Vec3(Vec3::UnitX()) : Vec3(-Vec3::UnitX()), kSideWall);
    }
  }
}

/// std::lround for v >= 0 without the libm call; x - trunc(x) is exact.
long round_pos(double v) {
  const auto t = static_cast<long>(v);
  return t + (v - static_cast<double>(t) >= 0.5);
}

std::uint8_t to_byte(double v) { return static_cast<std::uint8_t>(std::clamp(v > 0 ? round_pos(v) : 0L, 0L, 255L)); }

Rgb shade(const Rgb& base, const Vec3& normal) {
  const double f = kAmbient + kDiffuse * std::max(0.0, normal.dot(light_dir()));
  return {to_byte(base[0] * f), to_byte(base[1] * f), to_byte(base[2] * f)};
}

struct PixelBox {
  int x0 = 0, x1 = -1, y0 = 0, y1 = -1;
  bool contains(int x, int y) const { return x >= x0 && x <= x1 && y >= y0 && y <= y1; }
};

PixelBox pixel_box(const std::vector<Vec2>& plane_pts, int width, int height) {
  PixelBox b;
  if (plane_pts.empty()) return b;
  double umin = 1e300, umax = -1e300, vmin = 1e300, vmax = -1e300;
  for (const auto& p : plane_pts) {
    const double u = width / 2.0 + (height / 2.0) * p.x();
    const double v = height / 2.0 - (height / 2.0) * p.y();
    umin = std::min(umin, u);
    umax = std::max(umax, u);
    vmin = std::min(vmin, v);
    vmax = std::max(vmax, v);
  }
  b.x0 = std::max(0, static_cast<int>(std::floor(umin)) - 1);
  b.x1 = std::min(width - 1, static_cast<int>(std::ceil(umax)) + 1);
  b.y0 = std::max(0, static_cast<int>(std::floor(vmin)) - 1);
  b.y1 = std::min(height - 1, static_cast<int>(std::ceil(vmax)) + 1);
  return b;
}

/// Labels 4-connected regions of equal non-zero entity index in scan order.
int label_components(const Plane<std::int16_t>& entity, Plane<std::uint8_t>& labels, std::vector<int>& label_entity) {
  const int H = static_cast<int>(entity.rows()), W = static_cast<int>(entity.cols());
  labels.setZero(H, W);
  label_entity.assign(1, 0);
  std::vector<int> stack;
  int next = 0;
  for (int y = 0; y < H; ++y) {
    for (int x = 0; x < W; ++x) {
      const int e = entity(y, x);
      if (e == 0 || labels(y, x) != 0) continue;
      if (++next > 255) throw Error(ErrorCode::ConfigError, "more than 255 instance regions in one frame");
      label_entity.push_back(e);
      labels(y, x) = static_cast<std::uint8_t>(next);
      stack.assign(1, y * W + x);
      while (!stack.empty()) {
        const int p = stack.back();
        stack.pop_back();
        const int py = p / W, px = p % W;
        const int nbr[4][2] = {{py - 1, px}, {py + 1, px}, {py, px - 1}, {py, px + 1}};
        for (const auto& q : nbr) {
          if (q[0] < 0 || q[0] >= H || q[1] < 0 || q[1] >= W) continue;
          if (entity(q[0], q[1]) != e || labels(q[0], q[1]) != 0) continue;
          labels(q[0], q[1]) = static_cast<std::uint8_t>(next);
          stack.push_back(q[0] * W + q[1]);
        }
      }
    }
  }
  return next;
}

// The room depends only on the camera, which is fixed for a world line, so its hits are
// computed once per camera and reused for every frame rendered on this thread.
struct RoomCache {
  CameraSpec camera;
  Arena arena;
  int width = 0, height = 0;
  std::vector<Hit> hits;

  bool matches(const CameraSpec& c, const Arena& a, int w, int h) const {
    return !hits.empty() && w == width && h == height && c.position == camera.position &&
           c.look_at == camera.look_at && c.vertical_fov == camera.vertical_fov && a.min == arena.min &&
           a.max == arena.max && a.draw_room == arena.draw_room;
  }
};

const std::vector<Hit>& room_hits(const WorldLine& world, const Pinhole& cam, const Intrinsics& K, int W, int H) {
  thread_local RoomCache cache;
  if (cache.matches(world.camera, world.arena, W, H)) return cache.hits;
  cache.camera = world.camera;
  cache.arena = world.arena;
  cache.width = W;
  cache.height = H;
  cache.hits.assign(static_cast<std::size_t>(W) * H, Hit{});
  if (world.arena.draw_room)
    for (int y = 0; y < H; ++y)
      for (int x = 0; x < W; ++x) {
        const double xn = (x + 0.5 - K.cx) / K.fx;
        const double yn = (K.cy - (y + 0.5)) / K.fy;
        Hit& h = cache.hits[y * W + x];
        hit_room(Ray{cam.eye, cam.forward + xn * cam.right + yn * cam.up}, world.arena, h);
        if (std::isfinite(h.t)) h.room_color = shade(h.room_color, h.normal);
      }
  return cache.hits;
}

}  // namespace

std::vector<Rgb> default_palette() {
  return {{{220, 40, 40}},  {{40, 160, 60}},  {{40, 80, 220}},  {{230, 190, 30}}, {{170, 50, 200}},
          {{30, 190, 200}}, {{240, 120, 20}}, {{120, 60, 20}},  {{250, 110, 170}}, {{90, 200, 120}}};
}

FrameBundle render_frame(const WorldLine& world, int frame, const RenderConfig& cfg, std::uint64_t shuffle_seed) {
  if (cfg.width <= 0 || cfg.height <= 0) throw Error(ErrorCode::ConfigError, "render size must be positive");
  if (frame < 0 || frame >= world.n_frames) throw Error(ErrorCode::ConfigError, "frame index out of range");
  const int W = cfg.width, H = cfg.height;
  const Pinhole cam(world.camera);
  const Intrinsics K = Intrinsics::from_camera(world.camera, W, H);

  struct Prim {
    int entity;
    PixelBox box;
  };
  std::vector<Prim> prims;
  const auto& states = world.frames[frame];
  const int n_obj = static_cast<int>(world.objects.size());
  for (int i = 0; i < n_obj; ++i) {
    const auto& s = states[i];
    bool in_front = true;
    for (const auto& c : bounding_corners(world.objects[i], s)) in_front &= cam.to_camera(c).z() > 1e-6;
    if (!in_front) continue;
    prims.push_back({i + 1, pixel_box(silhouette(world.objects[i], s, cam), W, H)});
  }
  std::vector<std::vector<Vec3>> quads(world.occluders.size());
  for (std::size_t k = 0; k < world.occluders.size(); ++k) {
    quads[k] = world.occluders[k].corners_at(frame);
    if (quads[k].empty()) continue;
    std::vector<Vec2> pts;
    bool in_front = true;
    for (const auto& q : quads[k]) {
      in_front &= cam.to_camera(q).z() > 1e-6;
      pts.push_back(cam.to_plane(q));
    }
    // A screen reaching behind the eye covers everything; skip the box culling.
    PixelBox box = in_front ? pixel_box(pts, W, H) : PixelBox{0, W - 1, 0, H - 1};
    prims.push_back({n_obj + 1 + static_cast<int>(k), box});
  }

  FrameBundle out;
  out.rgb.resize(H, 3 * W);
  out.depth.resize(H, W);
  Plane<std::int16_t> entity(H, W);
  const auto far_mm = static_cast<std::uint16_t>(std::lround(std::min(cfg.far_clip * 1000.0, 65535.0)));
  const std::vector<Hit>& room = room_hits(world, cam, K, W, H);

  for (int y = 0; y < H; ++y) {
    for (int x = 0; x < W; ++x) {
      const double xn = (x + 0.5 - K.cx) / K.fx;
      const double yn = (K.cy - (y + 0.5)) / K.fy;
      const Ray ray{cam.eye, cam.forward + xn * cam.right + yn * cam.up};
      Hit hit = room[y * W + x];
      for (const auto& p : prims) {
        if (!p.box.contains(x, y)) continue;
        double t;
        Vec3 n;
        bool ok = false;
        if (p.entity <= n_obj) {
          const auto& spec = world.objects[p.entity - 1];
          const auto& st = states[p.entity - 1];
          switch (spec.shape) {
            case Shape::sphere: ok = hit_sphere(ray, st.position, spec.size / 2, t, n); break;
            case Shape::cube: ok = hit_box(ray, st.position, spec.size / 2, st.yaw, t, n); break;
            case Shape::cone: ok = hit_cone(ray, st.position, spec.size, t, n); break;
          }
        } else {
          const auto& q = quads[p.entity - n_obj - 1];
          if (std::abs(ray.d.y()) > 1e-15) {
            t = (q[0].y() - ray.o.y()) / ray.d.y();
            const Vec3 hp = ray.at(t);
            ok = t > kEps && hp.x() >= q[0].x() && hp.x() <= q[1].x() && hp.z() >= q[0].z() && hp.z() <= q[2].z();
            n = -Vec3::UnitY();
          }
        }
        if (ok && t < hit.t) {
          hit.t = t;
          hit.normal = n;
          hit.entity = p.entity;
        }
      }

      Rgb c;
      if (hit.entity == 0) {
        c = hit.room_color;
      } else if (hit.entity <= n_obj) {
        const auto& spec = world.objects[hit.entity - 1];
        const auto& base = cfg.palette[static_cast<std::size_t>(spec.texture_id) % cfg.palette.size()];
        c = shade(base, hit.normal.dot(ray.d) > 0 ? -hit.normal : hit.normal);
      } else {
        c = kOccluderRgb;
      }
      out.rgb(y, 3 * x) = c[0];
      out.rgb(y, 3 * x + 1) = c[1];
      out.rgb(y, 3 * x + 2) = c[2];
      // ray.d has unit forward component, so t is the camera-axis depth.
      out.depth(y, x) = (std::isfinite(hit.t) && hit.t < cfg.far_clip)
                            ? static_cast<std::uint16_t>(std::min<long>(round_pos(hit.t * 1000.0), far_mm - 1))
                            : far_mm;
      entity(y, x) = static_cast<std::int16_t>(hit.entity);
    }
  }

  std::vector<int> label_entity;
  label_components(entity, out.mask, label_entity);
  out.hidden_truth.resize(label_entity.size());
  for (std::size_t l = 1; l < label_entity.size(); ++l) {
    const int e = label_entity[l];
    out.hidden_truth[l] = e <= n_obj ? EntityRef{EntityKind::object, world.objects[e - 1].object_id}
                                     : EntityRef{EntityKind::occluder, world.occluders[e - n_obj - 1].occluder_id};
  }
  shuffle_labels(out, derive_key(shuffle_seed, {static_cast<std::uint64_t>(frame)}));
  return out;
}

void shuffle_labels(FrameBundle& bundle, std::uint64_t seed) {
  const int k = bundle.label_count();
  if (k < 2) return;
  std::vector<int> perm(k + 1);
  std::iota(perm.begin(), perm.end(), 0);
  CounterRng rng(seed);
  for (int i = k; i > 1; --i) std::swap(perm[i], perm[rng.uniform_int(1, i)]);
  std::vector<EntityRef> truth(bundle.hidden_truth.size());
  truth[0] = bundle.hidden_truth[0];
  for (int l = 1; l <= k; ++l) truth[perm[l]] = bundle.hidden_truth[l];
  bundle.hidden_truth = std::move(truth);
  bundle.mask = bundle.mask.unaryExpr([&](std::uint8_t v) { return static_cast<std::uint8_t>(perm[v]); });
}

std::uint64_t rgb_hash(const Plane<std::uint8_t>& rgb) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  const std::uint8_t* p = rgb.data();
  const Eigen::Index n = rgb.size();
  for (Eigen::Index i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
  // Fold in the shape so equal bytes at different sizes differ.
  h ^= static_cast<std::uint64_t>(rgb.rows()) * 0x9E3779B97F4A7C15ULL;
  h ^= static_cast<std::uint64_t>(rgb.cols()) << 32;
  return h;
}

int object_pixel_count(const FrameBundle& bundle, int object_id) {
  std::vector<bool> hit(bundle.hidden_truth.size(), false);
  for (std::size_t l = 1; l < hit.size(); ++l)
    hit[l] = bundle.hidden_truth[l].kind == EntityKind::object && bundle.hidden_truth[l].id == object_id;
  int n = 0;
  for (Eigen::Index i = 0; i < bundle.mask.size(); ++i) n += hit[bundle.mask.data()[i]] ? 1 : 0;
  return n;
}

}  // namespace voebench
