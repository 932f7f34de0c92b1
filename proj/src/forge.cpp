#include "voebench/forge.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "voebench/error.hpp"
#include "voebench/rng.hpp"

namespace voebench {

namespace {

constexpr int kTarget = 0;

// Lanes are depth bands (world y). Distractors sit behind the target lane so they can
// never hide it, and the bands are far enough apart that objects never interpenetrate.
constexpr double kTargetLane[2] = {4.6, 5.0};
constexpr double kDistractorLane[2][2] = {{6.0, 6.3}, {7.3, 7.6}};
constexpr double kScreenGap[2] = {1.1, 1.5};
constexpr double kScreenMargin = 0.08;

CameraSpec draw_camera(CounterRng& r) {
  CameraSpec c;
  c.position = Vec3(r.uniform(-0.3, 0.3), r.uniform(0.4, 0.5), r.uniform(1.6, 1.9));
  c.look_at = Vec3(r.uniform(-0.2, 0.2), 5.0, r.uniform(0.3, 0.5));
  c.vertical_fov = r.uniform(50.0, 54.0);
  return c;
}

Shape draw_shape(CounterRng& r) { return static_cast<Shape>(r.uniform_int(0, 2)); }

ObjectSpec draw_object(CounterRng& r, int id, int texture_id) {
  ObjectSpec o;
  o.object_id = id;
  o.shape = draw_shape(r);
  o.size = r.uniform(0.5, 0.7);
  o.texture_id = texture_id;
  o.yaw = r.uniform(0.0, M_PI / 2);
  return o;
}

std::vector<int> draw_textures(CounterRng& r, int n) {
  std::vector<int> t(10);
  std::iota(t.begin(), t.end(), 0);
  for (int i = 9; i > 0; --i) std::swap(t[i], t[r.uniform_int(0, i)]);
  t.resize(n);
  return t;
}

TrajectorySpec rolling(double x0, double y, double size, double vx) {
  TrajectorySpec t;
  t.kind = vx == 0.0 ? Motion::stationary : Motion::dynamic_1;
  t.initial_position = Vec3(x0, y, size / 2);
  t.initial_velocity = Vec3(vx, 0, 0);
  return t;
}

std::vector<Keyframe> ramp(int rise_start, int rise_dur, int lower_start, int lower_dur) {
  std::vector<Keyframe> k;
  if (rise_start > 0) k.push_back({0, 0.0});
  k.push_back({rise_start, 0.0});
  k.push_back({rise_start + rise_dur, 1.0});
  k.push_back({lower_start, 1.0});
  k.push_back({lower_start + lower_dur, 0.0});
  return k;
}

/// Smallest screen in the plane y = screen_y (plus margin) hiding every listed pose from the eye.
OccluderSpec fit_screen(int id, double screen_y, const CameraSpec& cam,
                        const std::vector<std::pair<ObjectSpec, ObjectState>>& poses) {
  double xmin = 1e300, xmax = -1e300, zmax = 0.0;
  const Vec3& e = cam.position;
  for (const auto& [spec, st] : poses) {
    for (const auto& c : bounding_corners(spec, st)) {
      const double s = (screen_y - e.y()) / (c.y() - e.y());
      const Vec3 p = e + s * (c - e);
      xmin = std::min(xmin, p.x());
      xmax = std::max(xmax, p.x());
      zmax = std::max(zmax, p.z());
    }
  }
  OccluderSpec o;
  o.occluder_id = id;
  o.base_position = Vec3((xmin + xmax) / 2, screen_y, 0.0);
  o.width = xmax - xmin + 2 * kScreenMargin;
  o.height = zmax + kScreenMargin;
  return o;
}

std::vector<std::pair<ObjectSpec, ObjectState>> target_poses(const WorldLine& a, const WorldLine& b, int from,
                                                             int to) {
  std::vector<std::pair<ObjectSpec, ObjectState>> out;
  for (const WorldLine* w : {&a, &b}) {
    const int i = w->object_index(kTarget);
    if (i < 0) continue;
    for (int t = std::max(from, 0); t <= std::min(to, w->n_frames - 1); ++t) out.emplace_back(w->objects[i], w->frames[t][i]);
  }
  return out;
}

bool in_view(const WorldLine& w, const ForgeConfig& cfg) {
  const Pinhole cam(w.camera);
  const double xl = cfg.aspect - cfg.view_margin, yl = 1.0 - cfg.view_margin;
  for (int t = 0; t < w.n_frames; ++t) {
    for (std::size_t i = 0; i < w.objects.size(); ++i) {
      for (const auto& c : bounding_corners(w.objects[i], w.frames[t][i]))
        if (cam.to_camera(c).z() < 0.5) return false;
      for (const auto& p : silhouette(w.objects[i], w.frames[t][i], cam))
        if (std::abs(p.x()) > xl || std::abs(p.y()) > yl) return false;
    }
  }
  return true;
}

/// Every object unoccluded and apart from the others at frame 0, so trackers see the full cast.
bool clear_start(const WorldLine& w) {
  const Pinhole cam(w.camera);
  std::vector<std::vector<Vec2>> hulls;
  for (std::size_t i = 0; i < w.objects.size(); ++i) {
    if (occlusion_state(w, 0, w.objects[i].object_id) != OcclusionState::fully_visible) return false;
    hulls.push_back(silhouette(w.objects[i], w.frames[0][i], cam));
  }
  for (std::size_t i = 0; i < hulls.size(); ++i)
    for (std::size_t j = i + 1; j < hulls.size(); ++j)
      if (convex_overlap(hulls[i], hulls[j])) return false;
  return true;
}

bool screens_apart(const std::vector<OccluderSpec>& occ) {
  for (std::size_t i = 0; i < occ.size(); ++i)
    for (std::size_t j = i + 1; j < occ.size(); ++j)
      if (std::abs(occ[i].base_position.x() - occ[j].base_position.x()) < (occ[i].width + occ[j].width) / 2 + 0.1)
        return false;
  return true;
}

bool target_hidden(const WorldLine& w, int t) {
  return w.object_index(kTarget) < 0 || occlusion_state(w, t, kTarget) == OcclusionState::fully_occluded;
}

// One attempt at a pair; returns false when the draw has to be rejected.
bool try_pair(const ScenarioSpec& sc, CounterRng& r, const ForgeConfig& cfg, WorldPair& out) {
  const bool occluded = sc.visibility == Visibility::occluded;
  const double delta = 3.0 * cfg.d_max;

  SceneRecipe base;
  base.n_frames = cfg.n_frames;
  base.d_max = cfg.d_max;
  base.camera = draw_camera(r);
  base.rng_seed = r.next();

  const auto textures = draw_textures(r, sc.n_objects);
  const ObjectSpec target = draw_object(r, kTarget, textures[0]);
  const double lane_t = r.uniform(kTargetLane[0], kTargetLane[1]);

  // Target trajectory in B and the frame intervals it should spend behind each screen.
  TrajectorySpec traj_t;
  std::vector<std::pair<int, int>> hide;
  switch (sc.motion) {
    case Motion::stationary:
      traj_t = rolling(r.uniform(-0.8, 0.8), lane_t, target.size, 0.0);
      break;
    case Motion::dynamic_1: {
      const double v = r.uniform(0.024, 0.034) * (r.coin() ? 1 : -1);
      const double c = r.uniform(46, 54), h = r.uniform(26, 38);
      traj_t = rolling(r.uniform(-0.4, 0.4) - v * c, lane_t, target.size, v);
      hide.emplace_back(static_cast<int>(std::lround(c - h / 2)), static_cast<int>(std::lround(c + h / 2)));
      break;
    }
    case Motion::dynamic_2: {
      const double v = r.uniform(0.03, 0.036) * (r.coin() ? 1 : -1);
      traj_t = rolling(r.uniform(-0.3, 0.3) - v * 49.5, lane_t, target.size, v);
      for (auto [lo, hi] : {std::pair{25.0, 30.0}, std::pair{70.0, 75.0}}) {
        // Short sweeps keep the two screens apart; wider ones were rejected on most draws.
        const double c = r.uniform(lo, hi), h = r.uniform(8, 11);
        hide.emplace_back(static_cast<int>(std::lround(c - h / 2)), static_cast<int>(std::lround(c + h / 2)));
      }
      break;
    }
  }
  if (sc.motion != Motion::stationary) traj_t.kind = sc.motion;

  std::vector<std::pair<ObjectSpec, TrajectorySpec>> distractors;
  for (int k = 1; k < sc.n_objects; ++k) {
    ObjectSpec d = draw_object(r, k, textures[k]);
    const double lane = r.uniform(kDistractorLane[k - 1][0], kDistractorLane[k - 1][1]);
    if (sc.motion == Motion::stationary) {
      distractors.emplace_back(d, rolling(r.uniform(-1.6, 1.6), lane, d.size, 0.0));
    } else {
      const double v = r.uniform(0.01, 0.025) * (r.coin() ? 1 : -1);
      auto tr = rolling(r.uniform(-0.8, 0.8) - v * 49.5, lane, d.size, v);
      tr.kind = sc.motion;
      distractors.emplace_back(d, tr);
    }
  }

  // The target as it appears in world line A (for O3, B gets the shifted copy).
  std::optional<std::pair<ObjectSpec, TrajectorySpec>> target_a;
  switch (sc.block) {
    case BlockId::O1:
      break;
    case BlockId::O2: {
      ObjectSpec alt = target;
      const int shift = r.uniform_int(1, 2);
      alt.shape = static_cast<Shape>((static_cast<int>(target.shape) + shift) % 3);
      target_a.emplace(alt, traj_t);
      break;
    }
    case BlockId::O3: {
      TrajectorySpec moved = traj_t;
      if (sc.motion == Motion::stationary)
        moved.initial_position.x() += delta * (r.coin() ? 1 : -1);
      else
        moved.initial_position.y() -= delta;
      target_a.emplace(target, traj_t);
      traj_t = moved;
      break;
    }
  }

  SceneRecipe ra = base, rb = base;
  rb.objects.emplace_back(target, traj_t);  // for O3 this is the shifted copy
  if (target_a) ra.objects.push_back(*target_a);
  for (const auto& d : distractors) {
    ra.objects.push_back(d);
    rb.objects.push_back(d);
  }

  WorldLine wa, wb;
  try {
    wa = simulate(ra);
    wb = simulate(rb);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::SpawnCollision || e.code() == ErrorCode::OutOfBounds) return false;
    throw;
  }

  if (occluded) {
    const double screen_y = lane_t - r.uniform(kScreenGap[0], kScreenGap[1]);
    std::vector<OccluderSpec> screens;
    if (sc.motion == Motion::stationary) {
      OccluderSpec s = fit_screen(0, screen_y, base.camera, target_poses(wa, wb, 0, 0));
      // A tight screen around a still object makes the target dominate the rise/lower diff.
      s.width = std::max(s.width, r.uniform(1.4, 1.8));
      s.height = std::max(s.height, r.uniform(0.9, 1.1));
      const int rs = r.uniform_int(8, 20), rd = r.uniform_int(3, 5), ld = r.uniform_int(12, 18);
      const int ud = std::min(r.uniform_int(12, 24), 86 - rs - rd - ld);
      s.schedule = ramp(rs, rd, rs + rd + ud, ld);
      screens.push_back(s);
    } else {
      for (std::size_t k = 0; k < hide.size(); ++k) {
        OccluderSpec s = fit_screen(static_cast<int>(k), screen_y, base.camera,
                                    target_poses(wa, wb, hide[k].first, hide[k].second));
        const int rs = r.uniform_int(1, 4), rd = r.uniform_int(3, 5);
        const int earliest = hide[k].second + 3;
        const bool last = k + 1 == hide.size();
        // Lowering is slow so the rise stays the largest screen event; the last one may be
        // squeezed to fit before the end.
        int ld = r.uniform_int(10, 14);
        if (last) ld = std::min(ld, cfg.n_frames - 3 - earliest);
        if (ld < 8) return false;
        const int latest = last ? cfg.n_frames - 3 - ld : earliest + 22;
        s.schedule = ramp(rs, rd, r.uniform_int(earliest, latest), ld);
        screens.push_back(s);
      }
      if (!screens_apart(screens)) return false;
    }
    wa.occluders = screens;
    wb.occluders = screens;
  }

  if (!in_view(wa, cfg) || !in_view(wb, cfg) || !clear_start(wa) || !clear_start(wb)) return false;

  const int n_windows = sc.motion == Motion::dynamic_2 ? 2 : 1;
  std::vector<SpliceWindow> windows;
  if (occluded) {
    windows = find_splice_windows(wa, wb, kTarget, n_windows, cfg.w_min);
    if (static_cast<int>(windows.size()) < n_windows) return false;
  } else if (n_windows == 1) {
    const int s = r.uniform_int(35, 65);
    windows.push_back({s - 2, s + 2});
  } else {
    const int s1 = r.uniform_int(25, 40), s2 = r.uniform_int(60, 75);
    windows.push_back({s1 - 2, s1 + 2});
    windows.push_back({s2 - 2, s2 + 2});
  }

  out.a = std::move(wa);
  out.b = std::move(wb);
  out.windows = std::move(windows);
  out.target_id = kTarget;
  return true;
}

bool same_state(const ObjectState& x, const ObjectState& y) {
  return x.object_id == y.object_id && x.position == y.position && x.yaw == y.yaw;
}

bool same_spec(const ObjectSpec& x, const ObjectSpec& y) {
  return x.object_id == y.object_id && x.shape == y.shape && x.size == y.size && x.texture_id == y.texture_id &&
         x.yaw == y.yaw;
}

/// Everything except the target is identical in A and B at frame t.
bool same_backdrop(const WorldLine& a, const WorldLine& b, int target_id, int t) {
  std::vector<std::size_t> ia, ib;
  for (std::size_t i = 0; i < a.objects.size(); ++i)
    if (a.objects[i].object_id != target_id) ia.push_back(i);
  for (std::size_t i = 0; i < b.objects.size(); ++i)
    if (b.objects[i].object_id != target_id) ib.push_back(i);
  if (ia.size() != ib.size()) return false;
  for (std::size_t k = 0; k < ia.size(); ++k)
    if (!same_spec(a.objects[ia[k]], b.objects[ib[k]]) || !same_state(a.frames[t][ia[k]], b.frames[t][ib[k]]))
      return false;
  if (a.occluders.size() != b.occluders.size()) return false;
  for (std::size_t k = 0; k < a.occluders.size(); ++k) {
    const auto& p = a.occluders[k];
    const auto& q = b.occluders[k];
    if (p.base_position != q.base_position || p.width != q.width || p.height != q.height ||
        p.elevation_at(t) != q.elevation_at(t))
      return false;
  }
  return true;
}

}  // namespace

const std::array<Block, 3>& all_blocks() {
  static const std::array<Block, 3> blocks{{
      {BlockId::O1, "object permanence: objects do not pop in or out of existence"},
      {BlockId::O2, "shape constancy: objects keep their shape"},
      {BlockId::O3, "spatio-temporal continuity: trajectories are continuous"},
  }};
  return blocks;
}

std::string_view to_string(BlockId b) {
  switch (b) {
    case BlockId::O1: return "O1";
    case BlockId::O2: return "O2";
    case BlockId::O3: return "O3";
  }
  return "?";
}

BlockId parse_block(std::string_view s) {
  if (s == "O1") return BlockId::O1;
  if (s == "O2") return BlockId::O2;
  if (s == "O3") return BlockId::O3;
  throw Error(ErrorCode::ParseError, "unknown block '" + std::string(s) + "'");
}

std::string_view to_string(Visibility v) { return v == Visibility::visible ? "visible" : "occluded"; }

Visibility parse_visibility(std::string_view s) {
  if (s == "visible") return Visibility::visible;
  if (s == "occluded") return Visibility::occluded;
  throw Error(ErrorCode::ParseError, "unknown visibility '" + std::string(s) + "'");
}

std::string_view to_string(Label l) { return l == Label::possible ? "possible" : "impossible"; }

Label parse_label(std::string_view s) {
  if (s == "possible") return Label::possible;
  if (s == "impossible") return Label::impossible;
  throw Error(ErrorCode::ParseError, "unknown label '" + std::string(s) + "'");
}

std::string ScenarioSpec::name() const {
  return std::string(to_string(visibility)) + "_" + std::string(to_string(motion)) + "_" + std::to_string(n_objects);
}

std::vector<ScenarioSpec> enumerate_scenarios(BlockId block) {
  std::vector<ScenarioSpec> out;
  for (auto vis : {Visibility::visible, Visibility::occluded})
    for (auto m : {Motion::stationary, Motion::dynamic_1, Motion::dynamic_2})
      for (int n = 1; n <= 3; ++n) out.push_back({block, vis, m, n});
  return out;
}

std::vector<SpliceWindow> find_splice_windows(const WorldLine& a, const WorldLine& b, int target_id, int count,
                                              int w_min) {
  if (a.n_frames != b.n_frames) throw Error(ErrorCode::WindowViolation, "world lines differ in length");
  auto hidden = [&](const WorldLine& w, int t) {
    return w.object_index(target_id) < 0 || occlusion_state(w, t, target_id) == OcclusionState::fully_occluded;
  };
  std::vector<SpliceWindow> runs;
  int start = -1;
  for (int t = 0; t <= a.n_frames; ++t) {
    const bool h = t < a.n_frames && hidden(a, t) && hidden(b, t) && same_backdrop(a, b, target_id, t);
    if (h && start < 0) start = t;
    if (!h && start >= 0) {
      if (t - start >= w_min) runs.push_back({start, t - 1});
      start = -1;
    }
  }
  std::stable_sort(runs.begin(), runs.end(), [](const auto& x, const auto& y) {
    return x.end_frame - x.start_frame > y.end_frame - y.start_frame;
  });
  if (static_cast<int>(runs.size()) > count) runs.resize(count);
  std::sort(runs.begin(), runs.end(), [](const auto& x, const auto& y) { return x.start_frame < y.start_frame; });
  return runs;
}

WorldPair build_world_pair(const ScenarioSpec& scenario, std::uint64_t seed, const ForgeConfig& cfg) {
  if (scenario.n_objects < 1 || scenario.n_objects > 3)
    throw Error(ErrorCode::ConfigError, "n_objects must be 1, 2 or 3");
  for (int attempt = 0; attempt < cfg.max_attempts; ++attempt) {
    CounterRng r(derive_key(seed, {static_cast<std::uint64_t>(attempt)}));
    WorldPair pair;
    if (try_pair(scenario, r, cfg, pair)) return pair;
  }
  throw Error(ErrorCode::NoValidSplice, "no valid splice for " + std::string(to_string(scenario.block)) + " " +
                                            scenario.name() + " after " + std::to_string(cfg.max_attempts) +
                                            " attempts");
}

void check_windows(const WorldPair& pair, const std::vector<SpliceWindow>& windows, const ScenarioSpec& scenario) {
  const auto fail = [](const std::string& msg) { throw Error(ErrorCode::WindowViolation, msg); };
  const int expected = scenario.motion == Motion::dynamic_2 ? 2 : 1;
  if (static_cast<int>(windows.size()) != expected)
    fail("expected " + std::to_string(expected) + " splice window(s), got " + std::to_string(windows.size()));
  if (pair.a.n_frames != pair.b.n_frames) fail("parent world lines differ in length");
  for (std::size_t k = 0; k < windows.size(); ++k) {
    const auto& w = windows[k];
    if (!(w.start_frame >= 0 && w.start_frame < w.end_frame && w.end_frame < pair.a.n_frames))
      fail("window [" + std::to_string(w.start_frame) + ", " + std::to_string(w.end_frame) + "] out of range");
    if (k > 0 && windows[k - 1].end_frame >= w.start_frame) fail("windows overlap or are out of order");
    if (scenario.visibility != Visibility::occluded) continue;
    for (int t = w.start_frame; t <= w.end_frame; ++t) {
      if (!target_hidden(pair.a, t) || !target_hidden(pair.b, t))
        fail("target not fully occluded at frame " + std::to_string(t));
      if (!same_backdrop(pair.a, pair.b, pair.target_id, t))
        fail("parents differ beyond the target at frame " + std::to_string(t));
    }
  }
}

std::vector<FrameRef> splice_frames(std::string_view pattern, const std::vector<SpliceWindow>& windows, int n_frames) {
  if (pattern.size() != windows.size() + 1) throw Error(ErrorCode::WindowViolation, "pattern does not fit windows");
  std::vector<FrameRef> frames;
  frames.reserve(n_frames);
  std::size_t seg = 0;
  for (int t = 0; t < n_frames; ++t) {
    while (seg < windows.size() && t >= windows[seg].switch_frame()) ++seg;
    frames.push_back({pattern[seg] == 'A' ? Source::A : Source::B, t});
  }
  return frames;
}

Quadruplet compose_quadruplet(std::shared_ptr<const WorldPair> parents, const std::vector<SpliceWindow>& windows,
                              const ScenarioSpec& scenario, const std::string& set_id, std::uint64_t order_seed) {
  if (!parents) throw Error(ErrorCode::WindowViolation, "missing parent world lines");
  check_windows(*parents, windows, scenario);
  const bool two = windows.size() == 2;
  const std::array<std::pair<const char*, Label>, 4> recipes{{
      {two ? "AAA" : "AA", Label::possible},
      {two ? "BBB" : "BB", Label::possible},
      {two ? "ABA" : "AB", Label::impossible},
      {two ? "BAB" : "BA", Label::impossible},
  }};
  std::array<int, 4> order{0, 1, 2, 3};
  CounterRng r(order_seed);
  for (int i = 3; i > 0; --i) std::swap(order[i], order[r.uniform_int(0, i)]);

  Quadruplet q;
  q.set_id = set_id;
  q.seed = order_seed;
  q.parents = parents;
  for (int k = 0; k < 4; ++k) {
    const auto& [pattern, label] = recipes[order[k]];
    Movie& m = q.movies[k];
    m.movie_id = set_id + "_" + std::to_string(k + 1);
    m.pattern = pattern;
    m.label = label;
    m.scenario = scenario;
    m.frames = splice_frames(pattern, windows, parents->a.n_frames);
  }
  return q;
}

WorldLine random_training_world(std::uint64_t seed, const ForgeConfig& cfg) {
  for (int attempt = 0; attempt < cfg.max_attempts; ++attempt) {
    CounterRng r(derive_key(seed, {static_cast<std::uint64_t>(attempt)}));
    SceneRecipe rec;
    rec.n_frames = cfg.n_frames;
    rec.d_max = cfg.d_max;
    rec.camera = draw_camera(r);
    rec.rng_seed = r.next();
    const int n = r.uniform_int(1, 3);
    const auto textures = draw_textures(r, n);
    for (int k = 0; k < n; ++k) {
      ObjectSpec o = draw_object(r, k, textures[k]);
      o.size = r.uniform(0.4, 0.8);
      const double y = r.uniform(4.5, 7.5);
      TrajectorySpec t = rolling(r.uniform(-1.5, 1.5), y, o.size, 0.0);
      const int kind = r.uniform_int(0, 2);
      if (kind >= 1) {
        t.kind = Motion::dynamic_1;
        const double vx = r.uniform(0.01, 0.05) * (r.coin() ? 1 : -1);
        t.initial_position.x() = r.uniform(-1.0, 1.0) - vx * 49.5;
        t.initial_velocity = Vec3(vx, r.uniform(-0.01, 0.01), 0);
      }
      if (kind == 2) {
        t.gravity = 0.01;
        t.initial_velocity.z() = r.uniform(0.04, 0.1);
      }
      rec.objects.emplace_back(o, t);
    }
    if (r.coin()) {
      OccluderSpec s;
      s.occluder_id = 0;
      s.base_position = Vec3(r.uniform(-1.0, 1.0), r.uniform(3.0, 3.8), 0.0);
      s.width = r.uniform(0.8, 1.6);
      s.height = r.uniform(0.8, 1.2);
      const int rs = r.uniform_int(0, 30), rd = r.uniform_int(5, 15), ld = r.uniform_int(5, 15);
      const int ls = std::min(rs + rd + r.uniform_int(10, 40), cfg.n_frames - 1 - ld);
      if (ls <= rs + rd) continue;
      s.schedule = ramp(rs, rd, ls, ld);
      rec.occluders.push_back(s);
    }
    try {
      WorldLine w = simulate(rec);
      if (in_view(w, cfg)) return w;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::SpawnCollision && e.code() != ErrorCode::OutOfBounds) throw;
    }
  }
  throw Error(ErrorCode::ConfigError, "could not draw a training scene");
}

}  // namespace voebench
