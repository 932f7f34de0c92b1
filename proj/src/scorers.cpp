#include "voebench/scorers.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <deque>
#include <limits>
#include <optional>
#include <unordered_set>

#include "voebench/error.hpp"

namespace voebench {

std::string_view to_string(Span s) { return s == Span::short_span ? "short" : "long"; }

Span parse_span(std::string_view s) {
  if (s == "short") return Span::short_span;
  if (s == "long") return Span::long_span;
  throw Error(ErrorCode::ConfigError, "unknown span '" + std::string(s) + "' (short|long)");
}

std::vector<int> PredictionSchedule::targets(int n_frames) const {
  std::vector<int> out;
  for (int t = back; t + gap < n_frames; ++t) out.push_back(t + gap);
  return out;
}

double aggregate_video_score(const std::vector<FramePlausibility>& frames) {
  if (frames.empty()) throw Error(ErrorCode::EmptyInput, "no frame scores to aggregate");
  double m = std::numeric_limits<double>::infinity();
  for (const auto& f : frames) m = std::min(m, f.score);
  return m;
}

std::string_view to_string(ScorerKind k) {
  switch (k) {
    case ScorerKind::frame_diff: return "frame_diff";
    case ScorerKind::tracking: return "tracking";
    case ScorerKind::mask_extrapolation: return "mask_extrapolation";
  }
  return "?";
}

ScorerKind parse_scorer(std::string_view s) {
  if (s == "frame_diff") return ScorerKind::frame_diff;
  if (s == "tracking") return ScorerKind::tracking;
  if (s == "mask_extrapolation") return ScorerKind::mask_extrapolation;
  throw Error(ErrorCode::ConfigError,
              "unknown scorer '" + std::string(s) + "' (frame_diff|tracking|mask_extrapolation)");
}

std::string_view to_string(TrackEventKind k) {
  switch (k) {
    case TrackEventKind::appearance: return "appearance";
    case TrackEventKind::disappearance: return "disappearance";
    case TrackEventKind::teleport: return "teleport";
    case TrackEventKind::shape_change: return "shape_change";
  }
  return "?";
}

std::vector<FramePlausibility> run_scorer(ScorerKind k, const MovieFrames& m, const PredictionSchedule& s,
                                          const ScorerConfig& cfg) {
  switch (k) {
    case ScorerKind::frame_diff: return frame_diff_scorer(m, s, cfg);
    case ScorerKind::tracking: return tracking_scorer(m, s, cfg);
    case ScorerKind::mask_extrapolation: return mask_extrapolation_scorer(m, s, cfg);
  }
  return {};
}

namespace {

void check_movie(const MovieFrames& m, const PredictionSchedule& s) {
  if (m.rgb.empty()) throw Error(ErrorCode::EmptyInput, "movie " + m.movie_id + " has no frames");
  if (m.depth.size() != m.rgb.size() || m.mask.size() != m.rgb.size())
    throw Error(ErrorCode::ParseError, "movie " + m.movie_id + ": rgb/depth/mask frame counts differ");
  if (s.back < 1 || s.gap < 1) throw Error(ErrorCode::ConfigError, "schedule back and gap must be positive");
  if (s.targets(m.n_frames()).empty())
    throw Error(ErrorCode::EmptyInput, "movie " + m.movie_id + " is too short for the schedule");
}

bool is_occluder_rgb(const Plane<std::uint8_t>& rgb, int i) {
  const int w = static_cast<int>(rgb.cols()) / 3;
  const int y = i / w, x = i % w;
  return rgb(y, 3 * x) == kOccluderRgb[0] && rgb(y, 3 * x + 1) == kOccluderRgb[1] &&
         rgb(y, 3 * x + 2) == kOccluderRgb[2];
}

Vec3 back_project(const Intrinsics& k, double u, double v, double z) {
  return {(u + 0.5 - k.cx) / k.fx * z, (k.cy - (v + 0.5)) / k.fy * z, z};
}

}  // namespace

std::vector<Blob> find_blobs(const MovieFrames& m, int t) {
  const auto& mask = m.mask.at(t);
  const auto& depth = m.depth.at(t);
  const auto& rgb = m.rgb.at(t);
  const int h = static_cast<int>(mask.rows()), w = static_cast<int>(mask.cols());
  const std::uint8_t* lab = mask.data();
  const std::uint16_t* dep = depth.data();

  std::array<int, 256> slot;
  slot.fill(-1);
  std::vector<Blob> blobs;
  for (int i = 0; i < w * h; ++i) {
    const int l = lab[i];
    if (l == 0) continue;
    if (slot[l] < 0) {
      slot[l] = static_cast<int>(blobs.size());
      blobs.emplace_back();
      blobs.back().label = l;
    }
    blobs[slot[l]].index.push_back(i);
  }

  for (auto& b : blobs) {
    b.pixels = static_cast<int>(b.index.size());
    b.x0 = w; b.y0 = h; b.x1 = -1; b.y1 = -1;
    double su = 0, sv = 0;
    Vec3 sc = Vec3::Zero();
    int gray = 0;
    std::unordered_set<std::uint32_t> colors;
    for (int i : b.index) {
      const int y = i / w, x = i % w;
      su += x; sv += y;
      b.x0 = std::min(b.x0, x); b.x1 = std::max(b.x1, x);
      b.y0 = std::min(b.y0, y); b.y1 = std::max(b.y1, y);
      sc += back_project(m.intrinsics, x, y, dep[i] / 1000.0);
      if (is_occluder_rgb(rgb, i)) ++gray;
      if (colors.size() < 16)
        colors.insert((std::uint32_t{rgb(y, 3 * x)} << 16) | (std::uint32_t{rgb(y, 3 * x + 1)} << 8) |
                      rgb(y, 3 * x + 2));

      // A neighbor from another region that is nearer to the camera hides part of us.
      const int nx[4] = {x - 1, x + 1, x, x};
      const int ny[4] = {y, y, y - 1, y + 1};
      for (int d = 0; d < 4; ++d) {
        bool cut = false;
        if (nx[d] < 0 || nx[d] >= w || ny[d] < 0 || ny[d] >= h) {
          cut = true;
        } else {
          const int j = ny[d] * w + nx[d];
          cut = lab[j] != 0 && lab[j] != b.label && dep[j] < dep[i];
        }
        if (!cut) continue;
        (d == 0 ? b.cut_left : d == 1 ? b.cut_right : d == 2 ? b.cut_top : b.cut_bottom) = true;
      }
    }
    b.cu = su / b.pixels;
    b.cv = sv / b.pixels;
    b.centroid = sc / b.pixels;
    b.occluder = gray * 10 >= b.pixels * 9;
    b.n_colors = static_cast<int>(colors.size());
    b.clean = !(b.cut_left || b.cut_right || b.cut_top || b.cut_bottom);

    const int rows = b.y1 - b.y0 + 1, cols = b.x1 - b.x0 + 1;
    b.left.assign(rows, w);
    b.right.assign(rows, -1);
    b.top.assign(cols, h);
    b.bottom.assign(cols, -1);
    for (int i : b.index) {
      const int y = i / w, x = i % w;
      b.left[y - b.y0] = std::min(b.left[y - b.y0], x);
      b.right[y - b.y0] = std::max(b.right[y - b.y0], x);
      b.top[x - b.x0] = std::min(b.top[x - b.x0], y);
      b.bottom[x - b.x0] = std::max(b.bottom[x - b.x0], y);
    }
    // An outline end is trusted only when the pixel beyond it is not a nearer surface.
    auto free_end = [&](int x, int y, int nx, int ny) {
      if (nx < 0 || ny < 0 || nx >= w || ny >= h) return false;
      const int j = ny * w + nx;
      return lab[j] == 0 || lab[j] == b.label || dep[j] >= dep[y * w + x];
    };
    for (int r = 0; r < rows; ++r) {
      const int y = b.y0 + r;
      if (b.right[r] < 0) {
        b.left[r] = b.right[r] = Blob::kNoEdge;
        continue;
      }
      if (!free_end(b.left[r], y, b.left[r] - 1, y)) b.left[r] = Blob::kNoEdge;
      if (!free_end(b.right[r], y, b.right[r] + 1, y)) b.right[r] = Blob::kNoEdge;
    }
    for (int c = 0; c < cols; ++c) {
      const int x = b.x0 + c;
      if (b.bottom[c] < 0) {
        b.top[c] = b.bottom[c] = Blob::kNoEdge;
        continue;
      }
      if (!free_end(x, b.top[c], x, b.top[c] - 1)) b.top[c] = Blob::kNoEdge;
      if (!free_end(x, b.bottom[c], x, b.bottom[c] + 1)) b.bottom[c] = Blob::kNoEdge;
    }

    if (rows >= 3) {
      std::vector<int> width(rows, 0);
      for (int i : b.index) ++width[i / w - b.y0];
      const int third = rows / 3;
      double top = 0, bottom = 0;
      for (int r = 0; r < third; ++r) {
        top += width[r];
        bottom += width[rows - 1 - r];
      }
      b.taper = bottom > 0 ? top / bottom : 1.0;
    }
  }
  return blobs;
}

ShapeClass classify_shape(const Blob& b, int min_pixels) {
  if (b.occluder || !b.clean || b.pixels < min_pixels) return ShapeClass::unknown;
  // Flat-shaded faces give a cube at most three colors; curved surfaces give many.
  if (b.n_colors <= 3) return ShapeClass::cube;
  return b.taper < 0.6 ? ShapeClass::cone : ShapeClass::sphere;
}

// ---------------------------------------------------------------- frame_diff

std::vector<FramePlausibility> frame_diff_scorer(const MovieFrames& m, const PredictionSchedule& s,
                                                 const ScorerConfig& cfg) {
  check_movie(m, s);
  std::vector<FramePlausibility> out;
  for (int target : s.targets(m.n_frames())) {
    const int i2 = target - s.gap;
    const double mad =
        (m.rgb[target].cast<double>() - m.rgb[i2].cast<double>()).abs().mean();
    out.push_back({target, std::exp(-cfg.lambda * mad / 255.0)});
  }
  return out;
}

// ---------------------------------------------------------------- tracking

namespace {

struct Track {
  int id = 0;
  Vec3 anchor = Vec3::Zero();
  int anchor_t = 0;
  Vec3 vel = Vec3::Zero();
  std::deque<std::pair<int, Vec3>> clean_obs;
  double extent = 0.5;
  bool extent_known = false;
  int unexplained = 0;
  ShapeClass shape = ShapeClass::unknown;
  ShapeClass pending = ShapeClass::unknown;
  int pending_count = 0;

  Vec3 predict(int t) const { return anchor + vel * (t - anchor_t); }

  void fit_velocity() {
    const std::size_t n = clean_obs.size();
    if (n < 2) {
      vel.setZero();
      return;
    }
    double mt = 0;
    Vec3 mp = Vec3::Zero();
    for (const auto& [t, p] : clean_obs) {
      mt += t;
      mp += p;
    }
    mt /= n;
    mp /= static_cast<double>(n);
    double stt = 0;
    Vec3 stp = Vec3::Zero();
    for (const auto& [t, p] : clean_obs) {
      stt += (t - mt) * (t - mt);
      stp += (t - mt) * (p - mp);
    }
    vel = stp / stt;
    anchor = mp + vel * (clean_obs.back().first - mt);
    anchor_t = clean_obs.back().first;
  }
};

constexpr std::size_t kVelocityWindow = 8;
constexpr double kCoverMargin = 0.2;  // m

class Tracker {
 public:
  Tracker(const MovieFrames& m, const ScorerConfig& cfg) : m_(m), cfg_(cfg) {}

  std::vector<TrackEvent> run() {
    for (int t = 0; t < m_.n_frames(); ++t) step(t);
    return events_;
  }

 private:
  void emit(int t, TrackEventKind k, int track) { events_.push_back({t, k, track}); }

  std::optional<std::pair<int, int>> project(const Vec3& p) const {
    if (p.z() <= 1e-6) return std::nullopt;
    const auto& k = m_.intrinsics;
    const int u = static_cast<int>(std::floor(k.fx * p.x() / p.z() + k.cx));
    const int v = static_cast<int>(std::floor(k.cy - k.fy * p.y() / p.z()));
    if (u < 0 || v < 0 || u >= k.width || v >= k.height) return std::nullopt;
    return std::make_pair(u, v);
  }

  void step(int t) {
    std::vector<Blob> blobs = find_blobs(m_, t);
    std::erase_if(blobs, [](const Blob& b) { return b.occluder; });

    // Greedy nearest-first association; several fragments may join one track.
    struct Pair {
      double d;
      std::size_t blob, track;
    };
    std::vector<Pair> pairs;
    for (std::size_t b = 0; b < blobs.size(); ++b)
      for (std::size_t k = 0; k < tracks_.size(); ++k) {
        const double d = (blobs[b].centroid - tracks_[k].predict(t)).norm();
        if (d <= 3 * cfg_.d_max + tracks_[k].extent / 2) pairs.push_back({d, b, k});
      }
    std::sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) { return a.d < b.d; });
    std::vector<int> owner(blobs.size(), -1);
    for (const auto& p : pairs)
      if (owner[p.blob] < 0) owner[p.blob] = static_cast<int>(p.track);

    std::vector<std::vector<std::size_t>> parts(tracks_.size());
    for (std::size_t b = 0; b < blobs.size(); ++b)
      if (owner[b] >= 0) parts[owner[b]].push_back(b);

    std::vector<bool> keep(tracks_.size(), true);
    for (std::size_t k = 0; k < tracks_.size(); ++k) {
      Track& tr = tracks_[k];
      if (parts[k].empty()) {
        keep[k] = unseen(tr, t);
        continue;
      }
      tr.unexplained = 0;
      if (parts[k].size() == 1 && blobs[parts[k][0]].clean)
        observe_clean(tr, blobs[parts[k][0]], t);
      else
        tr.pending_count = 0;
    }

    std::vector<Track> next;
    for (std::size_t k = 0; k < tracks_.size(); ++k)
      if (keep[k]) next.push_back(std::move(tracks_[k]));
    tracks_ = std::move(next);

    for (std::size_t b = 0; b < blobs.size(); ++b) {
      if (owner[b] >= 0) continue;
      const Blob& blob = blobs[b];
      Track tr;
      tr.id = next_id_++;
      tr.anchor = blob.centroid;
      tr.anchor_t = t;
      const bool at_border = blob.x0 == 0 || blob.y0 == 0 || blob.x1 == m_.intrinsics.width - 1 ||
                             blob.y1 == m_.intrinsics.height - 1;
      if (t > 0 && !at_border) emit(t, TrackEventKind::appearance, tr.id);
      if (blob.clean) observe_clean(tr, blob, t);
      tracks_.push_back(std::move(tr));
    }
  }

  // Returns false when the hypothesis should be dropped.
  bool unseen(Track& tr, int t) {
    const Vec3 p = tr.predict(t);
    const auto px = project(p);
    if (!px) return false;  // left the field of view
    const double z = m_.depth[t](px->second, px->first) / 1000.0;
    if (z < p.z() - kCoverMargin) {
      tr.unexplained = 0;
      return true;
    }
    if (++tr.unexplained > cfg_.hidden_grace) {
      emit(t, TrackEventKind::disappearance, tr.id);
      return false;
    }
    return true;
  }

  void observe_clean(Track& tr, const Blob& b, int t) {
    if (!tr.clean_obs.empty() && (b.centroid - tr.predict(t)).norm() > 3 * cfg_.d_max) {
      emit(t, TrackEventKind::teleport, tr.id);
      tr.clean_obs.clear();
    }
    tr.clean_obs.emplace_back(t, b.centroid);
    if (tr.clean_obs.size() > kVelocityWindow) tr.clean_obs.pop_front();
    tr.fit_velocity();
    if (tr.clean_obs.size() == 1) {
      tr.anchor = b.centroid;
      tr.anchor_t = t;
    }

    const double size = std::max(b.x1 - b.x0 + 1, b.y1 - b.y0 + 1) * b.centroid.z() / m_.intrinsics.fx;
    tr.extent = tr.extent_known ? std::max(tr.extent, size) : size;
    tr.extent_known = true;

    const ShapeClass c = classify_shape(b, cfg_.min_shape_pixels);
    if (c == ShapeClass::unknown) return;
    if (c == tr.shape) {
      tr.pending_count = 0;
      return;
    }
    if (c == tr.pending) {
      ++tr.pending_count;
    } else {
      tr.pending = c;
      tr.pending_count = 1;
    }
    if (tr.pending_count >= 2) {
      if (tr.shape != ShapeClass::unknown) emit(t, TrackEventKind::shape_change, tr.id);
      tr.shape = c;
      tr.pending_count = 0;
    }
  }

  const MovieFrames& m_;
  const ScorerConfig& cfg_;
  std::vector<Track> tracks_;
  std::vector<TrackEvent> events_;
  int next_id_ = 0;
};

}  // namespace

std::vector<TrackEvent> track_events(const MovieFrames& m, const ScorerConfig& cfg) {
  if (m.rgb.empty()) throw Error(ErrorCode::EmptyInput, "movie " + m.movie_id + " has no frames");
  return Tracker(m, cfg).run();
}

std::vector<FramePlausibility> tracking_scorer(const MovieFrames& m, const PredictionSchedule& s,
                                               const ScorerConfig& cfg) {
  check_movie(m, s);
  std::vector<double> penalty(m.n_frames(), 0.0);
  for (const auto& e : track_events(m, cfg)) penalty[e.frame] += cfg.penalty;
  std::vector<FramePlausibility> out;
  for (int target : s.targets(m.n_frames())) {
    double sum = 0;
    for (int f = target - s.gap + 1; f <= target; ++f) sum += penalty[f];
    out.push_back({target, std::exp(-sum)});
  }
  return out;
}

// ---------------------------------------------------------------- mask_extrapolation

namespace {

struct Motion2 {
  double du = 0, dv = 0;  // pixels per frame
  bool known = false;
};

// Prediction values: soft pixels come from objects whose motion could not be measured and
// only count when confirmed.
constexpr std::uint8_t kSoft = 1, kFirm = 2;

// Mean displacement of trusted outline ends over rows (or columns) seen in both frames.
std::optional<double> profile_motion(const std::vector<int>& lo1, const std::vector<int>& hi1, int o1,
                                     const std::vector<int>& lo2, const std::vector<int>& hi2, int o2) {
  double sum = 0;
  int k = 0;
  for (std::size_t r = 0; r < lo2.size(); ++r) {
    const long r1 = static_cast<long>(r) + o2 - o1;
    if (r1 < 0 || r1 >= static_cast<long>(lo1.size())) continue;
    if (lo1[r1] != Blob::kNoEdge && lo2[r] != Blob::kNoEdge) sum += lo2[r] - lo1[r1], ++k;
    if (hi1[r1] != Blob::kNoEdge && hi2[r] != Blob::kNoEdge) sum += hi2[r] - hi1[r1], ++k;
  }
  if (k == 0) return std::nullopt;
  return sum / k;
}

// Chebyshev dilation by r via two separable running-sum passes.
std::vector<std::uint8_t> dilate(const std::vector<std::uint8_t>& in, int w, int h, int r) {
  std::vector<int> rows(in.size());
  std::vector<int> acc(std::max(w, h) + 1);
  for (int y = 0; y < h; ++y) {
    acc[0] = 0;
    for (int x = 0; x < w; ++x) acc[x + 1] = acc[x] + (in[y * w + x] ? 1 : 0);
    for (int x = 0; x < w; ++x) rows[y * w + x] = acc[std::min(w, x + r + 1)] - acc[std::max(0, x - r)];
  }
  std::vector<std::uint8_t> out(in.size());
  for (int x = 0; x < w; ++x) {
    acc[0] = 0;
    for (int y = 0; y < h; ++y) acc[y + 1] = acc[y] + (rows[y * w + x] > 0 ? 1 : 0);
    for (int y = 0; y < h; ++y) out[y * w + x] = acc[std::min(h, y + r + 1)] - acc[std::max(0, y - r)] > 0;
  }
  return out;
}

}  // namespace

std::vector<FramePlausibility> mask_extrapolation_scorer(const MovieFrames& m, const PredictionSchedule& s,
                                                         const ScorerConfig& cfg) {
  check_movie(m, s);
  const int w = m.intrinsics.width, h = m.intrinsics.height;
  const int n = w * h;

  std::vector<std::vector<Blob>> blobs(m.n_frames());
  auto blobs_at = [&](int t) -> const std::vector<Blob>& {
    if (blobs[t].empty() && m.mask[t].maxCoeff() > 0) blobs[t] = find_blobs(m, t);
    return blobs[t];
  };

  // Deficits are measured against at least this many pixels so one-pixel slivers stay small.
  const double min_support = n / 200.0;
  std::vector<FramePlausibility> out;
  std::vector<std::uint8_t> pred(n), obs(n), forgive(n), screened(n);

  for (int target : s.targets(m.n_frames())) {
    const int i2 = target - s.gap, i1 = i2 - s.back;
    const auto& b1 = blobs_at(i1);
    const auto& b2 = blobs_at(i2);
    std::fill(pred.begin(), pred.end(), 0);
    std::fill(obs.begin(), obs.end(), 0);
    std::fill(forgive.begin(), forgive.end(), 0);
    std::fill(screened.begin(), screened.end(), 0);

    // Estimate each object's image motion from its nearest counterpart in f_i1.
    std::vector<Motion2> motion;
    for (const auto& b : b2) {
      Motion2 mv;
      if (!b.occluder) {
        const Blob* best = nullptr;
        double best_d = std::max(8.0, 1.5 * std::max(b.x1 - b.x0 + 1, b.y1 - b.y0 + 1));
        for (const auto& a : b1) {
          if (a.occluder) continue;
          const double d = std::hypot(a.cu - b.cu, a.cv - b.cv);
          if (d < best_d) {
            best_d = d;
            best = &a;
          }
        }
        if (best) {
          if (best->clean && b.clean) {
            mv = {(b.cu - best->cu) / s.back, (b.cv - best->cv) / s.back, true};
          } else if (const auto du = profile_motion(best->left, best->right, best->y0, b.left, b.right, b.y0)) {
            // Column profiles of a partly hidden object slide along it as it moves sideways,
            // so only the horizontal estimate is usable.
            mv = {*du / s.back, 0.0, true};
          }
        }
      }
      motion.push_back(mv);
    }

    const auto& mask_t = m.mask[target];
    const auto& rgb_t = m.rgb[target];
    const auto& depth_t = m.depth[target];
    const auto& depth_2 = m.depth[i2];

    // A screen pixel at or next to the spot hides anything deeper than it.
    auto hidden_at = [&](int x, int y, std::uint16_t z) {
      for (int yy = std::max(0, y - 1); yy <= std::min(h - 1, y + 1); ++yy)
        for (int xx = std::max(0, x - 1); xx <= std::min(w - 1, x + 1); ++xx) {
          const int j = yy * w + xx;
          if (mask_t.data()[j] != 0 && depth_t.data()[j] < z && is_occluder_rgb(rgb_t, j)) return true;
        }
      return false;
    };

    // Predicted occupancy: translated objects, minus screens in front at the target frame.
    for (std::size_t k = 0; k < b2.size(); ++k) {
      const Blob& b = b2[k];
      if (b.occluder) continue;
      const int ox = static_cast<int>(std::lround(motion[k].du * s.gap));
      const int oy = static_cast<int>(std::lround(motion[k].dv * s.gap));
      const std::uint8_t value = motion[k].known ? kFirm : kSoft;
      for (int i : b.index) {
        const int x = i % w + ox, y = i / w + oy;
        if (x < 0 || y < 0 || x >= w || y >= h) continue;
        if (hidden_at(x, y, depth_2.data()[i])) screened[y * w + x] = 1;
        else pred[y * w + x] = std::max(pred[y * w + x], value);
      }
      // Whatever hid part of this object at f_i2 travels with it.
      if (b.clean) continue;
      const int reach = std::max(b.x1 - b.x0, b.y1 - b.y0) + 1;
      for (int y = std::max(0, b.y0 - reach); y <= std::min(h - 1, b.y1 + reach); ++y)
        for (int x = std::max(0, b.x0 - reach); x <= std::min(w - 1, b.x1 + reach); ++x) {
          const int i = y * w + x;
          if (m.mask[i2].data()[i] == 0 || m.mask[i2].data()[i] == b.label || depth_2.data()[i] >= depth_2.data()[b.index[0]])
            continue;
          const int tx = x + ox, ty = y + oy;
          if (tx >= 0 && ty >= 0 && tx < w && ty < h) forgive[ty * w + tx] = 1;
        }
    }

    // Objects hidden at f_i2 may emerge anywhere within reach of a screen. They are at
    // least as deep as the screen, so its nearest point bounds their image speed.
    for (const auto& b : b2) {
      if (!b.occluder) continue;
      std::vector<std::uint8_t> region(n, 0);
      std::uint16_t z_mm = std::numeric_limits<std::uint16_t>::max();
      for (int i : b.index) {
        region[i] = 1;
        z_mm = std::min(z_mm, depth_2.data()[i]);
      }
      const double z = std::max(z_mm, std::uint16_t{1}) / 1000.0;
      const int r = static_cast<int>(std::ceil(cfg.hidden_speed * s.gap * m.intrinsics.fx / z)) + 1;
      const auto reachable = dilate(region, w, h, r);
      for (int j = 0; j < n; ++j) forgive[j] |= reachable[j];
    }

    for (int j = 0; j < n; ++j) obs[j] = mask_t.data()[j] != 0 && !is_occluder_rgb(rgb_t, j);

    // Tolerant IoU: a pixel matches when the other set has a pixel within one step.
    const auto obs_near = dilate(obs, w, h, 1);
    // Predictions dropped beside a screen edge still account for slivers showing past it.
    const auto pred_near = dilate(pred, w, h, 1);
    const auto screened_near = dilate(screened, w, h, 1);
    double matched = 0, missed = 0;
    for (int j = 0; j < n; ++j) {
      if (pred[j]) {
        if (obs_near[j]) matched += 0.5;
        else if (pred[j] == kFirm) missed += 1;
      }
      if (obs[j]) {
        if (pred_near[j] || screened_near[j]) matched += 0.5;
        else if (!forgive[j]) missed += 1;
      }
    }
    const double deficit = missed / std::max(matched + missed, min_support);
    out.push_back({target, std::exp(-cfg.mu * deficit)});
  }
  return out;
}

}  // namespace voebench
