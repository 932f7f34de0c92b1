#pragma once

// Reference plausibility scorers. They only ever see a MovieFrames view (images and
// intrinsics), never labels or world-line metadata.

#include <cstdint>
#include <string_view>
#include <vector>

#include "voebench/geometry.hpp"
#include "voebench/movie.hpp"

namespace voebench {

enum class Span : std::uint8_t { short_span, long_span };
std::string_view to_string(Span s);
Span parse_span(std::string_view s);

/// Triplets (t - back, t) -> t + gap.
struct PredictionSchedule {
  int back = 2;
  int gap = 5;

  static PredictionSchedule of(Span s) { return s == Span::short_span ? PredictionSchedule{2, 5} : PredictionSchedule{5, 35}; }
  /// Target frames of every triplet that fits in a movie of n frames.
  std::vector<int> targets(int n_frames) const;
};

struct FramePlausibility {
  int target = 0;
  double score = 1.0;
};

struct ScorerConfig {
  double lambda = 10.0;     ///< frame_diff decay
  double mu = 5.0;          ///< mask_extrapolation decay
  double d_max = 0.15;      ///< m/frame; the tracker's continuity scale
  int hidden_grace = 10;    ///< frames an unexplained hidden hypothesis survives
  double penalty = 1.0;     ///< weight of one tracker event
  int min_shape_pixels = 30;
  double hidden_speed = 0.05;  ///< m/frame assumed for objects a screen hides at f_i2
};

/// Minimum frame score (EmptyInput when empty).
double aggregate_video_score(const std::vector<FramePlausibility>& frames);

std::vector<FramePlausibility> frame_diff_scorer(const MovieFrames& m, const PredictionSchedule& s,
                                                 const ScorerConfig& cfg = {});
std::vector<FramePlausibility> tracking_scorer(const MovieFrames& m, const PredictionSchedule& s,
                                               const ScorerConfig& cfg = {});
std::vector<FramePlausibility> mask_extrapolation_scorer(const MovieFrames& m, const PredictionSchedule& s,
                                                         const ScorerConfig& cfg = {});

enum class ScorerKind : std::uint8_t { frame_diff, tracking, mask_extrapolation };
std::string_view to_string(ScorerKind k);
ScorerKind parse_scorer(std::string_view s);

std::vector<FramePlausibility> run_scorer(ScorerKind k, const MovieFrames& m, const PredictionSchedule& s,
                                          const ScorerConfig& cfg = {});
inline double score_movie(ScorerKind k, const MovieFrames& m, const PredictionSchedule& s,
                          const ScorerConfig& cfg = {}) {
  return aggregate_video_score(run_scorer(k, m, s, cfg));
}

// ---- building blocks, exposed for tests ----

/// One connected mask region seen in a frame.
struct Blob {
  int label = 0;
  bool occluder = false;
  int pixels = 0;
  double cu = 0, cv = 0;  ///< pixel centroid
  int x0 = 0, x1 = 0, y0 = 0, y1 = 0;
  Vec3 centroid = Vec3::Zero();  ///< camera-space centroid of the visible surface, meters
  bool clean = true;   ///< nothing closer abuts it and it does not touch the image border
  bool cut_left = false, cut_right = false, cut_top = false, cut_bottom = false;
  int n_colors = 0;            ///< distinct RGB values, capped at 16
  double taper = 1.0;          ///< mean row width of the top third over the bottom third
  std::vector<int> index;      ///< row-major pixel indices
  /// Outline ends per row (from y0) and per column (from x0); kNoEdge when the row or
  /// column is empty or that end touches something nearer or the border.
  std::vector<int> left, right, top, bottom;
  static constexpr int kNoEdge = -1;
};

std::vector<Blob> find_blobs(const MovieFrames& m, int t);

enum class ShapeClass : std::int8_t { unknown = -1, cube = 0, sphere = 1, cone = 2 };
ShapeClass classify_shape(const Blob& b, int min_pixels);

enum class TrackEventKind : std::uint8_t { appearance, disappearance, teleport, shape_change };
std::string_view to_string(TrackEventKind k);

struct TrackEvent {
  int frame = 0;
  TrackEventKind kind = TrackEventKind::appearance;
  int track = 0;
};

/// Runs the tracker over the whole movie and lists its penalty events.
std::vector<TrackEvent> track_events(const MovieFrames& m, const ScorerConfig& cfg = {});

}  // namespace voebench
