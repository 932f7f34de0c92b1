#include "voebench/metrics.hpp"

namespace voebench {

RelativeError relative_error_detail(const std::vector<ScoredSet>& sets) {
  if (sets.empty()) throw Error(ErrorCode::EmptyInput, "relative error needs at least one set");
  double errors = 0.0;
  int ties = 0;
  for (const auto& s : sets) {
    if (s.pos_scores.empty() || s.imp_scores.empty())
      throw Error(ErrorCode::EmptyInput, "set " + s.set_id + " lacks possible or impossible scores");
    double pos = 0.0, imp = 0.0;
    for (double v : s.pos_scores) pos += v;
    for (double v : s.imp_scores) imp += v;
    if (!std::isfinite(pos) || !std::isfinite(imp))
      throw Error(ErrorCode::NonFiniteScore, "non-finite score in set " + s.set_id);
    if (pos < imp) {
      errors += 1.0;
    } else if (pos == imp) {
      errors += 0.5;
      ++ties;
    }
  }
  const double n = static_cast<double>(sets.size());
  return {errors / n, ties / n};
}

double aggregate_min(const std::vector<double>& frame_scores) {
  if (frame_scores.empty()) throw Error(ErrorCode::EmptyInput, "no frame scores to aggregate");
  return *std::min_element(frame_scores.begin(), frame_scores.end());
}

}  // namespace voebench
