#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "voebench/error.hpp"

namespace voebench {

struct ScoredSet {
  std::string set_id;
  std::vector<double> pos_scores;
  std::vector<double> imp_scores;
};

struct RelativeError {
  double error = 0.0;         ///< ties count 0.5
  double tie_fraction = 0.0;  ///< the strict-inequality value is error - tie_fraction / 2
};

RelativeError relative_error_detail(const std::vector<ScoredSet>& sets);
inline double relative_error(const std::vector<ScoredSet>& sets) { return relative_error_detail(sets).error; }

namespace detail {

/// Twice the Mann-Whitney U of pos over imp, and twice the number of pairs. Both are
/// integers held exactly in doubles, so AUC and its complement are each one rounding away.
template <typename DerivedP, typename DerivedI>
std::pair<double, double> twice_u(const Eigen::DenseBase<DerivedP>& pos, const Eigen::DenseBase<DerivedI>& imp) {
  using Scalar = typename DerivedP::Scalar;
  const Eigen::Index np = pos.size(), ni = imp.size();
  if (np == 0 || ni == 0) throw Error(ErrorCode::EmptyInput, "AUC needs both possible and impossible scores");
  std::vector<std::pair<Scalar, bool>> all;
  all.reserve(static_cast<std::size_t>(np + ni));
  for (Eigen::Index i = 0; i < np; ++i) all.emplace_back(pos.derived().coeff(i), true);
  for (Eigen::Index i = 0; i < ni; ++i) all.emplace_back(static_cast<Scalar>(imp.derived().coeff(i)), false);
  for (const auto& [s, is_pos] : all)
    if (!std::isfinite(static_cast<double>(s))) throw Error(ErrorCode::NonFiniteScore, "non-finite score in AUC input");
  std::sort(all.begin(), all.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  // Ranks are 1-based; a tie block [i, j) shares the rank (i + j + 1) / 2.
  double twice_rank_sum = 0.0;
  for (std::size_t i = 0; i < all.size();) {
    std::size_t j = i;
    std::size_t n_pos = 0;
    while (j < all.size() && all[j].first == all[i].first) n_pos += all[j++].second ? 1 : 0;
    twice_rank_sum += static_cast<double>(n_pos) * static_cast<double>(i + j + 1);
    i = j;
  }
  const double p = static_cast<double>(np), n = static_cast<double>(ni);
  return {twice_rank_sum - p * (p + 1), 2 * p * n};
}

}  // namespace detail

/// Mann-Whitney AUC: P(pos > imp) + P(pos == imp) / 2, by sorting with midranks.
template <typename DerivedP, typename DerivedI>
double auc(const Eigen::DenseBase<DerivedP>& pos, const Eigen::DenseBase<DerivedI>& imp) {
  const auto [u2, pairs2] = detail::twice_u(pos, imp);
  return u2 / pairs2;
}

/// 1 - AUC, computed from the pair count so that swapping labels gives auc() bit for bit.
template <typename DerivedP, typename DerivedI>
double absolute_error(const Eigen::DenseBase<DerivedP>& pos, const Eigen::DenseBase<DerivedI>& imp) {
  const auto [u2, pairs2] = detail::twice_u(pos, imp);
  return (pairs2 - u2) / pairs2;
}
inline double auc(const std::vector<double>& pos, const std::vector<double>& imp) {
  return auc(Eigen::Map<const Eigen::VectorXd>(pos.data(), static_cast<Eigen::Index>(pos.size())),
             Eigen::Map<const Eigen::VectorXd>(imp.data(), static_cast<Eigen::Index>(imp.size())));
}
inline double absolute_error(const std::vector<double>& pos, const std::vector<double>& imp) {
  return absolute_error(Eigen::Map<const Eigen::VectorXd>(pos.data(), static_cast<Eigen::Index>(pos.size())),
                        Eigen::Map<const Eigen::VectorXd>(imp.data(), static_cast<Eigen::Index>(imp.size())));
}

/// Minimum over frame scores; EmptyInput when there are none.
double aggregate_min(const std::vector<double>& frame_scores);

}  // namespace voebench
