#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace voebench {

template <typename Scalar>
using Vec3T = Eigen::Matrix<Scalar, 3, 1>;
template <typename Scalar>
using Vec2T = Eigen::Matrix<Scalar, 2, 1>;

using Vec3 = Vec3T<double>;
using Vec2 = Vec2T<double>;

template <typename Scalar>
Scalar cross2(const Vec2T<Scalar>& o, const Vec2T<Scalar>& a, const Vec2T<Scalar>& b) {
  return (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x());
}

/// Counter-clockwise convex hull (Andrew's monotone chain). Collinear points dropped.
template <typename Scalar>
std::vector<Vec2T<Scalar>> convex_hull(std::vector<Vec2T<Scalar>> pts) {
  std::sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) {
    return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
  });
  if (pts.size() < 3) return pts;
  std::vector<Vec2T<Scalar>> hull(2 * pts.size());
  std::size_t k = 0;
  for (const auto& p : pts) {
    while (k >= 2 && cross2(hull[k - 2], hull[k - 1], p) <= 0) --k;
    hull[k++] = p;
  }
  for (std::size_t i = pts.size() - 1, lower = k + 1; i-- > 0;) {
    while (k >= lower && cross2(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  return hull;
}

/// True when p lies inside the CCW convex polygon with at least `margin` clearance
/// from every edge.
template <typename Scalar>
bool inside_convex(const std::vector<Vec2T<Scalar>>& poly, const Vec2T<Scalar>& p, Scalar margin = 0) {
  const std::size_t n = poly.size();
  if (n < 3) return false;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& a = poly[i];
    const auto& b = poly[(i + 1) % n];
    const Vec2T<Scalar> e = b - a;
    const Scalar len = e.norm();
    if (len == 0) continue;
    if (cross2(a, b, p) / len < margin) return false;
  }
  return true;
}

/// Separating-axis test for two convex polygons.
template <typename Scalar>
bool convex_overlap(const std::vector<Vec2T<Scalar>>& p, const std::vector<Vec2T<Scalar>>& q) {
  if (p.size() < 3 || q.size() < 3) return false;
  auto separated_by_edges_of = [](const auto& a, const auto& b) {
    for (std::size_t i = 0; i < a.size(); ++i) {
      const Vec2T<Scalar> e = a[(i + 1) % a.size()] - a[i];
      const Vec2T<Scalar> axis(-e.y(), e.x());
      Scalar amin = std::numeric_limits<Scalar>::max(), amax = std::numeric_limits<Scalar>::lowest();
      Scalar bmin = amin, bmax = amax;
      for (const auto& v : a) {
        const Scalar d = axis.dot(v);
        amin = std::min(amin, d);
        amax = std::max(amax, d);
      }
      for (const auto& v : b) {
        const Scalar d = axis.dot(v);
        bmin = std::min(bmin, d);
        bmax = std::max(bmax, d);
      }
      if (amax <= bmin || bmax <= amin) return true;
    }
    return false;
  };
  return !separated_by_edges_of(p, q) && !separated_by_edges_of(q, p);
}

}  // namespace voebench
