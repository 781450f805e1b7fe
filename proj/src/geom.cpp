#include "forkhull/geom.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "forkhull/runtime.hpp"

namespace forkhull {

Orientation orientation(const Point2& p, const Point2& q, const Point2& r) {
  double cross = (q.x - p.x) * (r.y - p.y) - (q.y - p.y) * (r.x - p.x);
  if (cross > 0.0) return Orientation::LeftTurn;
  if (cross < 0.0) return Orientation::RightTurn;
  return Orientation::Collinear;
}

Orientation orientation_bigint(const Point2& p, const Point2& q,
                               const Point2& r) {
  auto ll = [](double v) { return static_cast<__int128>(std::llround(v)); };
  __int128 cross = (ll(q.x) - ll(p.x)) * (ll(r.y) - ll(p.y)) -
                   (ll(q.y) - ll(p.y)) * (ll(r.x) - ll(p.x));
  if (cross > 0) return Orientation::LeftTurn;
  if (cross < 0) return Orientation::RightTurn;
  return Orientation::Collinear;
}

HullChain upper_hull_serial(const std::vector<Point2>& points) {
  if (points.empty()) throw std::invalid_argument("empty input");
  for (std::size_t i = 1; i < points.size(); ++i) {
    if (points[i] < points[i - 1])
      throw std::invalid_argument("input not sorted by (x, y)");
  }
  // Among equal-x points only the maximum-y one can be on the upper hull.
  std::vector<Point2> pts;
  pts.reserve(points.size());
  for (const Point2& p : points) {
    if (!pts.empty() && pts.back().x == p.x)
      pts.back() = p;
    else
      pts.push_back(p);
  }
  HullChain hull;
  for (const Point2& p : pts) {
    rt::tick();
    while (hull.size() >= 2 &&
           orientation(hull[hull.size() - 2], hull.back(), p) !=
               Orientation::RightTurn) {
      rt::tick();
      hull.pop_back();
    }
    hull.push_back(p);
  }
  return hull;
}

HullChain brute_force_upper_hull(std::vector<Point2> points) {
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());
  const std::size_t n = points.size();
  HullChain out;
  for (std::size_t i = 0; i < n; ++i) {
    const Point2& p = points[i];
    bool dropped = false;
    for (std::size_t j = 0; j < n && !dropped; ++j) {
      if (j == i) continue;
      if (points[j].x == p.x && points[j].y > p.y) dropped = true;
    }
    for (std::size_t a = 0; a < n && !dropped; ++a) {
      if (a == i) continue;
      for (std::size_t b = a + 1; b < n && !dropped; ++b) {
        if (b == i) continue;
        const Point2& lo = points[a];
        const Point2& hi = points[b];
        if (lo.x >= hi.x) continue;
        if (lo.x > p.x || p.x > hi.x) continue;
        Orientation o = orientation(lo, hi, p);
        if (o == Orientation::RightTurn) dropped = true;
        if (o == Orientation::Collinear && lo.x < p.x && p.x < hi.x)
          dropped = true;
      }
    }
    if (!dropped) out.push_back(p);
  }
  return out;
}

namespace {

bool all_on_or_below(const HullChain& chain, const Point2& a,
                     const Point2& b) {
  for (const Point2& p : chain) {
    if (orientation(a, b, p) == Orientation::LeftTurn) return false;
  }
  return true;
}

// CCW assembly shared convention: lower chain left-to-right, then upper
// chain right-to-left, with coincident seam points removed.
std::vector<Point2> stitch_ccw(const HullChain& lower, const HullChain& upper) {
  std::vector<Point2> out(lower.begin(), lower.end());
  for (auto it = upper.rbegin(); it != upper.rend(); ++it) {
    if (!out.empty() && out.back() == *it) continue;
    if (out.size() > 1 && out.front() == *it) continue;
    out.push_back(*it);
  }
  return out;
}

}  // namespace

std::pair<std::size_t, std::size_t> upper_common_tangent_bruteforce(
    const HullChain& A, const HullChain& B) {
  if (A.empty() || B.empty() || A.back().x >= B.front().x)
    throw std::invalid_argument("chains must be separated, A left of B");
  bool found = false;
  std::size_t bestA = 0, bestB = 0;
  for (std::size_t i = 0; i < A.size(); ++i) {
    for (std::size_t j = 0; j < B.size(); ++j) {
      if (!all_on_or_below(A, A[i], B[j]) || !all_on_or_below(B, A[i], B[j]))
        continue;
      if (!found) {
        bestA = i;
        bestB = j;
        found = true;
      } else {
        bestA = std::min(bestA, i);
        bestB = std::max(bestB, j);
      }
    }
  }
  if (!found) throw std::logic_error("no common tangent found");
  return {bestA, bestB};
}

std::vector<Point2> full_hull(std::vector<Point2> points) {
  points = dedup_sorted(std::move(points));
  if (points.size() <= 2) return points;
  HullChain upper = upper_hull_serial(points);
  std::vector<Point2> rot(points.size());
  for (std::size_t i = 0; i < points.size(); ++i)
    rot[points.size() - 1 - i] = {-points[i].x, -points[i].y};
  std::sort(rot.begin(), rot.end());
  HullChain lower = upper_hull_serial(rot);
  std::reverse(lower.begin(), lower.end());
  for (Point2& p : lower) p = {-p.x, -p.y};
  return stitch_ccw(lower, upper);
}

std::vector<Point2> brute_force_full_hull(std::vector<Point2> points) {
  points = dedup_sorted(std::move(points));
  if (points.size() <= 2) return points;
  HullChain upper = brute_force_upper_hull(points);
  std::vector<Point2> rot(points.size());
  for (std::size_t i = 0; i < points.size(); ++i)
    rot[i] = {-points[i].x, -points[i].y};
  HullChain lower = brute_force_upper_hull(rot);
  std::reverse(lower.begin(), lower.end());
  for (Point2& p : lower) p = {-p.x, -p.y};
  return stitch_ccw(lower, upper);
}

std::vector<Point2> dedup_sorted(std::vector<Point2> points) {
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());
  return points;
}

}  // namespace forkhull
