#pragma once

#include <cstdint>
#include <utility>
#include <vector>

namespace forkhull {

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point2& a, const Point2& b) {
    return a.x == b.x && a.y == b.y;
  }
  friend bool operator<(const Point2& a, const Point2& b) {
    return a.x < b.x || (a.x == b.x && a.y < b.y);
  }
};

enum class Orientation { LeftTurn, RightTurn, Collinear };

// Sequence of points forming an upper hull chain: strictly increasing x,
// every consecutive triple a right turn (canonical form, no collinear
// interior points).
using HullChain = std::vector<Point2>;

// Sign of (q-p) x (r-p). Exact for integer coordinates up to |2^25|.
Orientation orientation(const Point2& p, const Point2& q, const Point2& r);

// Same sign computed with 128-bit integers after rounding coordinates;
// inputs must be integer-valued. Used as the independent oracle.
Orientation orientation_bigint(const Point2& p, const Point2& q,
                               const Point2& r);

// Andrew's monotone chain on x-sorted input. Rejects unsorted input.
HullChain upper_hull_serial(const std::vector<Point2>& points);

// O(n^3) oracle: keeps p iff p is on or above the leftmost-rightmost chord
// and no segment between two other points passes strictly above it.
HullChain brute_force_upper_hull(std::vector<Point2> points);

// All |A|*|B| pairs; returns (index into A, index into B) of the line with
// every point of both chains on or below it. Ties (collinear seams) resolve
// to the leftmost point of A and the rightmost point of B.
std::pair<std::size_t, std::size_t> upper_common_tangent_bruteforce(
    const HullChain& A, const HullChain& B);

// Counter-clockwise closed polygon: upper hull of the 180-degree rotation
// joined with the upper hull, seams deduplicated.
std::vector<Point2> full_hull(std::vector<Point2> points);

// Extreme-point-test oracle for the full hull, O(n^3).
std::vector<Point2> brute_force_full_hull(std::vector<Point2> points);

// Sorts by (x, y) and removes exact duplicates.
std::vector<Point2> dedup_sorted(std::vector<Point2> points);

}  // namespace forkhull
