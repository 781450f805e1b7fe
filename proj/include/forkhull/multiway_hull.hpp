#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "forkhull/geom.hpp"
#include "forkhull/runtime.hpp"

namespace forkhull::mw {

// Quarter-hull entry: a candidate extreme point plus the coordinates of its
// predecessor along the chain (stored by value, never as an index). The
// active x-range of the entry is (tail.x, head.x]; tail == head marks a
// chain origin with an empty range.
struct TailPoint {
  Point2 head;
  Point2 tail;
  std::int64_t rank = 0;  // scratch for ranking / compaction
  std::int32_t home = -1; // subset id stamped at the last partition (audit)
};

// Chain from the minimum-x point up to the maximum-y point: head.x and
// head.y strictly increasing, consecutive right turns, entries[i+1].tail ==
// entries[i].head. Ties on x keep the largest y, ties on y the smallest x,
// so the chain never contains a vertical or horizontal edge.
using QuarterHull = std::vector<TailPoint>;

struct MultiwayConfig {
  std::size_t serial_cutoff = 24;
  // Repeat the seam check after a deletion instead of testing each seam
  // exactly once.
  bool cascade_seams = false;
  bool audit = false;  // validate chain structure after every merge level
};

struct MultiwayStats {
  std::size_t partitions = 0;      // sampling rounds taken
  std::size_t max_subset = 0;      // largest partition subset observed
  std::size_t seam_deletions = 0;  // points removed by boundary fixes
  std::size_t seam_cascades = 0;   // subsets emptied during boundary fixes
};

struct MultiwayResult {
  std::vector<Point2> hull;  // counter-clockwise closed polygon
  rt::TaskMetrics metrics;
  MultiwayStats stats;
  std::vector<std::string> audit_violations;
};

// Serial reference: strict quarter hull of arbitrary distinct points. Used
// as the recursion base on <= serial_cutoff points and as the test oracle
// for any n.
QuarterHull quarter_hull_serial(std::vector<Point2> points);

// Merges r quarter hulls over pairwise disjoint point sets into the quarter
// hull of their union. Requires sum of sizes <= 3 r^6; throws
// invalid_argument otherwise and logic_error if an internal partition
// overflows its subset bound.
QuarterHull multiway_merge(const std::vector<QuarterHull>& lists,
                           const MultiwayConfig& cfg = {});

// Seam repair between two adjacent merged subsets: if the first entry of
// `right` shows the last entry of `left` is not a strict right turn, that
// entry is deleted and the tail re-chained to its predecessor; otherwise
// the tails are chained directly. Returns the number of deleted entries
// (at most 1 unless cascade is set).
std::size_t boundary_fix(QuarterHull& left, QuarterHull& right,
                         bool cascade = false);

// Full hull of unsorted distinct points: the multiway merge driven from
// singleton lists, run on four rotations of the plane and glued
// counter-clockwise. Optional trace receives every element touch in
// serial-projection order (serial execution only).
MultiwayResult full_hull_multiway(const std::vector<Point2>& points,
                                  const MultiwayConfig& cfg = {},
                                  std::vector<rt::Access>* trace = nullptr);

}  // namespace forkhull::mw
