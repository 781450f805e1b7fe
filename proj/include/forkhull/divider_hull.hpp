#pragma once

#include <atomic>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "forkhull/geom.hpp"
#include "forkhull/runtime.hpp"

namespace forkhull::dh {

enum class Side : std::uint8_t { Left = 0, Right = 1 };

// Point plus deletion bookkeeping. rank doubles as the keep-flag for the
// final compaction; left_par/right_par are divider ids (-1 = unmarked).
struct MarkedPoint {
  double x = 0;
  double y = 0;
  std::int32_t rank = 1;
  std::int32_t left_par = -1;
  std::int32_t right_par = -1;
  bool marked() const { return left_par >= 0; }
};

// Deletion-interval boundary. A Left divider sits just before the first
// covered point, a Right divider just after the last one, so the covered
// end is always landing +/- 1.
struct Divider {
  double x = 0;
  std::size_t landing = 0;
  std::int32_t wrapper = -1;  // same-side divider id of the maximal superset
  std::int64_t rank = 0;      // prefix-sum scratch
  bool marked = false;
  Side side = Side::Left;
  std::int32_t layer = 0;
  // Index of the first (Left) or last (Right) covered point; the merge key.
  std::size_t pos() const {
    return side == Side::Left ? landing + 1 : landing - 1;
  }
};

// Fixed-capacity slot array plus an append-only record store. Slots hold
// divider ids so merges can move dividers without invalidating the ids that
// points and wrappers reference.
struct DividerArena {
  std::vector<Divider> records;
  std::vector<std::int32_t> slots;    // id or -1
  std::vector<std::int32_t> id_slot;  // id -> current slot
  std::atomic<std::int32_t> layer{0};

  explicit DividerArena(std::size_t capacity = 0);
  void reset(std::size_t capacity);
  std::size_t capacity() const { return slots.size(); }
  std::size_t divider_count() const {
    return next_id_.load(std::memory_order_relaxed);
  }
  // Appends a record and returns its id; safe under concurrent merges.
  std::int32_t add(const Divider& d);
  const Divider& rec(std::int32_t id) const {
    return records[static_cast<std::size_t>(id)];
  }
  Divider& rec(std::int32_t id) {
    return records[static_cast<std::size_t>(id)];
  }

 private:
  std::atomic<std::int32_t> next_id_{0};
};

struct TangentPair {
  std::ptrdiff_t left_pt = -1;   // point index on the left subhull
  std::ptrdiff_t right_pt = -1;  // point index on the right subhull
};

struct InvariantViolation {
  int invariant = 0;  // 1..5
  std::string detail;
};

struct DividerHullConfig {
  int branch_root = 6;        // split into ceil(n^(1/branch_root)) subproblems
  double arena_constant = 8.0;
  std::size_t base_threshold = 0;  // 0: ceil(log2 of the input size)
  bool audit = false;              // run check_invariants after every merge
};

struct TangentStats {
  std::uint64_t searches = 0;
  std::uint64_t probes = 0;
  std::uint64_t max_probes = 0;
  double max_probe_ratio = 0;  // probes / log2(larger range size), maximized
  std::uint64_t max_hops = 0;  // nearest_unmarked path length, maximized
};

struct DividerHullResult {
  HullChain hull;
  rt::TaskMetrics metrics;
  std::size_t marked_total = 0;
  std::size_t arena_capacity = 0;
  std::size_t arena_dividers = 0;
  TangentStats tangents;
  std::vector<InvariantViolation> audit_violations;
};

// Working state shared by the recursion; exposed so the phase functions can
// be unit-tested on hand-built configurations.
struct HullState {
  std::vector<MarkedPoint> pts;
  DividerArena arena;
  std::size_t base_threshold = 4;
  int branch_root = 6;
  bool audit = false;
  std::vector<InvariantViolation> violations;
  std::atomic<std::size_t> marked_total{0};
  std::atomic<std::uint64_t> tangent_searches{0};
  std::atomic<std::uint64_t> tangent_probes{0};
  std::atomic<std::uint64_t> max_probes{0};
  std::atomic<std::uint64_t> max_probe_ratio_milli{0};
  std::atomic<std::uint64_t> max_hops{0};
};

// Fills the working state: x-sorted distinct input, equal-x runs collapsed
// to the highest point, arena sized ceil(c * n / log2 n).
void init_state(HullState& st, const std::vector<Point2>& sorted_points,
                const DividerHullConfig& cfg);

// Nearest point outside every deletion interval in the given direction from
// a marked point, via par -> wrapper -> landing (at most 3 hops).
std::size_t nearest_unmarked(const std::vector<MarkedPoint>& pts,
                             const DividerArena& arena, std::size_t i,
                             Side dir, std::uint64_t* hops = nullptr);

// Upper common tangent between the unmarked points of [a_lo, a_hi] and
// [b_lo, b_hi] (inclusive, range endpoints unmarked, A strictly left of B).
// Ties resolve to the leftmost touch on A and the rightmost on B. probes, if
// given, receives the number of binary-search steps.
TangentPair find_upper_tangent_marked(const std::vector<MarkedPoint>& pts,
                                      const DividerArena& arena,
                                      std::size_t a_lo, std::size_t a_hi,
                                      std::size_t b_lo, std::size_t b_hi,
                                      std::uint64_t* probes = nullptr,
                                      std::uint64_t* hops = nullptr);

// Seam dividers for r solved subranges: ids laid out in a gapped array of
// 2r-2 slots (left divider of subhull i at 2i, right divider of subhull j at
// 2j-1), -1 where a seam eliminated nothing.
std::vector<std::int32_t> compute_new_dividers(
    HullState& st, const std::vector<std::pair<std::size_t, std::size_t>>& ranges,
    const std::vector<TangentPair>& tangents);

// Compacts d_new, stages it in the trailing `reserve` slots of the
// allotment, then merges it with the existing dividers in nesting order
// (position, then Left before Right, then enclosing first). Throws on
// overflow.
void integrate_dividers(HullState& st, std::size_t slot_lo, std::size_t slot_hi,
                        std::size_t reserve,
                        const std::vector<std::int32_t>& d_new);

// For each new interval: rewires wrappers of the old dividers it encloses,
// flags them marked, and marks every not-yet-marked point in the gaps with
// the new pair as parents. Each point is marked at most once per run.
void mark_points(HullState& st, std::size_t slot_lo, std::size_t slot_hi,
                 const std::vector<std::int32_t>& d_new);

// Recursive solver over points [lo, hi) with arena allotment [slot_lo,
// slot_hi); after it returns the unmarked points of the range are exactly
// its upper hull (collinear points included).
void solve_range(HullState& st, std::size_t lo, std::size_t hi,
                 std::size_t slot_lo, std::size_t slot_hi);

// Report-only audit of the five structural invariants:
// 1 capacity, 2 wrapper maximality, 3 laminarity (and slot sortedness),
// 4 parent pointers name one containing interval, 5 self-wrapped intervals
// land on unmarked points.
std::vector<InvariantViolation> check_invariants(
    const std::vector<MarkedPoint>& pts, const DividerArena& arena);

// Full algorithm on (x, y)-sorted distinct points. Optional trace receives
// every element touch in serial-projection order (serial execution only).
DividerHullResult presorted_upper_hull(const std::vector<Point2>& points,
                                       const DividerHullConfig& cfg = {},
                                       std::vector<rt::Access>* trace = nullptr);

}  // namespace forkhull::dh
