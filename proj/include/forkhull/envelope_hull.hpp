#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "forkhull/geom.hpp"
#include "forkhull/runtime.hpp"

namespace forkhull::env {

inline constexpr double kTau = 6.283185307179586476925287;

// r(theta) = x cos(theta) + y sin(theta); the Hough dual of the point (x, y).
// The zero wave (0, 0) is reserved for the implicit x-axis of the positive
// curve form and is rejected as an input wave.
struct Wave {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Wave& a, const Wave& b) {
    return a.x == b.x && a.y == b.y;
  }
};

double wave_value(const Wave& w, double theta);
double wave_slope(const Wave& w, double theta);

// Circular interval of angles; wraps through zero iff start > end. [0, 0] is
// the empty sentinel, [0, 2pi] the full circle.
struct AngleInterval {
  double start = 0.0;
  double end = 0.0;
};

AngleInterval full_interval();
bool interval_empty(const AngleInterval& I);
bool interval_full(const AngleInterval& I);
bool interval_wraps(const AngleInterval& I);
bool interval_contains(const AngleInterval& I, double theta);
double interval_width(const AngleInterval& I);

// O(1) wave comparisons at a probe angle. max_to_right / max_to_left break
// value ties (within 1e-12 of the wave magnitudes) by larger / smaller slope,
// picking the wave on top just right / left of the angle.
Wave max_val(const Wave& w1, const Wave& w2, double theta);
Wave min_val(const Wave& w1, const Wave& w2, double theta);
Wave max_slope(const Wave& w1, const Wave& w2, double theta);
Wave min_slope(const Wave& w1, const Wave& w2, double theta);
Wave max_to_right(const Wave& w1, const Wave& w2, double theta);
Wave max_to_left(const Wave& w1, const Wave& w2, double theta);

// The two antipodal crossing angles {theta, theta + pi} with theta in
// [0, pi). Identical waves coincide everywhere and throw invalid_argument.
AngleInterval intersections(const Wave& w1, const Wave& w2);

// Circular interval intersection; empty results collapse to the [0, 0]
// sentinel, as do degenerate slivers narrower than 1e-12.
AngleInterval common_range(const AngleInterval& I1, const AngleInterval& I2);

// Envelope piece: a wave, the angles over which it is on top, its position
// in circular rank order, and the index of its rank successor.
struct EnvelopeEntry {
  Wave wave;
  AngleInterval range;
  std::int64_t rank = 0;
  std::ptrdiff_t next = -1;
};

// Completed upper envelope in rank order: ranges tile [0, 2pi), the first
// entry owns angle 0, and next links follow rank order cyclically.
using Envelope = std::vector<EnvelopeEntry>;

struct DominatingRangeResult {
  AngleInterval range;
  Wave next{};        // the wave that overtakes at range.end
  bool has_next = false;
};

// Range over which `wave` exceeds every wave of W, found by a forked binary
// split: Theta(n) work, Theta(log n) span. Entries of W equal to `wave`
// itself impose no constraint.
DominatingRangeResult dominating_range(const std::vector<Wave>& W,
                                       const Wave& wave);

// Quadratic-work envelope: dominating_range of every wave against all
// others in parallel, then list ranking into rank order.
Envelope envelope_base_case(const std::vector<Wave>& W);

// Parameterized envelope: recurse on n^{1/k} groups at depth k-1, then clip
// every wave against each group envelope over the binary-searched section
// overlapping its own range. O(n^{1+1/k} log n) work, O(k log n) span.
// k outside [1, max(1, floor(log2 n))] throws invalid_argument.
Envelope angular_elimination(const std::vector<Wave>& W, int k);

enum class CurveItemKind : std::uint8_t { Wave, Gap, End };

// (angle, item) list over [0, 2pi]: the angle where a wave becomes active,
// a gap marker where the x-axis takes over, and the terminal marker at 2pi.
// A wave whose positive stretch crosses zero appears as two items.
struct CurveItem {
  double angle = 0.0;
  CurveItemKind kind = CurveItemKind::Wave;
  Wave wave{};
};
using PositiveCurveForm = std::vector<CurveItem>;

// Halve, recurse, and merge with sampled chunk boundaries: every ceil(log2)
// -th piece of each side is cross-ranked by binary search, the chunks merge
// serially in parallel, and boundary start angles are fixed afterwards.
PositiveCurveForm dc_parallel_merge_envelope(const std::vector<Wave>& W);

PositiveCurveForm to_positive_curve_form(const Envelope& E);

// "rank,x,y,range_start,range_end" header plus one row per entry.
std::string envelope_csv(const Envelope& E);

enum class HullMethod { angular, dc_merge };

struct EnvelopeHullResult {
  std::vector<Point2> hull;  // counter-clockwise extreme points
  rt::TaskMetrics metrics;
};

// Full hull through the dual envelope: translate so the bounding-box
// midpoint is the origin, take the envelope of the point waves, and read
// the survivors in rank order. k applies to the angular method only and is
// clamped to its valid range.
EnvelopeHullResult hull_via_envelope(const std::vector<Point2>& points,
                                     HullMethod method, int k = 2);

}  // namespace forkhull::env
