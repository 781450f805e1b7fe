#include "forkhull/divider_hull.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <stdexcept>

namespace forkhull::dh {

namespace {

// Trace array ids.
constexpr std::uint32_t kPoints = 0;
constexpr std::uint32_t kSlots = 1;
constexpr std::uint32_t kDNew = 2;
constexpr std::uint32_t kTangents = 3;

// Trace offsets are bytes (element index times element size), so a replay
// with (M, B) in bytes sees the arrays' real footprints.
constexpr std::uint64_t kStride[] = {sizeof(MarkedPoint), sizeof(std::int32_t),
                                     sizeof(std::int32_t), sizeof(TangentPair)};

void touch_at(std::uint32_t arr, std::uint64_t i, rt::AccessKind kind) {
  rt::touch(arr, i * kStride[arr], kind);
}

constexpr double kExactLimit = 33554432.0;  // 2^25

void atomic_max(std::atomic<std::uint64_t>& a, std::uint64_t v) {
  std::uint64_t cur = a.load(std::memory_order_relaxed);
  while (cur < v &&
         !a.compare_exchange_weak(cur, v, std::memory_order_relaxed)) {
  }
}

bool exact_coord(double v) {
  return std::abs(v) <= kExactLimit && v == std::nearbyint(v);
}

Point2 at(const std::vector<MarkedPoint>& pts, std::size_t i) {
  touch_at(kPoints, i, rt::AccessKind::Read);
  return {pts[i].x, pts[i].y};
}

Orientation orient3(const std::vector<MarkedPoint>& pts, std::size_t a,
                    std::size_t b, std::size_t c) {
  rt::tick();
  return orientation(at(pts, a), at(pts, b), at(pts, c));
}

// slope(p1, p2) < slope(q1, q2); both segments run left to right, so the
// cross-multiplied form needs no sign flip. Products of 2^26-bounded integer
// differences stay exact in doubles.
bool slope_less(const std::vector<MarkedPoint>& pts, std::size_t p1,
                std::size_t p2, std::size_t q1, std::size_t q2) {
  rt::tick();
  Point2 a = at(pts, p1), b = at(pts, p2), c = at(pts, q1), d = at(pts, q2);
  return (b.y - a.y) * (d.x - c.x) < (d.y - c.y) * (b.x - a.x);
}

// True when line(a1,a2) and line(b1,b2) cross at x <= mx. Exact for integer
// coordinates; the caller guarantees the lines are not parallel.
bool crossing_left_of(const std::vector<MarkedPoint>& pts, std::size_t a1,
                      std::size_t a2, std::size_t b1, std::size_t b2,
                      double mx) {
  rt::tick();
  Point2 p1 = at(pts, a1), p2 = at(pts, a2), p3 = at(pts, b1), p4 = at(pts, b2);
  if (exact_coord(p1.x) && exact_coord(p1.y) && exact_coord(p2.x) &&
      exact_coord(p2.y) && exact_coord(p3.x) && exact_coord(p3.y) &&
      exact_coord(p4.x) && exact_coord(p4.y) && exact_coord(mx)) {
    using I = __int128;
    I x1 = std::llround(p1.x), y1 = std::llround(p1.y);
    I x2 = std::llround(p2.x), y2 = std::llround(p2.y);
    I x3 = std::llround(p3.x), y3 = std::llround(p3.y);
    I x4 = std::llround(p4.x), y4 = std::llround(p4.y);
    I m = std::llround(mx);
    I den = (x1 - x2) * (y3 - y4) - (y1 - y2) * (x3 - x4);
    I num = (x1 * y2 - y1 * x2) * (x3 - x4) - (x1 - x2) * (x3 * y4 - y3 * x4);
    if (den == 0) return true;
    return den > 0 ? num <= m * den : num >= m * den;
  }
  long double den = (long double)(p1.x - p2.x) * (p3.y - p4.y) -
                    (long double)(p1.y - p2.y) * (p3.x - p4.x);
  long double num =
      ((long double)p1.x * p2.y - (long double)p1.y * p2.x) * (p3.x - p4.x) -
      (long double)(p1.x - p2.x) *
          ((long double)p3.x * p4.y - (long double)p3.y * p4.x);
  if (den == 0) return true;
  return num / den <= (long double)mx;
}

// Unmarked-point navigation over one subhull's index range.
struct ChainView {
  const std::vector<MarkedPoint>& pts;
  const DividerArena& arena;
  std::size_t lo0, hi0;  // inclusive; both endpoints unmarked
  std::uint64_t* hops;

  std::size_t at_or_left(std::size_t i) const {
    touch_at(kPoints, i, rt::AccessKind::Read);
    return pts[i].marked() ? nearest_unmarked(pts, arena, i, Side::Left, hops)
                           : i;
  }
  std::size_t at_or_right(std::size_t i) const {
    touch_at(kPoints, i, rt::AccessKind::Read);
    return pts[i].marked() ? nearest_unmarked(pts, arena, i, Side::Right, hops)
                           : i;
  }
  bool has_pred(std::size_t i) const { return i > lo0; }
  std::size_t pred(std::size_t i) const { return at_or_left(i - 1); }
  bool has_succ(std::size_t i) const { return i < hi0; }
  std::size_t succ(std::size_t i) const { return at_or_right(i + 1); }
};

// Tangent-from-a-fixed-left-point: the unmarked b in [blo, bhi] maximizing
// slope(a, b), rightmost on ties. Each step halves the index range.
std::size_t tangent_from_left_point(const std::vector<MarkedPoint>& pts,
                                    const ChainView& B, std::size_t a,
                                    std::size_t blo, std::size_t bhi,
                                    std::uint64_t* probes) {
  while (blo < bhi) {
    ++*probes;
    rt::tick();
    std::size_t mid = blo + (bhi - blo) / 2;
    std::size_t c1 = B.at_or_left(mid);
    std::size_t c2 = B.at_or_right(mid + 1);
    if (slope_less(pts, a, c2, a, c1))
      bhi = c1;
    else
      blo = c2;
  }
  return blo;
}

// Mirror case: the unmarked a in [alo, ahi] minimizing slope(a, b),
// leftmost on ties.
std::size_t tangent_from_right_point(const std::vector<MarkedPoint>& pts,
                                     const ChainView& A, std::size_t b,
                                     std::size_t alo, std::size_t ahi,
                                     std::uint64_t* probes) {
  while (alo < ahi) {
    ++*probes;
    rt::tick();
    std::size_t mid = alo + (ahi - alo) / 2;
    std::size_t c1 = A.at_or_left(mid);
    std::size_t c2 = A.at_or_right(mid + 1);
    if (slope_less(pts, c2, b, c1, b))
      alo = c2;
    else
      ahi = c1;
  }
  return alo;
}

// Extends a supporting pair along collinear runs to the leftmost touch on A
// and the rightmost touch on B.
TangentPair settle_ties(const std::vector<MarkedPoint>& pts, const ChainView& A,
                        const ChainView& B, std::size_t a, std::size_t b) {
  while (A.has_pred(a)) {
    std::size_t p = A.pred(a);
    if (orient3(pts, a, b, p) != Orientation::Collinear) break;
    a = p;
  }
  while (B.has_succ(b)) {
    std::size_t s = B.succ(b);
    if (orient3(pts, a, b, s) != Orientation::Collinear) break;
    b = s;
  }
  return {static_cast<std::ptrdiff_t>(a), static_cast<std::ptrdiff_t>(b)};
}

// Checks the full tangent contract including tie direction: predecessors of
// a and successors of b must lie strictly below, the other neighbors at or
// below the line.
bool is_tangent(const std::vector<MarkedPoint>& pts, const ChainView& A,
                const ChainView& B, std::size_t a, std::size_t b) {
  if (A.has_pred(a) &&
      orient3(pts, a, b, A.pred(a)) != Orientation::RightTurn)
    return false;
  if (A.has_succ(a) && orient3(pts, a, b, A.succ(a)) == Orientation::LeftTurn)
    return false;
  if (B.has_pred(b) && orient3(pts, a, b, B.pred(b)) == Orientation::LeftTurn)
    return false;
  if (B.has_succ(b) &&
      orient3(pts, a, b, B.succ(b)) != Orientation::RightTurn)
    return false;
  return true;
}

}  // namespace

DividerArena::DividerArena(std::size_t capacity) { reset(capacity); }

void DividerArena::reset(std::size_t capacity) {
  // Every divider permanently occupies a slot, so ids never exceed capacity.
  records.assign(capacity, Divider{});
  slots.assign(capacity, -1);
  id_slot.assign(capacity, -1);
  layer.store(0, std::memory_order_relaxed);
  next_id_.store(0, std::memory_order_relaxed);
}

std::int32_t DividerArena::add(const Divider& d) {
  std::int32_t id = next_id_.fetch_add(1, std::memory_order_relaxed);
  if (static_cast<std::size_t>(id) >= records.size())
    throw std::runtime_error("divider arena capacity exceeded");
  records[static_cast<std::size_t>(id)] = d;
  if (records[static_cast<std::size_t>(id)].wrapper < 0)
    records[static_cast<std::size_t>(id)].wrapper = id;
  return id;
}

void init_state(HullState& st, const std::vector<Point2>& sorted_points,
                const DividerHullConfig& cfg) {
  const std::size_t n0 = sorted_points.size();
  // Collapse equal-x runs to their top point; the hull is unchanged and the
  // working array then has strictly increasing x, which keeps the first and
  // last point of every subrange on its hull.
  std::vector<std::int64_t> keep(n0);
  rt::parallel_for(0, n0, rt::Grain{256}, [&](std::size_t i) {
    rt::tick();
    keep[i] = (i + 1 == n0 || sorted_points[i + 1].x != sorted_points[i].x);
  });
  std::vector<std::int64_t> ranks = rt::prefix_sum(keep);
  const std::size_t m = n0 ? static_cast<std::size_t>(ranks.back()) : 0;
  st.pts.assign(m, MarkedPoint{});
  rt::parallel_for(0, n0, rt::Grain{256}, [&](std::size_t i) {
    rt::tick();
    if (!keep[i]) return;
    std::size_t w = static_cast<std::size_t>(ranks[i]) - 1;
    touch_at(kPoints, w, rt::AccessKind::Write);
    st.pts[w] = {sorted_points[i].x, sorted_points[i].y, 1, -1, -1};
  });
  st.branch_root = cfg.branch_root;
  st.audit = cfg.audit;
  if (cfg.base_threshold) {
    st.base_threshold = cfg.base_threshold;
  } else {
    double l = std::log2(static_cast<double>(std::max<std::size_t>(2, m)));
    st.base_threshold = std::max<std::size_t>(
        4, static_cast<std::size_t>(std::ceil(l)));
  }
  std::size_t cap = 2;
  if (m >= 2)
    cap = std::max<std::size_t>(
        2, static_cast<std::size_t>(std::ceil(
               cfg.arena_constant * static_cast<double>(m) /
               std::log2(static_cast<double>(m)))));
  st.arena.reset(cap);
  st.violations.clear();
  st.marked_total.store(0);
  st.tangent_searches.store(0);
  st.tangent_probes.store(0);
  st.max_probes.store(0);
  st.max_probe_ratio_milli.store(0);
  st.max_hops.store(0);
}

std::size_t nearest_unmarked(const std::vector<MarkedPoint>& pts,
                             const DividerArena& arena, std::size_t i,
                             Side dir, std::uint64_t* hops) {
  rt::tick();
  touch_at(kPoints, i, rt::AccessKind::Read);
  const MarkedPoint& p = pts[i];
  if (!p.marked())
    throw std::logic_error("nearest_unmarked queried on an unmarked point");
  std::int32_t par = dir == Side::Left ? p.left_par : p.right_par;
  std::uint64_t h = 1;
  touch_at(kSlots, static_cast<std::uint64_t>(arena.id_slot[par]),
            rt::AccessKind::Read);
  const Divider* d = &arena.rec(par);
  if (d->wrapper != par) {
    ++h;
    touch_at(kSlots, static_cast<std::uint64_t>(arena.id_slot[d->wrapper]),
              rt::AccessKind::Read);
    d = &arena.rec(d->wrapper);
  }
  ++h;
  std::size_t out = d->landing;
  touch_at(kPoints, out, rt::AccessKind::Read);
  if (pts[out].marked())
    throw std::logic_error("nearest_unmarked path ends on a marked point");
  if (hops) *hops = std::max(*hops, h);
  return out;
}

TangentPair find_upper_tangent_marked(const std::vector<MarkedPoint>& pts,
                                      const DividerArena& arena,
                                      std::size_t a_lo, std::size_t a_hi,
                                      std::size_t b_lo, std::size_t b_hi,
                                      std::uint64_t* probes,
                                      std::uint64_t* hops) {
  if (a_hi >= b_lo || a_lo > a_hi || b_lo > b_hi)
    throw std::invalid_argument("tangent ranges must be ordered and disjoint");
  std::uint64_t local = 0;
  ChainView A{pts, arena, a_lo, a_hi, hops};
  ChainView B{pts, arena, b_lo, b_hi, hops};
  std::size_t alo = a_lo, ahi = a_hi, blo = b_lo, bhi = b_hi;
  const double mx = pts[a_hi].x;  // every A candidate at or left of this
  auto done = [&](std::size_t a, std::size_t b) {
    TangentPair t = settle_ties(pts, A, B, a, b);
    if (probes) *probes += local;
    return t;
  };
  for (;;) {
    if (alo == ahi)
      return done(alo, tangent_from_left_point(pts, B, alo, blo, bhi, &local));
    if (blo == bhi)
      return done(tangent_from_right_point(pts, A, blo, alo, ahi, &local),
                  blo);
    ++local;
    rt::tick();
    std::size_t amid = alo + (ahi - alo) / 2;
    std::size_t la = A.at_or_left(amid), ra = A.at_or_right(amid);
    std::size_t bmid = blo + (bhi - blo) / 2;
    std::size_t lb = B.at_or_left(bmid), rb = B.at_or_right(bmid);
    std::size_t cas[2] = {la, ra};
    std::size_t cbs[2] = {lb, rb};
    int na = la == ra ? 1 : 2, nb = lb == rb ? 1 : 2;
    bool progress = false;
    for (int ia = 0; ia < na; ++ia) {
      for (int ib = 0; ib < nb; ++ib) {
        std::size_t ca = cas[ia], cb = cbs[ib];
        std::size_t sa = 0, pb = 0;
        bool p1 = false, p2 = false, p3 = false, p4 = false;
        if (A.has_succ(ca)) {
          sa = A.succ(ca);
          p1 = orient3(pts, ca, cb, sa) == Orientation::LeftTurn;
        }
        if (A.has_pred(ca))
          p2 = orient3(pts, ca, cb, A.pred(ca)) == Orientation::LeftTurn;
        if (B.has_succ(cb))
          p3 = orient3(pts, ca, cb, B.succ(cb)) == Orientation::LeftTurn;
        if (B.has_pred(cb)) {
          pb = B.pred(cb);
          p4 = orient3(pts, ca, cb, pb) == Orientation::LeftTurn;
        }
        if (!p1 && !p2 && !p3 && !p4) return done(ca, cb);
        if (p2 && ca < ahi) {
          ahi = ca;
          progress = true;
        }
        if (p3 && cb > blo) {
          blo = cb;
          progress = true;
        }
        if (p1 && p4) {
          // Both supporting lines rise over the seam; their crossing tells
          // which side cannot hold its touch point.
          if (crossing_left_of(pts, ca, sa, pb, cb, mx)) {
            if (ca > alo) {
              alo = ca;
              progress = true;
            }
          } else if (cb < bhi) {
            bhi = cb;
            progress = true;
          }
        } else if (p1 && !p3 && !p4) {
          if (ca > alo) {
            alo = ca;
            progress = true;
          }
        } else if (p4 && !p1 && !p2) {
          if (cb < bhi) {
            bhi = cb;
            progress = true;
          }
        }
      }
    }
    if (!progress) {
      // One range is down to its two endpoints (its interior around the
      // midpoint is fully marked); settle with direct one-point searches.
      std::size_t aends[2] = {alo, ahi};
      for (int k = 0; k < (alo == ahi ? 1 : 2); ++k) {
        std::size_t b =
            tangent_from_left_point(pts, B, aends[k], blo, bhi, &local);
        TangentPair t = settle_ties(pts, A, B, aends[k], b);
        if (is_tangent(pts, A, B, static_cast<std::size_t>(t.left_pt),
                       static_cast<std::size_t>(t.right_pt))) {
          if (probes) *probes += local;
          return t;
        }
      }
      std::size_t bends[2] = {blo, bhi};
      for (int k = 0; k < (blo == bhi ? 1 : 2); ++k) {
        std::size_t a =
            tangent_from_right_point(pts, A, bends[k], alo, ahi, &local);
        TangentPair t = settle_ties(pts, A, B, a, bends[k]);
        if (is_tangent(pts, A, B, static_cast<std::size_t>(t.left_pt),
                       static_cast<std::size_t>(t.right_pt))) {
          if (probes) *probes += local;
          return t;
        }
      }
      throw std::logic_error("tangent search stalled");
    }
  }
}

namespace {

// Serial hull of a short presorted range. The range is rearranged so the
// eliminated points form one contiguous block framed by hull points, which
// a single deletion interval (two dividers) then covers.
void base_case(HullState& st, std::size_t lo, std::size_t hi,
               std::size_t slot_lo, std::size_t slot_hi) {
  const std::size_t n = hi - lo;
  if (n <= 1) return;
  auto& pts = st.pts;
  std::vector<std::size_t> chain;
  chain.reserve(n);
  for (std::size_t i = lo; i < hi; ++i) {
    touch_at(kPoints, i, rt::AccessKind::Read);
    rt::tick();
    while (chain.size() >= 2 &&
           orient3(pts, chain[chain.size() - 2], chain.back(), i) !=
               Orientation::RightTurn)
      chain.pop_back();
    chain.push_back(i);
  }
  const std::size_t h = chain.size();
  if (h == n) return;
  if (slot_hi - slot_lo < 2)
    throw std::runtime_error("divider arena allotment overflow");
  std::vector<char> on_hull(n, 0);
  for (std::size_t idx : chain) on_hull[idx - lo] = 1;
  std::vector<MarkedPoint> tmp(n);
  std::size_t w = 0;
  for (std::size_t k = 0; k + 1 < h; ++k) tmp[w++] = pts[chain[k]];
  for (std::size_t i = lo; i < hi; ++i)
    if (!on_hull[i - lo]) tmp[w++] = pts[i];
  tmp[n - 1] = pts[chain[h - 1]];
  for (std::size_t i = 0; i < n; ++i) {
    touch_at(kPoints, lo + i, rt::AccessKind::Write);
    rt::tick();
    pts[lo + i] = tmp[i];
  }
  std::int32_t layer = st.arena.layer.load(std::memory_order_relaxed);
  Divider L;
  L.side = Side::Left;
  L.landing = lo + h - 2;
  L.x = pts[lo + h - 1].x;
  L.layer = layer;
  Divider R;
  R.side = Side::Right;
  R.landing = hi - 1;
  R.x = pts[hi - 2].x;
  R.layer = layer;
  std::int32_t lid = st.arena.add(L);
  std::int32_t rid = st.arena.add(R);
  st.arena.slots[slot_lo] = lid;
  st.arena.id_slot[lid] = static_cast<std::int32_t>(slot_lo);
  st.arena.slots[slot_lo + 1] = rid;
  st.arena.id_slot[rid] = static_cast<std::int32_t>(slot_lo + 1);
  touch_at(kSlots, slot_lo, rt::AccessKind::Write);
  touch_at(kSlots, slot_lo + 1, rt::AccessKind::Write);
  for (std::size_t i = lo + h - 1; i + 1 < hi; ++i) {
    touch_at(kPoints, i, rt::AccessKind::Write);
    rt::tick();
    pts[i].left_par = lid;
    pts[i].right_par = rid;
    pts[i].rank = 0;
  }
  st.marked_total.fetch_add(n - h, std::memory_order_relaxed);
}

std::size_t tangent_index(std::size_t r, std::size_t i, std::size_t j) {
  return i * (2 * r - i - 1) / 2 + (j - i - 1);
}

}  // namespace

std::vector<std::int32_t> compute_new_dividers(
    HullState& st,
    const std::vector<std::pair<std::size_t, std::size_t>>& ranges,
    const std::vector<TangentPair>& tangents) {
  const std::size_t r = ranges.size();
  auto& pts = st.pts;
  auto slope_eq = [&](const TangentPair& a, const TangentPair& b) {
    return !slope_less(pts, a.left_pt, a.right_pt, b.left_pt, b.right_pt) &&
           !slope_less(pts, b.left_pt, b.right_pt, a.left_pt, a.right_pt);
  };
  std::vector<std::size_t> first(r), last(r);
  std::vector<std::size_t> in_t(r, 0), out_t(r, 0);
  for (std::size_t i = 0; i < r; ++i) {
    rt::tick();
    if (i == 0) {
      first[0] = ranges[0].first;
    } else {
      // Lowest-slope tangent arriving from the left reaches furthest right;
      // its touch is the first survivor. Slope ties keep the right touch.
      std::size_t best = tangent_index(r, 0, i);
      for (std::size_t j = 1; j < i; ++j) {
        rt::tick();
        std::size_t c = tangent_index(r, j, i);
        touch_at(kTangents, c, rt::AccessKind::Read);
        if (slope_less(pts, tangents[c].left_pt, tangents[c].right_pt,
                       tangents[best].left_pt, tangents[best].right_pt) ||
            (slope_eq(tangents[c], tangents[best]) &&
             tangents[c].right_pt > tangents[best].right_pt))
          best = c;
      }
      touch_at(kTangents, best, rt::AccessKind::Read);
      first[i] = static_cast<std::size_t>(tangents[best].right_pt);
      in_t[i] = best;
    }
    if (i == r - 1) {
      last[i] = ranges[r - 1].second - 1;
    } else {
      // Highest-slope tangent leaving to the right; ties keep the left touch.
      std::size_t best = tangent_index(r, i, i + 1);
      for (std::size_t k = i + 2; k < r; ++k) {
        rt::tick();
        std::size_t c = tangent_index(r, i, k);
        touch_at(kTangents, c, rt::AccessKind::Read);
        if (slope_less(pts, tangents[best].left_pt, tangents[best].right_pt,
                       tangents[c].left_pt, tangents[c].right_pt) ||
            (slope_eq(tangents[c], tangents[best]) &&
             tangents[c].left_pt < tangents[best].left_pt))
          best = c;
      }
      touch_at(kTangents, best, rt::AccessKind::Read);
      last[i] = static_cast<std::size_t>(tangents[best].left_pt);
      out_t[i] = best;
    }
  }
  std::vector<std::size_t> contrib;
  for (std::size_t i = 0; i < r; ++i) {
    rt::tick();
    // A middle subhull survives only when the seam bends downward across it:
    // the arriving tangent must be steeper than the leaving one. Otherwise
    // the direct tangent over it runs at or above its whole chain.
    if (first[i] > last[i]) continue;
    if (i > 0 && i + 1 < r &&
        slope_less(pts, tangents[in_t[i]].left_pt, tangents[in_t[i]].right_pt,
                   tangents[out_t[i]].left_pt, tangents[out_t[i]].right_pt))
      continue;
    contrib.push_back(i);
  }
  assert(!contrib.empty() && contrib.front() == 0 && contrib.back() == r - 1);
  std::vector<std::int32_t> d_new(2 * r - 2, -1);
  std::int32_t layer = st.arena.layer.fetch_add(1, std::memory_order_relaxed) + 1;
  for (std::size_t k = 0; k + 1 < contrib.size(); ++k) {
    rt::tick();
    std::size_t i = contrib[k], j = contrib[k + 1];
    std::size_t li = last[i], fj = first[j];
    if (fj <= li + 1) continue;  // nothing eliminated at this seam
    Divider L;
    L.side = Side::Left;
    L.landing = li;
    L.x = pts[li + 1].x;
    L.layer = layer;
    Divider R;
    R.side = Side::Right;
    R.landing = fj;
    R.x = pts[fj - 1].x;
    R.layer = layer;
    d_new[2 * i] = st.arena.add(L);
    d_new[2 * j - 1] = st.arena.add(R);
    touch_at(kDNew, 2 * i, rt::AccessKind::Write);
    touch_at(kDNew, 2 * j - 1, rt::AccessKind::Write);
  }
  return d_new;
}

void integrate_dividers(HullState& st, std::size_t slot_lo,
                        std::size_t slot_hi, std::size_t reserve,
                        const std::vector<std::int32_t>& d_new) {
  auto& A = st.arena;
  const std::size_t len = slot_hi - slot_lo;
  std::vector<std::int64_t> flags(len);
  rt::parallel_for(0, len, rt::Grain{256}, [&](std::size_t i) {
    rt::tick();
    touch_at(kSlots, slot_lo + i, rt::AccessKind::Read);
    flags[i] = A.slots[slot_lo + i] >= 0;
  });
  std::vector<std::int64_t> ranks = rt::prefix_sum(flags);
  const std::size_t n_old = len ? static_cast<std::size_t>(ranks.back()) : 0;
  std::vector<std::int32_t> olds(n_old);
  rt::parallel_for(0, len, rt::Grain{256}, [&](std::size_t i) {
    rt::tick();
    if (flags[i]) olds[static_cast<std::size_t>(ranks[i]) - 1] =
        A.slots[slot_lo + i];
  });
  std::vector<std::int64_t> nflags(d_new.size());
  rt::parallel_for(0, d_new.size(), rt::Grain{256}, [&](std::size_t i) {
    rt::tick();
    touch_at(kDNew, i, rt::AccessKind::Read);
    nflags[i] = d_new[i] >= 0;
  });
  std::vector<std::int64_t> nranks = rt::prefix_sum(nflags);
  const std::size_t n_new =
      d_new.empty() ? 0 : static_cast<std::size_t>(nranks.back());
  std::vector<std::int32_t> news(n_new);
  rt::parallel_for(0, d_new.size(), rt::Grain{256}, [&](std::size_t i) {
    rt::tick();
    if (nflags[i])
      news[static_cast<std::size_t>(nranks[i]) - 1] = d_new[i];
  });
  if (n_old + n_new > len)
    throw std::runtime_error("divider arena allotment overflow");
  // Stage the compacted additions in the trailing reserve, then merge.
  assert(n_new <= reserve && reserve <= len);
  rt::parallel_for(0, n_new, rt::Grain{256}, [&](std::size_t i) {
    rt::tick();
    touch_at(kSlots, slot_hi - reserve + i, rt::AccessKind::Write);
    A.slots[slot_hi - reserve + i] = news[i];
  });
  // Nesting order. A new interval may start or end exactly where an
  // enclosed older one does (those points were already marked), so equal
  // positions are real: an opening divider precedes a closing one, outer
  // (newer) intervals open first and inner (older) ones close first.
  auto nesting_less = [&A](std::int32_t a, std::int32_t b) {
    rt::tick();
    const Divider &da = A.rec(a), &db = A.rec(b);
    if (da.pos() != db.pos()) return da.pos() < db.pos();
    if (da.side != db.side) return da.side == Side::Left;
    if (da.side == Side::Left) return da.layer > db.layer;
    return da.layer < db.layer;
  };
  std::vector<std::int32_t> merged = rt::parallel_merge(olds, news, nesting_less);
  rt::parallel_for(0, len, rt::Grain{256}, [&](std::size_t i) {
    rt::tick();
    touch_at(kSlots, slot_lo + i, rt::AccessKind::Write);
    std::int32_t v = i < merged.size() ? merged[i] : -1;
    A.slots[slot_lo + i] = v;
    if (v >= 0) A.id_slot[v] = static_cast<std::int32_t>(slot_lo + i);
  });
}

void mark_points(HullState& st, std::size_t slot_lo, std::size_t slot_hi,
                 const std::vector<std::int32_t>& d_new) {
  auto& A = st.arena;
  auto& pts = st.pts;
  std::vector<std::int32_t> seq;
  for (std::int32_t id : d_new)
    if (id >= 0) seq.push_back(id);
  assert(seq.size() % 2 == 0);
  std::atomic<std::size_t> double_marks{0};
  for (std::size_t k = 0; k + 1 < seq.size(); k += 2) {
    std::int32_t lid = seq[k], rid = seq[k + 1];
    assert(A.rec(lid).side == Side::Left && A.rec(rid).side == Side::Right);
    std::size_t sl = static_cast<std::size_t>(A.id_slot[lid]);
    std::size_t sr = static_cast<std::size_t>(A.id_slot[rid]);
    touch_at(kSlots, sl, rt::AccessKind::Read);
    touch_at(kSlots, sr, rt::AccessKind::Read);
    assert(slot_lo <= sl && sl < sr && sr < slot_hi);
    (void)slot_lo;
    (void)slot_hi;
    // Every divider the new interval swallows now answers to the new pair.
    rt::parallel_for(sl + 1, sr, rt::Grain{256}, [&](std::size_t s) {
      rt::tick();
      touch_at(kSlots, s, rt::AccessKind::Write);
      Divider& d = A.rec(A.slots[s]);
      d.wrapper = d.side == Side::Left ? lid : rid;
      d.marked = true;
    });
    // Nesting depth along the slot run; stretches at depth 1 are the gaps
    // between swallowed intervals, which hold the not-yet-marked points.
    const std::size_t m = sr - sl + 1;
    std::vector<std::int64_t> delta(m);
    rt::parallel_for(0, m, rt::Grain{256}, [&](std::size_t i) {
      rt::tick();
      touch_at(kSlots, sl + i, rt::AccessKind::Read);
      delta[i] = A.rec(A.slots[sl + i]).side == Side::Left ? 1 : -1;
    });
    std::vector<std::int64_t> depth = rt::prefix_sum(delta);
    assert(depth[m - 1] == 0);
    rt::parallel_for(0, m - 1, rt::Grain{1}, [&](std::size_t t) {
      rt::tick();
      if (depth[t] != 1) return;
      const Divider& dl = A.rec(A.slots[sl + t]);
      const Divider& dr = A.rec(A.slots[sl + t + 1]);
      std::size_t a = t == 0 ? dl.landing + 1 : dl.landing;
      std::size_t b = t + 1 == m - 1 ? dr.landing - 1 : dr.landing;
      if (a > b) return;
      rt::parallel_for(a, b + 1, rt::Grain{256}, [&](std::size_t p) {
        rt::tick();
        touch_at(kPoints, p, rt::AccessKind::Write);
        if (pts[p].marked()) {
          double_marks.fetch_add(1, std::memory_order_relaxed);
          return;
        }
        pts[p].left_par = lid;
        pts[p].right_par = rid;
        pts[p].rank = 0;
      });
      st.marked_total.fetch_add(b - a + 1, std::memory_order_relaxed);
    });
  }
  if (double_marks.load())
    throw std::logic_error("mark_points attempted to mark a point twice");
}

void solve_range(HullState& st, std::size_t lo, std::size_t hi,
                 std::size_t slot_lo, std::size_t slot_hi) {
  const std::size_t n = hi - lo;
  if (n < std::max<std::size_t>(st.base_threshold, 3)) {
    base_case(st, lo, hi, slot_lo, slot_hi);
    return;
  }
  std::size_t r = static_cast<std::size_t>(std::ceil(
      std::pow(static_cast<double>(n), 1.0 / st.branch_root)));
  r = std::min(r, n);
  std::size_t per = 0;
  if (r >= 2 && slot_hi - slot_lo > 2 * r)
    per = (slot_hi - slot_lo - 2 * r) / r;
  if (r < 2 || per < 2) {
    base_case(st, lo, hi, slot_lo, slot_hi);
    return;
  }
  std::vector<std::size_t> cuts(r + 1);
  for (std::size_t i = 0; i <= r; ++i) cuts[i] = lo + (n * i) / r;
  rt::parallel_for(0, r, rt::Grain{1}, [&](std::size_t i) {
    solve_range(st, cuts[i], cuts[i + 1], slot_lo + i * per,
                slot_lo + (i + 1) * per);
  });
  std::vector<std::pair<std::size_t, std::size_t>> ranges(r);
  for (std::size_t i = 0; i < r; ++i) ranges[i] = {cuts[i], cuts[i + 1]};
  std::vector<std::pair<std::size_t, std::size_t>> prs;
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = i + 1; j < r; ++j) prs.push_back({i, j});
  std::vector<TangentPair> T(prs.size());
  rt::parallel_for(0, prs.size(), rt::Grain{1}, [&](std::size_t idx) {
    auto [i, j] = prs[idx];
    std::uint64_t probes = 0, hops = 0;
    T[idx] = find_upper_tangent_marked(st.pts, st.arena, ranges[i].first,
                                       ranges[i].second - 1, ranges[j].first,
                                       ranges[j].second - 1, &probes, &hops);
    touch_at(kTangents, idx, rt::AccessKind::Write);
    st.tangent_searches.fetch_add(1, std::memory_order_relaxed);
    st.tangent_probes.fetch_add(probes, std::memory_order_relaxed);
    atomic_max(st.max_probes, probes);
    atomic_max(st.max_hops, hops);
    std::size_t span = std::max(ranges[i].second - ranges[i].first,
                                ranges[j].second - ranges[j].first);
    double denom =
        std::max(1.0, std::log2(static_cast<double>(span)));
    atomic_max(st.max_probe_ratio_milli,
               static_cast<std::uint64_t>(1000.0 * probes / denom));
  });
  std::vector<std::int32_t> d_new = compute_new_dividers(st, ranges, T);
  bool any = false;
  for (std::int32_t id : d_new) any = any || id >= 0;
  if (any) {
    integrate_dividers(st, slot_lo, slot_hi, 2 * r, d_new);
    mark_points(st, slot_lo, slot_hi, d_new);
  }
  if (st.audit) {
    auto v = check_invariants(st.pts, st.arena);
    st.violations.insert(st.violations.end(), v.begin(), v.end());
  }
}

std::vector<InvariantViolation> check_invariants(
    const std::vector<MarkedPoint>& pts, const DividerArena& arena) {
  std::vector<InvariantViolation> out;
  auto report = [&](int inv, std::string msg) {
    out.push_back({inv, std::move(msg)});
  };
  if (arena.divider_count() > arena.capacity())
    report(1, "divider count " + std::to_string(arena.divider_count()) +
                  " exceeds capacity " + std::to_string(arena.capacity()));
  std::vector<std::int32_t> occ;
  for (std::size_t s = 0; s < arena.slots.size(); ++s) {
    std::int32_t id = arena.slots[s];
    if (id < 0) continue;
    occ.push_back(id);
    if (static_cast<std::size_t>(id) >= arena.records.size()) {
      report(3, "slot " + std::to_string(s) + " holds invalid id");
      return out;
    }
    if (arena.id_slot[id] != static_cast<std::int32_t>(s))
      report(3, "id " + std::to_string(id) + " slot table disagrees");
  }
  if (occ.size() > arena.capacity())
    report(1, "occupied slots exceed capacity");
  for (std::size_t k = 1; k < occ.size(); ++k) {
    const Divider& p = arena.rec(occ[k - 1]);
    const Divider& c = arena.rec(occ[k]);
    // Nesting order at equal positions: Left before Right, outer (newer)
    // Left first, inner (older) Right first.
    bool ok;
    if (p.pos() != c.pos())
      ok = p.pos() < c.pos();
    else if (p.side != c.side)
      ok = p.side == Side::Left;
    else if (p.side == Side::Left)
      ok = p.layer > c.layer;
    else
      ok = p.layer < c.layer;
    if (!ok) report(3, "slots out of order around id " + std::to_string(occ[k]));
  }
  // Pair dividers into intervals; laminarity is exactly balanced nesting of
  // the sorted slot sequence.
  std::vector<std::int32_t> partner(arena.records.size(), -1);
  std::vector<std::int32_t> outermost(arena.records.size(), -1);
  std::vector<std::int32_t> stack;
  bool paired = true;
  for (std::int32_t id : occ) {
    if (arena.rec(id).side == Side::Left) {
      stack.push_back(id);
    } else {
      if (stack.empty()) {
        report(3, "unmatched right divider id " + std::to_string(id));
        paired = false;
        continue;
      }
      std::int32_t l = stack.back();
      stack.pop_back();
      if (arena.rec(l).pos() > arena.rec(id).pos()) {
        report(3, "inverted interval at ids " + std::to_string(l) + "," +
                      std::to_string(id));
        paired = false;
      }
      partner[l] = id;
      partner[id] = l;
      std::int32_t outer = stack.empty() ? -1 : stack.front();
      outermost[l] = outer;
      outermost[id] = outer;
    }
  }
  if (!stack.empty()) {
    report(3, "unmatched left divider id " + std::to_string(stack.back()));
    paired = false;
  }
  for (std::int32_t id : occ) {
    const Divider& d = arena.rec(id);
    std::int32_t w = d.wrapper;
    if (w < 0 || static_cast<std::size_t>(w) >= arena.records.size() ||
        arena.rec(w).side != d.side) {
      report(2, "id " + std::to_string(id) + " has a bad wrapper");
      continue;
    }
    if (paired && partner[id] >= 0) {
      std::int32_t outerL = outermost[id];
      std::int32_t expect =
          outerL < 0 ? id : (d.side == Side::Left ? outerL : partner[outerL]);
      if (w != expect)
        report(2, "id " + std::to_string(id) + " wrapper " +
                      std::to_string(w) + " is not its maximal superset " +
                      std::to_string(expect));
    }
    if (w == id) {
      if (d.landing >= pts.size() || pts[d.landing].marked())
        report(5, "self-wrapped id " + std::to_string(id) +
                      " lands on a marked point");
    }
  }
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const MarkedPoint& p = pts[i];
    if ((p.left_par < 0) != (p.right_par < 0)) {
      report(4, "point " + std::to_string(i) + " has half-set parents");
      continue;
    }
    if (!p.marked()) continue;
    bool ok = p.left_par >= 0 &&
              static_cast<std::size_t>(p.left_par) < arena.records.size() &&
              static_cast<std::size_t>(p.right_par) < arena.records.size() &&
              arena.rec(p.left_par).side == Side::Left &&
              arena.rec(p.right_par).side == Side::Right;
    if (ok && paired) ok = partner[p.left_par] == p.right_par;
    if (ok)
      ok = arena.rec(p.left_par).pos() <= i && i <= arena.rec(p.right_par).pos();
    if (!ok)
      report(4, "point " + std::to_string(i) +
                    " parents do not name a containing interval");
  }
  return out;
}

DividerHullResult presorted_upper_hull(const std::vector<Point2>& points,
                                       const DividerHullConfig& cfg,
                                       std::vector<rt::Access>* trace) {
  for (std::size_t i = 1; i < points.size(); ++i) {
    const Point2 &a = points[i - 1], &b = points[i];
    if (!(a.x < b.x || (a.x == b.x && a.y < b.y)))
      throw std::invalid_argument("input must be (x, y)-sorted and distinct");
  }
  DividerHullResult out;
  HullState st;
  out.metrics = rt::run_root(
      [&] {
        init_state(st, points, cfg);
        const std::size_t m = st.pts.size();
        if (m > 1) solve_range(st, 0, m, 0, st.arena.capacity());
        // Survivors, then drop interior collinear points so the output is
        // the strict upper hull.
        std::vector<std::int64_t> flags(m);
        rt::parallel_for(0, m, rt::Grain{256}, [&](std::size_t i) {
          rt::tick();
          touch_at(kPoints, i, rt::AccessKind::Read);
          flags[i] = st.pts[i].rank;
        });
        std::vector<std::int64_t> ranks = rt::prefix_sum(flags);
        std::size_t h = m ? static_cast<std::size_t>(ranks.back()) : 0;
        std::vector<Point2> chain(h);
        rt::parallel_for(0, m, rt::Grain{256}, [&](std::size_t i) {
          rt::tick();
          if (flags[i])
            chain[static_cast<std::size_t>(ranks[i]) - 1] = {st.pts[i].x,
                                                             st.pts[i].y};
        });
        out.hull = rt::compact(chain, [&](const Point2& p) {
          rt::tick();
          std::size_t k = static_cast<std::size_t>(&p - chain.data());
          if (k == 0 || k + 1 == chain.size()) return true;
          return orientation(chain[k - 1], p, chain[k + 1]) ==
                 Orientation::RightTurn;
        });
      },
      trace);
  out.marked_total = st.marked_total.load();
  out.arena_capacity = st.arena.capacity();
  out.arena_dividers = st.arena.divider_count();
  out.tangents.searches = st.tangent_searches.load();
  out.tangents.probes = st.tangent_probes.load();
  out.tangents.max_probes = st.max_probes.load();
  out.tangents.max_probe_ratio = st.max_probe_ratio_milli.load() / 1000.0;
  out.tangents.max_hops = st.max_hops.load();
  out.audit_violations = std::move(st.violations);
  return out;
}

}  // namespace forkhull::dh
