#include "forkhull/multiway_hull.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>
#include <numeric>
#include <stdexcept>
#include <string>

namespace forkhull::mw {

namespace {

// Virtual array ids for the cache trace: the input points and one bump
// arena covering every buffer the recursion writes.
constexpr std::uint32_t kInput = 0;
constexpr std::uint32_t kArena = 1;

// Trace offsets are bytes (element index times element size), so a replay
// with (M, B) in bytes sees the arrays' real footprints.
constexpr std::uint64_t kStride[] = {sizeof(Point2), sizeof(TailPoint)};

void touch_at(std::uint32_t arr, std::uint64_t i, rt::AccessKind kind) {
  rt::touch(arr, i * kStride[arr], kind);
}

struct View {
  const TailPoint* p = nullptr;
  std::size_t n = 0;
  std::uint32_t arr = kArena;
  std::uint64_t vbase = 0;
};

struct Merged {
  std::vector<TailPoint> entries;
  std::uint64_t vbase = 0;
};

struct Ctx {
  const MultiwayConfig* cfg = nullptr;
  // Bump-allocates trace addresses; only advanced under serial tracing, so
  // the recorded layout is the serial projection.
  bool tracing = false;
  std::uint64_t cursor = 0;
  std::atomic<std::size_t> partitions{0};
  std::atomic<std::size_t> max_subset{0};
  std::atomic<std::size_t> seam_deletions{0};
  std::atomic<std::size_t> seam_cascades{0};
  std::mutex audit_mu;
  std::vector<std::string>* audit_out = nullptr;
};

std::uint64_t alloc_words(Ctx& ctx, std::size_t n) {
  if (!ctx.tracing) return 0;
  std::uint64_t base = ctx.cursor;
  ctx.cursor += n;
  return base;
}

View as_view(const Merged& m) {
  return {m.entries.data(), m.entries.size(), kArena, m.vbase};
}

void audit_report(Ctx& ctx, const std::string& msg) {
  if (!ctx.audit_out) return;
  std::lock_guard<std::mutex> lk(ctx.audit_mu);
  if (ctx.audit_out->size() < 64) ctx.audit_out->push_back(msg);
}

void validate_chain(Ctx& ctx, const std::vector<TailPoint>& e) {
  rt::parallel_for(0, e.size(), rt::Grain{4}, [&](std::size_t i) {
    rt::tick();
    if (i == 0) {
      if (e[0].tail.x > e[0].head.x || e[0].tail.y > e[0].head.y)
        audit_report(ctx, "chain origin tail not left-below its head");
      return;
    }
    if (!(e[i - 1].head.x < e[i].head.x && e[i - 1].head.y < e[i].head.y))
      audit_report(ctx, "chain heads not strictly increasing: (" +
                            std::to_string(e[i - 1].head.x) + "," +
                            std::to_string(e[i - 1].head.y) + ") -> (" +
                            std::to_string(e[i].head.x) + "," +
                            std::to_string(e[i].head.y) + ") homes " +
                            std::to_string(e[i - 1].home) + "/" +
                            std::to_string(e[i].home) + " at " +
                            std::to_string(i) + "/" + std::to_string(e.size()));
    if (!(e[i].tail == e[i - 1].head))
      audit_report(ctx, "tail does not name the previous head");
    if (i >= 2 && orientation(e[i - 2].head, e[i - 1].head, e[i].head) !=
                      Orientation::RightTurn)
      audit_report(ctx, "chain triple is not a strict right turn");
  });
}

// Upper-hull sweep over (x asc, y desc)-sorted points, truncated at the
// first maximum-y vertex (everything right of it has smaller y and larger
// x, hence is dominated). Returns surviving indices.
std::vector<std::size_t> sweep_quarter(const std::vector<Point2>& pts) {
  std::vector<std::size_t> chain;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    rt::tick();
    if (!chain.empty() && pts[chain.back()].x == pts[i].x) continue;
    while (chain.size() >= 2 &&
           orientation(pts[chain[chain.size() - 2]], pts[chain.back()],
                       pts[i]) != Orientation::RightTurn) {
      rt::tick();
      chain.pop_back();
    }
    chain.push_back(i);
  }
  std::size_t apex = 0;
  for (std::size_t j = 1; j < chain.size(); ++j) {
    rt::tick();
    if (pts[chain[j]].y > pts[chain[apex]].y) apex = j;
  }
  if (!chain.empty()) chain.resize(apex + 1);
  return chain;
}

Merged impl(Ctx& ctx, const std::vector<View>& lists);

std::uint64_t total_len(const std::vector<View>& ls, std::size_t lo,
                        std::size_t hi) {
  if (hi - lo <= 64) {
    std::uint64_t s = 0;
    for (std::size_t i = lo; i < hi; ++i) {
      rt::tick();
      s += ls[i].n;
    }
    return s;
  }
  std::size_t mid = lo + (hi - lo) / 2;
  std::uint64_t a = 0, b = 0;
  rt::fork2([&] { a = total_len(ls, lo, mid); },
            [&] { b = total_len(ls, mid, hi); });
  return a + b;
}

Merged copy_list(Ctx& ctx, const View& v) {
  Merged out;
  out.entries.resize(v.n);
  out.vbase = alloc_words(ctx, v.n);
  rt::parallel_for(0, v.n, rt::Grain{4}, [&](std::size_t i) {
    rt::tick();
    touch_at(v.arr, v.vbase + i, rt::AccessKind::Read);
    out.entries[i] = v.p[i];
    touch_at(kArena, out.vbase + i, rt::AccessKind::Write);
  });
  return out;
}

// Base case: the quarter hull of all list heads. Each list's first tail is
// a real point of an earlier range and joins the sweep, so chords reaching
// in from the left eliminate heads the heads alone would keep.
Merged serial_base(Ctx& ctx, const std::vector<View>& lists) {
  std::vector<Point2> pts;
  std::vector<const TailPoint*> src;
  for (const View& v : lists) {
    for (std::size_t i = 0; i < v.n; ++i) {
      rt::tick();
      touch_at(v.arr, v.vbase + i, rt::AccessKind::Read);
      pts.push_back(v.p[i].head);
      src.push_back(&v.p[i]);
    }
    if (v.n && !(v.p[0].tail == v.p[0].head)) {
      pts.push_back(v.p[0].tail);
      src.push_back(nullptr);
    }
  }
  std::vector<std::size_t> ord(pts.size());
  std::iota(ord.begin(), ord.end(), std::size_t{0});
  std::sort(ord.begin(), ord.end(), [&](std::size_t a, std::size_t b) {
    rt::tick();
    return pts[a].x < pts[b].x || (pts[a].x == pts[b].x && pts[a].y > pts[b].y);
  });
  std::vector<Point2> spts(pts.size());
  std::vector<const TailPoint*> ssrc(pts.size());
  for (std::size_t i = 0; i < ord.size(); ++i) {
    rt::tick();
    spts[i] = pts[ord[i]];
    ssrc[i] = src[ord[i]];
  }
  std::vector<std::size_t> chain = sweep_quarter(spts);
  // Context points have strictly smaller x than every head, so they can
  // only survive as a prefix of the chain.
  std::size_t first = 0;
  while (first < chain.size() && ssrc[chain[first]] == nullptr) {
    rt::tick();
    ++first;
  }
  Merged out;
  out.entries.reserve(chain.size() - first);
  for (std::size_t j = first; j < chain.size(); ++j) {
    rt::tick();
    TailPoint e = *ssrc[chain[j]];
    e.tail = j > 0 ? spts[chain[j - 1]] : e.tail;
    out.entries.push_back(e);
  }
  out.vbase = alloc_words(ctx, out.entries.size());
  for (std::size_t j = 0; j < out.entries.size(); ++j)
    touch_at(kArena, out.vbase + j, rt::AccessKind::Write);
  return out;
}

std::size_t ceil_sqrt(std::size_t r) {
  auto s = static_cast<std::size_t>(std::sqrt(static_cast<double>(r)));
  while (s * s < r) ++s;
  while (s > 1 && (s - 1) * (s - 1) >= r) --s;
  return s;
}

// Splits the lists into ceil(sqrt(r)) balanced groups, merges each group
// recursively, then merges the group results.
Merged group_merge(Ctx& ctx, const std::vector<View>& lists) {
  std::size_t r = lists.size();
  std::size_t g = ceil_sqrt(r);
  std::vector<Merged> sub(g);
  std::vector<View> next(g);
  rt::parallel_for(0, g, rt::Grain{1}, [&](std::size_t j) {
    rt::tick();
    std::size_t lo = j * r / g, hi = (j + 1) * r / g;
    if (hi - lo == 1) {
      next[j] = lists[lo];
    } else {
      sub[j] =
          impl(ctx, std::vector<View>(lists.begin() + lo, lists.begin() + hi));
      next[j] = as_view(sub[j]);
    }
  });
  return impl(ctx, next);
}

struct SampleKey {
  double tx = 0, hx = 0, hy = 0;
};

bool key_less(const SampleKey& a, const SampleKey& b) {
  if (a.tx != b.tx) return a.tx < b.tx;
  if (a.hx != b.hx) return a.hx < b.hx;
  return a.hy < b.hy;
}

// Count of sample keys strictly below k across lists [jlo, jhi), skipping
// list `skip`; forked so the reduction has logarithmic span.
std::int64_t count_below(const std::vector<SampleKey>& samp,
                         const std::vector<std::int64_t>& soff,
                         const std::vector<std::int64_t>& scnt,
                         const SampleKey& k, std::size_t skip, std::size_t jlo,
                         std::size_t jhi) {
  if (jhi - jlo <= 1) {
    std::int64_t total = 0;
    for (std::size_t j = jlo; j < jhi; ++j) {
      if (j == skip) continue;
      std::size_t base = static_cast<std::size_t>(soff[j] - scnt[j]);
      std::size_t lo = 0, hi = static_cast<std::size_t>(scnt[j]);
      while (lo < hi) {
        rt::tick();
        std::size_t m = lo + (hi - lo) / 2;
        if (key_less(samp[base + m], k))
          lo = m + 1;
        else
          hi = m;
      }
      total += static_cast<std::int64_t>(lo);
    }
    return total;
  }
  std::size_t mid = jlo + (jhi - jlo) / 2;
  std::int64_t a = 0, b = 0;
  rt::fork2([&] { a = count_below(samp, soff, scnt, k, skip, jlo, mid); },
            [&] { b = count_below(samp, soff, scnt, k, skip, mid, jhi); });
  return a + b;
}

// Seam repair; shared by the parallel phases and the public boundary_fix.
std::size_t seam_fix(std::vector<TailPoint>& L, std::vector<TailPoint>& R,
                     bool cascade) {
  if (L.empty() || R.empty()) return 0;
  TailPoint& w = R.front();
  std::size_t del = 0;
  while (!L.empty()) {
    rt::tick();
    TailPoint& q = L.back();
    bool valid;
    if (q.head == w.head)
      valid = false;  // duplicated straddler copy
    else if (q.tail == q.head)
      valid = true;  // chain origin: no predecessor to turn against
    else
      valid = orientation(q.tail, q.head, w.head) == Orientation::RightTurn;
    if (valid) {
      w.tail = q.head;
      return del;
    }
    w.tail = q.tail;
    L.pop_back();
    ++del;
    if (!cascade) return del;
  }
  return del;
}

// Copies the entries whose head lands in (lo, hi]; a merged subset keeps
// exactly the candidates it is responsible for, straddlers stay with the
// subset owning their head.
std::vector<TailPoint> drop_outside(Ctx& ctx, const View& v, double lo,
                                    double hi, std::int32_t home,
                                    std::uint64_t* vbase) {
  std::vector<std::int64_t> flags(v.n);
  rt::parallel_for(0, v.n, rt::Grain{4}, [&](std::size_t i) {
    rt::tick();
    touch_at(v.arr, v.vbase + i, rt::AccessKind::Read);
    flags[i] = (lo < v.p[i].head.x && v.p[i].head.x <= hi) ? 1 : 0;
  });
  std::vector<std::int64_t> ranks = rt::prefix_sum(flags);
  std::size_t total = v.n ? static_cast<std::size_t>(ranks.back()) : 0;
  std::vector<TailPoint> out(total);
  *vbase = alloc_words(ctx, total);
  rt::parallel_for(0, v.n, rt::Grain{4}, [&](std::size_t i) {
    rt::tick();
    if (!flags[i]) return;
    std::size_t o = static_cast<std::size_t>(ranks[i]) - 1;
    out[o] = v.p[i];
    out[o].home = home;
    touch_at(kArena, *vbase + o, rt::AccessKind::Write);
  });
  return out;
}

// The sampling round: pivots from every 2r-th ranked sample partition the
// x-axis; each subset takes the entries whose active range overlaps its
// interval (so each list adds at most one straddler per edge), merges them
// through the sqrt(r)-grouping, keeps its own heads, and the seams are
// repaired pairwise.
Merged sample_merge(Ctx& ctx, const std::vector<View>& lists) {
  std::size_t r = lists.size();
  std::size_t r2 = r * r;
  ctx.partitions.fetch_add(1, std::memory_order_relaxed);

  std::vector<std::int64_t> scnt(r);
  rt::parallel_for(0, r, rt::Grain{1}, [&](std::size_t i) {
    rt::tick();
    scnt[i] = static_cast<std::int64_t>((lists[i].n + r2 - 1) / r2);
  });
  std::vector<std::int64_t> soff = rt::prefix_sum(scnt);
  std::size_t total = static_cast<std::size_t>(soff.back());

  std::vector<SampleKey> samp(total);
  rt::parallel_for(0, r, rt::Grain{1}, [&](std::size_t i) {
    std::size_t base = static_cast<std::size_t>(soff[i] - scnt[i]);
    rt::parallel_for(0, static_cast<std::size_t>(scnt[i]), rt::Grain{1},
                     [&](std::size_t s) {
                       rt::tick();
                       const TailPoint& e = lists[i].p[s * r2];
                       touch_at(lists[i].arr, lists[i].vbase + s * r2,
                                 rt::AccessKind::Read);
                       samp[base + s] = {e.tail.x, e.head.x, e.head.y};
                     });
  });

  // Rank every sample: in-list index plus strictly-smaller counts in the
  // other lists. The key is (tail.x, head.x, head.y); heads are distinct,
  // so ranks form a permutation.
  std::vector<std::int64_t> rank(total);
  rt::parallel_for(0, r, rt::Grain{1}, [&](std::size_t i) {
    std::size_t base = static_cast<std::size_t>(soff[i] - scnt[i]);
    rt::parallel_for(0, static_cast<std::size_t>(scnt[i]), rt::Grain{1},
                     [&](std::size_t s) {
                       rt::tick();
                       rank[base + s] =
                           static_cast<std::int64_t>(s) +
                           count_below(samp, soff, scnt, samp[base + s], i, 0,
                                       r);
                     });
  });

  std::size_t stride = 2 * r;
  std::size_t np = (total + stride - 1) / stride;
  std::vector<double> piv(np);
  rt::parallel_for(0, total, rt::Grain{4}, [&](std::size_t s) {
    rt::tick();
    auto rk = static_cast<std::size_t>(rank[s]);
    if (rk % stride == 0) piv[rk / stride] = samp[s].tx;
  });

  std::size_t k = np + 1;
  const double ninf = -std::numeric_limits<double>::infinity();
  const double pinf = std::numeric_limits<double>::infinity();
  auto edge_lo = [&](std::size_t i) { return i == 0 ? ninf : piv[i - 1]; };
  auto edge_hi = [&](std::size_t i) { return i + 1 == k ? pinf : piv[i]; };

  // Per (subset, list) contributing run: from the first entry whose head
  // clears the left edge to the last whose range can still reach the
  // interval (tail.x < hi, or head.x <= hi for empty ranges).
  std::vector<std::size_t> from(k * r), to(k * r);
  rt::parallel_for(0, k * r, rt::Grain{1}, [&](std::size_t t) {
    rt::tick();
    std::size_t i = t / r, j = t % r;
    double lo = edge_lo(i), hi = edge_hi(i);
    const View& v = lists[j];
    auto search = [&](auto&& past) {
      std::size_t a = 0, b = v.n;
      while (a < b) {
        rt::tick();
        std::size_t m = a + (b - a) / 2;
        touch_at(v.arr, v.vbase + m, rt::AccessKind::Read);
        if (past(v.p[m]))
          b = m;
        else
          a = m + 1;
      }
      return a;
    };
    std::size_t t1 = 0, t2 = 0;
    rt::fork2(
        [&] {
          from[t] = search([&](const TailPoint& e) { return e.head.x > lo; });
        },
        [&] {
          rt::fork2(
              [&] {
                t1 = search([&](const TailPoint& e) { return e.tail.x >= hi; });
              },
              [&] {
                t2 = search([&](const TailPoint& e) { return e.head.x > hi; });
              });
        });
    to[t] = std::max(t1, t2);
  });

  std::size_t bound = 3 * r * r * r;
  std::atomic<bool> overflow{false};
  std::vector<std::vector<TailPoint>> results(k);
  std::vector<std::uint64_t> rvb(k, 0);
  rt::parallel_for(0, k, rt::Grain{1}, [&](std::size_t i) {
    rt::tick();
    std::vector<View> sv;
    std::size_t ni = 0;
    for (std::size_t j = 0; j < r; ++j) {
      rt::tick();
      std::size_t f = from[i * r + j], e = to[i * r + j];
      if (e > f) {
        const View& v = lists[j];
        sv.push_back({v.p + f, e - f, v.arr, v.vbase + f});
        ni += e - f;
      }
    }
    if (ni > bound) {
      overflow = true;
      return;
    }
    std::size_t seen = ctx.max_subset.load(std::memory_order_relaxed);
    while (ni > seen &&
           !ctx.max_subset.compare_exchange_weak(seen, ni,
                                                 std::memory_order_relaxed)) {
    }
    if (sv.empty()) return;
    double lo = edge_lo(i), hi = edge_hi(i);
    if (sv.size() == 1) {
      results[i] =
          drop_outside(ctx, sv[0], lo, hi, static_cast<std::int32_t>(i),
                       &rvb[i]);
    } else {
      Merged m = group_merge(ctx, sv);
      results[i] =
          drop_outside(ctx, as_view(m), lo, hi, static_cast<std::int32_t>(i),
                       &rvb[i]);
    }
  });
  if (overflow)
    throw std::logic_error("multiway partition: subset exceeds 3 r^3");

  std::vector<std::size_t> idx(k);
  rt::parallel_for(0, k, rt::Grain{4}, [&](std::size_t i) { idx[i] = i; });
  std::vector<std::size_t> alive =
      rt::compact(idx, [&](std::size_t i) { return !results[i].empty(); });

  // Each subset ends at its local apex, but subsets right of the one
  // holding the global apex are dominated outright (larger x, smaller y)
  // and no local merge can see that; truncate before fixing seams.
  if (!alive.empty()) {
    struct Best {
      double y;
      std::size_t t;
    };
    auto best = [&](auto&& self, std::size_t lo, std::size_t hi) -> Best {
      if (hi - lo <= 16) {
        Best b{results[alive[lo]].back().head.y, lo};
        for (std::size_t t = lo + 1; t < hi; ++t) {
          rt::tick();
          double y = results[alive[t]].back().head.y;
          if (y > b.y) b = {y, t};
        }
        return b;
      }
      std::size_t mid = lo + (hi - lo) / 2;
      Best a{}, c{};
      rt::fork2([&] { a = self(self, lo, mid); },
                [&] { c = self(self, mid, hi); });
      return c.y > a.y ? c : a;  // a y-tie keeps the smaller x
    };
    alive.resize(best(best, 0, alive.size()).t + 1);
  }

  if (alive.size() >= 2) {
    std::size_t ns = alive.size() - 1;
    std::atomic<bool> emptied{false};
    auto fix = [&](std::size_t s) {
      std::size_t d = seam_fix(results[alive[s]], results[alive[s + 1]],
                               ctx.cfg->cascade_seams);
      if (d) {
        ctx.seam_deletions.fetch_add(d, std::memory_order_relaxed);
        if (results[alive[s]].empty()) emptied = true;
      }
    };
    rt::parallel_for(0, (ns + 1) / 2, rt::Grain{1}, [&](std::size_t t) {
      rt::tick();
      fix(2 * t);
    });
    rt::parallel_for(0, ns / 2, rt::Grain{1}, [&](std::size_t t) {
      rt::tick();
      fix(2 * t + 1);
    });
    if (emptied.load()) {
      // A seam drained a whole subset, exposing a pair the two phases never
      // looked at; redo the seams serially with cascading checks.
      ctx.seam_cascades.fetch_add(1, std::memory_order_relaxed);
      std::vector<std::size_t> stk;
      for (std::size_t i : alive) {
        rt::tick();
        if (results[i].empty()) continue;
        while (!stk.empty()) {
          std::size_t d = seam_fix(results[stk.back()], results[i], true);
          ctx.seam_deletions.fetch_add(d, std::memory_order_relaxed);
          if (results[stk.back()].empty()) {
            stk.pop_back();
            continue;
          }
          break;
        }
        stk.push_back(i);
      }
    }
  }

  std::vector<std::int64_t> sz(alive.size());
  rt::parallel_for(0, alive.size(), rt::Grain{4}, [&](std::size_t t) {
    rt::tick();
    sz[t] = static_cast<std::int64_t>(results[alive[t]].size());
  });
  std::vector<std::int64_t> off = rt::prefix_sum(sz);
  Merged out;
  out.entries.resize(alive.empty() ? 0 : static_cast<std::size_t>(off.back()));
  out.vbase = alloc_words(ctx, out.entries.size());
  rt::parallel_for(0, alive.size(), rt::Grain{1}, [&](std::size_t t) {
    const std::vector<TailPoint>& v = results[alive[t]];
    std::size_t base = static_cast<std::size_t>(off[t]) - v.size();
    rt::parallel_for(0, v.size(), rt::Grain{4}, [&](std::size_t j) {
      rt::tick();
      out.entries[base + j] = v[j];
      touch_at(kArena, out.vbase + base + j, rt::AccessKind::Write);
    });
  });
  return out;
}

Merged impl(Ctx& ctx, const std::vector<View>& lists) {
  std::size_t r = lists.size();
  std::size_t n = static_cast<std::size_t>(total_len(lists, 0, r));
  Merged out;
  if (r == 1)
    out = copy_list(ctx, lists[0]);
  else if (n <= ctx.cfg->serial_cutoff)
    out = serial_base(ctx, lists);
  else if (r >= 1626 || n <= 3 * r * r * r)
    // r >= 1626 makes 3 r^3 > 1.2e10, beyond any supported n; skipping the
    // product avoids overflow for singleton-level calls with huge r.
    out = group_merge(ctx, lists);
  else
    out = sample_merge(ctx, lists);
  if (ctx.audit_out) validate_chain(ctx, out.entries);
  return out;
}

Point2 rot_cw(Point2 p, int q) {
  for (int t = 0; t < q; ++t) p = {p.y, -p.x};
  return p;
}

Point2 rot_ccw(Point2 p, int q) { return rot_cw(p, (4 - q) % 4); }

}  // namespace

QuarterHull quarter_hull_serial(std::vector<Point2> points) {
  std::sort(points.begin(), points.end(), [](const Point2& a, const Point2& b) {
    rt::tick();
    return a.x < b.x || (a.x == b.x && a.y > b.y);
  });
  std::vector<std::size_t> chain = sweep_quarter(points);
  QuarterHull out;
  out.reserve(chain.size());
  for (std::size_t j = 0; j < chain.size(); ++j) {
    rt::tick();
    out.push_back({points[chain[j]],
                   points[chain[j > 0 ? j - 1 : 0]], 0, -1});
  }
  return out;
}

std::size_t boundary_fix(QuarterHull& left, QuarterHull& right, bool cascade) {
  return seam_fix(left, right, cascade);
}

QuarterHull multiway_merge(const std::vector<QuarterHull>& lists,
                           const MultiwayConfig& cfg) {
  std::size_t r = lists.size();
  if (r == 0) return {};
  long double n = 0;
  for (const QuarterHull& l : lists) n += static_cast<long double>(l.size());
  if (n > 3.0L * std::pow(static_cast<long double>(r), 6.0L))
    throw std::invalid_argument("multiway_merge: total size exceeds 3 r^6");
  Ctx ctx;
  ctx.cfg = &cfg;
  std::vector<std::string> audits;
  if (cfg.audit) ctx.audit_out = &audits;
  std::vector<View> vs;
  for (const QuarterHull& l : lists)
    if (!l.empty()) vs.push_back({l.data(), l.size(), kArena, 0});
  if (vs.empty()) return {};
  Merged m = impl(ctx, vs);
  if (!audits.empty())
    throw std::logic_error("multiway_merge audit: " + audits.front());
  return std::move(m.entries);
}

MultiwayResult full_hull_multiway(const std::vector<Point2>& points,
                                  const MultiwayConfig& cfg,
                                  std::vector<rt::Access>* trace) {
  if (points.empty())
    throw std::invalid_argument("full_hull_multiway: empty input");
  // Remove exact duplicates but keep the original (unsorted) order.
  std::vector<Point2> pts;
  {
    std::vector<std::size_t> ord(points.size());
    std::iota(ord.begin(), ord.end(), std::size_t{0});
    std::sort(ord.begin(), ord.end(), [&](std::size_t a, std::size_t b) {
      return points[a] < points[b] || (points[a] == points[b] && a < b);
    });
    std::vector<char> keep(points.size(), 1);
    for (std::size_t i = 1; i < ord.size(); ++i)
      if (points[ord[i]] == points[ord[i - 1]]) keep[ord[i]] = 0;
    pts.reserve(points.size());
    for (std::size_t i = 0; i < points.size(); ++i)
      if (keep[i]) pts.push_back(points[i]);
  }
  MultiwayResult res;
  Ctx ctx;
  ctx.cfg = &cfg;
  if (cfg.audit) ctx.audit_out = &res.audit_violations;
  ctx.tracing = !rt::parallel_execution();
  std::size_t n = pts.size();
  res.metrics = rt::run_root(
      [&] {
        for (int q = 0; q < 4; ++q) {
          ctx.cursor = 0;
          std::vector<TailPoint> singles(n);
          std::uint64_t base = alloc_words(ctx, n);
          rt::parallel_for(0, n, rt::Grain{4}, [&](std::size_t i) {
            rt::tick();
            touch_at(kInput, i, rt::AccessKind::Read);
            Point2 p = rot_cw(pts[i], q);
            singles[i] = {p, p, 0, -1};
            touch_at(kArena, base + i, rt::AccessKind::Write);
          });
          std::vector<View> vs(n);
          rt::parallel_for(0, n, rt::Grain{4}, [&](std::size_t i) {
            rt::tick();
            vs[i] = {singles.data() + i, 1, kArena, base + i};
          });
          Merged m = impl(ctx, vs);
          // The quadrant chain runs min-x to max-y; the counter-clockwise
          // polygon wants it reversed, quadrant endpoints deduplicated.
          for (std::size_t j = m.entries.size(); j-- > 0;) {
            rt::tick();
            touch_at(kArena, m.vbase + j, rt::AccessKind::Read);
            Point2 p = rot_ccw(m.entries[j].head, q);
            if (!res.hull.empty() && res.hull.back() == p) continue;
            res.hull.push_back(p);
          }
        }
        if (res.hull.size() > 1 && res.hull.front() == res.hull.back())
          res.hull.pop_back();
      },
      trace);
  res.stats.partitions = ctx.partitions.load();
  res.stats.max_subset = ctx.max_subset.load();
  res.stats.seam_deletions = ctx.seam_deletions.load();
  res.stats.seam_cascades = ctx.seam_cascades.load();
  return res;
}

}  // namespace forkhull::mw
