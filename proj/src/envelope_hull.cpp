#include "forkhull/envelope_hull.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

namespace forkhull::env {
namespace {

constexpr double kDegenerate = 1e-12;  // slivers narrower than this are empty
// Value-tie tolerance, relative to the wave magnitudes (the scale of the
// x cos + y sin evaluation, whose rounding error is a few ulp of |x| + |y|
// regardless of how small the result is): wide enough to absorb that error,
// narrow enough that genuinely distinct values never alias even when
// neighbouring envelope arcs are 1e-8 rad apart.
constexpr double kValueTie = 1e-12;

double reduce(double t) {
  t = std::fmod(t, kTau);
  if (t < 0.0) t += kTau;
  if (t >= kTau) t = 0.0;
  return t;
}

double circ_dist(double a, double b) {
  double d = std::fabs(a - b);
  return std::min(d, kTau - d);
}

bool value_tie(const Wave& w1, const Wave& w2, double r1, double r2) {
  double scale = std::fabs(w1.x) + std::fabs(w1.y) + std::fabs(w2.x) +
                 std::fabs(w2.y);
  return std::fabs(r1 - r2) <= kValueTie * (1.0 + scale);
}

}  // namespace

double wave_value(const Wave& w, double theta) {
  return w.x * std::cos(theta) + w.y * std::sin(theta);
}

double wave_slope(const Wave& w, double theta) {
  return -w.x * std::sin(theta) + w.y * std::cos(theta);
}

AngleInterval full_interval() { return {0.0, kTau}; }

bool interval_empty(const AngleInterval& I) {
  return I.start == 0.0 && I.end == 0.0;
}

bool interval_full(const AngleInterval& I) {
  return I.start <= I.end && I.end - I.start >= kTau - 1e-9;
}

bool interval_wraps(const AngleInterval& I) { return I.start > I.end; }

bool interval_contains(const AngleInterval& I, double theta) {
  if (interval_empty(I)) return false;
  if (interval_full(I)) return true;
  if (interval_wraps(I)) return theta >= I.start || theta <= I.end;
  return theta >= I.start && theta <= I.end;
}

double interval_width(const AngleInterval& I) {
  if (interval_empty(I)) return 0.0;
  if (interval_wraps(I)) return I.end + kTau - I.start;
  return I.end - I.start;
}

Wave max_val(const Wave& w1, const Wave& w2, double theta) {
  rt::tick();
  return wave_value(w1, theta) > wave_value(w2, theta) ? w1 : w2;
}

Wave min_val(const Wave& w1, const Wave& w2, double theta) {
  rt::tick();
  return wave_value(w1, theta) < wave_value(w2, theta) ? w1 : w2;
}

Wave max_slope(const Wave& w1, const Wave& w2, double theta) {
  rt::tick();
  return wave_slope(w1, theta) > wave_slope(w2, theta) ? w1 : w2;
}

Wave min_slope(const Wave& w1, const Wave& w2, double theta) {
  rt::tick();
  return wave_slope(w1, theta) < wave_slope(w2, theta) ? w1 : w2;
}

Wave max_to_right(const Wave& w1, const Wave& w2, double theta) {
  rt::tick();
  double r1 = wave_value(w1, theta), r2 = wave_value(w2, theta);
  if (value_tie(w1, w2, r1, r2)) return max_slope(w1, w2, theta);
  return r1 > r2 ? w1 : w2;
}

Wave max_to_left(const Wave& w1, const Wave& w2, double theta) {
  rt::tick();
  double r1 = wave_value(w1, theta), r2 = wave_value(w2, theta);
  if (value_tie(w1, w2, r1, r2)) return min_slope(w1, w2, theta);
  return r1 > r2 ? w1 : w2;
}

AngleInterval intersections(const Wave& w1, const Wave& w2) {
  rt::tick();
  if (w1 == w2) throw std::invalid_argument("identical waves coincide everywhere");
  double num = w1.x - w2.x;
  double den = w2.y - w1.y;
  double theta;
  if (den == 0.0) {
    theta = kTau / 4.0;  // vertical-angle limit
  } else {
    theta = std::atan(num / den);
    if (theta < 0.0) theta += kTau / 2.0;
  }
  return {theta, theta + kTau / 2.0};
}

AngleInterval common_range(const AngleInterval& I1, const AngleInterval& I2) {
  rt::tick();
  if (interval_empty(I1) || interval_empty(I2)) return {0.0, 0.0};
  if (interval_full(I1)) return I2;
  if (interval_full(I2)) return I1;
  if (!interval_wraps(I1) && !interval_wraps(I2)) {
    double s = std::max(I1.start, I2.start);
    double e = std::min(I1.end, I2.end);
    if (e - s < kDegenerate) return {0.0, 0.0};
    return {s, e};
  }
  if (interval_wraps(I1) && !interval_wraps(I2)) return common_range(I2, I1);
  // I2 wraps: shift the frame so I2 starts at zero, intersect, shift back.
  double d = I2.start;
  AngleInterval i2p{0.0, I2.end - d + kTau};
  AngleInterval i1p{reduce(I1.start - d), reduce(I1.end - d)};
  AngleInterval r{0.0, 0.0};
  if (i1p.start <= i1p.end) {
    double s = std::max(0.0, i1p.start);
    double e = std::min(i2p.end, i1p.end);
    if (e - s >= kDegenerate) r = {s, e};
  } else {
    // Shifted I1 still wraps: candidate components [0, i1p.end] and
    // [i1p.start, i2p.end]. Dominance arcs are at most a half-circle, so at
    // most one component has positive width; keep the wider.
    AngleInterval c1{0.0, std::min(i1p.end, i2p.end)};
    AngleInterval c2 = i1p.start < i2p.end ? AngleInterval{i1p.start, i2p.end}
                                           : AngleInterval{0.0, 0.0};
    r = (c1.end - c1.start) >= (c2.end - c2.start) ? c1 : c2;
    if (r.end - r.start < kDegenerate) r = {0.0, 0.0};
  }
  if (interval_empty(r)) return {0.0, 0.0};
  double s2 = reduce(r.start + d);
  double e2 = reduce(r.end + d);
  if (e2 == 0.0) e2 = kTau;
  return {s2, e2};
}

namespace {

// dominating_range working record; next is a wave value so results from
// different group envelopes combine uniformly.
struct DrPart {
  AngleInterval range;
  Wave next{};
  bool has_next = false;
};

DrPart dr_combine(const DrPart& a, const DrPart& b, bool rightward) {
  AngleInterval r = common_range(a.range, b.range);
  if (interval_empty(r)) return {r, {}, false};
  if (!a.has_next) return {r, b.next, b.has_next};
  if (!b.has_next) return {r, a.next, true};
  Wave nx = rightward ? max_to_right(a.next, b.next, r.end)
                      : max_val(a.next, b.next, r.end);
  return {r, nx, true};
}

DrPart dr_rec(const Wave* w, std::size_t lo, std::size_t hi, const Wave& wave) {
  if (hi - lo == 1) {
    rt::tick();
    const Wave& o = w[lo];
    if (o == wave) return {full_interval(), {}, false};  // no self-constraint
    AngleInterval I = intersections(wave, o);
    if (!(max_to_right(wave, o, I.start) == wave)) I = {I.end, I.start};
    return {I, o, true};
  }
  std::size_t mid = lo + (hi - lo) / 2;
  DrPart a, b;
  rt::fork2([&] { a = dr_rec(w, lo, mid, wave); },
            [&] { b = dr_rec(w, mid, hi, wave); });
  return dr_combine(a, b, /*rightward=*/false);
}

// Index of a wave in a (x, y)-sorted index over W.
struct WaveRef {
  Wave w;
  std::size_t idx;
};

bool waveref_less(const WaveRef& a, const WaveRef& b) {
  return a.w.x < b.w.x || (a.w.x == b.w.x && a.w.y < b.w.y);
}

std::vector<WaveRef> sorted_index(const std::vector<Wave>& W) {
  std::vector<WaveRef> ix(W.size());
  rt::parallel_for(0, W.size(), rt::Grain{64}, [&](std::size_t i) {
    rt::tick();
    ix[i] = {W[i], i};
  });
  std::sort(ix.begin(), ix.end(), waveref_less);
  rt::tick(W.size() ? W.size() * std::bit_width(W.size()) : 0);
  return ix;
}

std::size_t lookup(const std::vector<WaveRef>& ix, const Wave& w) {
  rt::tick(ix.empty() ? 1 : std::bit_width(ix.size()));
  auto it = std::lower_bound(ix.begin(), ix.end(), WaveRef{w, 0}, waveref_less);
  if (it == ix.end() || !(it->w == w)) throw std::logic_error("unknown wave");
  return it->idx;
}

// Survivor on top just right of angle zero: the envelope head.
std::size_t head_survivor(const std::vector<Wave>& W,
                          const std::vector<char>& excluded) {
  std::ptrdiff_t h = -1;
  auto scan = [&](auto&& self, std::size_t lo, std::size_t hi) -> std::ptrdiff_t {
    if (hi - lo <= 16) {
      std::ptrdiff_t best = -1;
      for (std::size_t i = lo; i < hi; ++i) {
        rt::tick();
        if (excluded[i]) continue;
        if (best < 0 || max_to_right(W[i], W[best], 0.0) == W[i]) best = i;
      }
      return best;
    }
    std::size_t mid = lo + (hi - lo) / 2;
    std::ptrdiff_t a = -1, b = -1;
    rt::fork2([&] { a = self(self, lo, mid); }, [&] { b = self(self, mid, hi); });
    if (a < 0) return b;
    if (b < 0) return a;
    return max_to_right(W[a], W[b], 0.0) == W[a] ? a : b;
  };
  h = scan(scan, 0, W.size());
  if (h < 0) throw std::logic_error("no surviving wave");
  return static_cast<std::size_t>(h);
}

// Assembles the rank-ordered envelope from per-wave dominating ranges.
Envelope build_envelope(const std::vector<Wave>& W,
                        const std::vector<DrPart>& parts) {
  std::size_t n = W.size();
  std::vector<WaveRef> ix = sorted_index(W);
  std::vector<char> excluded(n);
  rt::parallel_for(0, n, rt::Grain{64}, [&](std::size_t i) {
    rt::tick();
    excluded[i] = interval_empty(parts[i].range) ? 1 : 0;
  });
  std::size_t head = head_survivor(W, excluded);
  // Survivor ranges tile the circle, so the rank successor's start angle is
  // the current range's end. Used to re-resolve next pointers whose
  // tie-break landed on an eliminated wave.
  std::vector<std::pair<double, std::size_t>> starts;
  for (std::size_t i = 0; i < n; ++i) {
    rt::tick();
    if (!excluded[i]) starts.push_back({parts[i].range.start, i});
  }
  std::sort(starts.begin(), starts.end());
  auto nearest_start = [&](double e) {
    e = reduce(e);
    rt::tick(std::bit_width(starts.size()));
    auto it = std::lower_bound(starts.begin(), starts.end(),
                               std::make_pair(e, std::size_t{0}));
    std::size_t best = starts.front().second;
    double bestd = 1e300;
    for (auto cand : {it, it == starts.begin() ? starts.end() - 1 : it - 1,
                      starts.end() - 1, starts.begin()}) {
      if (cand == starts.end()) continue;
      double d = circ_dist(cand->first, e);
      if (d < bestd) {
        bestd = d;
        best = cand->second;
      }
    }
    return best;
  };
  std::vector<std::ptrdiff_t> succ(n, -1);
  rt::parallel_for(0, n, rt::Grain{64}, [&](std::size_t i) {
    rt::tick();
    if (excluded[i]) return;
    std::size_t j = n;
    if (parts[i].has_next) {
      std::size_t cand = lookup(ix, parts[i].next);
      if (!excluded[cand] &&
          circ_dist(parts[cand].range.start, parts[i].range.end) < 1e-6)
        j = cand;
    }
    if (j == n) j = nearest_start(parts[i].range.end);
    succ[i] = j == head ? -1 : static_cast<std::ptrdiff_t>(j);
  });
  std::vector<std::size_t> rank = rt::list_rank(succ, &excluded);
  std::vector<std::int64_t> alive(n);
  rt::parallel_for(0, n, rt::Grain{64}, [&](std::size_t i) {
    rt::tick();
    alive[i] = excluded[i] ? 0 : 1;
  });
  std::vector<std::int64_t> sums = rt::prefix_sum(alive);
  std::size_t m = n ? static_cast<std::size_t>(sums.back()) : 0;
  Envelope E(m);
  rt::parallel_for(0, n, rt::Grain{64}, [&](std::size_t i) {
    rt::tick();
    if (excluded[i]) return;
    std::size_t r = rank[i];
    if (r >= m) throw std::logic_error("envelope rank out of range");
    E[r] = {W[i], parts[i].range, static_cast<std::int64_t>(r),
            static_cast<std::ptrdiff_t>((r + 1) % m)};
  });
  return E;
}

}  // namespace

DominatingRangeResult dominating_range(const std::vector<Wave>& W,
                                       const Wave& wave) {
  if (W.empty()) throw std::invalid_argument("dominating_range needs waves");
  DrPart p = dr_rec(W.data(), 0, W.size(), wave);
  return {p.range, p.next, p.has_next};
}

Envelope envelope_base_case(const std::vector<Wave>& W) {
  std::size_t n = W.size();
  if (n == 0) return {};
  if (n == 1) return {{W[0], full_interval(), 0, 0}};
  std::vector<DrPart> parts(n);
  rt::parallel_for(0, n, rt::Grain{1}, [&](std::size_t i) {
    parts[i] = dr_rec(W.data(), 0, n, W[i]);
  });
  return build_envelope(W, parts);
}

namespace {

// Entry of E whose range owns angle a; entries are in rank order so starts
// ascend from index 1 and the head owns everything past its own start.
std::size_t containing_entry(const Envelope& E, double a) {
  std::size_t m = E.size();
  if (m <= 1) return 0;
  if (interval_wraps(E[0].range) && a >= E[0].range.start) return 0;
  std::size_t lo = 1, hi = m;
  while (lo < hi) {
    rt::tick();
    std::size_t mid = lo + (hi - lo) / 2;
    if (E[mid].range.start <= a)
      lo = mid + 1;
    else
      hi = mid;
  }
  return lo == 1 ? 0 : lo - 1;
}

// Waves of E covering `range`, padded by one entry on each side; a superset
// of the covering section never changes the clipped result.
std::vector<Wave> section_waves(const Envelope& E, const AngleInterval& range) {
  std::size_t m = E.size();
  std::vector<Wave> out;
  if (m == 0) return out;
  if (interval_full(range) || m <= 2) {
    out.reserve(m);
    for (std::size_t i = 0; i < m; ++i) {
      rt::tick();
      out.push_back(E[i].wave);
    }
    return out;
  }
  std::size_t L = containing_entry(E, range.start);
  std::size_t R = containing_entry(E, range.end);
  std::size_t count = (R + m - L) % m + 1;
  if (count + 2 >= m) return section_waves(E, full_interval());
  L = (L + m - 1) % m;
  count += 2;
  out.reserve(count);
  for (std::size_t t = 0; t < count; ++t) {
    rt::tick();
    out.push_back(E[(L + t) % m].wave);
  }
  return out;
}

Envelope ae_impl(const std::vector<Wave>& W, int k) {
  std::size_t n = W.size();
  if (k <= 1 || n <= 8) return envelope_base_case(W);
  std::size_t g = static_cast<std::size_t>(
      std::ceil(std::pow(static_cast<double>(n), 1.0 / k)));
  if (g < 2) return envelope_base_case(W);
  if (g > n) g = n;
  std::vector<std::size_t> bound(g + 1);
  for (std::size_t j = 0; j <= g; ++j) bound[j] = j * n / g;
  std::vector<Envelope> sub(g);
  rt::parallel_for(0, g, rt::Grain{1}, [&](std::size_t j) {
    std::vector<Wave> slice(W.begin() + bound[j], W.begin() + bound[j + 1]);
    sub[j] = ae_impl(slice, k - 1);
  });
  std::vector<std::vector<WaveRef>> subix(g);
  rt::parallel_for(0, g, rt::Grain{1}, [&](std::size_t j) {
    std::vector<WaveRef> ix(sub[j].size());
    for (std::size_t t = 0; t < sub[j].size(); ++t) {
      rt::tick();
      ix[t] = {sub[j][t].wave, t};
    }
    std::sort(ix.begin(), ix.end(), waveref_less);
    rt::tick(ix.empty() ? 1 : ix.size() * std::bit_width(ix.size()));
    subix[j] = std::move(ix);
  });
  std::vector<DrPart> parts(n);
  rt::parallel_for(0, n, rt::Grain{1}, [&](std::size_t i) {
    std::size_t j0 = std::min(i * g / n, g - 1);
    while (i >= bound[j0 + 1]) ++j0;
    while (i < bound[j0]) --j0;
    const Wave& wave = W[i];
    // Own-group verdict: an eliminated wave stays eliminated in the union.
    rt::tick(subix[j0].empty() ? 1 : std::bit_width(subix[j0].size()));
    auto it = std::lower_bound(subix[j0].begin(), subix[j0].end(),
                               WaveRef{wave, 0}, waveref_less);
    if (it == subix[j0].end() || !(it->w == wave)) {
      parts[i] = {{0.0, 0.0}, {}, false};
      return;
    }
    const EnvelopeEntry& own = sub[j0][it->idx];
    auto fold = [&](auto&& self, std::size_t lo, std::size_t hi) -> DrPart {
      if (hi - lo == 1) {
        if (lo == j0) {
          if (sub[j0].size() == 1) return {full_interval(), {}, false};
          return {own.range, sub[j0][own.next].wave, true};
        }
        std::vector<Wave> sect = section_waves(sub[lo], own.range);
        return dr_rec(sect.data(), 0, sect.size(), wave);
      }
      std::size_t mid = lo + (hi - lo) / 2;
      DrPart a, b;
      rt::fork2([&] { a = self(self, lo, mid); },
                [&] { b = self(self, mid, hi); });
      return dr_combine(a, b, /*rightward=*/true);
    };
    parts[i] = fold(fold, 0, g);
  });
  return build_envelope(W, parts);
}

}  // namespace

Envelope angular_elimination(const std::vector<Wave>& W, int k) {
  std::size_t n = W.size();
  if (n == 0) return {};
  int kmax = std::max<int>(1, std::bit_width(n) - 1);
  if (k < 1 || k > kmax)
    throw std::invalid_argument("k outside [1, log2 n]");
  return ae_impl(W, k);
}

namespace {

// Linearized envelope: pieces sorted by start angle covering [0, 2pi], the
// first piece starting at exactly 0. A wave active across the wrap appears
// as both the last and the first piece.
struct Piece {
  double start = 0.0;
  Wave wave{};
  bool at_cut = false;  // start is a chunk boundary, not a computed crossing
};

std::size_t piece_containing(const std::vector<Piece>& E, double a) {
  std::size_t lo = 0, hi = E.size();
  while (hi - lo > 1) {
    rt::tick();
    std::size_t mid = lo + (hi - lo) / 2;
    if (E[mid].start <= a)
      lo = mid;
    else
      hi = mid;
  }
  return lo;
}

// Pointwise max of two envelopes restricted to [lo, hi).
std::vector<Piece> merge_window(const std::vector<Piece>& A,
                                const std::vector<Piece>& B, double lo,
                                double hi) {
  std::vector<Piece> out;
  if (hi - lo < 1e-15) return out;
  std::size_t ia = piece_containing(A, lo);
  std::size_t ib = piece_containing(B, lo);
  auto emit = [&](double s, const Wave& w, bool cut) {
    if (!out.empty() && out.back().wave == w) return;
    out.push_back({s, w, cut});
  };
  double cur = lo;
  bool atcut = true;
  while (cur < hi - 1e-15) {
    rt::tick();
    double a_end = ia + 1 < A.size() ? A[ia + 1].start : kTau;
    double b_end = ib + 1 < B.size() ? B[ib + 1].start : kTau;
    double evt = std::min({a_end, b_end, hi});
    const Wave& aw = A[ia].wave;
    const Wave& bw = B[ib].wave;
    Wave top = max_to_right(aw, bw, cur);
    AngleInterval X = intersections(aw, bw);
    double next_switch = std::numeric_limits<double>::infinity();
    for (double c : {X.start, X.end}) {
      if (c > cur + 1e-12 && c < evt - 1e-12 && c < next_switch &&
          !(max_to_right(aw, bw, c) == top))
        next_switch = c;
    }
    emit(cur, top, atcut);
    atcut = false;
    if (next_switch < evt) {
      cur = next_switch;
      continue;
    }
    cur = evt;
    if (a_end <= cur + 1e-15 && ia + 1 < A.size()) ++ia;
    if (b_end <= cur + 1e-15 && ib + 1 < B.size()) ++ib;
  }
  return out;
}

std::vector<Piece> merge_envelopes(const std::vector<Piece>& A,
                                   const std::vector<Piece>& B) {
  std::size_t m = A.size() + B.size();
  std::size_t stride = std::max<std::size_t>(1, std::bit_width(m));
  auto sample_starts = [&](const std::vector<Piece>& E) {
    std::vector<double> s;
    for (std::size_t i = 0; i < E.size(); i += stride) {
      rt::tick();
      s.push_back(E[i].start);
    }
    return s;
  };
  std::vector<double> cuts = rt::parallel_merge(
      sample_starts(A), sample_starts(B), std::less<double>{});
  std::size_t T = cuts.size();
  std::vector<std::vector<Piece>> outs(T);
  rt::parallel_for(0, T, rt::Grain{1}, [&](std::size_t t) {
    double lo = cuts[t];
    double hi = t + 1 < T ? cuts[t + 1] : kTau;
    outs[t] = merge_window(A, B, lo, hi);
  });
  std::vector<std::int64_t> sizes(T);
  rt::parallel_for(0, T, rt::Grain{64}, [&](std::size_t t) {
    rt::tick();
    sizes[t] = static_cast<std::int64_t>(outs[t].size());
  });
  std::vector<std::int64_t> offs = rt::prefix_sum(sizes);
  std::size_t total = T ? static_cast<std::size_t>(offs.back()) : 0;
  std::vector<Piece> cat(total);
  rt::parallel_for(0, T, rt::Grain{1}, [&](std::size_t t) {
    std::size_t base = static_cast<std::size_t>(offs[t]) - outs[t].size();
    for (std::size_t u = 0; u < outs[t].size(); ++u) {
      rt::tick();
      cat[base + u] = outs[t][u];
    }
  });
  // Coalesce equal waves across chunk boundaries.
  std::vector<std::int64_t> keep(cat.size());
  rt::parallel_for(0, cat.size(), rt::Grain{64}, [&](std::size_t i) {
    rt::tick();
    keep[i] = (i == 0 || !(cat[i].wave == cat[i - 1].wave)) ? 1 : 0;
  });
  std::vector<std::int64_t> ranks = rt::prefix_sum(keep);
  std::size_t kept = cat.empty() ? 0 : static_cast<std::size_t>(ranks.back());
  std::vector<Piece> R(kept);
  rt::parallel_for(0, cat.size(), rt::Grain{64}, [&](std::size_t i) {
    rt::tick();
    if (keep[i]) R[static_cast<std::size_t>(ranks[i]) - 1] = cat[i];
  });
  // Chunk-boundary starts are sample angles; snap them to the true crossing
  // of the two neighboring waves.
  rt::parallel_for(1, R.size(), rt::Grain{64}, [&](std::size_t i) {
    rt::tick();
    if (!R[i].at_cut) return;
    AngleInterval X = intersections(R[i - 1].wave, R[i].wave);
    double best = R[i].start;
    double bestd = 1e-6;
    for (double c : {X.start, X.end}) {
      double d = std::fabs(c - R[i].start);
      if (d < bestd) {
        bestd = d;
        best = c;
      }
    }
    R[i].start = best;
  });
  return R;
}

std::vector<Piece> dc_rec(const Wave* w, std::size_t lo, std::size_t hi) {
  if (hi - lo == 1) {
    rt::tick();
    return {{0.0, w[lo], true}};
  }
  std::size_t mid = lo + (hi - lo) / 2;
  std::vector<Piece> a, b;
  rt::fork2([&] { a = dc_rec(w, lo, mid); }, [&] { b = dc_rec(w, mid, hi); });
  return merge_envelopes(a, b);
}

// Walks the linearized envelope and keeps the stretches above the x-axis.
PositiveCurveForm pcf_from_pieces(const std::vector<Piece>& segs) {
  PositiveCurveForm items;
  bool in_gap = true;
  const Wave* last_active = nullptr;
  auto push = [&](double angle, CurveItemKind kind, const Wave& w) {
    if (!items.empty() && angle - items.back().angle <= 1e-12)
      items.pop_back();  // instantaneous item
    items.push_back({angle, kind, w});
  };
  for (std::size_t i = 0; i < segs.size(); ++i) {
    rt::tick();
    double s = segs[i].start;
    double e = i + 1 < segs.size() ? segs[i + 1].start : kTau;
    if (e - s <= 1e-12) continue;
    const Wave& w = segs[i].wave;
    if (w == Wave{}) continue;  // zero wave never rises above the axis
    // Boundaries of the positive half-period falling inside (s, e).
    double phi = std::atan2(w.y, w.x);
    std::vector<double> ev{s};
    for (double b : {reduce(phi - kTau / 4.0), reduce(phi + kTau / 4.0)})
      if (b > s + 1e-12 && b < e - 1e-12) ev.push_back(b);
    std::sort(ev.begin(), ev.end());
    ev.push_back(e);
    for (std::size_t t = 0; t + 1 < ev.size(); ++t) {
      double midpt = (ev[t] + ev[t + 1]) / 2.0;
      bool pos = wave_value(w, midpt) > 0.0;
      if (pos && (in_gap || !(last_active && *last_active == w)))
        push(ev[t], CurveItemKind::Wave, w);
      if (!pos && !in_gap) push(ev[t], CurveItemKind::Gap, {});
      in_gap = !pos;
      if (pos) last_active = &w;
    }
  }
  items.push_back({kTau, CurveItemKind::End, {}});
  return items;
}

std::vector<Piece> pieces_from_envelope(const Envelope& E) {
  std::vector<Piece> segs;
  if (E.empty()) return segs;
  if (E.size() == 1) return {{0.0, E[0].wave, false}};
  const EnvelopeEntry& head = E[0];
  segs.push_back({0.0, head.wave, false});
  for (std::size_t i = 1; i < E.size(); ++i) {
    rt::tick();
    segs.push_back({E[i].range.start, E[i].wave, false});
  }
  if (interval_wraps(head.range))
    segs.push_back({head.range.start, head.wave, false});  // split wave
  return segs;
}

}  // namespace

PositiveCurveForm dc_parallel_merge_envelope(const std::vector<Wave>& W) {
  if (W.empty()) return {{kTau, CurveItemKind::End, {}}};
  return pcf_from_pieces(dc_rec(W.data(), 0, W.size()));
}

PositiveCurveForm to_positive_curve_form(const Envelope& E) {
  return pcf_from_pieces(pieces_from_envelope(E));
}

std::string envelope_csv(const Envelope& E) {
  std::string out = "rank,x,y,range_start,range_end\n";
  char buf[192];
  for (const EnvelopeEntry& e : E) {
    std::snprintf(buf, sizeof buf, "%lld,%.17g,%.17g,%.17g,%.17g\n",
                  static_cast<long long>(e.rank), e.wave.x, e.wave.y,
                  e.range.start, e.range.end);
    out += buf;
  }
  return out;
}

EnvelopeHullResult hull_via_envelope(const std::vector<Point2>& points,
                                     HullMethod method, int k) {
  if (points.empty()) throw std::invalid_argument("empty input");
  std::vector<Point2> pts = dedup_sorted(points);
  EnvelopeHullResult res;
  if (pts.size() == 1) {
    res.hull = {pts[0]};
    return res;
  }
  double xmin = pts.front().x, xmax = pts.back().x;
  double ymin = pts[0].y, ymax = pts[0].y;
  for (const Point2& p : pts) {
    ymin = std::min(ymin, p.y);
    ymax = std::max(ymax, p.y);
  }
  double cx = (xmin + xmax) / 2.0, cy = (ymin + ymax) / 2.0;
  std::vector<Wave> W;
  W.reserve(pts.size());
  for (const Point2& p : pts) {
    Wave w{p.x - cx, p.y - cy};
    // The box midpoint itself is never a hull vertex and would be the
    // reserved zero wave.
    if (!(w == Wave{})) W.push_back(w);
  }
  std::vector<Wave> order;
  res.metrics = rt::run_root([&] {
    if (method == HullMethod::angular) {
      int kmax = std::max<int>(1, std::bit_width(W.size()) - 1);
      int kk = std::min(std::max(k, 1), kmax);
      Envelope E = ae_impl(W, kk);
      order.reserve(E.size());
      for (const EnvelopeEntry& e : E) {
        rt::tick();
        order.push_back(e.wave);
      }
    } else {
      std::vector<Piece> segs = dc_rec(W.data(), 0, W.size());
      for (std::size_t i = 0; i < segs.size(); ++i) {
        rt::tick();
        if (i + 1 == segs.size() && segs[i].wave == segs[0].wave)
          break;  // split wave across the wrap
        if (!order.empty() && order.back() == segs[i].wave) continue;
        order.push_back(segs[i].wave);
      }
    }
  });
  res.hull.reserve(order.size());
  for (const Wave& w : order) res.hull.push_back({w.x + cx, w.y + cy});
  return res;
}

}  // namespace forkhull::env
