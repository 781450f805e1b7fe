#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numeric>

#include "forkhull/dataset.hpp"
#include "forkhull/runtime.hpp"

using namespace forkhull;
using namespace forkhull::rt;

TEST_CASE("fork2 of noops adds constants") {
  TaskMetrics m = run_root([] { fork2([] {}, [] {}); });
  CHECK(m.forks == 1);
  CHECK(m.work == 2);
  CHECK(m.span == 2);
  CHECK(m.span <= m.work);
}

TEST_CASE("balanced fork tree span grows by an additive constant") {
  auto span_of = [](std::size_t n) {
    TaskMetrics m = run_root([&] {
      parallel_for(0, n, Grain{1}, [](std::size_t) { tick(); });
    });
    return m.span;
  };
  std::uint64_t prev_inc = 0;
  for (std::size_t e = 10; e + 1 <= 20; ++e) {
    std::uint64_t inc = span_of(std::size_t{1} << (e + 1)) -
                        span_of(std::size_t{1} << e);
    if (prev_inc) CHECK(inc == prev_inc);
    prev_inc = inc;
  }
}

TEST_CASE("fork tree work counter is near n") {
  const std::size_t n = 1 << 14;
  TaskMetrics m = run_root([&] {
    parallel_for(0, n, Grain{1}, [](std::size_t) { tick(); });
  });
  CHECK(m.work >= n);
  CHECK(m.work <= 3 * n);
}

TEST_CASE("parallel_for fork counts") {
  std::size_t calls = 0;
  TaskMetrics m = run_root([&] {
    parallel_for(0, 1, Grain{64}, [&](std::size_t) { calls++; });
  });
  CHECK(calls == 1);
  CHECK(m.forks == 0);

  m = run_root([&] {
    parallel_for(0, std::size_t{1} << 16, Grain{64}, [](std::size_t) {});
  });
  CHECK(m.forks == 1023);

  std::size_t n = 1 << 10;
  m = run_root([&] {
    parallel_for(0, n, Grain{1}, [](std::size_t) {});
  });
  CHECK(m.forks == n - 1);
}

TEST_CASE("parallel_for span bound with grain 1") {
  // pinned: span <= c*log2(n) + c with c = 4 for pure fork trees
  const double c = 4.0;
  for (std::size_t e = 4; e <= 16; e += 3) {
    std::size_t n = std::size_t{1} << e;
    TaskMetrics m = run_root([&] {
      parallel_for(0, n, Grain{1}, [](std::size_t) {});
    });
    CHECK(double(m.span) <= c * double(e) + c);
  }
}

TEST_CASE("prefix sum basics and serial oracle") {
  CHECK(prefix_sum({1, 1, 1}) == std::vector<std::int64_t>{1, 2, 3});
  CHECK(prefix_sum({}) == std::vector<std::int64_t>{});
  SplitMix64 rng(3);
  std::vector<std::int64_t> v(100000);
  for (auto& x : v) x = rng.range(-50, 50);
  std::vector<std::int64_t> expect(v.size());
  std::partial_sum(v.begin(), v.end(), expect.begin());
  std::vector<std::int64_t> got;
  run_root([&] { got = prefix_sum(v); });
  CHECK(got == expect);
}

TEST_CASE("prefix sum span is logarithmic") {
  auto span_of = [](std::size_t n) {
    std::vector<std::int64_t> v(n, 1);
    TaskMetrics m = run_root([&] { prefix_sum(v); });
    return m.span;
  };
  CHECK(span_of(1 << 18) <= span_of(1 << 12) + 200);
}

TEST_CASE("compact") {
  std::vector<int> v(1000);
  std::iota(v.begin(), v.end(), 0);
  auto all = compact(v, [](int) { return true; });
  CHECK(all == v);
  auto none = compact(v, [](int) { return false; });
  CHECK(none.empty());
  SplitMix64 rng(5);
  std::vector<char> mask(v.size());
  for (auto& b : mask) b = rng.next() & 1;
  auto got = compact(v, [&](int x) { return mask[x] != 0; });
  std::vector<int> expect;
  for (int x : v)
    if (mask[x]) expect.push_back(x);
  CHECK(got == expect);
}

TEST_CASE("parallel merge agrees with serial merge and is stable") {
  auto less = [](const std::pair<int, int>& a, const std::pair<int, int>& b) {
    return a.first < b.first;
  };
  using P = std::pair<int, int>;
  std::vector<P> A{{1, 0}, {3, 0}}, B{{2, 1}, {4, 1}};
  auto m = parallel_merge(A, B, less);
  CHECK(m == std::vector<P>{{1, 0}, {2, 1}, {3, 0}, {4, 1}});
  CHECK(parallel_merge(A, {}, less) == A);

  SplitMix64 rng(9);
  for (int t = 0; t < 20; ++t) {
    std::vector<P> X, Y;
    for (int i = 0; i < 500; ++i) X.push_back({int(rng.range(0, 99)), 0});
    for (int i = 0; i < 700; ++i) Y.push_back({int(rng.range(0, 99)), 1});
    std::stable_sort(X.begin(), X.end(), less);
    std::stable_sort(Y.begin(), Y.end(), less);
    std::vector<P> expect;
    std::merge(X.begin(), X.end(), Y.begin(), Y.end(),
               std::back_inserter(expect),
               [&](const P& a, const P& b) { return a.first < b.first; });
    std::vector<P> got;
    run_root([&] { got = parallel_merge(X, Y, less); });
    CHECK(got == expect);
    // stability: within equal keys, A (tag 0) precedes B (tag 1)
    for (std::size_t i = 1; i < got.size(); ++i)
      if (got[i - 1].first == got[i].first)
        CHECK(got[i - 1].second <= got[i].second);
  }
}

TEST_CASE("list rank basics") {
  // chain 0 -> 1 -> 2
  std::vector<std::ptrdiff_t> succ{1, 2, -1};
  auto r = list_rank(succ);
  CHECK(r == std::vector<std::size_t>{0, 1, 2});

  std::vector<std::ptrdiff_t> singles{-1, -1, -1};
  CHECK(list_rank(singles) == std::vector<std::size_t>{0, 0, 0});
}

TEST_CASE("list rank excluded elements keep rank n") {
  std::vector<std::ptrdiff_t> succ{1, -1, -1};
  std::vector<char> excl{0, 0, 1};
  auto r = list_rank(succ, &excl);
  CHECK(r == std::vector<std::size_t>{0, 1, 3});
}

TEST_CASE("list rank random chain matches serial traversal") {
  const std::size_t n = 10000;
  SplitMix64 rng(13);
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  for (std::size_t i = n; i > 1; --i)
    std::swap(perm[i - 1], perm[rng.next() % i]);
  std::vector<std::ptrdiff_t> succ(n, -1);
  for (std::size_t i = 0; i + 1 < n; ++i)
    succ[perm[i]] = static_cast<std::ptrdiff_t>(perm[i + 1]);
  std::vector<std::size_t> got;
  run_root([&] { got = list_rank(succ); });
  for (std::size_t i = 0; i < n; ++i) CHECK(got[perm[i]] == i);
}

TEST_CASE("list rank detects cycles") {
  std::vector<std::ptrdiff_t> succ{1, 0};
  CHECK_THROWS_AS(list_rank(succ), std::logic_error);
}

TEST_CASE("work and span counters are deterministic and serial-consistent") {
  std::vector<std::int64_t> v(4096);
  SplitMix64 rng(21);
  for (auto& x : v) x = rng.range(0, 9);
  auto runit = [&] {
    return run_root([&] {
      auto s = prefix_sum(v);
      compact(s, [](std::int64_t x) { return (x & 1) == 0; });
    });
  };
  TaskMetrics a = runit();
  TaskMetrics b = runit();
  CHECK(a.work == b.work);
  CHECK(a.span == b.span);
  CHECK(a.forks == b.forks);
  CHECK(a.span <= a.work);

  set_parallel_execution(true);
  TaskMetrics c = runit();
  set_parallel_execution(false);
  CHECK(c.work == a.work);
  CHECK(c.span == a.span);
  CHECK(c.forks == a.forks);
}

TEST_CASE("trace capture follows serial projection order") {
  std::vector<Access> t1, t2;
  auto program = [] {
    touch(0, 0, AccessKind::Read);
    fork2([] { touch(1, 1, AccessKind::Write); },
          [] {
            fork2([] { touch(2, 2, AccessKind::Read); },
                  [] { touch(3, 3, AccessKind::Read); });
          });
    touch(4, 4, AccessKind::Read);
  };
  run_root(program, &t1);
  run_root(program, &t2);
  REQUIRE(t1.size() == 5);
  for (std::size_t i = 0; i < 5; ++i) {
    CHECK(t1[i].array == i);
    CHECK(t2[i].array == i);
  }
}
