#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <bit>

#include "forkhull/dataset.hpp"
#include "forkhull/geom.hpp"

using namespace forkhull;

namespace {

std::vector<Point2> random_int_points(std::size_t n, std::uint64_t seed,
                                      std::int64_t lo, std::int64_t hi) {
  SplitMix64 rng(seed);
  std::vector<Point2> pts(n);
  for (auto& p : pts)
    p = {static_cast<double>(rng.range(lo, hi)),
         static_cast<double>(rng.range(lo, hi))};
  return pts;
}

bool cyclically_equal(const std::vector<Point2>& a,
                      const std::vector<Point2>& b) {
  if (a.size() != b.size()) return false;
  if (a.empty()) return true;
  for (std::size_t off = 0; off < b.size(); ++off) {
    bool ok = true;
    for (std::size_t i = 0; i < a.size() && ok; ++i)
      ok = a[i] == b[(i + off) % b.size()];
    if (ok) return true;
  }
  return false;
}

}  // namespace

TEST_CASE("orientation basics") {
  CHECK(orientation({0, 0}, {1, 0}, {2, 0}) == Orientation::Collinear);
  CHECK(orientation({0, 0}, {1, 0}, {1, 1}) == Orientation::LeftTurn);
  CHECK(orientation({0, 0}, {1, 0}, {1, -1}) == Orientation::RightTurn);
}

TEST_CASE("orientation matches big-integer oracle on random triples") {
  SplitMix64 rng(42);
  for (int t = 0; t < 1000; ++t) {
    auto pt = [&] {
      return Point2{static_cast<double>(rng.range(-33554432, 33554432)),
                    static_cast<double>(rng.range(-33554432, 33554432))};
    };
    Point2 p = pt(), q = pt(), r = pt();
    CHECK(orientation(p, q, r) == orientation_bigint(p, q, r));
  }
}

TEST_CASE("orientation antisymmetry") {
  SplitMix64 rng(7);
  for (int t = 0; t < 200; ++t) {
    auto pt = [&] {
      return Point2{static_cast<double>(rng.range(-1000, 1000)),
                    static_cast<double>(rng.range(-1000, 1000))};
    };
    Point2 p = pt(), q = pt(), r = pt();
    Orientation a = orientation(p, q, r);
    Orientation b = orientation(p, r, q);
    if (a == Orientation::Collinear) {
      CHECK(b == Orientation::Collinear);
    } else {
      CHECK(a != b);
      CHECK(b != Orientation::Collinear);
    }
  }
}

TEST_CASE("upper hull small cases") {
  CHECK(upper_hull_serial({{0, 0}, {1, 1}, {2, 0}}) ==
        HullChain{{0, 0}, {1, 1}, {2, 0}});
  CHECK(upper_hull_serial({{0, 0}, {1, -1}, {2, 0}}) ==
        HullChain{{0, 0}, {2, 0}});
  CHECK(upper_hull_serial({{5, 5}}) == HullChain{{5, 5}});
  CHECK_THROWS(upper_hull_serial({{1, 0}, {0, 0}}));
}

TEST_CASE("brute force upper hull small cases") {
  CHECK(brute_force_upper_hull({{3, 4}}) == HullChain{{3, 4}});
  CHECK(brute_force_upper_hull({{0, 0}, {1, 1}, {2, 0}}) ==
        HullChain{{0, 0}, {1, 1}, {2, 0}});
  CHECK(brute_force_upper_hull({{0, 0}, {1, 0}, {2, 0}}) ==
        HullChain{{0, 0}, {2, 0}});
}

TEST_CASE("upper hull equals brute force, exhaustive small grids") {
  // all point sets of size <= 4 over a 3x3 grid
  std::vector<Point2> grid;
  for (int x = 0; x < 3; ++x)
    for (int y = 0; y < 3; ++y) grid.push_back({double(x), double(y)});
  const std::size_t g = grid.size();
  for (std::size_t mask = 1; mask < (std::size_t{1} << g); ++mask) {
    if (std::popcount(mask) > 4) continue;
    std::vector<Point2> pts;
    for (std::size_t i = 0; i < g; ++i)
      if (mask & (std::size_t{1} << i)) pts.push_back(grid[i]);
    std::sort(pts.begin(), pts.end());
    CHECK(upper_hull_serial(pts) == brute_force_upper_hull(pts));
  }
}

TEST_CASE("upper hull equals brute force, randomized") {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    auto pts = random_int_points(256, seed + 100, -500, 500);
    pts = dedup_sorted(std::move(pts));
    CHECK(upper_hull_serial(pts) == brute_force_upper_hull(pts));
  }
}

TEST_CASE("tangent brute force examples") {
  HullChain A{{0, 0}, {1, 1}, {2, 0}};
  HullChain B{{3, 0}, {4, 1}, {5, 0}};
  auto [a, b] = upper_common_tangent_bruteforce(A, B);
  CHECK(A[a] == Point2{1, 1});
  CHECK(B[b] == Point2{4, 1});

  HullChain A1{{0, 0}}, B1{{1, 0}};
  auto [a1, b1] = upper_common_tangent_bruteforce(A1, B1);
  CHECK(a1 == 0);
  CHECK(b1 == 0);

  CHECK_THROWS(upper_common_tangent_bruteforce(B, A));
}

TEST_CASE("tangent merges random disjoint hulls") {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    auto left = random_int_points(60, seed * 3 + 1, -1000, -10);
    auto right = random_int_points(60, seed * 3 + 2, 10, 1000);
    HullChain A = brute_force_upper_hull(left);
    HullChain B = brute_force_upper_hull(right);
    auto [a, b] = upper_common_tangent_bruteforce(A, B);
    for (const Point2& p : A)
      CHECK(orientation(A[a], B[b], p) != Orientation::LeftTurn);
    for (const Point2& p : B)
      CHECK(orientation(A[a], B[b], p) != Orientation::LeftTurn);
    // merged hull is prefix of A up to a, then suffix of B from b
    std::vector<Point2> unions;
    unions.insert(unions.end(), left.begin(), left.end());
    unions.insert(unions.end(), right.begin(), right.end());
    HullChain merged = brute_force_upper_hull(unions);
    HullChain expect(A.begin(), A.begin() + a + 1);
    expect.insert(expect.end(), B.begin() + b, B.end());
    CHECK(merged == expect);
  }
}

TEST_CASE("full hull examples") {
  auto square = full_hull({{0, 0}, {1, 0}, {0, 1}, {1, 1}});
  CHECK(square.size() == 4);
  auto seg = full_hull({{0, 0}, {1, 1}, {2, 2}, {3, 3}});
  CHECK(seg == std::vector<Point2>{{0, 0}, {3, 3}});
  auto single = full_hull({{2, 2}, {2, 2}});
  CHECK(single == std::vector<Point2>{{2, 2}});
}

TEST_CASE("full hull is counter-clockwise with positive area") {
  auto pts = random_int_points(128, 5, -1000, 1000);
  auto hull = full_hull(pts);
  REQUIRE(hull.size() >= 3);
  double area2 = 0;
  for (std::size_t i = 0; i < hull.size(); ++i) {
    const Point2& p = hull[i];
    const Point2& q = hull[(i + 1) % hull.size()];
    area2 += p.x * q.y - q.x * p.y;
  }
  CHECK(area2 > 0);
}

TEST_CASE("full hull equals brute force oracle") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto pts = random_int_points(512, seed + 77, -2000, 2000);
    CHECK(full_hull(pts) == brute_force_full_hull(pts));
  }
}

TEST_CASE("full hull invariant under permutation") {
  auto pts = random_int_points(100, 9, -300, 300);
  auto h1 = full_hull(pts);
  SplitMix64 rng(11);
  for (int t = 0; t < 5; ++t) {
    for (std::size_t i = pts.size(); i > 1; --i)
      std::swap(pts[i - 1], pts[rng.next() % i]);
    CHECK(cyclically_equal(full_hull(pts), h1));
  }
}

TEST_CASE("dataset kinds have expected hull structure") {
  auto coll = generate({DatasetKind::collinear, 100, 3});
  CHECK(brute_force_full_hull(coll).size() == 2);
  auto circ = generate({DatasetKind::on_circle, 64, 5});
  CHECK(brute_force_full_hull(circ).size() == 64);
  auto a = generate({DatasetKind::uniform_disk, 4096, 7});
  auto b = generate({DatasetKind::uniform_disk, 4096, 7});
  CHECK(a == b);
  auto ps = generate({DatasetKind::presorted_uniform, 500, 1});
  CHECK(std::is_sorted(ps.begin(), ps.end()));
}
