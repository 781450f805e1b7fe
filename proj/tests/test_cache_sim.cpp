#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>

#include "forkhull/cache_sim.hpp"
#include "forkhull/dataset.hpp"

using namespace forkhull;
using namespace forkhull::cache;
using rt::Access;
using rt::AccessKind;

namespace {

std::vector<Access> sequential_scan(std::uint32_t array, std::uint64_t words) {
  std::vector<Access> t;
  for (std::uint64_t w = 0; w < words; ++w)
    t.push_back({array, w, AccessKind::Read});
  return t;
}

std::vector<Access> random_trace(std::uint64_t seed, std::size_t len,
                                 std::uint32_t arrays, std::uint64_t words) {
  SplitMix64 rng(seed);
  std::vector<Access> t;
  t.reserve(len);
  for (std::size_t i = 0; i < len; ++i)
    t.push_back({std::uint32_t(rng.next() % arrays), rng.next() % words,
                 (rng.next() & 1) ? AccessKind::Write : AccessKind::Read});
  return t;
}

}  // namespace

TEST_CASE("config validity") {
  CHECK(CacheConfig{256, 16}.valid());
  CHECK(CacheConfig{256, 16}.tall());
  CHECK_FALSE(CacheConfig{8, 16}.valid());
  CHECK_FALSE(CacheConfig{250, 16}.valid());
  CHECK_FALSE(CacheConfig{64, 16}.tall());
}

TEST_CASE("sequential scan misses once per block") {
  auto trace = sequential_scan(0, 1024);
  auto rep = replay_lru(trace, {256, 16});
  CHECK(rep.accesses == 1024);
  CHECK(rep.misses == 64);
  CHECK(rep.arrays.at(0) == 64);
}

TEST_CASE("working set within capacity misses only on first pass") {
  CacheConfig cfg{256, 16};
  std::vector<Access> trace;
  for (int pass = 0; pass < 5; ++pass)
    for (std::uint64_t w = 0; w < cfg.M; ++w)
      trace.push_back({0, w, AccessKind::Read});
  auto rep = replay_lru(trace, cfg);
  CHECK(rep.misses == cfg.M / cfg.B);
}

TEST_CASE("hand-simulated LRU on a tiny cache") {
  // 2 blocks of 2 words. Blocks: a=0..1, b=2..3, c=4..5.
  CacheConfig cfg{4, 2};
  std::vector<Access> trace{
      {0, 0, AccessKind::Read},  // a miss          [a]
      {0, 1, AccessKind::Read},  // a hit           [a]
      {0, 2, AccessKind::Read},  // b miss          [b a]
      {0, 0, AccessKind::Read},  // a hit           [a b]
      {0, 4, AccessKind::Read},  // c miss, evict b [c a]
      {0, 2, AccessKind::Read},  // b miss, evict a [b c]
      {0, 5, AccessKind::Read},  // c hit           [c b]
      {0, 0, AccessKind::Read},  // a miss, evict b [a c]
  };
  auto rep = replay_lru(trace, cfg);
  CHECK(rep.misses == 5);
  CHECK(rep.accesses == 8);
}

TEST_CASE("distinct arrays never share blocks") {
  CacheConfig cfg{4, 2};
  std::vector<Access> trace{
      {0, 0, AccessKind::Read},
      {1, 0, AccessKind::Read},
      {0, 0, AccessKind::Read},
      {1, 0, AccessKind::Read},
  };
  auto rep = replay_lru(trace, cfg);
  CHECK(rep.misses == 2);
  CHECK(rep.arrays.at(0) == 1);
  CHECK(rep.arrays.at(1) == 1);
}

TEST_CASE("streamed sink agrees with batch replay") {
  auto trace = random_trace(4, 20000, 3, 5000);
  LruCache sink({512, 8});
  for (const Access& a : trace) sink.on_access(a.array, a.word, a.kind);
  auto batch = replay_lru(trace, {512, 8});
  CHECK(sink.report().misses == batch.misses);
  CHECK(sink.report().accesses == batch.accesses);
}

TEST_CASE("replay matches independent reference implementation") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    auto trace = random_trace(seed, 5000, 4, 2000);
    for (CacheConfig cfg : {CacheConfig{64, 8}, CacheConfig{256, 16},
                            CacheConfig{1024, 4}}) {
      auto a = replay_lru(trace, cfg);
      auto b = replay_lru_reference(trace, cfg);
      CHECK(a.misses == b.misses);
      CHECK(a.accesses == b.accesses);
      CHECK(a.arrays == b.arrays);
    }
  }
}

TEST_CASE("misses do not increase with capacity") {
  auto trace = random_trace(77, 30000, 2, 4096);
  std::uint64_t prev = ~std::uint64_t{0};
  for (std::uint64_t M : {64, 128, 256, 512, 1024, 2048}) {
    auto rep = replay_lru(trace, {M, 8});
    CHECK(rep.misses <= prev);
    prev = rep.misses;
  }
}

TEST_CASE("trace files round-trip") {
  auto trace = random_trace(11, 1000, 5, 1 << 20);
  const std::string path = "trace_roundtrip.bin";
  write_trace(path, trace);
  auto back = read_trace(path);
  REQUIRE(back.size() == trace.size());
  for (std::size_t i = 0; i < trace.size(); ++i) {
    CHECK(back[i].array == trace[i].array);
    CHECK(back[i].word == trace[i].word);
    CHECK(back[i].kind == trace[i].kind);
  }
  std::remove(path.c_str());
  CHECK_THROWS(read_trace("does_not_exist.bin"));
}

TEST_CASE("runtime trace feeds the simulator") {
  std::vector<Access> trace;
  rt::run_root(
      [] {
        for (std::uint64_t w = 0; w < 128; ++w)
          rt::touch(0, w, AccessKind::Read);
      },
      &trace);
  auto rep = replay_lru(trace, {64, 16});
  CHECK(rep.misses == 8);
}
