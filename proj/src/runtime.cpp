#include "forkhull/runtime.hpp"

#include <algorithm>
#include <cstdlib>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace forkhull::rt {

namespace detail {

thread_local Ctx* g_ctx = nullptr;
bool g_parallel = false;
TraceSink* g_sink = nullptr;

void spawn_pair(const std::function<void()>& left,
                const std::function<void()>& right) {
#ifdef _OPENMP
#pragma omp task default(shared)
  left();
  right();
#pragma omp taskwait
#else
  left();
  right();
#endif
}

namespace {

// Chunked scan: serial sweep per chunk, recursive scan of chunk totals,
// then a parallel offset pass. Theta(n) work, Theta(log n) span.
void scan_rec(std::vector<std::int64_t>& v) {
  const std::size_t n = v.size();
  const std::size_t chunk = 8;
  if (n <= chunk) {
    for (std::size_t i = 1; i < n; ++i) {
      tick();
      v[i] += v[i - 1];
    }
    return;
  }
  const std::size_t nchunks = (n + chunk - 1) / chunk;
  std::vector<std::int64_t> totals(nchunks);
  parallel_for(0, nchunks, Grain{1}, [&](std::size_t c) {
    std::size_t lo = c * chunk, hi = std::min(n, lo + chunk);
    for (std::size_t i = lo + 1; i < hi; ++i) {
      tick();
      v[i] += v[i - 1];
    }
    totals[c] = v[hi - 1];
  });
  scan_rec(totals);
  parallel_for(1, nchunks, Grain{1}, [&](std::size_t c) {
    std::size_t lo = c * chunk, hi = std::min(n, lo + chunk);
    std::int64_t off = totals[c - 1];
    for (std::size_t i = lo; i < hi; ++i) {
      tick();
      v[i] += off;
    }
  });
}

}  // namespace

}  // namespace detail

std::vector<std::int64_t> prefix_sum(const std::vector<std::int64_t>& values) {
  std::vector<std::int64_t> out = values;
  detail::scan_rec(out);
  return out;
}

std::vector<std::size_t> list_rank(const std::vector<std::ptrdiff_t>& succ,
                                   const std::vector<char>* excluded) {
  const std::size_t n = succ.size();
  std::vector<std::size_t> rank(n, 0);
  if (n == 0) return rank;
  // Invert links; the compare-and-set cells detect merging chains.
  std::vector<CompareAndSetCell> pred(n);
  std::vector<char> skip(n, 0);
  if (excluded) {
    for (std::size_t i = 0; i < n; ++i) skip[i] = (*excluded)[i];
  }
  parallel_for(0, n, Grain{64}, [&](std::size_t i) {
    tick();
    if (skip[i]) {
      rank[i] = n;
      return;
    }
    std::ptrdiff_t s = succ[i];
    if (s < 0) return;
    if (s >= static_cast<std::ptrdiff_t>(n) || skip[s])
      throw std::logic_error("list_rank: successor out of structure");
    if (!pred[s].compare_and_set(-1, static_cast<std::ptrdiff_t>(i)))
      throw std::logic_error("list_rank: two predecessors share a node");
  });
  std::vector<std::ptrdiff_t> jump(n);
  std::vector<std::uint64_t> dist(n);
  parallel_for(0, n, Grain{64}, [&](std::size_t i) {
    tick();
    jump[i] = skip[i] ? -1 : pred[i].load();
    dist[i] = jump[i] >= 0 ? 1 : 0;
  });
  std::size_t rounds = 1;
  while ((std::size_t{1} << rounds) < n + 1) ++rounds;
  std::vector<std::ptrdiff_t> jump2(n);
  std::vector<std::uint64_t> dist2(n);
  for (std::size_t r = 0; r <= rounds; ++r) {
    parallel_for(0, n, Grain{64}, [&](std::size_t i) {
      tick();
      std::ptrdiff_t j = jump[i];
      if (j >= 0) {
        dist2[i] = dist[i] + dist[j];
        jump2[i] = jump[j];
      } else {
        dist2[i] = dist[i];
        jump2[i] = -1;
      }
    });
    jump.swap(jump2);
    dist.swap(dist2);
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (jump[i] >= 0) throw std::logic_error("list_rank: cycle detected");
    if (!skip[i]) rank[i] = static_cast<std::size_t>(dist[i]);
  }
  return rank;
}

TaskMetrics run_root(const std::function<void()>& f,
                     std::vector<Access>* trace) {
  if (trace && detail::g_parallel)
    throw std::logic_error("trace capture requires serial execution");
  detail::Ctx root;
  root.trace = trace;
  detail::Ctx* saved = detail::g_ctx;
  if (detail::g_parallel) {
#ifdef _OPENMP
    omp_set_num_threads(worker_count());
#pragma omp parallel
#pragma omp single
    {
      detail::g_ctx = &root;
      f();
      detail::g_ctx = nullptr;
    }
#else
    detail::g_ctx = &root;
    f();
#endif
  } else {
    detail::g_ctx = &root;
    f();
  }
  detail::g_ctx = saved;
  TaskMetrics m;
  m.work = root.work;
  m.span = root.span;
  m.forks = root.forks;
  m.steals = 0;
  // A real work-stealing executor gives no migration callbacks here.
  m.steals_available = !detail::g_parallel;
  return m;
}

void set_parallel_execution(bool enabled) {
#ifdef _OPENMP
  detail::g_parallel = enabled && worker_count() > 1;
#else
  (void)enabled;
  detail::g_parallel = false;
#endif
}

bool parallel_execution() { return detail::g_parallel; }

void set_trace_sink(TraceSink* sink) {
  if (sink && detail::g_parallel)
    throw std::logic_error("trace sink requires serial execution");
  detail::g_sink = sink;
}

int worker_count() {
  if (const char* env = std::getenv("FORKHULL_THREADS")) {
    int v = std::atoi(env);
    if (v >= 1) return v;
  }
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace forkhull::rt
