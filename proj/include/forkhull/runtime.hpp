#pragma once

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <utility>
#include <vector>

namespace forkhull::rt {

enum class AccessKind : std::uint8_t { Read = 0, Write = 1 };

struct Access {
  std::uint32_t array;
  std::uint64_t word;
  AccessKind kind;
};

struct TaskMetrics {
  std::uint64_t work = 0;
  std::uint64_t span = 0;
  std::uint64_t forks = 0;
  std::uint64_t steals = 0;
  // False when executing on a real work-stealing executor without
  // task-migration callbacks; steals is then meaningless.
  bool steals_available = true;
};

struct Grain {
  std::size_t threshold = 64;
};

// Streaming consumer for element touches; only usable in serial execution,
// where record order is exactly the serial projection.
class TraceSink {
 public:
  virtual ~TraceSink() = default;
  virtual void on_access(std::uint32_t array, std::uint64_t word,
                         AccessKind kind) = 0;
};

namespace detail {

struct Ctx {
  std::uint64_t work = 0;
  std::uint64_t span = 0;
  std::uint64_t forks = 0;
  std::vector<Access>* trace = nullptr;
};

extern thread_local Ctx* g_ctx;
extern bool g_parallel;
extern TraceSink* g_sink;

void spawn_pair(const std::function<void()>& left,
                const std::function<void()>& right);

}  // namespace detail

// Adds n unit operations (serial work adds equally to work and span).
inline void tick(std::uint64_t n = 1) {
  detail::Ctx* c = detail::g_ctx;
  if (c) {
    c->work += n;
    c->span += n;
  }
}

// Records one element-touch; algorithms pass the element's byte offset in
// its array so cache replays with (M, B) in bytes see real footprints.
inline void touch(std::uint32_t array, std::uint64_t word, AccessKind kind) {
  detail::Ctx* c = detail::g_ctx;
  if (!c) return;
  if (c->trace) c->trace->push_back({array, word, kind});
  if (detail::g_sink) detail::g_sink->on_access(array, word, kind);
}

inline bool metrics_active() { return detail::g_ctx != nullptr; }

template <class F, class G>
void fork2(F&& f, G&& g) {
  detail::Ctx* parent = detail::g_ctx;
  if (!parent) {
    f();
    g();
    return;
  }
  detail::Ctx lc, rc;
  lc.trace = parent->trace;
  rc.trace = parent->trace;
  if (detail::g_parallel) {
    // Tracing into a shared buffer is only deterministic serially.
    lc.trace = rc.trace = nullptr;
    detail::spawn_pair(
        [&] {
          detail::Ctx* saved = detail::g_ctx;
          detail::g_ctx = &lc;
          f();
          detail::g_ctx = saved;
        },
        [&] {
          detail::Ctx* saved = detail::g_ctx;
          detail::g_ctx = &rc;
          g();
          detail::g_ctx = saved;
        });
  } else {
    detail::g_ctx = &lc;
    f();
    detail::g_ctx = &rc;
    g();
    detail::g_ctx = parent;
  }
  parent->forks += lc.forks + rc.forks + 1;
  parent->work += lc.work + rc.work + 2;
  parent->span += (lc.span > rc.span ? lc.span : rc.span) + 2;
}

template <class Body>
void parallel_for(std::size_t lo, std::size_t hi, Grain grain, Body&& body) {
  if (lo >= hi) return;
  if (hi - lo <= grain.threshold) {
    for (std::size_t i = lo; i < hi; ++i) body(i);
    return;
  }
  std::size_t mid = lo + (hi - lo) / 2;
  fork2([&] { parallel_for(lo, mid, grain, body); },
        [&] { parallel_for(mid, hi, grain, body); });
}

// Inclusive running sums via up-sweep/down-sweep, Theta(n) work and
// Theta(log n) span.
std::vector<std::int64_t> prefix_sum(const std::vector<std::int64_t>& values);

// Position of each element from the head of its chain (head rank 0).
// succ[i] < 0 means no successor. Elements with excluded[i] != 0 are kept
// out of the chains and reported with rank n. Cycles raise logic_error.
std::vector<std::size_t> list_rank(const std::vector<std::ptrdiff_t>& succ,
                                   const std::vector<char>* excluded = nullptr);

// The one atomic primitive the model allows, reserved for list ranking.
class CompareAndSetCell {
 public:
  explicit CompareAndSetCell(std::ptrdiff_t empty = -1) : v_(empty) {}
  bool compare_and_set(std::ptrdiff_t expected, std::ptrdiff_t desired) {
    return v_.compare_exchange_strong(expected, desired);
  }
  std::ptrdiff_t load() const { return v_.load(); }

 private:
  std::atomic<std::ptrdiff_t> v_;
};

template <class T, class Keep>
std::vector<T> compact(const std::vector<T>& items, Keep&& keep) {
  std::vector<std::int64_t> flags(items.size());
  parallel_for(0, items.size(), Grain{64}, [&](std::size_t i) {
    tick();
    flags[i] = keep(items[i]) ? 1 : 0;
  });
  std::vector<std::int64_t> ranks = prefix_sum(flags);
  std::size_t total = items.empty() ? 0 : static_cast<std::size_t>(ranks.back());
  std::vector<T> out(total);
  parallel_for(0, items.size(), Grain{64}, [&](std::size_t i) {
    tick();
    if (flags[i]) out[static_cast<std::size_t>(ranks[i]) - 1] = items[i];
  });
  return out;
}

namespace detail {

template <class T, class Less>
void merge_rec(const std::vector<T>& A, std::size_t alo, std::size_t ahi,
               const std::vector<T>& B, std::size_t blo, std::size_t bhi,
               std::vector<T>& out, std::size_t olo, const Less& less) {
  std::size_t an = ahi - alo, bn = bhi - blo;
  if (an + bn <= 64) {
    std::size_t i = alo, j = blo, k = olo;
    while (i < ahi && j < bhi) {
      tick();
      if (less(B[j], A[i]))
        out[k++] = B[j++];
      else
        out[k++] = A[i++];
    }
    while (i < ahi) {
      tick();
      out[k++] = A[i++];
    }
    while (j < bhi) {
      tick();
      out[k++] = B[j++];
    }
    return;
  }
  if (an >= bn) {
    std::size_t amid = alo + an / 2;
    std::size_t bmid = blo;
    {
      // lower_bound of A[amid] in B keeps the merge stable.
      std::size_t lo = blo, hi = bhi;
      while (lo < hi) {
        tick();
        std::size_t m = lo + (hi - lo) / 2;
        if (less(B[m], A[amid]))
          lo = m + 1;
        else
          hi = m;
      }
      bmid = lo;
    }
    std::size_t omid = olo + (amid - alo) + (bmid - blo);
    fork2([&] { merge_rec(A, alo, amid, B, blo, bmid, out, olo, less); },
          [&] { merge_rec(A, amid, ahi, B, bmid, bhi, out, omid, less); });
  } else {
    std::size_t bmid = blo + bn / 2;
    std::size_t amid = alo;
    {
      // upper_bound of B[bmid] in A: equal A-elements stay left of it.
      std::size_t lo = alo, hi = ahi;
      while (lo < hi) {
        tick();
        std::size_t m = lo + (hi - lo) / 2;
        if (less(B[bmid], A[m]))
          hi = m;
        else
          lo = m + 1;
      }
      amid = lo;
    }
    std::size_t omid = olo + (amid - alo) + (bmid - blo);
    fork2([&] { merge_rec(A, alo, amid, B, blo, bmid, out, olo, less); },
          [&] { merge_rec(A, amid, ahi, B, bmid, bhi, out, omid, less); });
  }
}

}  // namespace detail

// Stable parallel merge: equal keys keep A-elements first.
template <class T, class Less>
std::vector<T> parallel_merge(const std::vector<T>& A, const std::vector<T>& B,
                              Less&& less) {
#ifndef NDEBUG
  for (std::size_t i = 1; i < A.size(); ++i)
    if (less(A[i], A[i - 1])) throw std::invalid_argument("A not sorted");
  for (std::size_t i = 1; i < B.size(); ++i)
    if (less(B[i], B[i - 1])) throw std::invalid_argument("B not sorted");
#endif
  std::vector<T> out(A.size() + B.size());
  detail::merge_rec(A, 0, A.size(), B, 0, B.size(), out, 0, less);
  return out;
}

// Runs f as the root task and returns its metrics. If trace is non-null the
// run must be serial and every touch is appended in serial-projection order.
TaskMetrics run_root(const std::function<void()>& f,
                     std::vector<Access>* trace = nullptr);

// Enables OpenMP task execution inside fork2 (wall-clock benchmarking).
// Counters stay deterministic; traces and sinks are unavailable.
void set_parallel_execution(bool enabled);
bool parallel_execution();

// Streaming sink used by cache experiments; serial execution only.
void set_trace_sink(TraceSink* sink);

int worker_count();

}  // namespace forkhull::rt
