#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "forkhull/cache_sim.hpp"
#include "forkhull/dataset.hpp"
#include "forkhull/divider_hull.hpp"
#include "forkhull/envelope_hull.hpp"
#include "forkhull/geom.hpp"
#include "forkhull/multiway_hull.hpp"
#include "forkhull/runtime.hpp"

namespace {

using namespace forkhull;

constexpr int kExitUsage = 2;
constexpr int kExitVerify = 3;
constexpr int kExitAudit = 4;
constexpr char kCsvHeader[] = "algo,n,h,work,span,forks,steals,M,B,misses,wall_ns";

enum class Algo { serial, presorted, multiway, angular, envelope_dc };

struct AlgoChoice {
  Algo algo = Algo::serial;
  int k = 2;
  std::string id;  // serialized form, "angular:k" for the angular family
};

// Accepts "angular:3" as well as --algo angular --k 3.
AlgoChoice parse_algo(const std::string& name, int k) {
  AlgoChoice c;
  c.k = k;
  std::string base = name;
  if (auto pos = name.find(':'); pos != std::string::npos) {
    base = name.substr(0, pos);
    c.k = std::atoi(name.c_str() + pos + 1);
  }
  if (base == "serial")
    c.algo = Algo::serial;
  else if (base == "presorted")
    c.algo = Algo::presorted;
  else if (base == "multiway")
    c.algo = Algo::multiway;
  else if (base == "angular")
    c.algo = Algo::angular;
  else if (base == "envelope_dc")
    c.algo = Algo::envelope_dc;
  else
    throw CLI::ValidationError("--algo", "unknown algorithm '" + name + "'");
  if (c.algo == Algo::angular && c.k < 1)
    throw CLI::ValidationError("--k", "k must be >= 1");
  c.id = c.algo == Algo::angular
             ? "angular:" + std::to_string(c.k)
             : base;
  return c;
}

bool upper_chain_algo(Algo a) {
  return a == Algo::serial || a == Algo::presorted;
}

bool traced_algo(Algo a) {
  return a == Algo::presorted || a == Algo::multiway;
}

bool metrics_enabled() {
  const char* env = std::getenv("FORKHULL_METRICS");
  return env == nullptr || std::string(env) != "0";
}

struct DatasetArgs {
  std::string kind_name;
  std::size_t n = 0;
  std::uint64_t seed = 0;
  std::string in_path;
};

void add_dataset_options(CLI::App* cmd, DatasetArgs& d, bool with_in) {
  cmd->add_option("--kind", d.kind_name,
                  "dataset kind: uniform_disk|on_circle|parabola|collinear|"
                  "clustered|presorted_uniform");
  cmd->add_option("--n", d.n, "point count");
  cmd->add_option("--seed", d.seed, "generator seed");
  if (with_in) cmd->add_option("--in", d.in_path, "read points from file");
}

std::vector<Point2> load_points(const DatasetArgs& d) {
  if (!d.in_path.empty()) {
    auto pts = read_points(d.in_path);
    if (pts.empty()) throw CLI::ValidationError("--in", "empty input");
    return pts;
  }
  if (d.kind_name.empty() || d.n == 0)
    throw CLI::ValidationError("dataset", "need --kind and --n >= 1 (or --in)");
  DatasetKind kind;
  if (!parse_dataset_kind(d.kind_name, kind))
    throw CLI::ValidationError("--kind", "unknown kind '" + d.kind_name + "'");
  return generate({kind, d.n, d.seed});
}

bool sorted_distinct(const std::vector<Point2>& pts) {
  for (std::size_t i = 1; i < pts.size(); ++i)
    if (!(pts[i - 1] < pts[i])) return false;
  return true;
}

// Sorted-input algorithms demand the (x, y) tie rule; --sort applies it.
std::vector<Point2> prepare_input(std::vector<Point2> pts, Algo algo,
                                  bool sort_flag) {
  if (sort_flag) pts = dedup_sorted(std::move(pts));
  if (pts.empty()) throw CLI::ValidationError("input", "empty after dedup");
  if (upper_chain_algo(algo) && !sorted_distinct(pts))
    throw CLI::ValidationError(
        "input", "not sorted distinct by (x, y); pass --sort");
  return pts;
}

struct RunOut {
  std::vector<Point2> hull;
  rt::TaskMetrics metrics;
  std::vector<std::string> violations;
  bool upper = false;
};

RunOut execute(const AlgoChoice& c, const std::vector<Point2>& pts, bool audit,
               std::vector<rt::Access>* trace) {
  RunOut out;
  switch (c.algo) {
    case Algo::serial:
      out.upper = true;
      out.metrics = rt::run_root([&] { out.hull = upper_hull_serial(pts); });
      break;
    case Algo::presorted: {
      out.upper = true;
      dh::DividerHullConfig cfg;
      cfg.audit = audit;
      auto r = dh::presorted_upper_hull(pts, cfg, trace);
      out.hull = std::move(r.hull);
      out.metrics = r.metrics;
      for (const auto& v : r.audit_violations)
        out.violations.push_back("invariant " + std::to_string(v.invariant) +
                                 ": " + v.detail);
      break;
    }
    case Algo::multiway: {
      mw::MultiwayConfig cfg;
      cfg.audit = audit;
      auto r = mw::full_hull_multiway(pts, cfg, trace);
      out.hull = std::move(r.hull);
      out.metrics = r.metrics;
      out.violations = std::move(r.audit_violations);
      break;
    }
    case Algo::angular: {
      auto r = env::hull_via_envelope(pts, env::HullMethod::angular, c.k);
      out.hull = std::move(r.hull);
      out.metrics = r.metrics;
      break;
    }
    case Algo::envelope_dc: {
      auto r = env::hull_via_envelope(pts, env::HullMethod::dc_merge);
      out.hull = std::move(r.hull);
      out.metrics = r.metrics;
      break;
    }
  }
  if (!metrics_enabled()) out.metrics = {};
  return out;
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

void print_diff(const std::vector<Point2>& got,
                const std::vector<Point2>& expected) {
  std::fprintf(stderr, "verification failed: hull size %zu, expected %zu\n",
               got.size(), expected.size());
  std::size_t shown = 0;
  std::size_t m = std::max(got.size(), expected.size());
  for (std::size_t i = 0; i < m && shown < 8; ++i) {
    bool have_g = i < got.size(), have_e = i < expected.size();
    if (have_g && have_e && got[i] == expected[i]) continue;
    std::fprintf(stderr, "  [%zu] got %s expected %s\n", i,
                 have_g ? ("(" + std::to_string(got[i].x) + ", " +
                           std::to_string(got[i].y) + ")")
                              .c_str()
                        : "<none>",
                 have_e ? ("(" + std::to_string(expected[i].x) + ", " +
                           std::to_string(expected[i].y) + ")")
                              .c_str()
                        : "<none>");
    ++shown;
  }
}

// Brute force up to n = 8192 (O(n^3) oracle), serial monotone chain beyond.
bool verify_run(const RunOut& out, const std::vector<Point2>& pts) {
  if (out.upper) {
    auto exp = pts.size() <= 8192 ? brute_force_upper_hull(pts)
                                  : upper_hull_serial(pts);
    if (out.hull == exp) return true;
    print_diff(out.hull, exp);
    return false;
  }
  auto exp =
      pts.size() <= 8192 ? brute_force_full_hull(pts) : full_hull(pts);
  if (cyclically_equal(out.hull, exp)) return true;
  print_diff(out.hull, exp);
  return false;
}

struct Row {
  std::string algo;
  std::size_t n = 0;
  std::size_t h = 0;
  rt::TaskMetrics m;
  std::uint64_t M = 0, B = 0, misses = 0;
  std::uint64_t wall_ns = 0;
};

std::string csv_row(const Row& r) {
  std::string s = r.algo + "," + std::to_string(r.n) + "," +
                  std::to_string(r.h) + "," + std::to_string(r.m.work) + "," +
                  std::to_string(r.m.span) + "," + std::to_string(r.m.forks) +
                  ",";
  s += r.m.steals_available ? std::to_string(r.m.steals) : "unavailable";
  s += "," + std::to_string(r.M) + "," + std::to_string(r.B) + "," +
       std::to_string(r.misses) + "," + std::to_string(r.wall_ns);
  return s;
}

void emit_rows(const std::string& path, const std::string& header,
               const std::vector<std::string>& rows) {
  if (path.empty()) {
    std::cout << header << "\n";
    for (const auto& r : rows) std::cout << r << "\n";
    return;
  }
  bool need_header = true;
  {
    std::ifstream probe(path);
    need_header = !probe.good() || probe.peek() == std::ifstream::traits_type::eof();
  }
  std::ofstream out(path, std::ios::app);
  if (!out) throw CLI::ValidationError("--csv", "cannot open " + path);
  if (need_header) out << header << "\n";
  for (const auto& r : rows) out << r << "\n";
}

std::vector<cache::CacheConfig> parse_replay(
    const std::vector<std::uint64_t>& vals) {
  if (vals.size() % 2 != 0)
    throw CLI::ValidationError("--replay", "expects M B pairs");
  std::vector<cache::CacheConfig> grid;
  for (std::size_t i = 0; i < vals.size(); i += 2) {
    cache::CacheConfig cfg{vals[i], vals[i + 1]};
    if (!cfg.valid())
      throw CLI::ValidationError("--replay",
                                 "invalid cache config (need B >= 1, M a "
                                 "multiple of B)");
    grid.push_back(cfg);
  }
  return grid;
}

std::uint64_t replay_misses(const AlgoChoice& c,
                            const std::vector<Point2>& pts, bool audit,
                            cache::CacheConfig cfg) {
  cache::LruCache lru(cfg);
  rt::set_trace_sink(&lru);
  try {
    execute(c, pts, audit, nullptr);
  } catch (...) {
    rt::set_trace_sink(nullptr);
    throw;
  }
  rt::set_trace_sink(nullptr);
  return lru.report().misses;
}

std::uint64_t now_wall_ns(std::chrono::steady_clock::time_point t0) {
  return static_cast<std::uint64_t>(
      std::chrono::duration_cast<std::chrono::nanoseconds>(
          std::chrono::steady_clock::now() - t0)
          .count());
}

int cmd_generate(const DatasetArgs& d, const std::string& out_path) {
  auto pts = load_points(d);
  if (out_path.empty()) {
    for (const auto& p : pts)
      std::printf("%.17g %.17g\n", p.x, p.y);
  } else {
    write_points(out_path, pts);
  }
  return 0;
}

struct RunArgs {
  DatasetArgs dataset;
  std::string algo_name;
  int k = 2;
  bool sort = false;
  bool audit = false;
  bool verify = false;
  bool parallel = false;
  std::string trace_out;
  std::vector<std::uint64_t> replay;
  std::string csv_path;
  std::string out_path;
};

int cmd_run(const RunArgs& a, bool force_verify, bool emit_csv) {
  AlgoChoice choice = parse_algo(a.algo_name, a.k);
  auto grid = parse_replay(a.replay);
  if ((!grid.empty() || !a.trace_out.empty()) && !traced_algo(choice.algo))
    throw CLI::ValidationError(
        "--replay", "trace replay is available for presorted and multiway");
  if (a.parallel && (!grid.empty() || !a.trace_out.empty()))
    throw CLI::ValidationError("--parallel",
                               "traces require serial execution");
  auto pts = prepare_input(load_points(a.dataset), choice.algo, a.sort);

  std::vector<rt::Access> trace;
  std::vector<rt::Access>* trace_ptr =
      a.trace_out.empty() ? nullptr : &trace;
  rt::set_parallel_execution(a.parallel);
  auto t0 = std::chrono::steady_clock::now();
  RunOut out = execute(choice, pts, a.audit, trace_ptr);
  std::uint64_t wall = now_wall_ns(t0);
  rt::set_parallel_execution(false);

  if (!a.trace_out.empty()) cache::write_trace(a.trace_out, trace);
  if (!a.out_path.empty()) write_points(a.out_path, out.hull);

  if (!out.violations.empty()) {
    for (const auto& v : out.violations)
      std::fprintf(stderr, "audit: %s\n", v.c_str());
    return kExitAudit;
  }
  if ((a.verify || force_verify) && !verify_run(out, pts)) return kExitVerify;

  if (emit_csv) {
    std::vector<std::string> rows;
    if (grid.empty()) {
      rows.push_back(csv_row(
          {choice.id, pts.size(), out.hull.size(), out.metrics, 0, 0, 0, wall}));
    } else {
      for (const auto& cfg : grid) {
        std::uint64_t misses = replay_misses(choice, pts, a.audit, cfg);
        rows.push_back(csv_row({choice.id, pts.size(), out.hull.size(),
                                out.metrics, cfg.M, cfg.B, misses, wall}));
      }
    }
    emit_rows(a.csv_path, kCsvHeader, rows);
  } else if (force_verify) {
    std::printf("ok %s n=%zu h=%zu\n", choice.id.c_str(), pts.size(),
                out.hull.size());
  }
  return 0;
}

struct ScalingArgs {
  std::string algo_name;
  int k = 2;
  std::string kind_name;
  std::vector<std::size_t> ns;
  std::uint64_t seed = 0;
  bool sort = false;
  bool audit = false;
  std::vector<std::uint64_t> replay;
  std::string csv_path;
};

int cmd_scaling(const ScalingArgs& a) {
  AlgoChoice choice = parse_algo(a.algo_name, a.k);
  auto grid = parse_replay(a.replay);
  if (!grid.empty() && !traced_algo(choice.algo))
    throw CLI::ValidationError(
        "--replay", "trace replay is available for presorted and multiway");
  DatasetKind kind;
  if (!parse_dataset_kind(a.kind_name, kind))
    throw CLI::ValidationError("--kind", "unknown kind '" + a.kind_name + "'");
  if (a.ns.empty()) throw CLI::ValidationError("--n", "need at least one n");
  for (std::size_t i = 1; i < a.ns.size(); ++i)
    if (a.ns[i] <= a.ns[i - 1])
      throw CLI::ValidationError("--n", "n list must be ascending");

  std::string header = std::string(kCsvHeader) +
                       ",work_per_n,span_delta,misses_per_nB,misses_per_nB_logM";
  std::vector<std::string> rows;
  std::uint64_t span_prev = 0;
  bool have_prev = false;
  for (std::size_t n : a.ns) {
    auto pts = prepare_input(generate({kind, n, a.seed}), choice.algo,
                             a.sort || upper_chain_algo(choice.algo));
    auto t0 = std::chrono::steady_clock::now();
    RunOut out = execute(choice, pts, a.audit, nullptr);
    std::uint64_t wall = now_wall_ns(t0);
    if (!out.violations.empty()) {
      for (const auto& v : out.violations)
        std::fprintf(stderr, "audit: %s\n", v.c_str());
      return kExitAudit;
    }
    double dn = static_cast<double>(pts.size());
    std::uint64_t sd = have_prev ? out.metrics.span - span_prev : 0;
    span_prev = out.metrics.span;
    have_prev = true;
    auto derived = [&](const Row& r, cache::CacheConfig* cfg) {
      char buf[128];
      double per_nb = cfg ? static_cast<double>(r.misses) /
                                (dn / static_cast<double>(cfg->B))
                          : 0.0;
      double log_m = cfg && cfg->M > 1 ? std::log(dn) / std::log(double(cfg->M))
                                       : 0.0;
      std::snprintf(buf, sizeof buf, ",%.6g,%llu,%.6g,%.6g",
                    static_cast<double>(r.m.work) / dn,
                    static_cast<unsigned long long>(sd), per_nb,
                    log_m > 0 ? per_nb / log_m : 0.0);
      return csv_row(r) + buf;
    };
    if (grid.empty()) {
      rows.push_back(derived(
          {choice.id, pts.size(), out.hull.size(), out.metrics, 0, 0, 0, wall},
          nullptr));
    } else {
      for (auto cfg : grid) {
        std::uint64_t misses = replay_misses(choice, pts, a.audit, cfg);
        rows.push_back(derived({choice.id, pts.size(), out.hull.size(),
                                out.metrics, cfg.M, cfg.B, misses, wall},
                               &cfg));
      }
    }
  }
  emit_rows(a.csv_path, header, rows);
  return 0;
}

struct BenchArgs {
  DatasetArgs dataset;
  std::string algo_name;
  int k = 2;
  bool sort = false;
  int reps = 3;
};

// Wall-clock comparison: serial reference implementation vs the parallel
// algorithm under serial projection and under OpenMP task execution.
int cmd_bench(const BenchArgs& a) {
  AlgoChoice choice = parse_algo(a.algo_name, a.k);
  auto pts = prepare_input(load_points(a.dataset), choice.algo, a.sort);
  auto best_of = [&](auto&& fn) {
    std::uint64_t best = ~0ULL;
    for (int r = 0; r < a.reps; ++r) {
      auto t0 = std::chrono::steady_clock::now();
      fn();
      best = std::min(best, now_wall_ns(t0));
    }
    return best;
  };
  std::uint64_t ref_ns = best_of([&] {
    if (upper_chain_algo(choice.algo)) {
      volatile std::size_t sink = upper_hull_serial(pts).size();
      (void)sink;
    } else {
      volatile std::size_t sink = full_hull(pts).size();
      (void)sink;
    }
  });
  rt::set_parallel_execution(false);
  std::uint64_t serial_ns =
      best_of([&] { execute(choice, pts, false, nullptr); });
  rt::set_parallel_execution(true);
  std::uint64_t par_ns = best_of([&] { execute(choice, pts, false, nullptr); });
  rt::set_parallel_execution(false);
  std::printf("algo=%s n=%zu threads=%d\n", choice.id.c_str(), pts.size(),
              rt::worker_count());
  std::printf("reference_serial_ns=%llu\n",
              static_cast<unsigned long long>(ref_ns));
  std::printf("algorithm_serial_ns=%llu\n",
              static_cast<unsigned long long>(serial_ns));
  std::printf("algorithm_parallel_ns=%llu speedup=%.2f\n",
              static_cast<unsigned long long>(par_ns),
              par_ns ? static_cast<double>(serial_ns) /
                           static_cast<double>(par_ns)
                     : 0.0);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"convex hull benchmark harness"};
  app.require_subcommand(1);

  DatasetArgs gen_dataset;
  std::string gen_out;
  auto* gen = app.add_subcommand("generate", "emit a deterministic point set");
  add_dataset_options(gen, gen_dataset, false);
  gen->add_option("--out", gen_out, "points file (default stdout)");

  RunArgs run_args;
  auto* run = app.add_subcommand("run", "run one algorithm on one dataset");
  add_dataset_options(run, run_args.dataset, true);
  run->add_option("--algo", run_args.algo_name,
                  "serial|presorted|multiway|angular[:k]|envelope_dc")
      ->required();
  run->add_option("--k", run_args.k, "angular depth parameter");
  run->add_flag("--sort", run_args.sort, "sort + dedup input first");
  run->add_flag("--audit", run_args.audit, "per-layer invariant checks");
  run->add_flag("--verify", run_args.verify, "compare against the oracle");
  run->add_flag("--parallel", run_args.parallel, "OpenMP task execution");
  run->add_option("--trace-out", run_args.trace_out, "binary trace file");
  run->add_option("--replay", run_args.replay,
                  "M B cache-config pairs for LRU replay");
  run->add_option("--csv", run_args.csv_path, "append metrics rows here");
  run->add_option("--out", run_args.out_path, "hull output file");

  ScalingArgs sc;
  auto* scal = app.add_subcommand("scaling", "CSV report over an n grid");
  scal->add_option("--algo", sc.algo_name, "algorithm id")->required();
  scal->add_option("--k", sc.k, "angular depth parameter");
  scal->add_option("--kind", sc.kind_name, "dataset kind")->required();
  scal->add_option("--n", sc.ns, "ascending n list")->required();
  scal->add_option("--seed", sc.seed, "generator seed");
  scal->add_flag("--sort", sc.sort, "sort + dedup input first");
  scal->add_flag("--audit", sc.audit, "per-layer invariant checks");
  scal->add_option("--replay", sc.replay, "M B cache-config pairs");
  scal->add_option("--csv", sc.csv_path, "write report here");

  RunArgs ver_args;
  auto* ver = app.add_subcommand("verify", "run + oracle comparison");
  add_dataset_options(ver, ver_args.dataset, true);
  ver->add_option("--algo", ver_args.algo_name, "algorithm id")->required();
  ver->add_option("--k", ver_args.k, "angular depth parameter");
  ver->add_flag("--sort", ver_args.sort, "sort + dedup input first");
  ver->add_flag("--audit", ver_args.audit, "per-layer invariant checks");

  BenchArgs bench_args;
  auto* ben = app.add_subcommand("bench", "serial reference vs OpenMP timing");
  add_dataset_options(ben, bench_args.dataset, true);
  ben->add_option("--algo", bench_args.algo_name, "algorithm id")->required();
  ben->add_option("--k", bench_args.k, "angular depth parameter");
  ben->add_flag("--sort", bench_args.sort, "sort + dedup input first");
  ben->add_option("--reps", bench_args.reps, "repetitions, best-of");

  try {
    app.parse(argc, argv);
    if (gen->parsed()) return cmd_generate(gen_dataset, gen_out);
    if (run->parsed()) return cmd_run(run_args, false, true);
    if (scal->parsed()) return cmd_scaling(sc);
    if (ver->parsed()) return cmd_run(ver_args, true, false);
    if (ben->parsed()) return cmd_bench(bench_args);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  }
  return 0;
}
