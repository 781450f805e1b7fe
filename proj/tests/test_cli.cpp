#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace {

std::string bin() { return FORKHULL_CLI_PATH; }

int run_cmd(const std::string& args) {
  std::string cmd = bin() + " " + args;
  int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream ss(text);
  for (std::string line; std::getline(ss, line);) out.push_back(line);
  return out;
}

std::size_t point_count(const std::string& text) {
  std::size_t n = 0;
  for (const auto& line : lines_of(text))
    if (!line.empty() && line[0] != '#') ++n;
  return n;
}

// Strips the wall_ns column (the only nondeterministic one).
std::string drop_wall(const std::string& csv) {
  std::string out;
  for (const auto& line : lines_of(csv)) {
    auto pos = line.rfind(',');
    out += line.substr(0, pos) + "\n";
  }
  return out;
}

std::string tmp_path(const char* name) {
  return std::string("/tmp/forkhull_cli_test_") + name;
}

}  // namespace

TEST_CASE("generate is deterministic and rejects unknown kinds") {
  auto a = tmp_path("gen_a"), b = tmp_path("gen_b");
  REQUIRE(run_cmd("generate --kind uniform_disk --n 4096 --seed 7 --out " + a +
                  " > /dev/null 2>&1") == 0);
  REQUIRE(run_cmd("generate --kind uniform_disk --n 4096 --seed 7 --out " + b +
                  " > /dev/null 2>&1") == 0);
  CHECK(slurp(a) == slurp(b));
  CHECK(slurp(a).size() > 0);
  CHECK(run_cmd("generate --kind volcano --n 8 > /dev/null 2>&1") == 2);
  CHECK(run_cmd("generate --kind uniform_disk > /dev/null 2>&1") == 2);
}

TEST_CASE("verify accepts every algorithm on oracle-checked instances") {
  CHECK(run_cmd("verify --algo serial --kind collinear --n 100 --seed 5 --sort "
                "> /dev/null 2>&1") == 0);
  CHECK(run_cmd("verify --algo presorted --kind presorted_uniform --n 500 "
                "--seed 5 > /dev/null 2>&1") == 0);
  CHECK(run_cmd("verify --algo multiway --kind on_circle --n 64 --seed 5 "
                "> /dev/null 2>&1") == 0);
  CHECK(run_cmd("verify --algo angular:2 --kind clustered --n 300 --seed 5 "
                "> /dev/null 2>&1") == 0);
  CHECK(run_cmd("verify --algo envelope_dc --kind parabola --n 200 --seed 5 "
                "> /dev/null 2>&1") == 0);
}

TEST_CASE("collinear instances have hull size 2 and on_circle all-extreme") {
  auto hull = tmp_path("hull_col");
  REQUIRE(run_cmd("run --algo multiway --kind collinear --n 100 --seed 3 "
                  "--verify --out " + hull + " > /dev/null 2>&1") == 0);
  CHECK(point_count(slurp(hull)) == 2);
  auto circ = tmp_path("hull_circ");
  REQUIRE(run_cmd("run --algo multiway --kind on_circle --n 64 --seed 3 "
                  "--verify --out " + circ + " > /dev/null 2>&1") == 0);
  CHECK(point_count(slurp(circ)) == 64);
}

TEST_CASE("serial and presorted agree hull-for-hull on the same input") {
  auto pts = tmp_path("pts"), ha = tmp_path("hull_ser"), hb = tmp_path("hull_pre");
  REQUIRE(run_cmd("generate --kind uniform_disk --n 2000 --seed 11 --out " +
                  pts + " > /dev/null 2>&1") == 0);
  REQUIRE(run_cmd("run --algo serial --in " + pts + " --sort --out " + ha +
                  " > /dev/null 2>&1") == 0);
  REQUIRE(run_cmd("run --algo presorted --in " + pts + " --sort --out " + hb +
                  " > /dev/null 2>&1") == 0);
  CHECK(slurp(ha) == slurp(hb));
  CHECK(!slurp(ha).empty());
}

TEST_CASE("angular depths agree with each other") {
  auto h1 = tmp_path("hull_k1"), h3 = tmp_path("hull_k3");
  REQUIRE(run_cmd("run --algo angular:1 --kind clustered --n 400 --seed 21 "
                  "--out " + h1 + " > /dev/null 2>&1") == 0);
  REQUIRE(run_cmd("run --algo angular:3 --kind clustered --n 400 --seed 21 "
                  "--out " + h3 + " > /dev/null 2>&1") == 0);
  CHECK(slurp(h1) == slurp(h3));
}

TEST_CASE("usage errors exit 2") {
  auto empty = tmp_path("empty");
  { std::ofstream out(empty); }
  CHECK(run_cmd("run --algo serial --in " + empty + " > /dev/null 2>&1") == 2);
  CHECK(run_cmd("run --algo serial --kind uniform_disk --n 50 --seed 1 "
                "> /dev/null 2>&1") == 2);  // unsorted without --sort
  CHECK(run_cmd("run --algo angular --k 0 --kind on_circle --n 50 --seed 1 "
                "> /dev/null 2>&1") == 2);
  CHECK(run_cmd("run --algo serial --kind presorted_uniform --n 50 --seed 1 "
                "--replay 1024 16 > /dev/null 2>&1") == 2);  // untraced algo
  CHECK(run_cmd("run --algo presorted --kind presorted_uniform --n 50 --seed 1 "
                "--replay 100 16 > /dev/null 2>&1") == 2);  // M not mult of B
}

TEST_CASE("metrics CSV is stable apart from wall time") {
  auto c1 = tmp_path("csv1"), c2 = tmp_path("csv2");
  std::remove(c1.c_str());
  std::remove(c2.c_str());
  std::string args = "run --algo multiway --kind uniform_disk --n 3000 "
                     "--seed 9 --audit --replay 32768 16 --replay 262144 64 ";
  REQUIRE(run_cmd(args + "--csv " + c1 + " > /dev/null 2>&1") == 0);
  REQUIRE(run_cmd(args + "--csv " + c2 + " > /dev/null 2>&1") == 0);
  auto rows = lines_of(slurp(c1));
  REQUIRE(rows.size() == 3);
  CHECK(rows[0] == "algo,n,h,work,span,forks,steals,M,B,misses,wall_ns");
  CHECK(drop_wall(slurp(c1)) == drop_wall(slurp(c2)));
  // Replay against a real cache records misses.
  auto cols = lines_of(drop_wall(rows[1]));
  CHECK(rows[1].find(",32768,16,") != std::string::npos);
  CHECK(rows[1].find(",32768,16,0") == std::string::npos);
}

TEST_CASE("scaling emits one row per n and cache config with derived columns") {
  auto csv = tmp_path("scaling");
  std::remove(csv.c_str());
  REQUIRE(run_cmd("scaling --algo presorted --kind presorted_uniform "
                  "--n 1024 2048 4096 --seed 2 --replay 32768 16 --csv " +
                  csv + " > /dev/null 2>&1") == 0);
  auto rows = lines_of(slurp(csv));
  REQUIRE(rows.size() == 4);
  CHECK(rows[0] ==
        "algo,n,h,work,span,forks,steals,M,B,misses,wall_ns,"
        "work_per_n,span_delta,misses_per_nB,misses_per_nB_logM");
  CHECK(run_cmd("scaling --algo presorted --kind presorted_uniform "
                "--n 2048 1024 > /dev/null 2>&1") == 2);  // not ascending
}

TEST_CASE("trace dump replays to the same miss count") {
  auto trace = tmp_path("trace"), csv = tmp_path("trace_csv");
  std::remove(csv.c_str());
  REQUIRE(run_cmd("run --algo presorted --kind presorted_uniform --n 4096 "
                  "--seed 13 --trace-out " + trace + " --replay 32768 16 "
                  "--csv " + csv + " > /dev/null 2>&1") == 0);
  CHECK(slurp(trace).substr(0, 5) == "FHTR1");
  CHECK(lines_of(slurp(csv)).size() == 2);
}
