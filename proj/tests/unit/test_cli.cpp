#include "doctest.h"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "fixtures.hpp"
#include "regdepth/breakdown.hpp"
#include "regdepth/csv.hpp"
#include "regdepth/report.hpp"

using namespace regdepth;
using regdepth::testing::fixture_path;
using regdepth::testing::read_file;

namespace {

struct Run {
  int status = -1;
  std::string out;
};

// Runs the CLI from the fixture directory; stderr is discarded.
Run cli(const std::string& args, const std::string& env = {}) {
  const std::string cmd = "cd '" + std::string(REGDEPTH_FIXTURE_DIR) + "' && " + env + " '" + REGDEPTH_CLI + "' " +
                          args + " 2>/dev/null";
  Run r;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  char buf[4096];
  std::size_t got;
  while ((got = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, got);
  const int st = pclose(pipe);
  r.status = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  return r;
}

std::string golden(const std::string& name) { return read_file(std::string(REGDEPTH_GOLDEN_DIR) + "/" + name + ".json"); }

std::string trim(std::string s) {
  while (!s.empty() && s.front() == ' ') s.erase(s.begin());
  while (!s.empty() && (s.back() == ' ' || s.back() == '\r')) s.pop_back();
  return s;
}

}  // namespace

TEST_CASE("golden outputs") {
  std::ifstream cases(std::string(REGDEPTH_GOLDEN_DIR) + "/cases.txt");
  std::string line;
  int seen = 0;
  while (std::getline(cases, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto bar = line.find('|');
    const auto name = trim(line.substr(0, bar));
    const auto args = trim(line.substr(bar + 1));
    CAPTURE(name);
    const auto r = cli(args);
    CHECK(r.status == 0);
    CHECK(r.out == golden(name));
    ++seen;
  }
  CHECK(seen >= 10);
}

TEST_CASE("cli output equals the library call") {
  const auto d = read_dataset_csv_file(fixture_path("gaussian_p2_n12_seed3.csv"));
  const auto w = rdepth_exact(d, Fit{{0.25, -0.5}});
  auto j = report::to_json(w);
  j["method"] = "exact";
  CHECK(cli("depth --input gaussian_p2_n12_seed3.csv --beta 0.25,-0.5").out == report::render(j));

  const auto m = k_star_exact(read_dataset_csv_file(fixture_path("gaussian_p3_n9_seed4.csv")));
  CHECK(cli("median --input gaussian_p3_n9_seed4.csv --workers 3").out == report::render(report::to_json(m)));

  const auto b = bounds_report(read_dataset_csv_file(fixture_path("four_point.csv")), DepthMode::exact);
  CHECK(cli("bounds --input four_point.csv").out == report::render(report::to_json(b)));
}

TEST_CASE("documented outputs") {
  const auto depth = report::json::parse(cli("depth --input four_point.csv --beta 0,1").out);
  CHECK(depth["count"] == 2);
  CHECK(depth["fraction"] == 0.5);

  const auto all = report::json::parse(cli("depth --input collinear.csv --beta 1,2").out);
  CHECK(all["count"] == 5);

  const auto med = report::json::parse(cli("median --input four_point.csv").out);
  CHECK(med["maximizer_count"] == 6);
  CHECK(med["k_star"] == 2);

  const auto col = report::json::parse(cli("median --input collinear.csv").out);
  CHECK(col["maximizer_count"] == 1);

  const auto bounds = report::json::parse(cli("bounds --input four_point.csv").out);
  CHECK(bounds["abp_exact"]["fraction"] == "1/5");
  CHECK(bounds["abp_exact"]["decimal"] == "0.20000000000000001");

  const auto ns = report::json::parse(cli("attack --input four_point.csv --mode nullspace --y-mag 0 --seed 1").out);
  CHECK(ns["runs"][0]["identical"] == true);
  CHECK(ns["runs"][0]["t_star_first"] == ns["runs"][0]["t_star_second"]);
}

TEST_CASE("exit codes") {
  CHECK(cli("simulate --table 1 --p 2 --n 10 --reps 2").status == 2);  // no --seed
  CHECK(cli("attack --input four_point.csv --mode addition").status == 2);
  CHECK(cli("depth --input missing.csv --beta 0,1").status == 2);
  CHECK(cli("depth --input four_point.csv --beta 0,1,2").status == 2);
  CHECK(cli("median --input four_point.csv", "REGDEPTH_BUDGET=3").status == 3);
  CHECK(cli("attack --input four_point.csv --mode addition --seed 1").status == 4);
  CHECK(cli("frobnicate").status == 2);
}

TEST_CASE("simulate writes its tables") {
  const std::string dir = std::string(REGDEPTH_SCRATCH_DIR) + "/sim_out";
  const auto r = cli("simulate --table 3 --p 2 --n 10,12 --reps 5 --seed 9 --out-dir '" + dir + "'");
  REQUIRE(r.status == 0);
  CHECK(read_file(dir + "/summary.json") == r.out);
  const auto table = read_file(dir + "/table.csv");
  CHECK(table.rfind("p,n=10,n=12\n2,", 0) == 0);
  std::istringstream reps(read_file(dir + "/replicates.csv"));
  std::string line;
  int rows = -1;
  while (std::getline(reps, line)) ++rows;
  CHECK(rows == 10);

  const auto again = cli("simulate --table 3 --p 2 --n 10,12 --reps 5 --seed 9 --workers 4");
  CHECK(again.out == r.out);
}

TEST_CASE("generate reproduces the committed fixtures") {
  CHECK(cli("generate --p 2 --n 20 --seed 7").out == read_file(fixture_path("std_normal_p2_n20_seed7.csv")));
  CHECK(cli("generate --generator contaminated --p 3 --n 20 --seed 7").out ==
        read_file(fixture_path("contaminated_p3_n20_seed7.csv")));
}
