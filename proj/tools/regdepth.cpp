// regdepth: command-line front end.
//
// Every subcommand prints one JSON document on stdout; diagnostics go to
// stderr. Exit codes: 0 ok, 2 input error, 3 budget exceeded, 4 attack
// construction failed, 1 anything else.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "regdepth/breakdown.hpp"
#include "regdepth/csv.hpp"
#include "regdepth/depth.hpp"
#include "regdepth/median.hpp"
#include "regdepth/report.hpp"
#include "regdepth/sim.hpp"

using namespace regdepth;
using report::json;

namespace {

std::vector<std::size_t> parse_sizes(const std::string& s, const char* what) {
  std::vector<std::size_t> out;
  for (double v : parse_number_list(s)) {
    if (v < 0 || v != static_cast<double>(static_cast<std::size_t>(v)))
      throw InputError(std::string(what) + ": expected non-negative integers, got '" + s + "'");
    out.push_back(static_cast<std::size_t>(v));
  }
  return out;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path.string());
  out << text;
}

template <class Writer>
std::string to_text(Writer&& w) {
  std::ostringstream s;
  w(s);
  return s.str();
}

bool same_multiset(const Dataset& a, const Dataset& b) {
  auto rows = [](const Dataset& d) {
    std::vector<std::vector<double>> r;
    for (std::size_t i = 0; i < d.n(); ++i) {
      std::vector<double> row(d.x(i).begin(), d.x(i).end());
      row.push_back(d.y(i));
      r.push_back(std::move(row));
    }
    std::sort(r.begin(), r.end());
    return r;
  };
  return a.p() == b.p() && rows(a) == rows(b);
}

DepthMode parse_mode(const std::string& s) { return s == "exact" ? DepthMode::exact : DepthMode::approximate; }

struct Common {
  std::string input;
  std::size_t workers = 1;
  MedianOptions options() const {
    MedianOptions o;
    o.workers = workers;
    return o;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Regression depth, deepest fit and breakdown tools"};
  app.require_subcommand(1);
  Common common;

  // depth
  auto* depth = app.add_subcommand("depth", "Regression depth of one fit");
  std::string beta_text;
  std::string method = "exact";
  std::size_t n_dirs = 200;
  std::uint64_t depth_seed = 1;
  depth->add_option("--input", common.input, "CSV with columns x1..x{p-1},y")->required();
  depth->add_option("--beta", beta_text, "intercept,slope1,...")->required();
  depth->add_option("--method", method)->check(CLI::IsMember({"exact", "sweep", "approx"}));
  depth->add_option("--n-dirs", n_dirs, "directions for --method approx");
  depth->add_option("--seed", depth_seed, "direction seed for --method approx");

  // median
  auto* median = app.add_subcommand("median", "Deepest fit and the maximizing fits");
  std::string median_mode = "exact";
  ApproxParams approx;
  median->add_option("--input", common.input)->required();
  median->add_option("--mode", median_mode)->check(CLI::IsMember({"exact", "approx"}));
  median->add_option("--n-subsets", approx.n_subsets);
  median->add_option("--n-dirs", approx.n_dirs);
  median->add_option("--seed", approx.seed);
  median->add_option("--refine", approx.refine_starts, "swap-search starts for --mode approx");
  median->add_option("--workers", common.workers, "0: one per hardware thread");

  // bounds
  auto* bounds = app.add_subcommand("bounds", "Breakdown bounds from k*");
  std::string bounds_mode = "exact";
  bounds->add_option("--input", common.input)->required();
  bounds->add_option("--mode", bounds_mode)->check(CLI::IsMember({"exact", "approx"}));
  bounds->add_option("--n-subsets", approx.n_subsets);
  bounds->add_option("--n-dirs", approx.n_dirs);
  bounds->add_option("--seed", approx.seed);
  bounds->add_option("--refine", approx.refine_starts, "swap-search starts for --mode approx");
  bounds->add_option("--workers", common.workers);

  // attack
  auto* attack = app.add_subcommand("attack", "Contamination attacks on the deepest fit");
  std::string attack_mode;
  std::string y_mag = "100,10000,1000000";
  std::uint64_t attack_seed = 0;
  std::size_t m_max = 0;
  bool search = false;
  std::string attack_out;
  attack->add_option("--input", common.input)->required();
  attack->add_option("--mode", attack_mode)->required()->check(CLI::IsMember({"addition", "replacement", "nullspace"}));
  attack->add_option("--y-mag", y_mag, "comma list of magnitudes (lambda for nullspace)");
  attack->add_option("--seed", attack_seed)->required();
  attack->add_flag("--search", search, "smallest m that breaks the estimator, m = 1..m-max");
  attack->add_option("--m-max", m_max, "search limit (default n)");
  attack->add_option("--out-dir", attack_out, "write contaminated samples as CSV");
  attack->add_option("--workers", common.workers);

  // simulate
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo tables and boxplot statistics");
  int table = 1;
  std::string ps_text = "2";
  std::string ns_text = "10";
  std::size_t reps = 1000;
  std::uint64_t sim_seed = 0;
  std::string sim_mode = "auto";
  std::string contamination = "replace";
  std::string sim_out;
  bool boxplot = false;
  bool with_records = false;
  simulate->add_option("--table", table)->check(CLI::IsMember({1, 2, 3}));
  simulate->add_option("--p", ps_text, "comma list");
  simulate->add_option("--n", ns_text, "comma list");
  simulate->add_option("--reps", reps);
  simulate->add_option("--seed", sim_seed)->required();
  simulate->add_option("--mode", sim_mode)->check(CLI::IsMember({"auto", "exact", "approx"}));
  simulate->add_option("--n-subsets", approx.n_subsets);
  simulate->add_option("--n-dirs", approx.n_dirs);
  std::optional<std::size_t> sim_refine;
  simulate->add_option("--refine", sim_refine, "swap-search starts for approximate cells (default 16)");
  simulate->add_option("--contamination", contamination, "table 2 only")->check(CLI::IsMember({"replace", "add"}));
  simulate->add_flag("--boxplot", boxplot, "rbp_ub five-number summaries instead of table means");
  simulate->add_flag("--replicates", with_records, "include per-replicate records in the JSON");
  simulate->add_option("--out-dir", sim_out, "write replicates.csv, cells.csv, table.csv, summary.json");
  simulate->add_option("--workers", common.workers);

  // generate
  auto* gen = app.add_subcommand("generate", "Write a simulated sample as CSV");
  std::string generator = "std_normal";
  std::size_t gen_p = 2;
  std::size_t gen_n = 10;
  std::uint64_t gen_seed = 0;
  gen->add_option("--generator", generator)->check(CLI::IsMember({"std_normal", "contaminated", "contaminated_added"}));
  gen->add_option("--p", gen_p);
  gen->add_option("--n", gen_n);
  gen->add_option("--seed", gen_seed)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*depth) {
      const auto d = read_dataset_csv_file(common.input);
      const Fit f{parse_number_list(beta_text)};
      if (f.p() != d.p())
        throw InputError("--beta has " + std::to_string(f.p()) + " entries, expected " + std::to_string(d.p()));
      DepthWitness w;
      if (method == "exact") w = rdepth_exact(d, f);
      else if (method == "sweep") w = rdepth_sweep_p2(d, f);
      else w = rdepth_approx(d, f, n_dirs, depth_seed);
      auto j = report::to_json(w);
      j["method"] = method;
      std::cout << report::render(j);
    } else if (*median) {
      const auto d = read_dataset_csv_file(common.input);
      auto o = common.options();
      o.refine_starts = approx.refine_starts;
      const auto r = median_mode == "exact" ? k_star_exact(d, o)
                                            : k_star_approx(d, approx.n_subsets, approx.n_dirs, approx.seed, o);
      std::cout << report::render(report::to_json(r));
    } else if (*bounds) {
      const auto d = read_dataset_csv_file(common.input);
      std::cout << report::render(report::to_json(bounds_report(d, parse_mode(bounds_mode), common.options(), approx)));
    } else if (*attack) {
      const auto d = read_dataset_csv_file(common.input);
      const auto mags = parse_number_list(y_mag);
      if (mags.empty()) throw InputError("--y-mag: no values");
      json j = {{"mode", attack_mode}, {"seed", attack_seed}};
      std::vector<std::pair<std::string, Dataset>> outputs;
      if (attack_mode == "nullspace") {
        json runs = json::array();
        for (std::size_t t = 0; t < mags.size(); ++t) {
          const auto pair = attack_nullspace_pair(d, mags[t]);
          auto r = report::to_json(pair);
          const auto a = k_star_exact(pair.first, common.options());
          const auto b = k_star_exact(pair.second, common.options());
          r["lambda"] = mags[t];
          r["identical"] = same_multiset(pair.first, pair.second);
          r["t_star_first"] = a.t_star.beta;
          r["t_star_second"] = b.t_star.beta;
          runs.push_back(r);
          outputs.emplace_back("nullspace_" + std::to_string(t) + "_first.csv", pair.first);
          outputs.emplace_back("nullspace_" + std::to_string(t) + "_second.csv", pair.second);
        }
        j["runs"] = runs;
      } else if (search) {
        const auto mode = attack_mode == "addition" ? Contamination::addition : Contamination::replacement;
        const auto s = empirical_breakdown_search(d, mode, m_max ? m_max : d.n(), attack_seed, common.options());
        j["search"] = report::to_json(s);
        j["bounds"] = report::to_json(bounds_report(d, DepthMode::exact, common.options()));
      } else {
        const auto kind = attack_mode == "addition" ? AttackKind::addition_vertical_mass
                                                    : AttackKind::replacement_vertical_mass;
        const auto s = attack_sweep(d, kind, mags, attack_seed, common.options());
        j["magnitudes"] = mags;
        j["sweep"] = report::to_json(s);
        for (std::size_t t = 0; t < s.runs.size(); ++t)
          outputs.emplace_back("contaminated_" + std::to_string(t) + ".csv", s.runs[t].contaminated);
      }
      if (!attack_out.empty()) {
        std::filesystem::create_directories(attack_out);
        for (const auto& [name, ds] : outputs) write_dataset_csv_file((std::filesystem::path(attack_out) / name).string(), ds);
      }
      std::cout << report::render(j);
    } else if (*simulate) {
      const auto ps = parse_sizes(ps_text, "--p");
      const auto ns = parse_sizes(ns_text, "--n");
      json j;
      std::string csv_cells;
      std::string csv_reps;
      std::string csv_table;
      if (boxplot) {
        const auto cells = boxplot_summary(ps, ns, reps, sim_seed, common.workers);
        json arr = json::array();
        for (const auto& c : cells) arr.push_back(report::to_json(c));
        j = {{"boxplot", arr}, {"statistic", "rbp_ub"}, {"master_seed", sim_seed}, {"reps", reps}};
      } else {
        const auto which = static_cast<Table>(table);
        std::vector<SimulationSummary> cells;
        for (auto p : ps) {
          for (auto n : ns) {
            auto spec = table_spec(which, p, n, reps, sim_seed);
            if (which == Table::table2 && contamination == "add")
              spec.generator = Generator::diag_normal_contaminated_added;
            if (sim_mode != "auto") spec.mode = parse_mode(sim_mode);
            spec.approx.n_subsets = approx.n_subsets;
            spec.approx.n_dirs = approx.n_dirs;
            if (sim_refine) spec.approx.refine_starts = *sim_refine;
            spec.workers = common.workers;
            cells.push_back(run_table_experiment(spec, which));
          }
        }
        json arr = json::array();
        for (const auto& c : cells) arr.push_back(report::to_json(c, with_records));
        j = {{"table", table},
             {"statistic", which == Table::table3 ? "rbp_ub - 1/3 (pp)" : "abp_lb - rh99_lb (pp)"},
             {"cells", arr}};
        csv_cells = to_text([&](std::ostream& o) { write_cells_csv(o, cells); });
        csv_reps = to_text([&](std::ostream& o) { write_replicates_csv(o, cells); });
        csv_table = to_text([&](std::ostream& o) { write_table_csv(o, cells); });
        for (const auto& c : cells)
          if (c.partial) std::cerr << "warning: p=" << c.spec.p << " n=" << c.spec.n << " stopped early: " << c.stop_reason << "\n";
      }
      if (!sim_out.empty()) {
        const std::filesystem::path dir(sim_out);
        std::filesystem::create_directories(dir);
        write_file(dir / "summary.json", report::render(j));
        if (!boxplot) {
          write_file(dir / "cells.csv", csv_cells);
          write_file(dir / "replicates.csv", csv_reps);
          write_file(dir / "table.csv", csv_table);
        }
      }
      std::cout << report::render(j);
    } else if (*gen) {
      const Generator g = generator == "std_normal"     ? Generator::std_normal
                          : generator == "contaminated" ? Generator::diag_normal_contaminated
                                                        : Generator::diag_normal_contaminated_added;
      write_dataset_csv(std::cout, generate(g, gen_p, gen_n, gen_seed));
    }
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 2;
  } catch (const DegenerateSubset& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 2;
  } catch (const BudgetExceeded& e) {
    std::cerr << "budget exceeded: " << e.what() << "\n";
    return 3;
  } catch (const AttackConstructionFailed& e) {
    std::cerr << "attack construction failed: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
