#include "regdepth/sim.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <ostream>
#include <set>

#include "regdepth/csv.hpp"
#include "regdepth/parallel.hpp"
#include "regdepth/random.hpp"

namespace regdepth {

namespace {

void check_shape(std::size_t p, std::size_t n) {
  if (p < 2 || n < p) throw InputError("generator: need n >= p >= 2");
}

// Base sample N(0, diag(1..p)) as rows, then c contaminating rows.
std::pair<std::vector<std::vector<double>>, std::vector<std::vector<double>>> contaminated_parts(
    std::size_t p, std::size_t n, std::uint64_t seed) {
  check_shape(p, n);
  SplitMix64 rng(seed);
  std::vector<std::vector<double>> base(n, std::vector<double>(p));
  for (auto& row : base)
    for (std::size_t j = 0; j < p; ++j) row[j] = std::sqrt(static_cast<double>(j + 1)) * rng.normal();
  const double sd = std::sqrt(0.1);
  std::vector<std::vector<double>> extra(contamination_count(n), std::vector<double>(p));
  for (auto& row : extra)
    for (auto& v : row) v = rng.normal(10.0, sd);
  return {std::move(base), std::move(extra)};
}

// Neumaier's compensated summation.
struct Sum {
  double s = 0.0;
  double c = 0.0;
  void add(double v) {
    const double t = s + v;
    c += std::abs(s) >= std::abs(v) ? (s - t) + v : (v - t) + s;
    s = t;
  }
  double value() const { return s + c; }
};

std::string fmt(double v) { return format_double(v); }

}  // namespace

Dataset gen_std_normal(std::size_t p, std::size_t n, std::uint64_t seed) {
  check_shape(p, n);
  SplitMix64 rng(seed);
  std::vector<double> xs;
  std::vector<double> ys;
  xs.reserve(n * (p - 1));
  ys.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j + 1 < p; ++j) xs.push_back(rng.normal());
    ys.push_back(rng.normal());
  }
  return Dataset(p, std::move(xs), std::move(ys));
}

std::size_t contamination_count(std::size_t n) { return (5 * n + 99) / 100; }

Dataset gen_contaminated(std::size_t p, std::size_t n, std::uint64_t seed) {
  auto [rows, extra] = contaminated_parts(p, n, seed);
  std::copy(extra.begin(), extra.end(), rows.end() - static_cast<std::ptrdiff_t>(extra.size()));
  return Dataset::from_rows(p, rows);
}

Dataset gen_contaminated_added(std::size_t p, std::size_t n, std::uint64_t seed) {
  auto [rows, extra] = contaminated_parts(p, n, seed);
  rows.insert(rows.end(), extra.begin(), extra.end());
  return Dataset::from_rows(p, rows);
}

const char* to_string(Generator g) {
  switch (g) {
    case Generator::std_normal:
      return "std_normal";
    case Generator::diag_normal_contaminated:
      return "diag_normal_contaminated";
    case Generator::diag_normal_contaminated_added:
      return "diag_normal_contaminated_added";
  }
  return "unknown";
}

Dataset generate(Generator g, std::size_t p, std::size_t n, std::uint64_t seed) {
  switch (g) {
    case Generator::std_normal:
      return gen_std_normal(p, n, seed);
    case Generator::diag_normal_contaminated:
      return gen_contaminated(p, n, seed);
    case Generator::diag_normal_contaminated_added:
      return gen_contaminated_added(p, n, seed);
  }
  throw InputError("unknown generator");
}

DepthMode default_mode(std::size_t p, std::size_t n) {
  if ((p >= 3 && n > 30) || (p == 5 && n > 20)) return DepthMode::approximate;
  return DepthMode::exact;
}

SimulationSpec table_spec(Table t, std::size_t p, std::size_t n, std::size_t reps,
                          std::uint64_t master_seed) {
  SimulationSpec s;
  s.p = p;
  s.n = n;
  s.reps = reps;
  s.generator = t == Table::table2 ? Generator::diag_normal_contaminated : Generator::std_normal;
  s.mode = default_mode(p, n);
  s.approx.refine_starts = 16;
  s.master_seed = master_seed;
  return s;
}

std::string contamination_note(Generator g) {
  switch (g) {
    case Generator::std_normal:
      return "none";
    case Generator::diag_normal_contaminated:
      return "replacement of the last ceil(0.05 n) points by i.i.d. N(10, 0.1) coordinates";
    case Generator::diag_normal_contaminated_added:
      return "addition of ceil(0.05 n) points with i.i.d. N(10, 0.1) coordinates";
  }
  return "unknown";
}

double SimulationSummary::statistic_pp() const {
  return table == Table::table3 ? mean_rbp_minus_third_pp : mean_abp_minus_rh99_pp;
}

SimulationSummary run_table_experiment(const SimulationSpec& spec, Table which) {
  if (spec.reps < 1) throw InputError("simulation: reps must be at least 1");
  check_shape(spec.p, spec.n);
  if (which != Table::table2 && spec.generator != Generator::std_normal)
    throw InputError("simulation: tables 1 and 3 use standard normal samples");
  if (which == Table::table2 && spec.generator == Generator::std_normal)
    throw InputError("simulation: table 2 uses contaminated samples");

  std::vector<std::optional<ReplicateRecord>> slots(spec.reps);
  std::vector<std::string> failures(spec.reps);
  MedianOptions opt;
  opt.workers = 1;
  opt.budget = spec.budget;
  opt.refine_starts = spec.approx.refine_starts;

  parallel_for(spec.reps, spec.workers, [&](std::size_t i, std::size_t) {
    ReplicateRecord r;
    r.index = i;
    r.seed = replicate_seed(spec.master_seed, i);
    const auto d = generate(spec.generator, spec.p, spec.n, r.seed);
    try {
      const auto res = spec.mode == DepthMode::exact
                           ? k_star_exact(d, opt)
                           : k_star_approx(d, spec.approx.n_subsets, spec.approx.n_dirs, r.seed, opt);
      const auto b = bounds_from(d.n(), d.p(), res.k_star, res.mode);
      r.n = d.n();
      r.k_star = res.k_star;
      r.abp_lb = b.abp_exact;
      r.rbp_ub = b.rbp_ub;
      r.rh99_lb = b.rh99_lb;
      r.mode = res.mode;
      slots[i] = r;
    } catch (const BudgetExceeded& e) {
      failures[i] = e.what();
    }
  });

  SimulationSummary s;
  s.spec = spec;
  s.table = which;
  s.reps_requested = spec.reps;
  for (std::size_t i = 0; i < spec.reps; ++i) {
    if (!slots[i]) {
      s.partial = true;
      s.stop_reason = "replicate " + std::to_string(i) + ": " + failures[i];
      break;
    }
    s.records.push_back(*slots[i]);
  }
  s.reps_completed = s.records.size();
  if (s.records.empty()) return s;

  Sum abp_rh;
  Sum rbp_third;
  Sum k;
  Sum rbp;
  const Rational third(1, 3);
  for (const auto& r : s.records) {
    abp_rh.add((r.abp_lb - r.rh99_lb).to_double());
    rbp_third.add((r.rbp_ub - third).to_double());
    k.add(static_cast<double>(r.k_star));
    rbp.add(r.rbp_ub.to_double());
  }
  const double m = static_cast<double>(s.records.size());
  s.mean_abp_minus_rh99_pp = 100.0 * abp_rh.value() / m;
  s.mean_rbp_minus_third_pp = 100.0 * rbp_third.value() / m;
  s.mean_k_star = k.value() / m;
  s.mean_rbp_ub = rbp.value() / m;
  return s;
}

void write_replicates_csv(std::ostream& out, const std::vector<SimulationSummary>& cells) {
  out << "table,p,n,replicate,seed,k_star,abp_lb,rbp_ub,rh99_lb,mode\n";
  for (const auto& c : cells)
    for (const auto& r : c.records)
      out << static_cast<int>(c.table) << ',' << c.spec.p << ',' << r.n << ',' << r.index << ',' << r.seed
          << ',' << r.k_star << ',' << fmt(r.abp_lb.to_double()) << ',' << fmt(r.rbp_ub.to_double()) << ','
          << fmt(r.rh99_lb.to_double()) << ',' << to_string(r.mode) << '\n';
}

void write_cells_csv(std::ostream& out, const std::vector<SimulationSummary>& cells) {
  out << "table,p,n,generator,mode,reps_requested,reps_completed,partial,statistic_pp,"
         "mean_abp_minus_rh99_pp,mean_rbp_minus_third_pp,mean_k_star,mean_rbp_ub\n";
  for (const auto& c : cells)
    out << static_cast<int>(c.table) << ',' << c.spec.p << ',' << c.spec.n << ',' << to_string(c.spec.generator)
        << ',' << to_string(c.spec.mode) << ',' << c.reps_requested << ',' << c.reps_completed << ','
        << (c.partial ? "true" : "false") << ',' << fmt(c.statistic_pp()) << ','
        << fmt(c.mean_abp_minus_rh99_pp) << ',' << fmt(c.mean_rbp_minus_third_pp) << ','
        << fmt(c.mean_k_star) << ',' << fmt(c.mean_rbp_ub) << '\n';
}

void write_table_csv(std::ostream& out, const std::vector<SimulationSummary>& cells) {
  std::set<std::size_t> ns;
  std::map<std::size_t, std::map<std::size_t, const SimulationSummary*>> grid;
  for (const auto& c : cells) {
    ns.insert(c.spec.n);
    grid[c.spec.p][c.spec.n] = &c;
  }
  out << 'p';
  for (auto n : ns) out << ",n=" << n;
  out << '\n';
  for (const auto& [p, row] : grid) {
    out << p;
    for (auto n : ns) {
      out << ',';
      const auto it = row.find(n);
      if (it != row.end() && it->second->reps_completed > 0) out << fmt(it->second->statistic_pp());
    }
    out << '\n';
  }
}

BoxplotStats boxplot_stats(std::vector<double> v) {
  if (v.empty()) throw InputError("boxplot: empty sample");
  std::sort(v.begin(), v.end());
  const auto q = [&](double prob) {
    const double h = prob * static_cast<double>(v.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
  };
  BoxplotStats b;
  b.min = v.front();
  b.max = v.back();
  b.q1 = q(0.25);
  b.median = q(0.5);
  b.q3 = q(0.75);
  const double iqr = b.q3 - b.q1;
  const double lo_fence = b.q1 - 1.5 * iqr;
  const double hi_fence = b.q3 + 1.5 * iqr;
  b.lower_whisker = b.q1;
  b.upper_whisker = b.q3;
  for (double x : v) {
    if (x < lo_fence || x > hi_fence) {
      b.outliers.push_back(x);
      continue;
    }
    b.lower_whisker = std::min(b.lower_whisker, x);
    b.upper_whisker = std::max(b.upper_whisker, x);
  }
  return b;
}

std::vector<BoxplotCell> boxplot_summary(const std::vector<std::size_t>& ps,
                                         const std::vector<std::size_t>& ns, std::size_t reps,
                                         std::uint64_t master_seed, std::size_t workers) {
  std::vector<BoxplotCell> out;
  for (auto p : ps) {
    for (auto n : ns) {
      auto spec = table_spec(Table::table3, p, n, reps, master_seed);
      spec.workers = workers;
      const auto s = run_table_experiment(spec, Table::table3);
      BoxplotCell c;
      c.p = p;
      c.n = n;
      c.reps = s.reps_completed;
      c.mode = spec.mode;
      c.partial = s.partial;
      if (!s.records.empty()) {
        std::vector<double> v;
        for (const auto& r : s.records) v.push_back(r.rbp_ub.to_double());
        c.rbp_ub = boxplot_stats(std::move(v));
        c.median_below_third = c.rbp_ub.median < 1.0 / 3.0;
      }
      out.push_back(std::move(c));
    }
  }
  return out;
}

}  // namespace regdepth
