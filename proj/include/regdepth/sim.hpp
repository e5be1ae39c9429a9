#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "regdepth/breakdown.hpp"
#include "regdepth/core.hpp"
#include "regdepth/median.hpp"
#include "regdepth/rational.hpp"

namespace regdepth {

/// n points with all p coordinates i.i.d. N(0, 1), drawn point by point
/// (x_1, ..., x_{p-1}, y) from SplitMix64(seed).
Dataset gen_std_normal(std::size_t p, std::size_t n, std::uint64_t seed);

/// Number of contaminated points for a sample of size n: ceil(0.05 n).
std::size_t contamination_count(std::size_t n);

/// Base sample N(0, diag(1, ..., p)) (the j-th coordinate has variance j,
/// y last with variance p); then the last ceil(0.05 n) points are replaced
/// by points with independent N(10, 0.1) coordinates, drawn after the base
/// sample from the same stream.
Dataset gen_contaminated(std::size_t p, std::size_t n, std::uint64_t seed);

/// As gen_contaminated, but the contaminating points are appended to all
/// n base points (n + ceil(0.05 n) points in total).
Dataset gen_contaminated_added(std::size_t p, std::size_t n, std::uint64_t seed);

enum class Generator { std_normal, diag_normal_contaminated, diag_normal_contaminated_added };
const char* to_string(Generator g);

/// Table 1: mean (abp_lb - rh99_lb), N(0, I) samples.
/// Table 2: the same statistic on contaminated samples.
/// Table 3: mean (rbp_ub - 1/3), N(0, I) samples.
enum class Table { table1 = 1, table2 = 2, table3 = 3 };

/// Mode used by default for a cell: approximate when p >= 3 and n > 30 or
/// p = 5 and n > 20, exact otherwise.
DepthMode default_mode(std::size_t p, std::size_t n);

struct SimulationSpec {
  std::size_t p = 2;
  std::size_t n = 10;
  std::size_t reps = 1000;
  Generator generator = Generator::std_normal;
  DepthMode mode = DepthMode::exact;
  ApproxParams approx{};  // seed is ignored; each replicate uses its own
  std::uint64_t master_seed = 0;
  std::size_t workers = 1;
  Budget budget = Budget::from_env();
};

/// The spec a table cell uses: its generator, default_mode(p, n) and, for
/// approximate cells, a swap search from the 16 best screened subsets.
SimulationSpec table_spec(Table t, std::size_t p, std::size_t n, std::size_t reps,
                          std::uint64_t master_seed);

Dataset generate(Generator g, std::size_t p, std::size_t n, std::uint64_t seed);

struct ReplicateRecord {
  std::size_t index = 0;
  std::uint64_t seed = 0;
  std::size_t n = 0;  // sample size the bounds refer to
  std::size_t k_star = 0;
  Rational abp_lb;
  Rational rbp_ub;
  Rational rh99_lb;
  DepthMode mode = DepthMode::exact;
};

struct SimulationSummary {
  SimulationSpec spec;
  Table table = Table::table1;
  std::vector<ReplicateRecord> records;  // replicates 0 .. completed-1
  std::size_t reps_requested = 0;
  std::size_t reps_completed = 0;
  bool partial = false;
  std::string stop_reason;
  double mean_abp_minus_rh99_pp = 0.0;
  double mean_rbp_minus_third_pp = 0.0;
  double mean_k_star = 0.0;
  double mean_rbp_ub = 0.0;

  /// The table's statistic: table 1 and 2 use (abp_lb - rh99_lb), table 3
  /// uses (rbp_ub - 1/3).
  double statistic_pp() const;
};

/// One replicate per task; replicate i uses replicate_seed(master_seed, i).
/// A replicate that exceeds the budget ends the run: the summary keeps the
/// replicates before it and is marked partial.
SimulationSummary run_table_experiment(const SimulationSpec& spec, Table which);

std::string contamination_note(Generator g);

/// One row per replicate.
void write_replicates_csv(std::ostream& out, const std::vector<SimulationSummary>& cells);
/// One row per cell, with mode and replicate counts.
void write_cells_csv(std::ostream& out, const std::vector<SimulationSummary>& cells);
/// Rows p, columns n, entries the table statistic.
void write_table_csv(std::ostream& out, const std::vector<SimulationSummary>& cells);

struct BoxplotStats {
  double min = 0.0;
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
  double max = 0.0;
  double lower_whisker = 0.0;  // smallest value >= q1 - 1.5 IQR
  double upper_whisker = 0.0;  // largest value <= q3 + 1.5 IQR
  std::vector<double> outliers;  // ascending
};

/// Quartiles by linear interpolation between order statistics
/// (Hyndman-Fan type 7). Throws InputError on an empty sample.
BoxplotStats boxplot_stats(std::vector<double> values);

struct BoxplotCell {
  std::size_t p = 0;
  std::size_t n = 0;
  std::size_t reps = 0;
  DepthMode mode = DepthMode::exact;
  bool partial = false;
  BoxplotStats rbp_ub;
  bool median_below_third = false;
};

/// rbp_ub distribution for every (p, n) on N(0, I) samples.
std::vector<BoxplotCell> boxplot_summary(const std::vector<std::size_t>& ps,
                                         const std::vector<std::size_t>& ns, std::size_t reps,
                                         std::uint64_t master_seed, std::size_t workers = 1);

}  // namespace regdepth
