#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "regdepth/core.hpp"
#include "regdepth/depth.hpp"

namespace regdepth {

enum class DepthMode { exact, approximate };

const char* to_string(DepthMode m);

/// Limits for exhaustive enumeration.
struct Budget {
  std::uint64_t max_subsets = 5'000'000ULL;
  double max_ops = 1e10;  // estimated word operations for all depth evaluations

  /// REGDEPTH_BUDGET="<max_subsets>[,<max_ops>]" overrides the defaults.
  static Budget from_env();
};

struct MedianOptions {
  std::size_t workers = 1;  // 0: one per hardware thread
  Budget budget = Budget::from_env();
  /// k_star_approx only: swap-search starts taken from the best screened
  /// subsets (0 disables the search).
  std::size_t refine_starts = 0;
};

struct Maximizer {
  std::vector<std::size_t> indices;  // the p observations the fit passes through
  Fit fit;
  DepthWitness witness;
};

/// Deepest p-point fits and their average.
struct DeepestFitResult {
  std::size_t n = 0;
  std::size_t p = 0;
  std::size_t k_star = 0;
  std::vector<Maximizer> maximizers;  // distinct fits, ordered by first defining subset
  Fit t_star;
  DepthMode mode = DepthMode::exact;
  std::uint64_t subsets_examined = 0;
  std::uint64_t singular_subsets = 0;
};

/// Fits whose coefficients agree within 1e-9 * max(1, |a|, |b|) in every
/// coordinate are the same fit.
bool same_fit(const Fit& a, const Fit& b);

/// All C(n, p) fits through p observations, exact depth for each.
/// Throws BudgetExceeded when the enumeration exceeds the budget.
DeepestFitResult k_star_exact(const Dataset& d, const MedianOptions& opt = {});

/// Best of `n_subsets` random p-subsets (all of them when n_subsets >=
/// C(n, p)). Candidates are screened with approximate depth and the
/// promising ones are rescored exactly when the exact index fits the
/// budget. The result can fall below the true k*. Subsets are drawn in a
/// fixed order per seed, so with refine_starts = 0 a larger n_subsets never
/// lowers k*.
DeepestFitResult k_star_approx(const Dataset& d, std::size_t n_subsets, std::size_t n_dirs,
                               std::uint64_t seed, const MedianOptions& opt = {});

/// Estimated cost of k_star_exact; {subsets, word operations}.
std::pair<std::uint64_t, double> exact_cost(const Dataset& d);

}  // namespace regdepth
