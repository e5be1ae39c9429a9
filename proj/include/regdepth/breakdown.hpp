#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "regdepth/core.hpp"
#include "regdepth/median.hpp"
#include "regdepth/rational.hpp"

namespace regdepth {

/// Breakdown quantities of the deepest-fit median for a sample with
/// maximum depth count k*.
struct BreakdownBounds {
  std::size_t n = 0;
  std::size_t p = 0;
  std::size_t k_star = 0;
  std::int64_t m_min = 0;     // k* - p + 1
  Rational abp_exact;         // m / (n + m)
  Rational rbp_ub;            // m / n
  Rational rh99_lb;           // (ceil(n / (p + 1)) - p + 1) / n
  Rational equivariant_ub;    // (n - p + 1) / (2n - p + 1)
  Rational asymptotic_ref{1, 3};
  DepthMode mode = DepthMode::exact;
  std::vector<std::string> flags;
};

BreakdownBounds bounds_from(std::size_t n, std::size_t p, std::size_t k_star,
                            DepthMode mode = DepthMode::exact);

struct ApproxParams {
  std::size_t n_subsets = 2000;
  std::size_t n_dirs = 200;
  std::uint64_t seed = 1;
  std::size_t refine_starts = 0;  // see MedianOptions::refine_starts
};

BreakdownBounds bounds_report(const Dataset& d, DepthMode mode, const MedianOptions& opt = {},
                              const ApproxParams& approx = {});

enum class AttackKind { addition_vertical_mass, replacement_vertical_mass, nullspace_pair, far_point };

const char* to_string(AttackKind k);

struct AttackPlan {
  AttackKind kind = AttackKind::addition_vertical_mass;
  std::size_t m = 0;
  std::vector<std::size_t> anchor_indices;    // p - 1 observations spanning the flat
  std::vector<std::size_t> replaced_indices;  // replacement attacks only
  std::vector<double> site_x;                 // contaminating location
  double site_y = 0.0;
  std::vector<double> shift_b;                // nullspace_pair only
  std::optional<Fit> beta_c;                  // the fit through the anchors and the site
  std::size_t k_star = 0;                     // of the clean sample
  std::size_t beta_c_count = 0;               // depth count of beta_c on the contaminated sample
  std::size_t contaminated_k_star = 0;
  Fit contaminated_t_star;
  std::size_t attempts = 0;
};

struct AttackResult {
  AttackPlan plan;
  Dataset contaminated;
};

/// Adds m = k* - p + 1 copies of a far point Z so that the near-vertical
/// fit through Z and p - 1 anchors becomes a deepest fit. Z's x lies
/// beside the anchors' flat at a random distance, y(Z) = y_magnitude.
/// Throws AttackConstructionFailed when 100 placements fail verification.
AttackResult attack_addition(const Dataset& d, double y_magnitude, std::uint64_t seed,
                             const MedianOptions& opt = {});

/// As attack_addition, replacing m non-anchor observations instead.
AttackResult attack_replacement(const Dataset& d, double y_magnitude, std::uint64_t seed,
                                const MedianOptions& opt = {});

/// Both constructions at several magnitudes with a single site that passes
/// verification at every one of them.
struct SweepResult {
  std::vector<AttackResult> runs;  // one per magnitude
  std::vector<double> t_star_norms;
};
SweepResult attack_sweep(const Dataset& d, AttackKind kind, const std::vector<double>& magnitudes,
                         std::uint64_t seed, const MedianOptions& opt = {});

/// The two samples of the null-space argument: first = Z^n plus shifted
/// copies of the first m points, second = first shifted by -b, in the
/// documented order. m = n - p + 1, b = lambda * u.
struct NullspacePair {
  Dataset first;
  Dataset second;
  std::vector<double> u;
  std::vector<double> b;
  std::size_t m = 0;
};
NullspacePair attack_nullspace_pair(const Dataset& d, double lambda);

/// Largest norm among the fits through p observations of d.
double bounded_certificate(const Dataset& d);

enum class Contamination { addition, replacement };

struct SearchResult {
  std::size_t m_emp = 0;  // m_max + 1 when nothing broke the estimator
  std::optional<AttackPlan> plan;
  std::vector<double> t_star_norms;  // of the winning strategy
  std::string strategy;
};

/// Smallest m <= m_max for which an attack in the battery makes
/// ||t_star|| grow at least 50-fold per 100-fold increase of y over
/// y in {1e2, 1e4, 1e6}.
SearchResult empirical_breakdown_search(const Dataset& d, Contamination mode, std::size_t m_max,
                                        std::uint64_t seed, const MedianOptions& opt = {});

/// Runs the battery with exactly m points; returns the largest ||t_star||
/// seen and whether any strategy passed the growth test.
struct BatteryOutcome {
  double max_t_star_norm = 0.0;
  bool diverged = false;
  std::string strategy;
  std::vector<double> t_star_norms;
  std::optional<AttackPlan> plan;
};
BatteryOutcome run_attack_battery(const Dataset& d, Contamination mode, std::size_t m,
                                  std::uint64_t seed, const MedianOptions& opt = {});

}  // namespace regdepth
