#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "regdepth/core.hpp"

namespace regdepth {

/// Which of the two rotations about the axis l_v is counted.
///
/// With s_i = x_i'u:
///   toward: #{r_i >= 0, s_i < v} + #{r_i <= 0, s_i > v}
///   away:   #{r_i <= 0, s_i < v} + #{r_i >= 0, s_i > v}
/// A point with s_i = v lies on H_v; it is counted only when r_i = 0
/// (it then sits on the rotation axis itself).
enum class TiltSide { toward, away };

const char* to_string(TiltSide s);

/// Realizes n * RD(beta; Z^n) together with the vertical hyperplane
/// H_v = {x : x'u = v} that attains it.
struct DepthWitness {
  std::size_t count = 0;
  std::size_t n = 0;
  double fraction = 0.0;
  std::vector<double> direction_u;
  double cut_v = 0.0;
  TiltSide tilt_side = TiltSide::toward;
};

/// Recounts the points touched by tilting H_beta about the witness axis.
std::size_t replay_count(const Dataset& d, const Fit& f, const DepthWitness& w);

/// Exact depth engine for one set of x-points.
///
/// Construction enumerates every combinatorially distinct vertical cut of
/// the x-points (hyperplanes through p-1 affinely independent x-locations,
/// with points on the cut resolved recursively) and stores each as a pair
/// of bitmasks. Depth evaluation for a fit is then a sequence of popcounts,
/// which is what makes exhaustive deepest-fit search affordable.
class ExactDepthIndex {
 public:
  /// Throws BudgetExceeded when the cut arrangement would exceed
  /// `max_cuts` hyperplanes.
  explicit ExactDepthIndex(const Dataset& d, std::uint64_t max_cuts = 50'000'000ULL);
  ~ExactDepthIndex();
  ExactDepthIndex(ExactDepthIndex&&) noexcept;
  ExactDepthIndex& operator=(ExactDepthIndex&&) noexcept;

  std::size_t n() const;
  /// Number of top-level cuts, including the trivial one.
  std::size_t cut_count() const;

  /// n * RD for the given residual signs. When the true count is below
  /// `floor` the scan may stop early and return any value below `floor`.
  std::size_t count(std::span<const std::int8_t> signs, std::size_t floor = 0) const;

  DepthWitness witness(const Dataset& d, const Fit& f) const;

  /// Estimated word operations for one count() call.
  std::uint64_t cost_per_eval() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Randomized upper bound on the depth count: the same cut evaluation
/// restricted to a fixed sample of directions (shared by all fits).
class ApproxDepthIndex {
 public:
  ApproxDepthIndex(const Dataset& d, std::size_t n_dirs, std::uint64_t seed);
  ~ApproxDepthIndex();
  ApproxDepthIndex(ApproxDepthIndex&&) noexcept;
  ApproxDepthIndex& operator=(ApproxDepthIndex&&) noexcept;

  std::size_t direction_count() const;
  std::size_t count(std::span<const std::int8_t> signs, std::size_t floor = 0) const;
  DepthWitness witness(const Dataset& d, const Fit& f) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

DepthWitness rdepth_exact(const Dataset& d, const Fit& f);

/// O(n log n) sweep for simple regression (p = 2).
DepthWitness rdepth_sweep_p2(const Dataset& d, const Fit& f);

/// Never below rdepth_exact; deterministic for a given seed.
DepthWitness rdepth_approx(const Dataset& d, const Fit& f, std::size_t n_dirs, std::uint64_t seed);

}  // namespace regdepth
