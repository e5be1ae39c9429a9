#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace regdepth {

// Error taxonomy. The CLI maps these onto exit codes.
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DegenerateSubset : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct BudgetExceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct AttackConstructionFailed : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A regression sample {(x_i, y_i)} with x_i in R^{p-1}.
///
/// Observation order is significant: every index reported by the library
/// refers to the position in this container.
class Dataset {
 public:
  /// `xs` is row-major with n * (p - 1) entries. Throws InputError when
  /// p < 2, n < p, sizes disagree or a coordinate is not finite.
  Dataset(std::size_t p, std::vector<double> xs, std::vector<double> ys,
          std::string label = {});

  /// Rows are (x_1, ..., x_{p-1}, y).
  static Dataset from_rows(std::size_t p,
                           const std::vector<std::vector<double>>& rows,
                           std::string label = {});

  std::size_t p() const { return p_; }
  std::size_t n() const { return ys_.size(); }
  std::size_t x_dim() const { return p_ - 1; }

  std::span<const double> x(std::size_t i) const {
    return {xs_.data() + i * (p_ - 1), p_ - 1};
  }
  double y(std::size_t i) const { return ys_[i]; }

  const std::vector<double>& xs() const { return xs_; }
  const std::vector<double>& ys() const { return ys_; }
  const std::string& label() const { return label_; }

  /// New dataset with the given observations appended at the end.
  Dataset appended(std::span<const double> xs, std::span<const double> ys) const;
  /// New dataset with every y_i replaced by y_i + (1, x_i') b.
  Dataset shifted(std::span<const double> b) const;
  Dataset relabeled(std::string label) const;

 private:
  std::size_t p_;
  std::vector<double> xs_;
  std::vector<double> ys_;
  std::string label_;
};

/// Candidate parameter beta = (beta_1, beta_2')'.
struct Fit {
  std::vector<double> beta;

  std::size_t p() const { return beta.size(); }
  double intercept() const { return beta.front(); }
  std::span<const double> slopes() const { return {beta.data() + 1, beta.size() - 1}; }
  /// |tan(theta_beta)|, the tangent of the angle between H_beta and y = 0.
  double tan_theta() const;
  double norm() const;
  double predict(std::span<const double> x) const;
};

std::vector<double> residuals(const Dataset& d, const Fit& f);

/// |r| <= 1e-9 (1 + |y| + ||beta|| (1 + ||x||)).
bool is_zero_residual(double r, double y, double beta_norm, std::span<const double> x);

/// Residual signs in {-1, 0, +1} under the zero tolerance above.
std::vector<std::int8_t> residual_signs(const Dataset& d, const Fit& f);

/// The unique fit through the observations in `idx` (|idx| == p).
/// Throws DegenerateSubset when the rows (1, x_i') are singular.
Fit fit_through_points(const Dataset& d, std::span<const std::size_t> idx);

struct GeneralPositionReport {
  bool general = true;    // no p+1 observations on a common hyperplane, every
                          // p-subset determines beta uniquely
  bool x_general = true;  // every p-subset of rows (1, x_i') is nonsingular
  std::vector<std::size_t> offending;  // first violating subset, if any
};

GeneralPositionReport is_general_position(const Dataset& d);

/// C(n, k) saturating at UINT64_MAX.
std::uint64_t binomial(std::uint64_t n, std::uint64_t k);

/// Advances `idx` to the next k-combination of {0..n-1} in lexicographic
/// order. Returns false after the last one.
bool next_combination(std::vector<std::size_t>& idx, std::size_t n);

}  // namespace regdepth
