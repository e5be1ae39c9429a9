#include "regdepth/core.hpp"

#include <cmath>
#include <limits>
#include <numeric>

#include "regdepth/linalg.hpp"

namespace regdepth {

Dataset::Dataset(std::size_t p, std::vector<double> xs, std::vector<double> ys, std::string label)
    : p_(p), xs_(std::move(xs)), ys_(std::move(ys)), label_(std::move(label)) {
  if (p_ < 2) throw InputError("dataset: p must be at least 2");
  if (xs_.size() != ys_.size() * (p_ - 1))
    throw InputError("dataset: x block has " + std::to_string(xs_.size()) + " entries, expected " +
                     std::to_string(ys_.size() * (p_ - 1)));
  if (ys_.size() < p_)
    throw InputError("dataset: n = " + std::to_string(ys_.size()) + " is smaller than p = " +
                     std::to_string(p_));
  for (double v : xs_)
    if (!std::isfinite(v)) throw InputError("dataset: non-finite x coordinate");
  for (double v : ys_)
    if (!std::isfinite(v)) throw InputError("dataset: non-finite y value");
}

Dataset Dataset::from_rows(std::size_t p, const std::vector<std::vector<double>>& rows,
                           std::string label) {
  std::vector<double> xs;
  std::vector<double> ys;
  xs.reserve(rows.size() * (p > 0 ? p - 1 : 0));
  for (const auto& r : rows) {
    if (r.size() != p) throw InputError("dataset: row has " + std::to_string(r.size()) +
                                        " values, expected " + std::to_string(p));
    xs.insert(xs.end(), r.begin(), r.end() - 1);
    ys.push_back(r.back());
  }
  return Dataset(p, std::move(xs), std::move(ys), std::move(label));
}

Dataset Dataset::appended(std::span<const double> xs, std::span<const double> ys) const {
  std::vector<double> nx = xs_;
  std::vector<double> ny = ys_;
  nx.insert(nx.end(), xs.begin(), xs.end());
  ny.insert(ny.end(), ys.begin(), ys.end());
  return Dataset(p_, std::move(nx), std::move(ny), label_);
}

Dataset Dataset::shifted(std::span<const double> b) const {
  if (b.size() != p_) throw InputError("shift vector has wrong length");
  std::vector<double> ny = ys_;
  for (std::size_t i = 0; i < n(); ++i) {
    double s = b[0];
    const auto xi = x(i);
    for (std::size_t j = 0; j + 1 < p_; ++j) s += xi[j] * b[j + 1];
    ny[i] += s;
  }
  return Dataset(p_, xs_, std::move(ny), label_);
}

Dataset Dataset::relabeled(std::string label) const {
  Dataset d = *this;
  d.label_ = std::move(label);
  return d;
}

double Fit::tan_theta() const { return linalg::norm(slopes()); }

double Fit::norm() const { return linalg::norm(beta); }

double Fit::predict(std::span<const double> x) const {
  double s = beta[0];
  for (std::size_t j = 0; j < x.size(); ++j) s += x[j] * beta[j + 1];
  return s;
}

std::vector<double> residuals(const Dataset& d, const Fit& f) {
  if (f.p() != d.p())
    throw InputError("fit has " + std::to_string(f.p()) + " coefficients, dataset has p = " +
                     std::to_string(d.p()));
  std::vector<double> r(d.n());
  for (std::size_t i = 0; i < d.n(); ++i) r[i] = d.y(i) - f.predict(d.x(i));
  return r;
}

bool is_zero_residual(double r, double y, double beta_norm, std::span<const double> x) {
  const double tol = 1e-9 * (1.0 + std::abs(y) + beta_norm * (1.0 + linalg::norm(x)));
  return std::abs(r) <= tol;
}

std::vector<std::int8_t> residual_signs(const Dataset& d, const Fit& f) {
  const auto r = residuals(d, f);
  const double bn = f.norm();
  std::vector<std::int8_t> s(r.size());
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (is_zero_residual(r[i], d.y(i), bn, d.x(i)))
      s[i] = 0;
    else
      s[i] = r[i] > 0 ? 1 : -1;
  }
  return s;
}

Fit fit_through_points(const Dataset& d, std::span<const std::size_t> idx) {
  const std::size_t p = d.p();
  if (idx.size() != p)
    throw InputError("fit_through_points needs exactly p = " + std::to_string(p) + " indices");
  std::vector<double> a(p * p);
  std::vector<double> b(p);
  for (std::size_t r = 0; r < p; ++r) {
    if (idx[r] >= d.n()) throw InputError("fit_through_points: index out of range");
    a[r * p] = 1.0;
    const auto xi = d.x(idx[r]);
    for (std::size_t j = 0; j + 1 < p; ++j) a[r * p + j + 1] = xi[j];
    b[r] = d.y(idx[r]);
  }
  auto z = linalg::solve(std::move(a), std::move(b), p);
  if (!z) throw DegenerateSubset("selected observations lie in a common vertical hyperplane");
  return Fit{std::move(*z)};
}

std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  unsigned __int128 r = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    r = r * (n - k + i) / i;
    if (r > std::numeric_limits<std::uint64_t>::max()) return std::numeric_limits<std::uint64_t>::max();
  }
  return static_cast<std::uint64_t>(r);
}

bool next_combination(std::vector<std::size_t>& idx, std::size_t n) {
  const std::size_t k = idx.size();
  if (k == 0 || k > n) return false;
  std::size_t i = k;
  while (i-- > 0) {
    if (idx[i] < n - k + i) {
      ++idx[i];
      for (std::size_t j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
      return true;
    }
  }
  return false;
}

GeneralPositionReport is_general_position(const Dataset& d) {
  const std::size_t p = d.p();
  const std::size_t n = d.n();
  GeneralPositionReport rep;

  // p+1 observations on a common hyperplane of (x, y)-space.
  if (n >= p + 1) {
    if (binomial(n, p + 1) > 200'000'000ULL)
      throw BudgetExceeded("general-position check: too many subsets");
    std::vector<std::size_t> idx(p + 1);
    std::iota(idx.begin(), idx.end(), 0);
    std::vector<double> m((p + 1) * (p + 1));
    do {
      for (std::size_t r = 0; r <= p; ++r) {
        m[r * (p + 1)] = 1.0;
        const auto xi = d.x(idx[r]);
        for (std::size_t j = 0; j + 1 < p; ++j) m[r * (p + 1) + j + 1] = xi[j];
        m[r * (p + 1) + p] = d.y(idx[r]);
      }
      if (linalg::rank(m, p + 1, p + 1) < p + 1) {
        rep.general = false;
        rep.offending = idx;
        break;
      }
    } while (next_combination(idx, n));
  }

  // p observations whose design rows are singular (x's on a (p-2)-flat).
  if (binomial(n, p) > 200'000'000ULL)
    throw BudgetExceeded("general-position check: too many subsets");
  std::vector<std::size_t> idx(p);
  std::iota(idx.begin(), idx.end(), 0);
  std::vector<double> m(p * p);
  do {
    for (std::size_t r = 0; r < p; ++r) {
      m[r * p] = 1.0;
      const auto xi = d.x(idx[r]);
      for (std::size_t j = 0; j + 1 < p; ++j) m[r * p + j + 1] = xi[j];
    }
    if (linalg::rank(m, p, p) < p) {
      rep.x_general = false;
      if (rep.general) {
        rep.general = false;
        rep.offending = idx;
      }
      break;
    }
  } while (next_combination(idx, n));
  return rep;
}

}  // namespace regdepth
