#include "regdepth/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace regdepth::linalg {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

std::optional<std::vector<double>> solve(std::vector<double> a, std::vector<double> b,
                                         std::size_t dim) {
  std::vector<double> scale(dim, 0.0);
  for (std::size_t i = 0; i < dim; ++i) {
    for (std::size_t j = 0; j < dim; ++j) scale[i] = std::max(scale[i], std::abs(a[i * dim + j]));
    if (scale[i] == 0.0) return std::nullopt;
  }
  for (std::size_t k = 0; k < dim; ++k) {
    std::size_t piv = k;
    double best = -1.0;
    for (std::size_t i = k; i < dim; ++i) {
      const double s = std::abs(a[i * dim + k]) / scale[i];
      if (s > best) {
        best = s;
        piv = i;
      }
    }
    if (best < kSingularPivot) return std::nullopt;
    if (piv != k) {
      for (std::size_t j = 0; j < dim; ++j) std::swap(a[k * dim + j], a[piv * dim + j]);
      std::swap(b[k], b[piv]);
      std::swap(scale[k], scale[piv]);
    }
    for (std::size_t i = k + 1; i < dim; ++i) {
      const double f = a[i * dim + k] / a[k * dim + k];
      if (f == 0.0) continue;
      for (std::size_t j = k; j < dim; ++j) a[i * dim + j] -= f * a[k * dim + j];
      b[i] -= f * b[k];
    }
  }
  std::vector<double> z(dim);
  for (std::size_t ii = dim; ii-- > 0;) {
    double s = b[ii];
    for (std::size_t j = ii + 1; j < dim; ++j) s -= a[ii * dim + j] * z[j];
    z[ii] = s / a[ii * dim + ii];
  }
  return z;
}

std::size_t rank(std::vector<double> a, std::size_t rows, std::size_t cols) {
  std::vector<double> scale(rows, 0.0);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) scale[i] = std::max(scale[i], std::abs(a[i * cols + j]));
  std::vector<bool> used(rows, false);
  std::size_t r = 0;
  for (std::size_t k = 0; k < cols && r < rows; ++k) {
    std::size_t piv = rows;
    double best = kSingularPivot;
    for (std::size_t i = 0; i < rows; ++i) {
      if (used[i] || scale[i] == 0.0) continue;
      const double s = std::abs(a[i * cols + k]) / scale[i];
      if (s >= best) {
        best = s;
        piv = i;
      }
    }
    if (piv == rows) continue;
    used[piv] = true;
    ++r;
    for (std::size_t i = 0; i < rows; ++i) {
      if (used[i]) continue;
      const double f = a[i * cols + k] / a[piv * cols + k];
      for (std::size_t j = k; j < cols; ++j) a[i * cols + j] -= f * a[piv * cols + j];
    }
  }
  return r;
}

bool extend_basis(std::vector<std::vector<double>>& basis, std::span<const double> v,
                  double tol) {
  std::vector<double> w(v.begin(), v.end());
  const double n0 = norm(w);
  if (n0 == 0.0) return false;
  // Two passes of modified Gram-Schmidt keep the basis orthonormal to
  // working precision.
  for (int pass = 0; pass < 2; ++pass) {
    for (const auto& q : basis) {
      const double c = dot(w, q);
      for (std::size_t i = 0; i < w.size(); ++i) w[i] -= c * q[i];
    }
  }
  const double n1 = norm(w);
  if (n1 <= tol * n0) return false;
  for (auto& e : w) e /= n1;
  basis.push_back(std::move(w));
  return true;
}

std::optional<std::vector<double>> null_vector(const std::vector<std::vector<double>>& rows,
                                               std::size_t dim) {
  std::vector<std::vector<double>> basis;
  for (const auto& r : rows) extend_basis(basis, r);
  if (basis.size() >= dim) return std::nullopt;
  // Project each coordinate axis onto the orthogonal complement and keep the
  // longest residual.
  std::vector<double> best;
  double best_norm = 0.0;
  for (std::size_t k = 0; k < dim; ++k) {
    std::vector<double> e(dim, 0.0);
    e[k] = 1.0;
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& q : basis) {
        const double c = dot(e, q);
        for (std::size_t i = 0; i < dim; ++i) e[i] -= c * q[i];
      }
    }
    const double nr = norm(e);
    if (nr > best_norm + 1e-12) {
      best_norm = nr;
      best = std::move(e);
    }
  }
  if (best_norm < 1e-8) return std::nullopt;
  for (auto& e : best) e /= best_norm;
  for (std::size_t k = dim; k-- > 0;) {
    if (std::abs(best[k]) > 1e-14) {
      if (best[k] < 0)
        for (auto& e : best) e = -e;
      break;
    }
  }
  return best;
}

}  // namespace regdepth::linalg
