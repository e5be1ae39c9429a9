#pragma once

#include <optional>
#include <span>
#include <vector>

// Small dense linear algebra used by the geometric kernels. Dimensions are
// at most ~10, so everything is row-major std::vector and plain loops.
namespace regdepth::linalg {

/// Scaled-pivot threshold below which a system is reported singular.
inline constexpr double kSingularPivot = 1e-12;

/// Solves A z = b for square A (row-major, dim x dim) with scaled partial
/// pivoting. Returns nullopt when a scaled pivot falls below kSingularPivot.
std::optional<std::vector<double>> solve(std::vector<double> a, std::vector<double> b,
                                         std::size_t dim);

/// Numerical rank of a row-major rows x cols matrix (scaled elimination).
std::size_t rank(std::vector<double> a, std::size_t rows, std::size_t cols);

/// Modified Gram-Schmidt. Appends to `basis` the normalized component of
/// `v` orthogonal to it, if that component is larger than `tol * |v|`.
/// Returns true when the basis grew.
bool extend_basis(std::vector<std::vector<double>>& basis, std::span<const double> v,
                  double tol = 1e-10);

/// A unit vector orthogonal to every row of `rows` (each of length dim),
/// or nullopt when the rows span the whole space. The sign is fixed so the
/// last nonzero component is positive.
std::optional<std::vector<double>> null_vector(const std::vector<std::vector<double>>& rows,
                                               std::size_t dim);

double dot(std::span<const double> a, std::span<const double> b);
double norm(std::span<const double> a);

}  // namespace regdepth::linalg
