#pragma once

// Internal: the combinatorial structure behind exact regression depth.
//
// A fit's depth is Z + min over vertical cuts of the points that must be
// touched, where Z counts zero residuals. A cut splits the x-points into a
// left and a right side; with P / N the positive / negative residual sets,
// the two tilts cost |L & P| + |R & N| and |L & N| + |R & P|.
//
// Every realizable split arises from a hyperplane through affinely
// independent x-locations spanning a facet of the current affine hull,
// followed by a split of the points lying on that hyperplane. When the
// on-plane locations are affinely independent any assignment is possible
// and each coincident group simply takes its cheaper side; otherwise the
// on-plane points form a lower-dimensional sub-arrangement.

#include <bit>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "regdepth/core.hpp"

namespace regdepth::detail {

using Word = std::uint64_t;

inline std::size_t words_for(std::size_t n) { return (n + 63) / 64; }

/// h(x) = w'x - c.
struct Affine {
  std::vector<double> w;
  double c = 0.0;

  double operator()(std::span<const double> x) const {
    double s = -c;
    for (std::size_t j = 0; j < w.size(); ++j) s += w[j] * x[j];
    return s;
  }
  Affine negated() const {
    Affine a{w, -c};
    for (auto& e : a.w) e = -e;
    return a;
  }
};

struct SignMasks {
  std::vector<Word> pos;
  std::vector<Word> neg;
  std::size_t zeros = 0;
};

SignMasks make_masks(std::span<const std::int8_t> signs);

inline std::size_t and_count(const Word* a, const Word* b, std::size_t words) {
  std::size_t c = 0;
  for (std::size_t i = 0; i < words; ++i) c += static_cast<std::size_t>(std::popcount(a[i] & b[i]));
  return c;
}

/// Coincidence tolerance that grows with the distance from the bulk of
/// the data (coordinate-wise median), so a few far-away points do not
/// coarsen comparisons among the others.
struct Tolerance {
  std::vector<double> center;
  double rel = 1e-10;

  explicit Tolerance(const Dataset& d);
  double at(std::span<const double> x) const;
};

/// Least-norm affine g with g(q_j) = sign_j at affinely independent points.
Affine interpolate_signs(const std::vector<std::vector<double>>& points,
                         const std::vector<double>& signs);

/// base + eps * g with eps small enough that every point in `off` keeps
/// the sign of `base`.
Affine combine(const Affine& base, const Affine& g, const Dataset& d,
               std::span<const std::size_t> off);

/// Distinct x-locations among `members` (indices into d), using the
/// coincidence tolerance `tol`. Returns groups of member indices.
std::vector<std::vector<std::size_t>> cluster_locations(const Dataset& d,
                                                        std::span<const std::size_t> members,
                                                        const Tolerance& tol);

/// True when the given x-locations (one representative each) are
/// affinely independent.
bool affinely_independent(const Dataset& d, std::span<const std::size_t> reps, const Tolerance& tol);

class CutArrangement {
 public:
  CutArrangement(const Dataset& d, std::uint64_t max_cuts);

  std::size_t words() const { return words_; }
  std::size_t top_cuts() const { return families_.front().cuts.size(); }

  /// min over cuts of the touched nonzero-residual points (Z excluded).
  /// Stops once the running minimum drops below `stop_below`.
  std::size_t eval(const SignMasks& m, std::size_t stop_below = 0) const {
    return eval_family(0, m, stop_below);
  }

  struct Realized {
    Affine f;          // negative side costs P, positive side costs N
    bool flipped = false;  // top-level cut used with its orientation swapped
  };
  Realized realize(const Dataset& d, const SignMasks& m) const;

 private:
  struct Cut {
    Affine plane;                    // negative on the left
    std::vector<std::size_t> on;     // members on the plane
    std::uint32_t group_begin = 0;   // coincident groups (size > 1), in group_words
    std::uint32_t group_end = 0;
    int child = -1;
  };
  struct Family {
    std::vector<std::size_t> members;
    std::vector<Word> lr;            // per cut: left mask then right mask
    std::vector<Cut> cuts;
    std::vector<std::uint8_t> extra; // cut has groups or a child
    std::vector<Word> group_words;
  };

  int build(const Dataset& d, std::vector<std::size_t> members, std::uint64_t max_cuts);
  std::size_t eval_family(int f, const SignMasks& m, std::size_t stop_below) const;
  std::size_t cut_cost(const Family& fam, std::size_t e, const SignMasks& m, bool& flipped) const;
  Affine realize_family(const Dataset& d, int f, const SignMasks& m, bool* top_flipped) const;

  std::size_t words_;
  Tolerance tol_;
  std::vector<Family> families_;
};

}  // namespace regdepth::detail
