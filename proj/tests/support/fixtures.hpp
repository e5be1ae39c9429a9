#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "regdepth/core.hpp"
#include "regdepth/random.hpp"

namespace regdepth::testing {

#ifdef REGDEPTH_FIXTURE_DIR
inline std::string fixture_path(const std::string& name) { return std::string(REGDEPTH_FIXTURE_DIR) + "/" + name; }

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}
#endif

inline Dataset four_points() {
  return Dataset::from_rows(2, {{0, 0}, {1, 1}, {5, 0}, {6, 1}}, "four-point");
}

/// Gaussian data, coordinates i.i.d. N(0, 1).
inline Dataset gaussian(std::size_t n, std::size_t p, std::uint64_t seed) {
  SplitMix64 rng(seed);
  std::vector<double> xs(n * (p - 1));
  std::vector<double> ys(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j + 1 < p; ++j) xs[i * (p - 1) + j] = rng.normal();
    ys[i] = rng.normal();
  }
  return Dataset(p, xs, ys);
}

/// Small-integer data: coincident points, collinear x's and exact
/// zero residuals all occur frequently.
inline Dataset lattice(std::size_t n, std::size_t p, std::uint64_t seed, int range = 3) {
  SplitMix64 rng(seed);
  const auto draw = [&] { return static_cast<double>(rng.below(2 * range + 1)) - range; };
  std::vector<double> xs(n * (p - 1));
  std::vector<double> ys(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j + 1 < p; ++j) xs[i * (p - 1) + j] = draw();
    ys[i] = draw();
  }
  return Dataset(p, xs, ys);
}

/// A fit through a random p-subset when possible, otherwise random.
inline Fit some_fit(const Dataset& d, SplitMix64& rng) {
  const std::size_t p = d.p();
  if (rng.below(4) != 0) {
    std::vector<std::size_t> idx;
    while (idx.size() < p) {
      const auto i = static_cast<std::size_t>(rng.below(d.n()));
      bool dup = false;
      for (auto j : idx) dup |= j == i;
      if (!dup) idx.push_back(i);
    }
    try {
      return fit_through_points(d, idx);
    } catch (const DegenerateSubset&) {
    }
  }
  Fit f;
  for (std::size_t j = 0; j < p; ++j) f.beta.push_back(rng.normal());
  return f;
}

}  // namespace regdepth::testing
