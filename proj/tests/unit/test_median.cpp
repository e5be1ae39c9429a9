#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "fixtures.hpp"
#include "rdepth_oracle.hpp"
#include "regdepth/median.hpp"

using namespace regdepth;
using regdepth::testing::four_points;
using regdepth::testing::gaussian;
using regdepth::testing::lattice;

namespace {

bool has_fit(const DeepestFitResult& r, const Fit& f) {
  return std::any_of(r.maximizers.begin(), r.maximizers.end(),
                     [&](const Maximizer& m) { return same_fit(m.fit, f); });
}

std::size_t ceil_div(std::size_t a, std::size_t b) { return (a + b - 1) / b; }

}  // namespace

TEST_CASE("four-point deepest lines") {
  const auto d = four_points();
  const auto r = k_star_exact(d);
  CHECK(r.k_star == 2);
  CHECK(r.mode == DepthMode::exact);
  REQUIRE(r.maximizers.size() == 6);
  for (const Fit& f : {Fit{{0, 1}}, Fit{{-5, 1}}, Fit{{1, 0}}, Fit{{0, 0}}, Fit{{0, 1.0 / 6.0}},
                       Fit{{5.0 / 4.0, -1.0 / 4.0}}})
    CHECK(has_fit(r, f));
  // Average of the six lines.
  CHECK(r.t_star.beta[0] == doctest::Approx(-11.0 / 24.0).epsilon(1e-15));
  CHECK(r.t_star.beta[1] == doctest::Approx(23.0 / 72.0).epsilon(1e-15));
  for (const auto& m : r.maximizers) {
    CHECK(m.witness.count == 2);
    CHECK(replay_count(d, m.fit, m.witness) == 2);
    CHECK(m.indices.size() == 2);
  }
  CHECK(r.maximizers.front().indices == std::vector<std::size_t>{0, 1});
}

TEST_CASE("collinear data has a unique deepest line") {
  std::vector<std::vector<double>> rows;
  for (int i = 0; i < 9; ++i) rows.push_back({0.5 * i, 3.0 - 2.0 * 0.5 * i});
  const auto d = Dataset::from_rows(2, rows);
  const auto r = k_star_exact(d);
  CHECK(r.k_star == 9);
  REQUIRE(r.maximizers.size() == 1);
  CHECK(r.t_star.beta[0] == doctest::Approx(3.0));
  CHECK(r.t_star.beta[1] == doctest::Approx(-2.0));
}

TEST_CASE("exhaustive maximum agrees with brute-force depth") {
  for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
    const auto d = gaussian(20, 2, seed);
    const auto r = k_star_exact(d);
    std::size_t k = 0;
    std::vector<std::size_t> idx{0, 1};
    do k = std::max(k, regdepth::testing::rdepth_oracle_unguarded(d, fit_through_points(d, idx)));
    while (next_combination(idx, d.n()));
    CHECK(r.k_star == k);
  }
  SplitMix64 rng(9);
  for (int t = 0; t < 20; ++t) {
    const auto d = t % 2 ? gaussian(9, 3, rng.next()) : lattice(9, 3, rng.next());
    DeepestFitResult r;
    try {
      r = k_star_exact(d);
    } catch (const InputError&) {
      continue;
    }
    std::size_t k = 0;
    std::vector<std::size_t> idx{0, 1, 2};
    do {
      try {
        k = std::max(k, regdepth::testing::rdepth_oracle(d, fit_through_points(d, idx)));
      } catch (const DegenerateSubset&) {
      }
    } while (next_combination(idx, d.n()));
    CHECK(r.k_star == k);
  }
}

TEST_CASE("deepest fits reach the ceiling bound on data in general position") {
  SplitMix64 rng(123);
  for (int t = 0; t < 40; ++t) {
    const std::size_t p = 2 + t % 3;
    const std::size_t n = p + 2 + static_cast<std::size_t>(rng.below(10));
    const auto d = gaussian(n, p, rng.next());
    REQUIRE(is_general_position(d).general);
    CHECK(k_star_exact(d).k_star >= ceil_div(n, p + 1));
  }
}

TEST_CASE("maximizers move with regression shifts") {
  SplitMix64 rng(4);
  for (int t = 0; t < 20; ++t) {
    const std::size_t p = 2 + t % 2;
    const auto d = gaussian(11, p, rng.next());
    std::vector<double> b(p);
    for (auto& e : b) e = rng.normal(0.0, 2.0);
    const auto r0 = k_star_exact(d);
    const auto r1 = k_star_exact(d.shifted(b));
    CHECK(r0.k_star == r1.k_star);
    REQUIRE(r0.maximizers.size() == r1.maximizers.size());
    for (std::size_t m = 0; m < r0.maximizers.size(); ++m) {
      CHECK(r0.maximizers[m].indices == r1.maximizers[m].indices);
      for (std::size_t j = 0; j < p; ++j)
        CHECK(r1.maximizers[m].fit.beta[j] ==
              doctest::Approx(r0.maximizers[m].fit.beta[j] + b[j]).epsilon(1e-9));
    }
    for (std::size_t j = 0; j < p; ++j)
      CHECK(std::abs(r1.t_star.beta[j] - r0.t_star.beta[j] - b[j]) <= 1e-9 * (1 + std::abs(b[j])));
  }
}

TEST_CASE("small perturbations of a deepest fit do not deepen it") {
  SplitMix64 rng(6);
  for (int t = 0; t < 30; ++t) {
    const std::size_t p = 2 + t % 2;
    const auto d = gaussian(8 + t % 5, p, rng.next());
    const auto r = k_star_exact(d);
    for (const auto& m : r.maximizers)
      for (int k = 0; k < 10; ++k) {
        Fit f = m.fit;
        for (auto& e : f.beta) e += rng.normal(0.0, 1e-3);
        CHECK(regdepth::testing::rdepth_oracle(d, f) <= r.k_star);
      }
  }
}

TEST_CASE("results do not depend on the worker count") {
  const auto d = gaussian(40, 3, 17);
  MedianOptions one;
  one.workers = 1;
  MedianOptions many;
  many.workers = 4;
  const auto a = k_star_exact(d, one);
  const auto b = k_star_exact(d, many);
  CHECK(a.k_star == b.k_star);
  REQUIRE(a.maximizers.size() == b.maximizers.size());
  for (std::size_t m = 0; m < a.maximizers.size(); ++m) {
    CHECK(a.maximizers[m].indices == b.maximizers[m].indices);
    CHECK(a.maximizers[m].fit.beta == b.maximizers[m].fit.beta);
  }
  CHECK(a.t_star.beta == b.t_star.beta);

  const auto c = k_star_approx(d, 300, 40, 5, one);
  const auto e = k_star_approx(d, 300, 40, 5, many);
  CHECK(c.k_star == e.k_star);
  CHECK(c.t_star.beta == e.t_star.beta);
}

TEST_CASE("approximate mode") {
  const auto d = four_points();
  const auto a = k_star_approx(d, 6, 10, 1);
  const auto e = k_star_exact(d);
  CHECK(a.mode == DepthMode::approximate);
  CHECK(a.k_star == e.k_star);
  REQUIRE(a.maximizers.size() == e.maximizers.size());
  CHECK(a.t_star.beta == e.t_star.beta);

  // p = 2, n = 50 with 2000 subsets covers all C(50, 2) = 1225.
  int agree = 0;
  for (std::uint64_t s = 0; s < 100; ++s) {
    const auto g = gaussian(50, 2, 1000 + s);
    agree += k_star_approx(g, 2000, 10, s).k_star == k_star_exact(g).k_star;
  }
  CHECK(agree >= 98);

  const auto big = gaussian(200, 5, 99);
  std::size_t last = 0;
  for (std::size_t subsets : {50, 200, 800}) {
    const auto r = k_star_approx(big, subsets, 60, 3);
    CHECK(r.mode == DepthMode::approximate);
    CHECK(r.k_star >= last);
    CHECK(r.k_star <= big.n());
    last = r.k_star;
  }
  CHECK(last > 0);
}

TEST_CASE("budget") {
  const auto d = gaussian(60, 5, 1);
  MedianOptions opt;
  opt.budget.max_subsets = 1000;
  CHECK_THROWS_AS(k_star_exact(d, opt), BudgetExceeded);
  CHECK(exact_cost(d).first == binomial(60, 5));
}

TEST_CASE("swap search from the best screened subsets") {
  MedianOptions plain;
  MedianOptions refined;
  refined.refine_starts = 16;
  int agree = 0;
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto g = gaussian(50, 3, 3000 + s);
    const auto e = k_star_exact(g).k_star;
    const auto a = k_star_approx(g, 2000, 200, s, plain).k_star;
    const auto r = k_star_approx(g, 2000, 200, s, refined);
    CHECK(r.mode == DepthMode::approximate);
    CHECK(r.k_star >= a);
    CHECK(r.k_star <= e);
    CHECK(r.subsets_examined >= 2000);
    agree += r.k_star == e;
  }
  CHECK(agree >= 18);

  MedianOptions many = refined;
  many.workers = 4;
  const auto d = gaussian(40, 3, 17);
  const auto x = k_star_approx(d, 300, 40, 5, refined);
  const auto y = k_star_approx(d, 300, 40, 5, many);
  CHECK(x.k_star == y.k_star);
  CHECK(x.t_star.beta == y.t_star.beta);
}
