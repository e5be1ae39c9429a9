#include <algorithm>

#include "doctest.h"
#include "fixtures.hpp"
#include "rdepth_oracle.hpp"
#include "regdepth/depth.hpp"

using namespace regdepth;
using regdepth::testing::four_points;
using regdepth::testing::gaussian;
using regdepth::testing::lattice;
using regdepth::testing::rdepth_oracle;
using regdepth::testing::some_fit;

namespace {

void check_witness(const Dataset& d, const Fit& f, const DepthWitness& w) {
  CHECK(w.n == d.n());
  CHECK(w.count <= d.n());
  CHECK(w.direction_u.size() == d.x_dim());
  CHECK(replay_count(d, f, w) == w.count);
}

}  // namespace

TEST_CASE("four-point figure values") {
  const auto d = four_points();
  const Fit deepest{{0.0, 1.0}};
  const Fit average{{-11.0 / 4.0, 23.0 / 12.0}};

  const auto w = rdepth_exact(d, deepest);
  CHECK(w.count == 2);
  CHECK(w.fraction == 0.5);
  check_witness(d, deepest, w);
  CHECK(rdepth_sweep_p2(d, deepest).count == 2);
  CHECK(rdepth_oracle(d, deepest) == 2);

  CHECK(rdepth_exact(d, average).count == 0);
  CHECK(rdepth_sweep_p2(d, average).count == 0);
  CHECK(rdepth_oracle(d, average) == 0);
  for (std::uint64_t seed : {1ULL, 7ULL, 99ULL}) CHECK(rdepth_approx(d, average, 5, seed).count == 0);
}

TEST_CASE("points on the fit are all touched") {
  std::vector<double> xs;
  std::vector<double> ys;
  for (int i = 0; i < 9; ++i) {
    xs.push_back(i);
    xs.push_back(i * i % 5);
    ys.push_back(1.0 + 2.0 * i - 0.5 * (i * i % 5));
  }
  const Dataset d(3, xs, ys);
  const Fit f{{1.0, 2.0, -0.5}};
  CHECK(rdepth_exact(d, f).count == 9);
  CHECK(rdepth_oracle(d, f) == 9);

  const auto two = Dataset::from_rows(2, {{0, 1}, {2, 5}});
  const Fit line{{1.0, 2.0}};
  CHECK(rdepth_sweep_p2(two, line).count == 2);
  CHECK(rdepth_exact(two, line).count == 2);
}

TEST_CASE("exact depth matches the tilt oracle on tiny instances") {
  SplitMix64 rng(20240611);
  int checked = 0;
  for (int trial = 0; trial < 400; ++trial) {
    const std::size_t p = 2 + trial % 2;
    const std::size_t n = p + 1 + static_cast<std::size_t>(rng.below(12 - p));
    const auto d = trial % 4 < 2 ? gaussian(n, p, rng.next()) : lattice(n, p, rng.next());
    for (int k = 0; k < 3; ++k) {
      const auto f = some_fit(d, rng);
      const auto w = rdepth_exact(d, f);
      const auto o = rdepth_oracle(d, f);
      INFO("trial " << trial << " n=" << n << " p=" << p);
      CHECK(w.count == o);
      check_witness(d, f, w);
      ++checked;
    }
  }
  CHECK(checked == 1200);
}

TEST_CASE("sweep agrees with exact for simple regression") {
  SplitMix64 rng(77);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 2 + static_cast<std::size_t>(rng.below(39));
    const auto d = trial % 2 ? gaussian(n, 2, rng.next()) : lattice(n, 2, rng.next(), 4);
    const auto f = some_fit(d, rng);
    const auto s = rdepth_sweep_p2(d, f);
    REQUIRE(s.count == rdepth_exact(d, f).count);
    check_witness(d, f, s);
  }
  CHECK_THROWS_AS(rdepth_sweep_p2(gaussian(5, 3, 1), Fit{{0, 0, 0}}), InputError);
}

TEST_CASE("approximate depth never undercuts exact depth") {
  SplitMix64 rng(5);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t p = 2 + trial % 4;
    const std::size_t n = p + 2 + static_cast<std::size_t>(rng.below(14));
    const auto d = trial % 3 ? gaussian(n, p, rng.next()) : lattice(n, p, rng.next());
    const auto f = some_fit(d, rng);
    const auto e = rdepth_exact(d, f);
    const auto a = rdepth_approx(d, f, 20, trial);
    CHECK(a.count >= e.count);
    check_witness(d, f, a);
    check_witness(d, f, e);
    if (p == 2) CHECK(a.count == e.count);
    CHECK(rdepth_approx(d, f, 20, trial).count == a.count);
  }
}

TEST_CASE("exact witnesses replay in higher dimensions") {
  SplitMix64 rng(31337);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t p = 4 + trial % 2;
    const std::size_t n = p + 3 + static_cast<std::size_t>(rng.below(8));
    const auto d = trial % 2 ? gaussian(n, p, rng.next()) : lattice(n, p, rng.next(), 2);
    const auto f = some_fit(d, rng);
    check_witness(d, f, rdepth_exact(d, f));
  }
}

TEST_CASE("depth does not decrease when points are added") {
  SplitMix64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t p = 2 + trial % 3;
    const auto d = trial % 2 ? gaussian(10, p, rng.next()) : lattice(10, p, rng.next());
    const auto f = some_fit(d, rng);
    const auto extra = trial % 2 ? gaussian(p + rng.below(4), p, rng.next()) : lattice(4, p, rng.next());
    const auto bigger = d.appended(extra.xs(), extra.ys());
    CHECK(rdepth_exact(bigger, f).count >= rdepth_exact(d, f).count);
  }
}

TEST_CASE("depth counts are regression equivariant") {
  SplitMix64 rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t p = 2 + trial % 3;
    const auto d = gaussian(12, p, rng.next());
    const auto f = some_fit(d, rng);
    std::vector<double> b(p);
    for (auto& e : b) e = rng.normal(0.0, 3.0);
    Fit g = f;
    for (std::size_t j = 0; j < p; ++j) g.beta[j] += b[j];
    CHECK(rdepth_exact(d.shifted(b), g).count == rdepth_exact(d, f).count);
  }
}

TEST_CASE("index reuse and early exit") {
  const auto d = gaussian(25, 3, 8);
  const ExactDepthIndex idx(d);
  CHECK(idx.cut_count() == 1 + 25 * 24 / 2);
  SplitMix64 rng(2);
  for (int k = 0; k < 50; ++k) {
    const auto f = some_fit(d, rng);
    const auto s = residual_signs(d, f);
    const auto full = idx.count(s);
    CHECK(full == rdepth_exact(d, f).count);
    const auto cut = idx.count(s, full + 1);
    CHECK(cut == full);
    if (full > 0) CHECK(idx.count(s, full) >= full);
  }
  CHECK_THROWS_AS(ExactDepthIndex(gaussian(40, 4, 1), 100), BudgetExceeded);
}
