#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fixtures.hpp"
#include "regdepth/breakdown.hpp"
#include "regdepth/linalg.hpp"

using namespace regdepth;
using regdepth::testing::four_points;
using regdepth::testing::gaussian;

namespace {

bool has_flag(const BreakdownBounds& b, const std::string& f) {
  return std::find(b.flags.begin(), b.flags.end(), f) != b.flags.end();
}

Dataset collinear(int n) {
  std::vector<std::vector<double>> rows;
  for (int i = 0; i < n; ++i) rows.push_back({double(i), 1.0 + 2.0 * i});
  return Dataset::from_rows(2, rows, "collinear");
}

double dist(const Fit& a, const Fit& b) {
  double s = 0.0;
  for (std::size_t j = 0; j < a.p(); ++j) s += (a.beta[j] - b.beta[j]) * (a.beta[j] - b.beta[j]);
  return std::sqrt(s);
}

}  // namespace

TEST_CASE("rational arithmetic") {
  CHECK(Rational(2, 4) == Rational(1, 2));
  CHECK(Rational(3, -6) == Rational(-1, 2));
  CHECK((Rational(1, 3) + Rational(1, 6)) == Rational(1, 2));
  CHECK((Rational(1, 3) - Rational(1, 2)) == Rational(-1, 6));
  CHECK((Rational(2, 3) * Rational(9, 4)) == Rational(3, 2));
  CHECK((Rational(2, 3) / Rational(4, 9)) == Rational(3, 2));
  CHECK(Rational(1, 3) < Rational(1, 2));
  CHECK(Rational(-1, 5).str() == "-1/5");
  CHECK(Rational(0, 7).str() == "0/1");
  CHECK(Rational(3, 8).to_double() == doctest::Approx(0.375));
  CHECK_THROWS(Rational(1, 0));
}

TEST_CASE("bounds of the four-point sample") {
  const auto b = bounds_report(four_points(), DepthMode::exact);
  CHECK(b.k_star == 2);
  CHECK(b.m_min == 1);
  CHECK(b.abp_exact == Rational(1, 5));
  CHECK(b.rbp_ub == Rational(1, 4));
  CHECK(b.rh99_lb == Rational(1, 4));
  CHECK(b.equivariant_ub == Rational(3, 7));
  CHECK(b.asymptotic_ref == Rational(1, 3));
  CHECK(b.flags.empty());
}

TEST_CASE("bounds grid") {
  for (std::size_t p = 2; p <= 6; ++p) {
    for (std::size_t n = p; n <= 40; ++n) {
      for (std::size_t k = p - 1; k <= n; ++k) {
        const auto b = bounds_from(n, p, k);
        const auto N = static_cast<std::int64_t>(n);
        const auto P = static_cast<std::int64_t>(p);
        const std::int64_t m = static_cast<std::int64_t>(k) - P + 1;
        std::int64_t c = 0;
        while (c * (P + 1) < N) ++c;
        CHECK(b.abp_exact == Rational(m, N + m));
        CHECK(b.rbp_ub == Rational(m, N));
        CHECK(b.rh99_lb == Rational(c - P + 1, N));
        CHECK(b.equivariant_ub == Rational(N - P + 1, 2 * N - P + 1));
        CHECK(has_flag(b, "rh99_lb_uninformative") == (c - P + 1 <= 0));
        CHECK_FALSE(has_flag(b, "k_star_approximate"));
      }
    }
  }
  const auto b = bounds_from(10, 5, 4);
  CHECK(b.rh99_lb == Rational(-1, 5));
  CHECK(has_flag(b, "rh99_lb_uninformative"));
  CHECK(has_flag(bounds_from(10, 2, 4, DepthMode::approximate), "k_star_approximate"));
  CHECK_THROWS_AS(bounds_from(3, 4, 1), InputError);
  CHECK_THROWS_AS(bounds_from(5, 2, 6), InputError);
}

TEST_CASE("bounds do not change under regression shifts") {
  SplitMix64 rng(5);
  for (int rep = 0; rep < 20; ++rep) {
    const std::size_t p = 2 + rep % 2;
    const auto d = gaussian(7 + rep % 4, p, 300 + rep);
    std::vector<double> b(p);
    for (auto& e : b) e = 3.0 * rng.normal();
    const auto a = bounds_report(d, DepthMode::exact);
    const auto s = bounds_report(d.shifted(b), DepthMode::exact);
    CHECK(a.k_star == s.k_star);
    CHECK(a.abp_exact == s.abp_exact);
  }
}

TEST_CASE("bounded certificate is the largest fit through p points") {
  CHECK(bounded_certificate(four_points()) == doctest::Approx(std::sqrt(26.0)));
}

TEST_CASE("null-space pair") {
  const auto d = Dataset::from_rows(2, {{1.0, 2.0}, {2.0, 0.5}, {4.0, 3.0}});
  const auto pr = attack_nullspace_pair(d, 2.0);
  CHECK(pr.m == 2);
  REQUIRE(pr.u.size() == 2);
  // u is orthogonal to (1, x_3).
  CHECK(pr.u[0] + 4.0 * pr.u[1] == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(std::hypot(pr.u[0], pr.u[1]) > 0.0);
  CHECK(pr.b[0] == doctest::Approx(2.0 * pr.u[0]));
  CHECK(pr.first.n() == 5);
  CHECK(pr.second.n() == 5);

  const auto back = pr.first.shifted(std::vector<double>{-pr.b[0], -pr.b[1]});
  for (std::size_t i = 0; i < back.n(); ++i) {
    CHECK(back.x(i)[0] == pr.second.x(i)[0]);
    CHECK(back.y(i) == doctest::Approx(pr.second.y(i)));
  }

  const auto same = attack_nullspace_pair(d, 0.0);
  for (std::size_t i = 0; i < same.first.n(); ++i) {
    // The second sample is a permutation of the first when lambda = 0.
    bool found = false;
    for (std::size_t j = 0; j < same.second.n(); ++j)
      found |= same.first.x(i)[0] == same.second.x(j)[0] && same.first.y(i) == same.second.y(j);
    CHECK(found);
  }
}

TEST_CASE("null-space pair: deepest fits differ by b") {
  for (std::size_t p : {2u, 3u}) {
    const auto d = gaussian(p + 2, p, 70 + p);
    for (double lambda : {1.0, 10.0, 1000.0}) {
      const auto pr = attack_nullspace_pair(d, lambda);
      const auto a = k_star_exact(pr.first);
      const auto b = k_star_exact(pr.second);
      CHECK(a.k_star == b.k_star);
      Fit diff{a.t_star.beta};
      for (std::size_t j = 0; j < p; ++j) diff.beta[j] -= b.t_star.beta[j];
      const double unorm = std::sqrt(std::inner_product(pr.u.begin(), pr.u.end(), pr.u.begin(), 0.0));
      CHECK(diff.norm() == doctest::Approx(lambda * unorm).epsilon(1e-6));
    }
  }
}

TEST_CASE("addition attack: verified plan replays") {
  // Samples where a verified placement exists.
  for (int f : {11, 12, 14}) {
    const auto d = gaussian(6 + f % 5, 3, 1000 + f);
    const auto clean = k_star_exact(d);
    const auto sw = attack_sweep(d, AttackKind::addition_vertical_mass, {1e2, 1e4, 1e6}, 7 + f);
    REQUIRE(sw.runs.size() == 3);
    for (std::size_t t = 0; t < 3; ++t) {
      const auto& run = sw.runs[t];
      const auto& plan = run.plan;
      CHECK(plan.m == clean.k_star - 2);
      CHECK(plan.k_star == clean.k_star);
      CHECK(run.contaminated.n() == d.n() + plan.m);
      // Replay on the contaminated sample.
      const auto r = k_star_exact(run.contaminated);
      CHECK(r.k_star == clean.k_star);
      REQUIRE(plan.beta_c);
      CHECK(rdepth_exact(run.contaminated, *plan.beta_c).count == clean.k_star);
      bool listed = false;
      for (const auto& mx : r.maximizers) listed |= same_fit(mx.fit, *plan.beta_c);
      CHECK(listed);
      CHECK(dist(r.t_star, plan.contaminated_t_star) < 1e-9 * (1.0 + r.t_star.norm()));
      if (t > 0) CHECK(sw.t_star_norms[t] >= 50.0 * sw.t_star_norms[t - 1]);
    }
  }
}

TEST_CASE("addition attack: no verified placement for the four-point sample") {
  // Every site lets one original fit reach depth 3 once a far point is
  // added, so the fit through Z is never deepest.
  CHECK_THROWS_AS(attack_addition(four_points(), 1e6, 3), AttackConstructionFailed);
}

TEST_CASE("empirical search") {
  const auto fp = empirical_breakdown_search(four_points(), Contamination::addition, 0, 1);
  CHECK(fp.m_emp == 1);
  CHECK(fp.strategy.empty());

  const auto s = empirical_breakdown_search(four_points(), Contamination::addition, 4, 5);
  CHECK(s.m_emp >= 1);
  CHECK(s.m_emp <= 2);
  REQUIRE(s.t_star_norms.size() == 3);
  CHECK(s.t_star_norms[2] > 1e4);

  for (int n : {3, 4, 5, 6}) {
    const auto d = collinear(n);
    CHECK(k_star_exact(d).k_star == static_cast<std::size_t>(n));
    const auto c = empirical_breakdown_search(d, Contamination::addition, n + 1, 3);
    CHECK(c.m_emp == static_cast<std::size_t>(n - 1));
  }
}

TEST_CASE("battery below the breakdown size stays bounded") {
  for (int f : {11, 12, 14, 16, 17, 19}) {
    const auto d = gaussian(6 + f % 5, 3, 1000 + f);
    const auto k = k_star_exact(d).k_star;
    const auto b = run_attack_battery(d, Contamination::addition, k - 3, 11 + f);
    CHECK_FALSE(b.diverged);
    CHECK(b.max_t_star_norm <= bounded_certificate(d));
  }
}

TEST_CASE("replacement attack keeps n") {
  const auto d = collinear(6);
  const auto b = run_attack_battery(d, Contamination::replacement, 3, 4);
  CHECK(b.diverged);
  REQUIRE(b.plan);
  CHECK(b.plan->replaced_indices.size() == 3);
}
