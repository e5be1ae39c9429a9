#include "regdepth/breakdown.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "regdepth/linalg.hpp"
#include "regdepth/random.hpp"

namespace regdepth {

const char* to_string(AttackKind k) {
  switch (k) {
    case AttackKind::addition_vertical_mass:
      return "addition_vertical_mass";
    case AttackKind::replacement_vertical_mass:
      return "replacement_vertical_mass";
    case AttackKind::nullspace_pair:
      return "nullspace_pair";
    case AttackKind::far_point:
      return "far_point";
  }
  return "unknown";
}

BreakdownBounds bounds_from(std::size_t n, std::size_t p, std::size_t k_star, DepthMode mode) {
  if (p < 2 || n < p) throw InputError("bounds: need n >= p >= 2");
  if (k_star > n) throw InputError("bounds: k* cannot exceed n");
  const auto N = static_cast<std::int64_t>(n);
  const auto P = static_cast<std::int64_t>(p);
  BreakdownBounds b;
  b.n = n;
  b.p = p;
  b.k_star = k_star;
  b.mode = mode;
  b.m_min = static_cast<std::int64_t>(k_star) - P + 1;
  b.abp_exact = Rational(b.m_min, N + b.m_min);
  b.rbp_ub = Rational(b.m_min, N);
  const std::int64_t ceil_ratio = (N + P) / (P + 1);  // ceil(n / (p + 1))
  b.rh99_lb = Rational(ceil_ratio - P + 1, N);
  b.equivariant_ub = Rational(N - P + 1, 2 * N - P + 1);
  if (b.rh99_lb <= Rational(0)) b.flags.emplace_back("rh99_lb_uninformative");
  if (mode == DepthMode::approximate) b.flags.emplace_back("k_star_approximate");
  if (b.m_min <= N - P + 1 && b.abp_exact > b.equivariant_ub)
    b.flags.emplace_back("abp_above_equivariant_bound");
  return b;
}

BreakdownBounds bounds_report(const Dataset& d, DepthMode mode, const MedianOptions& opt,
                              const ApproxParams& approx) {
  MedianOptions o = opt;
  o.refine_starts = approx.refine_starts;
  const auto r = mode == DepthMode::exact
                     ? k_star_exact(d, o)
                     : k_star_approx(d, approx.n_subsets, approx.n_dirs, approx.seed, o);
  return bounds_from(d.n(), d.p(), r.k_star, r.mode);
}

double bounded_certificate(const Dataset& d) {
  double best = 0.0;
  std::vector<std::size_t> idx(d.p());
  std::iota(idx.begin(), idx.end(), 0);
  do {
    try {
      best = std::max(best, fit_through_points(d, idx).norm());
    } catch (const DegenerateSubset&) {
    }
  } while (next_combination(idx, d.n()));
  return best;
}

namespace {

double x_spread(const Dataset& d) {
  double s = 0.0;
  for (std::size_t j = 0; j < d.x_dim(); ++j) {
    double lo = d.x(0)[j], hi = lo;
    for (std::size_t i = 1; i < d.n(); ++i) {
      lo = std::min(lo, d.x(i)[j]);
      hi = std::max(hi, d.x(i)[j]);
    }
    s = std::max(s, hi - lo);
  }
  return s > 0.0 ? s : 1.0;
}

struct Site {
  std::vector<std::size_t> anchors;
  std::vector<double> x;
  std::vector<std::size_t> replaced;
};

// p - 1 anchors, a point of their flat at random affine weights, pushed
// off the flat along its normal so the fit through anchors and site is
// determined.
std::optional<Site> draw_site(const Dataset& d, std::size_t m, bool replacement, SplitMix64& rng) {
  const std::size_t p = d.p();
  const std::size_t dim = d.x_dim();
  Site s;
  while (s.anchors.size() < p - 1) {
    const auto i = static_cast<std::size_t>(rng.below(d.n()));
    if (std::find(s.anchors.begin(), s.anchors.end(), i) == s.anchors.end()) s.anchors.push_back(i);
  }
  std::sort(s.anchors.begin(), s.anchors.end());

  std::vector<double> w(p - 1);
  double sum = 0.0;
  for (auto& e : w) {
    e = rng.uniform() * 1.5 - 0.25;
    sum += e;
  }
  if (std::abs(sum) < 0.1) return std::nullopt;
  std::vector<double> base(dim, 0.0);
  for (std::size_t a = 0; a < p - 1; ++a)
    for (std::size_t j = 0; j < dim; ++j) base[j] += w[a] / sum * d.x(s.anchors[a])[j];

  std::vector<double> normal;
  if (dim == 1) {
    normal = {1.0};
  } else {
    std::vector<std::vector<double>> rows;
    for (std::size_t a = 1; a < p - 1; ++a) {
      std::vector<double> r(dim);
      for (std::size_t j = 0; j < dim; ++j) r[j] = d.x(s.anchors[a])[j] - d.x(s.anchors[0])[j];
      rows.push_back(std::move(r));
    }
    std::vector<double> flat;
    for (const auto& r : rows) flat.insert(flat.end(), r.begin(), r.end());
    if (linalg::rank(flat, rows.size(), dim) < rows.size()) return std::nullopt;
    auto nv = linalg::null_vector(rows, dim);
    if (!nv) return std::nullopt;
    normal = std::move(*nv);
  }
  const double delta = (0.05 + 0.45 * rng.uniform()) * x_spread(d) * (rng.below(2) ? 1.0 : -1.0);
  s.x = base;
  for (std::size_t j = 0; j < dim; ++j) s.x[j] += delta * normal[j];

  if (replacement) {
    std::vector<std::size_t> pool;
    for (std::size_t i = 0; i < d.n(); ++i)
      if (!std::binary_search(s.anchors.begin(), s.anchors.end(), i)) pool.push_back(i);
    if (m > pool.size()) return std::nullopt;
    for (std::size_t t = 0; t < m; ++t) {
      const auto k = t + static_cast<std::size_t>(rng.below(pool.size() - t));
      std::swap(pool[t], pool[k]);
    }
    s.replaced.assign(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(m));
    std::sort(s.replaced.begin(), s.replaced.end());
  }
  return s;
}

// Contaminated sample and the index of one copy of the site.
std::pair<Dataset, std::size_t> place(const Dataset& d, const Site& s, double y, std::size_t m,
                                      bool replacement) {
  if (!replacement) {
    std::vector<double> xs;
    std::vector<double> ys(m, y);
    for (std::size_t t = 0; t < m; ++t) xs.insert(xs.end(), s.x.begin(), s.x.end());
    return {d.appended(xs, ys), d.n()};
  }
  std::vector<double> xs = d.xs();
  std::vector<double> ys = d.ys();
  for (std::size_t i : s.replaced) {
    std::copy(s.x.begin(), s.x.end(), xs.begin() + static_cast<std::ptrdiff_t>(i * d.x_dim()));
    ys[i] = y;
  }
  return {Dataset(d.p(), std::move(xs), std::move(ys), d.label()),
          s.replaced.empty() ? d.n() : s.replaced.front()};
}

struct Verified {
  bool ok = false;
  std::string reason;
  AttackResult result;
};

Verified build_and_verify(const Dataset& d, const Site& s, double y, std::size_t m, bool replacement,
                          std::size_t k_star, const MedianOptions& opt) {
  auto [cont, z] = place(d, s, y, m, replacement);
  std::vector<std::size_t> idx = s.anchors;
  idx.push_back(z);
  AttackPlan plan;
  plan.kind = replacement ? AttackKind::replacement_vertical_mass : AttackKind::addition_vertical_mass;
  plan.m = m;
  plan.anchor_indices = s.anchors;
  plan.replaced_indices = s.replaced;
  plan.site_x = s.x;
  plan.site_y = y;
  plan.k_star = k_star;
  Verified v{false, {}, AttackResult{plan, cont}};
  Fit beta_c;
  try {
    beta_c = fit_through_points(cont, idx);
  } catch (const DegenerateSubset&) {
    v.reason = "anchors and site determine no fit";
    return v;
  }
  const ExactDepthIndex index(cont);
  const std::size_t c = index.count(residual_signs(cont, beta_c));
  const auto med = k_star_exact(cont, opt);
  auto& pl = v.result.plan;
  pl.beta_c = beta_c;
  pl.beta_c_count = c;
  pl.contaminated_k_star = med.k_star;
  pl.contaminated_t_star = med.t_star;
  const bool listed = std::any_of(med.maximizers.begin(), med.maximizers.end(),
                                  [&](const Maximizer& mx) { return same_fit(mx.fit, beta_c); });
  if (c != k_star)
    v.reason = "depth count of beta_c is " + std::to_string(c) + ", expected " + std::to_string(k_star);
  else if (med.k_star != k_star)
    v.reason = "contaminated k* is " + std::to_string(med.k_star) + ", expected " + std::to_string(k_star);
  else if (!listed)
    v.reason = "beta_c is not among the contaminated maximizers";
  else
    v.ok = true;
  return v;
}

}  // namespace

SweepResult attack_sweep(const Dataset& d, AttackKind kind, const std::vector<double>& magnitudes,
                         std::uint64_t seed, const MedianOptions& opt) {
  if (kind != AttackKind::addition_vertical_mass && kind != AttackKind::replacement_vertical_mass)
    throw InputError("attack_sweep supports the vertical-mass constructions only");
  if (magnitudes.empty()) throw InputError("attack_sweep: no magnitudes");
  const bool replacement = kind == AttackKind::replacement_vertical_mass;
  const std::size_t k_star = k_star_exact(d, opt).k_star;
  const std::size_t m = k_star - d.p() + 1;
  if (replacement && m > d.n() - (d.p() - 1))
    throw AttackConstructionFailed("replacement attack needs m = " + std::to_string(m) +
                                   " non-anchor observations, only " +
                                   std::to_string(d.n() - d.p() + 1) + " available");
  SplitMix64 rng(seed);
  std::string last_reason = "no admissible site drawn";
  for (std::size_t attempt = 1; attempt <= 100; ++attempt) {
    const auto site = draw_site(d, m, replacement, rng);
    if (!site) continue;
    SweepResult out;
    bool ok = true;
    for (double y : magnitudes) {
      auto v = build_and_verify(d, *site, y, m, replacement, k_star, opt);
      if (!v.ok) {
        last_reason = "y = " + std::to_string(y) + ": " + v.reason;
        ok = false;
        break;
      }
      v.result.plan.attempts = attempt;
      out.t_star_norms.push_back(v.result.plan.contaminated_t_star.norm());
      out.runs.push_back(std::move(v.result));
    }
    if (ok) return out;
  }
  throw AttackConstructionFailed(std::string(to_string(kind)) + ": no verified placement in 100 attempts (k* = " +
                                 std::to_string(k_star) + ", m = " + std::to_string(m) +
                                 "); last failure: " + last_reason);
}

AttackResult attack_addition(const Dataset& d, double y_magnitude, std::uint64_t seed,
                             const MedianOptions& opt) {
  return std::move(attack_sweep(d, AttackKind::addition_vertical_mass, {y_magnitude}, seed, opt).runs.front());
}

AttackResult attack_replacement(const Dataset& d, double y_magnitude, std::uint64_t seed,
                                const MedianOptions& opt) {
  return std::move(
      attack_sweep(d, AttackKind::replacement_vertical_mass, {y_magnitude}, seed, opt).runs.front());
}

NullspacePair attack_nullspace_pair(const Dataset& d, double lambda) {
  const std::size_t n = d.n();
  const std::size_t p = d.p();
  const std::size_t m = n - p + 1;
  std::vector<std::vector<double>> rows;
  for (std::size_t i = m; i < n; ++i) {
    std::vector<double> w{1.0};
    const auto xi = d.x(i);
    w.insert(w.end(), xi.begin(), xi.end());
    rows.push_back(std::move(w));
  }
  std::vector<double> flat;
  for (const auto& r : rows) flat.insert(flat.end(), r.begin(), r.end());
  if (!rows.empty() && linalg::rank(flat, rows.size(), p) < rows.size())
    throw InputError("null-space construction: the last p-1 design rows are dependent");
  auto u = linalg::null_vector(rows, p);
  if (!u) throw InputError("null-space construction: no null vector");

  NullspacePair out{d, d, *u, std::vector<double>(p), m};
  for (std::size_t j = 0; j < p; ++j) out.b[j] = lambda * (*u)[j];
  auto wb = [&](std::size_t i) {
    double s = out.b[0];
    for (std::size_t j = 0; j + 1 < p; ++j) s += d.x(i)[j] * out.b[j + 1];
    return s;
  };

  // Z^n followed by (x_i, y_i + w_i'b), i < m.
  std::vector<double> x1 = d.xs();
  std::vector<double> y1 = d.ys();
  for (std::size_t i = 0; i < m; ++i) {
    x1.insert(x1.end(), d.x(i).begin(), d.x(i).end());
    y1.push_back(d.y(i) + wb(i));
  }
  // (x_i, y_i - w_i'b) for i < m, then z_{m+1..n}, then z_1..z_m.
  std::vector<double> x2;
  std::vector<double> y2;
  for (std::size_t i = 0; i < m; ++i) {
    x2.insert(x2.end(), d.x(i).begin(), d.x(i).end());
    y2.push_back(d.y(i) - wb(i));
  }
  for (std::size_t i = m; i < n; ++i) {
    x2.insert(x2.end(), d.x(i).begin(), d.x(i).end());
    y2.push_back(d.y(i));
  }
  for (std::size_t i = 0; i < m; ++i) {
    x2.insert(x2.end(), d.x(i).begin(), d.x(i).end());
    y2.push_back(d.y(i));
  }
  out.first = Dataset(p, std::move(x1), std::move(y1), d.label());
  out.second = Dataset(p, std::move(x2), std::move(y2), d.label());
  return out;
}

namespace {

const std::vector<double> kMagnitudes{1e2, 1e4, 1e6};

bool grows(const std::vector<double>& norms) {
  for (std::size_t t = 1; t < norms.size(); ++t)
    if (!(norms[t] >= 50.0 * norms[t - 1])) return false;
  return norms.size() >= 2;
}

// m contaminating points (x_t, y_t), added or written over `replaced`.
Dataset contaminate(const Dataset& d, const std::vector<std::vector<double>>& xs, const std::vector<double>& ys,
                    bool replacement, const std::vector<std::size_t>& replaced) {
  if (!replacement) {
    std::vector<double> fx;
    for (const auto& x : xs) fx.insert(fx.end(), x.begin(), x.end());
    return d.appended(fx, ys);
  }
  std::vector<double> nx = d.xs();
  std::vector<double> ny = d.ys();
  for (std::size_t t = 0; t < replaced.size(); ++t) {
    std::copy(xs[t].begin(), xs[t].end(), nx.begin() + static_cast<std::ptrdiff_t>(replaced[t] * d.x_dim()));
    ny[replaced[t]] = ys[t];
  }
  return Dataset(d.p(), std::move(nx), std::move(ny), d.label());
}

}  // namespace

BatteryOutcome run_attack_battery(const Dataset& d, Contamination mode, std::size_t m, std::uint64_t seed,
                                  const MedianOptions& opt) {
  BatteryOutcome out;
  if (m == 0) return out;
  const bool replacement = mode == Contamination::replacement;
  const std::size_t n = d.n();
  const std::size_t p = d.p();
  if (replacement && m > n) return out;
  SplitMix64 rng(seed);

  auto consider = [&](const std::string& name, const std::vector<double>& norms,
                      std::optional<AttackPlan> plan) {
    for (double v : norms) out.max_t_star_norm = std::max(out.max_t_star_norm, v);
    if (!out.diverged && grows(norms)) {
      out.diverged = true;
      out.strategy = name;
      out.t_star_norms = norms;
      out.plan = std::move(plan);
    }
  };

  // Vertical mass at a few sites.
  for (int site_no = 0, tries = 0; site_no < 4 && tries < 40; ++tries) {
    const auto s = draw_site(d, m, replacement, rng);
    if (!s || (replacement && s->replaced.size() != m)) continue;
    ++site_no;
    std::vector<double> norms;
    AttackPlan plan;
    for (double y : kMagnitudes) {
      auto [cont, z] = place(d, *s, y, m, replacement);
      const auto med = k_star_exact(cont, opt);
      norms.push_back(med.t_star.norm());
      plan.kind = replacement ? AttackKind::replacement_vertical_mass : AttackKind::addition_vertical_mass;
      plan.m = m;
      plan.anchor_indices = s->anchors;
      plan.replaced_indices = s->replaced;
      plan.site_x = s->x;
      plan.site_y = y;
      plan.contaminated_k_star = med.k_star;
      plan.contaminated_t_star = med.t_star;
    }
    consider("vertical_mass", norms, plan);
  }

  // Null-space shifts of the first n - p + 1 points.
  if (m >= n - p + 1) {
    const std::size_t k = n - p + 1;
    std::vector<double> norms;
    AttackPlan plan;
    for (double y : kMagnitudes) {
      const auto pair = attack_nullspace_pair(d, y);
      std::vector<std::vector<double>> xs;
      std::vector<double> ys;
      for (std::size_t t = 0; t < m; ++t) {
        const std::size_t i = n + std::min(t, k - 1);
        xs.emplace_back(pair.first.x(i).begin(), pair.first.x(i).end());
        ys.push_back(pair.first.y(i));
      }
      std::vector<std::size_t> replaced(m);
      std::iota(replaced.begin(), replaced.end(), 0);
      const auto cont = contaminate(d, xs, ys, replacement, replaced);
      const auto med = k_star_exact(cont, opt);
      norms.push_back(med.t_star.norm());
      plan.kind = AttackKind::nullspace_pair;
      plan.m = m;
      plan.shift_b = pair.b;
      plan.contaminated_k_star = med.k_star;
      plan.contaminated_t_star = med.t_star;
    }
    consider("nullspace_shift", norms, plan);
  }

  // Far points along each axis.
  std::vector<std::size_t> replaced;
  if (replacement) {
    std::vector<std::size_t> pool(n);
    std::iota(pool.begin(), pool.end(), 0);
    for (std::size_t t = 0; t < m; ++t) {
      const auto k = t + static_cast<std::size_t>(rng.below(n - t));
      std::swap(pool[t], pool[k]);
    }
    replaced.assign(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(m));
  }
  for (std::size_t j = 0; j < d.x_dim(); ++j)
    for (double sign : {1.0, -1.0}) {
      std::vector<double> norms;
      AttackPlan plan;
      for (double y : kMagnitudes) {
        std::vector<double> x(d.x_dim(), 0.0);
        x[j] = sign * y;
        const std::vector<std::vector<double>> xs(m, x);
        const std::vector<double> ys(m, y);
        const auto cont = contaminate(d, xs, ys, replacement, replaced);
        const auto med = k_star_exact(cont, opt);
        norms.push_back(med.t_star.norm());
        plan.kind = AttackKind::far_point;
        plan.m = m;
        plan.site_x = x;
        plan.site_y = y;
        plan.replaced_indices = replaced;
        plan.contaminated_k_star = med.k_star;
        plan.contaminated_t_star = med.t_star;
      }
      consider("far_point", norms, plan);
    }
  return out;
}

SearchResult empirical_breakdown_search(const Dataset& d, Contamination mode, std::size_t m_max,
                                        std::uint64_t seed, const MedianOptions& opt) {
  SearchResult res;
  res.m_emp = m_max + 1;
  for (std::size_t m = 1; m <= m_max; ++m) {
    auto b = run_attack_battery(d, mode, m, mix64(seed ^ m), opt);
    if (b.diverged) {
      res.m_emp = m;
      res.plan = std::move(b.plan);
      res.t_star_norms = std::move(b.t_star_norms);
      res.strategy = std::move(b.strategy);
      return res;
    }
  }
  return res;
}

}  // namespace regdepth
