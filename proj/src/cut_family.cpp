#include "cut_family.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <set>

#include "regdepth/linalg.hpp"

namespace regdepth::detail {

namespace {

// Orthonormal basis of span(vs), or nullopt when some vector lies within
// `tol` of the span of the previous ones.
std::optional<std::vector<std::vector<double>>> orthonormalize(
    const std::vector<std::vector<double>>& vs, double tol) {
  std::vector<std::vector<double>> basis;
  for (const auto& v : vs) {
    std::vector<double> r = v;
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& b : basis) {
        const double c = linalg::dot(r, b);
        for (std::size_t j = 0; j < r.size(); ++j) r[j] -= c * b[j];
      }
    const double nr = linalg::norm(r);
    if (nr <= tol) return std::nullopt;
    for (auto& e : r) e /= nr;
    basis.push_back(std::move(r));
  }
  return basis;
}

// Unit vector orthogonal to an orthonormal set in R^dim (dim > set size).
std::vector<double> complement(const std::vector<std::vector<double>>& basis, std::size_t dim) {
  std::vector<double> best;
  double best_norm = -1.0;
  for (std::size_t j = 0; j < dim; ++j) {
    std::vector<double> r(dim, 0.0);
    r[j] = 1.0;
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& b : basis) {
        const double c = linalg::dot(r, b);
        for (std::size_t t = 0; t < dim; ++t) r[t] -= c * b[t];
      }
    const double nr = linalg::norm(r);
    if (nr > best_norm) {
      best_norm = nr;
      best = std::move(r);
    }
  }
  for (auto& e : best) e /= best_norm;
  return best;
}

}  // namespace

SignMasks make_masks(std::span<const std::int8_t> signs) {
  const std::size_t w = words_for(signs.size());
  SignMasks m;
  m.pos.assign(w, 0);
  m.neg.assign(w, 0);
  for (std::size_t i = 0; i < signs.size(); ++i) {
    const Word bit = Word{1} << (i % 64);
    if (signs[i] > 0)
      m.pos[i / 64] |= bit;
    else if (signs[i] < 0)
      m.neg[i / 64] |= bit;
    else
      ++m.zeros;
  }
  return m;
}

Tolerance::Tolerance(const Dataset& d) : center(d.x_dim()) {
  std::vector<double> col(d.n());
  for (std::size_t j = 0; j < d.x_dim(); ++j) {
    for (std::size_t i = 0; i < d.n(); ++i) col[i] = d.x(i)[j];
    const auto mid = col.begin() + static_cast<std::ptrdiff_t>(col.size() / 2);
    std::nth_element(col.begin(), mid, col.end());
    center[j] = *mid;
  }
}

double Tolerance::at(std::span<const double> x) const {
  double dist = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) dist = std::max(dist, std::abs(x[j] - center[j]));
  return rel * (1.0 + dist);
}

std::vector<std::vector<std::size_t>> cluster_locations(const Dataset& d,
                                                        std::span<const std::size_t> members,
                                                        const Tolerance& tol) {
  std::vector<std::vector<std::size_t>> groups;
  for (std::size_t i : members) {
    const auto xi = d.x(i);
    const double ti = tol.at(xi);
    bool placed = false;
    for (auto& g : groups) {
      const auto xr = d.x(g.front());
      double dist = 0.0;
      for (std::size_t j = 0; j < xi.size(); ++j) dist = std::max(dist, std::abs(xi[j] - xr[j]));
      if (dist <= std::max(ti, tol.at(xr))) {
        g.push_back(i);
        placed = true;
        break;
      }
    }
    if (!placed) groups.push_back({i});
  }
  return groups;
}

bool affinely_independent(const Dataset& d, std::span<const std::size_t> reps, const Tolerance& tol) {
  if (reps.size() <= 1) return true;
  if (reps.size() > d.x_dim() + 1) return false;
  const auto x0 = d.x(reps[0]);
  double limit = 0.0;
  for (std::size_t i : reps) limit = std::max(limit, tol.at(d.x(i)));
  std::vector<std::vector<double>> diffs;
  for (std::size_t t = 1; t < reps.size(); ++t) {
    const auto xt = d.x(reps[t]);
    std::vector<double> v(x0.size());
    for (std::size_t j = 0; j < v.size(); ++j) v[j] = xt[j] - x0[j];
    diffs.push_back(std::move(v));
  }
  return orthonormalize(diffs, limit).has_value();
}

Affine interpolate_signs(const std::vector<std::vector<double>>& points,
                         const std::vector<double>& signs) {
  const std::size_t t = points.size();
  const std::size_t dim = points.front().size();
  std::vector<double> mean(dim, 0.0);
  for (const auto& q : points)
    for (std::size_t j = 0; j < dim; ++j) mean[j] += q[j] / static_cast<double>(t);
  std::vector<std::vector<double>> cq(t, std::vector<double>(dim));
  for (std::size_t a = 0; a < t; ++a)
    for (std::size_t j = 0; j < dim; ++j) cq[a][j] = points[a][j] - mean[j];
  // Rows (q_a - mean, 1); least-norm solution of A z = signs via A A'.
  std::vector<double> gram(t * t);
  for (std::size_t a = 0; a < t; ++a)
    for (std::size_t b = 0; b < t; ++b) gram[a * t + b] = linalg::dot(cq[a], cq[b]) + 1.0;
  auto z = linalg::solve(gram, signs, t);
  Affine g;
  g.w.assign(dim, 0.0);
  double a0 = 0.0;
  if (z) {
    for (std::size_t a = 0; a < t; ++a) {
      for (std::size_t j = 0; j < dim; ++j) g.w[j] += (*z)[a] * cq[a][j];
      a0 += (*z)[a];
    }
  } else {
    a0 = signs.front();
  }
  // g(x) = w'(x - mean) + a0 = w'x - (w'mean - a0)
  g.c = linalg::dot(g.w, mean) - a0;
  return g;
}

Affine combine(const Affine& base, const Affine& g, const Dataset& d,
               std::span<const std::size_t> off) {
  double min_base = std::numeric_limits<double>::infinity();
  double max_g = 0.0;
  for (std::size_t i : off) {
    min_base = std::min(min_base, std::abs(base(d.x(i))));
    max_g = std::max(max_g, std::abs(g(d.x(i))));
  }
  double eps = 1.0;
  if (max_g > 0.0 && std::isfinite(min_base)) eps = 0.5 * min_base / max_g;
  Affine f = base;
  for (std::size_t j = 0; j < f.w.size(); ++j) f.w[j] += eps * g.w[j];
  f.c += eps * g.c;
  return f;
}

CutArrangement::CutArrangement(const Dataset& d, std::uint64_t max_cuts)
    : words_(words_for(d.n())), tol_(d) {
  std::vector<std::size_t> all(d.n());
  std::iota(all.begin(), all.end(), 0);
  build(d, std::move(all), max_cuts);
}

int CutArrangement::build(const Dataset& d, std::vector<std::size_t> members,
                          std::uint64_t max_cuts) {
  const int idx = static_cast<int>(families_.size());
  families_.emplace_back();
  Family fam;
  fam.members = members;
  const std::size_t dim = d.x_dim();
  const std::size_t W = words_;

  auto push_masks = [&](const std::vector<std::size_t>& left, const std::vector<std::size_t>& right) {
    const std::size_t base = fam.lr.size();
    fam.lr.resize(base + 2 * W, 0);
    for (std::size_t i : left) fam.lr[base + i / 64] |= Word{1} << (i % 64);
    for (std::size_t i : right) fam.lr[base + W + i / 64] |= Word{1} << (i % 64);
  };

  // Everything on one side.
  {
    Cut c;
    c.plane.w.assign(dim, 0.0);
    c.plane.c = 1.0;
    push_masks(members, {});
    fam.cuts.push_back(std::move(c));
    fam.extra.push_back(0);
  }

  const auto locs = cluster_locations(d, members, tol_);
  const std::size_t L = locs.size();

  std::vector<double> lt(L);
  std::size_t origin = 0;
  for (std::size_t l = 0; l < L; ++l) {
    lt[l] = tol_.at(d.x(locs[l].front()));
    if (lt[l] < lt[origin]) origin = l;
  }

  // Affine hull of the locations: origin o and orthonormal basis B.
  const auto o = d.x(locs[origin].front());
  std::vector<std::vector<double>> basis;
  for (std::size_t l = 0; l < L && basis.size() < dim; ++l) {
    if (l == origin) continue;
    const auto xl = d.x(locs[l].front());
    std::vector<double> r(dim);
    for (std::size_t j = 0; j < dim; ++j) r[j] = xl[j] - o[j];
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& b : basis) {
        const double c = linalg::dot(r, b);
        for (std::size_t j = 0; j < dim; ++j) r[j] -= c * b[j];
      }
    const double nr = linalg::norm(r);
    if (nr > lt[l]) {
      for (auto& e : r) e /= nr;
      basis.push_back(std::move(r));
    }
  }
  const std::size_t k = basis.size();
  if (k == 0) {
    families_[static_cast<std::size_t>(idx)] = std::move(fam);
    return idx;
  }
  if (idx == 0 && binomial(L, k) > max_cuts)
    throw BudgetExceeded("exact depth: " + std::to_string(binomial(L, k)) +
                         " candidate cuts exceed the budget of " + std::to_string(max_cuts));

  // Local coordinates of each location.
  std::vector<std::vector<double>> y(L, std::vector<double>(k));
  for (std::size_t l = 0; l < L; ++l) {
    const auto xl = d.x(locs[l].front());
    for (std::size_t t = 0; t < k; ++t) {
      double s = 0.0;
      for (std::size_t j = 0; j < dim; ++j) s += basis[t][j] * (xl[j] - o[j]);
      y[l][t] = s;
    }
  }

  std::set<std::vector<std::uint32_t>> seen;
  std::vector<std::size_t> sub(k);
  std::iota(sub.begin(), sub.end(), 0);
  std::vector<std::vector<double>> diffs(k - 1, std::vector<double>(k));
  std::vector<double> s(L);
  do {
    for (std::size_t t = 1; t < k; ++t)
      for (std::size_t j = 0; j < k; ++j) diffs[t - 1][j] = y[sub[t]][j] - y[sub[0]][j];
    double sub_tol = 0.0;
    for (std::size_t t : sub) sub_tol = std::max(sub_tol, lt[t]);
    auto ob = orthonormalize(diffs, sub_tol);
    if (!ob) continue;
    const auto a = complement(*ob, k);
    const double c = linalg::dot(a, y[sub[0]]);
    std::vector<std::uint32_t> on_locs;
    std::vector<std::uint8_t> on(L, 0);
    for (std::size_t l = 0; l < L; ++l) {
      s[l] = linalg::dot(a, y[l]) - c;
      on[l] = std::abs(s[l]) <= std::max(lt[l], sub_tol);
      if (on[l]) on_locs.push_back(static_cast<std::uint32_t>(l));
    }
    if (on_locs.size() > k && !seen.insert(on_locs).second) continue;

    Cut cut;
    std::vector<std::size_t> left;
    std::vector<std::size_t> right;
    for (std::size_t l = 0; l < L; ++l) {
      if (on[l]) {
        cut.on.insert(cut.on.end(), locs[l].begin(), locs[l].end());
      } else {
        auto& side = s[l] < 0 ? left : right;
        side.insert(side.end(), locs[l].begin(), locs[l].end());
      }
    }
    // Global form: h(x) = (B a)'x - (a'B o + c).
    cut.plane.w.assign(dim, 0.0);
    for (std::size_t t = 0; t < k; ++t)
      for (std::size_t j = 0; j < dim; ++j) cut.plane.w[j] += a[t] * basis[t][j];
    cut.plane.c = linalg::dot(cut.plane.w, o) + c;

    std::uint8_t extra = 0;
    if (on_locs.size() == k) {
      cut.group_begin = static_cast<std::uint32_t>(fam.group_words.size() / W);
      for (std::uint32_t l : on_locs) {
        if (locs[l].size() < 2) continue;
        const std::size_t base = fam.group_words.size();
        fam.group_words.resize(base + W, 0);
        for (std::size_t i : locs[l]) fam.group_words[base + i / 64] |= Word{1} << (i % 64);
      }
      cut.group_end = static_cast<std::uint32_t>(fam.group_words.size() / W);
      extra = cut.group_end > cut.group_begin;
    } else {
      cut.child = build(d, cut.on, max_cuts);
      extra = 1;
    }
    push_masks(left, right);
    fam.cuts.push_back(std::move(cut));
    fam.extra.push_back(extra);
  } while (next_combination(sub, L));

  families_[static_cast<std::size_t>(idx)] = std::move(fam);
  return idx;
}

std::size_t CutArrangement::cut_cost(const Family& fam, std::size_t e, const SignMasks& m,
                                     bool& flipped) const {
  const std::size_t W = words_;
  const Word* lw = fam.lr.data() + 2 * W * e;
  const Word* rw = lw + W;
  const std::size_t a = and_count(lw, m.pos.data(), W) + and_count(rw, m.neg.data(), W);
  const std::size_t b = and_count(lw, m.neg.data(), W) + and_count(rw, m.pos.data(), W);
  flipped = b < a;
  std::size_t c = std::min(a, b);
  if (fam.extra[e]) {
    const Cut& cut = fam.cuts[e];
    for (std::uint32_t g = cut.group_begin; g < cut.group_end; ++g) {
      const Word* gw = fam.group_words.data() + W * g;
      c += std::min(and_count(gw, m.pos.data(), W), and_count(gw, m.neg.data(), W));
    }
    if (cut.child >= 0) c += eval_family(cut.child, m, 0);
  }
  return c;
}

std::size_t CutArrangement::eval_family(int f, const SignMasks& m, std::size_t stop_below) const {
  const Family& fam = families_[static_cast<std::size_t>(f)];
  const std::size_t W = words_;
  const Word* pos = m.pos.data();
  const Word* neg = m.neg.data();
  std::size_t best = std::numeric_limits<std::size_t>::max();
  const std::size_t cuts = fam.cuts.size();
  const Word* lw = fam.lr.data();
  for (std::size_t e = 0; e < cuts; ++e, lw += 2 * W) {
    const Word* rw = lw + W;
    std::size_t a = 0;
    std::size_t b = 0;
    for (std::size_t i = 0; i < W; ++i) {
      a += static_cast<std::size_t>(std::popcount(lw[i] & pos[i]) + std::popcount(rw[i] & neg[i]));
      b += static_cast<std::size_t>(std::popcount(lw[i] & neg[i]) + std::popcount(rw[i] & pos[i]));
    }
    std::size_t c = std::min(a, b);
    if (c >= best) continue;
    if (fam.extra[e]) {
      bool flipped = false;
      c = cut_cost(fam, e, m, flipped);
      if (c >= best) continue;
    }
    best = c;
    if (best < stop_below || best == 0) break;
  }
  return best;
}

CutArrangement::Realized CutArrangement::realize(const Dataset& d, const SignMasks& m) const {
  Realized out;
  out.f = realize_family(d, 0, m, &out.flipped);
  return out;
}

Affine CutArrangement::realize_family(const Dataset& d, int f, const SignMasks& m,
                                      bool* top_flipped) const {
  const Family& fam = families_[static_cast<std::size_t>(f)];
  std::size_t best = std::numeric_limits<std::size_t>::max();
  std::size_t arg = 0;
  bool arg_flipped = false;
  for (std::size_t e = 0; e < fam.cuts.size(); ++e) {
    bool flipped = false;
    const std::size_t c = cut_cost(fam, e, m, flipped);
    if (c < best) {
      best = c;
      arg = e;
      arg_flipped = flipped;
      if (best == 0) break;
    }
  }
  if (top_flipped) *top_flipped = arg_flipped;
  const Cut& cut = fam.cuts[arg];
  Affine base = arg_flipped ? cut.plane.negated() : cut.plane;
  if (cut.on.empty()) return base;

  std::vector<std::size_t> off;
  {
    std::vector<std::size_t> on_sorted = cut.on;
    std::sort(on_sorted.begin(), on_sorted.end());
    for (std::size_t i : fam.members)
      if (!std::binary_search(on_sorted.begin(), on_sorted.end(), i)) off.push_back(i);
  }

  Affine g;
  if (cut.child >= 0) {
    g = realize_family(d, cut.child, m, nullptr);
  } else {
    // Each coincident group goes to its cheaper side; the negative side
    // costs positive residuals.
    const auto groups = cluster_locations(d, cut.on, tol_);
    std::vector<std::vector<double>> pts;
    std::vector<double> want;
    for (const auto& grp : groups) {
      std::size_t np = 0;
      std::size_t nn = 0;
      for (std::size_t i : grp) {
        const Word bit = Word{1} << (i % 64);
        np += (m.pos[i / 64] & bit) != 0;
        nn += (m.neg[i / 64] & bit) != 0;
      }
      const auto xr = d.x(grp.front());
      pts.emplace_back(xr.begin(), xr.end());
      want.push_back(np <= nn ? -1.0 : 1.0);
    }
    g = interpolate_signs(pts, want);
  }
  if (off.empty()) return g;
  return combine(base, g, d, off);
}

}  // namespace regdepth::detail
