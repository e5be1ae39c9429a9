#include "regdepth/depth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "cut_family.hpp"
#include "regdepth/linalg.hpp"
#include "regdepth/random.hpp"

namespace regdepth {

using detail::Affine;

const char* to_string(TiltSide s) { return s == TiltSide::toward ? "toward" : "away"; }

namespace {

void check_dims(const Dataset& d, const Fit& f) {
  if (f.p() != d.p())
    throw InputError("fit has " + std::to_string(f.p()) + " coefficients, dataset has p = " +
                     std::to_string(d.p()));
}

// Witness for the affine function h whose negative side is charged
// according to `side`.
DepthWitness witness_from(const Dataset& d, const Affine& h, TiltSide side, std::size_t count) {
  DepthWitness w;
  w.count = count;
  w.n = d.n();
  w.fraction = static_cast<double>(count) / static_cast<double>(d.n());
  w.tilt_side = side;
  const double nw = linalg::norm(h.w);
  if (nw > 0.0 && std::isfinite(nw)) {
    w.direction_u = h.w;
    for (auto& e : w.direction_u) e /= nw;
    w.cut_v = h.c / nw;
    return w;
  }
  // Constant h: every point lies on one side of an axis-aligned cut.
  w.direction_u.assign(d.x_dim(), 0.0);
  w.direction_u[0] = 1.0;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (std::size_t i = 0; i < d.n(); ++i) {
    lo = std::min(lo, d.x(i)[0]);
    hi = std::max(hi, d.x(i)[0]);
  }
  w.cut_v = (-h.c < 0.0) ? hi + 1.0 : lo - 1.0;
  return w;
}

// `f` has its negative side charged with positive residuals. `flipped`
// reports it through -f so the side label matches the orientation used.
DepthWitness witness_from_frame(const Dataset& d, const Affine& f, bool flipped, std::size_t count) {
  if (flipped) return witness_from(d, f.negated(), TiltSide::away, count);
  return witness_from(d, f, TiltSide::toward, count);
}

}  // namespace

std::size_t replay_count(const Dataset& d, const Fit& f, const DepthWitness& w) {
  check_dims(d, f);
  if (w.direction_u.size() != d.x_dim()) throw InputError("witness direction has wrong length");
  const auto signs = residual_signs(d, f);
  std::size_t c = 0;
  for (std::size_t i = 0; i < d.n(); ++i) {
    if (signs[i] == 0) {
      ++c;
      continue;
    }
    const double s = linalg::dot(d.x(i), w.direction_u);
    if (s == w.cut_v) continue;
    const bool left = s < w.cut_v;
    const bool charged_pos = (w.tilt_side == TiltSide::toward) == left;
    if ((signs[i] > 0) == charged_pos) ++c;
  }
  return c;
}

// ---------------------------------------------------------------- exact

struct ExactDepthIndex::Impl {
  Impl(const Dataset& d, std::uint64_t max_cuts) : n(d.n()), arr(d, max_cuts) {}
  std::size_t n;
  detail::CutArrangement arr;
};

ExactDepthIndex::ExactDepthIndex(const Dataset& d, std::uint64_t max_cuts)
    : impl_(std::make_unique<Impl>(d, max_cuts)) {}
ExactDepthIndex::~ExactDepthIndex() = default;
ExactDepthIndex::ExactDepthIndex(ExactDepthIndex&&) noexcept = default;
ExactDepthIndex& ExactDepthIndex::operator=(ExactDepthIndex&&) noexcept = default;

std::size_t ExactDepthIndex::n() const { return impl_->n; }
std::size_t ExactDepthIndex::cut_count() const { return impl_->arr.top_cuts(); }

std::uint64_t ExactDepthIndex::cost_per_eval() const {
  return static_cast<std::uint64_t>(impl_->arr.top_cuts()) * impl_->arr.words() * 4 + 8;
}

std::size_t ExactDepthIndex::count(std::span<const std::int8_t> signs, std::size_t floor) const {
  if (signs.size() != impl_->n) throw InputError("sign vector has wrong length");
  const auto m = detail::make_masks(signs);
  const std::size_t stop = floor > m.zeros ? floor - m.zeros : 0;
  return m.zeros + impl_->arr.eval(m, stop);
}

DepthWitness ExactDepthIndex::witness(const Dataset& d, const Fit& f) const {
  check_dims(d, f);
  if (d.n() != impl_->n) throw InputError("dataset does not match the depth index");
  const auto signs = residual_signs(d, f);
  const auto m = detail::make_masks(signs);
  const std::size_t c = m.zeros + impl_->arr.eval(m);
  const auto r = impl_->arr.realize(d, m);
  return witness_from_frame(d, r.f, r.flipped, c);
}

DepthWitness rdepth_exact(const Dataset& d, const Fit& f) {
  check_dims(d, f);
  return ExactDepthIndex(d).witness(d, f);
}

// ---------------------------------------------------------------- p = 2

DepthWitness rdepth_sweep_p2(const Dataset& d, const Fit& f) {
  if (d.p() != 2) throw InputError("rdepth_sweep_p2 requires p = 2");
  check_dims(d, f);
  const auto signs = residual_signs(d, f);
  const std::size_t n = d.n();
  const detail::Tolerance tol(d);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return d.x(a)[0] < d.x(b)[0]; });

  std::size_t zeros = 0, total_p = 0, total_n = 0;
  for (auto s : signs) {
    zeros += s == 0;
    total_p += s > 0;
    total_n += s < 0;
  }
  // Cut before everything: all points right.
  std::size_t best = std::min(total_n, total_p);
  bool best_away = total_p < total_n;
  double best_v = d.x(order.front())[0] - 1.0;
  std::size_t pp = 0, pn = 0;
  for (std::size_t t = 0; t < n;) {
    const double x0 = d.x(order[t])[0];
    std::size_t u = t;
    double last = x0;
    while (u < n && d.x(order[u])[0] - last <= std::max(tol.at(d.x(order[u])), tol.at(d.x(order[u - 1])))) {
      last = d.x(order[u])[0];
      pp += signs[order[u]] > 0;
      pn += signs[order[u]] < 0;
      ++u;
    }
    const std::size_t toward = pp + (total_n - pn);
    const std::size_t away = pn + (total_p - pp);
    const std::size_t c = std::min(toward, away);
    if (c < best) {
      best = c;
      best_away = away < toward;
      best_v = u < n ? 0.5 * (last + d.x(order[u])[0]) : last + 1.0;
    }
    t = u;
  }
  DepthWitness w;
  w.count = zeros + best;
  w.n = n;
  w.fraction = static_cast<double>(w.count) / static_cast<double>(n);
  w.direction_u = {1.0};
  w.cut_v = best_v;
  w.tilt_side = best_away ? TiltSide::away : TiltSide::toward;
  return w;
}

// ---------------------------------------------------------------- approx

namespace {

struct Direction {
  std::vector<double> u;
  std::vector<std::uint32_t> order;
  std::vector<std::uint32_t> block_start;  // blocks + 1 entries
  std::vector<double> block_value;
  // 0: points in the block cannot be split, 1: free split of distinct
  // locations, 2: split of coincident groups (see groups)
  std::vector<std::uint8_t> block_kind;
  std::vector<std::int32_t> block_groups;  // index into groups, or -1
  std::vector<std::vector<std::vector<std::uint32_t>>> groups;
};

struct Best {
  std::size_t cost = std::numeric_limits<std::size_t>::max();
  std::size_t dir = 0;
  std::size_t block = 0;  // cut after block-1 (block 0: before all) or at block
  bool at_block = false;
  bool away = false;
};

}  // namespace

struct ApproxDepthIndex::Impl {
  std::size_t n = 0;
  std::vector<Direction> dirs;

  void add_direction(const Dataset& d, std::vector<double> u, const detail::Tolerance& tol) {
    Direction dir;
    dir.u = std::move(u);
    std::vector<double> proj(n);
    for (std::size_t i = 0; i < n; ++i) proj[i] = linalg::dot(d.x(i), dir.u);
    dir.order.resize(n);
    std::iota(dir.order.begin(), dir.order.end(), 0U);
    std::stable_sort(dir.order.begin(), dir.order.end(),
                     [&](std::uint32_t a, std::uint32_t b) { return proj[a] < proj[b]; });
    for (std::size_t t = 0; t < n;) {
      std::size_t e = t + 1;
      while (e < n && proj[dir.order[e]] - proj[dir.order[e - 1]] <=
                          std::max(tol.at(d.x(dir.order[e])), tol.at(d.x(dir.order[e - 1]))))
        ++e;
      dir.block_start.push_back(static_cast<std::uint32_t>(t));
      dir.block_value.push_back(proj[dir.order[t]]);
      std::vector<std::size_t> mem(dir.order.begin() + static_cast<std::ptrdiff_t>(t),
                                   dir.order.begin() + static_cast<std::ptrdiff_t>(e));
      std::uint8_t kind = 1;
      std::int32_t gi = -1;
      if (mem.size() > 1) {
        const auto locs = detail::cluster_locations(d, mem, tol);
        std::vector<std::size_t> reps;
        for (const auto& g : locs) reps.push_back(g.front());
        if (!detail::affinely_independent(d, reps, tol)) {
          kind = 0;
        } else if (locs.size() < mem.size()) {
          kind = 2;
          gi = static_cast<std::int32_t>(dir.groups.size());
          std::vector<std::vector<std::uint32_t>> gs;
          for (const auto& g : locs)
            if (g.size() > 1) gs.emplace_back(g.begin(), g.end());
          dir.groups.push_back(std::move(gs));
        }
      }
      dir.block_kind.push_back(kind);
      dir.block_groups.push_back(gi);
      t = e;
    }
    dir.block_start.push_back(static_cast<std::uint32_t>(n));
    dirs.push_back(std::move(dir));
  }

  // Scans every direction; stops once zeros + best < floor.
  Best scan(std::span<const std::int8_t> signs, std::size_t zeros, std::size_t floor) const {
    std::size_t total_p = 0, total_n = 0;
    for (auto s : signs) {
      total_p += s > 0;
      total_n += s < 0;
    }
    Best best;
    auto offer = [&](std::size_t toward, std::size_t away, std::size_t di, std::size_t b, bool at) {
      const std::size_t c = std::min(toward, away);
      if (c < best.cost) {
        best.cost = c;
        best.dir = di;
        best.block = b;
        best.at_block = at;
        best.away = away < toward;
      }
    };
    for (std::size_t di = 0; di < dirs.size(); ++di) {
      const Direction& dir = dirs[di];
      std::size_t pp = 0, pn = 0;
      offer(total_n, total_p, di, 0, false);
      const std::size_t blocks = dir.block_value.size();
      for (std::size_t b = 0; b < blocks; ++b) {
        std::size_t bp = 0, bn = 0;
        for (std::uint32_t t = dir.block_start[b]; t < dir.block_start[b + 1]; ++t) {
          const auto s = signs[dir.order[t]];
          bp += s > 0;
          bn += s < 0;
        }
        if (dir.block_kind[b] != 0 && dir.block_start[b + 1] - dir.block_start[b] > 1) {
          std::size_t split = 0;
          if (dir.block_kind[b] == 2)
            for (const auto& g : dir.groups[static_cast<std::size_t>(dir.block_groups[b])]) {
              std::size_t gp = 0, gn = 0;
              for (auto i : g) {
                gp += signs[i] > 0;
                gn += signs[i] < 0;
              }
              split += std::min(gp, gn);
            }
          offer(pp + (total_n - pn - bn) + split, pn + (total_p - pp - bp) + split, di, b, true);
        }
        pp += bp;
        pn += bn;
        offer(pp + (total_n - pn), pn + (total_p - pp), di, b + 1, false);
      }
      if (zeros + best.cost < floor || best.cost == 0) break;
    }
    return best;
  }
};

ApproxDepthIndex::ApproxDepthIndex(const Dataset& d, std::size_t n_dirs, std::uint64_t seed)
    : impl_(std::make_unique<Impl>()) {
  if (n_dirs < 1) throw InputError("rdepth_approx: n_dirs must be at least 1");
  impl_->n = d.n();
  const std::size_t dim = d.x_dim();
  const detail::Tolerance tol(d);
  for (std::size_t j = 0; j < dim; ++j) {
    std::vector<double> e(dim, 0.0);
    e[j] = 1.0;
    impl_->add_direction(d, std::move(e), tol);
  }
  if (dim < 2) return;  // one direction up to sign
  SplitMix64 rng(seed);
  for (std::size_t t = 0; t < n_dirs; ++t) {
    std::vector<double> u;
    if (t % 2 == 1 && d.n() >= dim) {
      // Normal of the hyperplane through dim random x-points.
      std::vector<std::size_t> pick;
      while (pick.size() < dim) {
        const auto i = static_cast<std::size_t>(rng.below(d.n()));
        if (std::find(pick.begin(), pick.end(), i) == pick.end()) pick.push_back(i);
      }
      std::vector<std::vector<double>> rows;
      const auto x0 = d.x(pick[0]);
      for (std::size_t a = 1; a < dim; ++a) {
        const auto xa = d.x(pick[a]);
        std::vector<double> r(dim);
        for (std::size_t j = 0; j < dim; ++j) r[j] = xa[j] - x0[j];
        rows.push_back(std::move(r));
      }
      if (linalg::rank([&] {
            std::vector<double> flat;
            for (const auto& r : rows) flat.insert(flat.end(), r.begin(), r.end());
            return flat;
          }(), dim - 1, dim) == dim - 1)
        if (auto nv = linalg::null_vector(rows, dim)) u = std::move(*nv);
    }
    if (u.empty()) {
      double nu = 0.0;
      while (nu < 1e-12) {
        u.assign(dim, 0.0);
        for (auto& e : u) e = rng.normal();
        nu = linalg::norm(u);
      }
      for (auto& e : u) e /= nu;
    }
    impl_->add_direction(d, std::move(u), tol);
  }
}
ApproxDepthIndex::~ApproxDepthIndex() = default;
ApproxDepthIndex::ApproxDepthIndex(ApproxDepthIndex&&) noexcept = default;
ApproxDepthIndex& ApproxDepthIndex::operator=(ApproxDepthIndex&&) noexcept = default;

std::size_t ApproxDepthIndex::direction_count() const { return impl_->dirs.size(); }

std::size_t ApproxDepthIndex::count(std::span<const std::int8_t> signs, std::size_t floor) const {
  if (signs.size() != impl_->n) throw InputError("sign vector has wrong length");
  std::size_t zeros = 0;
  for (auto s : signs) zeros += s == 0;
  return zeros + impl_->scan(signs, zeros, floor).cost;
}

DepthWitness ApproxDepthIndex::witness(const Dataset& d, const Fit& f) const {
  check_dims(d, f);
  if (d.n() != impl_->n) throw InputError("dataset does not match the depth index");
  const auto signs = residual_signs(d, f);
  std::size_t zeros = 0;
  for (auto s : signs) zeros += s == 0;
  const Best b = impl_->scan(signs, zeros, 0);
  const Direction& dir = impl_->dirs[b.dir];
  const std::size_t count = zeros + b.cost;
  const std::size_t blocks = dir.block_value.size();
  const TiltSide side = b.away ? TiltSide::away : TiltSide::toward;

  if (!b.at_block) {
    double v;
    if (b.block == 0)
      v = dir.block_value.front() - 1.0;
    else if (b.block == blocks)
      v = dir.block_value.back() + 1.0;
    else
      v = 0.5 * (linalg::dot(d.x(dir.order[dir.block_start[b.block] - 1]), dir.u) +
                 dir.block_value[b.block]);
    DepthWitness w;
    w.count = count;
    w.n = d.n();
    w.fraction = static_cast<double>(count) / static_cast<double>(d.n());
    w.direction_u = dir.u;
    w.cut_v = v;
    w.tilt_side = side;
    return w;
  }

  // Cut through a block: perturb so every block point leaves the axis.
  Affine base{dir.u, dir.block_value[b.block]};
  if (b.away) base = base.negated();
  std::vector<std::size_t> on(dir.order.begin() + dir.block_start[b.block],
                              dir.order.begin() + dir.block_start[b.block + 1]);
  std::vector<std::size_t> off;
  for (std::uint32_t t = 0; t < impl_->n; ++t)
    if (t < dir.block_start[b.block] || t >= dir.block_start[b.block + 1]) off.push_back(dir.order[t]);
  const auto locs = detail::cluster_locations(d, on, detail::Tolerance(d));
  std::vector<std::vector<double>> pts;
  std::vector<double> want;
  for (const auto& g : locs) {
    std::size_t gp = 0, gn = 0;
    for (auto i : g) {
      gp += signs[i] > 0;
      gn += signs[i] < 0;
    }
    const auto xr = d.x(g.front());
    pts.emplace_back(xr.begin(), xr.end());
    want.push_back(gp <= gn ? -1.0 : 1.0);
  }
  const Affine g = detail::interpolate_signs(pts, want);
  const Affine fr = off.empty() ? g : detail::combine(base, g, d, off);
  return witness_from_frame(d, fr, b.away, count);
}

DepthWitness rdepth_approx(const Dataset& d, const Fit& f, std::size_t n_dirs, std::uint64_t seed) {
  check_dims(d, f);
  return ApproxDepthIndex(d, n_dirs, seed).witness(d, f);
}

}  // namespace regdepth
