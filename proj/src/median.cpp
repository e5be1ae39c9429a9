#include "regdepth/median.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <optional>
#include <mutex>
#include <numeric>
#include <set>
#include <string>

#include "regdepth/linalg.hpp"
#include "regdepth/parallel.hpp"
#include "regdepth/random.hpp"

namespace regdepth {

const char* to_string(DepthMode m) { return m == DepthMode::exact ? "exact" : "approximate"; }

Budget Budget::from_env() {
  Budget b;
  const char* env = std::getenv("REGDEPTH_BUDGET");
  if (!env || !*env) return b;
  const std::string s(env);
  try {
    const auto comma = s.find(',');
    b.max_subsets = static_cast<std::uint64_t>(std::stod(s.substr(0, comma)));
    if (comma != std::string::npos) b.max_ops = std::stod(s.substr(comma + 1));
  } catch (const std::exception&) {
    throw InputError("REGDEPTH_BUDGET must look like <max_subsets>[,<max_ops>], got '" + s + "'");
  }
  return b;
}

bool same_fit(const Fit& a, const Fit& b) {
  if (a.p() != b.p()) return false;
  for (std::size_t j = 0; j < a.p(); ++j) {
    const double tol = 1e-9 * std::max({1.0, std::abs(a.beta[j]), std::abs(b.beta[j])});
    if (std::abs(a.beta[j] - b.beta[j]) > tol) return false;
  }
  return true;
}

namespace {

std::vector<std::size_t> unrank_combination(std::uint64_t rank, std::size_t n, std::size_t k) {
  std::vector<std::size_t> idx(k);
  std::size_t c = 0;
  for (std::size_t i = 0; i < k; ++i) {
    for (;; ++c) {
      const std::uint64_t cnt = binomial(n - c - 1, k - i - 1);
      if (rank < cnt) break;
      rank -= cnt;
    }
    idx[i] = c++;
  }
  return idx;
}

std::optional<Fit> try_fit(const Dataset& d, const std::vector<std::size_t>& idx) {
  const std::size_t p = d.p();
  std::vector<double> a(p * p);
  std::vector<double> b(p);
  for (std::size_t r = 0; r < p; ++r) {
    a[r * p] = 1.0;
    const auto xi = d.x(idx[r]);
    for (std::size_t j = 0; j + 1 < p; ++j) a[r * p + j + 1] = xi[j];
    b[r] = d.y(idx[r]);
  }
  auto z = linalg::solve(std::move(a), std::move(b), p);
  if (!z) return std::nullopt;
  return Fit{std::move(*z)};
}

struct Candidate {
  std::uint64_t order = 0;  // enumeration or draw position
  std::vector<std::size_t> indices;
  Fit fit;
  std::size_t count = 0;
};

void finish(const Dataset& d, DeepestFitResult& res, std::vector<Candidate>& cands,
            const std::function<DepthWitness(const Fit&)>& witness) {
  if (cands.empty()) throw InputError("no p-subset of the data determines a non-vertical fit");
  std::sort(cands.begin(), cands.end(),
            [](const Candidate& a, const Candidate& b) { return a.order < b.order; });
  for (auto& c : cands) {
    bool dup = false;
    for (const auto& m : res.maximizers)
      if (same_fit(m.fit, c.fit)) {
        dup = true;
        break;
      }
    if (dup) continue;
    res.maximizers.push_back(Maximizer{std::move(c.indices), std::move(c.fit), {}});
  }
  std::vector<double> mean(d.p(), 0.0);
  for (auto& m : res.maximizers) {
    m.witness = witness(m.fit);
    for (std::size_t j = 0; j < d.p(); ++j) mean[j] += m.fit.beta[j];
  }
  for (auto& v : mean) v /= static_cast<double>(res.maximizers.size());
  res.t_star = Fit{std::move(mean)};
}

}  // namespace

std::pair<std::uint64_t, double> exact_cost(const Dataset& d) {
  const std::uint64_t subsets = binomial(d.n(), d.p());
  const double cuts = static_cast<double>(binomial(d.n(), d.p() - 1)) + 1.0;
  const double words = static_cast<double>((d.n() + 63) / 64);
  const double per_fit = cuts * words * 4.0 + static_cast<double>(d.n() * d.p());
  return {subsets, static_cast<double>(subsets) * per_fit};
}

DeepestFitResult k_star_exact(const Dataset& d, const MedianOptions& opt) {
  const std::size_t n = d.n();
  const std::size_t p = d.p();
  const auto [subsets, ops] = exact_cost(d);
  if (subsets > opt.budget.max_subsets || ops > opt.budget.max_ops)
    throw BudgetExceeded("exact deepest fit needs C(" + std::to_string(n) + ", " + std::to_string(p) +
                         ") = " + std::to_string(subsets) + " subsets and about " +
                         std::to_string(static_cast<long double>(ops)) +
                         " operations, over budget; use approximate mode");
  const ExactDepthIndex index(d);

  constexpr std::uint64_t kChunk = 1024;
  const std::size_t tasks = static_cast<std::size_t>((subsets + kChunk - 1) / kChunk);
  const std::size_t workers = std::min(resolve_workers(opt.workers), std::max<std::size_t>(tasks, 1));
  std::atomic<std::size_t> best{0};
  std::atomic<std::uint64_t> singular{0};
  std::vector<std::vector<Candidate>> found(workers);

  parallel_for(tasks, workers, [&](std::size_t t, std::size_t w) {
    const std::uint64_t first = t * kChunk;
    const std::uint64_t last = std::min<std::uint64_t>(subsets, first + kChunk);
    auto idx = unrank_combination(first, n, p);
    auto& mine = found[w];
    std::uint64_t sing = 0;
    for (std::uint64_t r = first; r < last; ++r, next_combination(idx, n)) {
      auto fit = try_fit(d, idx);
      if (!fit) {
        ++sing;
        continue;
      }
      const auto signs = residual_signs(d, *fit);
      std::size_t floor = best.load(std::memory_order_relaxed);
      const std::size_t c = index.count(signs, floor);
      if (c < floor) continue;
      mine.push_back(Candidate{r, idx, std::move(*fit), c});
      while (c > floor && !best.compare_exchange_weak(floor, c)) {
      }
      if (mine.size() > 4096) {
        const std::size_t b = best.load();
        std::erase_if(mine, [b](const Candidate& x) { return x.count < b; });
      }
    }
    singular += sing;
  });

  DeepestFitResult res;
  res.n = n;
  res.p = p;
  res.mode = DepthMode::exact;
  res.subsets_examined = subsets;
  res.singular_subsets = singular.load();
  std::size_t k = 0;
  for (const auto& v : found)
    for (const auto& c : v) k = std::max(k, c.count);
  std::vector<Candidate> top;
  for (auto& v : found)
    for (auto& c : v)
      if (c.count == k) top.push_back(std::move(c));
  res.k_star = k;
  finish(d, res, top, [&](const Fit& f) { return index.witness(d, f); });
  return res;
}

DeepestFitResult k_star_approx(const Dataset& d, std::size_t n_subsets, std::size_t n_dirs,
                               std::uint64_t seed, const MedianOptions& opt) {
  if (n_subsets < 1) throw InputError("k_star_approx: n_subsets must be at least 1");
  const std::size_t n = d.n();
  const std::size_t p = d.p();
  const std::uint64_t total = binomial(n, p);

  // Candidate subsets: all of them, or distinct random draws in draw order.
  std::vector<std::vector<std::size_t>> subsets;
  if (n_subsets >= total) {
    std::vector<std::size_t> idx(p);
    std::iota(idx.begin(), idx.end(), 0);
    do subsets.push_back(idx);
    while (next_combination(idx, n));
  } else {
    SplitMix64 rng(seed);
    std::set<std::vector<std::size_t>> seen;
    std::size_t attempts = 0;
    while (subsets.size() < n_subsets && attempts < 20 * n_subsets) {
      ++attempts;
      std::vector<std::size_t> idx;
      while (idx.size() < p) {
        const auto i = static_cast<std::size_t>(rng.below(n));
        if (std::find(idx.begin(), idx.end(), i) == idx.end()) idx.push_back(i);
      }
      std::sort(idx.begin(), idx.end());
      if (seen.insert(idx).second) subsets.push_back(std::move(idx));
    }
  }

  const ApproxDepthIndex approx(d, n_dirs, mix64(seed ^ 0x5bd1e995ULL));
  std::vector<Candidate> cands(subsets.size());
  std::vector<std::uint8_t> ok(subsets.size(), 0);
  std::vector<std::vector<std::int8_t>> signs(subsets.size());
  parallel_for(subsets.size(), opt.workers, [&](std::size_t t, std::size_t) {
    auto fit = try_fit(d, subsets[t]);
    if (!fit) return;
    signs[t] = residual_signs(d, *fit);
    cands[t] = Candidate{t, subsets[t], std::move(*fit), approx.count(signs[t])};
    ok[t] = 1;
  });

  DeepestFitResult res;
  res.n = n;
  res.p = p;
  res.mode = DepthMode::approximate;
  res.subsets_examined = subsets.size();
  std::vector<std::size_t> live;
  for (std::size_t t = 0; t < subsets.size(); ++t) {
    if (ok[t])
      live.push_back(t);
    else
      ++res.singular_subsets;
  }

  const double cuts = static_cast<double>(binomial(n, p - 1)) + 1.0;
  const double per_eval = cuts * static_cast<double>((n + 63) / 64) * 4.0;
  const auto fits_budget = [&](std::size_t evals) {
    return cuts <= 5e6 && per_eval * static_cast<double>(evals) <= opt.budget.max_ops;
  };
  std::optional<ExactDepthIndex> index;
  if (fits_budget(live.size())) index.emplace(d);

  if (opt.refine_starts > 0 && !live.empty()) {
    // Swap search: from the best screened subsets, replace one index at a
    // time while the depth count improves.
    std::vector<std::size_t> order = live;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return cands[a].count > cands[b].count; });
    order.resize(std::min(order.size(), opt.refine_starts));
    const auto score = [&](const std::vector<std::int8_t>& sg, std::size_t floor) {
      return index ? index->count(sg, floor) : approx.count(sg, floor);
    };
    std::vector<std::vector<std::size_t>> ends(order.size());
    parallel_for(order.size(), opt.workers, [&](std::size_t s, std::size_t) {
      auto cur = subsets[order[s]];
      std::size_t cur_score = score(signs[order[s]], 0);
      std::set<std::vector<std::size_t>> visited{cur};
      for (std::size_t pass = 0; pass < 4 * n; ++pass) {
        bool improved = false;
        for (std::size_t j = 0; j < p && !improved; ++j) {
          for (std::size_t i = 0; i < n && !improved; ++i) {
            if (std::find(cur.begin(), cur.end(), i) != cur.end()) continue;
            auto next = cur;
            next[j] = i;
            std::sort(next.begin(), next.end());
            if (!visited.insert(next).second) continue;
            const auto fit = try_fit(d, next);
            if (!fit) continue;
            const std::size_t sc = score(residual_signs(d, *fit), cur_score + 1);
            if (sc > cur_score) {
              cur = std::move(next);
              cur_score = sc;
              improved = true;
            }
          }
        }
        if (!improved) break;
      }
      ends[s] = std::move(cur);
    });
    std::set<std::vector<std::size_t>> known(subsets.begin(), subsets.end());
    for (auto& e : ends) {
      if (!known.insert(e).second) continue;
      auto fit = try_fit(d, e);
      const std::size_t t = subsets.size();
      subsets.push_back(e);
      signs.push_back(residual_signs(d, *fit));
      cands.push_back(Candidate{t, e, std::move(*fit), approx.count(signs.back())});
      live.push_back(t);
    }
    res.subsets_examined = subsets.size();
  }
  const bool rescore = index.has_value() && fits_budget(live.size());

  std::vector<Candidate> top;
  if (rescore) {
    std::stable_sort(live.begin(), live.end(),
                     [&](std::size_t a, std::size_t b) { return cands[a].count > cands[b].count; });
    std::size_t best = 0;
    std::vector<std::size_t> exact(subsets.size(), 0);
    std::vector<std::size_t> scored;
    for (std::size_t t : live) {
      if (cands[t].count < best) break;  // approximate counts bound exact ones from above
      exact[t] = index->count(signs[t], best);
      if (exact[t] < best) continue;
      best = exact[t];
      scored.push_back(t);
    }
    for (std::size_t t : scored)
      if (exact[t] == best) {
        cands[t].count = best;
        top.push_back(std::move(cands[t]));
      }
    res.k_star = best;
    finish(d, res, top, [&](const Fit& f) { return index->witness(d, f); });
  } else {
    std::size_t best = 0;
    for (std::size_t t : live) best = std::max(best, cands[t].count);
    for (std::size_t t : live)
      if (cands[t].count == best) top.push_back(std::move(cands[t]));
    res.k_star = best;
    finish(d, res, top, [&](const Fit& f) { return approx.witness(d, f); });
  }
  return res;
}

}  // namespace regdepth
