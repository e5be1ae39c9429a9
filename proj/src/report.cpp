#include "regdepth/report.hpp"

#include <cstdio>

namespace regdepth::report {

std::string decimal17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json to_json(const Rational& r) { return {{"fraction", r.str()}, {"decimal", decimal17(r.to_double())}}; }

json to_json(const DepthWitness& w) {
  return {{"count", w.count},
          {"n", w.n},
          {"fraction", w.fraction},
          {"witness", {{"u", w.direction_u}, {"v", w.cut_v}, {"side", to_string(w.tilt_side)}}}};
}

json to_json(const DeepestFitResult& r) {
  json maxi = json::array();
  for (const auto& m : r.maximizers)
    maxi.push_back({{"indices", m.indices}, {"beta", m.fit.beta}, {"depth", to_json(m.witness)}});
  return {{"n", r.n},
          {"p", r.p},
          {"k_star", r.k_star},
          {"depth_fraction", r.n ? static_cast<double>(r.k_star) / static_cast<double>(r.n) : 0.0},
          {"mode", to_string(r.mode)},
          {"t_star", r.t_star.beta},
          {"maximizer_count", r.maximizers.size()},
          {"maximizers", maxi},
          {"subsets_examined", r.subsets_examined},
          {"singular_subsets", r.singular_subsets}};
}

json to_json(const BreakdownBounds& b) {
  return {{"n", b.n},
          {"p", b.p},
          {"k_star", b.k_star},
          {"mode", to_string(b.mode)},
          {"m_min", b.m_min},
          {"abp_exact", to_json(b.abp_exact)},
          {"rbp_ub", to_json(b.rbp_ub)},
          {"rh99_lb", to_json(b.rh99_lb)},
          {"equivariant_ub", to_json(b.equivariant_ub)},
          {"asymptotic_ref", to_json(b.asymptotic_ref)},
          {"flags", b.flags}};
}

json to_json(const AttackPlan& plan) {
  json j = {{"kind", to_string(plan.kind)},
            {"m", plan.m},
            {"anchor_indices", plan.anchor_indices},
            {"site_x", plan.site_x},
            {"site_y", plan.site_y},
            {"k_star", plan.k_star},
            {"beta_c_count", plan.beta_c_count},
            {"contaminated_k_star", plan.contaminated_k_star},
            {"contaminated_t_star", plan.contaminated_t_star.beta},
            {"contaminated_t_star_norm", plan.contaminated_t_star.beta.empty() ? 0.0 : plan.contaminated_t_star.norm()},
            {"attempts", plan.attempts}};
  if (!plan.replaced_indices.empty()) j["replaced_indices"] = plan.replaced_indices;
  if (!plan.shift_b.empty()) j["shift_b"] = plan.shift_b;
  j["beta_c"] = plan.beta_c ? json(plan.beta_c->beta) : json(nullptr);
  return j;
}

json to_json(const SweepResult& s) {
  json runs = json::array();
  for (const auto& r : s.runs) runs.push_back(to_json(r.plan));
  return {{"runs", runs}, {"t_star_norms", s.t_star_norms}};
}

json dataset_json(const Dataset& d) {
  json rows = json::array();
  for (std::size_t i = 0; i < d.n(); ++i) {
    std::vector<double> row(d.x(i).begin(), d.x(i).end());
    row.push_back(d.y(i));
    rows.push_back(row);
  }
  return rows;
}

json to_json(const NullspacePair& pair) {
  return {{"m", pair.m},
          {"u", pair.u},
          {"b", pair.b},
          {"first", dataset_json(pair.first)},
          {"second", dataset_json(pair.second)}};
}

json to_json(const SearchResult& s) {
  json j = {{"m_emp", s.m_emp}, {"strategy", s.strategy}, {"t_star_norms", s.t_star_norms}};
  j["plan"] = s.plan ? to_json(*s.plan) : json(nullptr);
  return j;
}

json to_json(const SimulationSummary& s, bool with_records) {
  json j = {{"table", static_cast<int>(s.table)},
            {"p", s.spec.p},
            {"n", s.spec.n},
            {"generator", to_string(s.spec.generator)},
            {"contamination", contamination_note(s.spec.generator)},
            {"mode", to_string(s.spec.mode)},
            {"master_seed", s.spec.master_seed},
            {"reps_requested", s.reps_requested},
            {"reps_completed", s.reps_completed},
            {"partial", s.partial},
            {"statistic_pp", s.statistic_pp()},
            {"mean_abp_minus_rh99_pp", s.mean_abp_minus_rh99_pp},
            {"mean_rbp_minus_third_pp", s.mean_rbp_minus_third_pp},
            {"mean_k_star", s.mean_k_star},
            {"mean_rbp_ub", s.mean_rbp_ub}};
  if (s.spec.mode == DepthMode::approximate)
    j["approx"] = {{"n_subsets", s.spec.approx.n_subsets},
                   {"n_dirs", s.spec.approx.n_dirs},
                   {"refine_starts", s.spec.approx.refine_starts}};
  if (s.partial) j["stop_reason"] = s.stop_reason;
  if (with_records) {
    json recs = json::array();
    for (const auto& r : s.records)
      recs.push_back({{"replicate", r.index},
                      {"seed", r.seed},
                      {"n", r.n},
                      {"k_star", r.k_star},
                      {"abp_lb", to_json(r.abp_lb)},
                      {"rbp_ub", to_json(r.rbp_ub)},
                      {"rh99_lb", to_json(r.rh99_lb)},
                      {"mode", to_string(r.mode)}});
    j["replicates"] = recs;
  }
  return j;
}

json to_json(const BoxplotCell& c) {
  return {{"p", c.p},
          {"n", c.n},
          {"reps", c.reps},
          {"mode", to_string(c.mode)},
          {"partial", c.partial},
          {"min", c.rbp_ub.min},
          {"q1", c.rbp_ub.q1},
          {"median", c.rbp_ub.median},
          {"q3", c.rbp_ub.q3},
          {"max", c.rbp_ub.max},
          {"lower_whisker", c.rbp_ub.lower_whisker},
          {"upper_whisker", c.rbp_ub.upper_whisker},
          {"outliers", c.rbp_ub.outliers},
          {"median_below_third", c.median_below_third}};
}

std::string render(const json& j) { return j.dump(2) + "\n"; }

}  // namespace regdepth::report
