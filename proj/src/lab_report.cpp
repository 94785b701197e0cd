#include <cmath>

#include "pcopt/bench.hpp"
#include "pcopt/lowerbound_lab.hpp"

namespace pcopt {

using nlohmann::json;

namespace {

json witness_json(const std::optional<PairWitness>& w) {
  if (!w) return nullptr;
  return {{"i", w->i},
          {"j", w->j},
          {"hamming", w->hamming},
          {"distance", w->distance},
          {"sup_gap", w->sup_gap}};
}

}  // namespace

json lab_report(const LabSpec& spec) {
  if (spec.n < 8) throw ValidationError("lab: n must be >= 8 for the codebook");
  if (spec.T < 1) throw ValidationError("lab: T must be >= 1");
  if (!(spec.mu > 0.0) || !(spec.tau > 0.0) || !(spec.sigma2 > 0.0)) {
    throw ValidationError("lab: mu, tau and sigma2 must be positive");
  }
  if (!(spec.kappa >= 1.0)) throw ValidationError("lab: kappa must be >= 1");
  if (!(spec.epsilon_scale > 0.0)) throw ValidationError("lab: epsilon_scale must be positive");
  if (!spec.epsilon && spec.kappa == 1.0) {
    throw ValidationError("lab: kappa = 1 has no epsilon_T; pass an explicit epsilon");
  }
  if (spec.kappa == 1.0 && !(spec.mu < 0.5)) throw ValidationError("lab: kappa = 1 needs mu < 1/2");

  json report;
  report["n"] = spec.n;
  report["kappa"] = spec.kappa;
  report["T"] = spec.T;
  report["mu"] = spec.mu;
  report["tau"] = spec.tau;

  std::optional<double> eps_t;
  if (spec.kappa > 1.0) eps_t = epsilon_T(spec.n, spec.T, spec.tau, spec.mu, spec.kappa);
  const double eps = (spec.epsilon ? *spec.epsilon : *eps_t) * spec.epsilon_scale;
  report["epsilon_T"] = eps_t ? json(*eps_t) : json(nullptr);
  report["epsilon"] = eps;

  // Retry with fresh streams until the greedy reaches the target size.
  Rng rng(spec.seed);
  Codebook cb;
  int attempts = 0;
  do {
    cb = vg_codebook(spec.n, rng);
    ++attempts;
  } while (cb.undersized && attempts < spec.max_retries);
  json words = json::array();
  for (const auto& w : cb.words) words.push_back(w);
  bool codebook_ok = !cb.undersized && cb.min_distance >= vg_distance_threshold(spec.n) &&
                     cb.min_distance == min_pairwise_distance(cb.words);
  report["codebook"] = {{"size", cb.words.size()},
                        {"target_size", cb.target_size},
                        {"min_distance", cb.min_distance},
                        {"required_distance", vg_distance_threshold(spec.n)},
                        {"undersized", cb.undersized},
                        {"attempts", attempts},
                        {"words", words},
                        {"pass", codebook_ok}};

  PackingFamily pf = make_packing_family(cb, eps, spec.tau);
  PackingReport pr = verify_packing(pf);
  report["packing"] = {{"membership", pr.membership},
                       {"separation", pr.separation},
                       {"gap_bound", pr.gap_bound},
                       {"separation_bound", pr.separation_bound},
                       {"gap_worst_case", pr.gap_worst_case},
                       {"closest_pair", witness_json(pr.closest_pair)},
                       {"widest_gap_pair", witness_json(pr.widest_gap_pair)},
                       {"violating_pair", witness_json(pr.violating_pair)},
                       {"pass", pr.all()}};

  ComparisonKind ck{spec.kappa, spec.mu, spec.delta0};
  KlBudgetReport kr = kl_budget_check(pf, spec.T, ck);
  json kl = {{"kl_worst_case", kr.kl_worst_case},
             {"kl_exact", kr.kl_exact},
             {"budget", kr.budget},
             {"passes_exact", kr.passes_exact},
             {"pass", kr.passes}};
  kl["small_gap_condition"] = kr.small_gap_condition ? json(*kr.small_gap_condition) : json(nullptr);
  report["kl_comparison"] = kl;

  KlBudgetReport ke = kl_budget_check(pf, spec.T, GaussianEvalKind{spec.sigma2});
  report["kl_gaussian_eval"] = {{"kl_worst_case", ke.kl_worst_case},
                                {"kl_exact", ke.kl_exact},
                                {"budget", ke.budget},
                                {"pass", ke.passes}};

  report["lower_bound"] = lower_bound_value(spec.n, spec.T, spec.mu, spec.kappa, spec.tau);
  report["lower_bound_eval"] = lower_bound_value_eval(spec.n, spec.T, spec.sigma2);

  GridPacking g = grid_packing(spec.grid_n, spec.grid_ell, spec.grid_cap);
  const double required = 1.0 / static_cast<double>(spec.grid_ell);
  bool grid_ok = g.min_distance >= required * (1.0 - 1e-12);
  report["grid"] = {{"n", g.n},
                    {"ell", g.ell},
                    {"points", g.points.size()},
                    {"s", g.s},
                    {"min_distance", g.min_distance},
                    {"required_distance", required},
                    {"log_M", static_cast<double>(g.n) * std::log(static_cast<double>(g.ell))},
                    {"pass", grid_ok}};

  report["pass"] = codebook_ok && pr.all() && kr.passes && grid_ok;
  return report;
}

}  // namespace pcopt
