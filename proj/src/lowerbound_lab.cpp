#include "pcopt/lowerbound_lab.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace pcopt {

int hamming_distance(const SignWord& a, const SignWord& b) {
  if (a.size() != b.size()) throw std::invalid_argument("hamming_distance: length mismatch");
  int d = 0;
  for (std::size_t i = 0; i < a.size(); ++i) d += a[i] != b[i] ? 1 : 0;
  return d;
}

int vg_distance_threshold(std::size_t n) { return static_cast<int>((n + 7) / 8); }

std::size_t vg_target_size(std::size_t n) {
  int e = vg_distance_threshold(n);
  if (e >= 63) throw std::invalid_argument("vg_target_size: n too large");
  return std::size_t{1} << e;
}

int min_pairwise_distance(const std::vector<SignWord>& words) {
  if (words.size() < 2) return 0;
  int best = std::numeric_limits<int>::max();
  for (std::size_t i = 0; i < words.size(); ++i) {
    for (std::size_t j = i + 1; j < words.size(); ++j) {
      best = std::min(best, hamming_distance(words[i], words[j]));
    }
  }
  return best;
}

Codebook vg_codebook(std::size_t n, Rng& rng, std::int64_t max_attempts) {
  if (n < 8) throw std::invalid_argument("vg_codebook: n must be >= 8");
  if (max_attempts < 1) throw std::invalid_argument("vg_codebook: max_attempts must be >= 1");
  Codebook cb;
  cb.n = n;
  cb.target_size = vg_target_size(n);
  const int threshold = vg_distance_threshold(n);
  std::bernoulli_distribution coin(0.5);

  for (std::int64_t a = 0; a < max_attempts && cb.words.size() < cb.target_size; ++a) {
    SignWord w(n);
    for (auto& s : w) s = coin(rng) ? 1 : -1;
    bool ok = std::all_of(cb.words.begin(), cb.words.end(),
                          [&](const SignWord& v) { return hamming_distance(v, w) >= threshold; });
    if (ok) cb.words.push_back(std::move(w));
  }
  cb.undersized = cb.words.size() < cb.target_size;
  cb.min_distance = min_pairwise_distance(cb.words);
  return cb;
}

PackingFamily make_packing_family(const Codebook& codebook, double epsilon, double tau) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("make_packing_family: epsilon must be positive");
  if (!(tau > 0.0)) throw std::invalid_argument("make_packing_family: tau must be positive");
  PackingFamily pf;
  pf.codebook = codebook;
  pf.epsilon = epsilon;
  pf.tau = tau;
  pf.domain_radius = epsilon;
  FunctionClassParams params{tau, tau, codebook.n};
  for (const auto& w : codebook.words) {
    if (w.size() != codebook.n) throw std::invalid_argument("make_packing_family: word length");
    std::vector<double> c(w.size());
    for (std::size_t k = 0; k < w.size(); ++k) c[k] = epsilon * w[k];
    pf.members.push_back(QuadraticFunction::isotropic(params, Point(std::move(c))));
  }
  return pf;
}

double packing_sup_gap(double tau, double epsilon, int hamming) {
  return 2.0 * tau * epsilon * epsilon * hamming;
}

PackingReport verify_packing(const PackingFamily& pf) {
  PackingReport rep;
  const std::size_t n = pf.codebook.n;
  const double eps = pf.epsilon;
  rep.separation_bound = eps * std::sqrt(static_cast<double>(n) / 2.0);
  rep.gap_worst_case = 2.0 * pf.tau * static_cast<double>(n) * eps * eps;

  for (const auto& f : pf.members) {
    for (double c : f.curvature()) {
      if (c != pf.tau) rep.membership = false;
    }
    for (double c : f.center().coords()) {
      if (std::fabs(c) > pf.domain_radius) rep.membership = false;
    }
  }

  const auto& words = pf.codebook.words;
  for (std::size_t i = 0; i < words.size(); ++i) {
    for (std::size_t j = i + 1; j < words.size(); ++j) {
      PairWitness w;
      w.i = i;
      w.j = j;
      w.hamming = hamming_distance(words[i], words[j]);
      w.distance = (pf.members[i].center() - pf.members[j].center()).norm();
      w.sup_gap = packing_sup_gap(pf.tau, eps, w.hamming);

      // Exact integer forms of 2 eps sqrt(rho) >= eps sqrt(n/2) and rho <= n.
      double closed = 2.0 * eps * std::sqrt(static_cast<double>(w.hamming));
      bool sep = 8 * static_cast<std::size_t>(w.hamming) >= n &&
                 std::fabs(w.distance - closed) <= 1e-12 * closed;
      bool gap = static_cast<std::size_t>(w.hamming) <= n;
      if (!sep) rep.separation = false;
      if (!gap) rep.gap_bound = false;
      if ((!sep || !gap) && !rep.violating_pair) rep.violating_pair = w;

      if (!rep.closest_pair || w.distance < rep.closest_pair->distance) rep.closest_pair = w;
      if (!rep.widest_gap_pair || w.sup_gap > rep.widest_gap_pair->sup_gap) {
        rep.widest_gap_pair = w;
      }
    }
  }
  return rep;
}

double sup_gap_bruteforce(const QuadraticFunction& fi, const QuadraticFunction& fj,
                          double epsilon, double step) {
  if (fi.dim() != fj.dim()) throw std::invalid_argument("sup_gap_bruteforce: dimension mismatch");
  if (!(step > 0.0)) throw std::invalid_argument("sup_gap_bruteforce: step must be positive");
  const std::size_t n = fi.dim();
  const auto m = static_cast<std::size_t>(std::llround(2.0 * epsilon / step));
  std::vector<std::size_t> idx(n, 0);
  Point x(n);
  double best = 0.0;
  while (true) {
    for (std::size_t k = 0; k < n; ++k) {
      // Snap the last index to +epsilon so the corners are on the grid.
      x[k] = idx[k] == m ? epsilon : -epsilon + static_cast<double>(idx[k]) * step;
    }
    best = std::max(best, std::fabs(fi.evaluate(x) - fj.evaluate(x)));
    std::size_t k = 0;
    while (k < n && ++idx[k] > m) idx[k++] = 0;
    if (k == n) break;
  }
  return best;
}

KlBernoulli kl_bernoulli_bound(double mu_eff) {
  if (!(mu_eff > 0.0 && mu_eff < 0.5)) {
    throw std::invalid_argument("kl_bernoulli_bound: mu must be in (0, 1/2)");
  }
  KlBernoulli r;
  r.bound = 4.0 * mu_eff * mu_eff / (0.5 - mu_eff);
  // log1p keeps full precision for small mu.
  r.exact = 2.0 * mu_eff * std::log1p(4.0 * mu_eff / (1.0 - 2.0 * mu_eff));
  return r;
}

double kl_hypothesis_budget(std::size_t n) {
  return (1.0 / 16.0) * (static_cast<double>(n) / 8.0) * std::numbers::ln2;
}

double kl_pair_bound(const LabOracleKind& kind, std::int64_t T, double gap) {
  const double t = static_cast<double>(T);
  if (const auto* c = std::get_if<ComparisonKind>(&kind)) {
    return 16.0 * t * c->mu * c->mu * std::pow(gap, 2.0 * (c->kappa - 1.0));
  }
  const auto& g = std::get<GaussianEvalKind>(kind);
  return t / (2.0 * g.sigma2) * gap * gap;
}

KlBudgetReport kl_budget_check(const PackingFamily& pf, std::int64_t T, const LabOracleKind& kind) {
  if (T < 1) throw std::invalid_argument("kl_budget_check: T must be >= 1");
  KlBudgetReport r;
  const std::size_t n = pf.codebook.n;
  const double worst = 2.0 * pf.tau * static_cast<double>(n) * pf.epsilon * pf.epsilon;
  int rho_max = 0;
  const auto& words = pf.codebook.words;
  for (std::size_t i = 0; i < words.size(); ++i) {
    for (std::size_t j = i + 1; j < words.size(); ++j) {
      rho_max = std::max(rho_max, hamming_distance(words[i], words[j]));
    }
  }
  const double exact = packing_sup_gap(pf.tau, pf.epsilon, rho_max);

  r.kl_worst_case = kl_pair_bound(kind, T, worst);
  r.kl_exact = kl_pair_bound(kind, T, exact);
  r.budget = kl_hypothesis_budget(n);
  // Slack of a few ulps so that the defining equality at epsilon_T passes.
  const double tol = r.budget * (1.0 + 1e-12);
  r.passes = r.kl_worst_case <= tol;
  r.passes_exact = r.kl_exact <= tol;
  if (const auto* c = std::get_if<ComparisonKind>(&kind); c && c->delta0) {
    r.small_gap_condition = std::pow(worst, c->kappa - 1.0) <= *c->delta0;
  }
  return r;
}

double epsilon_T(std::size_t n, std::int64_t T, double tau, double mu, double kappa) {
  if (!(kappa > 1.0)) throw std::invalid_argument("epsilon_T: kappa must be > 1");
  if (n < 1 || T < 1 || !(tau > 0.0) || !(mu > 0.0)) {
    throw std::invalid_argument("epsilon_T: parameters must be positive");
  }
  const double nn = static_cast<double>(n);
  const double x = nn * std::numbers::ln2 / (2048.0 * mu * mu * static_cast<double>(T));
  return (1.0 / (2.0 * std::sqrt(nn))) * std::sqrt(2.0 / tau) *
         std::pow(x, 1.0 / (4.0 * (kappa - 1.0)));
}

double lower_bound_value(std::size_t n, std::int64_t T, double mu, double kappa, double tau) {
  if (n < 1 || T < 1 || !(mu > 0.0) || !(kappa >= 1.0)) {
    throw std::invalid_argument("lower_bound_value: invalid parameters");
  }
  const double nn = static_cast<double>(n);
  const double t = static_cast<double>(T);
  if (kappa == 1.0) {
    if (!(mu < 0.5)) throw std::invalid_argument("lower_bound_value: kappa = 1 needs mu < 1/2");
    return (1.0 / 7.0) * (tau / 2.0) * 0.25 * std::exp(-128.0 * t * mu * mu / (nn * (0.5 - mu)));
  }
  const double x = nn * std::numbers::ln2 / (2048.0 * mu * mu * t);
  return (1.0 / 7.0) * (1.0 / 32.0) * std::pow(x, 1.0 / (2.0 * (kappa - 1.0)));
}

double lower_bound_value_eval(std::size_t n, std::int64_t T, double sigma2) {
  if (n < 1 || T < 1 || !(sigma2 > 0.0)) {
    throw std::invalid_argument("lower_bound_value_eval: invalid parameters");
  }
  const double nn = static_cast<double>(n);
  return (1.0 / 7.0) * (1.0 / 32.0) *
         std::sqrt(nn * sigma2 * std::numbers::ln2 / (64.0 * static_cast<double>(T)));
}

GridPacking grid_packing(std::size_t n, std::size_t ell, std::size_t cap) {
  if (n < 1) throw std::invalid_argument("grid_packing: n must be >= 1");
  if (ell < 2) throw std::invalid_argument("grid_packing: ell must be >= 2");
  std::size_t count = 1;
  for (std::size_t k = 0; k < n; ++k) {
    if (count > cap / ell) {
      throw std::invalid_argument("grid_packing: " + std::to_string(ell) + "^" +
                                  std::to_string(n) + " points exceed the enumeration cap of " +
                                  std::to_string(cap) + "; use a smaller n or ell");
    }
    count *= ell;
  }

  GridPacking g;
  g.n = n;
  g.ell = ell;
  g.s = 1.0 / (2.0 * static_cast<double>(ell));
  g.points.reserve(count);
  std::vector<std::size_t> idx(n, 0);
  for (std::size_t p = 0; p < count; ++p) {
    std::vector<double> pt(n);
    for (std::size_t k = 0; k < n; ++k) {
      pt[k] = (static_cast<double>(idx[k]) + 0.5) / static_cast<double>(ell);
    }
    g.points.push_back(std::move(pt));
    for (std::size_t k = 0; k < n && ++idx[k] == ell; ++k) idx[k] = 0;
  }

  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < g.points.size(); ++i) {
    for (std::size_t j = i + 1; j < g.points.size(); ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < n; ++k) {
        double d = g.points[i][k] - g.points[j][k];
        s += d * d;
      }
      best = std::min(best, std::sqrt(s));
    }
  }
  g.min_distance = best;
  return g;
}

}  // namespace pcopt
