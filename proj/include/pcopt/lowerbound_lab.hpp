#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "pcopt/core.hpp"
#include "pcopt/oracles.hpp"

namespace pcopt {

using SignWord = std::vector<int>;

int hamming_distance(const SignWord& a, const SignWord& b);

struct Codebook {
  std::size_t n = 0;
  std::vector<SignWord> words;
  int min_distance = 0;
  std::size_t target_size = 0;
  bool undersized = false;
};

// ceil(n / 8)
int vg_distance_threshold(std::size_t n);
// 2^ceil(n / 8)
std::size_t vg_target_size(std::size_t n);

// Greedy randomized codebook: keep random words at Hamming distance at least
// ceil(n/8) from every kept word until 2^ceil(n/8) words are held or
// max_attempts draws are spent. min_distance is recomputed exhaustively.
Codebook vg_codebook(std::size_t n, Rng& rng, std::int64_t max_attempts = 100000);

// Exhaustive min pairwise Hamming distance; 0 for fewer than two words.
int min_pairwise_distance(const std::vector<SignWord>& words);

struct PackingFamily {
  Codebook codebook;
  double epsilon = 0.0;
  double tau = 1.0;
  std::vector<QuadraticFunction> members;
  double domain_radius = 0.0;
};

// Members f_i(x) = (tau/2) ||x - epsilon w_i||^2 on the l-infinity ball of
// radius epsilon.
PackingFamily make_packing_family(const Codebook& codebook, double epsilon, double tau);

struct PairWitness {
  std::size_t i = 0;
  std::size_t j = 0;
  int hamming = 0;
  double distance = 0.0;
  double sup_gap = 0.0;
};

struct PackingReport {
  bool membership = true;
  bool separation = true;
  bool gap_bound = true;
  // Pair with the smallest separation and pair with the largest sup-gap.
  std::optional<PairWitness> closest_pair;
  std::optional<PairWitness> widest_gap_pair;
  std::optional<PairWitness> violating_pair;
  // epsilon sqrt(n / 2) and 2 tau n epsilon^2.
  double separation_bound = 0.0;
  double gap_worst_case = 0.0;

  bool all() const { return membership && separation && gap_bound; }
};

PackingReport verify_packing(const PackingFamily& pf);

// 2 tau epsilon^2 rho: sup over the ball of |f_i - f_j| in closed form.
double packing_sup_gap(double tau, double epsilon, int hamming);

// Brute-force sup over a grid on [-epsilon, epsilon]^n of |f_i(x) - f_j(x)|.
// Intended for n <= 4.
double sup_gap_bruteforce(const QuadraticFunction& fi, const QuadraticFunction& fj,
                          double epsilon, double step);

struct KlBernoulli {
  double bound = 0.0;
  double exact = 0.0;
};

// 4 mu^2 / (1/2 - mu) together with KL(Bern(1/2 + mu) || Bern(1/2 - mu)).
KlBernoulli kl_bernoulli_bound(double mu_eff);

struct ComparisonKind {
  double kappa = 2.0;
  double mu = 0.1;
  std::optional<double> delta0;
};
struct GaussianEvalKind {
  double sigma2 = 1.0;
};
using LabOracleKind = std::variant<ComparisonKind, GaussianEvalKind>;

struct KlBudgetReport {
  // Per-pair KL bound at the worst-case gap 2 tau n epsilon^2.
  double kl_worst_case = 0.0;
  // Same bound at the largest exact pair gap in the family.
  double kl_exact = 0.0;
  // (1/16)(n/8) ln 2
  double budget = 0.0;
  bool passes = false;
  bool passes_exact = false;
  // (2 tau n epsilon^2)^(kappa - 1) <= delta0, when delta0 is supplied.
  std::optional<bool> small_gap_condition;
};

// (1/16)(n/8) ln 2
double kl_hypothesis_budget(std::size_t n);
// 16 T mu^2 gap^(2(kappa-1)) or (T / 2 sigma^2) gap^2.
double kl_pair_bound(const LabOracleKind& kind, std::int64_t T, double gap);

KlBudgetReport kl_budget_check(const PackingFamily& pf, std::int64_t T, const LabOracleKind& kind);

double epsilon_T(std::size_t n, std::int64_t T, double tau, double mu, double kappa);

// (1/7)(1/32)(n ln 2 / (2048 mu^2 T))^(1/(2(kappa-1))) for kappa > 1 and
// (1/7)(tau/2)(1/4) exp(-128 T mu^2 / (n (1/2 - mu))) for kappa = 1.
double lower_bound_value(std::size_t n, std::int64_t T, double mu, double kappa, double tau = 1.0);
// (1/7)(1/32)(n sigma^2 ln 2 / (64 T))^(1/2)
double lower_bound_value_eval(std::size_t n, std::int64_t T, double sigma2);

struct GridPacking {
  std::size_t n = 0;
  std::size_t ell = 0;
  std::vector<std::vector<double>> points;
  double s = 0.0;
  double min_distance = 0.0;
};

inline constexpr std::size_t kDefaultGridCap = 4096;

// ell^n points (i + 1/2) / ell per coordinate, with exhaustive pairwise
// distance verification. Throws std::invalid_argument past the cap.
GridPacking grid_packing(std::size_t n, std::size_t ell, std::size_t cap = kDefaultGridCap);

}  // namespace pcopt
