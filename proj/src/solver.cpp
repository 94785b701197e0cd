#include "pcopt/solver.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace pcopt {

void SolverConfig::validate() const {
  if (target_epsilon.has_value() == eta.has_value()) {
    throw std::invalid_argument("SolverConfig: set exactly one of target_epsilon and eta");
  }
  if (target_epsilon && !(*target_epsilon > 0.0)) {
    throw std::invalid_argument("SolverConfig: target_epsilon must be positive");
  }
  if (eta && !(*eta > 0.0)) throw std::invalid_argument("SolverConfig: eta must be positive");
  if (total_budget < 1) throw std::invalid_argument("SolverConfig: total_budget must be >= 1");
  if (!(delta > 0.0 && delta < 1.0)) {
    throw std::invalid_argument("SolverConfig: delta must be in (0, 1)");
  }
  if ((!use_ground_truth || run_to_budget) && total_budget == kUnlimited) {
    throw std::invalid_argument("SolverConfig: a budget-only run needs a finite total_budget");
  }
  if (race_cap < 0) throw std::invalid_argument("SolverConfig: race_cap must be >= 0");
}

double eta_for_target(double epsilon, const FunctionClassParams& params) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("eta_for_target: epsilon must be positive");
  params.validate();
  double n = static_cast<double>(params.dim);
  return std::sqrt(epsilon * params.tau / (4.0 * n * params.lip * params.lip));
}

double contraction_floor(double eta, const FunctionClassParams& params) {
  double n = static_cast<double>(params.dim);
  return 2.0 * n * params.lip * params.lip * eta * eta / params.tau;
}

std::int64_t planned_iterations(double initial_gap, double eta, const FunctionClassParams& params) {
  double n = static_cast<double>(params.dim);
  double floor = contraction_floor(eta, params);
  if (!(initial_gap > floor)) return 0;
  double k = std::ceil(4.0 * n * params.lip / params.tau * std::log(initial_gap / floor));
  return static_cast<std::int64_t>(k);
}

double planned_races_per_search(double eta) {
  return 4.0 + 2.0 * std::max(1.0, std::ceil(std::log(1.0 / eta) / std::log(1.5)));
}

namespace {

Point draw_direction(DirectionMode mode, std::size_t n, Rng& rng, std::int64_t& coordinate) {
  if (mode == DirectionMode::coordinate) {
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    std::size_t i = pick(rng);
    coordinate = static_cast<std::int64_t>(i);
    return Point::unit(n, i);
  }
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> v(n);
  double norm = 0.0;
  while (norm == 0.0) {
    for (auto& c : v) c = normal(rng);
    norm = 0.0;
    for (double c : v) norm += c * c;
    norm = std::sqrt(norm);
  }
  for (auto& c : v) c /= norm;
  coordinate = -1;
  return Point(std::move(v));
}

}  // namespace

SolveResult solve(ComparisonOracle& oracle, const Point& x0, const SolverConfig& cfg) {
  cfg.validate();
  const QuadraticFunction& f = oracle.function();
  const FunctionClassParams& params = f.params();
  if (x0.size() != params.dim) throw std::invalid_argument("solve: dimension mismatch");

  SolveTrace trace;
  trace.eta = cfg.eta ? *cfg.eta : eta_for_target(*cfg.target_epsilon, params);
  trace.initial_gap = f.gap(x0);

  std::optional<std::int64_t> k_max;
  if (cfg.use_ground_truth) {
    k_max = planned_iterations(trace.initial_gap, trace.eta, params);
    trace.planned_iterations = k_max;
  }
  if (cfg.run_to_budget) k_max.reset();

  // Union bound over 4 races per shrinking iteration, every iteration of a
  // search, and every search.
  const double decrease = cfg.use_ground_truth ? std::max(trace.initial_gap, 1.0) : 1.0;
  const double per_search = std::max(
      1.0, std::ceil(1.5 * std::log2(256.0 * params.lip * decrease /
                                     (params.tau * params.tau * trace.eta * trace.eta))));
  double searches = 1000.0;
  if (trace.planned_iterations) {
    searches = static_cast<double>(std::max<std::int64_t>(*trace.planned_iterations, 1));
  }
  const double union_count = 4.0 * per_search * searches;
  const double races_per_search = planned_races_per_search(trace.eta);

  const std::int64_t ledger_start = oracle.ledger().compare_count;
  Rng dir_rng(cfg.seed);
  Point x = x0;
  std::int64_t used = 0;

  for (std::int64_t k = 0; !k_max || k < *k_max; ++k) {
    std::int64_t remaining = cfg.total_budget - used;
    if (remaining <= 0) break;

    IterateRecord rec;
    rec.k = k;
    Point d = draw_direction(cfg.direction_mode, params.dim, dir_rng, rec.coordinate);

    LineSearchReport rep;
    if (cfg.line_search_mode == LineSearchMode::noiseless) {
      auto cmp = [&](double a, double b) { return oracle.compare_along(x, d, a, b); };
      rep = line_search_noiseless(cmp, trace.eta, remaining);
    } else {
      RobustLineSearchConfig rc;
      rc.eta = trace.eta;
      rc.delta = cfg.delta;
      rc.union_count = static_cast<std::int64_t>(std::min(union_count, 1e15));
      rc.budget = remaining;
      rc.race_cap = cfg.race_cap;
      if (rc.race_cap == 0 && remaining != kUnlimited && k_max) {
        double share = static_cast<double>(remaining) / static_cast<double>(*k_max - k);
        rc.race_cap = std::max<std::int64_t>(1, static_cast<std::int64_t>(share / races_per_search));
      }
      rep = line_search_robust(oracle, x, d, rc);
    }
    used += rep.comparisons_used;

    if (rep.budget_exhausted) {
      trace.discarded_comparisons = rep.comparisons_used;
      trace.diagnostic = trace.iterates.empty()
                             ? "budget too small for a single line search"
                             : "budget exhausted during a line search; partial step discarded";
      break;
    }

    x.axpy(rep.alpha_hat, d);
    rec.alpha = rep.alpha_hat;
    rec.comparisons = rep.comparisons_used;
    rec.gap = f.gap(x);
    rec.certified = rep.certified;
    if (!rep.certified) ++trace.uncertified_steps;
    trace.iterates.push_back(rec);
  }

  trace.total_comparisons = oracle.ledger().compare_count - ledger_start;
  trace.final = x;
  return SolveResult{x, std::move(trace)};
}

}  // namespace pcopt
