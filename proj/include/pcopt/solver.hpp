#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pcopt/core.hpp"
#include "pcopt/line_search.hpp"
#include "pcopt/oracles.hpp"

namespace pcopt {

enum class DirectionMode { coordinate, random_unit_sphere };
enum class LineSearchMode { noiseless, robust };

struct SolverConfig {
  // Exactly one of target_epsilon and eta must be set.
  std::optional<double> target_epsilon;
  std::optional<double> eta;
  std::int64_t total_budget = kUnlimited;
  double delta = 0.1;
  DirectionMode direction_mode = DirectionMode::coordinate;
  LineSearchMode line_search_mode = LineSearchMode::noiseless;
  std::uint64_t seed = 0;
  // Read f(x0) - f(x*) from the oracle's function to fix the iteration count K.
  // Without it the run ends only when the budget does.
  bool use_ground_truth = true;
  // Ignore K and keep iterating until the budget runs out.
  bool run_to_budget = false;
  // Per-race sample cap for the robust line search; 0 derives caps from the
  // per-search budget share.
  std::int64_t race_cap = 0;

  void validate() const;
};

struct IterateRecord {
  std::int64_t k = 0;
  // Coordinate index, or -1 for a sphere direction.
  std::int64_t coordinate = -1;
  double alpha = 0.0;
  std::int64_t comparisons = 0;
  double gap = 0.0;
  bool certified = true;
};

struct SolveTrace {
  std::vector<IterateRecord> iterates;
  Point final;
  double initial_gap = 0.0;
  std::int64_t total_comparisons = 0;
  std::int64_t uncertified_steps = 0;
  // Comparisons spent on a line search that the budget cut short.
  std::int64_t discarded_comparisons = 0;
  std::optional<std::int64_t> planned_iterations;
  double eta = 0.0;
  std::string diagnostic;
};

struct SolveResult {
  Point x;
  SolveTrace trace;
};

// sqrt(epsilon tau / (4 n L^2))
double eta_for_target(double epsilon, const FunctionClassParams& params);

// ceil((4 n L / tau) ln(initial_gap / (2 n L^2 eta^2 / tau))), floored at 0.
std::int64_t planned_iterations(double initial_gap, double eta, const FunctionClassParams& params);

// 2 n L^2 eta^2 / tau: the floor the expected gap contracts toward.
double contraction_floor(double eta, const FunctionClassParams& params);

// Races a robust search is expected to run from the unit seed bracket down to
// width 2 eta: four for orientation and expansion plus two per shrinking
// iteration.
double planned_races_per_search(double eta);

SolveResult solve(ComparisonOracle& oracle, const Point& x0, const SolverConfig& cfg);

}  // namespace pcopt
