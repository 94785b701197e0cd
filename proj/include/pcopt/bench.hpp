#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "pcopt/core.hpp"
#include "pcopt/lowerbound_lab.hpp"
#include "pcopt/oracles.hpp"
#include "pcopt/solver.hpp"

namespace pcopt {

// Bad user input: unknown keys, out-of-range fields, unreadable specs.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class OracleKind { exact, direct, gaussian_eval, gamma_eval };

struct OracleSpec {
  OracleKind kind = OracleKind::exact;
  ComparisonParams params;  // direct
  double sigma2 = 1.0;      // gaussian_eval
  double shape = 0.5;       // gamma_eval
  double rate = 1.0;        // gamma_eval

  std::string name() const;
  ComparisonMode mode() const;
  // Calibration used for planning: the direct params, or the noise maps.
  std::optional<ComparisonParams> calibration() const;
  // Reported kappa; 0 when the oracle has none.
  double kappa_column() const;
  // Noise second moment; 0 for oracles without evaluation noise.
  double sigma2_column() const;
};

enum class EtaRuleKind { fixed, target, budget };

struct EtaRule {
  EtaRuleKind kind = EtaRuleKind::target;
  double eta = 0.01;
  double epsilon = 1e-4;
  // budget rule: races are capped at the majority size that makes a
  // confidence-z call at the weakest racing gap.
  double confidence = 2.0;
};

struct ExperimentSpec {
  double tau = 1.0;
  double lip = 1.0;
  std::vector<std::size_t> dims{2};
  // Centers are uniform in [-center_radius, center_radius]^n.
  double center_radius = 1.0;
  // x0 = center + x0_distance * (uniform unit vector).
  double x0_distance = 1.0;
  // Curvatures all equal tau, or uniform in [tau, lip].
  bool isotropic = true;

  OracleSpec oracle;
  std::vector<std::int64_t> budgets{1000};
  int trials = 1;
  std::uint64_t seed = 0;

  LineSearchMode line_search = LineSearchMode::noiseless;
  DirectionMode direction = DirectionMode::coordinate;
  double delta = 0.1;
  EtaRule eta_rule;

  std::string output_path;
  std::string format = "csv";
  bool record_timing = true;
  int threads = 1;

  void validate() const;
};

// Throws ValidationError on unknown keys or invalid values.
ExperimentSpec parse_experiment_spec(const nlohmann::json& j);
ExperimentSpec load_experiment_spec(const std::string& path);

struct ResultRow {
  std::size_t n = 0;
  std::string oracle_kind;
  double kappa = 0.0;
  double sigma2 = 0.0;
  std::int64_t T = 0;
  int trial = 0;
  std::uint64_t seed = 0;
  double final_gap = 0.0;
  std::int64_t comparisons_used = 0;
  std::int64_t uncertified_steps = 0;
  double wall_time_ms = 0.0;
  std::string error;
};

struct Aggregate {
  std::size_t n = 0;
  std::string oracle_kind;
  double kappa = 0.0;
  double sigma2 = 0.0;
  std::int64_t T = 0;
  int count = 0;
  double mean_gap = 0.0;
  double stderr_gap = 0.0;
};

struct ResultTable {
  std::vector<ResultRow> rows;

  // One entry per (n, oracle, T) cell over rows without errors.
  std::vector<Aggregate> aggregates() const;
};

enum class RateRegime { power_law, exponential };

struct RateFit {
  RateRegime regime = RateRegime::power_law;
  std::size_t n = 0;
  std::string oracle_kind;
  double slope = 0.0;
  double slope_stderr = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  int cells = 0;
};

// Budget-driven choice of eta and the per-race cap for one trial.
struct BudgetPlan {
  double eta = 0.0;
  std::int64_t race_cap = 0;
  std::int64_t planned_iterations = 0;
  double races_per_search = 0.0;
  double planned_cost = 0.0;
  bool feasible = false;
};

// Smallest eta whose planned cost K(eta) * races(eta) * cap(eta) fits in T.
BudgetPlan plan_for_budget(const FunctionClassParams& params, double initial_gap,
                           const ComparisonParams& calibration, std::int64_t T,
                           double confidence);

std::uint64_t cell_seed(std::uint64_t seed, std::size_t n, std::int64_t T,
                        const OracleSpec& oracle, int trial);

ResultTable run_experiment(const ExperimentSpec& spec);

// count budgets spaced evenly in log between lo and hi, rounded to integers.
std::vector<std::int64_t> log_spaced_budgets(std::int64_t lo, std::int64_t hi, int count);

// Rate grid on the direct oracle: kappa = 2 uses mu = 0.17, delta0 = 0.24;
// kappa = 1 uses mu = delta0 = 0.4. Seven budgets from 1e3 to 1e6, 50 trials,
// x0 at distance 20 from the center, budget eta rule.
ExperimentSpec acceptance_rate_spec(double kappa, std::size_t n);

// OLS of log(mean_gap) on log(T) or sqrt(T / n) for one (n, oracle) series.
RateFit fit_series(const std::vector<Aggregate>& cells, RateRegime regime);
// Fits the single series in the table; throws if the table holds several.
RateFit fit_rate(const ResultTable& table, RateRegime regime);
std::vector<RateFit> fit_all(const ResultTable& table, RateRegime regime);

std::string format_double(double v);
std::string to_csv(const ResultTable& table);
nlohmann::json to_json(const ResultTable& table, const std::vector<RateFit>& fits);
ResultTable parse_csv(const std::string& text);
ResultTable parse_json(const nlohmann::json& j);
void emit(const ResultTable& table, const std::vector<RateFit>& fits, const std::string& format,
          const std::string& path);
// Reads a table written by emit, picking the format from the content.
ResultTable read_table(const std::string& path);

std::string regime_name(RateRegime r);

struct LabSpec {
  std::size_t n = 8;
  double kappa = 2.0;
  std::int64_t T = 1000000;
  double mu = 0.17;
  double tau = 1.0;
  std::optional<double> delta0;
  // Packing scale; defaults to epsilon_T (kappa > 1 only).
  std::optional<double> epsilon;
  double epsilon_scale = 1.0;
  double sigma2 = 1.0;
  std::size_t grid_n = 2;
  std::size_t grid_ell = 3;
  std::size_t grid_cap = kDefaultGridCap;
  std::uint64_t seed = 1;
  int max_retries = 20;
};

// Runs the lower-bound construction checks and returns a JSON report whose
// "pass" field is true when every check holds.
nlohmann::json lab_report(const LabSpec& spec);

}  // namespace pcopt
