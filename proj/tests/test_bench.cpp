#include <gtest/gtest.h>

#include <sys/wait.h>

#include <bit>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "pcopt/bench.hpp"

using namespace pcopt;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

json smoke_json() {
  return json::parse(R"({
    "function": {"tau": 1.0, "lip": 1.0, "dims": [2]},
    "oracle": {"kind": "exact"},
    "budgets": [1000],
    "trials": 5,
    "seed": 7,
    "solver": {"line_search": "noiseless", "eta_rule": {"kind": "target", "epsilon": 1e-4}},
    "record_timing": false
  })");
}

json noisy_json() {
  return json::parse(R"({
    "function": {"tau": 1.0, "lip": 2.0, "dims": [2, 3], "curvature": "uniform", "x0_distance": 3.0},
    "oracle": {"kind": "direct", "kappa": 1.0, "mu": 0.4, "delta0": 0.4},
    "budgets": [2000, 8000],
    "trials": 4,
    "seed": 11,
    "solver": {"line_search": "robust", "eta_rule": {"kind": "budget", "confidence": 2.0}},
    "record_timing": false,
    "threads": 2
  })");
}

fs::path temp_dir() {
  fs::path d = fs::temp_directory_path() / ("pcopt_test_" + std::to_string(::getpid()));
  fs::create_directories(d);
  return d;
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream out(p);
  out << text;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run_cli(const std::string& args) {
  std::string cmd = std::string(PCOPT_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

ResultTable planted_table(double scale, double exponent) {
  ResultTable t;
  for (std::int64_t T : {1000, 3000, 10000, 30000, 100000}) {
    ResultRow r;
    r.n = 2;
    r.oracle_kind = "direct";
    r.kappa = 2.0;
    r.T = T;
    r.final_gap = scale * std::pow(static_cast<double>(T), exponent);
    t.rows.push_back(r);
  }
  return t;
}

}  // namespace

TEST(ExperimentSpec, SmokeRun) {
  ExperimentSpec s = parse_experiment_spec(smoke_json());
  ResultTable t = run_experiment(s);
  ASSERT_EQ(t.rows.size(), 5u);
  for (const auto& r : t.rows) {
    EXPECT_TRUE(r.error.empty()) << r.error;
    EXPECT_LE(r.final_gap, 1e-4);
    EXPECT_LE(r.comparisons_used, 1000);
    EXPECT_EQ(r.oracle_kind, "exact");
  }
}

TEST(ExperimentSpec, RejectsUnknownKeys) {
  json j = smoke_json();
  j["extra"] = 1;
  EXPECT_THROW(parse_experiment_spec(j), ValidationError);
  j = smoke_json();
  j["function"]["radius"] = 1;
  EXPECT_THROW(parse_experiment_spec(j), ValidationError);
  j = smoke_json();
  j["oracle"]["mu"] = 0.1;
  EXPECT_THROW(parse_experiment_spec(j), ValidationError);
  j = smoke_json();
  j["solver"]["eta_rule"]["eta"] = 0.1;
  EXPECT_THROW(parse_experiment_spec(j), ValidationError);
}

TEST(ExperimentSpec, RejectsBadValues) {
  json j = smoke_json();
  j["budgets"] = {1000, 1000};
  EXPECT_THROW(parse_experiment_spec(j), ValidationError);
  j = smoke_json();
  j["trials"] = 0;
  EXPECT_THROW(parse_experiment_spec(j), ValidationError);
  j = smoke_json();
  j["function"]["lip"] = 0.5;
  EXPECT_THROW(parse_experiment_spec(j), ValidationError);
  j = smoke_json();
  j["solver"]["eta_rule"] = {{"kind", "budget"}};
  EXPECT_THROW(parse_experiment_spec(j), ValidationError);
  j = smoke_json();
  j["budgets"] = "many";
  EXPECT_THROW(parse_experiment_spec(j), ValidationError);
}

TEST(RunExperiment, DeterministicAndWithinBudget) {
  ExperimentSpec s = parse_experiment_spec(noisy_json());
  ResultTable a = run_experiment(s);
  s.threads = 1;
  ResultTable b = run_experiment(s);
  EXPECT_EQ(to_csv(a), to_csv(b));
  EXPECT_EQ(a.rows.size(), 2u * 2u * 4u);
  for (const auto& r : a.rows) {
    EXPECT_TRUE(r.error.empty()) << r.error;
    EXPECT_LE(r.comparisons_used, r.T);
    EXPECT_EQ(r.kappa, 1.0);
    EXPECT_EQ(r.sigma2, 0.0);
  }
}

TEST(RunExperiment, CellSeedsDiffer) {
  OracleSpec o;
  std::set<std::uint64_t> seeds;
  for (std::size_t n : {2u, 3u}) {
    for (std::int64_t T : {1000, 2000}) {
      for (int trial = 0; trial < 10; ++trial) seeds.insert(cell_seed(1, n, T, o, trial));
    }
  }
  EXPECT_EQ(seeds.size(), 40u);
  EXPECT_EQ(cell_seed(1, 2, 1000, o, 3), cell_seed(1, 2, 1000, o, 3));
  EXPECT_NE(cell_seed(1, 2, 1000, o, 3), cell_seed(2, 2, 1000, o, 3));
}

TEST(RunExperiment, EvaluationOraclesReportCalibration) {
  json j = noisy_json();
  j["oracle"] = {{"kind", "gaussian_eval"}, {"sigma2", 0.5}};
  j["function"]["dims"] = {2};
  j["budgets"] = {3000};
  j["trials"] = 2;
  ResultTable t = run_experiment(parse_experiment_spec(j));
  for (const auto& r : t.rows) {
    EXPECT_EQ(r.kappa, 2.0);
    EXPECT_EQ(r.sigma2, 0.5);
    EXPECT_LE(r.comparisons_used, 3000);
  }
  j["oracle"] = {{"kind", "gamma_eval"}, {"shape", 0.5}, {"rate", 1.0}};
  t = run_experiment(parse_experiment_spec(j));
  for (const auto& r : t.rows) {
    EXPECT_EQ(r.kappa, 2.0);
    EXPECT_DOUBLE_EQ(r.sigma2, 0.75);
  }
}

TEST(BudgetPlan, CostFitsBudget) {
  FunctionClassParams p{1.0, 1.0, 2};
  ComparisonParams c{2.0, 0.17, 0.24};
  double prev_eta = INFINITY;
  for (std::int64_t T : {1000, 10000, 100000, 1000000}) {
    BudgetPlan plan = plan_for_budget(p, 200.0, c, T, 2.0);
    if (!plan.feasible) continue;
    EXPECT_LE(plan.planned_cost, static_cast<double>(T));
    EXPECT_LE(plan.eta, prev_eta);
    prev_eta = plan.eta;
  }
}

TEST(Aggregates, OnePerCellAndStderrShrinks) {
  ExperimentSpec s = parse_experiment_spec(noisy_json());
  s.dims = {2};
  s.budgets = {4000};
  s.trials = 40;
  ResultTable small = run_experiment(s);
  auto a = small.aggregates();
  ASSERT_EQ(a.size(), 1u);
  EXPECT_EQ(a[0].count, 40);
  s.trials = 160;
  auto b = run_experiment(s).aggregates();
  ASSERT_EQ(b.size(), 1u);
  // Quadrupled trials halve the standard error up to sampling noise.
  double ratio = b[0].stderr_gap / a[0].stderr_gap;
  EXPECT_GT(ratio, 0.25);
  EXPECT_LT(ratio, 0.9);

  ExperimentSpec g = parse_experiment_spec(noisy_json());
  auto cells = run_experiment(g).aggregates();
  EXPECT_EQ(cells.size(), 4u);
}

TEST(Fit, PlantedPowerLaw) {
  RateFit f = fit_rate(planted_table(10.0, -0.5), RateRegime::power_law);
  EXPECT_NEAR(f.slope, -0.5, 1e-12);
  EXPECT_NEAR(f.r_squared, 1.0, 1e-12);
  EXPECT_NEAR(f.intercept, std::log(10.0), 1e-10);
  EXPECT_EQ(f.cells, 5);
}

TEST(Fit, PlantedExponential) {
  ResultTable t;
  for (std::int64_t T : {100, 400, 900, 1600}) {
    ResultRow r;
    r.n = 4;
    r.oracle_kind = "direct";
    r.T = T;
    r.final_gap = 3.0 * std::exp(-0.2 * std::sqrt(T / 4.0));
    t.rows.push_back(r);
  }
  RateFit f = fit_rate(t, RateRegime::exponential);
  EXPECT_NEAR(f.slope, -0.2, 1e-12);
  EXPECT_NEAR(f.r_squared, 1.0, 1e-12);
}

TEST(Fit, TooFewCells) {
  ResultTable t = planted_table(1.0, -1.0);
  t.rows.resize(3);
  EXPECT_THROW(fit_rate(t, RateRegime::power_law), std::invalid_argument);
}

TEST(Emit, CsvHeaderAndRoundTrip) {
  ResultTable empty;
  EXPECT_EQ(to_csv(empty),
            "n,oracle_kind,kappa,sigma2,T,trial,seed,final_gap,comparisons_used,"
            "uncertified_steps,wall_time_ms\n");

  ResultTable t = planted_table(0.1, -0.37);
  t.rows[1].final_gap = 1.0 / 3.0;
  t.rows[2].wall_time_ms = 12.345678901234567;
  t.rows[3].seed = 18446744073709551615ULL;
  ResultTable back = parse_csv(to_csv(t));
  ASSERT_EQ(back.rows.size(), t.rows.size());
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    EXPECT_EQ(std::bit_cast<std::uint64_t>(back.rows[i].final_gap),
              std::bit_cast<std::uint64_t>(t.rows[i].final_gap));
    EXPECT_EQ(back.rows[i].wall_time_ms, t.rows[i].wall_time_ms);
    EXPECT_EQ(back.rows[i].seed, t.rows[i].seed);
    EXPECT_EQ(back.rows[i].T, t.rows[i].T);
  }
  EXPECT_EQ(to_csv(back), to_csv(t));
}

TEST(Emit, JsonRoundTripAndSections) {
  ResultTable t = planted_table(0.1, -0.37);
  t.rows[0].final_gap = NAN;
  t.rows[0].error = "boom";
  auto fits = fit_all(planted_table(0.1, -0.37), RateRegime::power_law);
  json j = to_json(t, fits);
  // The failed row's cell has no valid trials and no aggregate.
  EXPECT_EQ(j["aggregates"].size(), 4u);
  EXPECT_EQ(j["fits"].size(), 1u);
  EXPECT_TRUE(j["rows"][0]["final_gap"].is_null());
  ResultTable back = parse_json(json::parse(j.dump()));
  ASSERT_EQ(back.rows.size(), t.rows.size());
  EXPECT_TRUE(std::isnan(back.rows[0].final_gap));
  EXPECT_EQ(back.rows[0].error, "boom");
  for (std::size_t i = 1; i < t.rows.size(); ++i) {
    EXPECT_EQ(back.rows[i].final_gap, t.rows[i].final_gap);
  }
}

TEST(Emit, FilesEndWithNewline) {
  fs::path d = temp_dir();
  ResultTable t = planted_table(1.0, -0.5);
  emit(t, {}, "csv", (d / "a.csv").string());
  emit(t, {}, "json", (d / "a.json").string());
  for (const char* name : {"a.csv", "a.json"}) {
    std::string text = read_file(d / name);
    ASSERT_FALSE(text.empty());
    EXPECT_EQ(text.back(), '\n');
  }
  EXPECT_EQ(to_csv(read_table((d / "a.csv").string())), to_csv(t));
  EXPECT_EQ(to_csv(read_table((d / "a.json").string())), to_csv(t));
  EXPECT_THROW(emit(t, {}, "csv", (d / "missing" / "x.csv").string()), std::runtime_error);
  fs::remove_all(d);
}

TEST(Lab, EpsilonTPassesAndDoubledFails) {
  LabSpec ls;
  json ok = lab_report(ls);
  EXPECT_TRUE(ok["pass"].get<bool>());
  ls.epsilon_scale = 2.0;
  json bad = lab_report(ls);
  EXPECT_FALSE(bad["pass"].get<bool>());
  EXPECT_FALSE(bad["kl_comparison"]["pass"].get<bool>());
  EXPECT_TRUE(bad["codebook"]["pass"].get<bool>());
  EXPECT_TRUE(bad["packing"]["pass"].get<bool>());
  EXPECT_TRUE(bad["grid"]["pass"].get<bool>());
}

TEST(Lab, GridCapError) {
  LabSpec ls;
  ls.grid_n = 16;
  ls.grid_ell = 10;
  EXPECT_THROW(lab_report(ls), std::invalid_argument);
  LabSpec small;
  small.n = 4;
  EXPECT_THROW(lab_report(small), ValidationError);
}

TEST(Cli, ExitCodes) {
  fs::path d = temp_dir();
  write_file(d / "spec.json", smoke_json().dump());
  json bad = smoke_json();
  bad["bogus"] = true;
  write_file(d / "bad.json", bad.dump());

  EXPECT_EQ(run_cli("run --spec " + (d / "spec.json").string() + " --out " +
                    (d / "out.csv").string()),
            0);
  EXPECT_TRUE(fs::exists(d / "out.csv"));
  EXPECT_EQ(run_cli("run --spec " + (d / "spec.json").string() + " --out " +
                    (d / "out.json").string() + " --format json"),
            0);
  EXPECT_EQ(run_cli("run --spec " + (d / "bad.json").string() + " --out " +
                    (d / "x.csv").string()),
            1);
  EXPECT_EQ(run_cli("run --spec " + (d / "nope.json").string()), 1);
  EXPECT_EQ(run_cli("frobnicate"), 1);
  EXPECT_EQ(run_cli("lab --n 8 --kappa 2 --T 1000000 --out " + (d / "lab.json").string()), 0);
  EXPECT_TRUE(json::parse(read_file(d / "lab.json"))["pass"].get<bool>());
  EXPECT_EQ(run_cli("lab --n 4 --kappa 2 --T 1000 --out " + (d / "lab2.json").string()), 1);
  EXPECT_EQ(run_cli("run --spec " + (d / "spec.json").string() + " --out " +
                    (d / "missing" / "x.csv").string()),
            2);
  fs::remove_all(d);
}
