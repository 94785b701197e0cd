// pcopt: experiment runner for comparison-based coordinate descent.
//
//   pcopt run --spec spec.json --out results.csv --format csv [--threads N] [--seed S]
//   pcopt fit --in results.csv --regime power|exp
//   pcopt lab --n 8 --kappa 2 --T 1000000 --out lab.json
//   pcopt demo

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "pcopt/bench.hpp"

namespace {

constexpr int kValidation = 1;
constexpr int kRuntime = 2;

void print_fit(const pcopt::RateFit& f) {
  std::printf("n=%zu oracle=%s regime=%s slope=%.6g +/- %.3g r2=%.6f cells=%d\n", f.n,
              f.oracle_kind.c_str(), pcopt::regime_name(f.regime).c_str(), f.slope,
              f.slope_stderr, f.r_squared, f.cells);
}

std::vector<pcopt::RateFit> try_fits(const pcopt::ResultTable& t) {
  std::vector<pcopt::RateFit> fits;
  for (auto regime : {pcopt::RateRegime::power_law, pcopt::RateRegime::exponential}) {
    try {
      auto f = pcopt::fit_all(t, regime);
      fits.insert(fits.end(), f.begin(), f.end());
    } catch (const std::invalid_argument&) {
      // Too few cells or a zero gap; the table is still written.
    }
  }
  return fits;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Comparison-oracle coordinate descent experiments"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Run an experiment spec");
  std::string spec_path, out_path, format;
  std::optional<int> threads;
  std::optional<std::uint64_t> seed;
  run->add_option("--spec", spec_path, "Experiment spec (JSON)")->required();
  run->add_option("--out", out_path, "Output path (overrides the spec)");
  run->add_option("--format", format, "csv or json (overrides the spec)")
      ->check(CLI::IsMember({"csv", "json"}));
  run->add_option("--threads", threads, "Worker threads");
  run->add_option("--seed", seed, "Base seed (overrides the spec)");

  auto* fit = app.add_subcommand("fit", "Fit rate exponents to a result table");
  std::string in_path, regime = "power";
  fit->add_option("--in", in_path, "Result table (csv or json)")->required();
  fit->add_option("--regime", regime, "power or exp")->check(CLI::IsMember({"power", "exp"}));

  auto* lab = app.add_subcommand("lab", "Lower-bound construction report");
  pcopt::LabSpec ls;
  std::string lab_out;
  std::optional<double> lab_delta0, lab_eps;
  lab->add_option("--n", ls.n, "Dimension (>= 8)")->required();
  lab->add_option("--kappa", ls.kappa, "Oracle exponent")->required();
  lab->add_option("--T", ls.T, "Query budget")->required();
  lab->add_option("--out", lab_out, "Report path (JSON)")->required();
  lab->add_option("--mu", ls.mu, "Oracle mu");
  lab->add_option("--tau", ls.tau, "Strong convexity");
  lab->add_option("--delta0", lab_delta0, "Oracle delta0");
  lab->add_option("--epsilon", lab_eps, "Packing scale (default epsilon_T)");
  lab->add_option("--epsilon-scale", ls.epsilon_scale, "Multiplier on the packing scale");
  lab->add_option("--sigma2", ls.sigma2, "Evaluation noise variance");
  lab->add_option("--grid-n", ls.grid_n, "Grid packing dimension");
  lab->add_option("--ell", ls.grid_ell, "Grid points per axis");
  lab->add_option("--grid-cap", ls.grid_cap, "Grid enumeration cap");
  lab->add_option("--seed", ls.seed, "Codebook seed");

  auto* demo = app.add_subcommand("demo", "Run the default rate grid and print fits");
  int demo_trials = 50;
  demo->add_option("--trials", demo_trials, "Trials per cell");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kValidation;
  }

  try {
    if (*run) {
      auto spec = pcopt::load_experiment_spec(spec_path);
      if (!out_path.empty()) spec.output_path = out_path;
      if (!format.empty()) spec.format = format;
      if (threads) spec.threads = *threads;
      if (seed) spec.seed = *seed;
      spec.validate();
      if (spec.output_path.empty()) throw pcopt::ValidationError("no output path given");
      auto table = pcopt::run_experiment(spec);
      auto fits = try_fits(table);
      pcopt::emit(table, fits, spec.format, spec.output_path);
      std::printf("wrote %zu rows to %s\n", table.rows.size(), spec.output_path.c_str());
      for (const auto& f : fits) print_fit(f);
    } else if (*fit) {
      auto table = pcopt::read_table(in_path);
      auto r = regime == "power" ? pcopt::RateRegime::power_law : pcopt::RateRegime::exponential;
      for (const auto& f : pcopt::fit_all(table, r)) print_fit(f);
    } else if (*lab) {
      ls.delta0 = lab_delta0;
      ls.epsilon = lab_eps;
      auto report = pcopt::lab_report(ls);
      std::ofstream out(lab_out);
      if (!out) throw std::runtime_error("cannot open '" + lab_out + "' for writing");
      out << report.dump(2) << "\n";
      if (!out) throw std::runtime_error("write to '" + lab_out + "' failed");
      std::printf("lab report %s: %s\n", report["pass"].get<bool>() ? "pass" : "fail",
                  lab_out.c_str());
    } else if (*demo) {
      for (double kappa : {2.0, 1.0}) {
        for (std::size_t n : {2, 4}) {
          auto spec = pcopt::acceptance_rate_spec(kappa, n);
          spec.trials = demo_trials;
          auto table = pcopt::run_experiment(spec);
          auto r = kappa > 1.0 ? pcopt::RateRegime::power_law : pcopt::RateRegime::exponential;
          for (const auto& a : table.aggregates()) {
            std::printf("kappa=%g n=%zu T=%lld mean_gap=%.6g stderr=%.3g\n", kappa, a.n,
                        static_cast<long long>(a.T), a.mean_gap, a.stderr_gap);
          }
          print_fit(pcopt::fit_rate(table, r));
        }
      }
    }
  } catch (const pcopt::ValidationError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kValidation;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kValidation;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kRuntime;
  }
  return 0;
}
