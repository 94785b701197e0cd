#pragma once

#include <cstdint>
#include <random>
#include <variant>

#include "pcopt/core.hpp"

namespace pcopt {

using Rng = std::mt19937_64;

struct NoNoise {};
struct GaussianNoise {
  double sigma2 = 1.0;
};
// Density (rate^a / 2 Gamma(a)) |x|^(a-1) exp(-rate |x|), a = shape.
struct TwoSidedGammaNoise {
  double shape = 1.0;
  double rate = 1.0;
};

using NoiseModel = std::variant<NoNoise, GaussianNoise, TwoSidedGammaNoise>;

void validate(const NoiseModel& m);
double sample_noise(const NoiseModel& m, Rng& rng);
// E[w^2]. For the two-sided gamma this is shape (shape + 1) / rate^2.
double noise_second_moment(const NoiseModel& m);

struct ComparisonParams {
  double kappa = 1.0;
  double mu = 0.1;
  double delta0 = 0.5;

  void validate() const;
};

// 1/2 + min(delta0, mu |df|^(kappa - 1)); exactly 1/2 when df == 0.
double success_probability(const ComparisonParams& p, double df);

ComparisonParams gaussian_comparison_params(double sigma2);
ComparisonParams gamma_comparison_params(double shape, double rate);

struct QueryLedger {
  std::int64_t eval_count = 0;
  std::int64_t compare_count = 0;
};

class EvaluationOracle {
 public:
  EvaluationOracle(QuadraticFunction f, NoiseModel noise, std::uint64_t seed);

  double query(const Point& x);
  double query_along(const Point& x, const Point& d, double alpha);

  const QuadraticFunction& function() const { return f_; }
  const NoiseModel& noise() const { return noise_; }
  const QueryLedger& ledger() const { return ledger_; }

 private:
  QuadraticFunction f_;
  NoiseModel noise_;
  Rng rng_;
  QueryLedger ledger_;
};

struct DirectMode {
  ComparisonParams params;
};
struct DerivedMode {
  NoiseModel noise;
};
struct ExactMode {};

using ComparisonMode = std::variant<DirectMode, DerivedMode, ExactMode>;

// C(x, y) = sign{f(y) - f(x)} up to noise. Exact ties resolve to +1.
class ComparisonOracle {
 public:
  ComparisonOracle(QuadraticFunction f, ComparisonMode mode, std::uint64_t seed);

  int compare(const Point& x, const Point& y);
  // compare(x + a d, x + b d)
  int compare_along(const Point& x, const Point& d, double a, double b);

  const QuadraticFunction& function() const { return f_; }
  const ComparisonMode& mode() const { return mode_; }
  const QueryLedger& ledger() const { return ledger_; }
  // Evaluations spent by a derived-mode oracle; zero otherwise.
  std::int64_t inner_eval_count() const;

  bool is_exact() const { return std::holds_alternative<ExactMode>(mode_); }

 private:
  int respond(double fx, double fy);

  QuadraticFunction f_;
  ComparisonMode mode_;
  Rng rng_;
  QueryLedger ledger_;
  std::int64_t inner_evals_ = 0;
};

}  // namespace pcopt
