#include "pcopt/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <utility>

namespace pcopt {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

int sign_of(double v) { return v < 0.0 ? -1 : 1; }

}  // namespace

void validate(const NoiseModel& m) {
  std::visit(overloaded{
                 [](const NoNoise&) {},
                 [](const GaussianNoise& g) {
                   if (!(g.sigma2 > 0.0) || !std::isfinite(g.sigma2)) {
                     throw std::invalid_argument("GaussianNoise: sigma2 must be positive");
                   }
                 },
                 [](const TwoSidedGammaNoise& g) {
                   if (!(g.shape > 0.0 && g.shape <= 1.0)) {
                     throw std::invalid_argument("TwoSidedGammaNoise: shape must be in (0, 1]");
                   }
                   if (!(g.rate > 0.0) || !std::isfinite(g.rate)) {
                     throw std::invalid_argument("TwoSidedGammaNoise: rate must be positive");
                   }
                 },
             },
             m);
}

double sample_noise(const NoiseModel& m, Rng& rng) {
  return std::visit(overloaded{
                        [](const NoNoise&) { return 0.0; },
                        [&](const GaussianNoise& g) {
                          std::normal_distribution<double> dist(0.0, std::sqrt(g.sigma2));
                          return dist(rng);
                        },
                        [&](const TwoSidedGammaNoise& g) {
                          std::gamma_distribution<double> mag(g.shape, 1.0 / g.rate);
                          std::bernoulli_distribution coin(0.5);
                          double v = mag(rng);
                          return coin(rng) ? v : -v;
                        },
                    },
                    m);
}

double noise_second_moment(const NoiseModel& m) {
  return std::visit(overloaded{
                        [](const NoNoise&) { return 0.0; },
                        [](const GaussianNoise& g) { return g.sigma2; },
                        [](const TwoSidedGammaNoise& g) {
                          return g.shape * (g.shape + 1.0) / (g.rate * g.rate);
                        },
                    },
                    m);
}

void ComparisonParams::validate() const {
  if (!(kappa >= 1.0) || !std::isfinite(kappa)) {
    throw std::invalid_argument("ComparisonParams: kappa must be >= 1");
  }
  if (!(mu > 0.0) || !std::isfinite(mu)) {
    throw std::invalid_argument("ComparisonParams: mu must be positive");
  }
  if (!(delta0 > 0.0 && delta0 <= 0.5)) {
    throw std::invalid_argument("ComparisonParams: delta0 must be in (0, 1/2]");
  }
  if (kappa == 1.0 && mu > delta0) {
    throw std::invalid_argument("ComparisonParams: kappa = 1 requires mu <= delta0");
  }
}

double success_probability(const ComparisonParams& p, double df) {
  double a = std::fabs(df);
  if (a == 0.0) return 0.5;
  return 0.5 + std::min(p.delta0, p.mu * std::pow(a, p.kappa - 1.0));
}

ComparisonParams gaussian_comparison_params(double sigma2) {
  if (!(sigma2 > 0.0) || !std::isfinite(sigma2)) {
    throw std::invalid_argument("gaussian_comparison_params: sigma2 must be positive");
  }
  const double pi = std::numbers::pi;
  const double e = std::numbers::e;
  ComparisonParams p;
  p.kappa = 2.0;
  p.mu = 1.0 / std::sqrt(4.0 * pi * sigma2 * e);
  p.delta0 = 1.0 / std::sqrt(2.0 * pi * e);
  return p;
}

ComparisonParams gamma_comparison_params(double shape, double rate) {
  if (!(shape > 0.0 && shape <= 1.0)) {
    throw std::invalid_argument("gamma_comparison_params: shape must be in (0, 1]");
  }
  if (!(rate > 0.0) || !std::isfinite(rate)) {
    throw std::invalid_argument("gamma_comparison_params: rate must be positive");
  }
  const double e = std::numbers::e;
  const double g = std::tgamma(shape);
  const double denom = 4.0 * shape * shape * g * g;
  ComparisonParams p;
  p.kappa = 1.0 + 2.0 * shape;
  p.mu = std::pow(rate / (2.0 * e), 2.0 * shape) / denom;
  p.delta0 = std::pow(shape / e, 2.0 * shape) / denom;
  return p;
}

EvaluationOracle::EvaluationOracle(QuadraticFunction f, NoiseModel noise, std::uint64_t seed)
    : f_(std::move(f)), noise_(std::move(noise)), rng_(seed) {
  validate(noise_);
}

double EvaluationOracle::query(const Point& x) {
  double v = f_.evaluate(x);
  ++ledger_.eval_count;
  return v + sample_noise(noise_, rng_);
}

double EvaluationOracle::query_along(const Point& x, const Point& d, double alpha) {
  double v = f_.evaluate_along(x, d, alpha);
  ++ledger_.eval_count;
  return v + sample_noise(noise_, rng_);
}

ComparisonOracle::ComparisonOracle(QuadraticFunction f, ComparisonMode mode, std::uint64_t seed)
    : f_(std::move(f)), mode_(std::move(mode)), rng_(seed) {
  std::visit(overloaded{
                 [](const DirectMode& m) { m.params.validate(); },
                 [](const DerivedMode& m) { validate(m.noise); },
                 [](const ExactMode&) {},
             },
             mode_);
}

std::int64_t ComparisonOracle::inner_eval_count() const { return inner_evals_; }

int ComparisonOracle::respond(double fx, double fy) {
  ++ledger_.compare_count;
  return std::visit(overloaded{
                        [&](const DirectMode& m) {
                          double df = fy - fx;
                          double p = success_probability(m.params, df);
                          std::uniform_real_distribution<double> u(0.0, 1.0);
                          int truth = sign_of(df);
                          return u(rng_) < p ? truth : -truth;
                        },
                        [&](const DerivedMode& m) {
                          double ex = fx + sample_noise(m.noise, rng_);
                          double ey = fy + sample_noise(m.noise, rng_);
                          inner_evals_ += 2;
                          return sign_of(ey - ex);
                        },
                        [&](const ExactMode&) { return sign_of(fy - fx); },
                    },
                    mode_);
}

int ComparisonOracle::compare(const Point& x, const Point& y) {
  // The offset cancels in every response, so work with gaps for precision.
  double fx = f_.gap(x);
  double fy = f_.gap(y);
  return respond(fx, fy);
}

int ComparisonOracle::compare_along(const Point& x, const Point& d, double a, double b) {
  double fx = f_.gap_along(x, d, a);
  double fy = f_.gap_along(x, d, b);
  return respond(fx, fy);
}

}  // namespace pcopt
