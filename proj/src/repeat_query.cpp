#include "pcopt/repeat_query.hpp"

#include <cmath>
#include <stdexcept>

namespace pcopt {

void RepeatConfig::validate() const {
  if (!(delta > 0.0 && delta < 1.0)) {
    throw std::invalid_argument("RepeatConfig: delta must be in (0, 1)");
  }
  if (max_samples < 1) throw std::invalid_argument("RepeatConfig: max_samples must be >= 1");
}

double confidence_width(int round, double delta) {
  return std::sqrt((round + 1) * std::log(2.0 / delta) / std::ldexp(1.0, round));
}

std::int64_t deterministic_stop_samples(double delta) {
  int l = 0;
  while (0.5 < confidence_width(l, delta)) ++l;
  return (std::int64_t{1} << (l + 1)) - 1;
}

double sample_complexity_bound(double p, double delta) {
  double gap = 0.5 - p;
  double base = std::log(2.0 / delta) / (4.0 * gap * gap);
  return base * std::log2(base);
}

SignCertifier::SignCertifier(double delta) : log_term_(std::log(2.0 / delta)) {
  if (!(delta > 0.0 && delta < 1.0)) {
    throw std::invalid_argument("SignCertifier: delta must be in (0, 1)");
  }
}

double SignCertifier::mean() const {
  return samples_ == 0 ? 0.0 : static_cast<double>(sum_) / static_cast<double>(samples_);
}

bool SignCertifier::push(int sample) {
  if (certified_) throw std::logic_error("SignCertifier: push after certification");
  if (sample != 1 && sample != -1) throw std::invalid_argument("SignCertifier: sample must be +/-1");
  ++samples_;
  sum_ += sample;
  if (samples_ < round_end_) return false;

  double width = std::sqrt((round_ + 1) * log_term_ / std::ldexp(1.0, round_));
  if (std::fabs(mean()) / 2.0 >= width) {
    certified_ = true;
    return true;
  }
  ++round_;
  round_end_ += std::int64_t{1} << round_;
  return false;
}

RepeatResult SignCertifier::result() const {
  RepeatResult r;
  r.decided_sign = sign();
  r.samples_used = samples_;
  r.rounds = round_;
  r.certified = certified_;
  return r;
}

}  // namespace pcopt
