#pragma once

#include <cstdint>
#include <limits>

namespace pcopt {

struct RepeatConfig {
  double delta = 0.1;
  std::int64_t max_samples = std::numeric_limits<std::int64_t>::max();

  void validate() const;
};

struct RepeatResult {
  int decided_sign = 1;
  std::int64_t samples_used = 0;
  int rounds = 0;
  bool certified = false;
};

// Half-width of the confidence band after round l:
// sqrt((l + 1) ln(2 / delta) / 2^l).
double confidence_width(int round, double delta);

// Samples drawn when the band first closes for a source that always returns
// the same sign (|mean| = 1).
std::int64_t deterministic_stop_samples(double delta);

// Order-of-magnitude sample count for a source with P(+1) = p:
// B log2(B) with B = ln(2/delta) / (4 (1/2 - p)^2).
double sample_complexity_bound(double p, double delta);

// Sign certifier fed one +/-1 sample at a time. Round l consists of 2^l
// samples; at the end of each round the test |mean| / 2 >= width(l) is
// applied to the running mean over every sample seen so far.
class SignCertifier {
 public:
  explicit SignCertifier(double delta);

  // Returns true once the sign has been certified. Further pushes after
  // certification are rejected.
  bool push(int sample);

  bool certified() const { return certified_; }
  // Sign of the running sum; a zero sum resolves to +1.
  int sign() const { return sum_ < 0 ? -1 : 1; }
  std::int64_t samples() const { return samples_; }
  std::int64_t sum() const { return sum_; }
  // Index of the round currently being filled (or the one that certified).
  int round() const { return round_; }
  double mean() const;

  RepeatResult result() const;

 private:
  double log_term_;
  std::int64_t samples_ = 0;
  std::int64_t sum_ = 0;
  std::int64_t round_end_ = 1;
  int round_ = 0;
  bool certified_ = false;
};

template <class Source>
RepeatResult repeat_until_confident(Source&& source, const RepeatConfig& cfg) {
  cfg.validate();
  SignCertifier cert(cfg.delta);
  while (cert.samples() < cfg.max_samples) {
    if (cert.push(source())) break;
  }
  return cert.result();
}

}  // namespace pcopt
