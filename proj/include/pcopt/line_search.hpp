#pragma once

#include <cstdint>
#include <functional>
#include <limits>

#include "pcopt/core.hpp"
#include "pcopt/oracles.hpp"

namespace pcopt {

struct Bracket {
  double lo = -1.0;
  double mid = 0.0;
  double hi = 1.0;

  double width() const { return hi - lo; }
};

struct LineSearchReport {
  double alpha_hat = 0.0;
  std::int64_t comparisons_used = 0;
  // False if any race was decided by majority at its cap, or if the budget
  // ran out before the bracket closed.
  bool certified = true;
  bool budget_exhausted = false;
  std::int64_t races = 0;
  std::int64_t uncertified_races = 0;
};

// Called with the bracket when shrinking starts and after every shrinking
// iteration.
using BracketObserver = std::function<void(const Bracket&)>;

// compare(a, b) must return sign{g(b) - g(a)} for the restriction g of a
// strongly convex function to the search line, with ties mapped to +1.
using LineComparator = std::function<int(double, double)>;

inline constexpr std::int64_t kUnlimited = std::numeric_limits<std::int64_t>::max();

// Bracketing search with halving. Guarantees |alpha_hat - alpha*| <= eta for
// an error-free comparator.
LineSearchReport line_search_noiseless(const LineComparator& compare, double eta,
                                       std::int64_t max_comparisons = kUnlimited,
                                       const BracketObserver& observe = {});

// 2 log2(256 L decrease / (tau^2 eta^2)), where decrease = g(0) - g(alpha*).
double noiseless_comparison_bound(double lip, double tau, double decrease, double eta);

struct RobustLineSearchConfig {
  double eta = 0.1;
  // Failure probability of the whole search, split evenly over union_count races.
  double delta = 0.1;
  // 0 picks 4 * ceil(log2(256 / eta^2)).
  std::int64_t union_count = 0;
  // Comparisons available to this search.
  std::int64_t budget = kUnlimited;
  // Per-race sample cap; 0 splits the remaining budget over the races still
  // expected in the search.
  std::int64_t race_cap = 0;
};

// Noise-tolerant bracketing search. Every decision is a race between two
// sign certifiers sampled alternately; the first to certify is adopted.
LineSearchReport line_search_robust(ComparisonOracle& oracle, const Point& x, const Point& d,
                                    const RobustLineSearchConfig& cfg,
                                    const BracketObserver& observe = {});

// The robust shrinking loop stops once the bracket is narrower than this.
double robust_stop_width(double eta);

// Min over minimizer positions of the larger racing gap |g(mid) - g(probe)|
// when the probes sit at mid + h/3 and mid + 2h/3 and g has curvature tau.
double racing_gap_floor(double tau, double half_width);

}  // namespace pcopt
