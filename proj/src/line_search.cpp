#include "pcopt/line_search.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "pcopt/repeat_query.hpp"

namespace pcopt {

namespace {

// Doubling stops here even if the comparator keeps reporting descent.
constexpr int kMaxDoublings = 1000;

struct BudgetExhausted {};

class CountingComparator {
 public:
  CountingComparator(const LineComparator& c, std::int64_t limit) : c_(c), limit_(limit) {}

  int operator()(double a, double b) {
    if (a == b) return 1;
    if (used_ >= limit_) throw BudgetExhausted{};
    ++used_;
    return c_(a, b);
  }

  std::int64_t used() const { return used_; }

 private:
  const LineComparator& c_;
  std::int64_t limit_;
  std::int64_t used_ = 0;
};

}  // namespace

double noiseless_comparison_bound(double lip, double tau, double decrease, double eta) {
  return 2.0 * std::log2(256.0 * lip * decrease / (tau * tau * eta * eta));
}

LineSearchReport line_search_noiseless(const LineComparator& compare, double eta,
                                       std::int64_t max_comparisons,
                                       const BracketObserver& observe) {
  if (!(eta > 0.0)) throw std::invalid_argument("line_search_noiseless: eta must be positive");
  CountingComparator cmp(compare, max_comparisons);
  LineSearchReport report;
  Bracket b;
  try {
    int c_plus = cmp(0.0, 1.0);
    int c_minus = cmp(0.0, -1.0);
    if (c_plus > 0 && c_minus < 0) b.hi = 0.0;
    if (c_minus > 0 && c_plus < 0) b.lo = 0.0;

    auto known = [&](double a) -> int {
      if (a == 1.0) return c_plus;
      if (a == -1.0) return c_minus;
      return cmp(0.0, a);
    };
    for (int s = known(b.hi), k = 0; s < 0 && k < kMaxDoublings; ++k) {
      b.hi *= 2.0;
      s = cmp(0.0, b.hi);
    }
    for (int s = known(b.lo), k = 0; s < 0 && k < kMaxDoublings; ++k) {
      b.lo *= 2.0;
      s = cmp(0.0, b.lo);
    }

    b.mid = 0.5 * (b.lo + b.hi);
    if (observe) observe(b);
    while (b.hi - b.lo >= eta / 2.0) {
      double up = 0.5 * (b.mid + b.hi);
      double down = 0.5 * (b.mid + b.lo);
      if (cmp(b.mid, up) < 0) {
        b.lo = b.mid;
        b.mid = up;
      } else if (cmp(b.mid, down) < 0) {
        b.hi = b.mid;
        b.mid = down;
      } else {
        b.lo = down;
        b.hi = up;
      }
      if (observe) observe(b);
    }
  } catch (const BudgetExhausted&) {
    report.budget_exhausted = true;
    report.certified = false;
  }
  report.alpha_hat = b.mid;
  report.comparisons_used = cmp.used();
  return report;
}

double robust_stop_width(double eta) { return 2.0 * eta; }

double racing_gap_floor(double tau, double half_width) {
  return tau * half_width * half_width / 27.0;
}

namespace {

struct RaceOutcome {
  int winner = 0;
  int sign = 1;
  bool certified = true;
};

class RobustSearch {
 public:
  RobustSearch(ComparisonOracle& oracle, const Point& x, const Point& d,
               const RobustLineSearchConfig& cfg)
      : oracle_(oracle), x_(x), d_(d), cfg_(cfg) {
    std::int64_t unions = cfg.union_count;
    if (unions <= 0) {
      unions = 4 * static_cast<std::int64_t>(
                       std::ceil(std::max(1.0, std::log2(256.0 / (cfg.eta * cfg.eta)))));
    }
    race_delta_ = cfg.delta / static_cast<double>(unions);
    stop_width_ = robust_stop_width(cfg.eta);
  }

  LineSearchReport run(const BracketObserver& observe) {
    Bracket b;
    try {
      orient_and_expand(b);
      b.mid = 0.5 * (b.lo + b.hi);
      if (observe) observe(b);
      while (b.hi - b.lo >= stop_width_) {
        shrink_once(b);
        if (observe) observe(b);
      }
    } catch (const BudgetExhausted&) {
      report_.budget_exhausted = true;
      report_.certified = false;
      b.mid = 0.5 * (b.lo + b.hi);
    }
    report_.alpha_hat = b.mid;
    return report_;
  }

 private:
  std::int64_t remaining() const { return cfg_.budget - report_.comparisons_used; }

  // Races still expected for a bracket of the given width, counting two per
  // shrinking iteration.
  std::int64_t expected_races(double width, bool expanding) const {
    double iters = width > stop_width_ ? std::ceil(std::log(width / stop_width_) / std::log(1.5))
                                       : 0.0;
    return static_cast<std::int64_t>(2.0 * std::max(iters, 1.0)) + (expanding ? 1 : 0);
  }

  std::int64_t race_cap(double width, bool expanding) const {
    std::int64_t left = remaining();
    if (cfg_.race_cap > 0) return std::min(cfg_.race_cap, left);
    if (left == kUnlimited) return left;
    return std::max<std::int64_t>(1, left / expected_races(width, expanding));
  }

  int sample(double a, double b) {
    if (remaining() <= 0) throw BudgetExhausted{};
    ++report_.comparisons_used;
    return oracle_.compare_along(x_, d_, a, b);
  }

  // Races (ref vs p0) against (ref vs p1). Ties at certification go to p0.
  RaceOutcome race(double ref, double p0, double p1, std::int64_t cap) {
    if (remaining() <= 0) throw BudgetExhausted{};
    ++report_.races;
    if (oracle_.is_exact()) return {0, sample(ref, p0), true};
    SignCertifier c0(race_delta_);
    SignCertifier c1(race_delta_);
    std::int64_t drawn = 0;
    while (drawn < cap) {
      bool done0 = c0.push(sample(ref, p0));
      ++drawn;
      bool done1 = false;
      if (drawn < cap) {
        done1 = c1.push(sample(ref, p1));
        ++drawn;
      }
      if (done0) return {0, c0.sign(), true};
      if (done1) return {1, c1.sign(), true};
    }
    ++report_.uncertified_races;
    report_.certified = false;
    // Majority of the more decisive certifier.
    bool pick1 = c1.samples() > 0 && std::fabs(c1.mean()) > std::fabs(c0.mean());
    return pick1 ? RaceOutcome{1, c1.sign(), false} : RaceOutcome{0, c0.sign(), false};
  }

  // Pushes the boundary on side s (+1 or -1) outward starting from h.
  // Returns whether descent was seen and writes the boundary.
  bool expand(int s, double h, double& boundary) {
    bool descended = false;
    for (int k = 0; k < kMaxDoublings; ++k) {
      RaceOutcome r = race(0.0, s * h, s * 2.0 * h, race_cap(2.0 * h, true));
      double probe = r.winner == 0 ? h : 2.0 * h;
      if (r.sign > 0) {
        boundary = s * probe;
        return descended;
      }
      descended = true;
      h = 2.0 * probe;
    }
    boundary = s * h;
    return descended;
  }

  void orient_and_expand(Bracket& b) {
    RaceOutcome r = race(0.0, 1.0, -1.0, race_cap(2.0, true));
    int side = r.winner == 0 ? 1 : -1;
    double boundary = 0.0;
    if (r.sign < 0) {
      // Descent toward `side`: the opposite boundary collapses to 0.
      expand(side, 2.0, boundary);
      if (side > 0) {
        b.lo = 0.0;
        b.hi = boundary;
      } else {
        b.hi = 0.0;
        b.lo = boundary;
      }
      return;
    }
    // Ascent toward `side`: that boundary is +/-1; probe the other side.
    bool descended = expand(-side, 1.0, boundary);
    if (side > 0) {
      b.hi = descended ? 0.0 : 1.0;
      b.lo = boundary;
    } else {
      b.lo = descended ? 0.0 : -1.0;
      b.hi = boundary;
    }
  }

  void shrink_once(Bracket& b) {
    double h = b.hi - b.mid;
    RaceOutcome up = race(b.mid, b.mid + h / 3.0, b.mid + 2.0 * h / 3.0,
                          race_cap(b.hi - b.lo, false));
    if (up.sign < 0) {
      b.lo = b.mid;
    } else {
      b.hi = b.mid + (up.winner == 0 ? h / 3.0 : 2.0 * h / 3.0);
      double hm = b.mid - b.lo;
      RaceOutcome down = race(b.mid, b.mid - hm / 3.0, b.mid - 2.0 * hm / 3.0,
                              race_cap(b.hi - b.lo, false));
      if (down.sign < 0) {
        b.hi = b.mid;
      } else {
        b.lo = b.mid - (down.winner == 0 ? hm / 3.0 : 2.0 * hm / 3.0);
      }
    }
    b.mid = 0.5 * (b.lo + b.hi);
  }

  ComparisonOracle& oracle_;
  const Point& x_;
  const Point& d_;
  RobustLineSearchConfig cfg_;
  double race_delta_ = 0.0;
  double stop_width_ = 0.0;
  LineSearchReport report_;
};

}  // namespace

LineSearchReport line_search_robust(ComparisonOracle& oracle, const Point& x, const Point& d,
                                    const RobustLineSearchConfig& cfg,
                                    const BracketObserver& observe) {
  if (!(cfg.eta > 0.0)) throw std::invalid_argument("line_search_robust: eta must be positive");
  if (!(cfg.delta > 0.0 && cfg.delta < 1.0)) {
    throw std::invalid_argument("line_search_robust: delta must be in (0, 1)");
  }
  if (x.size() != d.size()) throw std::invalid_argument("line_search_robust: dimension mismatch");
  RobustSearch search(oracle, x, d, cfg);
  return search.run(observe);
}

}  // namespace pcopt
