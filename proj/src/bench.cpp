#include "pcopt/bench.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <thread>
#include <tuple>
#include <type_traits>
#include <variant>

#include "pcopt/line_search.hpp"

namespace pcopt {

using nlohmann::json;

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t mix(std::uint64_t h, std::uint64_t v) { return splitmix64(h ^ splitmix64(v)); }

std::uint64_t bits(double v) { return std::bit_cast<std::uint64_t>(v); }

void reject_unknown(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw ValidationError(where + ": expected an object");
  for (const auto& [key, _] : j.items()) {
    if (!allowed.count(key)) throw ValidationError(where + ": unknown key '" + key + "'");
  }
}

template <class T>
T get(const json& j, const std::string& key, const std::string& where) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ValidationError(where + "." + key + ": " + e.what());
  }
}

template <class T>
void get_opt(const json& j, const std::string& key, const std::string& where, T& out) {
  if (j.contains(key)) out = get<T>(j, key, where);
}

OracleSpec parse_oracle(const json& j) {
  const std::string where = "oracle";
  OracleSpec o;
  std::string kind = get<std::string>(j, "kind", where);
  if (kind == "exact") {
    reject_unknown(j, {"kind"}, where);
    o.kind = OracleKind::exact;
  } else if (kind == "direct") {
    reject_unknown(j, {"kind", "kappa", "mu", "delta0"}, where);
    o.kind = OracleKind::direct;
    o.params.kappa = get<double>(j, "kappa", where);
    o.params.mu = get<double>(j, "mu", where);
    o.params.delta0 = get<double>(j, "delta0", where);
  } else if (kind == "gaussian_eval") {
    reject_unknown(j, {"kind", "sigma2"}, where);
    o.kind = OracleKind::gaussian_eval;
    o.sigma2 = get<double>(j, "sigma2", where);
  } else if (kind == "gamma_eval") {
    reject_unknown(j, {"kind", "shape", "rate"}, where);
    o.kind = OracleKind::gamma_eval;
    o.shape = get<double>(j, "shape", where);
    o.rate = get<double>(j, "rate", where);
  } else {
    throw ValidationError("oracle.kind: unknown kind '" + kind + "'");
  }
  return o;
}

EtaRule parse_eta_rule(const json& j) {
  const std::string where = "solver.eta_rule";
  EtaRule r;
  std::string kind = get<std::string>(j, "kind", where);
  if (kind == "fixed") {
    reject_unknown(j, {"kind", "eta"}, where);
    r.kind = EtaRuleKind::fixed;
    r.eta = get<double>(j, "eta", where);
  } else if (kind == "target") {
    reject_unknown(j, {"kind", "epsilon"}, where);
    r.kind = EtaRuleKind::target;
    r.epsilon = get<double>(j, "epsilon", where);
  } else if (kind == "budget") {
    reject_unknown(j, {"kind", "confidence"}, where);
    r.kind = EtaRuleKind::budget;
    get_opt(j, "confidence", where, r.confidence);
  } else {
    throw ValidationError(where + ".kind: unknown kind '" + kind + "'");
  }
  return r;
}

}  // namespace

std::string OracleSpec::name() const {
  switch (kind) {
    case OracleKind::exact: return "exact";
    case OracleKind::direct: return "direct";
    case OracleKind::gaussian_eval: return "gaussian_eval";
    case OracleKind::gamma_eval: return "gamma_eval";
  }
  return "unknown";
}

ComparisonMode OracleSpec::mode() const {
  switch (kind) {
    case OracleKind::exact: return ExactMode{};
    case OracleKind::direct: return DirectMode{params};
    case OracleKind::gaussian_eval: return DerivedMode{GaussianNoise{sigma2}};
    case OracleKind::gamma_eval: return DerivedMode{TwoSidedGammaNoise{shape, rate}};
  }
  return ExactMode{};
}

std::optional<ComparisonParams> OracleSpec::calibration() const {
  switch (kind) {
    case OracleKind::exact: return std::nullopt;
    case OracleKind::direct: return params;
    case OracleKind::gaussian_eval: return gaussian_comparison_params(sigma2);
    case OracleKind::gamma_eval: return gamma_comparison_params(shape, rate);
  }
  return std::nullopt;
}

double OracleSpec::kappa_column() const {
  auto c = calibration();
  return c ? c->kappa : 0.0;
}

double OracleSpec::sigma2_column() const {
  switch (kind) {
    case OracleKind::gaussian_eval: return sigma2;
    case OracleKind::gamma_eval: return noise_second_moment(TwoSidedGammaNoise{shape, rate});
    default: return 0.0;
  }
}

void ExperimentSpec::validate() const {
  try {
    FunctionClassParams{tau, lip, 1}.validate();
    std::visit([](const auto& m) {
      using M = std::decay_t<decltype(m)>;
      if constexpr (std::is_same_v<M, DirectMode>) m.params.validate();
      if constexpr (std::is_same_v<M, DerivedMode>) pcopt::validate(m.noise);
    }, oracle.mode());
    if (oracle.kind == OracleKind::gamma_eval) gamma_comparison_params(oracle.shape, oracle.rate);
  } catch (const std::invalid_argument& e) {
    throw ValidationError(e.what());
  }
  if (dims.empty()) throw ValidationError("function.dims must not be empty");
  for (auto n : dims) {
    if (n < 1) throw ValidationError("function.dims entries must be >= 1");
  }
  if (!(center_radius >= 0.0)) throw ValidationError("function.center_radius must be >= 0");
  if (!(x0_distance >= 0.0)) throw ValidationError("function.x0_distance must be >= 0");
  if (budgets.empty()) throw ValidationError("budgets must not be empty");
  for (std::size_t i = 0; i < budgets.size(); ++i) {
    if (budgets[i] < 1) throw ValidationError("budgets entries must be >= 1");
    if (i > 0 && budgets[i] <= budgets[i - 1]) {
      throw ValidationError("budgets must be strictly increasing");
    }
  }
  if (trials < 1) throw ValidationError("trials must be >= 1");
  if (!(delta > 0.0 && delta < 1.0)) throw ValidationError("solver.delta must be in (0, 1)");
  switch (eta_rule.kind) {
    case EtaRuleKind::fixed:
      if (!(eta_rule.eta > 0.0)) throw ValidationError("solver.eta_rule.eta must be positive");
      break;
    case EtaRuleKind::target:
      if (!(eta_rule.epsilon > 0.0)) {
        throw ValidationError("solver.eta_rule.epsilon must be positive");
      }
      break;
    case EtaRuleKind::budget:
      if (!(eta_rule.confidence > 0.0)) {
        throw ValidationError("solver.eta_rule.confidence must be positive");
      }
      if (line_search != LineSearchMode::robust) {
        throw ValidationError("solver.eta_rule budget needs the robust line search");
      }
      if (!oracle.calibration()) {
        throw ValidationError("solver.eta_rule budget needs a noisy oracle");
      }
      break;
  }
  if (format != "csv" && format != "json") throw ValidationError("output.format must be csv or json");
  if (threads < 1) throw ValidationError("threads must be >= 1");
}

ExperimentSpec parse_experiment_spec(const json& j) {
  reject_unknown(j, {"function", "oracle", "budgets", "trials", "seed", "solver", "output",
                     "record_timing", "threads"},
                 "spec");
  ExperimentSpec s;

  if (j.contains("function")) {
    const json& f = j.at("function");
    const std::string where = "function";
    reject_unknown(f, {"tau", "lip", "dims", "center_radius", "x0_distance", "curvature"}, where);
    get_opt(f, "tau", where, s.tau);
    get_opt(f, "lip", where, s.lip);
    get_opt(f, "dims", where, s.dims);
    get_opt(f, "center_radius", where, s.center_radius);
    get_opt(f, "x0_distance", where, s.x0_distance);
    if (f.contains("curvature")) {
      auto c = get<std::string>(f, "curvature", where);
      if (c == "isotropic") {
        s.isotropic = true;
      } else if (c == "uniform") {
        s.isotropic = false;
      } else {
        throw ValidationError("function.curvature must be isotropic or uniform");
      }
    }
  }
  if (!j.contains("oracle")) throw ValidationError("spec: missing oracle");
  s.oracle = parse_oracle(j.at("oracle"));
  s.budgets = get<std::vector<std::int64_t>>(j, "budgets", "spec");
  get_opt(j, "trials", "spec", s.trials);
  get_opt(j, "seed", "spec", s.seed);
  get_opt(j, "record_timing", "spec", s.record_timing);
  get_opt(j, "threads", "spec", s.threads);

  if (j.contains("solver")) {
    const json& sv = j.at("solver");
    const std::string where = "solver";
    reject_unknown(sv, {"line_search", "direction", "delta", "eta_rule"}, where);
    if (sv.contains("line_search")) {
      auto m = get<std::string>(sv, "line_search", where);
      if (m == "noiseless") {
        s.line_search = LineSearchMode::noiseless;
      } else if (m == "robust") {
        s.line_search = LineSearchMode::robust;
      } else {
        throw ValidationError("solver.line_search must be noiseless or robust");
      }
    }
    if (sv.contains("direction")) {
      auto m = get<std::string>(sv, "direction", where);
      if (m == "coordinate") {
        s.direction = DirectionMode::coordinate;
      } else if (m == "random_unit_sphere") {
        s.direction = DirectionMode::random_unit_sphere;
      } else {
        throw ValidationError("solver.direction must be coordinate or random_unit_sphere");
      }
    }
    get_opt(sv, "delta", where, s.delta);
    if (sv.contains("eta_rule")) s.eta_rule = parse_eta_rule(sv.at("eta_rule"));
  }
  if (j.contains("output")) {
    const json& o = j.at("output");
    reject_unknown(o, {"path", "format"}, "output");
    get_opt(o, "path", "output", s.output_path);
    get_opt(o, "format", "output", s.format);
  }
  s.validate();
  return s;
}

ExperimentSpec load_experiment_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot read spec file '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw ValidationError("spec file '" + path + "': " + e.what());
  }
  return parse_experiment_spec(j);
}

BudgetPlan plan_for_budget(const FunctionClassParams& params, double initial_gap,
                           const ComparisonParams& calibration, std::int64_t T,
                           double confidence) {
  const double z2 = confidence * confidence;
  auto evaluate = [&](double eta) {
    BudgetPlan p;
    p.eta = eta;
    p.planned_iterations = std::max<std::int64_t>(1, planned_iterations(initial_gap, eta, params));
    p.races_per_search = planned_races_per_search(eta);
    double floor_gap = racing_gap_floor(params.tau, eta);
    double adv = std::min(calibration.delta0,
                          calibration.mu * std::pow(floor_gap, calibration.kappa - 1.0));
    // Samples per certifier for a z-score majority call; a race feeds two.
    double per_side = std::ceil(z2 / (4.0 * adv * adv));
    p.race_cap = static_cast<std::int64_t>(std::min(2.0 * per_side, 1e15));
    p.planned_cost = static_cast<double>(p.planned_iterations) * p.races_per_search *
                     static_cast<double>(p.race_cap);
    p.feasible = p.planned_cost <= static_cast<double>(T);
    return p;
  };

  // Past eta_hi the contraction floor exceeds the initial gap.
  double eta_hi = std::sqrt(std::max(initial_gap, 1e-300) * params.tau /
                            (2.0 * static_cast<double>(params.dim) * params.lip * params.lip));
  BudgetPlan hi = evaluate(eta_hi);
  if (!hi.feasible) return hi;
  double lo_log = std::log(eta_hi) - 80.0;
  double hi_log = std::log(eta_hi);
  if (evaluate(std::exp(lo_log)).feasible) return evaluate(std::exp(lo_log));
  for (int it = 0; it < 200 && hi_log - lo_log > 1e-9; ++it) {
    double m = 0.5 * (lo_log + hi_log);
    if (evaluate(std::exp(m)).feasible) {
      hi_log = m;
    } else {
      lo_log = m;
    }
  }
  return evaluate(std::exp(hi_log));
}

std::uint64_t cell_seed(std::uint64_t seed, std::size_t n, std::int64_t T,
                        const OracleSpec& oracle, int trial) {
  std::uint64_t h = splitmix64(seed);
  h = mix(h, n);
  h = mix(h, static_cast<std::uint64_t>(T));
  h = mix(h, static_cast<std::uint64_t>(oracle.kind));
  h = mix(h, bits(oracle.params.kappa));
  h = mix(h, bits(oracle.params.mu));
  h = mix(h, bits(oracle.params.delta0));
  h = mix(h, bits(oracle.sigma2));
  h = mix(h, bits(oracle.shape));
  h = mix(h, bits(oracle.rate));
  h = mix(h, static_cast<std::uint64_t>(trial));
  return h;
}

namespace {

ResultRow run_trial(const ExperimentSpec& spec, std::size_t n, std::int64_t T, int trial) {
  ResultRow row;
  row.n = n;
  row.oracle_kind = spec.oracle.name();
  row.kappa = spec.oracle.kappa_column();
  row.sigma2 = spec.oracle.sigma2_column();
  row.T = T;
  row.trial = trial;
  row.seed = cell_seed(spec.seed, n, T, spec.oracle, trial);

  auto start = std::chrono::steady_clock::now();
  try {
    Rng rng(row.seed);
    FunctionClassParams params{spec.tau, spec.lip, n};
    std::uniform_real_distribution<double> center_dist(-spec.center_radius, spec.center_radius);
    std::uniform_real_distribution<double> curv_dist(spec.tau, spec.lip);
    std::normal_distribution<double> normal(0.0, 1.0);

    std::vector<double> center(n), curvature(n), dir(n);
    for (auto& c : center) c = spec.center_radius > 0.0 ? center_dist(rng) : 0.0;
    for (auto& c : curvature) c = spec.isotropic ? spec.tau : curv_dist(rng);
    double norm = 0.0;
    while (norm == 0.0) {
      for (auto& c : dir) c = normal(rng);
      norm = 0.0;
      for (double c : dir) norm += c * c;
      norm = std::sqrt(norm);
    }
    std::vector<double> x0(n);
    for (std::size_t k = 0; k < n; ++k) x0[k] = center[k] + spec.x0_distance * dir[k] / norm;

    QuadraticFunction f(params, Point(center), curvature);
    Point start_point(std::move(x0));
    ComparisonOracle oracle(f, spec.oracle.mode(), splitmix64(row.seed ^ 0x6f7261636c65ULL));

    SolverConfig cfg;
    cfg.total_budget = T;
    cfg.delta = spec.delta;
    cfg.direction_mode = spec.direction;
    cfg.line_search_mode = spec.line_search;
    cfg.seed = splitmix64(row.seed ^ 0x736f6c766572ULL);
    cfg.use_ground_truth = true;
    cfg.run_to_budget = true;
    switch (spec.eta_rule.kind) {
      case EtaRuleKind::fixed: cfg.eta = spec.eta_rule.eta; break;
      case EtaRuleKind::target: cfg.target_epsilon = spec.eta_rule.epsilon; break;
      case EtaRuleKind::budget: {
        BudgetPlan plan = plan_for_budget(params, f.gap(start_point), *spec.oracle.calibration(),
                                          T, spec.eta_rule.confidence);
        cfg.eta = plan.eta;
        cfg.race_cap = plan.race_cap;
        break;
      }
    }

    SolveResult res = solve(oracle, start_point, cfg);
    row.final_gap = f.gap(res.x);
    row.comparisons_used = res.trace.total_comparisons;
    row.uncertified_steps = res.trace.uncertified_steps;
  } catch (const std::exception& e) {
    row.final_gap = std::nan("");
    row.error = e.what();
  }
  if (spec.record_timing) {
    std::chrono::duration<double, std::milli> dt = std::chrono::steady_clock::now() - start;
    row.wall_time_ms = dt.count();
  }
  return row;
}

}  // namespace

ResultTable run_experiment(const ExperimentSpec& spec) {
  spec.validate();
  struct Task {
    std::size_t n;
    std::int64_t T;
    int trial;
  };
  std::vector<Task> tasks;
  for (auto n : spec.dims) {
    for (auto T : spec.budgets) {
      for (int t = 0; t < spec.trials; ++t) tasks.push_back({n, T, t});
    }
  }
  ResultTable table;
  table.rows.resize(tasks.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < tasks.size(); i = next++) {
      table.rows[i] = run_trial(spec, tasks[i].n, tasks[i].T, tasks[i].trial);
    }
  };
  const auto nthreads = static_cast<std::size_t>(std::max(1, spec.threads));
  if (nthreads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < nthreads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  std::sort(table.rows.begin(), table.rows.end(), [](const ResultRow& a, const ResultRow& b) {
    return std::tie(a.n, a.oracle_kind, a.T, a.trial) < std::tie(b.n, b.oracle_kind, b.T, b.trial);
  });
  return table;
}

std::vector<std::int64_t> log_spaced_budgets(std::int64_t lo, std::int64_t hi, int count) {
  if (lo < 1 || hi <= lo || count < 2) throw std::invalid_argument("log_spaced_budgets: bad range");
  std::vector<std::int64_t> out;
  const double a = std::log(static_cast<double>(lo));
  const double b = std::log(static_cast<double>(hi));
  for (int i = 0; i < count; ++i) {
    auto v = static_cast<std::int64_t>(std::llround(std::exp(a + (b - a) * i / (count - 1))));
    if (out.empty() || v > out.back()) out.push_back(v);
  }
  return out;
}

ExperimentSpec acceptance_rate_spec(double kappa, std::size_t n) {
  ExperimentSpec s;
  s.dims = {n};
  s.center_radius = 1.0;
  s.x0_distance = 20.0;
  s.oracle.kind = OracleKind::direct;
  if (kappa > 1.0) {
    s.oracle.params = {kappa, 0.17, 0.24};
  } else {
    s.oracle.params = {1.0, 0.4, 0.4};
  }
  s.budgets = log_spaced_budgets(1000, 1000000, 7);
  s.trials = 50;
  s.seed = 20240601;
  s.line_search = LineSearchMode::robust;
  s.direction = DirectionMode::coordinate;
  s.delta = 0.1;
  s.eta_rule.kind = EtaRuleKind::budget;
  // For kappa = 2 the racing floor sits far below the typical race gap, so a
  // small z at the floor is already a confident call at typical gaps. For
  // kappa = 1 the advantage is flat and z applies as stated.
  s.eta_rule.confidence = kappa > 1.0 ? 0.1 : 3.0;
  s.record_timing = false;
  return s;
}

std::vector<Aggregate> ResultTable::aggregates() const {
  using Key = std::tuple<std::size_t, std::string, std::int64_t>;
  std::map<Key, std::vector<const ResultRow*>> cells;
  for (const auto& r : rows) {
    if (!r.error.empty() || !std::isfinite(r.final_gap)) continue;
    cells[{r.n, r.oracle_kind, r.T}].push_back(&r);
  }
  std::vector<Aggregate> out;
  for (const auto& [key, rs] : cells) {
    Aggregate a;
    a.n = std::get<0>(key);
    a.oracle_kind = std::get<1>(key);
    a.T = std::get<2>(key);
    a.kappa = rs.front()->kappa;
    a.sigma2 = rs.front()->sigma2;
    a.count = static_cast<int>(rs.size());
    double sum = 0.0;
    for (const auto* r : rs) sum += r->final_gap;
    a.mean_gap = sum / a.count;
    if (a.count > 1) {
      double ss = 0.0;
      for (const auto* r : rs) ss += (r->final_gap - a.mean_gap) * (r->final_gap - a.mean_gap);
      a.stderr_gap = std::sqrt(ss / (a.count - 1)) / std::sqrt(static_cast<double>(a.count));
    }
    out.push_back(a);
  }
  return out;
}

std::string regime_name(RateRegime r) {
  return r == RateRegime::power_law ? "power_law" : "exponential";
}

RateFit fit_series(const std::vector<Aggregate>& cells, RateRegime regime) {
  if (cells.size() < 4) {
    throw std::invalid_argument("fit_rate: need at least 4 budget cells, got " +
                                std::to_string(cells.size()));
  }
  RateFit fit;
  fit.regime = regime;
  fit.n = cells.front().n;
  fit.oracle_kind = cells.front().oracle_kind;
  fit.cells = static_cast<int>(cells.size());

  std::vector<double> xs, ys;
  for (const auto& c : cells) {
    if (!(c.mean_gap > 0.0) || !std::isfinite(c.mean_gap)) {
      throw std::invalid_argument("fit_rate: non-finite or non-positive mean gap at T = " +
                                  std::to_string(c.T));
    }
    double t = static_cast<double>(c.T);
    xs.push_back(regime == RateRegime::power_law ? std::log(t)
                                                 : std::sqrt(t / static_cast<double>(c.n)));
    ys.push_back(std::log(c.mean_gap));
  }
  const double m = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= m;
  my /= m;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  if (sxx <= 0.0) throw std::invalid_argument("fit_rate: budgets must differ");
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double sse = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    double r = ys[i] - (fit.intercept + fit.slope * xs[i]);
    sse += r * r;
  }
  fit.r_squared = syy > 0.0 ? 1.0 - sse / syy : 1.0;
  fit.slope_stderr = std::sqrt(sse / (m - 2.0) / sxx);
  return fit;
}

std::vector<RateFit> fit_all(const ResultTable& table, RateRegime regime) {
  std::map<std::pair<std::size_t, std::string>, std::vector<Aggregate>> series;
  for (const auto& a : table.aggregates()) series[{a.n, a.oracle_kind}].push_back(a);
  std::vector<RateFit> fits;
  for (const auto& [_, cells] : series) fits.push_back(fit_series(cells, regime));
  return fits;
}

RateFit fit_rate(const ResultTable& table, RateRegime regime) {
  auto aggs = table.aggregates();
  std::set<std::pair<std::size_t, std::string>> keys;
  for (const auto& a : aggs) keys.insert({a.n, a.oracle_kind});
  if (keys.size() > 1) {
    throw std::invalid_argument("fit_rate: table holds several (n, oracle) series");
  }
  return fit_series(aggs, regime);
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

const char* kCsvHeader =
    "n,oracle_kind,kappa,sigma2,T,trial,seed,final_gap,comparisons_used,uncertified_steps,"
    "wall_time_ms";

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

double parse_double(const std::string& s) {
  std::size_t pos = 0;
  double v = std::stod(s, &pos);
  if (pos != s.size()) throw std::invalid_argument("bad number '" + s + "'");
  return v;
}

}  // namespace

std::string to_csv(const ResultTable& table) {
  std::ostringstream out;
  out << kCsvHeader << '\n';
  for (const auto& r : table.rows) {
    out << r.n << ',' << r.oracle_kind << ',' << format_double(r.kappa) << ','
        << format_double(r.sigma2) << ',' << r.T << ',' << r.trial << ',' << r.seed << ','
        << format_double(r.final_gap) << ',' << r.comparisons_used << ',' << r.uncertified_steps
        << ',' << format_double(r.wall_time_ms) << '\n';
  }
  return out.str();
}

json to_json(const ResultTable& table, const std::vector<RateFit>& fits) {
  json rows = json::array();
  for (const auto& r : table.rows) {
    json row = {{"n", r.n},
                {"oracle_kind", r.oracle_kind},
                {"kappa", r.kappa},
                {"sigma2", r.sigma2},
                {"T", r.T},
                {"trial", r.trial},
                {"seed", r.seed},
                {"final_gap", number_or_null(r.final_gap)},
                {"comparisons_used", r.comparisons_used},
                {"uncertified_steps", r.uncertified_steps},
                {"wall_time_ms", r.wall_time_ms}};
    if (!r.error.empty()) row["error"] = r.error;
    rows.push_back(row);
  }
  json aggs = json::array();
  for (const auto& a : table.aggregates()) {
    aggs.push_back({{"n", a.n},
                    {"oracle_kind", a.oracle_kind},
                    {"kappa", a.kappa},
                    {"sigma2", a.sigma2},
                    {"T", a.T},
                    {"count", a.count},
                    {"mean_gap", a.mean_gap},
                    {"stderr", a.stderr_gap}});
  }
  json jf = json::array();
  for (const auto& f : fits) {
    jf.push_back({{"regime", regime_name(f.regime)},
                  {"n", f.n},
                  {"oracle_kind", f.oracle_kind},
                  {"slope", f.slope},
                  {"slope_stderr", f.slope_stderr},
                  {"intercept", f.intercept},
                  {"r_squared", f.r_squared},
                  {"cells", f.cells}});
  }
  return {{"rows", rows}, {"aggregates", aggs}, {"fits", jf}};
}

ResultTable parse_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) {
    throw std::invalid_argument("parse_csv: unexpected header");
  }
  ResultTable table;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (f.size() != 11) {
      throw std::invalid_argument("parse_csv: line " + std::to_string(lineno) +
                                  " has " + std::to_string(f.size()) + " fields");
    }
    try {
      ResultRow r;
      r.n = std::stoull(f[0]);
      r.oracle_kind = f[1];
      r.kappa = parse_double(f[2]);
      r.sigma2 = parse_double(f[3]);
      r.T = std::stoll(f[4]);
      r.trial = std::stoi(f[5]);
      r.seed = std::stoull(f[6]);
      r.final_gap = parse_double(f[7]);
      r.comparisons_used = std::stoll(f[8]);
      r.uncertified_steps = std::stoll(f[9]);
      r.wall_time_ms = parse_double(f[10]);
      if (!std::isfinite(r.final_gap)) r.error = "trial failed";
      table.rows.push_back(r);
    } catch (const std::exception& e) {
      throw std::invalid_argument("parse_csv: line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return table;
}

ResultTable parse_json(const json& j) {
  ResultTable table;
  try {
    for (const auto& jr : j.at("rows")) {
      ResultRow r;
      r.n = jr.at("n").get<std::size_t>();
      r.oracle_kind = jr.at("oracle_kind").get<std::string>();
      r.kappa = jr.at("kappa").get<double>();
      r.sigma2 = jr.at("sigma2").get<double>();
      r.T = jr.at("T").get<std::int64_t>();
      r.trial = jr.at("trial").get<int>();
      r.seed = jr.at("seed").get<std::uint64_t>();
      r.final_gap = jr.at("final_gap").is_null() ? std::nan("") : jr.at("final_gap").get<double>();
      r.comparisons_used = jr.at("comparisons_used").get<std::int64_t>();
      r.uncertified_steps = jr.at("uncertified_steps").get<std::int64_t>();
      r.wall_time_ms = jr.at("wall_time_ms").get<double>();
      if (jr.contains("error")) r.error = jr.at("error").get<std::string>();
      table.rows.push_back(r);
    }
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("parse_json: ") + e.what());
  }
  return table;
}

void emit(const ResultTable& table, const std::vector<RateFit>& fits, const std::string& format,
          const std::string& path) {
  std::string body;
  if (format == "csv") {
    body = to_csv(table);
  } else if (format == "json") {
    body = to_json(table, fits).dump(2) + "\n";
  } else {
    throw std::invalid_argument("emit: unknown format '" + format + "'");
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("emit: cannot open '" + path + "' for writing");
  out << body;
  out.flush();
  if (!out) throw std::runtime_error("emit: write to '" + path + "' failed");
}

ResultTable read_table(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot read '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  std::string text = buf.str();
  auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') {
    try {
      return parse_json(json::parse(text));
    } catch (const json::parse_error& e) {
      throw std::invalid_argument("'" + path + "': " + e.what());
    }
  }
  return parse_csv(text);
}

}  // namespace pcopt
