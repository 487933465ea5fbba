#include "pdmcausal/harness.hpp"

#include <cmath>
#include <numbers>
#include <ostream>
#include <sstream>

#include "pdmcausal/parallel.hpp"

namespace pdmcausal {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kMatrixTol = 1e-10;
constexpr double kValueTol = 1e-9;

bool is_scenario(const std::string& s) {
  return s == "measure-prepare" || s == "common-cause" || s == "swap-influence" || s == "fig3" || s == "fig4";
}

std::vector<double> degree_grid(double from, double to, double step) {
  std::vector<double> out;
  for (int k = 0; from + k * step <= to + 1e-9; ++k) out.push_back((from + k * step) * kPi / 180.0);
  return out;
}

double degrees(double theta) { return std::round(theta * 180.0 / kPi * 1e9) / 1e9; }

std::string format_number(double x) {
  std::ostringstream os;
  os.precision(12);
  os << x;
  return os.str();
}

void expect_close(const ComplexMatrix& got, const ComplexMatrix& want, double tol, const std::string& what) {
  const double diff = max_abs_diff(got.with_factors({got.dim()}), want.with_factors({want.dim()}));
  if (diff > tol) throw InconsistencyError(what + " deviates from the closed form by " + format_number(diff));
}

void expect_close(double got, double want, double tol, const std::string& what) {
  if (!(std::abs(got - want) <= tol))
    throw InconsistencyError(what + " = " + format_number(got) + ", expected " + format_number(want));
}

void expect_verdict(const CausalVerdict& v, const std::vector<int>& want, const std::string& where) {
  if (v.compatible != want) {
    std::string got;
    for (int c : v.compatible) got += (got.empty() ? "" : ",") + std::to_string(c);
    throw InconsistencyError(where + ": verdict {" + got + "} differs from the expected set");
  }
}

ComplexMatrix cnot() {
  ComplexMatrix u({2, 2});
  u(0, 0) = u(1, 1) = u(2, 3) = u(3, 2) = 1.0;
  return u;
}

QuantumState bell_state() {
  const double h = std::numbers::sqrt2 / 2.0;
  const ComplexVector psi{h, 0.0, 0.0, h};
  return QuantumState::pure(psi, {2, 2});
}

}  // namespace

ScenarioConfig ScenarioConfig::defaults(const std::string& scenario) {
  ScenarioConfig cfg;
  cfg.scenario = scenario;
  if (scenario == "measure-prepare") {
    for (int k = 1; k <= 9; ++k) cfg.lambdas.push_back(k / 10.0);
  } else if (scenario == "common-cause") {
    cfg.thetas = degree_grid(0.0, 85.0, 5.0);
  } else if (scenario == "swap-influence") {
    cfg.thetas = degree_grid(0.0, 90.0, 5.0);
  } else if (scenario == "fig4") {
    cfg.thetas = {kPi / 6.0, kPi / 3.0};
  }
  return cfg;
}

void ScenarioConfig::validate() const {
  if (!is_scenario(scenario)) throw std::invalid_argument("unknown scenario '" + scenario + "'");
  for (double x : lambdas)
    if (!std::isfinite(x)) throw std::invalid_argument("non-finite lambda");
  for (double x : thetas)
    if (!std::isfinite(x)) throw std::invalid_argument("non-finite theta");

  if (scenario == "measure-prepare") {
    if (lambdas.empty()) throw std::invalid_argument("measure-prepare needs a nonempty lambda grid");
    for (double l : lambdas)
      if (!(l > 0.0 && l < 1.0)) throw std::invalid_argument("lambda must lie in (0, 1)");
    return;
  }
  if (thetas.empty() && scenario != "fig3") throw std::invalid_argument(scenario + " needs a nonempty theta grid");
  if (scenario == "common-cause") {
    for (double t : thetas)
      if (std::abs(std::abs(std::sin(t)) - 1.0) <= 1e-12)
        throw std::invalid_argument("common-cause excludes angles with |sin(theta)| = 1");
  }
  if (scenario == "fig3" || scenario == "fig4") {
    if (samples < 100) throw std::invalid_argument("sweeps need at least 100 samples");
    if (!seed) throw std::invalid_argument("sweeps need an explicit seed");
  }
}

void write_csv(const Table& t, std::ostream& out) {
  const auto cell = [](const json& v) -> std::string {
    if (v.is_string()) {
      const auto s = v.get<std::string>();
      if (s.find_first_of(",\"\n") == std::string::npos) return s;
      std::string q = "\"";
      for (char ch : s) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
      return q + "\"";
    }
    if (v.is_array()) {
      std::string s;
      for (const auto& e : v) s += (s.empty() ? "" : ";") + e.dump();
      return s;
    }
    return v.dump();
  };
  for (std::size_t c = 0; c < t.columns.size(); ++c) out << (c ? "," : "") << t.columns[c];
  out << '\n';
  for (const auto& row : t.rows) {
    for (std::size_t c = 0; c < t.columns.size(); ++c) out << (c ? "," : "") << cell(row.at(t.columns[c]));
    out << '\n';
  }
}

json table_to_json(const Table& t) { return {{"columns", t.columns}, {"rows", t.rows}}; }

Pdm semicausal_a1b2(const QuantumState& rho_ab, const QuantumChannel& n_ac, const QuantumChannel& m_bc) {
  if (rho_ab.mat.num_factors() != 2) throw std::invalid_argument("semicausal_a1b2 needs a bipartite input state");
  const std::size_t dc = n_ac.in_factors().size() == 2 ? n_ac.in_factors()[1] : 0;
  if (dc == 0) throw std::invalid_argument("semicausal_a1b2: n_ac must act on two factors (A, C)");
  const QuantumChannel ch = semicausal(n_ac, m_bc, QuantumState::basis(0, {dc}));
  return reduce(pdm_closed_form(rho_ab, ch), {{0, 0}, {1, 1}});
}

Table run_measure_prepare(const ScenarioConfig& cfg) {
  cfg.validate();
  Table t{{"lambda", "f", "min_eig_fwd", "min_eig_rev", "verdict"}, {}};
  const QuantumChannel copy_to_c = QuantumChannel::unitary(cnot());
  const QuantumChannel c_to_b = swap_channel(2);
  ComplexMatrix expected_m({2, 2});
  expected_m(0, 0) = expected_m(3, 3) = 1.0;

  for (double l : cfg.lambdas) {
    const std::string where = "measure-prepare lambda=" + format_number(l);
    ComplexMatrix rho_a = ComplexMatrix::from_rows({{0.5, l / 2}, {l / 2, 0.5}});
    const QuantumState input = kron(QuantumState::from_matrix(rho_a), QuantumState::basis(0, {2}));
    const Pdm r = semicausal_a1b2(input, copy_to_c, c_to_b);

    const ExtractionResult fwd = extract_choi(r, cfg.thresholds);
    const ExtractionResult rev = extract_reverse_choi(r, cfg.thresholds);
    expect_close(fwd.choi, expected_m, kMatrixTol, where + ": forward Choi matrix");
    // Reversed orientation: B is the input factor.
    ComplexMatrix rev_t({2, 2});
    rev_t(0, 0) = 1.0;
    rev_t(0, 1) = rev_t(1, 0) = l / 2;
    rev_t(2, 3) = rev_t(3, 2) = l / 2;
    rev_t(3, 3) = 1.0;
    expect_close(input_transpose(rev.choi), rev_t, kMatrixTol, where + ": reverse transposed Choi matrix");

    const CausalVerdict v = classify(r, cfg.thresholds);
    const double root = std::sqrt(1.0 + l * l);
    expect_close(v.f, root - 1.0, kValueTol, where + ": f");
    expect_close(v.min_eig_reverse, (1.0 - root) / 2.0, kValueTol, where + ": reverse min eigenvalue");
    if (v.min_eig_forward < -cfg.thresholds.eps_pos)
      throw InconsistencyError(where + ": forward Choi matrix is not CP");
    // f = √(1+λ²) − 1 drops below ε_neg only for λ ≲ 1.4e-4.
    expect_verdict(v, root - 1.0 > cfg.thresholds.eps_neg ? std::vector<int>{1} : std::vector<int>{3}, where);
    t.rows.push_back({{"lambda", l},
                      {"f", v.f},
                      {"min_eig_fwd", v.min_eig_forward},
                      {"min_eig_rev", v.min_eig_reverse},
                      {"verdict", v.compatible}});
  }
  return t;
}

Table run_common_cause_mixture(const ScenarioConfig& cfg) {
  cfg.validate();
  Table t{{"theta", "c", "s", "f", "min_eig_fwd", "min_eig_rev", "verdict"}, {}};
  const QuantumState input = bell_state();
  const QuantumChannel n_ac = swap_channel(2);

  for (double theta : cfg.thetas) {
    const std::string where = "common-cause theta=" + format_number(theta);
    const double c = std::cos(theta), s = std::sin(theta);
    const double c2 = c * c, s2 = s * s;
    const Pdm r = semicausal_a1b2(input, n_ac, partial_swap(theta));

    const ComplexMatrix expected_r =
        0.5 * ComplexMatrix::from_rows({{1, 0, 0, c2}, {0, 0, s2, 0}, {0, s2, 0, 0}, {c2, 0, 0, 1}});
    const ComplexMatrix expected_mt =
        ComplexMatrix::from_rows({{1, 0, 0, s2}, {0, 0, c2, 0}, {0, c2, 0, 0}, {s2, 0, 0, 1}});
    expect_close(r.mat(), expected_r, kMatrixTol, where + ": R_A1B2");
    expect_close(input_transpose(extract_choi(r, cfg.thresholds).choi), expected_mt, kMatrixTol,
                 where + ": forward transposed Choi matrix");
    expect_close(input_transpose(extract_reverse_choi(r, cfg.thresholds).choi), expected_mt, kMatrixTol,
                 where + ": reverse transposed Choi matrix");

    const CausalVerdict v = classify(r, cfg.thresholds);
    expect_close(v.f, s2, kValueTol, where + ": f");
    expect_close(v.min_eig_forward, -c2, kValueTol, where + ": forward min eigenvalue");
    expect_close(v.min_eig_reverse, -c2, kValueTol, where + ": reverse min eigenvalue");
    // f = s² vanishes at θ = 0, where the Bell correlation alone is seen.
    std::vector<int> want{4, 5};
    if (s2 <= cfg.thresholds.eps_neg)
      want = {3};
    else if (c2 <= cfg.thresholds.eps_pos)
      want = {1, 2};
    expect_verdict(v, want, where);
    t.rows.push_back({{"theta", theta},
                      {"c", c},
                      {"s", s},
                      {"f", v.f},
                      {"min_eig_fwd", v.min_eig_forward},
                      {"min_eig_rev", v.min_eig_reverse},
                      {"verdict", v.compatible}});
  }
  return t;
}

Table run_swap_influence(const ScenarioConfig& cfg) {
  cfg.validate();
  Table t{{"theta", "f", "expected", "error"}, {}};
  const QuantumState input = QuantumState::basis(0, {2, 2});
  for (double theta : cfg.thetas) {
    const Pdm r = reduce(pdm_closed_form(input, partial_swap(theta)), {{0, 0}, {1, 0}});
    const double f = negativity(r);
    const double expected = std::abs(std::cos(theta));
    expect_close(f, expected, kValueTol, "swap-influence theta=" + format_number(theta) + ": f");
    t.rows.push_back({{"theta", theta}, {"f", f}, {"expected", expected}, {"error", std::abs(f - expected)}});
  }
  return t;
}

SweepResult run_haar_sweep(const ScenarioConfig& cfg) {
  cfg.validate();
  const bool fig3 = cfg.scenario == "fig3";
  if (!fig3 && cfg.scenario != "fig4") throw std::invalid_argument("run_haar_sweep needs scenario fig3 or fig4");

  struct Sample {
    std::string group;
    double f, min_fwd, min_rev;
  };
  const std::size_t per_sample = fig3 ? 2 : cfg.thetas.size();
  std::vector<std::vector<Sample>> results(cfg.samples);
  const QuantumChannel n_ac = swap_channel(2);
  const QuantumState product = QuantumState::basis(0, {2, 2});
  const QuantumState bell = bell_state();

  parallel_for(cfg.samples, [&](std::size_t i) {
    Rng rng(task_seed(*cfg.seed, i));
    auto measure = [&](const std::string& group, const QuantumState& input, const QuantumChannel& m_bc) {
      const CausalVerdict v = classify(semicausal_a1b2(input, n_ac, m_bc), cfg.thresholds);
      results[i].push_back({group, v.f, v.min_eig_forward, v.min_eig_reverse});
    };
    if (fig3) {
      const QuantumChannel m_bc = QuantumChannel::unitary(haar_unitary(4, rng).with_factors({2, 2}));
      measure("product", product, m_bc);
      measure("bell", bell, m_bc);
    } else {
      const ComplexVector psi = haar_state(4, rng);
      const QuantumState input = QuantumState::pure(psi, {2, 2});
      for (double theta : cfg.thetas) measure(format_number(degrees(theta)), input, partial_swap(-theta));
    }
  });

  SweepResult out;
  out.table.columns = {"sample_id", fig3 ? "input_id" : "theta_deg", "f", "min_eig_fwd", "min_eig_rev"};
  for (std::size_t i = 0; i < cfg.samples; ++i) {
    if (results[i].size() != per_sample) throw InconsistencyError("sweep sample " + std::to_string(i) + " is incomplete");
    for (std::size_t k = 0; k < per_sample; ++k) {
      const Sample& s = results[i][k];
      json row{{"sample_id", i}, {"f", s.f}, {"min_eig_fwd", s.min_fwd}, {"min_eig_rev", s.min_rev}};
      if (fig3)
        row["input_id"] = s.group;
      else
        row["theta_deg"] = degrees(cfg.thetas[k]);
      out.table.rows.push_back(std::move(row));
      if (out.summary.size() <= k) out.summary.push_back({s.group, 0, 0});
      ++out.summary[k].count;
      if (s.f > kSweepNegativityTol) ++out.summary[k].negative;
    }
  }
  return out;
}

json summary_to_json(const std::vector<SweepGroup>& s) {
  json out = json::array();
  for (const auto& g : s)
    out.push_back({{"group", g.group},
                   {"count", g.count},
                   {"negative", g.negative},
                   {"fraction", g.fraction()},
                   {"threshold", kSweepNegativityTol}});
  return out;
}

}  // namespace pdmcausal
