// Acceptance suite: one PASS/FAIL line per criterion. Exit status is nonzero
// when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>

#include "pdmcausal/harness.hpp"
#include "support.hpp"

using namespace pdmcausal;
using namespace testsupport;

namespace {

constexpr double kPi = std::numbers::pi;

struct Outcome {
  bool pass = true;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

QuantumChannel random_any_channel(Rng& rng, const std::vector<std::size_t>& f) {
  const std::size_t pick = rng.next_u64() % 3;
  std::size_t d = 1;
  for (auto x : f) d *= x;
  if (pick == 0) return QuantumChannel::unitary(haar_unitary(d, rng).with_factors(f));
  const QuantumChannel k = random_channel(rng, f, 1 + rng.next_u64() % 4);
  if (pick == 1) return k;
  return QuantumChannel::choi(choi_of(k), f, f);
}

QuantumState random_any_state(Rng& rng, const std::vector<std::size_t>& f) {
  std::size_t d = 1;
  for (auto x : f) d *= x;
  return random_state(rng, f, 1 + rng.next_u64() % d);
}

ComplexMatrix zero_one_r() {
  return ComplexMatrix::from_rows({{1, 0, 0, 0}, {0, 0, 0.5, 0}, {0, 0.5, 0, 0}, {0, 0, 0, 0}});
}

QuantumState bell() {
  const double h = std::numbers::sqrt2 / 2;
  return QuantumState::pure(ComplexVector{h, 0.0, 0.0, h}, {2, 2});
}

double negative_mass(const ComplexMatrix& n) {
  double s = 0.0;
  for (double l : eigenvalues_hermitian(input_transpose(n.hermitian_part(), 2))) s += std::max(-l, 0.0);
  return s;
}

// ---------------------------------------------------------------------------

Outcome criterion_1_and_2(Outcome& marginals) {
  const auto t0 = Clock::now();
  Rng rng(1001);
  double worst = 0.0, worst_brute = 0.0, worst_marg = 0.0;
  int pairs = 0;
  for (std::size_t n : {1, 2}) {
    const std::vector<std::size_t> f(n, 2);
    for (int t = 0; t < 100; ++t, ++pairs) {
      const QuantumState rho = random_any_state(rng, f);
      const QuantumChannel ch = random_any_channel(rng, f);
      const Pdm closed = pdm_closed_form(rho, ch);
      const Pdm oracle = pdm_from_measurements(rho, {ch});
      worst = std::max(worst, diff(closed.mat(), oracle.mat()));
      if (t % 5 == 0) worst_brute = std::max(worst_brute, diff(closed.mat(), brute_force_pdm(plain(rho.mat), kraus_of(ch), n)));
      worst_marg = std::max(worst_marg, diff(reduce_slots(closed, {0}).mat(), rho.mat));
      worst_marg = std::max(worst_marg, diff(reduce_slots(closed, {1}).mat(), apply(ch, rho.mat)));
    }
  }
  double worst_iter = 0.0;
  int triples = 0;
  for (; triples < 50; ++triples) {
    const QuantumState rho = random_any_state(rng, {2});
    const std::vector<QuantumChannel> chans{random_any_channel(rng, {2}), random_any_channel(rng, {2})};
    worst_iter = std::max(worst_iter, diff(pdm_iterative(rho, chans).mat(), pdm_from_measurements(rho, chans).mat()));
  }
  const double secs = seconds_since(t0);
  marginals.pass = worst_marg <= 1e-10;
  marginals.detail = "max marginal deviation " + fmt(worst_marg) + " over " + std::to_string(pairs) + " pairs";
  return {worst <= 1e-10 && worst_iter <= 1e-10 && worst_brute <= 1e-10 && secs <= 120.0,
          "closed vs measured " + fmt(worst) + " (" + std::to_string(pairs) + " pairs, Kraus brute force " +
              fmt(worst_brute) + "), iterative vs measured " + fmt(worst_iter) + " (" + std::to_string(triples) +
              " three-time cases), " + fmt(secs) + " s"};
}

Outcome criterion_3() {
  Rng rng(1003);
  double worst = 0.0;
  int count = 0, correlated = 0;
  for (; count < 500; ++count) {
    const std::size_t dc = rng.next_u64() % 2 ? 4 : 2;
    const QuantumChannel n = QuantumChannel::unitary(haar_unitary(2 * dc, rng).with_factors({2, dc}));
    const QuantumChannel m = QuantumChannel::unitary(haar_unitary(2 * dc, rng).with_factors({2, dc}));
    const QuantumChannel p = semicausal(n, m, QuantumState::basis(0, {dc}));
    const QuantumState input = random_state(rng, {2, 2}, 1 + rng.next_u64() % 4);
    const ComplexMatrix product = kron(partial_trace(input.mat, {0}), partial_trace(input.mat, {1}));
    if (diff(product, input.mat) > 1e-6) ++correlated;
    const Pdm full = pdm_closed_form(input, p);
    worst = std::max(worst, negativity(reduce(full, {{0, 1}, {1, 0}})));
  }
  return {worst <= 1e-9 && correlated == count,
          "max f(R_B1A2) " + fmt(worst) + " over " + std::to_string(count) + " channels (" +
              std::to_string(correlated) + " correlated inputs)"};
}

Outcome criterion_4() {
  ScenarioConfig cfg = ScenarioConfig::defaults("swap-influence");
  for (int k = 0; k <= 360; ++k) cfg.thetas.push_back(k * kPi / 180.0);
  double worst = 0.0;
  for (const auto& row : run_swap_influence(cfg).rows) worst = std::max(worst, row["error"].get<double>());
  return {worst <= 1e-9, "max |f - |cos θ|| " + fmt(worst) + " over " + std::to_string(cfg.thetas.size()) + " angles"};
}

Outcome criterion_5() {
  Rng rng(1005);
  double worst = 0.0;
  int count = 0;
  for (; count < 200; ++count) {
    const std::vector<std::size_t> f(count % 2 ? 2 : 1, 2);
    const QuantumState rho = random_state(rng, f);  // full rank
    const QuantumChannel ch = random_any_channel(rng, f);
    const auto ext = extract_choi(pdm_closed_form(rho, ch));
    if (!ext.unique) return {false, "full-rank instance reported non-unique"};
    worst = std::max(worst, diff(ext.choi, choi_of(ch)));
  }
  const ComplexMatrix lambda_half = ComplexMatrix::from_rows({{0.5, 0.25}, {0.25, 0.5}});
  const auto mp = extract_choi(pdm_closed_form(QuantumState::from_matrix(lambda_half), measure_prepare_z()));
  const ComplexMatrix pauli_form =
      0.5 * (kron(single_pauli(0), single_pauli(0)) + kron(single_pauli(3), single_pauli(3)));
  const double mp_dev = diff(mp.choi, pauli_form);
  return {worst <= 1e-8 && mp_dev <= 1e-12,
          "max |M - choi| " + fmt(worst) + " over " + std::to_string(count) + " instances; measure-prepare " +
              fmt(mp_dev)};
}

Outcome criterion_6() {
  double worst = 0.0;
  // Identity channel on |0>: printed R, printed M (= SWAP) in the solution set,
  // and the extracted member of the family with free entries a, b, c, d.
  const Pdm r = pdm_closed_form(QuantumState::basis(0, {2}), identity_channel({2}));
  worst = std::max(worst, diff(r.mat(), zero_one_r()));
  const ComplexMatrix m_printed =
      ComplexMatrix::from_rows({{1, 0, 0, 0}, {0, 0, 1, 0}, {0, 1, 0, 0}, {0, 0, 0, 1}});
  worst = std::max(worst, diff(choi_of(identity_channel({2})), m_printed));
  const ComplexMatrix rho = ComplexMatrix::from_rows({{1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 0, 0}, {0, 0, 0, 0}});
  worst = std::max(worst, diff(0.5 * (rho * m_printed + m_printed * rho), zero_one_r()));
  const ComplexMatrix member = extract_choi(r).choi;
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j)
      if (i < 2 || j < 2) worst = std::max(worst, std::abs(member(i, j) - m_printed(i, j)));

  // Measure-prepare reverse blocks; reversed input factor (B) first.
  for (int k = 1; k <= 9; ++k) {
    const double l = k / 10.0;
    ComplexMatrix rho_a = ComplexMatrix::from_rows({{0.5, l / 2}, {l / 2, 0.5}});
    const QuantumState input = kron(QuantumState::from_matrix(rho_a), QuantumState::basis(0, {2}));
    ComplexMatrix cnot({2, 2});
    cnot(0, 0) = cnot(1, 1) = cnot(2, 3) = cnot(3, 2) = 1.0;
    const Pdm mp = semicausal_a1b2(input, QuantumChannel::unitary(cnot), swap_channel(2));
    const ComplexMatrix rt = input_transpose(extract_reverse_choi(mp).choi);
    const ComplexMatrix block0 = 0.5 * ComplexMatrix::from_rows({{2, l}, {l, 0}});
    const ComplexMatrix block1 = 0.5 * ComplexMatrix::from_rows({{0, l}, {l, 2}});
    const ComplexMatrix p0 = ComplexMatrix::diagonal(ComplexVector{1.0, 0.0});
    const ComplexMatrix p1 = ComplexMatrix::diagonal(ComplexVector{0.0, 1.0});
    worst = std::max(worst, diff(rt, kron(p0, block0) + kron(p1, block1)));
  }

  for (double th : {kPi / 6, kPi / 4, kPi / 3}) {
    const double c2 = std::pow(std::cos(th), 2), s2 = std::pow(std::sin(th), 2);
    const Pdm cc = semicausal_a1b2(bell(), swap_channel(2), partial_swap(th));
    const ComplexMatrix r_printed =
        0.5 * ComplexMatrix::from_rows({{1, 0, 0, c2}, {0, 0, s2, 0}, {0, s2, 0, 0}, {c2, 0, 0, 1}});
    const ComplexMatrix mt_printed =
        ComplexMatrix::from_rows({{1, 0, 0, s2}, {0, 0, c2, 0}, {0, c2, 0, 0}, {s2, 0, 0, 1}});
    worst = std::max(worst, diff(cc.mat(), r_printed));
    worst = std::max(worst, diff(input_transpose(extract_choi(cc).choi), mt_printed));
    worst = std::max(worst, diff(input_transpose(extract_reverse_choi(cc).choi), mt_printed));
  }
  return {worst <= 1e-10, "max entrywise deviation " + fmt(worst)};
}

Outcome criterion_7() {
  std::vector<double> lambdas{0.01, 0.05, 0.95, 0.99};
  for (int k = 1; k <= 9; ++k) lambdas.push_back(k / 10.0);
  ScenarioConfig mp = ScenarioConfig::defaults("measure-prepare");
  mp.lambdas = lambdas;
  int ok_mp = 0;
  for (const auto& row : run_measure_prepare(mp).rows) ok_mp += row["verdict"] == json::array({1});

  ScenarioConfig cc = ScenarioConfig::defaults("common-cause");
  cc.thetas = {kPi / 6, kPi / 4, kPi / 3};
  for (int d = 5; d <= 85; d += 5) cc.thetas.push_back(d * kPi / 180.0);
  int ok_cc = 0;
  for (const auto& row : run_common_cause_mixture(cc).rows) ok_cc += row["verdict"] == json::array({4, 5});

  Rng rng(1007);
  int ok_psd = 0, total_psd = 60;
  for (int t = 0; t < total_psd; ++t) {
    const ComplexMatrix m = t < 2 ? (t == 0 ? bell().mat : ComplexMatrix::diagonal(ComplexVector{0.5, 0.0, 0.0, 0.5}))
                                  : random_state(rng, {2, 2}, 1 + t % 4).mat;
    const Pdm r(m, {{"t1", {{"A", 1}}}, {"t2", {{"B", 1}}}});
    const auto v = classify(r);
    ok_psd += std::find(v.compatible.begin(), v.compatible.end(), 3) != v.compatible.end();
  }
  const bool pass = ok_mp == static_cast<int>(lambdas.size()) && ok_cc == static_cast<int>(cc.thetas.size()) &&
                    ok_psd == total_psd;
  return {pass, "measure-prepare {1} " + std::to_string(ok_mp) + "/" + std::to_string(lambdas.size()) +
                    ", common-cause {4,5} " + std::to_string(ok_cc) + "/" + std::to_string(cc.thetas.size()) +
                    ", density matrices with 3 " + std::to_string(ok_psd) + "/" + std::to_string(total_psd)};
}

/// Brute force over the free block: N = N₀ + |v><v| ⊗ X with X Hermitian of
/// fixed trace, on a coarse grid over its three real parameters.
double grid_oracle(const Pdm& r, const QuantumState& rho, const ComplexVector& kernel) {
  const ComplexMatrix b = build_B(rho, 2);
  const ComplexMatrix n0 = unvectorize(pseudo_inverse(b) * vectorize(plain(r.mat())), 4).hermitian_part();
  const ComplexMatrix deficit = ComplexMatrix::identity(2) - partial_trace(n0.with_factors({2, 2}), {0});
  const ComplexMatrix vv = ComplexMatrix::outer(kernel);
  const double t = (kernel[0] * std::conj(kernel[0]) * deficit(0, 0) + kernel[0] * std::conj(kernel[1]) * deficit(1, 0) +
                    kernel[1] * std::conj(kernel[0]) * deficit(0, 1) + kernel[1] * std::conj(kernel[1]) * deficit(1, 1))
                       .real();
  double best = 1e300;
  const int steps = 30;
  const double span = 1.5;
  for (int i = 0; i <= steps; ++i)
    for (int j = 0; j <= steps; ++j)
      for (int k = 0; k <= steps; ++k) {
        const double p = t / 2 + span * (2.0 * i / steps - 1.0);
        const double x = span * (2.0 * j / steps - 1.0), y = span * (2.0 * k / steps - 1.0);
        const ComplexMatrix xm = ComplexMatrix::from_rows({{p, Complex(x, y)}, {Complex(x, -y), t - p}});
        best = std::min(best, negative_mass(n0 + naive_kron(vv, xm)));
      }
  return best;
}

Outcome criterion_8() {
  // Identity channel on |0>: true optimum 0.
  const Pdm r0 = pdm_closed_form(QuantumState::basis(0, {2}), identity_channel({2}));
  const auto res0 = sdp_least_negative(r0, Direction::Forward);
  const ComplexMatrix n = res0.extraction.choi;
  const ComplexMatrix rho0 = kron(QuantumState::basis(0, {2}).mat, ComplexMatrix::identity(2));
  const double aff = diff(0.5 * (rho0 * n + n * rho0), r0.mat());
  const double tr = diff(partial_trace(n, {0}), ComplexMatrix::identity(2));
  const double herm = diff(n, n.adjoint());
  bool pass = res0.objective <= 1e-6 && aff <= 1e-7 && tr <= 1e-7 && herm <= 1e-7;
  std::string detail = "identity/|0>: objective " + fmt(res0.objective) + ", constraints " +
                       fmt(std::max({aff, tr, herm})) + "; ";

  Rng rng(1008);
  double worst_gap = -1e300, worst_constraint = 0.0, max_oracle = 0.0;
  for (int t = 0; t < 20; ++t) {
    const ComplexVector psi = haar_state(2, rng);
    const ComplexVector kernel{-std::conj(psi[1]), std::conj(psi[0])};
    const QuantumState rho = QuantumState::pure(psi, {2});
    ComplexMatrix m = choi_of(random_channel(rng, {2}, 2));
    if (t % 2 == 1) {
      // Hermitian, trace-preserving but not CP: the optimum can be positive.
      ComplexMatrix h = random_hermitian(rng, 4).with_factors({2, 2});
      const ComplexMatrix h_out = partial_trace(h, {0});
      h = h - kron(h_out, 0.5 * ComplexMatrix::identity(2));
      m = m + 0.6 * h;
    }
    const ComplexMatrix rr = kron(rho.mat, ComplexMatrix::identity(2));
    const Pdm r(0.5 * (rr * m + m * rr), {{"t1", {{"A", 1}}}, {"t2", {{"B", 1}}}});
    const auto res = sdp_least_negative(r, Direction::Forward);
    const double oracle = grid_oracle(r, rho, kernel);
    const ComplexMatrix s = res.extraction.choi;
    worst_constraint = std::max({worst_constraint, diff(0.5 * (rr * s + s * rr), r.mat()),
                                 diff(partial_trace(s, {0}), ComplexMatrix::identity(2))});
    worst_gap = std::max(worst_gap, res.objective - oracle);
    max_oracle = std::max(max_oracle, oracle);
  }
  pass = pass && worst_gap <= 1e-4 && worst_constraint <= 1e-7;
  detail += "20 random deficient instances: max(solver - grid) " + fmt(worst_gap) + ", largest grid optimum " +
            fmt(max_oracle) + ", constraints " + fmt(worst_constraint);
  return {pass, detail};
}

Outcome criterion_9() {
  const auto t0 = Clock::now();
  bool pass = true;
  std::string detail;
  for (const char* scenario : {"fig3", "fig4"}) {
    ScenarioConfig cfg = ScenarioConfig::defaults(scenario);
    cfg.samples = 1000;
    cfg.seed = 7;
    for (const auto& g : run_haar_sweep(cfg).summary) {
      pass = pass && g.fraction() >= 0.99;
      detail += std::string(scenario) + "/" + g.group + " " + fmt(g.fraction()) + ", ";
    }
  }
  const double secs = seconds_since(t0);
  pass = pass && secs <= 300.0;
  return {pass, detail + fmt(secs) + " s"};
}

}  // namespace

int main() {
  struct Entry {
    int id;
    const char* name;
    std::function<Outcome()> run;
  };
  Outcome marginals;
  Outcome first;
  const std::vector<Entry> entries{
      {1, "closed form and iteration match the measurement definition", [&] { return first = criterion_1_and_2(marginals); }},
      {2, "marginals return the initial and evolved states", [&] { return marginals; }},
      {3, "no negativity from B1 to A2 under semicausal channels", criterion_3},
      {4, "swap-influence negativity equals |cos θ|", criterion_4},
      {5, "Choi extraction round trip", criterion_5},
      {6, "worked-example matrices reproduced", criterion_6},
      {7, "protocol verdicts", criterion_7},
      {8, "least-negative completion", criterion_8},
      {9, "Haar sweeps show negativity with near unit probability", criterion_9},
  };
  int failures = 0;
  for (const auto& e : entries) {
    Outcome o;
    try {
      o = e.run();
    } catch (const std::exception& ex) {
      o = {false, std::string("exception: ") + ex.what()};
    }
    failures += !o.pass;
    std::printf("[%s] criterion %d: %s -- %s\n", o.pass ? "PASS" : "FAIL", e.id, e.name, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(entries.size()) - failures, entries.size());
  return failures == 0 ? 0 : 1;
}
