#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "pdmcausal/inference.hpp"
#include "pdmcausal/json_io.hpp"
#include "pdmcausal/pdm.hpp"

namespace pdmcausal {

enum class OutputFormat { Csv, Json };

/// Scenario ids: "measure-prepare", "common-cause", "swap-influence", "fig3",
/// "fig4". Angles are in radians.
struct ScenarioConfig {
  std::string scenario;
  std::vector<double> lambdas;
  std::vector<double> thetas;
  std::size_t samples = 1000;
  std::optional<std::uint64_t> seed;
  std::string output_path;  // empty: standard output
  OutputFormat format = OutputFormat::Csv;
  Thresholds thresholds;

  /// Grids filled with the scenario's defaults: λ = 0.1..0.9; θ = 0°..90° in
  /// 5° steps (common-cause drops 90°); fig4 uses θ ∈ {30°, 60°}.
  static ScenarioConfig defaults(const std::string& scenario);
  /// Throws std::invalid_argument for an unknown scenario, empty grids,
  /// out-of-range parameters, or a stochastic scenario without a seed.
  void validate() const;
};

/// Rows are JSON objects; `columns` fixes the CSV column order.
struct Table {
  std::vector<std::string> columns;
  std::vector<json> rows;
};

void write_csv(const Table& t, std::ostream& out);
json table_to_json(const Table& t);

/// Negativity threshold used when counting samples in the sweeps.
inline constexpr double kSweepNegativityTol = 1e-6;

// Each scenario recomputes its closed-form expectations and throws
// InconsistencyError on any mismatch.

/// ρ_{A₁B₁} = [(1−λ)I/2 + λ|+⟩⟨+|] ⊗ |0⟩⟨0| through a Z-measure-and-prepare
/// from A to B, realised as a semicausal channel. Columns: lambda, f,
/// min_eig_fwd, min_eig_rev, verdict.
Table run_measure_prepare(const ScenarioConfig& cfg);

/// Bell input, swap on AC then e^{iθS} on BC with C in |0⟩. Columns: theta, c,
/// s, f, min_eig_fwd, min_eig_rev, verdict.
Table run_common_cause_mixture(const ScenarioConfig& cfg);

/// |00⟩ through e^{iθS}; R_{A₁A₂}. Columns: theta, f, expected, error.
Table run_swap_influence(const ScenarioConfig& cfg);

struct SweepGroup {
  std::string group;  // input_id (fig3) or theta_deg (fig4)
  std::size_t count = 0;
  std::size_t negative = 0;  // samples with f > kSweepNegativityTol
  double fraction() const { return count == 0 ? 0.0 : static_cast<double>(negative) / count; }
};

struct SweepResult {
  Table table;
  std::vector<SweepGroup> summary;
};

/// fig3: swap on AC, Haar 4×4 unitary on BC, inputs |00⟩ ("product") and the
/// Bell state ("bell"). Columns: sample_id, input_id, f, min_eig_fwd,
/// min_eig_rev.
/// fig4: e^{−iθS} on BC (swap on AC), Haar-random pure two-qubit inputs.
/// Columns: sample_id, theta_deg, f, min_eig_fwd, min_eig_rev.
/// Sample i draws from seed ⊕ i; rows are ordered by sample then group.
SweepResult run_haar_sweep(const ScenarioConfig& cfg);

json summary_to_json(const std::vector<SweepGroup>& s);

/// Two-time PDM R_{A₁B₂} of a semicausal process with ancilla C in |0⟩:
/// `n_ac` on (A, C), then `m_bc` on (B, C).
Pdm semicausal_a1b2(const QuantumState& rho_ab, const QuantumChannel& n_ac, const QuantumChannel& m_bc);

/// Entry point of the command-line tool. Returns 0 on success, 1 on input or
/// usage errors, 2 on numerical inconsistency.
int cli_dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace pdmcausal
