#pragma once

#include <vector>

#include "pdmcausal/channels.hpp"
#include "pdmcausal/pdm.hpp"
#include "pdmcausal/tensor.hpp"

namespace pdmcausal {

struct Thresholds {
  double eps_neg = 1e-8;   // f above this counts as negativity
  double eps_pos = 1e-8;   // min eigenvalue of Mᵀ above -eps_pos counts as CP
  double rank_tol = 1e-9;  // marginal eigenvalues at or below this are treated as zero
};

/// Choi matrix recovered from a two-time PDM by solving ½(ρM + Mρ) = R with
/// ρ = (first-slot marginal) ⊗ I.
struct ExtractionResult {
  ComplexMatrix choi;        // input-transposed convention, first slot is the input
  double residual = 0.0;     // ‖B|M>> − |R>>‖₂
  bool unique = false;       // marginal has full rank
  double min_eig_transposed = 0.0;  // min eigenvalue of input_transpose(choi)
};

/// ½(ρ ⊗ I + I ⊗ ρᵀ) with ρ = marginal ⊗ I_out: the map |M>> -> |R>> on
/// row-major vectorized operators.
ComplexMatrix build_B(const QuantumState& marginal, std::size_t out_dim);

/// Forward extraction. With a full-rank marginal the solution is unique.
/// Otherwise the entries coupling two kernel directions of the marginal are
/// undetermined; they are filled with the minimum-norm completion that keeps
/// Tr_out M = I, and `unique` is false (see sdp_least_negative).
/// Throws InconsistencyError when the residual exceeds 1e-6.
ExtractionResult extract_choi(const Pdm& r, const Thresholds& th = {});
/// extract_choi applied to time_reverse(r).
ExtractionResult extract_reverse_choi(const Pdm& r, const Thresholds& th = {});

enum class Direction { Forward, Reverse };

struct SdpOptions {
  double step = 1.0;
  int max_iterations = 50000;
  double objective_tol = 1e-6;
  /// Douglas–Rachford fixed-point residual at which the run counts as converged.
  double residual_tol = 1e-10;
};

struct SdpResult {
  ExtractionResult extraction;  // best iterate; always satisfies the linear constraints
  double objective = 0.0;       // Tr of the negative part of input_transpose(N)
  int iterations = 0;
  bool converged = false;
};

/// Over all Hermitian N with ½(ρN + Nρ) = R and Tr_out N = I, finds one whose
/// input transpose is least negative (minimum Tr N₋ᵀ). Uses Douglas–Rachford
/// splitting between the affine solution set and the negative-part penalty.
SdpResult sdp_least_negative(const Pdm& r, Direction direction, const SdpOptions& opts = {},
                             const Thresholds& th = {});

/// Compatibility labels: 1 A→B, 2 B→A, 3 common cause, 4 A→B with common
/// cause, 5 B→A with common cause. A is the first slot.
struct CausalVerdict {
  std::vector<int> compatible;
  bool correlated = true;  // false when R = R_A ⊗ R_B within 1e-9
  double f = 0.0;
  double min_eig_forward = 0.0;
  double min_eig_reverse = 0.0;
  bool unique_forward = true;
  bool unique_reverse = true;
  Thresholds thresholds;
};

CausalVerdict classify(const Pdm& r, const Thresholds& th = {});

/// The time order is not known to the observer, so both labelings are reported.
struct OrientedVerdicts {
  CausalVerdict as_given;
  CausalVerdict reversed;
};
OrientedVerdicts classify_both_orientations(const Pdm& r, const Thresholds& th = {});

}  // namespace pdmcausal
