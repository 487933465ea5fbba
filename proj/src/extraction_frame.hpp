#pragma once

// Shared between Choi extraction and the least-negative SDP.

#include <vector>

#include "pdmcausal/inference.hpp"

namespace pdmcausal::detail {

/// Eigenframe of the first-slot marginal. In the rotated basis W = V ⊗ I the
/// equation ½(ρM + Mρ) = R decouples entrywise:
///   M̂[(a,o),(b,o')] · (λ_a + λ_b)/2 = R̂[(a,o),(b,o')],
/// so entries with both a and b in the marginal's kernel are free.
struct ExtractionFrame {
  std::size_t din = 0;
  std::size_t dout = 0;
  std::vector<std::size_t> factors;  // party dims of the PDM
  ComplexMatrix rho;                 // marginal ⊗ I
  ComplexMatrix basis;               // W
  std::vector<double> lambda;        // marginal eigenvalues
  std::vector<bool> kernel;          // λ_a <= rank_tol
  bool unique = true;
  ComplexMatrix rotated_solution;    // W† M W for the minimum-norm feasible M
};

ExtractionFrame make_frame(const Pdm& r, const Thresholds& th);

/// True when entry (i, j) of a rotated operator is undetermined by R.
inline bool is_free(const ExtractionFrame& f, std::size_t i, std::size_t j) {
  return f.kernel[i / f.dout] && f.kernel[j / f.dout];
}

/// Rotates back, measures the residual and the min eigenvalue of the input
/// transpose.
ExtractionResult finish(const Pdm& r, const ExtractionFrame& f, const ComplexMatrix& rotated);

}  // namespace pdmcausal::detail
