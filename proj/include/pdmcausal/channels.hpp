#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "pdmcausal/rng.hpp"
#include "pdmcausal/tensor.hpp"

namespace pdmcausal {

/// Density matrix with one tensor factor per party.
struct QuantumState {
  ComplexMatrix mat;
  std::vector<std::string> labels;  // one per factor of `mat`

  /// Validates Hermiticity, unit trace (1e-10) and positivity (-1e-10).
  /// Missing labels default to "A", "B", ... in factor order.
  static QuantumState from_matrix(ComplexMatrix m, std::vector<std::string> labels = {});
  /// |ψ><ψ| for a normalized vector, split into the given factors.
  static QuantumState pure(std::span<const Complex> psi, std::vector<std::size_t> factors);
  static QuantumState maximally_mixed(std::vector<std::size_t> factors);
  /// Computational basis state |index> over the given factors.
  static QuantumState basis(std::size_t index, std::vector<std::size_t> factors);

  std::size_t dim() const { return mat.dim(); }
};

QuantumState kron(const QuantumState& a, const QuantumState& b);

struct KrausRep {
  std::vector<ComplexMatrix> ops;  // each dim_out x dim_in, stored square when equal
};
struct UnitaryRep {
  ComplexMatrix u;
};
/// Input-transposed convention: M = Σ |i><j|ᵀ ⊗ 𝓜(|i><j|), input factor first.
struct ChoiRep {
  ComplexMatrix m;
};

/// CPTP map between (possibly multi-factor) spaces of equal or different size.
///
/// Kraus operators are stored as square matrices, so this artifact only
/// supports dim_in == dim_out for Kraus and unitary representations; the Choi
/// representation carries arbitrary input/output factorizations.
class QuantumChannel {
 public:
  using Rep = std::variant<KrausRep, UnitaryRep, ChoiRep>;

  static QuantumChannel kraus(std::vector<ComplexMatrix> ops, std::vector<std::size_t> factors);
  static QuantumChannel unitary(ComplexMatrix u);
  static QuantumChannel choi(ComplexMatrix m, std::vector<std::size_t> in_factors,
                             std::vector<std::size_t> out_factors);

  const Rep& rep() const { return rep_; }
  const std::vector<std::size_t>& in_factors() const { return in_factors_; }
  const std::vector<std::size_t>& out_factors() const { return out_factors_; }
  std::size_t dim_in() const;
  std::size_t dim_out() const;

 private:
  QuantumChannel(Rep rep, std::vector<std::size_t> in, std::vector<std::size_t> out)
      : rep_(std::move(rep)), in_factors_(std::move(in)), out_factors_(std::move(out)) {}

  Rep rep_;
  std::vector<std::size_t> in_factors_;
  std::vector<std::size_t> out_factors_;
};

/// Linear action on an arbitrary operator of the input space.
ComplexMatrix apply(const QuantumChannel& ch, const ComplexMatrix& x);
QuantumState apply(const QuantumChannel& ch, const QuantumState& s);

/// Input-transposed Choi matrix M; factors are in_factors ++ out_factors.
ComplexMatrix choi_of(const QuantumChannel& ch);

/// Kraus operators; from a Choi representation by eigendecomposition,
/// dropping eigenvalues below 1e-12.
std::vector<ComplexMatrix> kraus_of(const QuantumChannel& ch);

/// Transpose on the input system. `in_dim` splits the matrix into
/// (input, output); the single-argument form requires exactly two factors.
ComplexMatrix input_transpose(const ComplexMatrix& m, std::size_t in_dim);
ComplexMatrix input_transpose(const ComplexMatrix& m);

struct CpCheck {
  bool completely_positive = false;
  double min_eigenvalue = 0.0;  // of input_transpose(M)
};
CpCheck is_cp(const ComplexMatrix& m, double eps, std::size_t in_dim);
CpCheck is_cp(const ComplexMatrix& m, double eps);

/// Tr_C 𝓜_BC ∘ 𝓝_AC acting on A⊗B with ancilla C prepared in rho_c.
/// `n_ac` acts on factors (A, C) and `m_bc` on (B, C), each as a two-factor
/// channel in that order.
QuantumChannel semicausal(const QuantumChannel& n_ac, const QuantumChannel& m_bc,
                          const QuantumState& rho_c);

ComplexMatrix haar_unitary(std::size_t d, Rng& rng);
ComplexMatrix haar_unitary(std::size_t d, std::uint64_t seed);
/// First column of a Haar unitary: a uniformly random pure state.
ComplexVector haar_state(std::size_t d, Rng& rng);

QuantumChannel identity_channel(std::vector<std::size_t> factors);
/// Exchange of two d-dimensional factors.
QuantumChannel swap_channel(std::size_t d);
/// Two-qubit e^{iθS} = cos θ I + i sin θ S.
QuantumChannel partial_swap(double theta);
ComplexMatrix partial_swap_unitary(double theta);
/// Z-basis measure-and-prepare on one qubit: ρ -> Σ <k|ρ|k> |k><k|.
QuantumChannel measure_prepare_z();
QuantumChannel completely_depolarizing(std::size_t d);

/// Resolves "identity", "identity:<d>", "swap", "measure_prepare_z",
/// "partial_swap:<theta>" and "depolarizing[:<d>]".
QuantumChannel named_channel(std::string_view id);

}  // namespace pdmcausal
