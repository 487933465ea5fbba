#pragma once

#include <string>
#include <vector>

#include "pdmcausal/channels.hpp"
#include "pdmcausal/tensor.hpp"

namespace pdmcausal {

struct Party {
  std::string name;
  std::size_t qubits = 1;
};

/// One measurement time. The slot's Hilbert space is the tensor product of
/// its parties, in order.
struct TimeSlot {
  std::string label;
  std::vector<Party> parties;

  std::size_t qubits() const;
  std::size_t dim() const { return std::size_t{1} << qubits(); }
};

/// Names one party at one time, e.g. {0, 0} = A₁ and {1, 1} = B₂ in a
/// bipartite two-time PDM.
struct PartyRef {
  std::size_t slot = 0;
  std::size_t party = 0;
};

/// Pseudo-density matrix over ordered time slots.
///
/// `mat` carries one tensor factor per party (earlier slots leftmost,
/// parties in slot order), so marginals can be taken at party granularity.
/// Hermitian with unit trace; eigenvalues may be negative.
class Pdm {
 public:
  Pdm(ComplexMatrix mat, std::vector<TimeSlot> slots);

  const ComplexMatrix& mat() const { return mat_; }
  const std::vector<TimeSlot>& slots() const { return slots_; }
  std::size_t num_slots() const { return slots_.size(); }
  /// Index of the first tensor factor belonging to `slot`.
  std::size_t first_factor(std::size_t slot) const;
  std::size_t factor_of(PartyRef ref) const;

 private:
  ComplexMatrix mat_;
  std::vector<TimeSlot> slots_;
};

/// Slot layout implied by a state: one party per factor, named by the state's
/// labels, repeated for `num_slots` times labelled t1, t2, ...
std::vector<TimeSlot> slots_for(const QuantumState& rho1, std::size_t num_slots);

/// Largest total qubit count (slots × qubits per slot) accepted by
/// pdm_from_measurements.
inline constexpr std::size_t kMaxOracleQubits = 6;

/// Definitional construction: simulates the coarse-grained two-outcome Pauli
/// measurement at every time for every Pauli string tuple and assembles the
/// Pauli expansion of the PDM from the resulting correlators. Exponential in
/// slots × qubits; intended as a reference.
Pdm pdm_from_measurements(const QuantumState& rho1, const std::vector<QuantumChannel>& channels);

/// Two-time closed form ½(M ρ + ρ M), ρ = ρ₁ ⊗ I.
Pdm pdm_closed_form(const QuantumState& rho1, const QuantumChannel& ch);

/// Many-time form: R_{1..k+1} = ½(R_{1..k} M_{k,k+1} + M_{k,k+1} R_{1..k}).
Pdm pdm_iterative(const QuantumState& rho1, const std::vector<QuantumChannel>& channels);

/// Marginal on the listed parties. Slots that lose all parties disappear;
/// kept parties retain their time order.
Pdm reduce(const Pdm& r, const std::vector<PartyRef>& keep);
/// Marginal on whole slots.
Pdm reduce_slots(const Pdm& r, const std::vector<std::size_t>& keep_slots);

/// ‖R‖_tr − 1 from Hermitian eigenvalues.
double negativity(const Pdm& r);
double negativity(const ComplexMatrix& r);

/// S R S† for the swap S of the two time slots; the slot order is reversed.
Pdm time_reverse(const Pdm& r);

/// Single-slot marginal as a validated density matrix.
QuantumState slot_state(const Pdm& r, std::size_t slot);

}  // namespace pdmcausal
