#include "pdmcausal/pdm.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pdmcausal/parallel.hpp"

namespace pdmcausal {

namespace {

std::vector<std::size_t> party_dims(const std::vector<TimeSlot>& slots) {
  std::vector<std::size_t> dims;
  for (const auto& s : slots)
    for (const auto& p : s.parties) dims.push_back(std::size_t{1} << p.qubits);
  return dims;
}

void check_slot_channel(const QuantumChannel& ch, std::size_t dim) {
  if (ch.dim_in() != dim || ch.dim_out() != dim)
    throw std::invalid_argument("channel dimensions (" + std::to_string(ch.dim_in()) + " -> " +
                                std::to_string(ch.dim_out()) + ") do not match slot dimension " +
                                std::to_string(dim));
}

}  // namespace

std::size_t TimeSlot::qubits() const {
  std::size_t n = 0;
  for (const auto& p : parties) n += p.qubits;
  return n;
}

Pdm::Pdm(ComplexMatrix mat, std::vector<TimeSlot> slots) : slots_(std::move(slots)) {
  if (slots_.empty()) throw std::invalid_argument("PDM needs at least one time slot");
  const auto dims = party_dims(slots_);
  mat_ = mat.with_factors(dims);
  if (!mat_.is_hermitian(1e-10)) throw std::invalid_argument("PDM is not Hermitian");
  if (std::abs(mat_.trace() - 1.0) > 1e-10) throw std::invalid_argument("PDM trace is not 1");
}

std::size_t Pdm::first_factor(std::size_t slot) const {
  if (slot >= slots_.size()) throw std::invalid_argument("slot index out of range");
  std::size_t f = 0;
  for (std::size_t s = 0; s < slot; ++s) f += slots_[s].parties.size();
  return f;
}

std::size_t Pdm::factor_of(PartyRef ref) const {
  const std::size_t base = first_factor(ref.slot);
  if (ref.party >= slots_[ref.slot].parties.size()) throw std::invalid_argument("party index out of range");
  return base + ref.party;
}

std::vector<TimeSlot> slots_for(const QuantumState& rho1, std::size_t num_slots) {
  std::vector<Party> parties;
  for (std::size_t k = 0; k < rho1.mat.num_factors(); ++k)
    parties.push_back({k < rho1.labels.size() ? rho1.labels[k] : std::string(1, char('A' + k)),
                       qubit_count(rho1.mat.factors()[k])});
  std::vector<TimeSlot> slots;
  for (std::size_t t = 0; t < num_slots; ++t) slots.push_back({"t" + std::to_string(t + 1), parties});
  return slots;
}

Pdm pdm_from_measurements(const QuantumState& rho1, const std::vector<QuantumChannel>& channels) {
  const std::size_t m = channels.size() + 1;
  const std::size_t n = qubit_count(rho1.dim());
  if (m * n > kMaxOracleQubits)
    throw std::invalid_argument("measurement simulation needs 4^" + std::to_string(m * n) +
                                " Pauli tuples; at most " + std::to_string(kMaxOracleQubits) +
                                " slot-qubits are supported (reduce qubits or time slots)");
  for (const auto& ch : channels) check_slot_channel(ch, rho1.dim());

  const std::size_t per_slot = std::size_t{1} << (2 * n);
  std::vector<ComplexMatrix> sigma, p_plus, p_minus;
  for (std::size_t i = 0; i < per_slot; ++i) {
    const auto ps = PauliString::from_index(i, n);
    sigma.push_back(pauli_matrix(ps).with_factors({rho1.dim()}));
    if (ps.is_identity()) {
      p_plus.push_back(ComplexMatrix::identity(rho1.dim()));
      p_minus.push_back(ComplexMatrix(rho1.dim()));
    } else {
      auto pr = coarse_projectors(ps);
      p_plus.push_back(pr.plus.with_factors({rho1.dim()}));
      p_minus.push_back(pr.minus.with_factors({rho1.dim()}));
    }
  }

  ComplexVector coeffs(std::size_t{1} << (2 * n * m));

  // Depth-first over time: `x` is the signed (P₊·P₊ − P₋·P₋) post-measurement
  // operator propagated to slot `level`, for the Pauli prefix `prefix`.
  auto visit = [&](auto&& self, std::size_t level, const ComplexMatrix& x, std::size_t prefix) -> void {
    for (std::size_t i = 0; i < per_slot; ++i) {
      const std::size_t index = prefix * per_slot + i;
      if (level + 1 == m) {
        coeffs[index] = (sigma[i] * x).trace();
        continue;
      }
      const ComplexMatrix post = p_plus[i] * x * p_plus[i] - p_minus[i] * x * p_minus[i];
      self(self, level + 1, apply(channels[level], post), index);
    }
  };

  const ComplexMatrix x0 = rho1.mat.with_factors({rho1.dim()});
  if (m == 1) {
    visit(visit, 0, x0, 0);
  } else {
    parallel_for(per_slot, [&](std::size_t i1) {
      const ComplexMatrix post = p_plus[i1] * x0 * p_plus[i1] - p_minus[i1] * x0 * p_minus[i1];
      visit(visit, 1, apply(channels[0], post), i1);
    });
  }

  const auto slots = slots_for(rho1, m);
  return Pdm(from_pauli_coefficients(coeffs).with_factors(party_dims(slots)), slots);
}

Pdm pdm_closed_form(const QuantumState& rho1, const QuantumChannel& ch) {
  check_slot_channel(ch, rho1.dim());
  const ComplexMatrix choi = choi_of(ch).with_factors({rho1.dim(), rho1.dim()});
  const ComplexMatrix rho = kron(rho1.mat.with_factors({rho1.dim()}), ComplexMatrix::identity(rho1.dim()));
  const auto slots = slots_for(rho1, 2);
  return Pdm(0.5 * (choi * rho + rho * choi), slots);
}

Pdm pdm_iterative(const QuantumState& rho1, const std::vector<QuantumChannel>& channels) {
  if (channels.empty()) throw std::invalid_argument("pdm_iterative needs at least one channel");
  for (const auto& ch : channels) check_slot_channel(ch, rho1.dim());
  const std::size_t d = rho1.dim();
  ComplexMatrix r = pdm_closed_form(rho1, channels[0]).mat().with_factors({d * d});
  std::size_t before = d;  // dimension of the slots preceding the channel's input slot
  for (std::size_t k = 1; k < channels.size(); ++k) {
    const ComplexMatrix choi = choi_of(channels[k]).with_factors({d * d});
    const ComplexMatrix rk = kron(r, ComplexMatrix::identity(d));
    const ComplexMatrix mk = kron(ComplexMatrix::identity(before), choi);
    r = 0.5 * (rk * mk + mk * rk);
    r = r.with_factors({r.dim()});
    before *= d;
  }
  const auto slots = slots_for(rho1, channels.size() + 1);
  return Pdm(r.with_factors(party_dims(slots)), slots);
}

Pdm reduce(const Pdm& r, const std::vector<PartyRef>& keep) {
  if (keep.empty()) throw std::invalid_argument("reduce: keep set is empty");
  std::vector<std::size_t> factors;
  for (const auto& ref : keep) factors.push_back(r.factor_of(ref));
  ComplexMatrix mat = partial_trace(r.mat(), factors);

  std::vector<TimeSlot> slots;
  for (std::size_t s = 0; s < r.num_slots(); ++s) {
    TimeSlot slot{r.slots()[s].label, {}};
    for (std::size_t p = 0; p < r.slots()[s].parties.size(); ++p) {
      const bool kept = std::any_of(keep.begin(), keep.end(),
                                    [&](const PartyRef& k) { return k.slot == s && k.party == p; });
      if (kept) slot.parties.push_back(r.slots()[s].parties[p]);
    }
    if (!slot.parties.empty()) slots.push_back(std::move(slot));
  }
  return Pdm(std::move(mat), std::move(slots));
}

Pdm reduce_slots(const Pdm& r, const std::vector<std::size_t>& keep_slots) {
  std::vector<PartyRef> keep;
  for (std::size_t s : keep_slots) {
    if (s >= r.num_slots()) throw std::invalid_argument("reduce_slots: slot index out of range");
    for (std::size_t p = 0; p < r.slots()[s].parties.size(); ++p) keep.push_back({s, p});
  }
  return reduce(r, keep);
}

double negativity(const ComplexMatrix& r) {
  double s = 0.0;
  for (double l : eigenvalues_hermitian(r)) s += std::abs(l);
  return s - 1.0;
}

double negativity(const Pdm& r) { return negativity(r.mat()); }

Pdm time_reverse(const Pdm& r) {
  if (r.num_slots() != 2) throw std::invalid_argument("time_reverse needs exactly two time slots");
  const std::size_t d0 = r.slots()[0].dim();
  const std::size_t d1 = r.slots()[1].dim();
  if (d0 != d1) throw std::invalid_argument("time_reverse needs slots of equal dimension");
  const ComplexMatrix s = swap_operator(d0);
  const ComplexMatrix mat = s * r.mat().with_factors({d0, d1}) * s.adjoint();
  return Pdm(mat, {r.slots()[1], r.slots()[0]});
}

QuantumState slot_state(const Pdm& r, std::size_t slot) {
  const Pdm marginal = reduce_slots(r, {slot});
  std::vector<std::string> labels;
  for (const auto& p : marginal.slots()[0].parties) labels.push_back(p.name);
  return QuantumState::from_matrix(marginal.mat(), std::move(labels));
}

}  // namespace pdmcausal
