#include "pdmcausal/inference.hpp"

#include <algorithm>
#include <cmath>

#include "extraction_frame.hpp"

namespace pdmcausal {

namespace detail {

ExtractionFrame make_frame(const Pdm& r, const Thresholds& th) {
  if (r.num_slots() != 2) throw std::invalid_argument("Choi extraction needs a two-slot PDM");
  ExtractionFrame f;
  f.din = r.slots()[0].dim();
  f.dout = r.slots()[1].dim();
  f.factors = r.mat().factors();
  const std::size_t d = f.din * f.dout;

  const ComplexMatrix marginal = reduce_slots(r, {0}).mat().with_factors({f.din});
  const auto eig = eig_hermitian(marginal);
  f.lambda = eig.values;
  for (double l : f.lambda) f.kernel.push_back(l <= th.rank_tol);
  f.unique = std::none_of(f.kernel.begin(), f.kernel.end(), [](bool k) { return k; });

  const ComplexMatrix id_out = ComplexMatrix::identity(f.dout);
  f.rho = kron(marginal, id_out).with_factors({d});
  f.basis = kron(eig.vectors, id_out).with_factors({d});

  const ComplexMatrix rhat = f.basis.adjoint() * r.mat().with_factors({d}) * f.basis;
  ComplexMatrix mhat(d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) {
      if (is_free(f, i, j)) continue;
      const double s = 0.5 * (f.lambda[i / f.dout] + f.lambda[j / f.dout]);
      mhat(i, j) = rhat(i, j) / s;
    }
  mhat = mhat.hermitian_part();

  if (!f.unique) {
    // Fill the free block with (target ⊗ I)/dout, the smallest completion
    // restoring Tr_out M = I. In the rotated frame Tr_out acts blockwise on
    // input indices, and only the kernel × kernel part of the deficit can be
    // absorbed.
    for (std::size_t a = 0; a < f.din; ++a)
      for (std::size_t b = 0; b < f.din; ++b) {
        if (!(f.kernel[a] && f.kernel[b])) continue;
        Complex block_trace{};
        for (std::size_t o = 0; o < f.dout; ++o) block_trace += mhat(a * f.dout + o, b * f.dout + o);
        const Complex deficit = (a == b ? 1.0 : 0.0) - block_trace;
        for (std::size_t o = 0; o < f.dout; ++o)
          mhat(a * f.dout + o, b * f.dout + o) += deficit / static_cast<double>(f.dout);
      }
  }
  f.rotated_solution = std::move(mhat);
  return f;
}

ExtractionResult finish(const Pdm& r, const ExtractionFrame& f, const ComplexMatrix& rotated) {
  const std::size_t d = f.din * f.dout;
  ComplexMatrix m = (f.basis * rotated * f.basis.adjoint()).hermitian_part();
  const ComplexMatrix lhs = 0.5 * (f.rho * m + m * f.rho);
  const double residual = (lhs - r.mat().with_factors({d})).frobenius_norm();
  const double trace_gap =
      max_abs_diff(partial_trace(m.with_factors({f.din, f.dout}), {0}), ComplexMatrix::identity(f.din));
  if (residual > 1e-6 || trace_gap > 1e-6)
    throw InconsistencyError("PDM admits no Choi matrix of the two-time closed form (residual " +
                             std::to_string(residual) + ", trace gap " + std::to_string(trace_gap) + ")");
  ExtractionResult out;
  out.choi = m.with_factors(f.factors);
  out.residual = residual;
  out.unique = f.unique;
  out.min_eig_transposed = min_eigenvalue(input_transpose(m, f.din));
  return out;
}

}  // namespace detail

ComplexMatrix build_B(const QuantumState& marginal, std::size_t out_dim) {
  const ComplexMatrix rho = kron(marginal.mat.with_factors({marginal.dim()}), ComplexMatrix::identity(out_dim));
  const std::size_t d = rho.dim();
  const ComplexMatrix id = ComplexMatrix::identity(d);
  return 0.5 * (kron(rho, id) + kron(id, rho.transpose()));
}

ExtractionResult extract_choi(const Pdm& r, const Thresholds& th) {
  const auto frame = detail::make_frame(r, th);
  return detail::finish(r, frame, frame.rotated_solution);
}

ExtractionResult extract_reverse_choi(const Pdm& r, const Thresholds& th) {
  return extract_choi(time_reverse(r), th);
}

namespace {

ExtractionResult evidence(const Pdm& r, const Thresholds& th) {
  ExtractionResult ext = extract_choi(r, th);
  if (!ext.unique) ext = sdp_least_negative(r, Direction::Forward, {}, th).extraction;
  return ext;
}

}  // namespace

CausalVerdict classify(const Pdm& r, const Thresholds& th) {
  if (r.num_slots() != 2) throw std::invalid_argument("classify needs a two-slot PDM");
  CausalVerdict v;
  v.thresholds = th;

  const ComplexMatrix product =
      kron(reduce_slots(r, {0}).mat(), reduce_slots(r, {1}).mat());
  v.correlated = max_abs_diff(product, r.mat()) > 1e-9;
  v.f = negativity(r);

  const ExtractionResult fwd = evidence(r, th);
  const ExtractionResult rev = evidence(time_reverse(r), th);
  v.min_eig_forward = fwd.min_eig_transposed;
  v.min_eig_reverse = rev.min_eig_transposed;
  v.unique_forward = fwd.unique;
  v.unique_reverse = rev.unique;

  if (v.f <= th.eps_neg) {
    v.compatible = {3};
    return v;
  }
  const bool forward_cp = v.min_eig_forward >= -th.eps_pos;
  const bool reverse_cp = v.min_eig_reverse >= -th.eps_pos;
  if (forward_cp && reverse_cp)
    v.compatible = {1, 2};
  else if (forward_cp)
    v.compatible = {1};
  else if (reverse_cp)
    v.compatible = {2};
  else
    v.compatible = {4, 5};
  return v;
}

OrientedVerdicts classify_both_orientations(const Pdm& r, const Thresholds& th) {
  return {classify(r, th), classify(time_reverse(r), th)};
}

}  // namespace pdmcausal
