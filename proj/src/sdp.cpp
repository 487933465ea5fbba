#include <algorithm>
#include <cmath>
#include <limits>

#include "extraction_frame.hpp"
#include "pdmcausal/inference.hpp"

namespace pdmcausal {

namespace {

using detail::ExtractionFrame;

// The solver works in the marginal's eigenframe. Conjugating N by V ⊗ I
// conjugates its input transpose by V̄ ⊗ I, so the spectrum of the input
// transpose (and hence the objective) is the same in either frame.

// Euclidean projection onto {X Hermitian : fixed entries match, free block has
// the prescribed output trace}.
ComplexMatrix project_affine(const ExtractionFrame& f, const ComplexMatrix& y) {
  ComplexMatrix x = f.rotated_solution;
  const std::size_t d = x.dim();
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j)
      if (detail::is_free(f, i, j)) x(i, j) = 0.5 * (y(i, j) + std::conj(y(j, i)));
  // X_F -= ((Tr_out X_F − target) ⊗ I) / dout; the target is the block trace of
  // the feasible reference solution.
  for (std::size_t a = 0; a < f.din; ++a)
    for (std::size_t b = 0; b < f.din; ++b) {
      if (!(f.kernel[a] && f.kernel[b])) continue;
      Complex gap{};
      for (std::size_t o = 0; o < f.dout; ++o) {
        const std::size_t i = a * f.dout + o, j = b * f.dout + o;
        gap += x(i, j) - f.rotated_solution(i, j);
      }
      for (std::size_t o = 0; o < f.dout; ++o)
        x(a * f.dout + o, b * f.dout + o) -= gap / static_cast<double>(f.dout);
    }
  return x;
}

struct Spectrum {
  HermitianEigen eig;
  double negative_mass = 0.0;
};

Spectrum transposed_spectrum(const ExtractionFrame& f, const ComplexMatrix& x) {
  Spectrum s{eig_hermitian(input_transpose(x, f.din)), 0.0};
  for (double l : s.eig.values) s.negative_mass += std::max(-l, 0.0);
  return s;
}

// prox of t·Tr(Z₋) applied through the (self-inverse, isometric) input transpose.
ComplexMatrix prox_negative_part(const ExtractionFrame& f, const ComplexMatrix& y, double t) {
  const auto e = eig_hermitian(input_transpose(y.hermitian_part(), f.din));
  const std::size_t d = y.dim();
  ComplexMatrix z(d);
  for (std::size_t k = 0; k < d; ++k) {
    double l = e.values[k];
    if (l < -t)
      l += t;
    else if (l < 0.0)
      l = 0.0;
    if (l == 0.0) continue;
    for (std::size_t r = 0; r < d; ++r)
      for (std::size_t c = 0; c < d; ++c) z(r, c) += l * e.vectors(r, k) * std::conj(e.vectors(c, k));
  }
  return input_transpose(z, f.din);
}

}  // namespace

SdpResult sdp_least_negative(const Pdm& r, Direction direction, const SdpOptions& opts,
                             const Thresholds& th) {
  if (!(opts.step > 0.0) || opts.max_iterations < 0)
    throw std::invalid_argument("sdp_least_negative: invalid options");
  const Pdm oriented = direction == Direction::Forward ? r : time_reverse(r);
  const ExtractionFrame f = detail::make_frame(oriented, th);

  SdpResult out;
  ComplexMatrix best = f.rotated_solution;
  double best_obj = transposed_spectrum(f, best).negative_mass;

  if (!f.unique && best_obj > 0.0) {
    ComplexMatrix u = best;
    double last_obj = best_obj;
    int stall = 0;
    for (int it = 1; it <= opts.max_iterations; ++it) {
      const ComplexMatrix x = project_affine(f, u);
      const ComplexMatrix y = prox_negative_part(f, 2.0 * x - u, opts.step);
      const ComplexMatrix diff = y - x;
      u += diff;
      out.iterations = it;

      const double obj = transposed_spectrum(f, x).negative_mass;
      if (obj < best_obj) {
        best_obj = obj;
        best = x;
      }
      const double fixed_point_gap = diff.frobenius_norm();
      if (best_obj == 0.0 || fixed_point_gap <= opts.residual_tol) {
        out.converged = true;
        break;
      }
      // Objective settled to well below tolerance over a long window.
      stall = std::abs(obj - last_obj) <= 1e-3 * opts.objective_tol ? stall + 1 : 0;
      last_obj = obj;
      if (stall >= 1000 && fixed_point_gap <= opts.objective_tol) {
        out.converged = true;
        break;
      }
    }
  } else {
    out.converged = true;
  }

  out.extraction = detail::finish(oriented, f, best);
  out.objective = best_obj;
  return out;
}

}  // namespace pdmcausal
