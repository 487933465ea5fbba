#pragma once

// Test-side generators and brute-force reference computations. The oracles
// here deliberately avoid the library's structured kernels.

#include <cmath>
#include <vector>

#include "pdmcausal/channels.hpp"
#include "pdmcausal/pdm.hpp"
#include "pdmcausal/rng.hpp"
#include "pdmcausal/tensor.hpp"

namespace testsupport {

using namespace pdmcausal;

inline ComplexMatrix random_matrix(Rng& rng, std::size_t d) {
  ComplexMatrix m(d);
  for (std::size_t r = 0; r < d; ++r)
    for (std::size_t c = 0; c < d; ++c) m(r, c) = rng.complex_normal();
  return m;
}

inline ComplexMatrix random_hermitian(Rng& rng, std::size_t d) { return random_matrix(rng, d).hermitian_part(); }

/// Wishart-type density matrix of the given rank.
inline QuantumState random_state(Rng& rng, std::vector<std::size_t> factors, std::size_t rank = 0) {
  std::size_t d = 1;
  for (auto f : factors) d *= f;
  if (rank == 0) rank = d;
  ComplexMatrix m(d);
  for (std::size_t k = 0; k < rank; ++k) {
    ComplexVector v(d);
    for (auto& x : v) x = rng.complex_normal();
    m += ComplexMatrix::outer(v);
  }
  m *= 1.0 / m.trace().real();
  return QuantumState::from_matrix(m.with_factors(std::move(factors)));
}

/// Random channel with `num_kraus` operators from a Haar isometry.
inline QuantumChannel random_channel(Rng& rng, std::vector<std::size_t> factors, std::size_t num_kraus) {
  std::size_t d = 1;
  for (auto f : factors) d *= f;
  const ComplexMatrix u = haar_unitary(d * num_kraus, rng);
  std::vector<ComplexMatrix> ops;
  for (std::size_t k = 0; k < num_kraus; ++k) {
    ComplexMatrix op(d);
    for (std::size_t r = 0; r < d; ++r)
      for (std::size_t c = 0; c < d; ++c) op(r, c) = u(k * d + r, c);
    ops.push_back(op);
  }
  return QuantumChannel::kraus(std::move(ops), std::move(factors));
}

/// Entry-by-entry Kronecker product.
inline ComplexMatrix naive_kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  const std::size_t da = a.dim(), db = b.dim();
  ComplexMatrix out(da * db);
  for (std::size_t i = 0; i < da; ++i)
    for (std::size_t j = 0; j < da; ++j)
      for (std::size_t k = 0; k < db; ++k)
        for (std::size_t l = 0; l < db; ++l) out(i * db + k, j * db + l) = a(i, j) * b(k, l);
  return out;
}

/// Tr over the second of two factors of sizes (d0, d1), or the first.
inline ComplexMatrix naive_trace_out(const ComplexMatrix& m, std::size_t d0, std::size_t d1, bool keep_first) {
  ComplexMatrix out(keep_first ? d0 : d1);
  for (std::size_t a = 0; a < d0; ++a)
    for (std::size_t b = 0; b < d0; ++b)
      for (std::size_t x = 0; x < d1; ++x)
        for (std::size_t y = 0; y < d1; ++y) {
          const Complex v = m(a * d1 + x, b * d1 + y);
          if (keep_first && x == y) out(a, b) += v;
          if (!keep_first && a == b) out(x, y) += v;
        }
  return out;
}

inline ComplexMatrix naive_apply(const std::vector<ComplexMatrix>& kraus, const ComplexMatrix& x) {
  ComplexMatrix out(x.dim());
  for (const auto& k : kraus) out += k * x * k.adjoint();
  return out;
}

/// n-qubit Pauli σ_i by repeated Kronecker products, qubit 0 leftmost.
inline ComplexMatrix pauli_by_index(std::size_t index, std::size_t n) {
  ComplexMatrix m = ComplexMatrix::identity(1);
  for (std::size_t q = 0; q < n; ++q) {
    const auto digit = static_cast<std::uint8_t>((index >> (2 * (n - 1 - q))) & 3U);
    m = naive_kron(m, single_pauli(digit));
  }
  return m;
}

/// Definitional PDM for one channel (two times), Kraus-propagated:
/// R = 4⁻ⁿ Σ_ij ⟨σ_i, σ_j⟩ σ_i ⊗ σ_j with
/// ⟨σ_i, σ_j⟩ = Tr[σ_j 𝓜(P₊ρP₊)] − Tr[σ_j 𝓜(P₋ρP₋)].
inline ComplexMatrix brute_force_pdm(const ComplexMatrix& rho, const std::vector<ComplexMatrix>& kraus,
                                     std::size_t n) {
  const std::size_t d = rho.dim(), count = d * d;
  const ComplexMatrix id = ComplexMatrix::identity(d);
  ComplexMatrix r(d * d);
  for (std::size_t i = 0; i < count; ++i) {
    const ComplexMatrix si = pauli_by_index(i, n);
    ComplexMatrix signed_post(d);
    if (i == 0) {
      signed_post = rho;
    } else {
      const ComplexMatrix pp = 0.5 * (id + si), pm = 0.5 * (id - si);
      signed_post = pp * rho * pp - pm * rho * pm;
    }
    const ComplexMatrix out = naive_apply(kraus, signed_post);
    for (std::size_t j = 0; j < count; ++j) {
      const ComplexMatrix sj = pauli_by_index(j, n);
      const Complex corr = (sj * out).trace();
      if (std::abs(corr) < 1e-15) continue;
      r += (corr / static_cast<double>(count)) * naive_kron(si, sj);
    }
  }
  return r;
}

inline ComplexMatrix plain(const ComplexMatrix& m) { return m.with_factors({m.dim()}); }

inline double diff(const ComplexMatrix& a, const ComplexMatrix& b) { return max_abs_diff(plain(a), plain(b)); }

}  // namespace testsupport
