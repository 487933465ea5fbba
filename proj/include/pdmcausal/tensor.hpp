#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <vector>

namespace pdmcausal {

using Complex = std::complex<double>;
using ComplexVector = std::vector<Complex>;

/// Raised when a numerical result contradicts the model it was built from
/// (an unsolvable extraction, a failed self-check in a reproduction).
class InconsistencyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Dense square complex matrix with explicit tensor-factor dimensions.
///
/// Entries are stored row-major. The factor list records how the total
/// dimension splits into subsystems; the leftmost factor is the slowest
/// index (qubit 0 / earliest time / party A are leftmost by convention).
class ComplexMatrix {
 public:
  ComplexMatrix() : ComplexMatrix(std::vector<std::size_t>{1}) {}
  explicit ComplexMatrix(std::size_t dim);
  explicit ComplexMatrix(std::vector<std::size_t> factors);

  /// Row-major construction from nested rows; a single factor is assumed.
  static ComplexMatrix from_rows(
      std::initializer_list<std::initializer_list<Complex>> rows);
  static ComplexMatrix identity(std::size_t dim);
  static ComplexMatrix identity(std::vector<std::size_t> factors);
  static ComplexMatrix diagonal(std::span<const Complex> diag);
  /// |v><v| for a (not necessarily normalized) vector.
  static ComplexMatrix outer(std::span<const Complex> v);

  std::size_t dim() const { return dim_; }
  const std::vector<std::size_t>& factors() const { return factors_; }
  std::size_t num_factors() const { return factors_.size(); }

  Complex& operator()(std::size_t r, std::size_t c) { return data_[r * dim_ + c]; }
  const Complex& operator()(std::size_t r, std::size_t c) const {
    return data_[r * dim_ + c];
  }
  std::span<Complex> data() { return data_; }
  std::span<const Complex> data() const { return data_; }

  /// Same entries, new factor labels. Product must equal dim.
  ComplexMatrix with_factors(std::vector<std::size_t> factors) const;

  ComplexMatrix adjoint() const;
  ComplexMatrix transpose() const;
  ComplexMatrix conj() const;
  Complex trace() const;
  /// Largest entry modulus.
  double max_abs() const;
  double frobenius_norm() const;
  bool is_hermitian(double rel_tol = 1e-10) const;
  /// (m + m†)/2, factors preserved.
  ComplexMatrix hermitian_part() const;

  ComplexMatrix& operator+=(const ComplexMatrix& o);
  ComplexMatrix& operator-=(const ComplexMatrix& o);
  ComplexMatrix& operator*=(Complex s);

  friend ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) { return a += b; }
  friend ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b) { return a -= b; }
  friend ComplexMatrix operator*(ComplexMatrix a, Complex s) { return a *= s; }
  friend ComplexMatrix operator*(Complex s, ComplexMatrix a) { return a *= s; }
  friend ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b);
  ComplexVector operator*(std::span<const Complex> v) const;

 private:
  std::size_t dim_ = 1;
  std::vector<std::size_t> factors_;
  ComplexVector data_;
};

/// max |a - b| entrywise. Dimensions must agree.
double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b);

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);

/// Traces out every factor not listed in `keep`. Kept factors retain their
/// original relative order.
ComplexMatrix partial_trace(const ComplexMatrix& m, std::span<const std::size_t> keep);
ComplexMatrix partial_trace(const ComplexMatrix& m, std::initializer_list<std::size_t> keep);

/// Reorders tensor factors: factor k of the result is factor perm[k] of m.
ComplexMatrix permute_factors(const ComplexMatrix& m, std::span<const std::size_t> perm);

/// Transpose restricted to the listed factors.
ComplexMatrix partial_transpose(const ComplexMatrix& m, std::span<const std::size_t> factors);

/// Operator `op` acting on the listed factors of a space with dimensions
/// `factors` (in the listed order), identity elsewhere.
ComplexMatrix embed(const ComplexMatrix& op, const std::vector<std::size_t>& factors,
                    std::span<const std::size_t> targets);

struct HermitianEigen {
  std::vector<double> values;  // descending
  ComplexMatrix vectors;       // columns are eigenvectors
};

/// Cyclic complex Jacobi diagonalization. Throws std::invalid_argument for
/// input that is not Hermitian within 1e-10 relative to its largest entry.
HermitianEigen eig_hermitian(const ComplexMatrix& m);
std::vector<double> eigenvalues_hermitian(const ComplexMatrix& m);
double min_eigenvalue(const ComplexMatrix& m);

/// Singular values in descending order (via the Hermitian dilation).
std::vector<double> singular_values(const ComplexMatrix& m);

/// Tr sqrt(m m†).
double trace_norm(const ComplexMatrix& m);

inline constexpr double kDefaultRcond = 1e-10;
ComplexMatrix pseudo_inverse(const ComplexMatrix& m, double rcond = kDefaultRcond);

/// Row-major stacking: |A>> = sum A_ij |i>|j>, so that
/// vectorize(X F Z) == (X ⊗ Zᵀ) vectorize(F).
ComplexVector vectorize(const ComplexMatrix& m);
ComplexMatrix unvectorize(std::span<const Complex> v, std::size_t dim);

/// Swap of two d-dimensional factors; factors (d, d).
ComplexMatrix swap_operator(std::size_t d);

/// Base-4 word selecting an n-qubit Pauli observable; digit k acts on qubit k.
struct PauliString {
  std::vector<std::uint8_t> digits;

  PauliString() = default;
  explicit PauliString(std::vector<std::uint8_t> d);
  /// Decodes `index` in base 4 with qubit 0 as the most significant digit.
  static PauliString from_index(std::size_t index, std::size_t num_qubits);

  std::size_t num_qubits() const { return digits.size(); }
  bool is_identity() const;
};

const ComplexMatrix& single_pauli(std::uint8_t k);
ComplexMatrix pauli_matrix(const PauliString& p);

struct CoarseProjectors {
  ComplexMatrix plus;   // (I + σ)/2
  ComplexMatrix minus;  // (I - σ)/2
};
CoarseProjectors coarse_projectors(const PauliString& p);

/// c_i = Tr(m σ_i) for all 4ⁿ strings in from_index order.
ComplexVector pauli_coefficients(const ComplexMatrix& m);
/// Inverse of pauli_coefficients: (1/2ⁿ) Σ c_i σ_i.
ComplexMatrix from_pauli_coefficients(std::span<const Complex> coeffs);

/// log2 of a power of two; throws std::invalid_argument otherwise.
std::size_t qubit_count(std::size_t dim);

}  // namespace pdmcausal
