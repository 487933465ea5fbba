#include "pdmcausal/tensor.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <string>

namespace pdmcausal {

namespace {

std::size_t product(const std::vector<std::size_t>& f) {
  return std::accumulate(f.begin(), f.end(), std::size_t{1}, std::multiplies<>());
}

std::vector<std::size_t> strides_of(const std::vector<std::size_t>& factors) {
  std::vector<std::size_t> s(factors.size(), 1);
  for (std::size_t k = factors.size(); k-- > 1;) s[k - 1] = s[k] * factors[k];
  return s;
}

// Flat offsets contributed by the listed factors, enumerated row-major over
// the listed order (first listed factor slowest).
std::vector<std::size_t> subset_offsets(const std::vector<std::size_t>& factors,
                                        std::span<const std::size_t> subset) {
  const auto strides = strides_of(factors);
  std::vector<std::size_t> out{0};
  for (std::size_t f : subset) {
    std::vector<std::size_t> next;
    next.reserve(out.size() * factors[f]);
    for (std::size_t base : out)
      for (std::size_t d = 0; d < factors[f]; ++d) next.push_back(base + d * strides[f]);
    out = std::move(next);
  }
  return out;
}

std::vector<std::size_t> complement(std::size_t n, std::span<const std::size_t> subset) {
  std::vector<bool> in(n, false);
  for (std::size_t s : subset) {
    if (s >= n) throw std::invalid_argument("factor index " + std::to_string(s) + " out of range");
    if (in[s]) throw std::invalid_argument("duplicate factor index " + std::to_string(s));
    in[s] = true;
  }
  std::vector<std::size_t> rest;
  for (std::size_t k = 0; k < n; ++k)
    if (!in[k]) rest.push_back(k);
  return rest;
}

}  // namespace

ComplexMatrix::ComplexMatrix(std::size_t dim) : ComplexMatrix(std::vector<std::size_t>{dim}) {}

ComplexMatrix::ComplexMatrix(std::vector<std::size_t> factors) : factors_(std::move(factors)) {
  if (factors_.empty()) factors_.push_back(1);
  for (std::size_t f : factors_)
    if (f == 0) throw std::invalid_argument("tensor factor dimensions must be positive");
  dim_ = product(factors_);
  data_.assign(dim_ * dim_, Complex{});
}

ComplexMatrix ComplexMatrix::from_rows(std::initializer_list<std::initializer_list<Complex>> rows) {
  ComplexMatrix m(rows.size());
  std::size_t r = 0;
  for (const auto& row : rows) {
    if (row.size() != rows.size()) throw std::invalid_argument("from_rows: matrix must be square");
    std::size_t c = 0;
    for (const Complex& v : row) m(r, c++) = v;
    ++r;
  }
  return m;
}

ComplexMatrix ComplexMatrix::identity(std::size_t dim) {
  return identity(std::vector<std::size_t>{dim});
}

ComplexMatrix ComplexMatrix::identity(std::vector<std::size_t> factors) {
  ComplexMatrix m(std::move(factors));
  for (std::size_t i = 0; i < m.dim(); ++i) m(i, i) = 1.0;
  return m;
}

ComplexMatrix ComplexMatrix::diagonal(std::span<const Complex> diag) {
  ComplexMatrix m(diag.size());
  for (std::size_t i = 0; i < diag.size(); ++i) m(i, i) = diag[i];
  return m;
}

ComplexMatrix ComplexMatrix::outer(std::span<const Complex> v) {
  ComplexMatrix m(v.size());
  for (std::size_t r = 0; r < v.size(); ++r)
    for (std::size_t c = 0; c < v.size(); ++c) m(r, c) = v[r] * std::conj(v[c]);
  return m;
}

ComplexMatrix ComplexMatrix::with_factors(std::vector<std::size_t> factors) const {
  if (product(factors) != dim_)
    throw std::invalid_argument("with_factors: factor product does not match dimension");
  ComplexMatrix m = *this;
  m.factors_ = std::move(factors);
  return m;
}

ComplexMatrix ComplexMatrix::adjoint() const {
  ComplexMatrix m(factors_);
  for (std::size_t r = 0; r < dim_; ++r)
    for (std::size_t c = 0; c < dim_; ++c) m(c, r) = std::conj((*this)(r, c));
  return m;
}

ComplexMatrix ComplexMatrix::transpose() const {
  ComplexMatrix m(factors_);
  for (std::size_t r = 0; r < dim_; ++r)
    for (std::size_t c = 0; c < dim_; ++c) m(c, r) = (*this)(r, c);
  return m;
}

ComplexMatrix ComplexMatrix::conj() const {
  ComplexMatrix m = *this;
  for (auto& v : m.data_) v = std::conj(v);
  return m;
}

Complex ComplexMatrix::trace() const {
  Complex t{};
  for (std::size_t i = 0; i < dim_; ++i) t += (*this)(i, i);
  return t;
}

double ComplexMatrix::max_abs() const {
  double m = 0.0;
  for (const auto& v : data_) m = std::max(m, std::abs(v));
  return m;
}

double ComplexMatrix::frobenius_norm() const {
  double s = 0.0;
  for (const auto& v : data_) s += std::norm(v);
  return std::sqrt(s);
}

bool ComplexMatrix::is_hermitian(double rel_tol) const {
  const double scale = std::max(max_abs(), 1e-300);
  for (std::size_t r = 0; r < dim_; ++r)
    for (std::size_t c = r; c < dim_; ++c)
      if (std::abs((*this)(r, c) - std::conj((*this)(c, r))) > rel_tol * scale) return false;
  return true;
}

ComplexMatrix ComplexMatrix::hermitian_part() const {
  ComplexMatrix m(factors_);
  for (std::size_t r = 0; r < dim_; ++r)
    for (std::size_t c = 0; c < dim_; ++c)
      m(r, c) = 0.5 * ((*this)(r, c) + std::conj((*this)(c, r)));
  return m;
}

ComplexMatrix& ComplexMatrix::operator+=(const ComplexMatrix& o) {
  if (o.dim_ != dim_) throw std::invalid_argument("matrix addition: dimension mismatch");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
  return *this;
}

ComplexMatrix& ComplexMatrix::operator-=(const ComplexMatrix& o) {
  if (o.dim_ != dim_) throw std::invalid_argument("matrix subtraction: dimension mismatch");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
  return *this;
}

ComplexMatrix& ComplexMatrix::operator*=(Complex s) {
  for (auto& v : data_) v *= s;
  return *this;
}

ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.dim_ != b.dim_) throw std::invalid_argument("matrix product: dimension mismatch");
  const std::size_t n = a.dim_;
  ComplexMatrix m(a.factors_);
  for (std::size_t r = 0; r < n; ++r) {
    Complex* out = &m.data_[r * n];
    for (std::size_t k = 0; k < n; ++k) {
      const Complex ark = a.data_[r * n + k];
      if (ark == Complex{}) continue;
      const Complex* brow = &b.data_[k * n];
      for (std::size_t c = 0; c < n; ++c) out[c] += ark * brow[c];
    }
  }
  return m;
}

ComplexVector ComplexMatrix::operator*(std::span<const Complex> v) const {
  if (v.size() != dim_) throw std::invalid_argument("matrix-vector product: dimension mismatch");
  ComplexVector out(dim_);
  for (std::size_t r = 0; r < dim_; ++r) {
    Complex s{};
    for (std::size_t c = 0; c < dim_; ++c) s += (*this)(r, c) * v[c];
    out[r] = s;
  }
  return out;
}

double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("max_abs_diff: dimension mismatch");
  double m = 0.0;
  for (std::size_t i = 0; i < a.data().size(); ++i)
    m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
  return m;
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  std::vector<std::size_t> factors = a.factors();
  factors.insert(factors.end(), b.factors().begin(), b.factors().end());
  ComplexMatrix m(std::move(factors));
  const std::size_t nb = b.dim();
  for (std::size_t ra = 0; ra < a.dim(); ++ra)
    for (std::size_t ca = 0; ca < a.dim(); ++ca) {
      const Complex v = a(ra, ca);
      if (v == Complex{}) continue;
      for (std::size_t rb = 0; rb < nb; ++rb)
        for (std::size_t cb = 0; cb < nb; ++cb) m(ra * nb + rb, ca * nb + cb) = v * b(rb, cb);
    }
  return m;
}

ComplexMatrix partial_trace(const ComplexMatrix& m, std::span<const std::size_t> keep) {
  std::vector<std::size_t> kept(keep.begin(), keep.end());
  const auto traced = complement(m.num_factors(), kept);
  std::sort(kept.begin(), kept.end());

  std::vector<std::size_t> out_factors;
  for (std::size_t k : kept) out_factors.push_back(m.factors()[k]);
  ComplexMatrix out(out_factors.empty() ? std::vector<std::size_t>{1} : out_factors);

  const auto ok = subset_offsets(m.factors(), kept);
  const auto ot = subset_offsets(m.factors(), traced);
  for (std::size_t r = 0; r < ok.size(); ++r)
    for (std::size_t c = 0; c < ok.size(); ++c) {
      Complex s{};
      for (std::size_t t : ot) s += m(ok[r] + t, ok[c] + t);
      out(r, c) = s;
    }
  return out;
}

ComplexMatrix partial_trace(const ComplexMatrix& m, std::initializer_list<std::size_t> keep) {
  return partial_trace(m, std::span<const std::size_t>(keep.begin(), keep.size()));
}

ComplexMatrix permute_factors(const ComplexMatrix& m, std::span<const std::size_t> perm) {
  if (perm.size() != m.num_factors() || !complement(m.num_factors(), perm).empty())
    throw std::invalid_argument("permute_factors: not a permutation of the factor indices");
  std::vector<std::size_t> out_factors;
  for (std::size_t p : perm) out_factors.push_back(m.factors()[p]);
  ComplexMatrix out(out_factors);
  const auto off = subset_offsets(m.factors(), perm);
  for (std::size_t r = 0; r < off.size(); ++r)
    for (std::size_t c = 0; c < off.size(); ++c) out(r, c) = m(off[r], off[c]);
  return out;
}

ComplexMatrix partial_transpose(const ComplexMatrix& m, std::span<const std::size_t> factors) {
  const auto rest = complement(m.num_factors(), factors);
  const auto ot = subset_offsets(m.factors(), factors);
  const auto orest = subset_offsets(m.factors(), rest);
  ComplexMatrix out(m.factors());
  for (std::size_t a : orest)
    for (std::size_t b : ot)
      for (std::size_t a2 : orest)
        for (std::size_t b2 : ot) out(a + b, a2 + b2) = m(a + b2, a2 + b);
  return out;
}

ComplexMatrix embed(const ComplexMatrix& op, const std::vector<std::size_t>& factors,
                    std::span<const std::size_t> targets) {
  const auto rest = complement(factors.size(), targets);
  std::size_t target_dim = 1;
  for (std::size_t t : targets) target_dim *= factors[t];
  if (target_dim != op.dim()) throw std::invalid_argument("embed: operator dimension mismatch");
  const auto ot = subset_offsets(factors, targets);
  const auto orest = subset_offsets(factors, rest);
  ComplexMatrix out(factors);
  for (std::size_t a : orest)
    for (std::size_t b = 0; b < ot.size(); ++b)
      for (std::size_t b2 = 0; b2 < ot.size(); ++b2) out(a + ot[b], a + ot[b2]) = op(b, b2);
  return out;
}

HermitianEigen eig_hermitian(const ComplexMatrix& m) {
  if (!m.is_hermitian(1e-10)) throw std::invalid_argument("eig_hermitian: matrix is not Hermitian");
  const std::size_t n = m.dim();
  ComplexMatrix a = m.hermitian_part();
  ComplexMatrix v = ComplexMatrix::identity(n);
  const double scale = a.frobenius_norm();

  for (int sweep = 0; sweep < 100 && scale > 0.0; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += std::norm(a(p, q));
    if (std::sqrt(off) <= 1e-15 * scale) break;

    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const Complex apq = a(p, q);
        const double g = std::abs(apq);
        if (g <= 1e-300) continue;
        const Complex phase = apq / g;
        const double app = a(p, p).real();
        const double aqq = a(q, q).real();
        // Once the coupling is negligible against both diagonals, drop it.
        if (sweep > 3 && std::abs(app) + 1e3 * g == std::abs(app) &&
            std::abs(aqq) + 1e3 * g == std::abs(aqq)) {
          a(p, q) = a(q, p) = 0.0;
          continue;
        }
        const double theta = (aqq - app) / (2.0 * g);
        double t = 1.0 / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        if (theta < 0.0) t = -t;
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        const Complex pc = std::conj(phase);

        for (std::size_t k = 0; k < n; ++k) {
          const Complex akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * pc * akq;
          a(k, q) = s * akp + c * pc * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const Complex apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * phase * aqk;
          a(q, k) = s * apk + c * phase * aqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const Complex vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - s * pc * vkq;
          v(k, q) = s * vkp + c * pc * vkq;
        }
        a(p, q) = a(q, p) = 0.0;
        a(p, p) = a(p, p).real();
        a(q, q) = a(q, q).real();
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return a(i, i).real() > a(j, j).real(); });
  HermitianEigen out{std::vector<double>(n), ComplexMatrix(n)};
  for (std::size_t k = 0; k < n; ++k) {
    out.values[k] = a(order[k], order[k]).real();
    for (std::size_t r = 0; r < n; ++r) out.vectors(r, k) = v(r, order[k]);
  }
  return out;
}

std::vector<double> eigenvalues_hermitian(const ComplexMatrix& m) { return eig_hermitian(m).values; }

double min_eigenvalue(const ComplexMatrix& m) { return eig_hermitian(m).values.back(); }

namespace {

ComplexMatrix dilation(const ComplexMatrix& m) {
  const std::size_t n = m.dim();
  ComplexMatrix h(2 * n);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) {
      h(r, n + c) = m(r, c);
      h(n + c, r) = std::conj(m(r, c));
    }
  return h;
}

}  // namespace

std::vector<double> singular_values(const ComplexMatrix& m) {
  const auto e = eig_hermitian(dilation(m));
  std::vector<double> s(e.values.begin(), e.values.begin() + static_cast<std::ptrdiff_t>(m.dim()));
  for (double& x : s) x = std::max(x, 0.0);
  return s;
}

double trace_norm(const ComplexMatrix& m) {
  if (m.is_hermitian(1e-10)) {
    double s = 0.0;
    for (double l : eigenvalues_hermitian(m)) s += std::abs(l);
    return s;
  }
  double s = 0.0;
  for (double x : singular_values(m)) s += x;
  return s;
}

ComplexMatrix pseudo_inverse(const ComplexMatrix& m, double rcond) {
  if (!(rcond > 0.0)) throw std::invalid_argument("pseudo_inverse: rcond must be positive");
  const std::size_t n = m.dim();
  ComplexMatrix out(m.factors());
  if (m.is_hermitian(1e-10)) {
    const auto e = eig_hermitian(m);
    double top = 0.0;
    for (double l : e.values) top = std::max(top, std::abs(l));
    for (std::size_t k = 0; k < n; ++k) {
      const double l = e.values[k];
      if (std::abs(l) <= rcond * top || l == 0.0) continue;
      for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < n; ++c)
          out(r, c) += e.vectors(r, k) * std::conj(e.vectors(c, k)) / l;
    }
    return out;
  }
  // Positive eigenpairs of [[0, m], [m†, 0]] are (σ, (u; v)/√2) with m v = σ u.
  const auto e = eig_hermitian(dilation(m));
  const double top = e.values.front();
  for (std::size_t k = 0; k < n; ++k) {
    const double sigma = e.values[k];
    if (sigma <= rcond * top || sigma <= 0.0) continue;
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t c = 0; c < n; ++c)
        out(r, c) += 2.0 * e.vectors(n + r, k) * std::conj(e.vectors(c, k)) / sigma;
  }
  return out;
}

ComplexVector vectorize(const ComplexMatrix& m) {
  return ComplexVector(m.data().begin(), m.data().end());
}

ComplexMatrix unvectorize(std::span<const Complex> v, std::size_t dim) {
  if (v.size() != dim * dim) throw std::invalid_argument("unvectorize: length is not dim^2");
  ComplexMatrix m(dim);
  std::copy(v.begin(), v.end(), m.data().begin());
  return m;
}

ComplexMatrix swap_operator(std::size_t d) {
  ComplexMatrix s(std::vector<std::size_t>{d, d});
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) s(i * d + j, j * d + i) = 1.0;
  return s;
}

PauliString::PauliString(std::vector<std::uint8_t> d) : digits(std::move(d)) {
  for (auto x : digits)
    if (x > 3) throw std::invalid_argument("Pauli digit must be in {0,1,2,3}");
}

PauliString PauliString::from_index(std::size_t index, std::size_t num_qubits) {
  std::vector<std::uint8_t> d(num_qubits);
  for (std::size_t k = num_qubits; k-- > 0;) {
    d[k] = static_cast<std::uint8_t>(index % 4);
    index /= 4;
  }
  if (index != 0) throw std::invalid_argument("Pauli index out of range");
  return PauliString(std::move(d));
}

bool PauliString::is_identity() const {
  return std::all_of(digits.begin(), digits.end(), [](auto d) { return d == 0; });
}

const ComplexMatrix& single_pauli(std::uint8_t k) {
  static const std::array<ComplexMatrix, 4> paulis = {
      ComplexMatrix::from_rows({{1, 0}, {0, 1}}),
      ComplexMatrix::from_rows({{0, 1}, {1, 0}}),
      ComplexMatrix::from_rows({{0, Complex(0, -1)}, {Complex(0, 1), 0}}),
      ComplexMatrix::from_rows({{1, 0}, {0, -1}}),
  };
  if (k > 3) throw std::invalid_argument("Pauli digit must be in {0,1,2,3}");
  return paulis[k];
}

ComplexMatrix pauli_matrix(const PauliString& p) {
  if (p.digits.empty()) return ComplexMatrix::identity(1);
  ComplexMatrix m = single_pauli(p.digits[0]);
  for (std::size_t k = 1; k < p.digits.size(); ++k) m = kron(m, single_pauli(p.digits[k]));
  return m;
}

CoarseProjectors coarse_projectors(const PauliString& p) {
  if (p.is_identity())
    throw std::invalid_argument("coarse_projectors: identity string has no ±1 eigenspaces");
  const ComplexMatrix sigma = pauli_matrix(p);
  const ComplexMatrix id = ComplexMatrix::identity(sigma.factors());
  return {0.5 * (id + sigma), 0.5 * (id - sigma)};
}

std::size_t qubit_count(std::size_t dim) {
  if (dim == 0 || (dim & (dim - 1)) != 0)
    throw std::invalid_argument("dimension " + std::to_string(dim) + " is not a power of two");
  std::size_t n = 0;
  while ((std::size_t{1} << n) < dim) ++n;
  return n;
}

namespace {

// An n-qubit Pauli string is a monomial matrix: row r has its single nonzero
// entry in column r ^ xmask.
struct PauliMonomial {
  std::size_t xmask = 0;
  ComplexVector row_values;
};

PauliMonomial monomial(const PauliString& p) {
  const std::size_t n = p.num_qubits();
  const std::size_t dim = std::size_t{1} << n;
  PauliMonomial out{0, ComplexVector(dim, 1.0)};
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t bit = n - 1 - k;
    const ComplexMatrix& s = single_pauli(p.digits[k]);
    const bool flips = p.digits[k] == 1 || p.digits[k] == 2;
    if (flips) out.xmask |= std::size_t{1} << bit;
    for (std::size_t r = 0; r < dim; ++r) {
      const std::size_t b = (r >> bit) & 1U;
      out.row_values[r] *= s(b, flips ? 1 - b : b);
    }
  }
  return out;
}

}  // namespace

ComplexVector pauli_coefficients(const ComplexMatrix& m) {
  const std::size_t n = qubit_count(m.dim());
  const std::size_t count = std::size_t{1} << (2 * n);
  ComplexVector c(count);
  for (std::size_t i = 0; i < count; ++i) {
    const auto mono = monomial(PauliString::from_index(i, n));
    // Tr(m σ) = Σ_r m(r, r^x) σ(r^x, r).
    Complex s{};
    for (std::size_t r = 0; r < m.dim(); ++r) {
      const std::size_t col = r ^ mono.xmask;
      s += m(r, col) * mono.row_values[col];
    }
    c[i] = s;
  }
  return c;
}

ComplexMatrix from_pauli_coefficients(std::span<const Complex> coeffs) {
  std::size_t n = 0;
  while ((std::size_t{1} << (2 * n)) < coeffs.size()) ++n;
  if ((std::size_t{1} << (2 * n)) != coeffs.size())
    throw std::invalid_argument("coefficient count is not a power of four");
  const std::size_t dim = std::size_t{1} << n;
  ComplexMatrix m(std::vector<std::size_t>(n == 0 ? 1 : n, n == 0 ? 1 : 2));
  const double norm = 1.0 / static_cast<double>(dim);
  for (std::size_t i = 0; i < coeffs.size(); ++i) {
    if (coeffs[i] == Complex{}) continue;
    const auto mono = monomial(PauliString::from_index(i, n));
    for (std::size_t r = 0; r < dim; ++r) m(r, r ^ mono.xmask) += norm * coeffs[i] * mono.row_values[r];
  }
  return m;
}

}  // namespace pdmcausal
