#include "pdmcausal/channels.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <string>

namespace pdmcausal {

namespace {

constexpr double kStateTol = 1e-10;
constexpr double kChannelTol = 1e-9;

std::size_t product(const std::vector<std::size_t>& f) {
  return std::accumulate(f.begin(), f.end(), std::size_t{1}, std::multiplies<>());
}

std::vector<std::string> default_labels(std::size_t n) {
  std::vector<std::string> out;
  for (std::size_t k = 0; k < n; ++k) out.emplace_back(1, static_cast<char>('A' + k));
  return out;
}

double parse_double(std::string_view s, std::string_view what) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw std::invalid_argument("bad " + std::string(what) + " '" + std::string(s) + "'");
  return v;
}

}  // namespace

QuantumState QuantumState::from_matrix(ComplexMatrix m, std::vector<std::string> labels) {
  if (!m.is_hermitian(kStateTol)) throw std::invalid_argument("state is not Hermitian");
  if (std::abs(m.trace() - 1.0) > kStateTol) throw std::invalid_argument("state trace is not 1");
  if (min_eigenvalue(m) < -kStateTol) throw std::invalid_argument("state is not positive semidefinite");
  if (labels.empty()) labels = default_labels(m.num_factors());
  if (labels.size() != m.num_factors())
    throw std::invalid_argument("state needs one label per tensor factor");
  return QuantumState{std::move(m), std::move(labels)};
}

QuantumState QuantumState::pure(std::span<const Complex> psi, std::vector<std::size_t> factors) {
  if (product(factors) != psi.size()) throw std::invalid_argument("pure state: factor product mismatch");
  return from_matrix(ComplexMatrix::outer(psi).with_factors(std::move(factors)));
}

QuantumState QuantumState::maximally_mixed(std::vector<std::size_t> factors) {
  ComplexMatrix m = ComplexMatrix::identity(std::move(factors));
  m *= 1.0 / static_cast<double>(m.dim());
  return from_matrix(std::move(m));
}

QuantumState QuantumState::basis(std::size_t index, std::vector<std::size_t> factors) {
  ComplexMatrix m(std::move(factors));
  if (index >= m.dim()) throw std::invalid_argument("basis state index out of range");
  m(index, index) = 1.0;
  return from_matrix(std::move(m));
}

QuantumState kron(const QuantumState& a, const QuantumState& b) {
  std::vector<std::string> labels = a.labels;
  labels.insert(labels.end(), b.labels.begin(), b.labels.end());
  std::vector<std::string> sorted = labels;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) labels = default_labels(labels.size());
  return QuantumState{kron(a.mat, b.mat), std::move(labels)};
}

QuantumChannel QuantumChannel::kraus(std::vector<ComplexMatrix> ops, std::vector<std::size_t> factors) {
  if (ops.empty()) throw std::invalid_argument("Kraus channel needs at least one operator");
  const std::size_t d = product(factors);
  ComplexMatrix sum(d);
  for (auto& k : ops) {
    if (k.dim() != d) throw std::invalid_argument("Kraus operator dimension mismatch");
    k = k.with_factors(factors);
    sum += k.adjoint() * k;
  }
  if (max_abs_diff(sum, ComplexMatrix::identity(d)) > kChannelTol)
    throw std::invalid_argument("Kraus operators are not trace preserving");
  return QuantumChannel(KrausRep{std::move(ops)}, factors, factors);
}

QuantumChannel QuantumChannel::unitary(ComplexMatrix u) {
  if (max_abs_diff(u.adjoint() * u, ComplexMatrix::identity(u.dim())) > kChannelTol)
    throw std::invalid_argument("matrix is not unitary");
  auto factors = u.factors();
  return QuantumChannel(UnitaryRep{std::move(u)}, factors, factors);
}

QuantumChannel QuantumChannel::choi(ComplexMatrix m, std::vector<std::size_t> in_factors,
                                    std::vector<std::size_t> out_factors) {
  const std::size_t din = product(in_factors);
  const std::size_t dout = product(out_factors);
  if (m.dim() != din * dout) throw std::invalid_argument("Choi matrix dimension mismatch");
  std::vector<std::size_t> all = in_factors;
  all.insert(all.end(), out_factors.begin(), out_factors.end());
  m = m.with_factors(all);
  if (!m.is_hermitian(kChannelTol)) throw std::invalid_argument("Choi matrix is not Hermitian");
  const ComplexMatrix grouped = m.with_factors({din, dout});
  if (max_abs_diff(partial_trace(grouped, {0}), ComplexMatrix::identity(din)) > kChannelTol)
    throw std::invalid_argument("Choi matrix is not trace preserving");
  if (min_eigenvalue(input_transpose(grouped)) < -kChannelTol)
    throw std::invalid_argument("Choi matrix is not completely positive");
  return QuantumChannel(ChoiRep{std::move(m)}, std::move(in_factors), std::move(out_factors));
}

std::size_t QuantumChannel::dim_in() const { return product(in_factors_); }
std::size_t QuantumChannel::dim_out() const { return product(out_factors_); }

ComplexMatrix apply(const QuantumChannel& ch, const ComplexMatrix& x) {
  if (x.dim() != ch.dim_in()) throw std::invalid_argument("apply: input dimension mismatch");
  return std::visit(
      [&](const auto& rep) -> ComplexMatrix {
        using T = std::decay_t<decltype(rep)>;
        if constexpr (std::is_same_v<T, UnitaryRep>) {
          return (rep.u * x * rep.u.adjoint()).with_factors(ch.out_factors());
        } else if constexpr (std::is_same_v<T, KrausRep>) {
          ComplexMatrix out(ch.out_factors());
          for (const auto& k : rep.ops) out += k * x * k.adjoint();
          return out;
        } else {
          // Tr_in[M (x ⊗ I)]: out(o, o') = Σ_ab M[(a,o),(b,o')] x(b,a).
          const std::size_t din = ch.dim_in(), dout = ch.dim_out();
          ComplexMatrix out(ch.out_factors());
          for (std::size_t a = 0; a < din; ++a)
            for (std::size_t b = 0; b < din; ++b) {
              const Complex xba = x(b, a);
              if (xba == Complex{}) continue;
              for (std::size_t o = 0; o < dout; ++o)
                for (std::size_t o2 = 0; o2 < dout; ++o2)
                  out(o, o2) += rep.m(a * dout + o, b * dout + o2) * xba;
            }
          return out;
        }
      },
      ch.rep());
}

QuantumState apply(const QuantumChannel& ch, const QuantumState& s) {
  ComplexMatrix out = apply(ch, s.mat);
  std::vector<std::string> labels =
      out.num_factors() == s.labels.size() ? s.labels : std::vector<std::string>{};
  return QuantumState::from_matrix(std::move(out), std::move(labels));
}

namespace {

std::vector<ComplexMatrix> kraus_ops(const QuantumChannel& ch) {
  if (const auto* k = std::get_if<KrausRep>(&ch.rep())) return k->ops;
  if (const auto* u = std::get_if<UnitaryRep>(&ch.rep())) return {u->u};
  return kraus_of(ch);
}

}  // namespace

ComplexMatrix choi_of(const QuantumChannel& ch) {
  if (const auto* c = std::get_if<ChoiRep>(&ch.rep())) return c->m;
  std::vector<std::size_t> factors = ch.in_factors();
  factors.insert(factors.end(), ch.out_factors().begin(), ch.out_factors().end());
  ComplexMatrix m(factors);
  const std::size_t din = ch.dim_in(), dout = ch.dim_out();
  // M[(a,o),(b,o')] = Σ_k K(o,b) conj(K(o',a)).
  for (const auto& k : kraus_ops(ch))
    for (std::size_t a = 0; a < din; ++a)
      for (std::size_t o = 0; o < dout; ++o)
        for (std::size_t b = 0; b < din; ++b)
          for (std::size_t o2 = 0; o2 < dout; ++o2)
            m(a * dout + o, b * dout + o2) += k(o, b) * std::conj(k(o2, a));
  return m;
}

std::vector<ComplexMatrix> kraus_of(const QuantumChannel& ch) {
  if (!std::holds_alternative<ChoiRep>(ch.rep())) return kraus_ops(ch);
  const std::size_t din = ch.dim_in(), dout = ch.dim_out();
  if (din != dout) throw std::invalid_argument("kraus_of: only square channels are supported");
  // Standard Choi J[(i,o),(j,o')] = Σ_k K(o,i) conj(K(o',j)).
  const auto e = eig_hermitian(input_transpose(std::get<ChoiRep>(ch.rep()).m, din));
  std::vector<ComplexMatrix> ops;
  for (std::size_t k = 0; k < e.values.size(); ++k) {
    if (e.values[k] < 1e-12) continue;
    const double w = std::sqrt(e.values[k]);
    ComplexMatrix op(ch.out_factors());
    for (std::size_t i = 0; i < din; ++i)
      for (std::size_t o = 0; o < dout; ++o) op(o, i) = w * e.vectors(i * dout + o, k);
    ops.push_back(std::move(op));
  }
  return ops;
}

ComplexMatrix input_transpose(const ComplexMatrix& m, std::size_t in_dim) {
  if (in_dim == 0 || m.dim() % in_dim != 0)
    throw std::invalid_argument("input_transpose: input dimension does not divide matrix dimension");
  const std::size_t t[] = {0};
  return partial_transpose(m.with_factors({in_dim, m.dim() / in_dim}), t).with_factors(m.factors());
}

ComplexMatrix input_transpose(const ComplexMatrix& m) {
  if (m.num_factors() != 2)
    throw std::invalid_argument("input_transpose: expected exactly two tensor factors");
  return input_transpose(m, m.factors()[0]);
}

CpCheck is_cp(const ComplexMatrix& m, double eps, std::size_t in_dim) {
  const double lo = min_eigenvalue(input_transpose(m, in_dim));
  return {lo >= -eps, lo};
}

CpCheck is_cp(const ComplexMatrix& m, double eps) {
  if (m.num_factors() != 2) throw std::invalid_argument("is_cp: expected exactly two tensor factors");
  return is_cp(m, eps, m.factors()[0]);
}

QuantumChannel semicausal(const QuantumChannel& n_ac, const QuantumChannel& m_bc,
                          const QuantumState& rho_c) {
  if (n_ac.in_factors().size() != 2 || m_bc.in_factors().size() != 2)
    throw std::invalid_argument("semicausal: components must be two-factor channels");
  if (n_ac.in_factors() != n_ac.out_factors() || m_bc.in_factors() != m_bc.out_factors())
    throw std::invalid_argument("semicausal: components must preserve their factor dimensions");
  const std::size_t da = n_ac.in_factors()[0];
  const std::size_t dc = n_ac.in_factors()[1];
  const std::size_t db = m_bc.in_factors()[0];
  if (m_bc.in_factors()[1] != dc || rho_c.dim() != dc)
    throw std::invalid_argument("semicausal: ancilla dimensions disagree");

  const std::vector<std::size_t> abc = {da, db, dc};
  const std::size_t ac[] = {0, 2};
  const std::size_t bc[] = {1, 2};
  std::vector<ComplexMatrix> n_ops, m_ops;
  for (const auto& k : kraus_of(n_ac)) n_ops.push_back(embed(k, abc, ac));
  for (const auto& k : kraus_of(m_bc)) m_ops.push_back(embed(k, abc, bc));

  const auto anc = eig_hermitian(rho_c.mat);
  const std::size_t dab = da * db;
  std::vector<ComplexMatrix> ops;
  for (const auto& mk : m_ops)
    for (const auto& nk : n_ops) {
      const ComplexMatrix prod = mk * nk;
      for (std::size_t r = 0; r < dc; ++r) {
        if (anc.values[r] < 1e-12) continue;
        const double w = std::sqrt(anc.values[r]);
        for (std::size_t c_out = 0; c_out < dc; ++c_out) {
          // K = √p (I_AB ⊗ <c_out|) prod (I_AB ⊗ |ψ_r>)
          ComplexMatrix k(std::vector<std::size_t>{da, db});
          for (std::size_t x = 0; x < dab; ++x)
            for (std::size_t y = 0; y < dab; ++y) {
              Complex s{};
              for (std::size_t c = 0; c < dc; ++c) s += prod(x * dc + c_out, y * dc + c) * anc.vectors(c, r);
              k(x, y) = w * s;
            }
          if (k.max_abs() > 1e-14) ops.push_back(std::move(k));
        }
      }
    }
  return QuantumChannel::kraus(std::move(ops), {da, db});
}

ComplexMatrix haar_unitary(std::size_t d, Rng& rng) {
  if (d == 0) throw std::invalid_argument("haar_unitary: dimension must be positive");
  // Ginibre matrix, then Gram–Schmidt on its columns. Gram–Schmidt yields an
  // upper-triangular factor with positive diagonal, which fixes the QR phase
  // ambiguity and makes Q Haar distributed.
  ComplexMatrix q(d);
  for (std::size_t r = 0; r < d; ++r)
    for (std::size_t c = 0; c < d; ++c) q(r, c) = rng.complex_normal();
  for (std::size_t c = 0; c < d; ++c) {
    for (int pass = 0; pass < 2; ++pass)
      for (std::size_t p = 0; p < c; ++p) {
        Complex dot{};
        for (std::size_t r = 0; r < d; ++r) dot += std::conj(q(r, p)) * q(r, c);
        for (std::size_t r = 0; r < d; ++r) q(r, c) -= dot * q(r, p);
      }
    double norm = 0.0;
    for (std::size_t r = 0; r < d; ++r) norm += std::norm(q(r, c));
    norm = std::sqrt(norm);
    for (std::size_t r = 0; r < d; ++r) q(r, c) /= norm;
  }
  return q;
}

ComplexMatrix haar_unitary(std::size_t d, std::uint64_t seed) {
  Rng rng(seed);
  return haar_unitary(d, rng);
}

ComplexVector haar_state(std::size_t d, Rng& rng) {
  ComplexVector v(d);
  double norm = 0.0;
  for (auto& x : v) {
    x = rng.complex_normal();
    norm += std::norm(x);
  }
  norm = std::sqrt(norm);
  for (auto& x : v) x /= norm;
  return v;
}

QuantumChannel identity_channel(std::vector<std::size_t> factors) {
  return QuantumChannel::unitary(ComplexMatrix::identity(std::move(factors)));
}

QuantumChannel swap_channel(std::size_t d) { return QuantumChannel::unitary(swap_operator(d)); }

ComplexMatrix partial_swap_unitary(double theta) {
  ComplexMatrix u = ComplexMatrix::identity(std::vector<std::size_t>{2, 2}) * std::cos(theta);
  u += swap_operator(2) * Complex(0.0, std::sin(theta));
  return u;
}

QuantumChannel partial_swap(double theta) { return QuantumChannel::unitary(partial_swap_unitary(theta)); }

QuantumChannel measure_prepare_z() {
  return QuantumChannel::kraus(
      {ComplexMatrix::from_rows({{1, 0}, {0, 0}}), ComplexMatrix::from_rows({{0, 0}, {0, 1}})}, {2});
}

QuantumChannel completely_depolarizing(std::size_t d) {
  // Kraus |i><j| / √d for all i, j.
  std::vector<ComplexMatrix> ops;
  const double w = 1.0 / std::sqrt(static_cast<double>(d));
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) {
      ComplexMatrix k(d);
      k(i, j) = w;
      ops.push_back(std::move(k));
    }
  return QuantumChannel::kraus(std::move(ops), {d});
}

QuantumChannel named_channel(std::string_view id) {
  const auto colon = id.find(':');
  const std::string_view name = id.substr(0, colon);
  const std::string_view arg = colon == std::string_view::npos ? std::string_view{} : id.substr(colon + 1);
  auto dim_arg = [&](std::size_t fallback) {
    if (arg.empty()) return fallback;
    const double v = parse_double(arg, "dimension");
    if (v < 1 || v != std::floor(v)) throw std::invalid_argument("bad dimension in channel id");
    return static_cast<std::size_t>(v);
  };
  if (name == "identity") return identity_channel({dim_arg(2)});
  if (name == "swap") return swap_channel(dim_arg(2));
  if (name == "measure_prepare_z" && arg.empty()) return measure_prepare_z();
  if (name == "depolarizing") return completely_depolarizing(dim_arg(2));
  if (name == "partial_swap" && !arg.empty()) return partial_swap(parse_double(arg, "angle"));
  throw std::invalid_argument("unknown channel id '" + std::string(id) + "'");
}

}  // namespace pdmcausal
