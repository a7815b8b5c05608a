#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <memory>
#include <ostream>
#include <string>
#include <vector>

#include "rydfrag/basis.hpp"
#include "rydfrag/constraints.hpp"
#include "rydfrag/errors.hpp"
#include "rydfrag/params.hpp"

namespace rydfrag {

// Second-order couplings of the NN-dominated effective model.
struct EffectiveCouplings {
  double j_p = 0.0;         // magnon hopping
  double j_q = 0.0;         // hole hopping
  double u = 0.0;           // NN density-density, V - 4 J_P
  double three_body = 0.0;  // I = J_P - J_Q
  double mu_edge = 0.0;     // Δ + Ω²/2Δ + J_P
  double mu_bulk = 0.0;     // mu_edge + J_P
  InteractionProfile tail;  // V_ij for |i-j| >= 2

  double xi() const { return j_p / j_q; }

  // Site potential for 0-based site i of an L-site chain.
  double mu(int i, int length) const {
    if (length == 1) return mu_edge - j_p;  // no real neighbours
    return (i == 0 || i == length - 1) ? mu_edge : mu_bulk;
  }
};

namespace detail {

inline InteractionProfile tail_of(const InteractionProfile& p) {
  if (p.is_pairwise()) {
    const int n = p.pairwise_sites();
    std::vector<double> m = p.matrix();
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (std::abs(i - j) < 2) m[static_cast<std::size_t>(i * n + j)] = 0.0;
    return InteractionProfile::pairwise(n, std::move(m));
  }
  std::vector<double> r = p.range_couplings();
  if (!r.empty()) r[0] = 0.0;
  return InteractionProfile::by_range(std::move(r));
}

// Σ_{i<j, j-i in [min_d, max_d]} V_ij n_i n_j.
inline double pair_energy(std::uint64_t bits, int length, const InteractionProfile& v, int min_d, int max_d) {
  double e = 0.0;
  for (std::uint64_t b = bits; b; b &= b - 1) {
    const int i = std::countr_zero(b);
    const int hi = std::min(length - 1, i + max_d);
    for (int j = i + std::max(1, min_d); j <= hi; ++j)
      if ((bits >> j) & 1u) e += v(i, j);
  }
  return e;
}

}  // namespace detail

// Closed-form couplings; the NNN-and-beyond part of the interaction is
// carried along as a classical tail.
inline EffectiveCouplings analytic_couplings(const ModelParams& params) {
  params.validate();
  if (!params.perturbative())
    throw InvalidArgument("analytic_couplings: Ω/Δ = " + std::to_string(params.omega / params.delta) +
                          " exceeds the perturbative bound 0.25");
  const double v = params.v();
  EffectiveCouplings c;
  c.j_p = hopping_p(params.omega, params.delta, v);
  c.j_q = hopping_q(params.omega, params.delta, v);
  c.u = v - 4.0 * c.j_p;
  c.three_body = c.j_p - c.j_q;
  c.mu_edge = params.delta + params.omega * params.omega / (2.0 * params.delta) + c.j_p;
  c.mu_bulk = c.mu_edge + c.j_p;
  c.tail = detail::tail_of(params.interaction);
  return c;
}

// H0 = Δ n_R + Σ_{|i-j| <= reach} V_ij n_i n_j.
inline double classical_energy(std::uint64_t bits, int length, const ModelParams& params, int reach) {
  return params.delta * std::popcount(bits) + detail::pair_energy(bits, length, params.interaction, 1, reach);
}

// Floor on |E_a - E_m| below which the dressing expansion is declared broken.
inline double denominator_floor(const ModelParams& p) { return 1e-6 * p.delta; }

// <b|H_eff|a> at second order for one flip-flop a -> b: the sum over the two
// single-flip intermediates of (Ω/2)² · ½[1/(E_a-E_m) + 1/(E_b-E_m)], with
// E from H0 over the full interaction profile.
inline double numeric_sw_amplitude(const SpinConfig& a, const SpinConfig& b, const ModelParams& params) {
  params.validate();
  if (a.length() != b.length()) throw InvalidArgument("numeric_sw_amplitude: site counts differ");
  const std::uint64_t diff = a.bits() ^ b.bits();
  if (std::popcount(diff) != 2 || a.n_up() != b.n_up())
    throw InvalidArgument("numeric_sw_amplitude: configurations must differ by one exchange");
  const int i = std::countr_zero(diff);
  const int j = 63 - std::countl_zero(diff);
  if (j - i > 2) throw InvalidArgument("numeric_sw_amplitude: exchange must span one or two sites");

  const int length = a.length();
  const int reach = length;
  const double ea = classical_energy(a.bits(), length, params, reach);
  const double eb = classical_energy(b.bits(), length, params, reach);
  const std::uint64_t m_down = a.bits() & ~diff;  // both exchanged sites down
  const std::uint64_t m_up = a.bits() | diff;     // both up
  const double floor = denominator_floor(params);
  double sum = 0.0;
  for (std::uint64_t m : {m_down, m_up}) {
    const double em = classical_energy(m, length, params, reach);
    const double da = ea - em, db = eb - em;
    if (std::abs(da) < floor || std::abs(db) < floor)
      throw SolverError("numeric_sw_amplitude: degenerate denominator between " + a.str() + " and " +
                        SpinConfig(m, length).str());
    sum += 0.5 * (1.0 / da + 1.0 / db);
  }
  return 0.25 * params.omega * params.omega * sum;
}

// Diagonal of the second-order effective model: H0 plus the single-flip
// level shifts Σ_k (Ω/2)²/(E_a - E_{a^k}), offset by +LΩ²/(4Δ) so that it
// coincides with the closed-form diagonal for NN interactions.
inline double numeric_sw_diagonal(const SpinConfig& a, const ModelParams& params) {
  const int length = a.length();
  const double floor = denominator_floor(params);
  double e = classical_energy(a.bits(), length, params, length);
  for (int k = 0; k < length; ++k) {
    double field = params.delta;
    for (int j = 0; j < length; ++j)
      if (j != k && a.occ(j)) field += params.interaction(k, j);
    if (std::abs(field) < floor) throw SolverError("numeric_sw_diagonal: degenerate single-flip denominator");
    e += 0.25 * params.omega * params.omega * (2 * a.occ(k) - 1) / field;
  }
  return e + length * params.omega * params.omega / (4.0 * params.delta);
}

// Σ μ_i n_i + U n_NN + I Σ Q_{i-1} σ^z_i Q_{i+1} + Σ_{|i-j|>=2} V_ij n_i n_j.
inline double analytic_diagonal(const SpinConfig& a, const EffectiveCouplings& c) {
  const int length = a.length();
  double e = 0.0;
  for (int i = 0; i < length; ++i) {
    const int n = a.occ(i);
    e += c.mu(i, length) * n;
    e += c.u * n * a.occ(i + 1);
    e += c.three_body * a.occ(i - 1) * a.occ(i + 1) * (2 * n - 1);
  }
  return e + detail::pair_energy(a.bits(), length, c.tail, 2, length);
}

// Hopping amplitude of an NN flip-flop from its flanks (sites i-1, i+2).
inline double analytic_hopping(const SpinConfig& a, const Bond& bond, const EffectiveCouplings& c) {
  if (bond.span != Span::Nn) throw InvalidArgument("analytic_hopping: closed form covers NN exchange only");
  const int l = a.occ(bond.site - 1), r = a.occ(bond.site + 2);
  if (l == 0 && r == 0) return c.j_p;
  if (l == 1 && r == 1) return c.j_q;
  return 0.5 * (c.j_p + c.j_q);
}

// Real symmetric sparse matrix over a product basis (or its inversion-even
// combinations). Both triangles are stored.
class HamiltonianMatrix {
 public:
  using Sparse = Eigen::SparseMatrix<double, Eigen::ColMajor, std::int64_t>;
  using Triplet = Eigen::Triplet<double, std::int64_t>;

  HamiltonianMatrix() = default;

  // `upper` lists each off-diagonal pair once, in either triangle; the
  // mirror entry is added here. Repeated coordinates are summed.
  HamiltonianMatrix(std::shared_ptr<const Basis> basis, std::size_t dimension,
                    const std::vector<Triplet>& upper)
      : basis_(std::move(basis)) {
    std::vector<Triplet> all;
    all.reserve(upper.size() * 2);
    for (const auto& t : upper) {
      if (t.value() == 0.0) continue;
      if (t.row() < 0 || t.col() < 0 || static_cast<std::size_t>(t.row()) >= dimension ||
          static_cast<std::size_t>(t.col()) >= dimension)
        throw InvalidArgument("HamiltonianMatrix: entry outside dimension");
      all.push_back(t);
      if (t.row() != t.col()) all.emplace_back(t.col(), t.row(), t.value());
    }
    m_.resize(static_cast<std::int64_t>(dimension), static_cast<std::int64_t>(dimension));
    m_.setFromTriplets(all.begin(), all.end());
    m_.prune(0.0);
    m_.makeCompressed();
  }

  std::size_t dimension() const { return static_cast<std::size_t>(m_.rows()); }
  const Sparse& sparse() const { return m_; }
  Eigen::MatrixXd dense() const { return Eigen::MatrixXd(m_); }
  double coeff(std::size_t r, std::size_t c) const {
    return m_.coeff(static_cast<std::int64_t>(r), static_cast<std::int64_t>(c));
  }

  // Product basis the rows refer to; null for symmetrised matrices.
  const std::shared_ptr<const Basis>& basis() const { return basis_; }
  const std::shared_ptr<const SymmetricBasis>& symmetric_basis() const { return symmetric_; }
  void set_symmetric_basis(std::shared_ptr<const SymmetricBasis> s) { symmetric_ = std::move(s); }

  bool is_symmetric(double tol = 0.0) const {
    Sparse t = m_.transpose();
    Sparse d = m_ - t;
    for (std::int64_t k = 0; k < d.outerSize(); ++k)
      for (Sparse::InnerIterator it(d, k); it; ++it)
        if (std::abs(it.value()) > tol) return false;
    return true;
  }

  // Upper triangle (row <= col) in column-major order.
  struct Entry {
    std::size_t row, col;
    double value;
  };
  std::vector<Entry> upper_entries() const {
    std::vector<Entry> out;
    for (std::int64_t k = 0; k < m_.outerSize(); ++k)
      for (Sparse::InnerIterator it(m_, k); it; ++it)
        if (it.row() <= it.col())
          out.push_back({static_cast<std::size_t>(it.row()), static_cast<std::size_t>(it.col()), it.value()});
    return out;
  }

  // Coordinate text: a header line "dimension nnz", then "row col value"
  // for the upper triangle, 0-based, values with 17 significant digits.
  void write_coordinate(std::ostream& os) const {
    auto entries = upper_entries();
    os << dimension() << ' ' << entries.size() << '\n';
    char buf[96];
    for (const auto& e : entries) {
      std::snprintf(buf, sizeof buf, "%zu %zu %.17g\n", e.row, e.col, e.value);
      os << buf;
    }
  }

  Eigen::VectorXd apply(const Eigen::VectorXd& x) const { return m_ * x; }

 private:
  Sparse m_;
  std::shared_ptr<const Basis> basis_;
  std::shared_ptr<const SymmetricBasis> symmetric_;
};

enum class CouplingMode { Analytic, NumericSW };

struct EffectiveOptions {
  CouplingMode mode = CouplingMode::Analytic;
  // Interaction range entering the SW denominators in numeric mode; longer
  // couplings are added as a classical diagonal tail. A negative value picks
  // 1 for the NN-type regimes and the full profile for the strong-NNN ones.
  int sw_reach = -1;
};

inline int resolved_sw_reach(const ModelParams& params, const EffectiveOptions& opt, int length) {
  if (opt.sw_reach >= 1) return opt.sw_reach;
  return move_class(params.regime) == Regime::NnOnly ? 1 : length;
}

// Effective Hamiltonian on a Krylov fragment (or any move-closed basis with
// its edge list).
inline HamiltonianMatrix build_effective_hamiltonian(const KrylovFragment& fragment, const ModelParams& params,
                                                     const EffectiveOptions& opt = {}) {
  params.validate();
  if (move_class(fragment.regime) != move_class(params.regime))
    throw InvalidArgument(std::string("build_effective_hamiltonian: fragment regime '") +
                          std::string(to_string(fragment.regime)) + "' does not match model regime '" +
                          std::string(to_string(params.regime)) + "'");
  const int length = fragment.sites();
  auto basis = std::make_shared<const Basis>(fragment.basis);
  std::vector<HamiltonianMatrix::Triplet> t;
  t.reserve(fragment.dimension() + fragment.edges.size());

  if (opt.mode == CouplingMode::Analytic) {
    if (move_class(params.regime) != Regime::NnOnly)
      throw InvalidArgument("build_effective_hamiltonian: closed-form couplings cover the NN-type regimes only; "
                            "use numeric SW for strong NNN interactions");
    const EffectiveCouplings c = analytic_couplings(params);
    for (std::size_t k = 0; k < fragment.dimension(); ++k)
      t.emplace_back(static_cast<std::int64_t>(k), static_cast<std::int64_t>(k),
                     analytic_diagonal(fragment.basis.config(k), c));
    for (const auto& e : fragment.edges)
      t.emplace_back(e.a, e.b, analytic_hopping(fragment.basis.config(e.a), e.bond, c));
  } else {
    if (!params.perturbative())
      throw InvalidArgument("build_effective_hamiltonian: Ω/Δ exceeds the perturbative bound 0.25");
    const int reach = resolved_sw_reach(params, opt, length);
    ModelParams sw = params;
    sw.interaction = params.interaction.truncated(reach);
    for (std::size_t k = 0; k < fragment.dimension(); ++k) {
      const SpinConfig a = fragment.basis.config(k);
      const double d = numeric_sw_diagonal(a, sw) +
                       detail::pair_energy(a.bits(), length, params.interaction, reach + 1, length);
      t.emplace_back(static_cast<std::int64_t>(k), static_cast<std::int64_t>(k), d);
    }
    for (const auto& e : fragment.edges)
      t.emplace_back(e.a, e.b, numeric_sw_amplitude(fragment.basis.config(e.a), fragment.basis.config(e.b), sw));
  }
  return HamiltonianMatrix(std::move(basis), fragment.dimension(), t);
}

// Largest full space build_exact_hamiltonian accepts by default.
inline constexpr int kMaxExactSites = 16;

// Ω/2 Σ σ^x + Δ Σ n + Σ_{|i-j| <= cutoff} V_ij n_i n_j on all 2^L states.
inline HamiltonianMatrix build_exact_hamiltonian(int length, const ModelParams& params, int cutoff = 3,
                                                 int max_sites = kMaxExactSites) {
  if (length < 1) throw InvalidArgument("build_exact_hamiltonian: L must be >= 1");
  if (length > max_sites)
    throw ResourceLimit("build_exact_hamiltonian: 2^" + std::to_string(length) + " exceeds the full-space cap 2^" +
                        std::to_string(max_sites));
  if (!(params.omega >= 0.0) || !(params.delta > 0.0)) throw InvalidArgument("build_exact_hamiltonian: need Ω >= 0, Δ > 0");
  const std::uint64_t dim = std::uint64_t{1} << length;
  std::vector<std::uint64_t> states(dim);
  for (std::uint64_t s = 0; s < dim; ++s) states[s] = s;
  auto basis = std::make_shared<const Basis>(length, std::move(states));
  std::vector<HamiltonianMatrix::Triplet> t;
  t.reserve(dim * static_cast<std::uint64_t>(length + 1));
  for (std::uint64_t s = 0; s < dim; ++s) {
    t.emplace_back(static_cast<std::int64_t>(s), static_cast<std::int64_t>(s),
                   classical_energy(s, length, params, cutoff));
    for (int i = 0; i < length; ++i) {
      const std::uint64_t f = s ^ (std::uint64_t{1} << i);
      if (s < f) t.emplace_back(static_cast<std::int64_t>(s), static_cast<std::int64_t>(f), 0.5 * params.omega);
    }
  }
  return HamiltonianMatrix(std::move(basis), dim, t);
}

// Restriction of H to the inversion-even combinations of its basis.
inline HamiltonianMatrix project_inversion_even(const HamiltonianMatrix& h, const SymmetricBasis& sym) {
  if (!h.basis()) throw InvalidArgument("project_inversion_even: matrix has no product basis");
  const Basis& basis = *h.basis();
  const int length = basis.sites();
  std::vector<std::uint64_t> reps(sym.size());
  for (std::size_t k = 0; k < sym.size(); ++k) reps[k] = sym.states[k].rep;
  auto sym_index = [&](std::uint64_t x) -> std::size_t {
    const std::uint64_t r = std::min(x, SpinConfig::reverse_bits(x, length));
    auto it = std::lower_bound(reps.begin(), reps.end(), r);
    if (it == reps.end() || *it != r) throw InvalidArgument("project_inversion_even: basis mismatch");
    return static_cast<std::size_t>(it - reps.begin());
  };
  std::vector<HamiltonianMatrix::Triplet> t;
  const auto& m = h.sparse();
  for (std::size_t b = 0; b < sym.size(); ++b) {
    const SymmetricState& sb = sym.states[b];
    const std::uint64_t comps[2] = {sb.rep, sb.partner};
    const int ncomp = sb.palindrome() ? 1 : 2;
    for (int c = 0; c < ncomp; ++c) {
      auto col = basis.index_of(comps[c]);
      if (!col) throw InvalidArgument("project_inversion_even: symmetric state outside basis");
      for (HamiltonianMatrix::Sparse::InnerIterator it(m, static_cast<std::int64_t>(*col)); it; ++it) {
        const std::size_t a = sym_index(basis.state(static_cast<std::size_t>(it.row())));
        if (a > b) continue;
        t.emplace_back(static_cast<std::int64_t>(a), static_cast<std::int64_t>(b),
                       sym.states[a].weight() * sb.weight() * it.value());
      }
    }
  }
  HamiltonianMatrix out(nullptr, sym.size(), t);
  out.set_symmetric_basis(std::make_shared<const SymmetricBasis>(sym));
  return out;
}

}  // namespace rydfrag
