#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <complex>
#include <cstdint>
#include <memory>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "rydfrag/basis.hpp"
#include "rydfrag/errors.hpp"
#include "rydfrag/model.hpp"
#include "rydfrag/spectral.hpp"
#include "rydfrag/spin_config.hpp"

namespace rydfrag {

using cplx = std::complex<double>;

// Diagonal of the imbalance operator over `basis` for the pattern `initial`:
// I = Σ_{up(0)} σ^z_i/(2 N_up) - Σ_{down(0)} σ^z_i/(2 N_down).
inline std::vector<double> imbalance_operator(const Basis& basis, const SpinConfig& initial) {
  if (initial.length() != basis.sites()) throw InvalidArgument("imbalance: initial state and basis differ in L");
  const int n_up = initial.n_up(), n_down = initial.length() - n_up;
  if (n_up == 0 || n_down == 0) throw InvalidArgument("imbalance: initial state needs both up and down spins");
  const std::uint64_t up = initial.bits();
  const std::uint64_t down = ~up & detail::site_mask(initial.length());
  std::vector<double> out(basis.size());
  for (std::size_t k = 0; k < basis.size(); ++k) {
    const std::uint64_t s = basis.state(k);
    // Σ σ^z over a set = 2·(#up in set) - |set|.
    const double zu = 2.0 * std::popcount(s & up) - n_up;
    const double zd = 2.0 * std::popcount(s & down) - n_down;
    out[k] = zu / (2.0 * n_up) - zd / (2.0 * n_down);
  }
  return out;
}

inline double imbalance_from_densities(std::span<const double> density, const SpinConfig& initial) {
  if (static_cast<int>(density.size()) != initial.length()) throw InvalidArgument("imbalance: density length mismatch");
  const int n_up = initial.n_up(), n_down = initial.length() - n_up;
  if (n_up == 0 || n_down == 0) throw InvalidArgument("imbalance: initial state needs both up and down spins");
  double zu = 0.0, zd = 0.0;
  for (int i = 0; i < initial.length(); ++i) (initial.occ(i) ? zu : zd) += 2.0 * density[static_cast<std::size_t>(i)] - 1.0;
  return zu / (2.0 * n_up) - zd / (2.0 * n_down);
}

template <typename Scalar>
double imbalance(std::span<const Scalar> amps, const Basis& basis, const SpinConfig& initial) {
  if (amps.size() != basis.size()) throw InvalidArgument("imbalance: amplitude count mismatch");
  const auto op = imbalance_operator(basis, initial);
  double m = 0.0;
  for (std::size_t k = 0; k < op.size(); ++k) m += std::norm(amps[k]) * op[k];
  return m;
}

// Pure-state QFI of the imbalance, 4(<I²> - <I>²).
template <typename Scalar>
double quantum_fisher(std::span<const Scalar> amps, const Basis& basis, const SpinConfig& initial) {
  if (amps.size() != basis.size()) throw InvalidArgument("quantum_fisher: amplitude count mismatch");
  const auto op = imbalance_operator(basis, initial);
  double m1 = 0.0, m2 = 0.0;
  for (std::size_t k = 0; k < op.size(); ++k) {
    const double p = std::norm(amps[k]);
    m1 += p * op[k];
    m2 += p * op[k] * op[k];
  }
  return std::max(0.0, 4.0 * (m2 - m1 * m1));
}

// n log-spaced points over [lo, hi].
inline std::vector<double> log_time_grid(double lo, double hi, std::size_t n) {
  if (!(lo > 0.0) || !(hi > lo) || n < 2) throw InvalidArgument("log_time_grid: need 0 < lo < hi and n >= 2");
  std::vector<double> t(n);
  for (std::size_t k = 0; k < n; ++k)
    t[k] = lo * std::pow(hi / lo, static_cast<double>(k) / static_cast<double>(n - 1));
  return t;
}

inline std::vector<double> linear_time_grid(double lo, double hi, std::size_t n) {
  if (!(hi >= lo) || n < 2) throw InvalidArgument("linear_time_grid: need lo <= hi and n >= 2");
  std::vector<double> t(n);
  for (std::size_t k = 0; k < n; ++k) t[k] = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(n - 1);
  return t;
}

struct QuenchOptions {
  double time_unit = 1.0;              // duration (1/Ω) of one unit of the time grid
  std::size_t eig_limit = 5000;        // dense eigendecomposition up to this dimension
  double krylov_tol = 1e-8;            // per-step error bound of the Lanczos propagator
  int krylov_dim = 30;
  bool entropy = true;
};

struct QuenchResult {
  SpinConfig initial;
  double time_unit = 1.0;
  std::vector<double> times;
  Eigen::MatrixXd density;  // times x L
  std::vector<double> imbalance;
  std::vector<double> fisher;
  std::vector<double> entropy;  // empty when disabled
  std::vector<double> norm;
  std::vector<double> energy;   // <H>(t)

  void write_csv(std::ostream& os) const {
    os << "t,I,F_Q,S";
    for (Eigen::Index i = 0; i < density.cols(); ++i) os << ",n_" << (i + 1);
    os << '\n';
    char buf[64];
    auto put = [&](double x) {
      std::snprintf(buf, sizeof buf, "%.12g", x);
      os << buf;
    };
    for (std::size_t k = 0; k < times.size(); ++k) {
      put(times[k]);
      os << ',';
      put(imbalance[k]);
      os << ',';
      put(fisher[k]);
      os << ',';
      if (entropy.empty()) os << "nan";
      else put(entropy[k]);
      for (Eigen::Index i = 0; i < density.cols(); ++i) {
        os << ',';
        put(density(static_cast<Eigen::Index>(k), i));
      }
      os << '\n';
    }
  }
};

// exp(-iHt) on a product basis: spectral decomposition for small matrices,
// Lanczos steps otherwise. Reusable across initial states.
class Propagator {
 public:
  // Keeps a reference to h, so temporaries are refused.
  Propagator(HamiltonianMatrix&&, const QuenchOptions& = {}) = delete;
  explicit Propagator(const HamiltonianMatrix& h, const QuenchOptions& opt = {}) : h_(&h), opt_(opt) {
    if (!h.basis()) throw InvalidArgument("evolve: Hamiltonian carries no product basis");
    if (h.dimension() <= opt.eig_limit) eig_ = diagonalize(h, SpectrumWindow::full(), true);
  }

  bool spectral() const { return eig_.has_vectors(); }
  const HamiltonianMatrix& hamiltonian() const { return *h_; }

  // States at each time (physical units), columns of the returned matrix.
  Eigen::MatrixXcd states(const Eigen::VectorXcd& psi0, std::span<const double> times) const {
    for (std::size_t k = 0; k < times.size(); ++k)
      if (!(times[k] >= 0.0) || (k > 0 && times[k] < times[k - 1]))
        throw InvalidArgument("evolve: times must be non-negative and ascending");
    const Eigen::Index n = psi0.size(), nt = static_cast<Eigen::Index>(times.size());
    Eigen::MatrixXcd out(n, nt);
    if (nt == 0) return out;
    if (spectral()) {
      const Eigen::MatrixXd& v = eig_.vectors;
      const Eigen::VectorXd cr = v.transpose() * psi0.real();
      const Eigen::VectorXd ci = v.transpose() * psi0.imag();
      Eigen::MatrixXd re(n, nt), im(n, nt);
      for (Eigen::Index k = 0; k < nt; ++k) {
        for (Eigen::Index m = 0; m < n; ++m) {
          const double ph = -eig_.energies[m] * times[static_cast<std::size_t>(k)];
          const double c = std::cos(ph), s = std::sin(ph);
          re(m, k) = c * cr[m] - s * ci[m];
          im(m, k) = s * cr[m] + c * ci[m];
        }
      }
      const Eigen::MatrixXd pr = v * re, pi = v * im;
      out.real() = pr;
      out.imag() = pi;
      return out;
    }
    Eigen::VectorXcd psi = psi0;
    double t = 0.0;
    for (Eigen::Index k = 0; k < nt; ++k) {
      advance(psi, times[static_cast<std::size_t>(k)] - t);
      t = times[static_cast<std::size_t>(k)];
      out.col(k) = psi;
    }
    return out;
  }

 private:
  Eigen::VectorXcd apply(const Eigen::VectorXcd& x) const {
    Eigen::VectorXcd y(x.size());
    y.real() = h_->sparse() * x.real();
    y.imag() = h_->sparse() * x.imag();
    return y;
  }

  void advance(Eigen::VectorXcd& psi, double dt) const {
    while (dt > 0.0) {
      const double beta0 = psi.norm();
      const int mmax = std::max(2, std::min<int>(opt_.krylov_dim, static_cast<int>(psi.size())));
      std::vector<Eigen::VectorXcd> q;
      q.reserve(static_cast<std::size_t>(mmax));
      q.push_back(psi / beta0);
      std::vector<double> alpha, beta;
      bool exhausted = false;
      double beta_last = 0.0;
      for (int j = 0; j < mmax; ++j) {
        Eigen::VectorXcd w = apply(q.back());
        alpha.push_back(q.back().dot(w).real());
        // Three-term recurrence with local reorthogonalisation; the step
        // error bound below controls the accuracy.
        w -= alpha.back() * q.back();
        if (j > 0) w -= beta.back() * q[static_cast<std::size_t>(j - 1)];
        for (std::size_t u = q.size() >= 2 ? q.size() - 2 : 0; u < q.size(); ++u) w -= q[u].dot(w) * q[u];
        const double b = w.norm();
        if (b < 1e-13 * (1.0 + std::abs(alpha.back()))) {
          exhausted = true;
          break;
        }
        if (j + 1 == mmax) {
          beta_last = b;
          break;
        }
        beta.push_back(b);
        q.push_back(w / b);
      }
      const int m = static_cast<int>(alpha.size());
      Eigen::MatrixXd tri = Eigen::MatrixXd::Zero(m, m);
      for (int j = 0; j < m; ++j) tri(j, j) = alpha[static_cast<std::size_t>(j)];
      for (int j = 0; j + 1 < m; ++j) tri(j, j + 1) = tri(j + 1, j) = beta[static_cast<std::size_t>(j)];
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(tri);
      auto coeffs = [&](double tau) {
        Eigen::VectorXcd ph(m);
        for (int j = 0; j < m; ++j)
          ph[j] = std::exp(cplx(0.0, -es.eigenvalues()[j] * tau)) * es.eigenvectors()(0, j);
        return Eigen::VectorXcd(es.eigenvectors().cast<cplx>() * ph);
      };
      double tau = dt;
      Eigen::VectorXcd y = coeffs(tau);
      if (!exhausted) {
        while (beta_last * std::abs(y[m - 1]) > opt_.krylov_tol) {
          tau *= 0.5;
          if (tau < 1e-14 * (1.0 + dt))
            throw SolverError("evolve: Krylov step failed to reach tolerance " + std::to_string(opt_.krylov_tol));
          y = coeffs(tau);
        }
      }
      Eigen::VectorXcd next = Eigen::VectorXcd::Zero(psi.size());
      for (int j = 0; j < m; ++j) next += y[j] * q[static_cast<std::size_t>(j)];
      psi = beta0 * next;
      dt -= tau;
    }
  }

  const HamiltonianMatrix* h_;
  QuenchOptions opt_;
  EigenData eig_;
};

inline Eigen::VectorXcd product_state(const SpinConfig& initial, const Basis& basis) {
  if (initial.length() != basis.sites()) throw InvalidArgument("evolve: initial state has the wrong length");
  const auto idx = basis.index_of(initial.bits());
  if (!idx) throw InvalidArgument("evolve: initial state " + initial.str() + " is not in the Hamiltonian basis");
  Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(basis.size()));
  psi[static_cast<Eigen::Index>(*idx)] = 1.0;
  return psi;
}

inline QuenchResult evolve(const SpinConfig& initial, const Propagator& prop, std::span<const double> times,
                           const QuenchOptions& opt = {}) {
  const HamiltonianMatrix& h = prop.hamiltonian();
  const Basis& basis = *h.basis();
  const Eigen::VectorXcd psi0 = product_state(initial, basis);
  std::vector<double> phys(times.begin(), times.end());
  for (double& t : phys) t *= opt.time_unit;
  const Eigen::MatrixXcd psi = prop.states(psi0, phys);

  const int length = basis.sites();
  const bool mixed = initial.n_up() > 0 && initial.n_up() < length;
  const std::vector<double> op = mixed ? imbalance_operator(basis, initial) : std::vector<double>{};
  QuenchResult r;
  r.initial = initial;
  r.time_unit = opt.time_unit;
  r.times.assign(times.begin(), times.end());
  const std::size_t nt = times.size();
  r.density = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(nt), length);
  r.imbalance.assign(nt, std::nan(""));
  r.fisher.assign(nt, std::nan(""));
  r.norm.resize(nt);
  r.energy.resize(nt);
  if (opt.entropy) r.entropy.resize(nt);
  for (std::size_t k = 0; k < nt; ++k) {
    const Eigen::VectorXcd col = psi.col(static_cast<Eigen::Index>(k));
    double norm = 0.0, m1 = 0.0, m2 = 0.0;
    for (std::size_t b = 0; b < basis.size(); ++b) {
      const double p = std::norm(col[static_cast<Eigen::Index>(b)]);
      norm += p;
      for (std::uint64_t s = basis.state(b); s; s &= s - 1) r.density(static_cast<Eigen::Index>(k), std::countr_zero(s)) += p;
      if (mixed) {
        m1 += p * op[b];
        m2 += p * op[b] * op[b];
      }
    }
    r.norm[k] = std::sqrt(norm);
    if (mixed) {
      r.imbalance[k] = m1;
      r.fisher[k] = std::max(0.0, 4.0 * (m2 - m1 * m1));
    }
    Eigen::VectorXcd hpsi(col.size());
    hpsi.real() = h.sparse() * col.real();
    hpsi.imag() = h.sparse() * col.imag();
    r.energy[k] = col.dot(hpsi).real();
    if (opt.entropy) {
      const Eigen::VectorXcd unit = col / r.norm[k];
      r.entropy[k] = eigenstate_entropy<cplx>(std::span<const cplx>(unit.data(), basis.size()), basis, length / 2);
    }
  }
  return r;
}

inline QuenchResult evolve(const SpinConfig& initial, const HamiltonianMatrix& h, std::span<const double> times,
                           const QuenchOptions& opt = {}) {
  const Propagator prop(h, opt);
  return evolve(initial, prop, times, opt);
}

// Mean of a diagonal observable over the N eigenstates closest in energy to
// <init|H|init>.
inline double eth_prediction(const HamiltonianMatrix& h, const EigenData& eig, const SpinConfig& initial,
                             std::span<const double> observable, std::size_t n) {
  if (!h.basis()) throw InvalidArgument("eth_prediction: Hamiltonian carries no product basis");
  const Basis& basis = *h.basis();
  if (observable.size() != basis.size()) throw InvalidArgument("eth_prediction: observable size mismatch");
  if (!eig.has_vectors() || eig.size() != basis.size())
    throw InvalidArgument("eth_prediction: needs the full eigendecomposition");
  if (n == 0 || n > basis.size()) throw InvalidArgument("eth_prediction: N must lie in [1, dimension]");
  const auto idx = basis.index_of(initial.bits());
  if (!idx || initial.length() != basis.sites())
    throw InvalidArgument("eth_prediction: initial state not in the Hamiltonian basis");
  const double e0 = h.coeff(*idx, *idx);
  std::vector<std::size_t> order(eig.size());
  for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::abs(eig.energies[static_cast<Eigen::Index>(a)] - e0) <
           std::abs(eig.energies[static_cast<Eigen::Index>(b)] - e0);
  });
  double sum = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const auto col = eig.vectors.col(static_cast<Eigen::Index>(order[k]));
    double o = 0.0;
    for (std::size_t b = 0; b < basis.size(); ++b) o += col[static_cast<Eigen::Index>(b)] * col[static_cast<Eigen::Index>(b)] * observable[b];
    sum += o;
  }
  return sum / static_cast<double>(n);
}

inline double eth_prediction(const HamiltonianMatrix& h, const SpinConfig& initial, std::span<const double> observable,
                             std::size_t n) {
  return eth_prediction(h, diagonalize(h, SpectrumWindow::full(), true), initial, observable, n);
}

// Average of y over the samples with t in [lo, hi] (trapezoidal in t).
inline double time_average(std::span<const double> t, std::span<const double> y, double lo, double hi) {
  if (t.size() != y.size()) throw InvalidArgument("time_average: size mismatch");
  double area = 0.0, span = 0.0;
  for (std::size_t k = 0; k + 1 < t.size(); ++k) {
    const double a = std::max(t[k], lo), b = std::min(t[k + 1], hi);
    if (b <= a) continue;
    const double slope = (y[k + 1] - y[k]) / (t[k + 1] - t[k]);
    const double ya = y[k] + slope * (a - t[k]), yb = y[k] + slope * (b - t[k]);
    area += 0.5 * (ya + yb) * (b - a);
    span += b - a;
  }
  if (span <= 0.0) throw InvalidArgument("time_average: window contains no samples");
  return area / span;
}

}  // namespace rydfrag
