#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <type_traits>
#include <vector>

#include "rydfrag/basis.hpp"
#include "rydfrag/errors.hpp"
#include "rydfrag/linalg.hpp"
#include "rydfrag/model.hpp"

namespace rydfrag {

inline constexpr double kPoissonMeanR = 0.38629436111989061;  // 2 ln 2 - 1
inline constexpr double kGoeMeanR = 0.5307;

// Which eigenpairs to compute: the full spectrum, or the `mid_count` pairs
// whose energies lie closest to (E_min + E_max)/2.
struct SpectrumWindow {
  std::size_t mid_count = 0;
  static SpectrumWindow full() { return {}; }
  static SpectrumWindow middle(std::size_t n) { return {n}; }
  bool is_full() const { return mid_count == 0; }
};

inline constexpr std::size_t kDefaultMidCount = 50;
inline constexpr std::size_t kDenseSolverLimit = 40000;

struct EigenData {
  Eigen::VectorXd energies;  // ascending
  Eigen::MatrixXd vectors;   // columns, empty if not requested
  std::size_t offset = 0;    // index of energies[0] in the full spectrum
  std::size_t total = 0;     // full dimension
  double e_min = 0.0;        // extremes of the full spectrum
  double e_max = 0.0;

  std::size_t size() const { return static_cast<std::size_t>(energies.size()); }
  bool has_vectors() const { return vectors.size() > 0; }

  // ε_n = (E_n - E_min)/(E_max - E_min); 0 for a degenerate span.
  std::vector<double> energy_density() const {
    std::vector<double> eps(size(), 0.0);
    const double span = e_max - e_min;
    if (span <= 0.0) return eps;
    for (std::size_t n = 0; n < size(); ++n)
      eps[n] = std::clamp((energies[static_cast<Eigen::Index>(n)] - e_min) / span, 0.0, 1.0);
    return eps;
  }
};

namespace detail {

inline void check_residuals(const HamiltonianMatrix& h, const EigenData& d) {
  if (!d.has_vectors()) return;
  double scale = 1.0;
  for (Eigen::Index k = 0; k < d.energies.size(); ++k) scale = std::max(scale, std::abs(d.energies[k]));
  double worst = 0.0;
  for (Eigen::Index k = 0; k < d.vectors.cols(); ++k) {
    const Eigen::VectorXd r = h.sparse() * d.vectors.col(k) - d.energies[k] * d.vectors.col(k);
    worst = std::max(worst, r.norm());
  }
  if (worst > 1e-8 * scale)
    throw SolverError("diagonalize: residual norm " + std::to_string(worst) + " exceeds tolerance");
}

}  // namespace detail

inline EigenData diagonalize(const HamiltonianMatrix& h, SpectrumWindow window = SpectrumWindow::full(),
                             bool want_vectors = true) {
  const std::size_t n = h.dimension();
  if (n == 0) throw InvalidArgument("diagonalize: empty matrix");
  if (n > kDenseSolverLimit)
    throw ResourceLimit("diagonalize: dimension " + std::to_string(n) + " exceeds the dense solver limit");
  EigenData d;
  d.total = n;
  if (window.is_full() || window.mid_count >= n) {
    auto eig = linalg::eigh(h.dense(), want_vectors);
    d.energies = std::move(eig.values);
    d.vectors = std::move(eig.vectors);
    d.e_min = d.energies[0];
    d.e_max = d.energies[static_cast<Eigen::Index>(n - 1)];
  } else {
    const Eigen::MatrixXd dense = h.dense();
    const Eigen::VectorXd all = linalg::eigh(dense, false).values;
    d.e_min = all[0];
    d.e_max = all[static_cast<Eigen::Index>(n - 1)];
    const double mid = 0.5 * (d.e_min + d.e_max);
    const auto* begin = all.data();
    const std::size_t centre = static_cast<std::size_t>(std::lower_bound(begin, begin + n, mid) - begin);
    // Grow the contiguous window greedily towards the closer side.
    std::size_t lo = centre, hi = centre;  // [lo, hi)
    while (hi - lo < window.mid_count) {
      const bool can_lo = lo > 0, can_hi = hi < n;
      if (can_lo && (!can_hi || mid - all[static_cast<Eigen::Index>(lo - 1)] <= all[static_cast<Eigen::Index>(hi)] - mid))
        --lo;
      else
        ++hi;
    }
    d.offset = lo;
    if (want_vectors) {
      auto eig = linalg::eigh_range(dense, static_cast<Eigen::Index>(lo), static_cast<Eigen::Index>(hi - 1), true);
      d.energies = std::move(eig.values);
      d.vectors = std::move(eig.vectors);
    } else {
      d.energies = all.segment(static_cast<Eigen::Index>(lo), static_cast<Eigen::Index>(hi - lo));
    }
  }
  detail::check_residuals(h, d);
  return d;
}

// Normalised histogram on [lo, hi) with equal bins; `density` integrates to
// the in-range fraction of samples.
struct Histogram {
  double lo = 0.0, hi = 1.0;
  std::vector<double> density;

  double width() const { return (hi - lo) / static_cast<double>(density.size()); }
  double center(std::size_t k) const { return lo + (static_cast<double>(k) + 0.5) * width(); }

  static Histogram of(std::span<const double> samples, double lo, double hi, std::size_t bins) {
    Histogram h{lo, hi, std::vector<double>(bins, 0.0)};
    if (samples.empty() || bins == 0) return h;
    for (double x : samples) {
      if (x < lo || x >= hi) continue;
      auto k = static_cast<std::size_t>((x - lo) / h.width());
      h.density[std::min(k, bins - 1)] += 1.0;
    }
    for (double& v : h.density) v /= static_cast<double>(samples.size()) * h.width();
    return h;
  }
};

struct RStatsOptions {
  double degeneracy_tol = 1e-12;
  std::size_t r_bins = 20;
  std::size_t s_bins = 40;
  double s_max = 4.0;
};

struct RStatistics {
  double mean_r = 0.0;
  std::vector<double> ratios;   // r_n for consecutive spacing pairs
  std::vector<double> spacings; // s_n divided by their mean
  Histogram r_hist;
  Histogram spacing_hist;       // P(s)
  std::size_t levels = 0;       // after merging
  std::size_t merged = 0;       // levels dropped as exact degeneracies
};

// Level-spacing ratios r_n = min(s_n, s_{n+1}) / max(s_n, s_{n+1}).
inline RStatistics r_statistics(std::span<const double> energies, const RStatsOptions& opt = {}) {
  for (std::size_t k = 1; k < energies.size(); ++k)
    if (energies[k] < energies[k - 1]) throw InvalidArgument("r_statistics: energies must ascend");
  std::vector<double> levels;
  levels.reserve(energies.size());
  RStatistics st;
  for (double e : energies) {
    if (!levels.empty() && e - levels.back() < opt.degeneracy_tol) {
      ++st.merged;
      continue;
    }
    levels.push_back(e);
  }
  st.levels = levels.size();
  if (levels.size() < 3)
    throw InvalidArgument("r_statistics: need at least 3 distinct levels, got " + std::to_string(levels.size()));
  std::vector<double> s(levels.size() - 1);
  for (std::size_t k = 0; k + 1 < levels.size(); ++k) s[k] = levels[k + 1] - levels[k];
  st.ratios.resize(s.size() - 1);
  for (std::size_t k = 0; k + 1 < s.size(); ++k)
    st.ratios[k] = std::min(s[k], s[k + 1]) / std::max(s[k], s[k + 1]);
  st.mean_r = std::accumulate(st.ratios.begin(), st.ratios.end(), 0.0) / static_cast<double>(st.ratios.size());
  const double mean_s = std::accumulate(s.begin(), s.end(), 0.0) / static_cast<double>(s.size());
  st.spacings.resize(s.size());
  for (std::size_t k = 0; k < s.size(); ++k) st.spacings[k] = s[k] / mean_s;
  st.r_hist = Histogram::of(st.ratios, 0.0, 1.0 + 1e-12, opt.r_bins);
  st.spacing_hist = Histogram::of(st.spacings, 0.0, opt.s_max, opt.s_bins);
  return st;
}

enum class SchmidtSide { Auto, Left, Right };

// Eigenvalues of the reduced density matrix of sites [0, cut) (or of the
// complement), for a state given by amplitudes over `basis`.
template <typename Scalar>
std::vector<double> schmidt_spectrum(std::span<const Scalar> amps, const Basis& basis, int cut,
                                     SchmidtSide side = SchmidtSide::Auto) {
  if (amps.size() != basis.size()) throw InvalidArgument("schmidt_spectrum: amplitude count mismatch");
  if (cut < 0 || cut > basis.sites()) throw InvalidArgument("schmidt_spectrum: cut outside chain");
  double norm = 0.0;
  for (const Scalar& a : amps) norm += std::norm(a);
  if (std::abs(norm - 1.0) > 1e-8)
    throw InvalidArgument("schmidt_spectrum: state not normalised (|psi|^2 = " + std::to_string(norm) + ")");

  const std::uint64_t mask = cut >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << cut) - 1;
  std::vector<std::uint64_t> lefts, rights;
  lefts.reserve(basis.size());
  rights.reserve(basis.size());
  for (std::uint64_t s : basis.states()) {
    lefts.push_back(s & mask);
    rights.push_back(s >> cut);
  }
  auto uniq = [](std::vector<std::uint64_t> v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
  };
  const auto ul = uniq(lefts), ur = uniq(rights);
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  Mat m = Mat::Zero(static_cast<Eigen::Index>(ul.size()), static_cast<Eigen::Index>(ur.size()));
  for (std::size_t k = 0; k < basis.size(); ++k) {
    const auto r = std::lower_bound(ul.begin(), ul.end(), lefts[k]) - ul.begin();
    const auto c = std::lower_bound(ur.begin(), ur.end(), rights[k]) - ur.begin();
    m(r, c) = amps[k];
  }
  const bool use_left = side == SchmidtSide::Left || (side == SchmidtSide::Auto && ul.size() <= ur.size());
  const Mat rho = use_left ? Mat(m * m.adjoint()) : Mat(m.adjoint() * m);
  Eigen::SelfAdjointEigenSolver<Mat> es(rho, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw SolverError("schmidt_spectrum: eigensolver failed");
  std::vector<double> out(static_cast<std::size_t>(es.eigenvalues().size()));
  for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k) out[static_cast<std::size_t>(k)] = std::max(0.0, es.eigenvalues()[k]);
  return out;
}

// Von Neumann entropy (nats) of sites [0, cut) versus the rest.
template <typename Scalar>
double eigenstate_entropy(std::span<const Scalar> amps, const Basis& basis, int cut,
                          SchmidtSide side = SchmidtSide::Auto) {
  double s = 0.0;
  for (double l : schmidt_spectrum(amps, basis, cut, side))
    if (l > 1e-300) s -= l * std::log(l);
  return s;
}

inline double eigenstate_entropy(const Eigen::VectorXd& v, const Basis& basis, int cut) {
  return eigenstate_entropy<double>(std::span<const double>(v.data(), static_cast<std::size_t>(v.size())), basis, cut);
}

// Product-basis amplitudes of a vector given over inversion-even combinations.
struct ExpandedState {
  Basis basis;
  std::vector<double> amplitudes;
};

inline ExpandedState expand_symmetric(const Eigen::VectorXd& v, const SymmetricBasis& sym) {
  if (static_cast<std::size_t>(v.size()) != sym.size()) throw InvalidArgument("expand_symmetric: size mismatch");
  std::vector<std::pair<std::uint64_t, double>> comps;
  comps.reserve(2 * sym.size());
  for (std::size_t k = 0; k < sym.size(); ++k) {
    const auto& s = sym.states[k];
    const double a = v[static_cast<Eigen::Index>(k)] * s.weight();
    comps.emplace_back(s.rep, a);
    if (!s.palindrome()) comps.emplace_back(s.partner, a);
  }
  std::sort(comps.begin(), comps.end());
  ExpandedState out;
  std::vector<std::uint64_t> states;
  for (auto& [b, a] : comps) {
    states.push_back(b);
    out.amplitudes.push_back(a);
  }
  out.basis = Basis(sym.sites, std::move(states));
  return out;
}

// Half-chain entropies of every computed eigenvector (cut at floor(L/2)).
inline std::vector<double> eigenstate_entropies(const EigenData& d, const HamiltonianMatrix& h) {
  if (!d.has_vectors()) throw InvalidArgument("eigenstate_entropies: eigenvectors not computed");
  std::vector<double> out(d.size());
  for (std::size_t n = 0; n < d.size(); ++n) {
    const Eigen::VectorXd v = d.vectors.col(static_cast<Eigen::Index>(n));
    if (h.basis()) {
      out[n] = eigenstate_entropy(v, *h.basis(), h.basis()->sites() / 2);
    } else if (h.symmetric_basis()) {
      const auto ex = expand_symmetric(v, *h.symmetric_basis());
      out[n] = eigenstate_entropy<double>(ex.amplitudes, ex.basis, ex.basis.sites() / 2);
    } else {
      throw InvalidArgument("eigenstate_entropies: matrix carries no basis");
    }
  }
  return out;
}

}  // namespace rydfrag
