#pragma once

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <string>
#include <vector>

#include "rydfrag/errors.hpp"
#include "rydfrag/regime.hpp"

namespace rydfrag {

// Pairwise Rydberg interaction V_ij. Either translation invariant, given by
// distance (entry d-1 is the coupling at |i-j| = d, zero beyond), or a full
// symmetric L x L matrix for disordered positions.
class InteractionProfile {
 public:
  InteractionProfile() = default;

  static InteractionProfile by_range(std::vector<double> v_by_distance) {
    InteractionProfile p;
    for (double v : v_by_distance)
      if (!(v >= 0.0) || !std::isfinite(v)) throw InvalidArgument("interaction couplings must be finite and >= 0");
    while (!v_by_distance.empty() && v_by_distance.back() == 0.0) v_by_distance.pop_back();
    p.range_ = std::move(v_by_distance);
    return p;
  }

  static InteractionProfile nearest_neighbour(double v) { return by_range({v}); }

  // V / d^6 for d <= cutoff.
  static InteractionProfile van_der_waals(double v, int cutoff) {
    if (cutoff < 1) throw InvalidArgument("vdW cutoff must be >= 1");
    std::vector<double> r;
    for (int d = 1; d <= cutoff; ++d) r.push_back(v / std::pow(static_cast<double>(d), 6));
    return by_range(std::move(r));
  }

  static InteractionProfile pairwise(int sites, std::vector<double> matrix) {
    if (sites < 1 || matrix.size() != static_cast<std::size_t>(sites) * static_cast<std::size_t>(sites))
      throw InvalidArgument("pairwise interaction matrix must be L x L");
    for (int i = 0; i < sites; ++i)
      for (int j = 0; j < sites; ++j) {
        const double a = matrix[static_cast<std::size_t>(i * sites + j)];
        const double b = matrix[static_cast<std::size_t>(j * sites + i)];
        if (!(a >= 0.0) || !std::isfinite(a)) throw InvalidArgument("interaction couplings must be finite and >= 0");
        if (a != b) throw InvalidArgument("pairwise interaction matrix must be symmetric");
      }
    InteractionProfile p;
    p.sites_ = sites;
    p.matrix_ = std::move(matrix);
    return p;
  }

  bool is_pairwise() const { return sites_ > 0; }
  int pairwise_sites() const { return sites_; }

  // V_ij for 0-based sites; zero on the diagonal and outside a pairwise matrix.
  double operator()(int i, int j) const {
    if (i == j) return 0.0;
    if (is_pairwise()) {
      if (i < 0 || j < 0 || i >= sites_ || j >= sites_) return 0.0;
      return matrix_[static_cast<std::size_t>(i * sites_ + j)];
    }
    return at_distance(std::abs(i - j));
  }

  // Range-resolved coupling; for a pairwise profile this is the bond average.
  double at_distance(int d) const {
    if (d < 1) return 0.0;
    if (is_pairwise()) {
      double s = 0.0;
      int n = 0;
      for (int i = 0; i + d < sites_; ++i, ++n) s += (*this)(i, i + d);
      return n ? s / n : 0.0;
    }
    return d <= static_cast<int>(range_.size()) ? range_[static_cast<std::size_t>(d - 1)] : 0.0;
  }

  // Largest distance with a nonzero coupling.
  int reach() const {
    if (!is_pairwise()) return static_cast<int>(range_.size());
    int r = 0;
    for (int i = 0; i < sites_; ++i)
      for (int j = i + 1; j < sites_; ++j)
        if ((*this)(i, j) != 0.0) r = std::max(r, j - i);
    return r;
  }

  // Same couplings with everything beyond `max_distance` removed.
  InteractionProfile truncated(int max_distance) const {
    if (!is_pairwise()) {
      std::vector<double> r(range_.begin(), range_.begin() + std::min<std::size_t>(range_.size(), static_cast<std::size_t>(std::max(0, max_distance))));
      return by_range(std::move(r));
    }
    std::vector<double> m = matrix_;
    for (int i = 0; i < sites_; ++i)
      for (int j = 0; j < sites_; ++j)
        if (std::abs(i - j) > max_distance) m[static_cast<std::size_t>(i * sites_ + j)] = 0.0;
    return pairwise(sites_, std::move(m));
  }

  const std::vector<double>& range_couplings() const { return range_; }
  const std::vector<double>& matrix() const { return matrix_; }

 private:
  std::vector<double> range_;
  int sites_ = 0;
  std::vector<double> matrix_;
};

// Drive, detuning and interactions of the Rydberg chain (open boundaries,
// virtual down sites at both ends). Energies are in units of the Rabi
// frequency unless `omega` is set otherwise.
struct ModelParams {
  double omega = 1.0;
  double delta = 5.0;
  InteractionProfile interaction = InteractionProfile::nearest_neighbour(2.5);
  Regime regime = Regime::NnOnly;

  static ModelParams from_ratios(double delta_over_omega, double v_over_delta,
                                 Regime regime = Regime::NnOnly) {
    ModelParams p;
    p.omega = 1.0;
    p.delta = delta_over_omega;
    p.interaction = InteractionProfile::nearest_neighbour(v_over_delta * p.delta);
    p.regime = regime;
    return p;
  }

  // Nearest-neighbour strength V (bond average for pairwise profiles).
  double v() const { return interaction.at_distance(1); }
  double v_nnn() const { return interaction.at_distance(2); }

  bool perturbative() const { return omega > 0.0 && delta > 0.0 && omega / delta <= 0.25; }

  void validate() const {
    if (!(omega > 0.0) || !std::isfinite(omega)) throw InvalidArgument("Rabi frequency must be > 0");
    if (!(delta > 0.0) || !std::isfinite(delta)) throw InvalidArgument("detuning must be > 0");
  }
};

// Magnon hopping J_P = Ω²V / (4Δ(Δ+V)).
inline double hopping_p(double omega, double delta, double v) {
  return omega * omega * v / (4.0 * delta * (delta + v));
}
// Hole hopping J_Q = Ω²V / (4(Δ+V)(Δ+2V)).
inline double hopping_q(double omega, double delta, double v) {
  return omega * omega * v / (4.0 * (delta + v) * (delta + 2.0 * v));
}
inline double hopping_p(const ModelParams& p) { return hopping_p(p.omega, p.delta, p.v()); }
inline double hopping_q(const ModelParams& p) { return hopping_q(p.omega, p.delta, p.v()); }

// ξ = J_P / J_Q = 1 + 2V/Δ.
inline double hopping_ratio(const ModelParams& p) { return 1.0 + 2.0 * p.v() / p.delta; }

// Picks the regime from V'/V relative to the hopping scale: a V' within
// `factor`·max(J_P, J_Q) of zero, V or V/2 selects the matching regime.
inline Regime classify_regime(const ModelParams& p, double factor = 4.0) {
  const double scale = factor * std::max(hopping_p(p), hopping_q(p));
  const double v = p.v(), v2 = p.v_nnn();
  bool tail = false;
  for (int d = 2; d <= std::max(2, p.interaction.reach()); ++d) tail = tail || p.interaction.at_distance(d) > 0.0;
  if (!tail) return Regime::NnOnly;
  if (v2 <= scale) return Regime::WeakNonlocal;
  if (std::abs(v2 - v) <= scale) return Regime::NnnEqual;
  if (std::abs(v2 - 0.5 * v) <= scale) return Regime::NnnHalf;
  return Regime::NnnGeneric;
}

}  // namespace rydfrag
