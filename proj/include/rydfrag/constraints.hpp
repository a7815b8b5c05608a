#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <unordered_set>
#include <utility>
#include <vector>

#include "rydfrag/basis.hpp"
#include "rydfrag/errors.hpp"
#include "rydfrag/params.hpp"
#include "rydfrag/regime.hpp"
#include "rydfrag/spin_config.hpp"
#include "rydfrag/union_find.hpp"

namespace rydfrag {

enum class Span : int { Nn = 1, Nnn = 2 };

// A flip-flop between 0-based sites `site` and `site + span`.
struct Bond {
  int site = 0;
  Span span = Span::Nn;
  int partner() const { return site + static_cast<int>(span); }
  friend bool operator==(const Bond&, const Bond&) = default;
};

// Environment of an exchange on (i, j): bit 0 = site i-2, bit 1 = i-1,
// bit 2 = j+1, bit 3 = j+2. For NNN moves the middle site i+1 never enters
// the H0 energy balance and is not part of the pattern.
struct MoveRule {
  Span span = Span::Nn;
  std::uint8_t environment = 0;
  bool allowed = false;
  friend bool operator==(const MoveRule&, const MoveRule&) = default;
};

// Mirror image of an environment pattern under i <-> j reflection.
inline constexpr std::uint8_t mirror_environment(std::uint8_t e) {
  return static_cast<std::uint8_t>(((e & 1u) << 3) | ((e & 2u) << 1) | ((e & 4u) >> 1) | ((e & 8u) >> 3));
}

class RuleChart {
 public:
  bool allows(Span span, std::uint8_t env) const {
    return span == Span::Nn ? nn_[env & 15u] : nnn_[env & 15u];
  }
  void set(Span span, std::uint8_t env, bool allowed) {
    (span == Span::Nn ? nn_ : nnn_)[env & 15u] = allowed;
  }

  std::vector<MoveRule> rules() const {
    std::vector<MoveRule> out;
    for (Span s : {Span::Nn, Span::Nnn})
      for (std::uint8_t e = 0; e < 16; ++e) out.push_back({s, e, allows(s, e)});
    return out;
  }

  // The ten reflection-inequivalent patterns per span.
  std::vector<MoveRule> irreducible(Span span) const {
    std::vector<MoveRule> out;
    for (std::uint8_t e = 0; e < 16; ++e)
      if (e <= mirror_environment(e)) out.push_back({span, e, allows(span, e)});
    return out;
  }

  friend bool operator==(const RuleChart&, const RuleChart&) = default;

 private:
  std::array<bool, 16> nn_{};
  std::array<bool, 16> nnn_{};
};

namespace detail {

inline int env_bit(std::uint8_t e, int k) { return (e >> k) & 1; }

inline RuleChart make_regime_chart(Regime regime) {
  RuleChart chart;
  for (std::uint8_t e = 0; e < 16; ++e) {
    const int a = env_bit(e, 0), b = env_bit(e, 1), c = env_bit(e, 2), d = env_bit(e, 3);
    bool nn = false, nnn = false;
    switch (move_class(regime)) {
      case Regime::NnnEqual:
        nn = a == d;
        nnn = a + b == c + d;
        break;
      case Regime::NnnHalf:
        nn = a + b == c + d;
        nnn = b == c && a == d;
        break;
      case Regime::NnnGeneric:
        nn = b == c && a == d;
        nnn = b == c && a == d;
        break;
      default:
        nn = b == c;  // flanks i-1 and i+2 equal
        nnn = false;
        break;
    }
    chart.set(Span::Nn, e, nn);
    chart.set(Span::Nnn, e, nnn);
  }
  return chart;
}

}  // namespace detail

// Move set used by allowed_moves for each regime.
inline const RuleChart& regime_chart(Regime regime) {
  static const std::array<RuleChart, 5> charts = {
      detail::make_regime_chart(Regime::NnOnly), detail::make_regime_chart(Regime::NnnEqual),
      detail::make_regime_chart(Regime::NnnHalf), detail::make_regime_chart(Regime::NnnGeneric),
      detail::make_regime_chart(Regime::WeakNonlocal)};
  return charts[static_cast<std::size_t>(regime)];
}

// Calls f(new_bits, bond) for every allowed flip-flop out of `bits`.
template <typename F>
void for_each_move(std::uint64_t bits, int length, const RuleChart& chart, F&& f) {
  const std::uint64_t p = bits << 4;  // site i lives at bit i + 4
  auto occ = [p](int i) -> std::uint8_t { return static_cast<std::uint8_t>((p >> (i + 4)) & 1u); };
  for (int i = 0; i + 1 < length; ++i) {
    if (occ(i) == occ(i + 1)) continue;
    const auto env = static_cast<std::uint8_t>(occ(i - 2) | (occ(i - 1) << 1) | (occ(i + 2) << 2) | (occ(i + 3) << 3));
    if (chart.allows(Span::Nn, env)) f(bits ^ (std::uint64_t{3} << i), Bond{i, Span::Nn});
  }
  for (int i = 0; i + 2 < length; ++i) {
    if (occ(i) == occ(i + 2)) continue;
    const auto env = static_cast<std::uint8_t>(occ(i - 2) | (occ(i - 1) << 1) | (occ(i + 3) << 2) | (occ(i + 4) << 3));
    if (chart.allows(Span::Nnn, env)) f(bits ^ (std::uint64_t{5} << i), Bond{i, Span::Nnn});
  }
}

inline std::vector<std::pair<SpinConfig, Bond>> allowed_moves(const SpinConfig& config, Regime regime) {
  std::vector<std::pair<SpinConfig, Bond>> out;
  for_each_move(config.bits(), config.length(), regime_chart(regime), [&](std::uint64_t b, Bond bond) {
    out.emplace_back(SpinConfig(b, config.length()), bond);
  });
  return out;
}

// Derives the move chart from resonance with H0 = Δ n_R + V n_NN + V' n_NNN.
// A flip-flop is kept when its H0 energy change is within
// tolerance·max(J_P, J_Q) and the pair coupling that generates it is nonzero.
inline RuleChart derive_rule_chart(const ModelParams& params, double tolerance = 0.5) {
  params.validate();
  const double v1 = params.v();
  const double v2 = params.v_nnn();
  const double window = tolerance * std::max(hopping_p(params), hopping_q(params));

  // Window of 9 sites, exchange starting at window site 2.
  auto h0 = [&](std::uint32_t w) {
    double e = 0.0;
    for (int k = 0; k < 9; ++k) {
      if (!((w >> k) & 1u)) continue;
      e += params.delta;
      if (k + 1 < 9 && ((w >> (k + 1)) & 1u)) e += v1;
      if (k + 2 < 9 && ((w >> (k + 2)) & 1u)) e += v2;
    }
    return e;
  };

  RuleChart chart;
  double smallest_gap = std::numeric_limits<double>::infinity();
  std::array<std::array<double, 16>, 2> gaps{};
  for (Span span : {Span::Nn, Span::Nnn}) {
    const int i = 2;
    const int j = i + static_cast<int>(span);
    for (std::uint8_t e = 0; e < 16; ++e) {
      std::uint32_t w = 0;
      if (e & 1u) w |= 1u << (i - 2);
      if (e & 2u) w |= 1u << (i - 1);
      if (e & 4u) w |= 1u << (j + 1);
      if (e & 8u) w |= 1u << (j + 2);
      const double de = h0(w | (1u << j)) - h0(w | (1u << i));
      gaps[span == Span::Nn ? 0 : 1][e] = de;
      if (std::abs(de) > 1e-12 * std::max(1.0, params.delta)) smallest_gap = std::min(smallest_gap, std::abs(de));
    }
  }
  if (window > 0.0 && window >= smallest_gap)
    throw InvalidArgument("derive_rule_chart: tolerance window " + std::to_string(window) +
                          " reaches the smallest H0 gap " + std::to_string(smallest_gap) +
                          "; regime is ambiguous");
  for (Span span : {Span::Nn, Span::Nnn}) {
    const double coupling = span == Span::Nn ? v1 : v2;
    for (std::uint8_t e = 0; e < 16; ++e) {
      const double de = gaps[span == Span::Nn ? 0 : 1][e];
      const bool resonant = std::abs(de) <= std::max(window, 1e-12 * std::max(1.0, params.delta));
      chart.set(span, e, coupling > 0.0 && resonant);
    }
  }
  return chart;
}

struct FragmentEdge {
  std::uint32_t a = 0;  // a < b, indices into the fragment basis
  std::uint32_t b = 0;
  Bond bond;
};

// Connected component of the constrained-hopping graph.
struct KrylovFragment {
  Basis basis;
  std::vector<FragmentEdge> edges;
  SpinConfig root;
  Regime regime = Regime::NnOnly;

  std::size_t dimension() const { return basis.size(); }
  int sites() const { return basis.sites(); }
  // Canonical identity: the smallest configuration in the fragment.
  SpinConfig canonical() const { return basis.config(0); }
};

inline constexpr std::size_t kDefaultFragmentCap = std::size_t{1} << 26;

inline std::vector<FragmentEdge> fragment_edges(const Basis& basis, Regime regime) {
  std::vector<FragmentEdge> edges;
  const RuleChart& chart = regime_chart(regime);
  for (std::size_t k = 0; k < basis.size(); ++k) {
    for_each_move(basis.state(k), basis.sites(), chart, [&](std::uint64_t nb, Bond bond) {
      auto idx = basis.index_of(nb);
      if (!idx) throw SolverError("fragment basis not closed under moves");
      if (k < *idx) edges.push_back({static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(*idx), bond});
    });
  }
  return edges;
}

// Breadth-first closure of `root` under the regime's allowed moves.
inline KrylovFragment build_fragment(const SpinConfig& root, Regime regime,
                                     std::size_t max_dimension = kDefaultFragmentCap) {
  const RuleChart& chart = regime_chart(regime);
  std::unordered_set<std::uint64_t> seen{root.bits()};
  std::vector<std::uint64_t> order{root.bits()};
  for (std::size_t head = 0; head < order.size(); ++head) {
    for_each_move(order[head], root.length(), chart, [&](std::uint64_t nb, Bond) {
      if (seen.insert(nb).second) order.push_back(nb);
    });
    if (order.size() > max_dimension)
      throw ResourceLimit("build_fragment: fragment of " + root.str() + " exceeds cap of " +
                          std::to_string(max_dimension) + " states");
  }
  KrylovFragment frag;
  frag.basis = Basis(root.length(), std::move(order));
  frag.edges = fragment_edges(frag.basis, regime);
  frag.root = root;
  frag.regime = regime;
  return frag;
}

struct FragmentationStats {
  SectorKey key;
  std::size_t sector_dimension = 0;
  std::size_t largest = 0;
  std::size_t fragments = 0;
  std::size_t frozen = 0;
  SpinConfig largest_canonical;  // smallest config of the largest fragment
};

namespace detail {

inline UnionFind connect_sector(const Basis& sector, Regime regime) {
  UnionFind uf(sector.size());
  const RuleChart& chart = regime_chart(regime);
  for (std::size_t k = 0; k < sector.size(); ++k) {
    for_each_move(sector.state(k), sector.sites(), chart, [&](std::uint64_t nb, Bond) {
      if (nb < sector.state(k)) return;  // each edge once
      auto idx = sector.index_of(nb);
      if (!idx) throw SolverError("allowed move left its sector: charges not conserved");
      uf.unite(static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(*idx));
    });
  }
  return uf;
}

}  // namespace detail

// Splits a sector into Krylov fragments and summarises their sizes.
inline FragmentationStats fragmentation_stats(int length, const SectorKey& key, Regime regime) {
  const Basis sector = enumerate_sector(length, key);
  if (sector.empty()) throw InvalidArgument("fragmentation_stats: empty sector " + key.str());
  UnionFind uf = detail::connect_sector(sector, regime);
  FragmentationStats st;
  st.key = key;
  st.sector_dimension = sector.size();
  std::uint32_t best_root = 0;
  // Scanning in ascending order meets every fragment first at its smallest config.
  std::vector<std::uint8_t> visited(sector.size(), 0);
  for (std::uint32_t k = 0; k < sector.size(); ++k) {
    const std::uint32_t r = uf.find(k);
    if (visited[r]) continue;
    visited[r] = 1;
    const std::size_t sz = uf.component_size(r);
    ++st.fragments;
    if (sz == 1) ++st.frozen;
    if (sz > st.largest) {
      st.largest = sz;
      best_root = k;
    }
  }
  st.largest_canonical = sector.config(best_root);
  return st;
}

// Every fragment of a sector, each as a sorted member list; fragments are
// ordered by their canonical (smallest) configuration.
inline std::vector<Basis> sector_fragments(int length, const SectorKey& key, Regime regime) {
  const Basis sector = enumerate_sector(length, key);
  UnionFind uf = detail::connect_sector(sector, regime);
  std::vector<std::int64_t> slot(sector.size(), -1);
  std::vector<std::vector<std::uint64_t>> members;
  for (std::uint32_t k = 0; k < sector.size(); ++k) {
    const std::uint32_t r = uf.find(k);
    if (slot[r] < 0) {
      slot[r] = static_cast<std::int64_t>(members.size());
      members.emplace_back();
    }
    members[static_cast<std::size_t>(slot[r])].push_back(sector.state(k));
  }
  std::vector<Basis> out;
  out.reserve(members.size());
  for (auto& m : members) out.emplace_back(length, std::move(m));
  return out;
}

// Frozen states of the half-filled NN sector: L²/32 + 3L/8 + 1 for L/2 even.
inline long frozen_count_closed_form(int length) {
  if (length <= 0 || length % 4 != 0)
    throw InvalidArgument("frozen_count_closed_form: requires L/2 even, got L=" + std::to_string(length));
  const long l = length;
  return (l * l + 12 * l + 32) / 32;
}

}  // namespace rydfrag
