#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rydfrag/errors.hpp"
#include "rydfrag/regime.hpp"
#include "rydfrag/spin_config.hpp"

namespace rydfrag {

// Exhaustive enumeration is capped here; beyond it sector sizes stop being
// desk-scale anyway.
inline constexpr int kMaxEnumerationSites = 32;

// Raw classical counts of a configuration.
struct DimerCounts {
  int n_r = 0;    // Rydberg excitations
  int n_nn = 0;   // adjacent up pairs
  int n_nnn = 0;  // up pairs at distance two
};

inline DimerCounts dimer_counts(std::uint64_t bits) {
  return {std::popcount(bits), std::popcount(bits & (bits >> 1)),
          std::popcount(bits & (bits >> 2))};
}

// Conserved charges selecting a symmetry sector. `charges` holds one entry
// for the NN-type and single-combination regimes and two ({n_NN, n_NNN})
// for the generic strong-NNN regime.
struct SectorKey {
  int n_r = 0;
  std::vector<int> charges;
  Regime regime = Regime::NnOnly;

  friend bool operator==(const SectorKey& a, const SectorKey& b) {
    return a.n_r == b.n_r && a.charges == b.charges &&
           move_class(a.regime) == move_class(b.regime);
  }

  std::string str() const {
    std::string s = "{n_R=" + std::to_string(n_r);
    for (int c : charges) s += ", " + std::to_string(c);
    return s + " | " + std::string(to_string(regime)) + "}";
  }
};

inline std::vector<int> combine_charges(const DimerCounts& d, Regime regime) {
  switch (move_class(regime)) {
    case Regime::NnnEqual: return {d.n_nn + d.n_nnn};
    case Regime::NnnHalf: return {2 * d.n_nn + d.n_nnn};
    case Regime::NnnGeneric: return {d.n_nn, d.n_nnn};
    default: return {d.n_nn};
  }
}

inline SectorKey charges(const SpinConfig& config, Regime regime) {
  const DimerCounts d = dimer_counts(config.bits());
  return {d.n_r, combine_charges(d, regime), regime};
}

namespace detail {

// Packs (n_R, combined charges) into one integer for hot loops.
inline std::uint32_t sector_code(std::uint64_t bits, Regime regime) {
  const DimerCounts d = dimer_counts(bits);
  std::uint32_t c1 = 0, c2 = 0;
  switch (move_class(regime)) {
    case Regime::NnnEqual: c1 = static_cast<std::uint32_t>(d.n_nn + d.n_nnn); break;
    case Regime::NnnHalf: c1 = static_cast<std::uint32_t>(2 * d.n_nn + d.n_nnn); break;
    case Regime::NnnGeneric:
      c1 = static_cast<std::uint32_t>(d.n_nn);
      c2 = static_cast<std::uint32_t>(d.n_nnn);
      break;
    default: c1 = static_cast<std::uint32_t>(d.n_nn); break;
  }
  return (static_cast<std::uint32_t>(d.n_r) << 16) | (c1 << 8) | c2;
}

inline std::uint32_t sector_code(const SectorKey& key) {
  std::uint32_t c1 = key.charges.empty() ? 0u : static_cast<std::uint32_t>(key.charges[0]);
  std::uint32_t c2 = key.charges.size() > 1 ? static_cast<std::uint32_t>(key.charges[1]) : 0u;
  return (static_cast<std::uint32_t>(key.n_r) << 16) | (c1 << 8) | c2;
}

inline SectorKey decode_sector(std::uint32_t code, Regime regime) {
  SectorKey key;
  key.n_r = static_cast<int>(code >> 16);
  key.regime = regime;
  key.charges.push_back(static_cast<int>((code >> 8) & 0xffu));
  if (move_class(regime) == Regime::NnnGeneric) key.charges.push_back(static_cast<int>(code & 0xffu));
  return key;
}

inline std::uint64_t site_mask(int length) {
  return length >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << length) - 1;
}

// Visits every L-bit pattern with `ones` set bits in ascending order.
template <typename F>
void for_each_with_popcount(int length, int ones, F&& f) {
  if (ones < 0 || ones > length) return;
  if (ones == 0) {
    f(std::uint64_t{0});
    return;
  }
  const std::uint64_t limit = site_mask(length);
  std::uint64_t v = (std::uint64_t{1} << ones) - 1;
  while (true) {
    f(v);
    const std::uint64_t c = v & (~v + 1);
    const std::uint64_t r = v + c;
    if (r == 0 || r > limit) break;
    const std::uint64_t next = (((r ^ v) >> 2) / c) | r;
    if (next > limit) break;
    v = next;
  }
}

inline void check_enumerable(int length) {
  if (length < 1 || length > kMaxEnumerationSites)
    throw InvalidArgument("enumeration supports 1 <= L <= " +
                          std::to_string(kMaxEnumerationSites) + ", got " +
                          std::to_string(length));
}

}  // namespace detail

// Sorted, duplicate-free list of configurations on L sites.
class Basis {
 public:
  Basis() = default;

  Basis(int length, std::vector<std::uint64_t> states)
      : length_(length), states_(std::move(states)) {
    std::sort(states_.begin(), states_.end());
    states_.erase(std::unique(states_.begin(), states_.end()), states_.end());
    const std::uint64_t mask = detail::site_mask(length);
    for (std::uint64_t s : states_)
      if ((s & ~mask) != 0) throw InvalidArgument("Basis: state exceeds site count");
  }

  int sites() const { return length_; }
  std::size_t size() const { return states_.size(); }
  bool empty() const { return states_.empty(); }
  std::uint64_t state(std::size_t k) const { return states_[k]; }
  SpinConfig config(std::size_t k) const { return SpinConfig(states_[k], length_); }
  std::span<const std::uint64_t> states() const { return states_; }

  std::optional<std::size_t> index_of(std::uint64_t bits) const {
    auto it = std::lower_bound(states_.begin(), states_.end(), bits);
    if (it == states_.end() || *it != bits) return std::nullopt;
    return static_cast<std::size_t>(it - states_.begin());
  }
  std::optional<std::size_t> index_of(const SpinConfig& c) const {
    if (c.length() != length_) return std::nullopt;
    return index_of(c.bits());
  }
  bool contains(std::uint64_t bits) const { return index_of(bits).has_value(); }

  friend bool operator==(const Basis&, const Basis&) = default;

 private:
  int length_ = 0;
  std::vector<std::uint64_t> states_;
};

// Every configuration of L sites carrying `key`, ascending by bit pattern.
// Walks only patterns of the requested popcount.
inline Basis enumerate_sector(int length, const SectorKey& key) {
  detail::check_enumerable(length);
  std::vector<std::uint64_t> out;
  const std::uint32_t want = detail::sector_code(key);
  detail::for_each_with_popcount(length, key.n_r, [&](std::uint64_t b) {
    if (detail::sector_code(b, key.regime) == want) out.push_back(b);
  });
  return Basis(length, std::move(out));
}

struct SectorSize {
  SectorKey key;
  std::size_t dimension = 0;
};

// All non-empty sectors of L sites, ordered by (n_R, charges).
inline std::vector<SectorSize> sector_census(int length, Regime regime) {
  detail::check_enumerable(length);
  std::vector<SectorSize> out;
  for (int n = 0; n <= length; ++n) {
    std::vector<std::size_t> hist(1u << 16, 0);
    detail::for_each_with_popcount(length, n, [&](std::uint64_t b) {
      ++hist[detail::sector_code(b, regime) & 0xffffu];
    });
    for (std::uint32_t c = 0; c < hist.size(); ++c)
      if (hist[c] != 0)
        out.push_back({detail::decode_sector((static_cast<std::uint32_t>(n) << 16) | c, regime), hist[c]});
  }
  return out;
}

// Sector with the most states; ties go to the first in census order.
inline SectorSize largest_sector(int length, Regime regime) {
  auto census = sector_census(length, regime);
  auto it = std::max_element(census.begin(), census.end(),
                             [](const SectorSize& a, const SectorSize& b) { return a.dimension < b.dimension; });
  return *it;
}

// {n_R = L/2, n_NN = floor(L/4)}: the largest NN sector for even L.
inline SectorKey nn_half_filling_key(int length) {
  if (length % 2 != 0) throw InvalidArgument("half-filling sector needs even L");
  return {length / 2, {length / 4}, Regime::NnOnly};
}

// One inversion-even basis vector: |rep> if palindromic, else
// (|rep> + |partner>)/sqrt(2) with rep < partner.
struct SymmetricState {
  std::uint64_t rep = 0;
  std::uint64_t partner = 0;
  bool palindrome() const { return rep == partner; }
  double weight() const { return palindrome() ? 1.0 : 1.0 / std::sqrt(2.0); }
};

struct SymmetricBasis {
  int sites = 0;
  std::vector<SymmetricState> states;  // ascending by rep
  std::size_t size() const { return states.size(); }
  std::size_t palindromes() const {
    return static_cast<std::size_t>(std::count_if(states.begin(), states.end(),
                                                  [](const SymmetricState& s) { return s.palindrome(); }));
  }
};

// Inversion-even combinations of a reversal-closed basis.
inline SymmetricBasis symmetrize_inversion(const Basis& basis) {
  SymmetricBasis out;
  out.sites = basis.sites();
  for (std::uint64_t s : basis.states()) {
    const std::uint64_t r = SpinConfig::reverse_bits(s, basis.sites());
    if (!basis.contains(r))
      throw InvalidArgument("symmetrize_inversion: basis not closed under site reversal (" +
                            SpinConfig(s, basis.sites()).str() + ")");
    if (s <= r) out.states.push_back({s, r});
  }
  return out;
}

// Global spin flip of every state.
inline Basis spin_flip(const Basis& basis) {
  std::vector<std::uint64_t> out;
  out.reserve(basis.size());
  const std::uint64_t mask = detail::site_mask(basis.sites());
  for (std::uint64_t s : basis.states()) out.push_back(~s & mask);
  return Basis(basis.sites(), std::move(out));
}

}  // namespace rydfrag
