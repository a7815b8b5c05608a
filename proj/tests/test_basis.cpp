#include <gtest/gtest.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <span>
#include <vector>

#include "rydfrag/basis.hpp"
#include "rydfrag/constraints.hpp"
#include "rydfrag/templates.hpp"

using namespace rydfrag;

namespace {

std::vector<std::uint64_t> vec(std::span<const std::uint64_t> s) { return {s.begin(), s.end()}; }

// Charges by direct site loops, independent of the bit tricks in basis.hpp.
std::vector<int> naive_charges(const SpinConfig& c, Regime regime) {
  int nn = 0, nnn = 0;
  for (int i = 0; i + 1 < c.length(); ++i) nn += c.occ(i) * c.occ(i + 1);
  for (int i = 0; i + 2 < c.length(); ++i) nnn += c.occ(i) * c.occ(i + 2);
  switch (regime) {
    case Regime::NnnEqual: return {nn + nnn};
    case Regime::NnnHalf: return {2 * nn + nnn};
    case Regime::NnnGeneric: return {nn, nnn};
    default: return {nn};
  }
}

std::vector<std::uint64_t> brute_force_sector(int length, const SectorKey& key) {
  std::vector<std::uint64_t> out;
  for (std::uint64_t b = 0; b < (std::uint64_t{1} << length); ++b) {
    const SpinConfig c(b, length);
    if (c.n_up() == key.n_r && naive_charges(c, key.regime) == key.charges) out.push_back(b);
  }
  return out;
}

}  // namespace

TEST(SpinConfig, ParsesBulletsAndDigits) {
  const auto a = SpinConfig::parse("••◦◦");
  const auto b = SpinConfig::parse("1100");
  EXPECT_EQ(a, b);
  EXPECT_EQ(a.bits(), 0b0011u);  // site 1 is bit 0
  EXPECT_EQ(a.str(), "1100");
  EXPECT_EQ(a.occ(-1), 0);
  EXPECT_EQ(a.occ(4), 0);
}

TEST(SpinConfig, RejectsBitsBeyondLength) {
  EXPECT_THROW(SpinConfig(0b100, 2), InvalidArgument);
  EXPECT_THROW(SpinConfig::parse("10x1"), InvalidArgument);
}

TEST(Charges, WorkedExamples) {
  const auto k = charges(SpinConfig::parse("110110110000"), Regime::NnOnly);
  EXPECT_EQ(k.n_r, 6);
  EXPECT_EQ(k.charges, std::vector<int>{3});
  const auto m = charges(SpinConfig::parse("100100100100"), Regime::NnOnly);
  EXPECT_EQ(m.n_r, 4);
  EXPECT_EQ(m.charges, std::vector<int>{0});
  const auto z = charges(SpinConfig(0, 4), Regime::NnOnly);
  EXPECT_EQ(z.n_r, 0);
  EXPECT_EQ(z.charges, std::vector<int>{0});
}

TEST(Charges, MatchNaiveCountsForAllRegimes) {
  for (Regime r : kAllRegimes)
    for (std::uint64_t b = 0; b < (1u << 10); ++b) {
      const SpinConfig c(b, 10);
      const auto k = charges(c, r);
      EXPECT_EQ(k.n_r, std::popcount(b));
      EXPECT_EQ(k.charges, naive_charges(c, r));
    }
}

TEST(EnumerateSector, SmallExamples) {
  const auto b = enumerate_sector(4, {2, {1}, Regime::NnOnly});
  ASSERT_EQ(b.size(), 3u);
  EXPECT_EQ(b.config(0).str(), "1100");
  EXPECT_EQ(b.config(1).str(), "0110");
  EXPECT_EQ(b.config(2).str(), "0011");
  // ascending by bit pattern
  EXPECT_LT(b.state(0), b.state(1));
  const auto two = enumerate_sector(2, {1, {0}, Regime::NnOnly});
  ASSERT_EQ(two.size(), 2u);
  EXPECT_TRUE(enumerate_sector(4, {0, {2}, Regime::NnOnly}).empty());
}

TEST(EnumerateSector, MatchesBruteForce) {
  for (Regime r : kAllRegimes)
    for (const auto& s : sector_census(12, r)) {
      const auto b = enumerate_sector(12, s.key);
      EXPECT_EQ(vec(b.states()), brute_force_sector(12, s.key)) << s.key.str();
      EXPECT_EQ(b.size(), s.dimension);
    }
}

TEST(EnumerateSector, HalfFillingSectorAtTwelveSites) {
  // Sector of |••◦••◦••◦◦◦◦⟩; its D_s is the L=12 largest NN sector.
  const SectorKey key{6, {3}, Regime::NnOnly};
  EXPECT_EQ(enumerate_sector(12, key).size(), brute_force_sector(12, key).size());
  EXPECT_EQ(enumerate_sector(12, key).size(), 350u);
  EXPECT_EQ(largest_sector(12, Regime::NnOnly).dimension, 350u);
}

TEST(EnumerateSector, PartitionsFullSpace) {
  for (Regime r : kAllRegimes)
    for (int length : {1, 5, 9, 13}) {
      std::size_t total = 0;
      for (const auto& s : sector_census(length, r)) total += s.dimension;
      EXPECT_EQ(total, std::size_t{1} << length);
    }
}

TEST(EnumerateSector, LargestSectorIsHalfFilling) {
  // n_NN = L/4 - 1 ties with L/4 at L = 0 mod 4; the half-filling key is one of the maxima.
  for (int length = 8; length <= 20; length += 2)
    EXPECT_EQ(largest_sector(length, Regime::NnOnly).dimension, enumerate_sector(length, nn_half_filling_key(length)).size())
        << length;
}

TEST(Symmetrize, SinglePair) {
  const Basis b(2, {0b01, 0b10});
  const auto s = symmetrize_inversion(b);
  ASSERT_EQ(s.size(), 1u);
  EXPECT_FALSE(s.states[0].palindrome());
  EXPECT_DOUBLE_EQ(s.states[0].weight(), 1.0 / std::sqrt(2.0));
}

TEST(Symmetrize, RejectsOpenBasis) {
  EXPECT_THROW(symmetrize_inversion(Basis(3, {0b001})), InvalidArgument);
}

TEST(Symmetrize, DimensionIsPalindromesPlusPairs) {
  const auto b = enumerate_sector(12, {4, {1}, Regime::NnOnly});
  std::size_t pal = 0;
  for (auto s : b.states()) pal += SpinConfig::reverse_bits(s, 12) == s;
  const auto sym = symmetrize_inversion(b);
  EXPECT_EQ(sym.palindromes(), pal);
  EXPECT_EQ(sym.size(), pal + (b.size() - pal) / 2);
}

TEST(Symmetrize, MagnonSectorAtTwentyFour) {
  const auto b = enumerate_sector(24, {8, {0}, Regime::NnOnly});
  EXPECT_EQ(b.size(), 24310u);
  const auto sym = symmetrize_inversion(b);
  EXPECT_EQ(sym.size(), 12190u);
  // The magnon sector is fully connected: its fragment is the whole sector.
  EXPECT_EQ(build_fragment(root_template(RootTemplate::NeelMagnon, 24), Regime::NnOnly).dimension(), b.size());
}

TEST(SpinFlip, MagnonAndHoleSectorsHaveEqualSize) {
  // Hole sector (••◦)^k•• on L = 3k+2 sites; stripping its two up edge sites
  // and flipping gives the magnon sector of L-2 sites.
  for (int k = 3; k <= 7; ++k) {
    const int length = 3 * k + 2;
    const auto holes = build_fragment(root_template(RootTemplate::Z3Hole, length), Regime::NnOnly);
    const auto magnons = enumerate_sector(length - 2, {k, {0}, Regime::NnOnly});
    std::vector<std::uint64_t> mapped;
    for (auto s : holes.basis.states()) {
      ASSERT_EQ(s & 1u, 1u);
      ASSERT_EQ((s >> (length - 1)) & 1u, 1u);
      mapped.push_back(~(s >> 1) & ((std::uint64_t{1} << (length - 2)) - 1));
    }
    std::sort(mapped.begin(), mapped.end());
    EXPECT_EQ(mapped, vec(magnons.states())) << "L=" << length;
  }
  // Flipping magnons gives isolated holes: no two adjacent down spins.
  const auto magnon = enumerate_sector(12, {4, {0}, Regime::NnOnly});
  const auto flipped = spin_flip(magnon);
  EXPECT_EQ(flipped.size(), magnon.size());
  for (auto s : flipped.states()) {
    const std::uint64_t down = ~s & 0xfffu;
    EXPECT_EQ(down & (down >> 1), 0u);
    EXPECT_EQ(std::popcount(s), 8);
  }
}

TEST(SpinFlip, HoleSectorSymmetricDimensionMatchesMagnon) {
  const auto magnon = enumerate_sector(24, {8, {0}, Regime::NnOnly});
  const auto hole = spin_flip(magnon);
  EXPECT_EQ(symmetrize_inversion(hole).size(), 12190u);
}
