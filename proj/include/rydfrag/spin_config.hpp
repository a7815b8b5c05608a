#pragma once

#include <bit>
#include <compare>
#include <cstdint>
#include <cstdio>
#include <string>
#include <string_view>

#include "rydfrag/errors.hpp"

namespace rydfrag {

// Largest chain handled. Neighbourhood lookups read up to four sites past
// either edge, so the padded pattern must still fit in 64 bits.
inline constexpr int kMaxSites = 56;

// Classical configuration of an open chain. Bit k holds site k+1 (the
// leftmost site is bit 0); a set bit is a Rydberg (up) atom. Sites outside
// [0, length) read as down, which realises the virtual edge sites.
class SpinConfig {
 public:
  constexpr SpinConfig() = default;

  SpinConfig(std::uint64_t bits, int length) : bits_(bits), length_(length) {
    if (length < 1 || length > kMaxSites)
      throw InvalidArgument("SpinConfig: site count must lie in [1, " +
                            std::to_string(kMaxSites) + "], got " +
                            std::to_string(length));
    if (length < 64 && (bits >> length) != 0)
      throw InvalidArgument("SpinConfig: bit set beyond site count");
  }

  // Parses "110100" (site 1 first). Also accepts the bullet glyphs.
  static SpinConfig parse(std::string_view text) {
    std::uint64_t bits = 0;
    int site = 0;
    for (std::size_t pos = 0; pos < text.size();) {
      const unsigned char c = static_cast<unsigned char>(text[pos]);
      if (c == '1' || c == 'u' || c == 'U') {
        bits |= std::uint64_t{1} << site++;
        ++pos;
      } else if (c == '0' || c == 'd' || c == 'D') {
        ++site;
        ++pos;
      } else if (text.substr(pos, 3) == "•") {  // bullet
        bits |= std::uint64_t{1} << site++;
        pos += 3;
      } else if (text.substr(pos, 3) == "◦") {  // white bullet
        ++site;
        pos += 3;
      } else if (c == ' ' || c == '|' || c == '>' || c == '_') {
        ++pos;
      } else {
        throw InvalidArgument("SpinConfig: unexpected character in '" +
                              std::string(text) + "'");
      }
      if (site > kMaxSites) throw InvalidArgument("SpinConfig: string too long");
    }
    return SpinConfig(bits, site);
  }

  constexpr std::uint64_t bits() const { return bits_; }
  constexpr int length() const { return length_; }

  // Occupation of site i (0-based); out-of-range sites are virtual and down.
  constexpr int occ(int i) const {
    return (i < 0 || i >= length_) ? 0 : static_cast<int>((bits_ >> i) & 1u);
  }

  int n_up() const { return std::popcount(bits_); }

  SpinConfig flipped() const {
    const std::uint64_t mask =
        length_ == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << length_) - 1;
    return SpinConfig(~bits_ & mask, length_);
  }

  // Site reversal i -> L-1-i.
  SpinConfig reversed() const { return SpinConfig(reverse_bits(bits_, length_), length_); }

  std::string str() const {
    std::string s(static_cast<std::size_t>(length_), '0');
    for (int i = 0; i < length_; ++i)
      if (occ(i)) s[static_cast<std::size_t>(i)] = '1';
    return s;
  }

  std::string hex() const {
    char buf[24];
    std::snprintf(buf, sizeof buf, "0x%llx", static_cast<unsigned long long>(bits_));
    return buf;
  }

  static std::uint64_t reverse_bits(std::uint64_t bits, int length) {
    std::uint64_t out = 0;
    for (int i = 0; i < length; ++i)
      if ((bits >> i) & 1u) out |= std::uint64_t{1} << (length - 1 - i);
    return out;
  }

  friend constexpr bool operator==(const SpinConfig&, const SpinConfig&) = default;
  friend constexpr auto operator<=>(const SpinConfig& a, const SpinConfig& b) {
    if (auto c = a.length_ <=> b.length_; c != 0) return c;
    return a.bits_ <=> b.bits_;
  }

 private:
  std::uint64_t bits_ = 0;
  int length_ = 0;
};

}  // namespace rydfrag
