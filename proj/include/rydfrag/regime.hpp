#pragma once

#include <array>
#include <string>
#include <string_view>

#include "rydfrag/errors.hpp"

namespace rydfrag {

// Kinetic-constraint regime. Selects both the allowed flip-flops and the
// conserved dimer charges.
enum class Regime {
  NnOnly,        // V' = 0:        {n_R, n_NN}
  NnnEqual,      // V' ~ V:        {n_R, n_NN + n_NNN}
  NnnHalf,       // V' ~ V/2:      {n_R, 2 n_NN + n_NNN}
  NnnGeneric,    // strong V':     {n_R, n_NN, n_NNN}
  WeakNonlocal,  // V' <~ J_P,J_Q: same moves and charges as NnOnly
};

inline constexpr std::array<Regime, 5> kAllRegimes = {
    Regime::NnOnly, Regime::NnnEqual, Regime::NnnHalf, Regime::NnnGeneric,
    Regime::WeakNonlocal};

inline std::string_view to_string(Regime r) {
  switch (r) {
    case Regime::NnOnly: return "nn";
    case Regime::NnnEqual: return "nnn-equal";
    case Regime::NnnHalf: return "nnn-half";
    case Regime::NnnGeneric: return "nnn-generic";
    case Regime::WeakNonlocal: return "weak-nonlocal";
  }
  return "?";
}

inline Regime parse_regime(std::string_view s) {
  for (Regime r : kAllRegimes)
    if (to_string(r) == s) return r;
  throw InvalidArgument("unknown regime '" + std::string(s) +
                        "' (expected nn, nnn-equal, nnn-half, nnn-generic, weak-nonlocal)");
}

// Regimes sharing a move set also share their charges.
inline constexpr Regime move_class(Regime r) {
  return r == Regime::WeakNonlocal ? Regime::NnOnly : r;
}

}  // namespace rydfrag
