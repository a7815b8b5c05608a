#pragma once

#include <array>
#include <string>
#include <string_view>

#include "rydfrag/errors.hpp"
#include "rydfrag/spin_config.hpp"

namespace rydfrag {

enum class RootTemplate { DimerTrain, DimerTrainMagnon, NeelMagnon, Z3Hole };

inline constexpr std::array<RootTemplate, 4> kAllRootTemplates = {RootTemplate::DimerTrain, RootTemplate::DimerTrainMagnon,
                                                                  RootTemplate::NeelMagnon, RootTemplate::Z3Hole};

inline constexpr std::string_view to_string(RootTemplate t) {
  switch (t) {
    case RootTemplate::DimerTrain: return "dimer-train";
    case RootTemplate::DimerTrainMagnon: return "dimer-train-magnon";
    case RootTemplate::NeelMagnon: return "neel3-magnon";
    case RootTemplate::Z3Hole: return "z3-hole";
  }
  return "?";
}

inline RootTemplate parse_root_template(std::string_view s) {
  for (RootTemplate t : kAllRootTemplates)
    if (to_string(t) == s) return t;
  throw InvalidArgument("unknown root template '" + std::string(s) + "' (dimer-train, dimer-train-magnon, neel3-magnon, z3-hole)");
}

// Cluster root states:
//   dimer-train         L = 4m     (••◦)^m ◦^m
//   dimer-train-magnon  L = 4m+2   (••◦)^m •◦ ◦^m
//   neel3-magnon        L = 3k     (•◦◦)^k
//   z3-hole             L = 3k+2   (••◦)^k ••
inline SpinConfig root_template(RootTemplate kind, int length) {
  auto bad = [&](const char* need) {
    return InvalidArgument("root template " + std::string(to_string(kind)) + " needs " + need + ", got L=" +
                           std::to_string(length));
  };
  if (length < 1) throw bad("L >= 1");
  std::string s;
  switch (kind) {
    case RootTemplate::DimerTrain: {
      if (length % 4 != 0) throw bad("L = 4m");
      const int m = length / 4;
      for (int k = 0; k < m; ++k) s += "110";
      s.append(static_cast<std::size_t>(m), '0');
      break;
    }
    case RootTemplate::DimerTrainMagnon: {
      if (length % 4 != 2 || length < 6) throw bad("L = 4m+2 with m >= 1");
      const int m = (length - 2) / 4;
      for (int k = 0; k < m; ++k) s += "110";
      s += "10";
      s.append(static_cast<std::size_t>(m), '0');
      break;
    }
    case RootTemplate::NeelMagnon:
      if (length % 3 != 0) throw bad("L divisible by 3");
      for (int k = 0; k < length / 3; ++k) s += "100";
      break;
    case RootTemplate::Z3Hole:
      if (length % 3 != 2) throw bad("L = 3k+2");
      for (int k = 0; k < length / 3; ++k) s += "110";
      s += "11";
      break;
  }
  return SpinConfig::parse(s);
}

}  // namespace rydfrag
