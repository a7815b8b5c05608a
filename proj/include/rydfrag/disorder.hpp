#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"

#include "rydfrag/basis.hpp"
#include "rydfrag/constraints.hpp"
#include "rydfrag/errors.hpp"
#include "rydfrag/model.hpp"
#include "rydfrag/parallel.hpp"
#include "rydfrag/params.hpp"
#include "rydfrag/spectral.hpp"
#include "rydfrag/templates.hpp"

namespace rydfrag {

inline constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Seed of one realization, a pure function of (base, L, width, index) so
// that cells and realizations can run in any order.
inline std::uint64_t realization_seed(std::uint64_t base, int length, double width, std::uint64_t index) {
  std::uint64_t h = splitmix64(base);
  h = splitmix64(h ^ static_cast<std::uint64_t>(length));
  h = splitmix64(h ^ std::bit_cast<std::uint64_t>(width));
  return splitmix64(h ^ index);
}

// Atom positions R_j = j + δR_j (units of the lattice spacing R₀) with δR_j
// uniform in [-δR/2, δR/2].
struct DisorderRealization {
  std::uint64_t seed = 0;
  double width = 0.0;
  std::vector<double> offsets;
  std::vector<double> positions;

  int sites() const { return static_cast<int>(positions.size()); }

  // (R₀/|R_i - R_j|)^6; multiply by V for the dressed coupling.
  double scale(int i, int j) const {
    const double d = positions[static_cast<std::size_t>(i)] - positions[static_cast<std::size_t>(j)];
    return 1.0 / std::pow(std::abs(d), 6);
  }

  // V_ij = V (R₀/|R_i - R_j|)^6 for |i-j| <= cutoff.
  InteractionProfile interaction(double v, int cutoff) const {
    if (cutoff < 1) throw InvalidArgument("disorder: interaction cutoff must be >= 1");
    const int n = sites();
    std::vector<double> m(static_cast<std::size_t>(n) * static_cast<std::size_t>(n), 0.0);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (i != j && std::abs(i - j) <= cutoff) m[static_cast<std::size_t>(i * n + j)] = v * scale(std::min(i, j), std::max(i, j));
    return InteractionProfile::pairwise(n, std::move(m));
  }
};

inline DisorderRealization sample_realization(int length, double width, std::uint64_t seed) {
  if (length < 1) throw InvalidArgument("sample_realization: L must be >= 1");
  if (!(width >= 0.0) || !std::isfinite(width)) throw InvalidArgument("sample_realization: width must be >= 0");
  DisorderRealization r;
  r.seed = seed;
  r.width = width;
  std::uint64_t state = seed;
  for (int j = 0; j < length; ++j) {
    state += 0x9e3779b97f4a7c15ULL;
    const double u = static_cast<double>(splitmix64(state) >> 11) * 0x1.0p-53;  // [0, 1)
    const double off = width * (u - 0.5);
    r.offsets.push_back(off);
    r.positions.push_back(static_cast<double>(j) + off);
  }
  for (int j = 1; j < length; ++j)
    if (!(r.positions[static_cast<std::size_t>(j)] > r.positions[static_cast<std::size_t>(j - 1)]))
      throw InvalidArgument("sample_realization: atoms " + std::to_string(j) + " and " + std::to_string(j + 1) +
                            " overlap or swap order");
  return r;
}

struct DisorderOptions {
  int cutoff = 3;               // interaction range kept in V_ij
  double max_nn_shift = 0.5;    // |δV_{i,i+1}| must stay below this fraction of Δ
};

// Effective Hamiltonian with position disorder: NN flip-flop amplitudes and
// level shifts from second-order SW with the local V_{i,i+1}, plus the
// classical Σ_{|i-j|>=2} V_ij n_i n_j. `params` supplies Ω, Δ and the
// nominal V (its NN coupling).
inline HamiltonianMatrix disordered_hamiltonian(const KrylovFragment& fragment, const DisorderRealization& real,
                                                const ModelParams& params, const DisorderOptions& opt = {}) {
  params.validate();
  if (move_class(params.regime) != Regime::NnOnly || move_class(fragment.regime) != Regime::NnOnly)
    throw InvalidArgument("disordered_hamiltonian: needs the nn or weak-nonlocal regime (n_NN must stay conserved)");
  if (real.sites() != fragment.sites()) throw InvalidArgument("disordered_hamiltonian: realization length mismatch");
  const double v = params.v();
  ModelParams dressed = params;
  dressed.interaction = real.interaction(v, opt.cutoff);
  for (int i = 0; i + 1 < real.sites(); ++i) {
    const double dv = dressed.interaction(i, i + 1) - v;
    if (std::abs(dv) >= opt.max_nn_shift * params.delta || std::abs(dv) >= v)
      throw SolverError("disordered_hamiltonian: |δV| = " + std::to_string(std::abs(dv)) + " on bond " +
                        std::to_string(i + 1) + " breaks the effective-model hierarchy");
  }
  EffectiveOptions eo;
  eo.mode = CouplingMode::NumericSW;
  eo.sw_reach = 1;
  return build_effective_hamiltonian(fragment, dressed, eo);
}

// Σ_i δV_{i,i+1} n_i n_{i+1}: the leading disorder term of the diagonal.
inline double nn_disorder_energy(std::uint64_t bits, const DisorderRealization& real, double v) {
  double e = 0.0;
  for (int i = 0; i + 1 < real.sites(); ++i)
    if (((bits >> i) & 3u) == 3u) e += v * real.scale(i, i + 1) - v;
  return e;
}

struct SweepSpec {
  RootTemplate root = RootTemplate::Z3Hole;
  std::vector<int> sizes{11, 14, 17, 20};
  std::vector<double> widths{0.001, 0.01, 0.1};
  int realizations = 200;
  std::uint64_t seed = 1;
  ModelParams params = [] {
    ModelParams p = ModelParams::from_ratios(4.0, 0.2, Regime::WeakNonlocal);
    return p;
  }();
  DisorderOptions disorder{};
  std::size_t mid_count = kDefaultMidCount;
  bool entropy = true;
  unsigned jobs = 1;
};

struct SweepCell {
  int length = 0;
  double width = 0.0;
  std::size_t dimension = 0;
  int realizations = 0;  // successful
  int failures = 0;
  double mean_r = 0.0, sem_r = 0.0;
  double mean_s = 0.0, sem_s = 0.0;
  double var_s = 0.0;            // δS² over all eigenstates and realizations
  double var_s_within = 0.0;     // mean over realizations of the eigenstate variance
  double sem_var_s_within = 0.0;
  std::vector<std::string> failure_messages;  // first few
};

struct SweepResult {
  SweepSpec spec;
  std::vector<SweepCell> cells;

  const SweepCell& cell(int length, double width) const {
    for (const auto& c : cells)
      if (c.length == length && c.width == width) return c;
    throw InvalidArgument("SweepResult: no cell for L=" + std::to_string(length));
  }
};

namespace detail {

struct RealizationStats {
  bool ok = false;
  std::string error;
  double r = 0.0, s_mean = 0.0, s_var = 0.0, s2_mean = 0.0;
};

inline double sem(const std::vector<double>& x) {
  if (x.size() < 2) return 0.0;
  double m = 0.0;
  for (double v : x) m += v;
  m /= static_cast<double>(x.size());
  double ss = 0.0;
  for (double v : x) ss += (v - m) * (v - m);
  return std::sqrt(ss / static_cast<double>(x.size() - 1) / static_cast<double>(x.size()));
}

inline double mean(const std::vector<double>& x) {
  double m = 0.0;
  for (double v : x) m += v;
  return x.empty() ? 0.0 : m / static_cast<double>(x.size());
}

}  // namespace detail

inline SweepCell sweep_cell(const SweepSpec& spec, const KrylovFragment& fragment, double width) {
  const int length = fragment.sites();
  const auto n = static_cast<std::size_t>(spec.realizations);
  std::vector<detail::RealizationStats> stats(n);
  parallel_for(n, spec.jobs, [&](std::size_t k) {
    auto& st = stats[k];
    try {
      const auto real = sample_realization(length, width, realization_seed(spec.seed, length, width, k));
      const auto h = disordered_hamiltonian(fragment, real, spec.params, spec.disorder);
      const auto eig = diagonalize(h, SpectrumWindow::middle(spec.mid_count), spec.entropy);
      const std::vector<double> e(eig.energies.data(), eig.energies.data() + eig.energies.size());
      st.r = r_statistics(e).mean_r;
      if (spec.entropy) {
        const auto s = eigenstate_entropies(eig, h);
        for (double x : s) {
          st.s_mean += x;
          st.s2_mean += x * x;
        }
        st.s_mean /= static_cast<double>(s.size());
        st.s2_mean /= static_cast<double>(s.size());
        st.s_var = std::max(0.0, st.s2_mean - st.s_mean * st.s_mean);
      }
      st.ok = true;
    } catch (const std::exception& ex) {
      st.error = ex.what();
    }
  });
  SweepCell c;
  c.length = length;
  c.width = width;
  c.dimension = fragment.dimension();
  std::vector<double> rs, ss, vs;
  double s2 = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const auto& st = stats[k];
    if (!st.ok) {
      ++c.failures;
      if (c.failure_messages.size() < 5) c.failure_messages.push_back("realization " + std::to_string(k) + ": " + st.error);
      continue;
    }
    rs.push_back(st.r);
    ss.push_back(st.s_mean);
    vs.push_back(st.s_var);
    s2 += st.s2_mean;
  }
  c.realizations = static_cast<int>(rs.size());
  c.mean_r = detail::mean(rs);
  c.sem_r = detail::sem(rs);
  if (spec.entropy && !rs.empty()) {
    c.mean_s = detail::mean(ss);
    c.sem_s = detail::sem(ss);
    c.var_s = std::max(0.0, s2 / static_cast<double>(rs.size()) - c.mean_s * c.mean_s);
    c.var_s_within = detail::mean(vs);
    c.sem_var_s_within = detail::sem(vs);
  }
  return c;
}

inline SweepResult sweep(const SweepSpec& spec) {
  if (spec.realizations < 2) throw InvalidArgument("sweep: need at least 2 realizations per cell");
  if (spec.sizes.empty() || spec.widths.empty()) throw InvalidArgument("sweep: empty size or width grid");
  SweepResult out;
  out.spec = spec;
  for (int length : spec.sizes) {
    const KrylovFragment frag = build_fragment(root_template(spec.root, length), Regime::WeakNonlocal);
    for (double w : spec.widths) out.cells.push_back(sweep_cell(spec, frag, w));
  }
  return out;
}

inline nlohmann::json to_json(const SweepCell& c) {
  return {{"L", c.length},
          {"width", c.width},
          {"dimension", c.dimension},
          {"realizations", c.realizations},
          {"failures", c.failures},
          {"failure_messages", c.failure_messages},
          {"mean_r", c.mean_r},
          {"sem_r", c.sem_r},
          {"mean_S", c.mean_s},
          {"sem_S", c.sem_s},
          {"var_S", c.var_s},
          {"var_S_within", c.var_s_within},
          {"sem_var_S_within", c.sem_var_s_within}};
}

inline nlohmann::json to_json(const SweepResult& r) {
  nlohmann::json cells = nlohmann::json::array();
  for (const auto& c : r.cells) cells.push_back(to_json(c));
  const auto& s = r.spec;
  return {{"root", std::string(to_string(s.root))},
          {"sizes", s.sizes},
          {"widths", s.widths},
          {"realizations", s.realizations},
          {"seed", s.seed},
          {"seed_rule", "splitmix64 chain over (seed, L, width bits, index)"},
          {"omega", s.params.omega},
          {"delta", s.params.delta},
          {"v", s.params.v()},
          {"cutoff", s.disorder.cutoff},
          {"mid_count", s.mid_count},
          {"cells", cells}};
}

inline void write_csv(std::ostream& os, const SweepResult& r) {
  os << "L,width,dimension,realizations,failures,mean_r,sem_r,mean_S,sem_S,var_S,var_S_within,sem_var_S_within\n";
  char buf[512];
  for (const auto& c : r.cells) {
    std::snprintf(buf, sizeof buf, "%d,%.10g,%zu,%d,%d,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g\n", c.length, c.width,
                  c.dimension, c.realizations, c.failures, c.mean_r, c.sem_r, c.mean_s, c.sem_s, c.var_s,
                  c.var_s_within, c.sem_var_s_within);
    os << buf;
  }
}

}  // namespace rydfrag
