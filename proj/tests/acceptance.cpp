// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fail.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "rydfrag/rydfrag.hpp"

using namespace rydfrag;

namespace {

int failures = 0;

void report(int id, const char* name, bool pass, const std::string& detail, double seconds) {
  std::printf("%s %2d %-26s %s [%.1fs]\n", pass ? "PASS" : "FAIL", id, name, detail.c_str(), seconds);
  std::fflush(stdout);
  if (!pass) ++failures;
}

std::string format(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

class Clock {
 public:
  double seconds() const { return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count(); }

 private:
  std::chrono::steady_clock::time_point t0_ = std::chrono::steady_clock::now();
};

bool reversal_closed(const Basis& b) {
  for (auto s : b.states())
    if (!b.contains(SpinConfig::reverse_bits(s, b.sites()))) return false;
  return true;
}

double mean_r(const HamiltonianMatrix& h) {
  const auto eig = diagonalize(h, SpectrumWindow::full(), false);
  return r_statistics(std::vector<double>(eig.energies.data(), eig.energies.data() + eig.energies.size())).mean_r;
}

// Restricted to the inversion-even block when the fragment allows it.
HamiltonianMatrix symmetric_block(const HamiltonianMatrix& h, const KrylovFragment& f) {
  if (!reversal_closed(f.basis)) return h;
  return project_inversion_even(h, symmetrize_inversion(f.basis));
}

ModelParams vdw(double delta_over_omega, double v_over_delta) {
  ModelParams p = ModelParams::from_ratios(delta_over_omega, v_over_delta, Regime::WeakNonlocal);
  p.interaction = InteractionProfile::van_der_waals(p.v(), 3);
  return p;
}

void fragment_counting(std::vector<FragmentationStats>& stats) {
  Clock c;
  std::vector<double> x, y;
  for (int length = 8; length <= 24; length += 2) {
    const auto st = fragmentation_stats(length, nn_half_filling_key(length), Regime::NnOnly);
    x.push_back(length);
    y.push_back(static_cast<double>(st.largest) / static_cast<double>(st.sector_dimension));
    stats.push_back(st);
  }
  const auto f = exponential_fit(x, y);
  const bool pass = std::abs(f.base - 0.828) <= 0.01 && std::abs(f.prefactor - 1.08) <= 0.15;
  report(1, "fragment-counting", pass,
         format("D_max/D_s = %.4f x %.4f^L over even L 8..24 (want 1.08+-0.15 x 0.828+-0.01^L)", f.prefactor, f.base),
         c.seconds());
}

void frozen_states(const std::vector<FragmentationStats>& stats) {
  Clock c;
  bool pass = true;
  std::string detail;
  for (const auto& st : stats) {
    const int length = st.key.n_r * 2;
    if (length % 4) continue;
    const double want = length * length / 32.0 + 3.0 * length / 8.0 + 1.0;
    pass = pass && static_cast<double>(st.frozen) == want;
    detail += format("L=%d:%zu/%g ", length, st.frozen, want);
  }
  report(2, "frozen-states", pass, detail, c.seconds());
}

void golden_dimensions() {
  Clock c;
  const auto a = build_fragment(root_template(RootTemplate::DimerTrainMagnon, 26), Regime::NnOnly).dimension();
  const auto m = build_fragment(root_template(RootTemplate::NeelMagnon, 24), Regime::NnOnly);
  const auto b = symmetrize_inversion(m.basis).size();
  report(3, "golden-dimensions", a == 27132 && b == 12190,
         format("root L=26 fragment %zu (want 27132), L=24 inversion-even magnon %zu (want 12190)", a, b), c.seconds());
}

void nnn_scaling() {
  Clock c;
  struct Case {
    Regime regime;
    std::vector<int> sizes;
    double target;
  };
  const Case cases[3] = {{Regime::NnnEqual, {12, 18, 24}, 0.577},
                         {Regime::NnnHalf, {14, 15, 16, 17, 18, 19, 20, 21, 22, 23, 24, 25, 26}, 0.917},
                         {Regime::NnnGeneric, {15, 16, 17, 18, 19, 20, 21, 22, 23, 24, 25, 26, 27, 28, 29}, 0.913}};
  bool pass = true;
  std::string detail;
  for (const auto& k : cases) {
    std::vector<double> x, y;
    for (int length : k.sizes) {
      // V' = V: the weakly fragmented n_R = 3m+1 sector at L = 6m.
      const SectorKey key = k.regime == Regime::NnnEqual
                                ? SectorKey{length / 2 + 1, {length / 2 + 1}, Regime::NnnEqual}
                                : largest_sector(length, k.regime).key;
      const auto st = fragmentation_stats(length, key, k.regime);
      const double ratio = static_cast<double>(st.largest) / static_cast<double>(st.sector_dimension);
      x.push_back(length);
      // weak fragmentation: the missing weight 1 - D_max/D_s is what decays
      y.push_back(k.regime == Regime::NnnEqual ? 1.0 - ratio : ratio);
    }
    const auto f = exponential_fit(x, y);
    pass = pass && std::abs(f.base - k.target) <= 0.015;
    detail += format("%s %.4f (want %.3f) ", std::string(to_string(k.regime)).c_str(), f.base, k.target);
  }
  report(4, "nnn-scaling", pass, detail + "+-0.015 (nnn-equal fits 1 - D_max/D_s)", c.seconds());
}

void sw_correctness() {
  Clock c;
  double worst = 0.0;
  auto rel = [](double a, double b) { return std::abs(a - b) / std::abs(b); };
  for (double dw : {4.0, 5.0, 10.0})
    for (double vd : {0.1, 0.5, 2.0}) {
      const auto p = ModelParams::from_ratios(dw, vd);
      const auto cp = analytic_couplings(p);
      worst = std::max(worst, rel(numeric_sw_amplitude(SpinConfig::parse("001000"), SpinConfig::parse("000100"), p), cp.j_p));
      worst = std::max(worst, rel(numeric_sw_amplitude(SpinConfig::parse("110111"), SpinConfig::parse("111011"), p), cp.j_q));
      const auto f = build_fragment(root_template(RootTemplate::DimerTrain, 12), Regime::NnOnly);
      for (const auto& e : f.edges) {
        const auto a = f.basis.config(e.a), b = f.basis.config(e.b);
        worst = std::max(worst, rel(numeric_sw_amplitude(a, b, p), analytic_hopping(a, e.bond, cp)));
      }
    }
  report(5, "sw-correctness", worst <= 1e-10, format("max relative deviation %.2e (want <= 1e-10)", worst), c.seconds());
}

double dynamics_deviation(const ModelParams& p) {
  QuenchOptions o;
  o.time_unit = 1.0 / hopping_p(p);
  o.entropy = false;
  const auto times = linear_time_grid(0.0, 10.0, 201);
  const HamiltonianMatrix hx = build_exact_hamiltonian(12, p, 3);
  const Propagator exact(hx, o);
  double worst = 0.0;
  for (const char* s : {"110110110000", "110011001100", "100100100100"}) {
    const auto init = SpinConfig::parse(s);
    const auto f = build_fragment(init, p.regime);
    const auto rx = evolve(init, exact, times, o);
    for (auto mode : {CouplingMode::Analytic, CouplingMode::NumericSW}) {
      const auto re = evolve(init, build_effective_hamiltonian(f, p, {mode}), times, o);
      worst = std::max(worst, (re.density - rx.density).cwiseAbs().maxCoeff());
    }
  }
  return worst;
}

void effective_dynamics() {
  Clock c;
  const double nn = dynamics_deviation(ModelParams::from_ratios(5.0, 0.5));
  const double vd = dynamics_deviation(vdw(5.0, 0.2));
  report(6, "effective-vs-exact", nn <= 0.15 && vd <= 0.15,
         format("max |n_eff - n_exact| for t <= 10/J_P: nn %.3f, vdw %.3f (want <= 0.15)", nn, vd), c.seconds());
}

void ergodicity_dial() {
  Clock c;
  const auto st = fragmentation_stats(22, nn_half_filling_key(22), Regime::NnOnly);
  const auto f = build_fragment(st.largest_canonical, Regime::NnOnly);
  const double vds[3] = {0.01, 1.0, 50.0}, want[3] = {0.386, 0.53, 0.391};
  bool pass = true;
  std::string detail = format("dim %zu: ", f.dimension());
  for (int k = 0; k < 3; ++k) {
    const double r = mean_r(symmetric_block(build_effective_hamiltonian(f, ModelParams::from_ratios(5.0, vds[k])), f));
    pass = pass && std::abs(r - want[k]) <= 0.04;
    detail += format("V/D=%g <r>=%.4f (want %.3f) ", vds[k], r, want[k]);
  }
  report(7, "ergodicity-dial", pass, detail + "+-0.04", c.seconds());
}

void range_breaks_integrability() {
  Clock c;
  const auto f = build_fragment(root_template(RootTemplate::NeelMagnon, 21), Regime::WeakNonlocal);
  ModelParams p = ModelParams::from_ratios(5.0, 0.5, Regime::WeakNonlocal);
  const EffectiveOptions eo{CouplingMode::NumericSW};
  const double r0 = mean_r(symmetric_block(build_effective_hamiltonian(f, p, eo), f));
  p.interaction = InteractionProfile::by_range({p.v(), 0.0, p.v() / 729.0});
  const double r1 = mean_r(symmetric_block(build_effective_hamiltonian(f, p, eo), f));
  report(8, "range-breaks-integrability", std::abs(r0 - kPoissonMeanR) <= 0.04 && r1 - r0 >= 0.05,
         format("magnon L=21: <r> %.4f (nn) -> %.4f (+V/729), shift %+.4f (want >= 0.05)", r0, r1, r1 - r0),
         c.seconds());
}

void mbl_crossover() {
  Clock c;
  SweepSpec s;
  s.sizes = {11, 14, 17};
  s.widths = {0.001, 0.1};
  s.realizations = 200;
  s.params = vdw(4.0, 0.2);
  s.entropy = false;
  const auto r = sweep(s);
  bool pass = true;
  std::string detail;
  for (int length : s.sizes) {
    const double lo = r.cell(length, 0.001).mean_r, hi = r.cell(length, 0.1).mean_r;
    pass = pass && lo - hi >= 0.10 && std::abs(hi - kPoissonMeanR) <= 0.04 && r.cell(length, 0.1).failures == 0;
    detail += format("L=%d %.3f->%.3f ", length, lo, hi);
  }
  report(9, "mbl-crossover", pass, detail + "(want drop >= 0.10, end 0.386+-0.04)", c.seconds());
}

void scaling_collapse() {
  Clock c;
  std::mt19937_64 g(6);
  std::normal_distribution<double> noise;
  std::vector<FssPoint> d;
  for (int length : {11, 14, 17, 20, 23})
    for (int k = 0; k < 49; ++k) {
      const double w = 0.001 + 0.0005 * k;
      const double x = scaling_variable(w, length, 0.013, 0.93, ScalingForm::Standard);
      d.push_back({length, w, (0.15 * (1.0 - std::tanh(10.0 * x)) + 0.02) * (1.0 + 0.01 * noise(g))});
    }
  const auto r = fss_collapse(d);
  const double ew = std::abs(r.width_c / 0.013 - 1.0), en = std::abs(r.nu / 0.93 - 1.0);
  report(10, "scaling-collapse", ew <= 0.05 && en <= 0.05,
         format("recovered dR_c=%.5f nu=%.4f from planted (0.013, 0.93): errors %.1f%%, %.1f%% (want <= 5%%)", r.width_c,
                r.nu, 100 * ew, 100 * en),
         c.seconds());
}

void restricted_thermalization() {
  Clock c;
  const auto p = ModelParams::from_ratios(4.0, 0.2);
  const auto init = root_template(RootTemplate::DimerTrain, 16);
  const auto h = build_effective_hamiltonian(build_fragment(init, p.regime), p);
  QuenchOptions o;
  o.time_unit = 1.0 / hopping_p(p);
  o.entropy = false;
  const auto q = evolve(init, h, linear_time_grid(0.0, 40.0, 801), o);
  const double avg = time_average(q.times, q.imbalance, 20.0, 40.0);
  const double eth = eth_prediction(h, init, imbalance_operator(*h.basis(), init), 50);
  const bool pass = std::abs(avg - eth) <= 0.05 && avg >= 0.1 && avg <= 0.3 && eth >= 0.1 && eth <= 0.3;
  report(11, "restricted-thermalization", pass,
         format("L=16 dim %zu: time-averaged I %.4f, ETH(N=50) %.4f (want |diff| <= 0.05, both in [0.1, 0.3])",
                h.dimension(), avg, eth),
         c.seconds());
}

void property_suite() {
  Clock c;
  std::vector<std::string> broken;
  auto check = [&](bool ok, const char* what) {
    if (!ok) broken.push_back(what);
  };

  // Hermiticity and charge blocks.
  const auto p = vdw(4.0, 0.2);
  for (auto kind : {RootTemplate::DimerTrain, RootTemplate::Z3Hole}) {
    const int length = kind == RootTemplate::DimerTrain ? 12 : 14;
    const auto f = build_fragment(root_template(kind, length), Regime::WeakNonlocal);
    const auto h = build_effective_hamiltonian(f, p, {CouplingMode::NumericSW, 1});
    check(h.is_symmetric(0.0), "hermiticity");
    const auto key = charges(f.root, Regime::NnOnly);
    bool blocked = true;
    for (const auto& e : h.upper_entries()) blocked = blocked && charges(f.basis.config(e.row), Regime::NnOnly) == key;
    check(blocked, "charge blocks");
  }
  check(build_exact_hamiltonian(8, p).is_symmetric(0.0), "hermiticity (exact)");

  // Undirected move graph and complete sector partitions.
  bool undirected = true, complete = true;
  for (Regime r : kAllRegimes) {
    for (std::uint64_t b = 0; b < (1u << 10); ++b)
      for (const auto& [d, bond] : allowed_moves(SpinConfig(b, 10), r)) {
        bool back = false;
        for (const auto& [e, bond2] : allowed_moves(d, r)) back = back || e.bits() == b;
        undirected = undirected && back;
      }
    for (const auto& s : sector_census(12, r)) {
      std::size_t covered = 0;
      for (const auto& part : sector_fragments(12, s.key, r)) covered += part.size();
      complete = complete && covered == s.dimension;
    }
  }
  check(undirected, "graph symmetry");
  check(complete, "sector partition");

  // Unitarity and energy conservation along a Krylov evolution.
  {
    const auto q = ModelParams::from_ratios(5.0, 1.0);
    const auto init = root_template(RootTemplate::DimerTrainMagnon, 14);
    const auto h = build_effective_hamiltonian(build_fragment(init, Regime::NnOnly), q);
    QuenchOptions o;
    o.eig_limit = 0;
    o.time_unit = 1.0 / hopping_p(q);
    const auto r = evolve(init, h, linear_time_grid(0.0, 30.0, 31), o);
    bool ok = true;
    for (std::size_t k = 0; k < r.times.size(); ++k)
      ok = ok && std::abs(r.norm[k] - 1.0) <= 1e-8 && std::abs(r.energy[k] - r.energy[0]) <= 1e-8 * std::abs(r.energy[0]);
    check(ok, "unitarity/energy");
  }

  // Entropy at cut l of a state equals the entropy at L-l of its mirror image.
  {
    std::mt19937_64 rng(11);
    std::normal_distribution<double> g;
    const auto f = build_fragment(root_template(RootTemplate::NeelMagnon, 12), Regime::NnOnly);
    std::vector<double> a(f.dimension());
    double norm = 0.0;
    for (double& v : a) {
      v = g(rng);
      norm += v * v;
    }
    for (double& v : a) v /= std::sqrt(norm);
    std::vector<std::pair<std::uint64_t, double>> rev;
    for (std::size_t k = 0; k < f.dimension(); ++k) rev.emplace_back(SpinConfig::reverse_bits(f.basis.state(k), 12), a[k]);
    std::sort(rev.begin(), rev.end());
    std::vector<std::uint64_t> rs;
    std::vector<double> ra;
    for (auto& [s, v] : rev) {
      rs.push_back(s);
      ra.push_back(v);
    }
    const Basis rb(12, rs);
    bool ok = true;
    for (int cut = 1; cut < 12; ++cut)
      ok = ok && std::abs(eigenstate_entropy<double>(a, f.basis, cut) - eigenstate_entropy<double>(ra, rb, 12 - cut)) < 1e-10;
    check(ok, "entropy cut symmetry");
  }

  // r-statistics calibration on synthetic spectra.
  double poisson = 0.0, goe = 0.0;
  {
    std::mt19937_64 rng(2024);
    std::exponential_distribution<double> ex(1.0);
    std::vector<double> e(100000);
    double x = 0.0;
    for (double& v : e) v = (x += ex(rng));
    poisson = r_statistics(e).mean_r;
    check(std::abs(poisson - kPoissonMeanR) <= 0.005, "Poisson calibration");
  }
  {
    std::mt19937_64 rng(99);
    std::normal_distribution<double> g;
    const int n = 1000;
    double sum = 0.0;
    std::size_t count = 0;
    for (int rep = 0; rep < 8; ++rep) {
      Eigen::MatrixXd m(n, n);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j <= i; ++j) m(i, j) = m(j, i) = (i == j ? std::sqrt(2.0) : 1.0) * g(rng);
      const Eigen::VectorXd w = linalg::eigh(m, false).values;
      const auto st = r_statistics(std::vector<double>(w.data() + n / 4, w.data() + 3 * n / 4));
      sum += st.mean_r * static_cast<double>(st.ratios.size());
      count += st.ratios.size();
    }
    goe = sum / static_cast<double>(count);
    check(std::abs(goe - kGoeMeanR) <= 0.01, "GOE calibration");
  }

  std::string detail = format("Poisson <r>=%.4f, GOE <r>=%.4f", poisson, goe);
  for (const auto& b : broken) detail += "; broken: " + b;
  report(12, "property-suite", broken.empty(), detail, c.seconds());
}

}  // namespace

// Optional arguments pick criteria by number; default runs all twelve.
int main(int argc, char** argv) {
  std::set<int> only;
  for (int k = 1; k < argc; ++k) only.insert(std::atoi(argv[k]));
  auto want = [&](int id) { return only.empty() || only.count(id) > 0; };
  std::vector<FragmentationStats> stats;
  if (want(1) || want(2)) fragment_counting(stats);
  if (want(2)) frozen_states(stats);
  if (want(3)) golden_dimensions();
  if (want(4)) nnn_scaling();
  if (want(5)) sw_correctness();
  if (want(6)) effective_dynamics();
  if (want(7)) ergodicity_dial();
  if (want(8)) range_breaks_integrability();
  if (want(9)) mbl_crossover();
  if (want(10)) scaling_collapse();
  if (want(11)) restricted_thermalization();
  if (want(12)) property_suite();
  std::printf("%d failed\n", failures);
  return failures == 0 ? 0 : 1;
}
