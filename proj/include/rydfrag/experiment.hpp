#pragma once

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "rydfrag/basis.hpp"
#include "rydfrag/constraints.hpp"
#include "rydfrag/disorder.hpp"
#include "rydfrag/dynamics.hpp"
#include "rydfrag/errors.hpp"
#include "rydfrag/fss.hpp"
#include "rydfrag/model.hpp"
#include "rydfrag/params.hpp"
#include "rydfrag/regime.hpp"
#include "rydfrag/spectral.hpp"
#include "rydfrag/templates.hpp"

namespace rydfrag {

using json = nlohmann::json;

inline constexpr const char* kOutputDirEnv = "RYDFRAG_OUTPUT_DIR";

enum class ExitCode : int { Ok = 0, ConfigError = 2, SolverError = 3 };

// Everything one experiment needs. Unset optional fields fall back to the
// per-kind defaults documented in README.md.
struct ExperimentConfig {
  std::string kind;  // sectors | fragment | spectrum | quench | disorder-sweep | fss
  std::string name;  // output file prefix, defaults to kind
  std::string output_dir;
  std::string note;

  // model
  int length = 12;
  double delta_over_omega = 5.0;
  double v_over_delta = 0.5;
  std::string profile = "nn";           // nn | vdw | custom
  int cutoff = 3;                        // vdw range
  std::vector<double> couplings_over_v;  // custom: V_d/V for d = 2, 3, ...
  std::string regime = "auto";
  std::string coupling = "analytic";     // analytic | numeric

  // root / sector
  std::string root;           // bitstring literal
  std::string root_template;  // dimer-train | dimer-train-magnon | neel3-magnon | z3-hole
  bool symmetrize = false;    // inversion-even subspace when the fragment allows it

  // fragment
  bool dump_basis = false;
  bool export_matrix = false;

  // spectrum
  std::size_t mid_count = 0;  // 0 = full spectrum
  bool entropy = true;

  // quench
  std::string init;
  std::string time_grid = "log";  // log | linear
  double t_min = 0.1;             // units of 1/J_P
  double t_max = 40.0;
  std::size_t time_points = 200;
  bool compare_exact = false;
  std::size_t eth_count = 50;     // 0 disables the ETH prediction
  double average_from = 20.0;     // time-average window, units of 1/J_P
  double average_to = 40.0;

  // disorder
  std::vector<int> sizes;
  std::vector<double> widths;
  int realizations = 200;
  std::uint64_t seed = 1;

  // fss
  std::string input;                    // sweep JSON
  std::string observable = "S/L";       // S/L | S | r
  std::string scaling_form = "standard";
  double width_c_lo = 0.0, width_c_hi = 0.05;
  double nu_lo = 0.3, nu_hi = 3.0;
  int fss_grid = 41;

  unsigned jobs = 1;
};

namespace detail {

inline const std::set<std::string>& config_keys() {
  static const std::set<std::string> keys = {
      "kind", "name", "output_dir", "note", "L", "delta_over_omega", "v_over_delta", "profile", "cutoff",
      "couplings_over_v", "regime", "coupling", "root", "root_template", "symmetrize", "dump_basis",
      "export_matrix", "mid_count", "entropy", "init", "time_grid", "t_min", "t_max", "time_points",
      "compare_exact", "eth_count", "average_from", "average_to", "sizes", "widths", "realizations", "seed",
      "input", "observable", "scaling_form", "width_c_lo", "width_c_hi", "nu_lo", "nu_hi", "fss_grid", "jobs"};
  return keys;
}

template <typename T>
void read_field(const json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("config field '") + key + "': " + e.what());
  }
}

}  // namespace detail

inline const std::vector<std::string>& experiment_kinds() {
  static const std::vector<std::string> k = {"sectors", "fragment", "spectrum", "quench", "disorder-sweep", "fss"};
  return k;
}

inline ExperimentConfig config_from_json(const json& j) {
  if (!j.is_object()) throw InvalidArgument("config must be a JSON object");
  for (const auto& [k, v] : j.items())
    if (!detail::config_keys().count(k)) throw InvalidArgument("config: unknown key '" + k + "'");
  ExperimentConfig c;
  using detail::read_field;
  read_field(j, "kind", c.kind);
  read_field(j, "name", c.name);
  read_field(j, "output_dir", c.output_dir);
  read_field(j, "note", c.note);
  read_field(j, "L", c.length);
  read_field(j, "delta_over_omega", c.delta_over_omega);
  read_field(j, "v_over_delta", c.v_over_delta);
  read_field(j, "profile", c.profile);
  read_field(j, "cutoff", c.cutoff);
  read_field(j, "couplings_over_v", c.couplings_over_v);
  read_field(j, "regime", c.regime);
  read_field(j, "coupling", c.coupling);
  read_field(j, "root", c.root);
  read_field(j, "root_template", c.root_template);
  read_field(j, "symmetrize", c.symmetrize);
  read_field(j, "dump_basis", c.dump_basis);
  read_field(j, "export_matrix", c.export_matrix);
  read_field(j, "mid_count", c.mid_count);
  read_field(j, "entropy", c.entropy);
  read_field(j, "init", c.init);
  read_field(j, "time_grid", c.time_grid);
  read_field(j, "t_min", c.t_min);
  read_field(j, "t_max", c.t_max);
  read_field(j, "time_points", c.time_points);
  read_field(j, "compare_exact", c.compare_exact);
  read_field(j, "eth_count", c.eth_count);
  read_field(j, "average_from", c.average_from);
  read_field(j, "average_to", c.average_to);
  read_field(j, "sizes", c.sizes);
  read_field(j, "widths", c.widths);
  read_field(j, "realizations", c.realizations);
  read_field(j, "seed", c.seed);
  read_field(j, "input", c.input);
  read_field(j, "observable", c.observable);
  read_field(j, "scaling_form", c.scaling_form);
  read_field(j, "width_c_lo", c.width_c_lo);
  read_field(j, "width_c_hi", c.width_c_hi);
  read_field(j, "nu_lo", c.nu_lo);
  read_field(j, "nu_hi", c.nu_hi);
  read_field(j, "fss_grid", c.fss_grid);
  read_field(j, "jobs", c.jobs);
  return c;
}

inline json to_json(const ExperimentConfig& c) {
  return {{"kind", c.kind},
          {"name", c.name},
          {"output_dir", c.output_dir},
          {"note", c.note},
          {"L", c.length},
          {"delta_over_omega", c.delta_over_omega},
          {"v_over_delta", c.v_over_delta},
          {"profile", c.profile},
          {"cutoff", c.cutoff},
          {"couplings_over_v", c.couplings_over_v},
          {"regime", c.regime},
          {"coupling", c.coupling},
          {"root", c.root},
          {"root_template", c.root_template},
          {"symmetrize", c.symmetrize},
          {"dump_basis", c.dump_basis},
          {"export_matrix", c.export_matrix},
          {"mid_count", c.mid_count},
          {"entropy", c.entropy},
          {"init", c.init},
          {"time_grid", c.time_grid},
          {"t_min", c.t_min},
          {"t_max", c.t_max},
          {"time_points", c.time_points},
          {"compare_exact", c.compare_exact},
          {"eth_count", c.eth_count},
          {"average_from", c.average_from},
          {"average_to", c.average_to},
          {"sizes", c.sizes},
          {"widths", c.widths},
          {"realizations", c.realizations},
          {"seed", c.seed},
          {"input", c.input},
          {"observable", c.observable},
          {"scaling_form", c.scaling_form},
          {"width_c_lo", c.width_c_lo},
          {"width_c_hi", c.width_c_hi},
          {"nu_lo", c.nu_lo},
          {"nu_hi", c.nu_hi},
          {"fss_grid", c.fss_grid},
          {"jobs", c.jobs}};
}

// Field-level checks, plus filling of defaults that depend on other fields.
inline ExperimentConfig resolve(ExperimentConfig c) {
  auto bad = [](const std::string& field, const std::string& why) {
    return InvalidArgument("config field '" + field + "': " + why);
  };
  if (std::find(experiment_kinds().begin(), experiment_kinds().end(), c.kind) == experiment_kinds().end())
    throw bad("kind", "expected one of sectors, fragment, spectrum, quench, disorder-sweep, fss; got '" + c.kind + "'");
  if (c.name.empty()) c.name = c.kind;
  if (c.output_dir.empty()) {
    const char* env = std::getenv(kOutputDirEnv);
    c.output_dir = env && *env ? env : ".";
  }
  if (!c.init.empty()) c.length = SpinConfig::parse(c.init).length();
  else if (!c.root.empty()) c.length = SpinConfig::parse(c.root).length();
  if (c.length < 1 || c.length > kMaxSites) throw bad("L", "must lie in [1, 56]");
  if (!(c.delta_over_omega > 0.0)) throw bad("delta_over_omega", "must be > 0");
  if (!(c.v_over_delta >= 0.0)) throw bad("v_over_delta", "must be >= 0");
  if (c.profile != "nn" && c.profile != "vdw" && c.profile != "custom")
    throw bad("profile", "expected nn, vdw or custom");
  if (c.cutoff < 1) throw bad("cutoff", "must be >= 1");
  if (c.regime != "auto") parse_regime(c.regime);
  if (c.coupling != "analytic" && c.coupling != "numeric") throw bad("coupling", "expected analytic or numeric");
  if (!c.root_template.empty()) parse_root_template(c.root_template);
  if (c.time_grid != "log" && c.time_grid != "linear") throw bad("time_grid", "expected log or linear");
  if (c.time_points < 2) throw bad("time_points", "must be >= 2");
  if (!(c.t_max > 0.0) || (c.time_grid == "log" && !(c.t_min > 0.0 && c.t_min < c.t_max)))
    throw bad("t_min/t_max", "need 0 < t_min < t_max (t_max > 0 for linear grids)");
  if (c.kind == "disorder-sweep") {
    if (c.root_template.empty()) c.root_template = "z3-hole";
    if (c.sizes.empty()) c.sizes = {11, 14, 17, 20};
    if (c.widths.empty()) c.widths = {0.001, 0.002, 0.005, 0.01, 0.02, 0.05, 0.1};
    if (c.realizations < 2) throw bad("realizations", "must be >= 2");
  }
  if (c.kind == "fss") {
    if (c.input.empty()) throw bad("input", "fss needs the JSON of a disorder sweep");
    if (c.observable != "S/L" && c.observable != "S" && c.observable != "r")
      throw bad("observable", "expected S/L, S or r");
    if (c.scaling_form != "standard" && c.scaling_form != "literal")
      throw bad("scaling_form", "expected standard or literal");
  }
  if (c.kind == "quench" && c.init.empty() && c.root.empty() && c.root_template.empty())
    throw bad("init", "quench needs an initial state (init, root or root_template)");
  if ((c.kind == "fragment" || c.kind == "spectrum") && c.root.empty() && c.root_template.empty())
    throw bad("root", "needs a root bitstring or root_template");
  return c;
}

inline ModelParams model_params(const ExperimentConfig& c) {
  ModelParams p;
  p.omega = 1.0;
  p.delta = c.delta_over_omega;
  const double v = c.v_over_delta * p.delta;
  if (c.profile == "nn") {
    p.interaction = InteractionProfile::nearest_neighbour(v);
  } else if (c.profile == "vdw") {
    p.interaction = InteractionProfile::van_der_waals(v, c.cutoff);
  } else {
    std::vector<double> r{v};
    for (double x : c.couplings_over_v) r.push_back(v * x);
    p.interaction = InteractionProfile::by_range(std::move(r));
  }
  p.regime = c.regime == "auto" ? classify_regime(p) : parse_regime(c.regime);
  return p;
}

inline SpinConfig resolve_root(const ExperimentConfig& c) {
  if (!c.init.empty()) return SpinConfig::parse(c.init);
  if (!c.root.empty()) return SpinConfig::parse(c.root);
  return root_template(parse_root_template(c.root_template), c.length);
}

// Writes via a temporary file and rename so readers never see partial output.
inline void write_atomic(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::create_directories(path.parent_path().empty() ? "." : path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw InvalidArgument("cannot open output file " + tmp.string());
    os << content;
    if (!os) throw InvalidArgument("failed writing " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

struct RunResult {
  json summary;                     // also written as <name>.json
  std::vector<std::string> files;   // everything written
};

namespace detail {

class Outputs {
 public:
  Outputs(const ExperimentConfig& c, RunResult& r) : cfg_(c), result_(r) {}

  std::filesystem::path path(const std::string& suffix) const {
    return std::filesystem::path(cfg_.output_dir) / (cfg_.name + suffix);
  }

  // CSV tables carry the resolved config as a leading comment line.
  void csv(const std::string& suffix, const std::string& body) {
    write(suffix, "# " + to_json(cfg_).dump() + "\n" + body);
  }

  void write(const std::string& suffix, const std::string& content) {
    const auto p = path(suffix);
    write_atomic(p, content);
    result_.files.push_back(p.string());
  }

 private:
  const ExperimentConfig& cfg_;
  RunResult& result_;
};

inline std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

inline json key_json(const SectorKey& k) { return {{"n_R", k.n_r}, {"charges", k.charges}}; }

inline EffectiveOptions effective_options(const ExperimentConfig& c, const ModelParams& p) {
  EffectiveOptions eo;
  eo.mode = (c.coupling == "numeric" || move_class(p.regime) != Regime::NnOnly) ? CouplingMode::NumericSW
                                                                                 : CouplingMode::Analytic;
  return eo;
}

inline bool reversal_closed(const Basis& b) {
  for (std::uint64_t s : b.states())
    if (!b.contains(SpinConfig::reverse_bits(s, b.sites()))) return false;
  return true;
}

inline void run_sectors(const ExperimentConfig& c, Outputs& out, RunResult& r) {
  const ModelParams p = model_params(c);
  const Regime regime = c.regime == "auto" ? Regime::NnOnly : p.regime;
  std::ostringstream csv;
  csv << "n_R,charges,dimension,fragments,largest,frozen\n";
  std::size_t total = 0, fragments = 0;
  json rows = json::array();
  for (const auto& s : sector_census(c.length, regime)) {
    const auto st = fragmentation_stats(c.length, s.key, regime);
    total += s.dimension;
    fragments += st.fragments;
    std::string ch;
    for (std::size_t k = 0; k < s.key.charges.size(); ++k) ch += (k ? ";" : "") + std::to_string(s.key.charges[k]);
    csv << s.key.n_r << ',' << ch << ',' << s.dimension << ',' << st.fragments << ',' << st.largest << ','
        << st.frozen << '\n';
  }
  const auto big = largest_sector(c.length, regime);
  const auto bst = fragmentation_stats(c.length, big.key, regime);
  out.csv(".sectors.csv", csv.str());
  r.summary = {{"L", c.length},
               {"regime", std::string(to_string(regime))},
               {"total_states", total},
               {"fragments", fragments},
               {"largest_sector", key_json(big.key)},
               {"largest_sector_dimension", big.dimension},
               {"largest_fragment", bst.largest},
               {"largest_fragment_ratio", static_cast<double>(bst.largest) / static_cast<double>(big.dimension)},
               {"largest_sector_frozen", bst.frozen}};
}

inline void run_fragment(const ExperimentConfig& c, Outputs& out, RunResult& r) {
  const ModelParams p = model_params(c);
  const SpinConfig root = resolve_root(c);
  const KrylovFragment f = build_fragment(root, p.regime);
  r.summary = {{"root", root.str()},
               {"L", root.length()},
               {"regime", std::string(to_string(p.regime))},
               {"sector", key_json(charges(root, p.regime))},
               {"dimension", f.dimension()},
               {"edges", f.edges.size()},
               {"canonical", f.canonical().str()},
               {"inversion_closed", reversal_closed(f.basis)}};
  if (c.dump_basis) {
    json basis = json::array(), edges = json::array();
    for (std::uint64_t s : f.basis.states()) basis.push_back(SpinConfig(s, f.sites()).hex());
    for (const auto& e : f.edges) edges.push_back({e.a, e.b, e.bond.site + 1, static_cast<int>(e.bond.span)});
    out.write(".fragment.json", json{{"config", to_json(c)}, {"root", root.str()}, {"dimension", f.dimension()},
                                     {"basis", basis}, {"edges", edges}}
                                    .dump(1) +
                                    "\n");
  }
  if (c.export_matrix) {
    const auto h = build_effective_hamiltonian(f, p, effective_options(c, p));
    std::ostringstream os;
    h.write_coordinate(os);
    out.write(".matrix.coo", os.str());
  }
}

inline void run_spectrum(const ExperimentConfig& c, Outputs& out, RunResult& r) {
  const ModelParams p = model_params(c);
  const SpinConfig root = resolve_root(c);
  const KrylovFragment f = build_fragment(root, p.regime);
  HamiltonianMatrix h = build_effective_hamiltonian(f, p, effective_options(c, p));
  bool symmetrized = false;
  if (c.symmetrize && reversal_closed(f.basis)) {
    h = project_inversion_even(h, symmetrize_inversion(f.basis));
    symmetrized = true;
  }
  const SpectrumWindow w = c.mid_count ? SpectrumWindow::middle(c.mid_count) : SpectrumWindow::full();
  const EigenData eig = diagonalize(h, w, c.entropy);
  const std::vector<double> e(eig.energies.data(), eig.energies.data() + eig.energies.size());
  const auto eps = eig.energy_density();
  std::vector<double> s;
  if (c.entropy) s = eigenstate_entropies(eig, h);
  std::ostringstream csv;
  csv << "n,E,eps,S\n";
  for (std::size_t n = 0; n < e.size(); ++n)
    csv << (eig.offset + n) << ',' << fmt(e[n]) << ',' << fmt(eps[n]) << ',' << (c.entropy ? fmt(s[n]) : "nan") << '\n';
  out.csv(".spectrum.csv", csv.str());
  r.summary = {{"root", root.str()},
               {"regime", std::string(to_string(p.regime))},
               {"dimension", f.dimension()},
               {"matrix_dimension", h.dimension()},
               {"symmetrized", symmetrized},
               {"eigenpairs", e.size()},
               {"xi", hopping_ratio(p)}};
  if (e.size() >= 3) {
    const RStatistics st = r_statistics(e);
    std::ostringstream ps, rs;
    ps << "s,P\n";
    for (std::size_t k = 0; k < st.spacing_hist.density.size(); ++k)
      ps << fmt(st.spacing_hist.center(k)) << ',' << fmt(st.spacing_hist.density[k]) << '\n';
    rs << "r,P\n";
    for (std::size_t k = 0; k < st.r_hist.density.size(); ++k)
      rs << fmt(st.r_hist.center(k)) << ',' << fmt(st.r_hist.density[k]) << '\n';
    out.csv(".spacing.csv", ps.str());
    out.csv(".ratio.csv", rs.str());
    r.summary["mean_r"] = st.mean_r;
    r.summary["merged_levels"] = st.merged;
  }
}

inline std::vector<double> quench_times(const ExperimentConfig& c) {
  if (c.time_grid == "log") {
    std::vector<double> t = log_time_grid(c.t_min, c.t_max, c.time_points);
    t.insert(t.begin(), 0.0);
    return t;
  }
  return linear_time_grid(0.0, c.t_max, c.time_points);
}

inline void run_quench(const ExperimentConfig& c, Outputs& out, RunResult& r) {
  const ModelParams p = model_params(c);
  const SpinConfig init = resolve_root(c);
  if (c.compare_exact && init.length() > kMaxExactSites)
    throw ResourceLimit("compare_exact: the full chain is limited to L <= " + std::to_string(kMaxExactSites));
  const KrylovFragment f = build_fragment(init, p.regime);
  const HamiltonianMatrix h = build_effective_hamiltonian(f, p, effective_options(c, p));
  QuenchOptions qo;
  qo.time_unit = 1.0 / hopping_p(p);
  qo.entropy = c.entropy;
  const auto times = quench_times(c);
  const Propagator prop(h, qo);
  const QuenchResult q = evolve(init, prop, times, qo);
  std::ostringstream csv;
  q.write_csv(csv);
  out.csv(".quench.csv", csv.str());
  r.summary = {{"init", init.str()},
               {"regime", std::string(to_string(p.regime))},
               {"dimension", f.dimension()},
               {"j_p", hopping_p(p)},
               {"j_q", hopping_q(p)},
               {"time_unit", "1/J_P"}};
  const bool mixed = init.n_up() > 0 && init.n_up() < init.length();
  if (mixed && c.eth_count > 0) {
    const std::size_t n = std::min(c.eth_count, f.dimension());
    const double eth = eth_prediction(h, init, imbalance_operator(*h.basis(), init), n);
    r.summary["eth_imbalance"] = eth;
    r.summary["eth_count"] = n;
    if (c.average_to > c.average_from && c.average_from < times.back()) {
      r.summary["time_averaged_imbalance"] = time_average(q.times, q.imbalance, c.average_from, c.average_to);
      r.summary["average_window"] = {c.average_from, std::min(c.average_to, times.back())};
    }
  }
  if (c.compare_exact) {
    const HamiltonianMatrix hx = build_exact_hamiltonian(init.length(), p, std::max(1, p.interaction.reach()));
    QuenchOptions xo = qo;
    xo.entropy = false;
    const QuenchResult qx = evolve(init, hx, times, xo);
    std::ostringstream pc;
    pc << "t";
    for (int i = 1; i <= init.length(); ++i) pc << ",eff_n_" << i << ",exact_n_" << i;
    pc << ",max_dev\n";
    double worst = 0.0;
    for (std::size_t k = 0; k < times.size(); ++k) {
      pc << fmt(times[k]);
      double dev = 0.0;
      for (int i = 0; i < init.length(); ++i) {
        const double a = q.density(static_cast<Eigen::Index>(k), i), b = qx.density(static_cast<Eigen::Index>(k), i);
        dev = std::max(dev, std::abs(a - b));
        pc << ',' << fmt(a) << ',' << fmt(b);
      }
      worst = std::max(worst, dev);
      pc << ',' << fmt(dev) << '\n';
    }
    out.csv(".compare.csv", pc.str());
    r.summary["max_density_deviation"] = worst;
  }
}

inline void run_sweep(const ExperimentConfig& c, Outputs& out, RunResult& r) {
  SweepSpec s;
  s.root = parse_root_template(c.root_template);
  s.sizes = c.sizes;
  s.widths = c.widths;
  s.realizations = c.realizations;
  s.seed = c.seed;
  s.params = model_params(c);
  if (c.regime == "auto") s.params.regime = Regime::WeakNonlocal;
  s.disorder.cutoff = c.cutoff;
  s.mid_count = c.mid_count ? c.mid_count : kDefaultMidCount;
  s.entropy = c.entropy;
  s.jobs = c.jobs;
  const SweepResult res = sweep(s);
  std::ostringstream csv;
  write_csv(csv, res);
  out.csv(".sweep.csv", csv.str());
  r.summary = to_json(res);
}

inline void run_fss(const ExperimentConfig& c, Outputs& out, RunResult& r) {
  // Relative inputs not found in the working directory are looked up in the output directory.
  std::filesystem::path in_path(c.input);
  if (in_path.is_relative() && !std::filesystem::exists(in_path)) in_path = std::filesystem::path(c.output_dir) / in_path;
  std::ifstream is(in_path);
  if (!is) throw InvalidArgument("config field 'input': cannot open " + c.input);
  json in;
  try {
    in = json::parse(is);
  } catch (const json::exception& e) {
    throw InvalidArgument("config field 'input': " + std::string(e.what()));
  }
  const json& cells = in.contains("result") ? in.at("result").at("cells") : in.at("cells");
  std::vector<FssPoint> pts;
  for (const auto& cell : cells) {
    const int l = cell.at("L").get<int>();
    const double w = cell.at("width").get<double>();
    double y = 0.0;
    if (c.observable == "r") y = cell.at("mean_r").get<double>();
    else if (c.observable == "S") y = cell.at("mean_S").get<double>();
    else y = cell.at("mean_S").get<double>() / l;
    pts.push_back({l, w, y});
  }
  FssOptions o;
  o.width_c_lo = c.width_c_lo;
  o.width_c_hi = c.width_c_hi;
  o.nu_lo = c.nu_lo;
  o.nu_hi = c.nu_hi;
  o.grid = c.fss_grid;
  o.form = c.scaling_form == "literal" ? ScalingForm::Literal : ScalingForm::Standard;
  const FssResult f = fss_collapse(pts, o);
  std::ostringstream land;
  land << "width_c,nu,cost\n";
  for (const auto& [a, b, cost] : f.landscape) land << fmt(a) << ',' << fmt(b) << ',' << fmt(cost) << '\n';
  out.csv(".landscape.csv", land.str());
  r.summary = {{"width_c", f.width_c}, {"nu", f.nu},           {"cost", f.cost},
               {"converged", f.converged}, {"overlaps", f.overlaps}, {"observable", c.observable},
               {"scaling_form", c.scaling_form}};
}

}  // namespace detail

// Executes one experiment and writes <name>.json plus the kind's tables.
inline RunResult run(const ExperimentConfig& raw) {
  const ExperimentConfig c = resolve(raw);
  RunResult r;
  detail::Outputs out(c, r);
  if (c.kind == "sectors") detail::run_sectors(c, out, r);
  else if (c.kind == "fragment") detail::run_fragment(c, out, r);
  else if (c.kind == "spectrum") detail::run_spectrum(c, out, r);
  else if (c.kind == "quench") detail::run_quench(c, out, r);
  else if (c.kind == "disorder-sweep") detail::run_sweep(c, out, r);
  else detail::run_fss(c, out, r);
  out.write(".json", json{{"config", to_json(c)}, {"result", r.summary}}.dump(2) + "\n");
  return r;
}

// run() with errors mapped to exit codes and reported on `err`.
inline ExitCode run_guarded(const ExperimentConfig& c, std::ostream& log, std::ostream& err) {
  try {
    const RunResult r = run(c);
    log << r.summary.dump(2) << '\n';
    return ExitCode::Ok;
  } catch (const InvalidArgument& e) {
    err << "config error: " << e.what() << '\n';
    return ExitCode::ConfigError;
  } catch (const json::exception& e) {
    err << "config error: " << e.what() << '\n';
    return ExitCode::ConfigError;
  } catch (const ResourceLimit& e) {
    err << "resource limit: " << e.what() << '\n';
    return ExitCode::SolverError;
  } catch (const SolverError& e) {
    err << "solver error: " << e.what() << '\n';
    return ExitCode::SolverError;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "io error: " << e.what() << '\n';
    return ExitCode::ConfigError;
  } catch (const std::exception& e) {
    err << "solver error: " << e.what() << '\n';
    return ExitCode::SolverError;
  }
}

}  // namespace rydfrag
