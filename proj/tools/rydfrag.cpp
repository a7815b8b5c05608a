// Command-line front end: one subcommand per experiment kind. Flags override
// the JSON given with --config; the merged config is validated and echoed
// into every output file.

#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "rydfrag/experiment.hpp"

namespace {

using rydfrag::json;

enum class Kind { Int, Real, Str, Bool, IntList, RealList };

struct Flag {
  const char* name;
  const char* key;
  Kind kind;
  const char* help;
};

const std::vector<Flag> kModelFlags = {
    {"--delta-over-omega", "delta_over_omega", Kind::Real, "detuning over Rabi frequency"},
    {"--v-over-delta", "v_over_delta", Kind::Real, "NN interaction over detuning"},
    {"--profile", "profile", Kind::Str, "interaction profile: nn, vdw, custom"},
    {"--cutoff", "cutoff", Kind::Int, "vdW interaction range in sites"},
    {"--couplings-over-v", "couplings_over_v", Kind::RealList, "custom V_d/V for d=2,3,..."},
    {"--regime", "regime", Kind::Str, "auto, nn, nnn-equal, nnn-half, nnn-generic, weak-nonlocal"},
    {"--coupling", "coupling", Kind::Str, "analytic or numeric SW couplings"},
};

const std::vector<Flag> kRootFlags = {
    {"--root", "root", Kind::Str, "root configuration, e.g. 110110110000"},
    {"--root-template", "root_template", Kind::Str, "dimer-train, dimer-train-magnon, neel3-magnon, z3-hole"},
};

const std::vector<Flag> kFragmentFlags = {
    {"--dump-basis", "dump_basis", Kind::Bool, "write basis and edge list"},
    {"--export-matrix", "export_matrix", Kind::Bool, "write the effective Hamiltonian in COO form"},
};

const std::vector<Flag> kSpectrumFlags = {
    {"--mid-count", "mid_count", Kind::Int, "eigenpairs nearest the spectral middle (0 = all)"},
    {"--symmetrize", "symmetrize", Kind::Bool, "restrict to inversion-even states"},
    {"--no-entropy", "entropy", Kind::Bool, "skip eigenstate entropies"},
};

const std::vector<Flag> kQuenchFlags = {
    {"--init", "init", Kind::Str, "initial product state"},
    {"--time-grid", "time_grid", Kind::Str, "log or linear"},
    {"--t-min", "t_min", Kind::Real, "first log-grid time (1/J_P)"},
    {"--t-max", "t_max", Kind::Real, "last time (1/J_P)"},
    {"--time-points", "time_points", Kind::Int, "number of grid points"},
    {"--compare-exact", "compare_exact", Kind::Bool, "also evolve with the full Ising chain"},
    {"--eth-count", "eth_count", Kind::Int, "eigenstates in the ETH average (0 = off)"},
    {"--average-from", "average_from", Kind::Real, "time-average window start (1/J_P)"},
    {"--average-to", "average_to", Kind::Real, "time-average window end (1/J_P)"},
    {"--no-entropy", "entropy", Kind::Bool, "skip the half-chain entropy"},
};

const std::vector<Flag> kSweepFlags = {
    {"--sizes", "sizes", Kind::IntList, "system sizes, comma separated"},
    {"--widths", "widths", Kind::RealList, "disorder widths dR/R0, comma separated"},
    {"--realizations", "realizations", Kind::Int, "realizations per cell"},
    {"--seed", "seed", Kind::Int, "base seed"},
    {"--mid-count", "mid_count", Kind::Int, "mid-spectrum eigenpairs per realization"},
    {"--no-entropy", "entropy", Kind::Bool, "skip entanglement statistics"},
};

const std::vector<Flag> kFssFlags = {
    {"--input", "input", Kind::Str, "disorder-sweep JSON"},
    {"--observable", "observable", Kind::Str, "S/L, S or r"},
    {"--scaling-form", "scaling_form", Kind::Str, "standard or literal"},
    {"--width-c-lo", "width_c_lo", Kind::Real, "search range for the critical width"},
    {"--width-c-hi", "width_c_hi", Kind::Real, ""},
    {"--nu-lo", "nu_lo", Kind::Real, "search range for nu"},
    {"--nu-hi", "nu_hi", Kind::Real, ""},
    {"--fss-grid", "fss_grid", Kind::Int, "coarse scan points per axis"},
};

struct Bound {
  const Flag* flag;
  CLI::Option* opt;
  std::string value;
  std::vector<std::string> values;
};

json convert(const Bound& b) {
  const std::string key = b.flag->key;
  try {
    switch (b.flag->kind) {
      case Kind::Int: return std::stoll(b.value);
      case Kind::Real: return std::stod(b.value);
      case Kind::Str: return b.value;
      case Kind::Bool: return std::string(b.flag->name).rfind("--no-", 0) != 0;
      case Kind::IntList: {
        json a = json::array();
        for (const auto& v : b.values) a.push_back(std::stoll(v));
        return a;
      }
      case Kind::RealList: {
        json a = json::array();
        for (const auto& v : b.values) a.push_back(std::stod(v));
        return a;
      }
    }
  } catch (const std::logic_error&) {
    throw rydfrag::InvalidArgument("flag " + std::string(b.flag->name) + ": cannot parse '" + b.value + "'");
  }
  return nullptr;
}

struct Command {
  std::string kind;
  CLI::App* app = nullptr;
  std::vector<std::unique_ptr<Bound>> bound;
  std::string config_path;
  std::string output_dir;
  std::string name;
  std::string note;
  int length = 0;
  int jobs = 0;
};

void bind(Command& cmd, const std::vector<Flag>& flags) {
  for (const Flag& f : flags) {
    auto b = std::make_unique<Bound>();
    b->flag = &f;
    if (f.kind == Kind::Bool) b->opt = cmd.app->add_flag(f.name, f.help);
    else if (f.kind == Kind::IntList || f.kind == Kind::RealList)
      b->opt = cmd.app->add_option(f.name, b->values, f.help)->delimiter(',');
    else b->opt = cmd.app->add_option(f.name, b->value, f.help);
    cmd.bound.push_back(std::move(b));
  }
}

json merged_config(const Command& cmd) {
  json j = json::object();
  if (!cmd.config_path.empty()) {
    std::ifstream is(cmd.config_path);
    if (!is) throw rydfrag::InvalidArgument("cannot open config " + cmd.config_path);
    try {
      j = json::parse(is, nullptr, true, true);
    } catch (const json::exception& e) {
      throw rydfrag::InvalidArgument("config " + cmd.config_path + ": " + e.what());
    }
    if (j.contains("kind") && j["kind"] != cmd.kind)
      throw rydfrag::InvalidArgument("config kind '" + j["kind"].get<std::string>() + "' does not match subcommand '" +
                                     cmd.kind + "'");
  }
  j["kind"] = cmd.kind;
  if (cmd.length > 0) j["L"] = cmd.length;
  if (cmd.jobs > 0) j["jobs"] = cmd.jobs;
  if (!cmd.output_dir.empty()) j["output_dir"] = cmd.output_dir;
  if (!cmd.name.empty()) j["name"] = cmd.name;
  if (!cmd.note.empty()) j["note"] = cmd.note;
  for (const auto& b : cmd.bound)
    if (b->opt->count() > 0) j[b->flag->key] = convert(*b);
  return j;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hilbert-space fragmentation in a detuned Rydberg Ising chain"};
  app.require_subcommand(1);
  std::vector<std::unique_ptr<Command>> commands;
  auto add = [&](const std::string& kind, const std::string& help,
                 std::initializer_list<const std::vector<Flag>*> groups) {
    auto cmd = std::make_unique<Command>();
    cmd->kind = kind;
    cmd->app = app.add_subcommand(kind, help);
    cmd->app->add_option("--config", cmd->config_path, "JSON config; flags override its fields");
    cmd->app->add_option("--L", cmd->length, "number of sites");
    cmd->app->add_option("--output-dir", cmd->output_dir,
                         std::string("output directory (default $") + rydfrag::kOutputDirEnv + " or .)");
    cmd->app->add_option("--name", cmd->name, "output file prefix");
    cmd->app->add_option("--note", cmd->note, "free-text note stored with the config");
    cmd->app->add_option("--jobs", cmd->jobs, "worker threads for realization loops");
    for (const auto* g : groups) bind(*cmd, *g);
    commands.push_back(std::move(cmd));
  };
  add("sectors", "symmetry sectors and their fragmentation", {&kModelFlags});
  add("fragment", "Krylov fragment of a root state", {&kModelFlags, &kRootFlags, &kFragmentFlags});
  add("spectrum", "spectrum, level statistics and entanglement of a fragment",
      {&kModelFlags, &kRootFlags, &kSpectrumFlags});
  add("quench", "quench dynamics inside a fragment", {&kModelFlags, &kRootFlags, &kQuenchFlags});
  add("disorder-sweep", "position-disorder ensemble over sizes and widths",
      {&kModelFlags, &kRootFlags, &kSweepFlags});
  add("fss", "finite-size scaling collapse of a disorder sweep", {&kFssFlags});

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : static_cast<int>(rydfrag::ExitCode::ConfigError);
  }

  for (const auto& cmd : commands) {
    if (!cmd->app->parsed()) continue;
    rydfrag::ExperimentConfig cfg;
    try {
      cfg = rydfrag::config_from_json(merged_config(*cmd));
    } catch (const rydfrag::InvalidArgument& e) {
      std::cerr << "config error: " << e.what() << '\n';
      return static_cast<int>(rydfrag::ExitCode::ConfigError);
    }
    return static_cast<int>(rydfrag::run_guarded(cfg, std::cout, std::cerr));
  }
  return static_cast<int>(rydfrag::ExitCode::ConfigError);
}
