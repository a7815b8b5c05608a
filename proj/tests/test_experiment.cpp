#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "rydfrag/experiment.hpp"

using namespace rydfrag;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("rydfrag_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

// Runs the CLI with stdout/stderr discarded; returns the exit status.
int cli(const std::string& args, const std::string& env = "") {
  const char* exe = std::getenv("RYDFRAG_CLI");
  if (!exe) return -1;
  const std::string cmd = env + (env.empty() ? "" : " ") + "'" + exe + "' " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

#define REQUIRE_CLI() \
  if (!std::getenv("RYDFRAG_CLI")) GTEST_SKIP() << "RYDFRAG_CLI not set"

}  // namespace

TEST(Templates, RootStrings) {
  EXPECT_EQ(root_template(RootTemplate::DimerTrain, 12).str(), "110110110000");
  EXPECT_EQ(root_template(RootTemplate::DimerTrainMagnon, 6).str(), "110100");
  EXPECT_EQ(root_template(RootTemplate::DimerTrainMagnon, 10).str(), "1101101000");
  EXPECT_EQ(root_template(RootTemplate::NeelMagnon, 12).str(), "100100100100");
  EXPECT_EQ(root_template(RootTemplate::Z3Hole, 11).str(), "11011011011");
  for (int m = 1; m < 6; ++m) {
    EXPECT_EQ(root_template(RootTemplate::DimerTrain, 4 * m).n_up(), 2 * m);
    EXPECT_EQ(root_template(RootTemplate::DimerTrainMagnon, 4 * m + 2).n_up(), 2 * m + 1);
  }
  EXPECT_THROW(root_template(RootTemplate::DimerTrain, 10), InvalidArgument);
  EXPECT_THROW(root_template(RootTemplate::Z3Hole, 12), InvalidArgument);
  for (auto t : kAllRootTemplates) EXPECT_EQ(parse_root_template(to_string(t)), t);
}

TEST(Config, RejectsUnknownKeysAndBadValues) {
  EXPECT_THROW(config_from_json(json{{"kind", "sectors"}, {"Lx", 4}}), InvalidArgument);
  EXPECT_THROW(config_from_json(json{{"kind", "sectors"}, {"L", "four"}}), InvalidArgument);
  EXPECT_THROW(config_from_json(json::array()), InvalidArgument);
  auto bad = [](json j) { return [j] { resolve(config_from_json(j)); }; };
  EXPECT_THROW(bad({{"kind", "nope"}})(), InvalidArgument);
  EXPECT_THROW(bad({{"kind", "sectors"}, {"delta_over_omega", -1.0}})(), InvalidArgument);
  EXPECT_THROW(bad({{"kind", "sectors"}, {"profile", "dipolar"}})(), InvalidArgument);
  EXPECT_THROW(bad({{"kind", "fragment"}})(), InvalidArgument);
  EXPECT_THROW(bad({{"kind", "quench"}, {"root", "1010"}, {"t_min", 5.0}, {"t_max", 1.0}})(), InvalidArgument);
  EXPECT_THROW(bad({{"kind", "fss"}})(), InvalidArgument);
}

TEST(Config, JsonRoundTrip) {
  const auto c = resolve(config_from_json(
      json{{"kind", "quench"}, {"root_template", "dimer-train"}, {"L", 12}, {"profile", "vdw"}, {"output_dir", "/tmp/x"}}));
  const auto back = resolve(config_from_json(to_json(c)));
  EXPECT_EQ(to_json(back).dump(), to_json(c).dump());
  EXPECT_EQ(back.name, "quench");
}

TEST(Config, ModelParamsFromRatios) {
  auto c = resolve(config_from_json(json{{"kind", "sectors"}, {"delta_over_omega", 4.0}, {"v_over_delta", 0.25}}));
  auto p = model_params(c);
  EXPECT_DOUBLE_EQ(p.delta, 4.0);
  EXPECT_DOUBLE_EQ(p.v(), 1.0);
  EXPECT_EQ(p.regime, Regime::NnOnly);
  c.profile = "custom";
  c.couplings_over_v = {0.5};
  EXPECT_EQ(model_params(c).regime, Regime::NnnHalf);
}

TEST(Run, InProcessFragmentWritesSummary) {
  const auto dir = scratch("inproc");
  ExperimentConfig c;
  c.kind = "fragment";
  c.root_template = "dimer-train";
  c.length = 12;
  c.output_dir = dir.string();
  c.dump_basis = true;
  c.export_matrix = true;
  const auto r = run(c);
  EXPECT_EQ(r.summary.at("dimension"), 36);
  EXPECT_EQ(r.summary.at("edges"), 56);
  EXPECT_TRUE(fs::exists(dir / "fragment.json"));
  EXPECT_TRUE(fs::exists(dir / "fragment.fragment.json"));
  EXPECT_TRUE(fs::exists(dir / "fragment.matrix.coo"));
  const auto saved = json::parse(slurp(dir / "fragment.json"));
  EXPECT_EQ(saved.at("config").at("root_template"), "dimer-train");
  EXPECT_EQ(saved.at("result"), r.summary);
}

TEST(Run, ErrorsMapToExitCodes) {
  std::ostringstream log, err;
  ExperimentConfig c;
  c.kind = "quench";
  c.root_template = "dimer-train";
  c.length = 20;
  c.compare_exact = true;
  c.output_dir = scratch("codes").string();
  EXPECT_EQ(run_guarded(c, log, err), ExitCode::SolverError);
  EXPECT_NE(err.str().find("resource limit"), std::string::npos);
  c.kind = "bogus";
  EXPECT_EQ(run_guarded(c, log, err), ExitCode::ConfigError);
}

TEST(Cli, SectorsCountsTheWholeSpace) {
  REQUIRE_CLI();
  const auto dir = scratch("sectors");
  ASSERT_EQ(cli("sectors --L 6 --output-dir " + dir.string()), 0);
  const auto j = json::parse(slurp(dir / "sectors.json"));
  EXPECT_EQ(j.at("result").at("total_states"), 64);
  const std::string csv = slurp(dir / "sectors.sectors.csv");
  EXPECT_EQ(csv.rfind("# {", 0), 0u);
}

TEST(Cli, FragmentAndDeterministicRerun) {
  REQUIRE_CLI();
  const auto dir = scratch("rerun");
  const std::string args = "fragment --root-template dimer-train-magnon --L 14 --name f --output-dir " + dir.string();
  ASSERT_EQ(cli(args), 0);
  const std::string first = slurp(dir / "f.json");
  EXPECT_EQ(json::parse(first).at("result").at("dimension"),
            build_fragment(root_template(RootTemplate::DimerTrainMagnon, 14), Regime::NnOnly).dimension());
  ASSERT_EQ(cli(args), 0);
  EXPECT_EQ(slurp(dir / "f.json"), first);
}

TEST(Cli, ConfigFileAndFlagOverride) {
  REQUIRE_CLI();
  const auto dir = scratch("config");
  const auto cfg = dir / "run.json";
  std::ofstream(cfg) << json{{"root_template", "dimer-train"}, {"L", 8}, {"name", "fromfile"}}.dump();
  ASSERT_EQ(cli("fragment --config " + cfg.string() + " --L 12 --output-dir " + dir.string()), 0);
  EXPECT_EQ(json::parse(slurp(dir / "fromfile.json")).at("result").at("dimension"), 36);
  std::ofstream(cfg) << json{{"root_template", "dimer-train"}, {"colour", "red"}}.dump();
  EXPECT_EQ(cli("fragment --config " + cfg.string() + " --output-dir " + dir.string()), 2);
}

TEST(Cli, ExitCodes) {
  REQUIRE_CLI();
  const auto dir = scratch("exit");
  EXPECT_EQ(cli("sectors --bogus"), 2);
  EXPECT_EQ(cli("sectors --L 4 --delta-over-omega -1 --output-dir " + dir.string()), 2);
  EXPECT_EQ(cli("fragment --root-template dimer-train --L 10 --output-dir " + dir.string()), 2);
  EXPECT_EQ(cli("quench --root-template dimer-train --L 20 --compare-exact --output-dir " + dir.string()), 3);
}

TEST(Cli, OutputDirFromEnvironment) {
  REQUIRE_CLI();
  const auto dir = scratch("env");
  ASSERT_EQ(cli("sectors --L 4", "RYDFRAG_OUTPUT_DIR='" + dir.string() + "'"), 0);
  EXPECT_TRUE(fs::exists(dir / "sectors.json"));
}

TEST(Cli, QuenchWritesTrajectory) {
  REQUIRE_CLI();
  const auto dir = scratch("quench");
  ASSERT_EQ(cli("quench --root-template dimer-train --L 8 --delta-over-omega 10 --t-max 10 --time-points 20 --compare-exact "
                "--output-dir " + dir.string()), 0);
  const auto j = json::parse(slurp(dir / "quench.json")).at("result");
  EXPECT_LT(j.at("max_density_deviation").get<double>(), 0.15);
  const std::string csv = slurp(dir / "quench.quench.csv");
  EXPECT_NE(csv.find("\nt,I,F_Q,S,n_1"), std::string::npos);
}

TEST(Recipes, AllResolve) {
  const fs::path dir = fs::path(RYDFRAG_SOURCE_DIR) / "recipes";
  ASSERT_TRUE(fs::is_directory(dir));
  int n = 0;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.path().extension() != ".json") continue;
    const auto c = resolve(config_from_json(json::parse(slurp(e.path()))));
    EXPECT_EQ(c.name, e.path().stem().string());
    EXPECT_NO_THROW(model_params(c)) << e.path();
    ++n;
  }
  EXPECT_GE(n, 8);
}

TEST(Cli, SweepThenCollapse) {
  REQUIRE_CLI();
  const auto dir = scratch("sweep");
  ASSERT_EQ(cli("disorder-sweep --sizes 11,14,17 --widths 0.001,0.01,0.1 --realizations 4 --profile vdw "
                "--delta-over-omega 4 --v-over-delta 0.2 --output-dir " + dir.string()),
            0);
  const auto sweep = json::parse(slurp(dir / "disorder-sweep.json")).at("result");
  EXPECT_EQ(sweep.at("cells").size(), 9u);
  ASSERT_EQ(cli("fss --input disorder-sweep.json --output-dir " + dir.string()), 0);
  EXPECT_TRUE(fs::exists(dir / "fss.landscape.csv"));
}
