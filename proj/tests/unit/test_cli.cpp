#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "cli.hpp"
#include "cli_harness.hpp"

namespace rair {
namespace {

namespace fs = std::filesystem;
using testing::compare_runs;
using testing::fresh_dir;
using testing::invoke_cli;

std::string read_all(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

std::vector<std::string> with_sets(const std::vector<std::string>& kv) {
  std::vector<std::string> out;
  for (const auto& s : kv) {
    out.push_back("--set");
    out.push_back(s);
  }
  return out;
}

// Small settings per subcommand so the suite stays quick.
std::vector<std::string> quick_args(const std::string& sub) {
  if (sub == "pattern") {
    return with_sets({"env.width=10", "env.height=10", "env.num_entities=5", "run.episode_length=12",
                      "planner.samples_P=16", "planner.horizon_H=6", "planner.elites_K=4", "planner.cem_iterations=2",
                      "run.frame_every=4"});
  }
  if (sub == "freeplay") {
    return with_sets({"env.width=8", "env.height=8", "env.num_entities=3", "freeplay.iterations=2",
                      "freeplay.rollouts_per_iter=2", "freeplay.episode_length=6", "freeplay.checkpoint_every=1",
                      "planner.samples_P=8", "planner.horizon_H=4", "planner.elites_K=3", "ensemble.hidden=8",
                      "ensemble.members=3"});
  }
  if (sub == "recreate") {
    return with_sets({"recreate.rollouts=2", "recreate.episode_length=10", "planner.samples_P=16",
                      "planner.horizon_H=6", "planner.elites_K=4"});
  }
  if (sub == "analyze") return with_sets({"analyze.random_probes=4", "analyze.favor_trials=2"});
  return {};
}

testing::CliResult run_sub(const std::string& sub, const fs::path& out, int workers,
                           std::vector<std::string> extra = {}) {
  std::vector<std::string> args{sub, "--out", out.string(), "--workers", std::to_string(workers)};
  for (const auto& a : quick_args(sub)) args.push_back(a);
  for (const auto& a : extra) args.push_back(a);
  return invoke_cli(args);
}

TEST(CliPresets, MatchConfigFiles) {
  for (const std::string name : {"pattern", "freeplay", "recreate", "analyze", "oracle"}) {
    const auto from_file = load_config_file(fs::path(RAIR_CONFIG_DIR) / (name + ".cfg"));
    const auto built_in = cli::preset(name);
    ASSERT_EQ(from_file.size(), built_in.size()) << name;
    for (const auto& [k, v] : from_file) EXPECT_EQ(built_in.at(k).value, v.value) << name << " " << k;
    EXPECT_NO_THROW(resolve_config(built_in)) << name;
  }
}

TEST(CliExitCodes, DryRunPrintsResolvedConfig) {
  const auto r = invoke_cli({"pattern", "--dry-run", "--seed", "5", "--set", "planner.samples_P=40"});
  EXPECT_EQ(r.code, cli::kExitOk);
  EXPECT_NE(r.out.find("run.seed = 5\n"), std::string::npos);
  EXPECT_NE(r.out.find("planner.samples_P = 40\n"), std::string::npos);
}

TEST(CliExitCodes, ConfigErrors) {
  auto r = invoke_cli({"pattern", "--dry-run", "--set", "planner.samplez=3"});
  EXPECT_EQ(r.code, cli::kExitConfig);
  EXPECT_NE(r.err.find("--set: planner.samplez: unknown key"), std::string::npos);
  r = invoke_cli({"pattern", "--dry-run", "--set", "env.width=wide"});
  EXPECT_EQ(r.code, cli::kExitConfig);
  EXPECT_EQ(invoke_cli({"pattern", "--dry-run", "--config", "/nonexistent.cfg"}).code, cli::kExitConfig);
  EXPECT_EQ(invoke_cli({"nosuch"}).code, cli::kExitConfig);
  EXPECT_EQ(invoke_cli({}).code, cli::kExitConfig);
}

TEST(CliExitCodes, ConfigFileLayersOverPreset) {
  const auto dir = fresh_dir("layer");
  fs::create_directories(dir);
  std::ofstream(dir / "c.cfg") << "planner.horizon_H = 7\nrun.seed = 3\n";
  const auto r = invoke_cli({"pattern", "--dry-run", "--config", (dir / "c.cfg").string(), "--seed", "11"});
  EXPECT_EQ(r.code, cli::kExitOk);
  EXPECT_NE(r.out.find("planner.horizon_H = 7\n"), std::string::npos);
  EXPECT_NE(r.out.find("run.seed = 11\n"), std::string::npos);
  EXPECT_NE(r.out.find("planner.samples_P = 64\n"), std::string::npos);
}

TEST(CliExitCodes, OracleRefusalLeavesNoOutput) {
  const auto dir = fresh_dir("refuse");
  const auto r = invoke_cli({"oracle", "--out", dir.string(), "--set", "oracle.width=10", "--set", "oracle.height=10",
                             "--set", "oracle.num_entities=6"});
  EXPECT_EQ(r.code, cli::kExitOracleRefusal);
  EXPECT_NE(r.err.find("placements"), std::string::npos);
  EXPECT_FALSE(fs::exists(dir));
}

TEST(CliRuns, OracleReport) {
  const auto dir = fresh_dir("oracle");
  const auto r = invoke_cli({"oracle", "--out", dir.string()});
  ASSERT_EQ(r.code, cli::kExitOk) << r.err;
  const auto j = nlohmann::json::parse(read_all(dir / "report.json"));
  EXPECT_EQ(j.at("placements"), 560);
  EXPECT_NEAR(j.at("optimum").get<double>(), 2.0 / 3.0 * std::log(2.0 / 3.0) + 1.0 / 3.0 * std::log(1.0 / 3.0), 1e-12);
}

TEST(CliRuns, PatternOutputsAndSchema) {
  const auto dir = fresh_dir("pattern");
  const auto r = run_sub("pattern", dir, 2);
  ASSERT_EQ(r.code, cli::kExitOk) << r.err;
  for (const char* f : {"rollout.jsonl", "metrics.csv", "diagnostics.jsonl", "final.txt", "report.json",
                        "frames/00000.ppm", "frames/00004.ppm", "frames/00012.ppm", "manifest.json"}) {
    EXPECT_TRUE(fs::exists(dir / f)) << f;
  }
  std::istringstream lines(read_all(dir / "rollout.jsonl"));
  std::string line;
  int n = 0;
  for (; std::getline(lines, line); ++n) {
    const auto j = nlohmann::json::parse(line);
    EXPECT_EQ(j.at("step"), n);
    EXPECT_EQ(j.at("positions").size(), 5u);
    for (const char* k : {"cursor", "action", "move", "moved", "actuated", "rair", "disagreement", "intrinsic",
                          "planned_cost"}) {
      EXPECT_TRUE(j.contains(k)) << k;
    }
  }
  EXPECT_EQ(n, 12);
  const auto m = nlohmann::json::parse(read_all(dir / "manifest.json"));
  for (const char* k : {"subcommand", "version", "seed", "config", "overrides", "workers", "started_at", "finished_at",
                        "outputs"}) {
    EXPECT_TRUE(m.contains(k)) << k;
  }
  for (const auto& o : m.at("outputs")) {
    EXPECT_EQ(o.at("sha256").get<std::string>(), cli::sha256_hex(dir / o.at("path").get<std::string>()));
    EXPECT_EQ(o.at("sha256").get<std::string>().size(), 64u);
  }
}

TEST(CliRuns, AnalyzeReportHasFullMatrix) {
  const auto dir = fresh_dir("analyze");
  const auto r = run_sub("analyze", dir, 1);
  ASSERT_EQ(r.code, cli::kExitOk) << r.err;
  const auto j = nlohmann::json::parse(read_all(dir / "report.json"));
  EXPECT_EQ(j.at("matrix").size(), 32u);
  EXPECT_EQ(j.at("glide_composed_twice").size(), 8u);
  EXPECT_NE(r.out.find("invariance mismatches"), std::string::npos);
}

TEST(CliRuns, ColoredPatternRenders) {
  const auto dir = fresh_dir("colored");
  const auto r = run_sub("pattern", dir, 1, with_sets({"env.colors=3", "phi.include_color=true"}));
  ASSERT_EQ(r.code, cli::kExitOk) << r.err;
  const auto ascii = read_all(dir / "final.txt");
  EXPECT_NE(ascii.find_first_of("ABC"), std::string::npos);
  EXPECT_EQ(invoke_cli({"pattern", "--dry-run", "--set", "phi.include_color=true"}).code, cli::kExitConfig);
}

TEST(CliRuns, Sha256KnownVector) {
  const auto dir = fresh_dir("sha");
  fs::create_directories(dir);
  std::ofstream(dir / "abc", std::ios::binary) << "abc";
  EXPECT_EQ(cli::sha256_hex(dir / "abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

class CliDeterminism : public ::testing::TestWithParam<std::string> {};

TEST_P(CliDeterminism, RepeatsAndWorkerCounts) {
  const std::string sub = GetParam();
  const auto a = fresh_dir(sub + "-a");
  const auto b = fresh_dir(sub + "-b");
  const auto c = fresh_dir(sub + "-c");
  ASSERT_EQ(run_sub(sub, a, 1).code, cli::kExitOk);
  ASSERT_EQ(run_sub(sub, b, 1).code, cli::kExitOk);
  ASSERT_EQ(run_sub(sub, c, 4).code, cli::kExitOk);
  EXPECT_EQ(compare_runs(a, b), "");
  EXPECT_EQ(compare_runs(a, c), "");
  const auto d = fresh_dir(sub + "-d");
  ASSERT_EQ(run_sub(sub, d, 1, {"--seed", "99"}).code, cli::kExitOk);
  if (sub != "oracle" && sub != "analyze") EXPECT_NE(compare_runs(a, d), "");
}

INSTANTIATE_TEST_SUITE_P(Subcommands, CliDeterminism,
                         ::testing::Values("pattern", "freeplay", "recreate", "analyze", "oracle"));

}  // namespace
}  // namespace rair
