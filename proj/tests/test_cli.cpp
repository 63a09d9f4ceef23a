#include <gtest/gtest.h>

#include <sstream>

#include "rlfi/cli.hpp"
#include "rlfi/command_plan.hpp"
#include "rlfi/csv.hpp"
#include "rlfi/files.hpp"
#include "rlfi/reporting.hpp"
#include "support.hpp"

namespace rlfi {
namespace {

namespace fs = std::filesystem;

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::map<std::string, std::string> tree(const fs::path& root) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (e.is_regular_file()) files[fs::relative(e.path(), root).string()] = read_text_file(e.path());
  }
  return files;
}

const std::string kFixture = std::string(RLFI_RESOURCE_DIR) + "/timings_fixture.csv";

TEST(Cli, ValidateGraph) {
  testing::TempDir dir;
  EXPECT_EQ(cli({"validate-graph"}).code, kExitOk);

  write_text_file(dir / "corrupt.json", "{\"num_states\": ");
  CliRun r = cli({"validate-graph", (dir / "corrupt.json").string()});
  EXPECT_EQ(r.code, kExitUsage);
  EXPECT_NE(r.err.find("parse error"), std::string::npos);

  write_text_file(dir / "bad.json", R"({"num_states": 2, "num_actions": 1,
    "terminal_states": [1], "milestones": {},
    "transitions": [{"state": 0, "action": 0,
                     "edges": [{"p": 0.9, "next": 1, "reward": 0, "done": true}]}]})");
  r = cli({"validate-graph", (dir / "bad.json").string()});
  EXPECT_EQ(r.code, kExitViolation);
  EXPECT_NE(r.out.find("ProbabilitySum at (0, 0)"), std::string::npos);
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(cli({"train", "--alpha", "nope"}).code, kExitUsage);
  EXPECT_EQ(cli({"train", "--alpha", "0"}).code, kExitUsage);
  EXPECT_EQ(cli({"bogus"}).code, kExitUsage);
  EXPECT_EQ(cli({"--help"}).code, kExitOk);
  EXPECT_EQ(cli({"--config", "/nonexistent/cfg.json", "train"}).code, kExitUsage);
}

TEST(Cli, TrainWritesFilesAndManifest) {
  testing::TempDir dir;
  CliRun r = cli({"--out", (dir / "t").string(), "--seed", "7", "train", "--variant",
               "terminal-bonus", "--alpha", "0.4", "--episodes", "40"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  for (const char* f : {"manifest.json", "qtable.csv", "q_updates.csv", "episode_rewards.csv",
                        "epsilon_trace.csv", "tracked_updates.csv"}) {
    EXPECT_TRUE(fs::exists(dir / "t" / f)) << f;
  }
  std::string manifest = read_text_file(dir / "t/manifest.json");
  EXPECT_NE(manifest.find("\"alpha\": 0.4"), std::string::npos);
  EXPECT_NE(manifest.find("\"seed\": 7"), std::string::npos);
  EXPECT_NE(manifest.find("\"variant\": \"terminal-bonus\""), std::string::npos);

  ASSERT_EQ(cli({"--out", (dir / "t2").string(), "--seed", "7", "train", "--variant",
                 "terminal-bonus", "--alpha", "0.4", "--episodes", "40"})
                .code,
            kExitOk);
  EXPECT_EQ(tree(dir / "t"), tree(dir / "t2"));
}

TEST(Cli, TrainZeroEpisodes) {
  testing::TempDir dir;
  ASSERT_EQ(cli({"--out", dir.path().string(), "train", "--episodes", "0"}).code, kExitOk);
  EXPECT_EQ(read_text_file(dir / "q_updates.csv"), "old_q,new_q,episode,action\n");
  auto rows = parse_csv(read_text_file(dir / "qtable.csv"));
  ASSERT_EQ(rows.size(), 68u);
  for (std::size_t i = 1; i < rows.size(); ++i)
    for (std::size_t j = 1; j < rows[i].fields.size(); ++j) EXPECT_EQ(rows[i].fields[j], "0");
}

TEST(Cli, SweepCells) {
  testing::TempDir dir;
  CliRun r = cli({"--out", (dir / "s").string(), "sweep", "--episodes", "3"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  int cells = 0;
  for (const auto& e : fs::directory_iterator(dir / "s")) cells += e.is_directory();
  EXPECT_EQ(cells, 36);
  EXPECT_TRUE(fs::exists(dir / "s/convergence_table.csv"));

  ASSERT_EQ(cli({"--out", (dir / "one").string(), "sweep", "--episodes", "3", "--lrs", "0.4"}).code,
            kExitOk);
  cells = 0;
  for (const auto& e : fs::directory_iterator(dir / "one")) cells += e.is_directory();
  EXPECT_EQ(cells, 3);
  ASSERT_EQ(cli({"--out", (dir / "two").string(), "sweep", "--episodes", "3", "--lrs", "0.4",
                 "--jobs", "3"})
                .code,
            kExitOk);
  EXPECT_EQ(tree(dir / "one"), tree(dir / "two"));
}

TEST(Cli, EvalIdenticalPolicyPrintsOne) {
  testing::TempDir dir;
  ASSERT_EQ(cli({"--out", (dir / "t").string(), "train", "--episodes", "2"}).code, kExitOk);
  // Make the learned policy identical to the ideal list.
  QTable q(67, 10);
  const auto& ideal = default_ideal();
  for (StateId s = 0; s < 67; ++s) q.at(s, ideal.actions[s]) = 1.0;
  std::string text = "state";
  for (int a = 0; a < 10; ++a) text += ",a" + std::to_string(a);
  text += "\n";
  for (StateId s = 0; s < 67; ++s) {
    text += std::to_string(s);
    for (double v : q.row(s)) text += "," + format_exact(v);
    text += "\n";
  }
  write_text_file(dir / "t/qtable.csv", text);
  CliRun r = cli({"--out", (dir / "e").string(), "eval", "--from", (dir / "t").string()});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_NE(r.out.find("1.00000"), std::string::npos);
  auto rows = parse_accuracy_csv(read_text_file(dir / "e/accuracy.csv"));
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].accuracy, 1.0);
}

TEST(Cli, EvalSweepRowPerCell) {
  testing::TempDir dir;
  ASSERT_EQ(cli({"--out", (dir / "s").string(), "sweep", "--episodes", "3", "--lrs",
                 "0.1,0.4"})
                .code,
            kExitOk);
  ASSERT_EQ(cli({"--out", (dir / "e").string(), "eval", "--from", (dir / "s").string()}).code,
            kExitOk);
  EXPECT_EQ(parse_accuracy_csv(read_text_file(dir / "e/accuracy.csv")).size(), 6u);
  EXPECT_EQ(cli({"eval", "--from", (dir / "missing").string()}).code, kExitUsage);
}

TEST(Cli, PlanAndRunPlan) {
  testing::TempDir dir;
  CliRun r = cli({"--out", (dir / "p").string(), "plan", "--pid", "512"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  CommandPlan plan = load_plan_jsonl(read_text_file(dir / "p/plan.jsonl"));
  ASSERT_FALSE(plan.steps.empty());
  EXPECT_EQ(plan.steps.back().state, 66);
  EXPECT_EQ(plan.sentinel_count(), 0u);
  bool saw_512 = false;
  for (const auto& s : plan.steps) {
    EXPECT_EQ(s.command.text.find("340"), std::string::npos);
    saw_512 |= s.command.text.find("512") != std::string::npos;
  }
  EXPECT_TRUE(saw_512);

  r = cli({"--out", (dir / "r").string(), "run-plan", "--plan", (dir / "p/plan.jsonl").string()});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  TimingDataset ds = load_timings(read_text_file(dir / "r/timings.csv"));
  ASSERT_EQ(ds.records.size(), plan.steps.size());
  for (const auto& rec : ds.records) {
    EXPECT_EQ(rec.executor, "RL Agent");
    EXPECT_EQ(rec.seconds, 0.0);
  }
}

TEST(Cli, ShellRunnerNeedsConfirmation) {
  testing::TempDir dir;
  EXPECT_EQ(cli({"--out", dir.path().string(), "run-plan", "--runner", "shell"}).code,
            kExitUsage);
}

TEST(Cli, Report) {
  testing::TempDir dir;
  CliRun r = cli({"--out", (dir / "rep").string(), "--timings", kFixture, "report", "--svg"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  auto rows = parse_csv(read_text_file(dir / "rep/totals.csv"));
  int grand = 0;
  for (const auto& row : rows) grand += row.fields[1] == "grand";
  EXPECT_EQ(grand, 3);
  EXPECT_TRUE(fs::exists(dir / "rep/totals.svg"));
  // Executors listed fastest first.
  std::size_t rl = r.out.find("RL Agent"), ps = r.out.find("PowerShell"), co = r.out.find("Collab");
  ASSERT_NE(rl, std::string::npos);
  EXPECT_LT(rl, ps);
  EXPECT_LT(ps, co);
}

TEST(Cli, ReportOneSvgPerTable) {
  testing::TempDir dir;
  ASSERT_EQ(cli({"--out", (dir / "s").string(), "sweep", "--episodes", "120", "--convergence",
                 "none", "--lrs", "0.1,0.4"})
                .code,
            kExitOk);
  ASSERT_EQ(cli({"--out", (dir / "e").string(), "eval", "--from", (dir / "s").string()}).code,
            kExitOk);
  CliRun r = cli({"--out", (dir / "rep").string(), "--timings", kFixture, "report", "--sweep",
               (dir / "s").string(), "--accuracy", (dir / "e/accuracy.csv").string(), "--svg"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  for (const char* stem : {"totals", "convergence", "reward_dynamics", "accuracy"}) {
    EXPECT_TRUE(fs::exists(dir / "rep" / (std::string(stem) + ".csv"))) << stem;
    EXPECT_TRUE(fs::exists(dir / "rep" / (std::string(stem) + ".svg"))) << stem;
  }
  auto rd = parse_reward_dynamics_csv(read_text_file(dir / "rep/reward_dynamics.csv"));
  for (const auto& [env, points] : rd) EXPECT_EQ(points.size(), 98u) << env;
}

TEST(Cli, ConfigFileAndPrecedence) {
  testing::TempDir dir;
  write_text_file(dir / "cfg/config.json",
                  R"({"out": "from_config", "seed": 9, "train": {"alpha": 0.3, "episodes": 4}})");
  CliRun r = cli({"--config", (dir / "cfg/config.json").string(), "train", "--alpha", "0.6"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  std::string manifest = read_text_file(dir / "cfg/from_config/manifest.json");
  EXPECT_NE(manifest.find("\"alpha\": 0.6"), std::string::npos);
  EXPECT_NE(manifest.find("\"episodes\": 4"), std::string::npos);
  EXPECT_NE(manifest.find("\"seed\": 9"), std::string::npos);

  write_text_file(dir / "cfg/bad.json", R"({"unknown": 1})");
  EXPECT_EQ(cli({"--config", (dir / "cfg/bad.json").string(), "train"}).code, kExitUsage);
}

TEST(Cli, ExportDefaultsMatchesEmbedded) {
  testing::TempDir dir;
  ASSERT_EQ(cli({"--out", dir.path().string(), "export-defaults"}).code, kExitOk);
  EXPECT_EQ(load_graph(read_text_file(dir / "default_graph.json")), default_graph());
  EXPECT_EQ(load_ideal(read_text_file(dir / "default_ideal.json")), default_ideal());
  EXPECT_EQ(load_menu(read_text_file(dir / "default_menu.json")), default_menu());
}

}  // namespace
}  // namespace rlfi
