#include <gtest/gtest.h>

#include <cmath>
#include <fstream>

#include "rlfi/csv.hpp"
#include "rlfi/files.hpp"
#include "rlfi/telemetry.hpp"
#include "support.hpp"

namespace rlfi {
namespace {

TEST(Csv, Formatting) {
  EXPECT_EQ(format_g12(0.1), "0.1");
  EXPECT_EQ(format_g12(1.0 / 3.0), "0.333333333333");
  EXPECT_EQ(format_exact(0.1), "0.1");
  EXPECT_EQ(std::stod(format_exact(1.0 / 3.0)), 1.0 / 3.0);
  EXPECT_EQ(csv_field("plain"), "plain");
  EXPECT_EQ(csv_field("a,b"), "\"a,b\"");
  EXPECT_EQ(csv_field("say \"hi\""), "\"say \"\"hi\"\"\"");
  EXPECT_EQ(csv_row({"a", "b\nc"}), "a,\"b\nc\"\n");
}

TEST(Csv, ParseQuotedAndCrlf) {
  auto recs = parse_csv("h1,h2\r\n\"x,\"\"y\"\"\",2\r\n\"multi\nline\",3");
  ASSERT_EQ(recs.size(), 3u);
  EXPECT_EQ(recs[1].fields[0], "x,\"y\"");
  EXPECT_EQ(recs[2].fields[0], "multi\nline");
  EXPECT_EQ(recs[2].line, 3);
  EXPECT_EQ(recs[2].fields[1], "3");
}

TEST(Csv, ParseErrors) {
  try {
    parse_csv("a,b\n\"open,1\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2);
  }
  EXPECT_THROW(parse_csv("a\n\"x\"y\n"), ParseError);
  EXPECT_THROW(parse_real("1.5x", 3, "seconds"), ParseError);
  EXPECT_THROW(parse_integer("", 3, "episode"), ParseError);
  EXPECT_EQ(parse_integer("42", 1, "n"), 42);
  EXPECT_EQ(parse_real("-0.25", 1, "x"), -0.25);
}

TEST(Csv, RowRoundTrip) {
  std::vector<std::string> fields{"", "a", "b,c", "\"q\"", "line\nbreak", " spaced "};
  auto recs = parse_csv(csv_row(fields));
  ASSERT_EQ(recs.size(), 1u);
  EXPECT_EQ(recs[0].fields, fields);
}

TEST(Telemetry, Headers) {
  EXPECT_EQ(q_updates_csv({{0.0, 0.2, 0, 3}}), "old_q,new_q,episode,action\n0,0.2,0,3\n");
  EXPECT_EQ(episode_rewards_csv({{1.96, 4, 2}}), "return,episode,steps\n1.96,4,2\n");
  EXPECT_EQ(epsilon_trace_csv({0.9, 0.85}), "episode,epsilon\n0,0.9\n1,0.85\n");
}

TEST(Telemetry, QTableRoundTripIsExact) {
  QTable q(3, 2);
  q.at(0, 0) = 1.0 / 3.0;
  q.at(1, 1) = -0.04 * 7.0;
  q.at(2, 0) = 1e-300;
  std::string text = qtable_csv(q);
  EXPECT_EQ(text.substr(0, text.find('\n')), "state,a0,a1");
  EXPECT_EQ(parse_qtable_csv(text), q);
  EXPECT_THROW(parse_qtable_csv("state,a1\n0,1\n"), ParseError);
  EXPECT_THROW(parse_qtable_csv("state,a0\n1,1\n"), ParseError);
}

TEST(Telemetry, WritesAllFiles) {
  testing::TempDir dir;
  Environment env = make_env(default_graph(), RewardVariant::baseline());
  TrainConfig c;
  c.episodes = 5;
  c.convergence_mode = ConvergenceMode::kNone;
  TrainResult r = train(env, c);
  write_train_outputs(dir.path(), r);
  for (const char* name : {"q_updates.csv", "tracked_updates.csv", "episode_rewards.csv",
                           "epsilon_trace.csv", "qtable.csv"}) {
    EXPECT_TRUE(std::filesystem::exists(dir / name)) << name;
  }
  EXPECT_EQ(parse_qtable_csv(read_text_file(dir / "qtable.csv")), r.q_table);
  auto rows = parse_csv(read_text_file(dir / "q_updates.csv"));
  EXPECT_EQ(rows.size(), r.telemetry.q_updates.size() + 1);
}

TEST(Files, ReadWrite) {
  testing::TempDir dir;
  auto path = dir / "nested/deeper/file.txt";
  write_text_file(path, "a\nb\r\n");
  EXPECT_EQ(read_text_file(path), "a\nb\r\n");
  EXPECT_THROW(read_text_file(dir / "missing.txt"), IoError);
}

}  // namespace
}  // namespace rlfi
