#include <gtest/gtest.h>

#include <array>
#include <cmath>

#include "rlfi/policy_eval.hpp"
#include "rlfi/qlearn.hpp"
#include "support.hpp"

namespace rlfi {
namespace {

TrainConfig plain_config(double alpha, int episodes) {
  TrainConfig c;
  c.alpha = alpha;
  c.episodes = episodes;
  c.convergence_mode = ConvergenceMode::kNone;
  return c;
}

TEST(SelectAction, GreedyPicksUniqueMaximizer) {
  QTable q(1, 10);
  q.at(0, 7) = 1.0;
  Rng rng(1);
  EXPECT_EQ(select_action(q, 0, 0.0, rng), 7);
}

TEST(SelectAction, TiesGoToLowestIndex) {
  QTable q(1, 10);
  Rng rng(1);
  EXPECT_EQ(select_action(q, 0, 0.0, rng), 0);
  q.at(0, 3) = 2.0;
  q.at(0, 8) = 2.0;
  EXPECT_EQ(select_action(q, 0, 0.0, rng), 3);
}

TEST(SelectAction, FullExplorationIsUniform) {
  QTable q(1, 10);
  q.at(0, 4) = 5.0;
  Rng rng(2024);
  std::array<int, 10> counts{};
  const int n = 100000;
  for (int i = 0; i < n; ++i) ++counts[select_action(q, 0, 1.0, rng)];
  for (int c : counts) EXPECT_NEAR(c / double(n), 0.1, 0.02);
}

TEST(Bellman, WorkedExamples) {
  EXPECT_DOUBLE_EQ(bellman_update(0.0, 2.0, 0.0, 0.1, 0.9), 0.2);
  EXPECT_NEAR(bellman_update(1.0, -0.04, 0.5, 0.4, 0.9), 0.764, 1e-15);
  // Fixed point: q_sa = r + gamma * max_next.
  const double r = 2.0, max_next = 10.0 / 3.0, gamma = 0.9;
  const double q = r + gamma * max_next;
  EXPECT_DOUBLE_EQ(bellman_update(q, r, max_next, 0.37, gamma), q);
}

TEST(Train, TwoStateRecurrence) {
  Environment env = make_env(testing::two_state_graph(), RewardVariant::baseline());
  TrainConfig c = plain_config(0.5, 3);
  c.epsilon0 = 0.0;
  TrainResult r = train(env, c);
  ASSERT_EQ(r.telemetry.q_updates.size(), 3u);
  const std::array<double, 3> expected{1.0, 1.5, 1.75};
  for (int i = 0; i < 3; ++i) {
    EXPECT_DOUBLE_EQ(r.telemetry.q_updates[i].new_q, expected[i]);
    EXPECT_EQ(r.telemetry.q_updates[i].episode, i);
  }
  EXPECT_DOUBLE_EQ(r.q_table.at(0, 0), 1.75);
  EXPECT_FALSE(r.converged);
}

TEST(Train, ZeroEpisodes) {
  Environment env = make_env(default_graph(), RewardVariant::baseline());
  TrainResult r = train(env, plain_config(0.4, 0));
  EXPECT_EQ(r.q_table, QTable(67, 10));
  EXPECT_TRUE(r.telemetry.q_updates.empty());
  EXPECT_TRUE(r.telemetry.episode_rewards.empty());
  EXPECT_TRUE(r.telemetry.epsilon_trace.empty());
  EXPECT_FALSE(r.episodes_to_convergence.has_value());
}

TEST(Train, TerminalBonusConvergesAtPointFour) {
  Environment env = make_env(default_graph(), RewardVariant::terminal_bonus());
  TrainConfig c;
  c.alpha = 0.4;
  c.seed = 7;
  c.convergence_mode = ConvergenceMode::kPaper;
  TrainResult r = train(env, c);
  EXPECT_TRUE(r.converged);
  ASSERT_TRUE(r.episodes_to_convergence.has_value());
  EXPECT_LE(*r.episodes_to_convergence, c.episodes);
  EXPECT_EQ(static_cast<int>(r.telemetry.episode_rewards.size()), *r.episodes_to_convergence);
}

TEST(Train, EpsilonScheduleAndFloor) {
  Environment env = make_env(testing::chain_graph(), RewardVariant::baseline());
  TrainConfig c = plain_config(0.1, 20);
  c.epsilon_decay_value = 0.2;
  c.epsilon_min = 0.05;
  TrainResult r = train(env, c);
  const auto& trace = r.telemetry.epsilon_trace;
  ASSERT_EQ(trace.size(), 20u);
  EXPECT_DOUBLE_EQ(trace[0], 0.9);
  EXPECT_DOUBLE_EQ(trace[1], 0.8);
  EXPECT_DOUBLE_EQ(trace.back(), 0.05);
}

TEST(Train, WatchPairsAreSubsetOfUpdates) {
  Environment env = make_env(default_graph(), RewardVariant::baseline());
  TrainConfig c = plain_config(0.4, 30);
  c.seed = 3;
  TrainResult r = train(env, c, {{0, 0}, {5, 2}});
  EXPECT_FALSE(r.telemetry.tracked_updates.empty());
  for (const auto& u : r.telemetry.tracked_updates) {
    EXPECT_TRUE(u.action == 0 || u.action == 2);
  }
}

TEST(Train, RejectsBadConfig) {
  Environment env = make_env(testing::chain_graph(), RewardVariant::baseline());
  TrainConfig c;
  c.alpha = 0.0;
  EXPECT_THROW(train(env, c), std::invalid_argument);
  c = TrainConfig{};
  c.gamma = 1.0;
  EXPECT_THROW(train(env, c), std::invalid_argument);
  c = TrainConfig{};
  c.max_steps_per_episode = 0;
  EXPECT_THROW(train(env, c), std::invalid_argument);
}

TEST(Train, DefaultDecaySpreadsOverBudget) {
  TrainConfig c;
  EXPECT_DOUBLE_EQ(c.resolved_decay_value(), 0.9 / 1000);
  c.epsilon_decay_value = 0.01;
  EXPECT_DOUBLE_EQ(c.resolved_decay_value(), 0.01);
}

TEST(Train, StableModeNeedsConsecutiveQuietUpdates) {
  Environment env = make_env(default_graph(), RewardVariant::baseline());
  TrainConfig paper;
  paper.alpha = 0.4;
  paper.seed = 11;
  paper.convergence_mode = ConvergenceMode::kPaper;
  TrainConfig stable = paper;
  stable.convergence_mode = ConvergenceMode::kStable;
  auto rp = train(env, paper);
  auto rs = train(env, stable);
  int ep_paper = rp.episodes_to_convergence.value_or(paper.episodes + 1);
  int ep_stable = rs.episodes_to_convergence.value_or(stable.episodes + 1);
  EXPECT_LE(ep_paper, ep_stable);
}

TEST(ValueIteration, TwoState) {
  QTable q = value_iteration(testing::two_state_graph(), RewardVariant::baseline(), 0.9, 1e-12);
  EXPECT_DOUBLE_EQ(q.at(0, 0), 2.0);
  EXPECT_DOUBLE_EQ(q.at(1, 0), 0.0);
}

TEST(ValueIteration, Chain) {
  QTable q = value_iteration(testing::chain_graph(), RewardVariant::baseline(), 0.9, 1e-12);
  EXPECT_NEAR(q.at(0, 0), -0.04 + 0.9 * 2.0, 1e-12);
  EXPECT_NEAR(q.at(0, 1), 1.76, 1e-12);
  EXPECT_NEAR(q.at(1, 0), 2.0, 1e-12);
  EXPECT_EQ(value_iteration(testing::chain_graph(), RewardVariant::baseline(), 0.9, 1e-12), q);
}

TEST(PolicyValue, ChainOptimum) {
  std::vector<ActionId> policy{0, 0, 0};
  auto v = policy_value(testing::chain_graph(), RewardVariant::baseline(), policy, 0.9, 1e-12);
  EXPECT_NEAR(v[0], 1.76, 1e-12);
  EXPECT_NEAR(v[1], 2.0, 1e-12);
  EXPECT_EQ(v[2], 0.0);
}

TEST(PolicyValue, AbsorbingSelfLoop) {
  WorkflowGraph g(2, 2, {{{0, 0}, {{1.0, 0, -0.04, false}}}, {{0, 1}, {{1.0, 1, -0.04, true}}}},
                  {1});
  std::vector<ActionId> policy{0, 0};
  auto v = policy_value(g, RewardVariant::baseline(), policy, 0.9, 1e-13);
  EXPECT_NEAR(v[0], -0.4, 1e-11);
  EXPECT_EQ(v[1], 0.0);
  EXPECT_THROW(policy_value(g, RewardVariant::baseline(), std::vector<ActionId>{0}, 0.9, 1e-9),
               LengthMismatch);
}

TEST(EvaluatePolicy, DeterministicOptimumMatchesValue) {
  auto g = testing::two_state_graph();
  Environment env = make_env(g, RewardVariant::baseline());
  QTable q = value_iteration(g, RewardVariant::baseline(), 0.9, 1e-12);
  auto v = policy_value(g, RewardVariant::baseline(), greedy_policy(q), 0.9, 1e-12);
  Rng rng(1);
  EXPECT_DOUBLE_EQ(evaluate_policy(env, q, 50, rng), v[0]);
}

TEST(EvaluatePolicy, SingleEpisodeIsOneRollout) {
  auto g = testing::chain_graph();
  Environment env = make_env(g, RewardVariant::baseline());
  QTable q = value_iteration(g, RewardVariant::baseline(), 0.9, 1e-12);
  Rng rng(1);
  EXPECT_DOUBLE_EQ(evaluate_policy(env, q, 1, rng), -0.04 + 2.0);
}

TEST(EvaluatePolicy, TrainedBeatsZeroTable) {
  Environment env = make_env(default_graph(), RewardVariant::baseline());
  TrainConfig c;
  c.convergence_mode = ConvergenceMode::kNone;
  c.seed = 5;
  TrainResult r = train(env, c);
  Rng a(17), b(17);
  double zero = evaluate_policy(env, QTable(67, 10), 100, a);
  double trained = evaluate_policy(env, r.q_table, 100, b);
  EXPECT_LT(zero, trained);
}

}  // namespace
}  // namespace rlfi
