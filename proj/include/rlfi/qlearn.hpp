#ifndef RLFI_QLEARN_HPP_
#define RLFI_QLEARN_HPP_

#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "rlfi/mdp_env.hpp"
#include "rlfi/rng.hpp"
#include "rlfi/workflow_graph.hpp"

namespace rlfi {

class QTable {
 public:
  QTable() = default;
  QTable(int num_states, int num_actions)
      : num_states_(num_states),
        num_actions_(num_actions),
        values_(static_cast<std::size_t>(num_states) * num_actions, 0.0) {}

  int num_states() const { return num_states_; }
  int num_actions() const { return num_actions_; }

  double& at(StateId s, ActionId a) { return values_[index(s, a)]; }
  double at(StateId s, ActionId a) const { return values_[index(s, a)]; }

  std::span<const double> row(StateId s) const {
    return {values_.data() + index(s, 0), static_cast<std::size_t>(num_actions_)};
  }
  std::span<double> row(StateId s) {
    return {values_.data() + index(s, 0), static_cast<std::size_t>(num_actions_)};
  }

  double max_in_row(StateId s) const;
  // Lowest index among maximizers.
  ActionId argmax_in_row(StateId s) const;

  const std::vector<double>& values() const { return values_; }

  friend bool operator==(const QTable&, const QTable&) = default;

 private:
  std::size_t index(StateId s, ActionId a) const {
    return static_cast<std::size_t>(s) * num_actions_ + a;
  }

  int num_states_ = 0;
  int num_actions_ = 0;
  std::vector<double> values_;
};

enum class ConvergenceMode {
  kPaper,   // stop at the first update with 0 < |new - old| < threshold
  kStable,  // ... that holds for `stable_window` consecutive nonzero updates
  kNone,    // run the full episode budget
};

std::string to_string(ConvergenceMode mode);
std::optional<ConvergenceMode> convergence_mode_from_string(std::string_view s);

struct TrainConfig {
  double alpha = 0.1;
  double gamma = 0.9;
  double epsilon0 = 0.9;
  // Post-episode decrement is epsilon_decay_value * 0.5. Unset means
  // (epsilon0 - epsilon_min) / episodes.
  std::optional<double> epsilon_decay_value;
  double epsilon_min = 0.0;
  // Per-step multiplicative decay inside an episode; 0 disables it.
  double step_decay = 0.0;
  int episodes = 1000;
  int max_steps_per_episode = 200;
  double convergence_threshold = 1e-4;
  ConvergenceMode convergence_mode = ConvergenceMode::kStable;
  int stable_window = 50;
  std::uint64_t seed = 0;

  double resolved_decay_value() const;
  // Throws std::invalid_argument describing the first bad field.
  void check() const;

  friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

struct QUpdate {
  double old_q = 0.0;
  double new_q = 0.0;
  int episode = 0;
  ActionId action = 0;

  friend bool operator==(const QUpdate&, const QUpdate&) = default;
};

struct EpisodeReward {
  double episodic_return = 0.0;
  int episode = 0;
  int steps = 0;

  friend bool operator==(const EpisodeReward&, const EpisodeReward&) = default;
};

struct TrainTelemetry {
  std::vector<QUpdate> q_updates;
  std::vector<QUpdate> tracked_updates;
  std::vector<EpisodeReward> episode_rewards;
  std::vector<double> epsilon_trace;

  friend bool operator==(const TrainTelemetry&, const TrainTelemetry&) = default;
};

struct TrainResult {
  QTable q_table;
  TrainTelemetry telemetry;
  std::optional<int> episodes_to_convergence;
  bool converged = false;

  friend bool operator==(const TrainResult&, const TrainResult&) = default;
};

using WatchPairs = std::set<EdgeKey>;

// Epsilon-greedy: uniform action with probability epsilon, else the lowest
// index maximizer of q[state].
ActionId select_action(const QTable& q, StateId state, double epsilon, Rng& rng);

inline double bellman_update(double q_sa, double reward, double max_next_q,
                             double alpha, double gamma) {
  return q_sa + alpha * (reward + gamma * max_next_q - q_sa);
}

// Tabular Q-learning. `env` is reset at the start of every episode; the rng
// stream is seeded from config.seed.
TrainResult train(Environment& env, const TrainConfig& config,
                  const WatchPairs& watch_pairs = {});

// Synchronous Bellman optimality sweeps until the largest change is below
// `tolerance`. Terminal rows stay zero.
QTable value_iteration(const WorkflowGraph& graph, const RewardVariant& variant,
                       double gamma, double tolerance);

// V^pi for a deterministic policy; terminal entries are zero.
std::vector<double> policy_value(const WorkflowGraph& graph,
                                 const RewardVariant& variant,
                                 std::span<const ActionId> policy, double gamma,
                                 double tolerance);

// Mean undiscounted return of greedy rollouts from state 0.
double evaluate_policy(Environment& env, const QTable& q, int episodes, Rng& rng,
                       int max_steps = 200);

}  // namespace rlfi

#endif  // RLFI_QLEARN_HPP_
