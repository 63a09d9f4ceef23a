#ifndef RLFI_MDP_ENV_HPP_
#define RLFI_MDP_ENV_HPP_

#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include "rlfi/rng.hpp"
#include "rlfi/workflow_graph.hpp"

namespace rlfi {

enum class RewardKind { kBaseline, kTerminalBonus, kTimePenalty };

// Reward policy layered over a graph.
//   Baseline       step -0.04 (or the edge's own reward), terminal +2
//   TerminalBonus  step -0.04, terminal +4 within early_step_threshold steps, else +2
//   TimePenalty    step -0.1,  terminal +4
struct RewardVariant {
  RewardKind kind = RewardKind::kBaseline;
  int early_step_threshold = 15;

  static RewardVariant baseline() { return {RewardKind::kBaseline, 15}; }
  static RewardVariant terminal_bonus(int threshold = 15) {
    return {RewardKind::kTerminalBonus, threshold};
  }
  static RewardVariant time_penalty() { return {RewardKind::kTimePenalty, 15}; }

  // Reward for taking `edge`, where `step_number` is the 1-based index of the
  // step within the episode.
  double reward(const Transition& edge, bool enters_terminal,
                int step_number) const;

  // Markov reward used by planners: terminal entry in TerminalBonus is
  // treated as early.
  double planning_reward(const Transition& edge, bool enters_terminal) const;

  double step_penalty() const;
  double terminal_reward(bool early) const;

  friend bool operator==(const RewardVariant&, const RewardVariant&) = default;
};

// Names used in reports: env_new1, env_new2, env_new3.
std::string env_name(RewardKind kind);
std::optional<RewardKind> kind_from_env_name(std::string_view name);
// CLI spelling: baseline, terminal-bonus, time-penalty.
std::string variant_flag(RewardKind kind);
std::optional<RewardKind> kind_from_flag(std::string_view flag);

struct StepOutcome {
  StateId next_state = 0;
  double reward = 0.0;
  bool done = false;
  int sampled_edge_index = 0;
};

// Inverse-CDF draw over `edges` in declared order.
int sample_edge(std::span<const Transition> edges, Rng& rng);

class Environment {
 public:
  Environment(std::shared_ptr<const WorkflowGraph> graph, RewardVariant variant);

  StateId reset();
  StepOutcome step(ActionId action, Rng& rng);

  const WorkflowGraph& graph() const { return *graph_; }
  const std::shared_ptr<const WorkflowGraph>& shared_graph() const {
    return graph_;
  }
  const RewardVariant& variant() const { return variant_; }
  StateId current_state() const { return state_; }
  int steps_in_episode() const { return steps_; }
  int num_states() const { return graph_->num_states(); }
  int num_actions() const { return graph_->num_actions(); }

 private:
  std::shared_ptr<const WorkflowGraph> graph_;
  RewardVariant variant_;
  StateId state_ = 0;
  int steps_ = 0;
};

Environment make_env(std::shared_ptr<const WorkflowGraph> graph,
                     RewardVariant variant);
Environment make_env(const WorkflowGraph& graph, RewardVariant variant);

}  // namespace rlfi

#endif  // RLFI_MDP_ENV_HPP_
