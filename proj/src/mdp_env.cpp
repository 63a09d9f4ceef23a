#include "rlfi/mdp_env.hpp"

#include <stdexcept>

namespace rlfi {

double RewardVariant::step_penalty() const {
  return kind == RewardKind::kTimePenalty ? -0.1 : kDefaultStepReward;
}

double RewardVariant::terminal_reward(bool early) const {
  switch (kind) {
    case RewardKind::kBaseline: return 2.0;
    case RewardKind::kTerminalBonus: return early ? 4.0 : 2.0;
    case RewardKind::kTimePenalty: return 4.0;
  }
  return 2.0;
}

double RewardVariant::reward(const Transition& edge, bool enters_terminal,
                             int step_number) const {
  if (enters_terminal) {
    return terminal_reward(step_number <= early_step_threshold);
  }
  // Baseline keeps any explicit per-edge reward from the graph.
  if (kind == RewardKind::kBaseline) return edge.reward;
  return step_penalty();
}

double RewardVariant::planning_reward(const Transition& edge,
                                      bool enters_terminal) const {
  if (enters_terminal) return terminal_reward(true);
  return kind == RewardKind::kBaseline ? edge.reward : step_penalty();
}

std::string env_name(RewardKind kind) {
  switch (kind) {
    case RewardKind::kBaseline: return "env_new1";
    case RewardKind::kTerminalBonus: return "env_new2";
    case RewardKind::kTimePenalty: return "env_new3";
  }
  return "env_new1";
}

std::optional<RewardKind> kind_from_env_name(std::string_view name) {
  if (name == "env_new1") return RewardKind::kBaseline;
  if (name == "env_new2") return RewardKind::kTerminalBonus;
  if (name == "env_new3") return RewardKind::kTimePenalty;
  return std::nullopt;
}

std::string variant_flag(RewardKind kind) {
  switch (kind) {
    case RewardKind::kBaseline: return "baseline";
    case RewardKind::kTerminalBonus: return "terminal-bonus";
    case RewardKind::kTimePenalty: return "time-penalty";
  }
  return "baseline";
}

std::optional<RewardKind> kind_from_flag(std::string_view flag) {
  if (flag == "baseline") return RewardKind::kBaseline;
  if (flag == "terminal-bonus") return RewardKind::kTerminalBonus;
  if (flag == "time-penalty") return RewardKind::kTimePenalty;
  return kind_from_env_name(flag);
}

int sample_edge(std::span<const Transition> edges, Rng& rng) {
  const double u = uniform01(rng);
  double cumulative = 0.0;
  int last_positive = 0;
  for (std::size_t i = 0; i < edges.size(); ++i) {
    if (edges[i].probability <= 0.0) continue;
    cumulative += edges[i].probability;
    last_positive = static_cast<int>(i);
    if (u < cumulative) return last_positive;
  }
  // Rounding left u above the final cumulative sum.
  return last_positive;
}

Environment::Environment(std::shared_ptr<const WorkflowGraph> graph,
                         RewardVariant variant)
    : graph_(std::move(graph)), variant_(variant) {
  if (!graph_) throw std::invalid_argument("environment needs a graph");
}

StateId Environment::reset() {
  state_ = 0;
  steps_ = 0;
  return state_;
}

StepOutcome Environment::step(ActionId action, Rng& rng) {
  if (graph_->is_terminal(state_)) throw SteppedTerminal(state_);
  if (action < 0 || action >= graph_->num_actions()) {
    throw InvalidAction(action, graph_->num_actions());
  }
  auto edges = graph_->edges(state_, action);
  const int index = sample_edge(edges, rng);
  const Transition& edge = edges[index];
  ++steps_;
  StepOutcome out;
  out.next_state = edge.next_state;
  out.done = graph_->is_terminal(edge.next_state);
  out.reward = variant_.reward(edge, out.done, steps_);
  out.sampled_edge_index = index;
  state_ = edge.next_state;
  return out;
}

Environment make_env(std::shared_ptr<const WorkflowGraph> graph,
                     RewardVariant variant) {
  return Environment(std::move(graph), variant);
}

Environment make_env(const WorkflowGraph& graph, RewardVariant variant) {
  return Environment(std::make_shared<const WorkflowGraph>(graph), variant);
}

}  // namespace rlfi
