#ifndef RLFI_POLICY_EVAL_HPP_
#define RLFI_POLICY_EVAL_HPP_

#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "rlfi/mdp_env.hpp"
#include "rlfi/qlearn.hpp"
#include "rlfi/rng.hpp"
#include "rlfi/workflow_graph.hpp"

namespace rlfi {

using PolicyVector = std::vector<ActionId>;

struct IdealActionList {
  std::vector<ActionId> actions;
  std::vector<StateId> landing;

  friend bool operator==(const IdealActionList&, const IdealActionList&) = default;
};

PolicyVector greedy_policy(const QTable& q);

// exp(x - max x) / sum. Throws NonFiniteInput on NaN or inf entries and
// std::invalid_argument on an empty input.
std::vector<double> stable_softmax(std::span<const double> x);

enum class SoftmaxMode { kArgmaxOfProbs, kSample };

PolicyVector softmax_policy(const QTable& q, SoftmaxMode mode, Rng& rng);

// Fraction of positions where the two lists agree.
double get_acc(std::span<const ActionId> ideal, std::span<const ActionId> predicted);

// Fixed 5-decimal rendering used in reports, e.g. 0.66667.
std::string format_accuracy(double acc);

// Most probable next state of edge (s, action); ties go to the lowest index.
StateId landing_state(const WorkflowGraph& graph, StateId s, ActionId action);

// Greedy policy on Q* of `variant`, with landing states from landing_state.
IdealActionList derive_ideal(const WorkflowGraph& graph, const RewardVariant& variant,
                             double gamma, double tolerance = 1e-10);

// Throws LengthMismatch, InvalidAction or LandingMismatch.
void check_ideal(const WorkflowGraph& graph, const IdealActionList& ideal);

using Trajectory = std::vector<std::pair<StateId, ActionId>>;

// Follows ideal.actions / ideal.landing from `start` until a terminal state or
// `max_hops` moves; the final state is emitted too.
Trajectory simulate_trajectory(const WorkflowGraph& graph, const IdealActionList& ideal,
                               StateId start = 0, int max_hops = 20);

// {"actions": [...], "landing": [...]}
IdealActionList load_ideal(std::string_view document);
std::string serialize_ideal(const IdealActionList& ideal);

const IdealActionList& default_ideal();

}  // namespace rlfi

#endif  // RLFI_POLICY_EVAL_HPP_
