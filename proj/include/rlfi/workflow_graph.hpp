#ifndef RLFI_WORKFLOW_GRAPH_HPP_
#define RLFI_WORKFLOW_GRAPH_HPP_

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "rlfi/errors.hpp"

namespace rlfi {

using StateId = int;
using ActionId = int;

// Step penalty carried by implicit self-loop slots and by default edges.
inline constexpr double kDefaultStepReward = -0.04;
inline constexpr double kProbabilityTolerance = 1e-9;

struct Transition {
  double probability = 0.0;
  StateId next_state = 0;
  double reward = kDefaultStepReward;
  bool done = false;

  friend bool operator==(const Transition&, const Transition&) = default;
};

using EdgeKey = std::pair<StateId, ActionId>;

// A finite episodic MDP. (state, action) pairs listed in `transitions` are the
// populated slots; any other slot of a non-terminal state behaves as a
// self-loop with the default step penalty. Immutable once built.
class WorkflowGraph {
 public:
  WorkflowGraph() = default;
  WorkflowGraph(int num_states, int num_actions,
                std::map<EdgeKey, std::vector<Transition>> transitions,
                std::set<StateId> terminal_states,
                std::map<StateId, std::string> milestones = {},
                std::map<StateId, std::string> state_labels = {});

  int num_states() const { return num_states_; }
  int num_actions() const { return num_actions_; }
  const std::map<EdgeKey, std::vector<Transition>>& transitions() const {
    return transitions_;
  }
  const std::set<StateId>& terminal_states() const { return terminal_states_; }
  const std::map<StateId, std::string>& milestones() const {
    return milestones_;
  }
  const std::map<StateId, std::string>& state_labels() const {
    return state_labels_;
  }

  bool is_terminal(StateId s) const {
    return s >= 0 && s < num_states_ && terminal_flags_[s];
  }
  bool is_populated(StateId s, ActionId a) const {
    return transitions_.count({s, a}) != 0;
  }
  std::size_t populated_count() const { return transitions_.size(); }

  // Edges taken by `a` in `s`, including the implicit self-loop for
  // unpopulated slots. Empty for terminal or out-of-range inputs.
  std::span<const Transition> edges(StateId s, ActionId a) const;

  // FNV-1a 64 over the canonical serialization, as 16 hex digits.
  std::string hash() const;

  friend bool operator==(const WorkflowGraph& a, const WorkflowGraph& b) {
    return a.num_states_ == b.num_states_ && a.num_actions_ == b.num_actions_ &&
           a.transitions_ == b.transitions_ &&
           a.terminal_states_ == b.terminal_states_ &&
           a.milestones_ == b.milestones_ && a.state_labels_ == b.state_labels_;
  }

 private:
  void build_index();

  int num_states_ = 0;
  int num_actions_ = 0;
  std::map<EdgeKey, std::vector<Transition>> transitions_;
  std::set<StateId> terminal_states_;
  std::map<StateId, std::string> milestones_;
  std::map<StateId, std::string> state_labels_;

  // Dense lookup: edges_[s * num_actions + a] -> [offset, offset + count).
  std::vector<Transition> flat_edges_;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> slots_;
  std::vector<bool> terminal_flags_;
};

enum class ViolationKind {
  kProbabilitySum,
  kDanglingState,
  kUnreachableTerminal,
  kIndexOutOfRange,
  kTerminalHasEdges,
  kDoneFlagMismatch,
};

std::string_view to_string(ViolationKind kind);

struct GraphViolation {
  ViolationKind kind;
  StateId state;
  std::optional<ActionId> action;
  std::string detail;

  friend bool operator==(const GraphViolation&, const GraphViolation&) = default;
};

std::string to_string(const GraphViolation& v);

class ValidationError : public Error {
 public:
  explicit ValidationError(std::vector<GraphViolation> violations);
  const std::vector<GraphViolation>& violations() const { return violations_; }

 private:
  std::vector<GraphViolation> violations_;
};

// Checks every graph invariant. Sorted by (state, action, kind); an absent
// action sorts before action 0.
std::vector<GraphViolation> validate(const WorkflowGraph& graph);

// States reachable from `start` over positive-probability edges.
std::vector<bool> reachable_from(const WorkflowGraph& graph, StateId start);

// Strict JSON reader: unknown fields are rejected. Throws ParseError or
// ValidationError.
WorkflowGraph load_graph(std::string_view document);
std::string serialize_graph(const WorkflowGraph& graph);

// 67-state, 10-action investigation workflow.
const WorkflowGraph& default_graph();

namespace milestone {
inline constexpr StateId kStart = 0;
inline constexpr StateId kWinPmemInstalled = 5;
inline constexpr StateId kMemoryAcquired = 10;
inline constexpr StateId kOsIdentified = 15;
inline constexpr StateId kInvestigationComplete = 66;
}  // namespace milestone

}  // namespace rlfi

#endif  // RLFI_WORKFLOW_GRAPH_HPP_
