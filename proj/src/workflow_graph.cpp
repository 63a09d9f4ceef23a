#include "rlfi/workflow_graph.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <tuple>

#include <nlohmann/json.hpp>

#include "json_util.hpp"

namespace rlfi {

using nlohmann::json;
using detail::as_int;
using detail::as_number;
using detail::parse_state_key;
using detail::require_fields;
using detail::schema_error;

WorkflowGraph::WorkflowGraph(int num_states, int num_actions,
                             std::map<EdgeKey, std::vector<Transition>> transitions,
                             std::set<StateId> terminal_states,
                             std::map<StateId, std::string> milestones,
                             std::map<StateId, std::string> state_labels)
    : num_states_(num_states),
      num_actions_(num_actions),
      transitions_(std::move(transitions)),
      terminal_states_(std::move(terminal_states)),
      milestones_(std::move(milestones)),
      state_labels_(std::move(state_labels)) {
  build_index();
}

void WorkflowGraph::build_index() {
  flat_edges_.clear();
  slots_.clear();
  terminal_flags_.assign(std::max(num_states_, 0), false);
  for (StateId t : terminal_states_) {
    if (t >= 0 && t < num_states_) terminal_flags_[t] = true;
  }
  if (num_states_ <= 0 || num_actions_ <= 0) return;
  slots_.assign(static_cast<std::size_t>(num_states_) * num_actions_, {0, 0});
  for (StateId s = 0; s < num_states_; ++s) {
    if (terminal_flags_[s]) continue;
    for (ActionId a = 0; a < num_actions_; ++a) {
      auto offset = static_cast<std::uint32_t>(flat_edges_.size());
      auto it = transitions_.find({s, a});
      if (it != transitions_.end()) {
        flat_edges_.insert(flat_edges_.end(), it->second.begin(),
                           it->second.end());
      } else {
        flat_edges_.push_back({1.0, s, kDefaultStepReward, false});
      }
      slots_[static_cast<std::size_t>(s) * num_actions_ + a] = {
          offset, static_cast<std::uint32_t>(flat_edges_.size()) - offset};
    }
  }
}

std::span<const Transition> WorkflowGraph::edges(StateId s, ActionId a) const {
  if (s < 0 || s >= num_states_ || a < 0 || a >= num_actions_) return {};
  auto [offset, count] = slots_[static_cast<std::size_t>(s) * num_actions_ + a];
  return {flat_edges_.data() + offset, count};
}

std::string WorkflowGraph::hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : serialize_graph(*this)) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string_view to_string(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::kProbabilitySum: return "ProbabilitySum";
    case ViolationKind::kDanglingState: return "DanglingState";
    case ViolationKind::kUnreachableTerminal: return "UnreachableTerminal";
    case ViolationKind::kIndexOutOfRange: return "IndexOutOfRange";
    case ViolationKind::kTerminalHasEdges: return "TerminalHasEdges";
    case ViolationKind::kDoneFlagMismatch: return "DoneFlagMismatch";
  }
  return "Unknown";
}

std::string to_string(const GraphViolation& v) {
  std::string out(to_string(v.kind));
  out += " at (" + std::to_string(v.state);
  if (v.action) out += ", " + std::to_string(*v.action);
  out += "): " + v.detail;
  return out;
}

namespace {

std::string join_violations(const std::vector<GraphViolation>& violations) {
  std::string msg = "graph has " + std::to_string(violations.size()) +
                    " violation(s)";
  for (const auto& v : violations) msg += "\n  " + to_string(v);
  return msg;
}

}  // namespace

ValidationError::ValidationError(std::vector<GraphViolation> violations)
    : Error(join_violations(violations)), violations_(std::move(violations)) {}

std::vector<bool> reachable_from(const WorkflowGraph& graph, StateId start) {
  std::vector<bool> seen(std::max(graph.num_states(), 0), false);
  if (start < 0 || start >= graph.num_states()) return seen;
  std::deque<StateId> frontier{start};
  seen[start] = true;
  while (!frontier.empty()) {
    StateId s = frontier.front();
    frontier.pop_front();
    if (graph.is_terminal(s)) continue;
    for (ActionId a = 0; a < graph.num_actions(); ++a) {
      for (const Transition& t : graph.edges(s, a)) {
        if (t.probability <= 0.0) continue;
        if (t.next_state < 0 || t.next_state >= graph.num_states()) continue;
        if (!seen[t.next_state]) {
          seen[t.next_state] = true;
          frontier.push_back(t.next_state);
        }
      }
    }
  }
  return seen;
}

std::vector<GraphViolation> validate(const WorkflowGraph& graph) {
  std::vector<GraphViolation> out;
  const int n = graph.num_states();
  const int m = graph.num_actions();
  auto in_states = [n](StateId s) { return s >= 0 && s < n; };

  if (n <= 0) {
    out.push_back({ViolationKind::kIndexOutOfRange, 0, std::nullopt,
                   "num_states must be positive"});
    return out;
  }
  if (m <= 0) {
    out.push_back({ViolationKind::kIndexOutOfRange, 0, std::nullopt,
                   "num_actions must be positive"});
    return out;
  }

  for (StateId t : graph.terminal_states()) {
    if (!in_states(t)) {
      out.push_back({ViolationKind::kIndexOutOfRange, t, std::nullopt,
                     "terminal state out of range"});
    }
  }
  for (const auto& [s, label] : graph.milestones()) {
    if (!in_states(s)) {
      out.push_back({ViolationKind::kIndexOutOfRange, s, std::nullopt,
                     "milestone '" + label + "' names a state out of range"});
    }
  }
  for (const auto& [s, label] : graph.state_labels()) {
    if (!in_states(s)) {
      out.push_back({ViolationKind::kIndexOutOfRange, s, std::nullopt,
                     "state label names a state out of range"});
    }
  }

  std::vector<bool> has_entry(n, false);
  for (const auto& [key, edges] : graph.transitions()) {
    const auto [s, a] = key;
    if (!in_states(s) || a < 0 || a >= m) {
      out.push_back({ViolationKind::kIndexOutOfRange, s, a,
                     "transition key out of range"});
      continue;
    }
    has_entry[s] = true;
    if (graph.is_terminal(s)) {
      out.push_back({ViolationKind::kTerminalHasEdges, s, a,
                     "terminal state has an outgoing entry"});
    }
    double sum = 0.0;
    bool bad_probability = false;
    for (std::size_t i = 0; i < edges.size(); ++i) {
      const Transition& t = edges[i];
      if (!(t.probability >= 0.0 && t.probability <= 1.0)) bad_probability = true;
      sum += t.probability;
      if (!in_states(t.next_state)) {
        out.push_back({ViolationKind::kIndexOutOfRange, s, a,
                       "edge " + std::to_string(i) + " targets state " +
                           std::to_string(t.next_state)});
      } else if (t.done && !graph.is_terminal(t.next_state)) {
        out.push_back({ViolationKind::kDoneFlagMismatch, s, a,
                       "edge " + std::to_string(i) +
                           " is marked done but targets non-terminal state " +
                           std::to_string(t.next_state)});
      }
      if (!std::isfinite(t.reward)) {
        out.push_back({ViolationKind::kProbabilitySum, s, a,
                       "edge " + std::to_string(i) + " has a non-finite reward"});
      }
    }
    if (edges.empty()) {
      out.push_back({ViolationKind::kProbabilitySum, s, a, "empty edge list"});
    } else if (bad_probability || !(std::fabs(sum - 1.0) <= kProbabilityTolerance)) {
      char buf[64];
      std::snprintf(buf, sizeof(buf), "probabilities sum to %.12g", sum);
      out.push_back({ViolationKind::kProbabilitySum, s, a,
                     bad_probability ? "probability outside [0, 1]" : buf});
    }
  }

  for (StateId s = 0; s < n; ++s) {
    if (!graph.is_terminal(s) && !has_entry[s]) {
      out.push_back({ViolationKind::kDanglingState, s, std::nullopt,
                     "non-terminal state has no populated action"});
    }
  }

  if (graph.terminal_states().empty()) {
    out.push_back({ViolationKind::kUnreachableTerminal, 0, std::nullopt,
                   "graph declares no terminal state"});
  } else {
    const std::vector<bool> seen = reachable_from(graph, 0);
    for (StateId t : graph.terminal_states()) {
      if (in_states(t) && !seen[t]) {
        out.push_back({ViolationKind::kUnreachableTerminal, t, std::nullopt,
                       "terminal state not reachable from state 0"});
      }
    }
  }

  std::stable_sort(out.begin(), out.end(),
                   [](const GraphViolation& x, const GraphViolation& y) {
                     auto ax = x.action ? *x.action : -1;
                     auto ay = y.action ? *y.action : -1;
                     return std::tie(x.state, ax, x.kind) <
                            std::tie(y.state, ay, y.kind);
                   });
  return out;
}

// ---------------------------------------------------------------------------
// JSON document

namespace {

std::map<StateId, std::string> parse_label_map(const detail::json& obj,
                                               const std::string& path) {
  if (!obj.is_object()) schema_error(path, "expected an object");
  std::map<StateId, std::string> out;
  for (const auto& [key, value] : obj.items()) {
    if (!value.is_string()) schema_error(path + "." + key, "expected a string");
    out[parse_state_key(key, path)] = value.get<std::string>();
  }
  return out;
}

}  // namespace

WorkflowGraph load_graph(std::string_view document) {
  const detail::json doc = detail::parse_json(document);

  require_fields(doc, "$",
                 {"num_states", "num_actions", "terminal_states", "milestones",
                  "transitions"},
                 {"state_labels"});
  const int num_states = as_int(doc["num_states"], "$.num_states");
  const int num_actions = as_int(doc["num_actions"], "$.num_actions");

  std::set<StateId> terminals;
  if (!doc["terminal_states"].is_array()) {
    schema_error("$.terminal_states", "expected an array");
  }
  for (std::size_t i = 0; i < doc["terminal_states"].size(); ++i) {
    terminals.insert(as_int(doc["terminal_states"][i],
                            "$.terminal_states[" + std::to_string(i) + "]"));
  }

  auto milestones = parse_label_map(doc["milestones"], "$.milestones");
  std::map<StateId, std::string> labels;
  if (doc.contains("state_labels")) {
    labels = parse_label_map(doc["state_labels"], "$.state_labels");
  }

  std::map<EdgeKey, std::vector<Transition>> transitions;
  const detail::json& entries = doc["transitions"];
  if (!entries.is_array()) schema_error("$.transitions", "expected an array");
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const std::string path = "$.transitions[" + std::to_string(i) + "]";
    const detail::json& entry = entries[i];
    require_fields(entry, path, {"state", "action", "edges"});
    const StateId s = as_int(entry["state"], path + ".state");
    const ActionId a = as_int(entry["action"], path + ".action");
    if (!entry["edges"].is_array()) schema_error(path + ".edges", "expected an array");
    std::vector<Transition> edges;
    for (std::size_t j = 0; j < entry["edges"].size(); ++j) {
      const std::string epath = path + ".edges[" + std::to_string(j) + "]";
      const detail::json& e = entry["edges"][j];
      require_fields(e, epath, {"p", "next", "reward", "done"});
      if (!e["done"].is_boolean()) schema_error(epath + ".done", "expected a boolean");
      edges.push_back({as_number(e["p"], epath + ".p"),
                       as_int(e["next"], epath + ".next"),
                       as_number(e["reward"], epath + ".reward"),
                       e["done"].get<bool>()});
    }
    if (!transitions.emplace(EdgeKey{s, a}, std::move(edges)).second) {
      schema_error(path, "duplicate entry for (" + std::to_string(s) + ", " +
                             std::to_string(a) + ")");
    }
  }

  WorkflowGraph graph(num_states, num_actions, std::move(transitions),
                      std::move(terminals), std::move(milestones),
                      std::move(labels));
  auto violations = validate(graph);
  if (!violations.empty()) throw ValidationError(std::move(violations));
  return graph;
}

std::string serialize_graph(const WorkflowGraph& graph) {
  json doc = json::object();
  doc["num_states"] = graph.num_states();
  doc["num_actions"] = graph.num_actions();
  doc["terminal_states"] = json::array();
  for (StateId t : graph.terminal_states()) doc["terminal_states"].push_back(t);
  doc["milestones"] = json::object();
  for (const auto& [s, label] : graph.milestones()) {
    doc["milestones"][std::to_string(s)] = label;
  }
  if (!graph.state_labels().empty()) {
    doc["state_labels"] = json::object();
    for (const auto& [s, label] : graph.state_labels()) {
      doc["state_labels"][std::to_string(s)] = label;
    }
  }
  doc["transitions"] = json::array();
  for (const auto& [key, edges] : graph.transitions()) {
    json entry = {{"state", key.first}, {"action", key.second}};
    entry["edges"] = json::array();
    for (const Transition& t : edges) {
      entry["edges"].push_back({{"p", t.probability},
                                {"next", t.next_state},
                                {"reward", t.reward},
                                {"done", t.done}});
    }
    doc["transitions"].push_back(std::move(entry));
  }
  return doc.dump(1) + "\n";
}

}  // namespace rlfi
