#include "rlfi/policy_eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "json_util.hpp"

namespace rlfi {

PolicyVector greedy_policy(const QTable& q) {
  PolicyVector policy(q.num_states());
  for (StateId s = 0; s < q.num_states(); ++s) policy[s] = q.argmax_in_row(s);
  return policy;
}

std::vector<double> stable_softmax(std::span<const double> x) {
  if (x.empty()) throw std::invalid_argument("softmax of an empty vector");
  for (double v : x) {
    if (!std::isfinite(v)) throw NonFiniteInput("softmax input is not finite");
  }
  const double peak = *std::max_element(x.begin(), x.end());
  std::vector<double> out(x.size());
  double total = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    out[i] = std::exp(x[i] - peak);
    total += out[i];
  }
  for (double& v : out) v /= total;
  return out;
}

PolicyVector softmax_policy(const QTable& q, SoftmaxMode mode, Rng& rng) {
  PolicyVector policy(q.num_states());
  for (StateId s = 0; s < q.num_states(); ++s) {
    const std::vector<double> probs = stable_softmax(q.row(s));
    if (mode == SoftmaxMode::kArgmaxOfProbs) {
      policy[s] = static_cast<ActionId>(
          std::max_element(probs.begin(), probs.end()) - probs.begin());
      continue;
    }
    const double u = uniform01(rng);
    double cumulative = 0.0;
    ActionId pick = static_cast<ActionId>(probs.size()) - 1;
    for (std::size_t a = 0; a < probs.size(); ++a) {
      cumulative += probs[a];
      if (u < cumulative) {
        pick = static_cast<ActionId>(a);
        break;
      }
    }
    policy[s] = pick;
  }
  return policy;
}

double get_acc(std::span<const ActionId> ideal, std::span<const ActionId> predicted) {
  if (ideal.size() != predicted.size()) {
    throw LengthMismatch(ideal.size(), predicted.size());
  }
  if (ideal.empty()) throw std::invalid_argument("accuracy of empty lists");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < ideal.size(); ++i) hits += ideal[i] == predicted[i];
  return static_cast<double>(hits) / static_cast<double>(ideal.size());
}

std::string format_accuracy(double acc) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.5f", acc);
  return buf;
}

StateId landing_state(const WorkflowGraph& graph, StateId s, ActionId action) {
  auto edges = graph.edges(s, action);
  if (edges.empty()) return s;
  StateId best = -1;
  double best_p = -1.0;
  for (const Transition& t : edges) {
    if (t.probability > best_p || (t.probability == best_p && t.next_state < best)) {
      best = t.next_state;
      best_p = t.probability;
    }
  }
  return best;
}

IdealActionList derive_ideal(const WorkflowGraph& graph, const RewardVariant& variant,
                             double gamma, double tolerance) {
  const QTable q = value_iteration(graph, variant, gamma, tolerance);
  IdealActionList ideal;
  ideal.actions = greedy_policy(q);
  ideal.landing.resize(graph.num_states());
  for (StateId s = 0; s < graph.num_states(); ++s) {
    ideal.landing[s] = landing_state(graph, s, ideal.actions[s]);
  }
  return ideal;
}

void check_ideal(const WorkflowGraph& graph, const IdealActionList& ideal) {
  const auto n = static_cast<std::size_t>(graph.num_states());
  if (ideal.actions.size() != n) throw LengthMismatch(ideal.actions.size(), n);
  if (ideal.landing.size() != n) throw LengthMismatch(ideal.landing.size(), n);
  for (StateId s = 0; s < graph.num_states(); ++s) {
    const ActionId a = ideal.actions[s];
    if (a < 0 || a >= graph.num_actions()) throw InvalidAction(a, graph.num_actions());
    const StateId landing = ideal.landing[s];
    if (graph.is_terminal(s)) {
      if (landing != s) throw LandingMismatch(s, a, landing);
      continue;
    }
    auto edges = graph.edges(s, a);
    const bool reachable = std::any_of(edges.begin(), edges.end(), [&](const Transition& t) {
      return t.probability > 0.0 && t.next_state == landing;
    });
    if (!reachable) throw LandingMismatch(s, a, landing);
  }
}

Trajectory simulate_trajectory(const WorkflowGraph& graph, const IdealActionList& ideal,
                               StateId start, int max_hops) {
  if (max_hops < 0) throw std::invalid_argument("max_hops must be >= 0");
  check_ideal(graph, ideal);
  if (start < 0 || start >= graph.num_states()) {
    throw std::invalid_argument("start state out of range");
  }
  Trajectory path;
  StateId state = start;
  for (int hop = 0;; ++hop) {
    path.emplace_back(state, ideal.actions[state]);
    if (graph.is_terminal(state) || hop == max_hops) break;
    state = ideal.landing[state];
  }
  return path;
}

IdealActionList load_ideal(std::string_view document) {
  using namespace detail;
  const json doc = parse_json(document);
  require_fields(doc, "$", {"actions", "landing"});
  IdealActionList ideal;
  for (const char* field : {"actions", "landing"}) {
    const std::string path = std::string("$.") + field;
    const json& arr = doc[field];
    if (!arr.is_array()) schema_error(path, "expected an array");
    std::vector<int>& out = std::string_view(field) == "actions" ? ideal.actions
                                                                 : ideal.landing;
    for (std::size_t i = 0; i < arr.size(); ++i) {
      out.push_back(as_int(arr[i], path + "[" + std::to_string(i) + "]"));
    }
  }
  return ideal;
}

std::string serialize_ideal(const IdealActionList& ideal) {
  detail::json doc;
  doc["actions"] = ideal.actions;
  doc["landing"] = ideal.landing;
  return doc.dump() + "\n";
}

const IdealActionList& default_ideal() {
  static const IdealActionList ideal =
      derive_ideal(default_graph(), RewardVariant::baseline(), TrainConfig{}.gamma);
  return ideal;
}

}  // namespace rlfi
