#include "rlfi/qlearn.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rlfi {

double QTable::max_in_row(StateId s) const {
  auto r = row(s);
  return *std::max_element(r.begin(), r.end());
}

ActionId QTable::argmax_in_row(StateId s) const {
  auto r = row(s);
  // max_element returns the first maximizer.
  return static_cast<ActionId>(std::max_element(r.begin(), r.end()) - r.begin());
}

std::string to_string(ConvergenceMode mode) {
  switch (mode) {
    case ConvergenceMode::kPaper: return "paper";
    case ConvergenceMode::kStable: return "stable";
    case ConvergenceMode::kNone: return "none";
  }
  return "stable";
}

std::optional<ConvergenceMode> convergence_mode_from_string(std::string_view s) {
  if (s == "paper") return ConvergenceMode::kPaper;
  if (s == "stable") return ConvergenceMode::kStable;
  if (s == "none") return ConvergenceMode::kNone;
  return std::nullopt;
}

double TrainConfig::resolved_decay_value() const {
  if (epsilon_decay_value) return *epsilon_decay_value;
  if (episodes <= 0) return 0.0;
  return (epsilon0 - epsilon_min) / episodes;
}

void TrainConfig::check() const {
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw std::invalid_argument("alpha must lie in (0, 1]");
  }
  if (!(gamma >= 0.0 && gamma < 1.0)) {
    throw std::invalid_argument("gamma must lie in [0, 1)");
  }
  if (!(epsilon0 >= 0.0 && epsilon0 <= 1.0)) {
    throw std::invalid_argument("epsilon0 must lie in [0, 1]");
  }
  if (!(epsilon_min >= 0.0 && epsilon_min <= 1.0)) {
    throw std::invalid_argument("epsilon_min must lie in [0, 1]");
  }
  if (epsilon_decay_value && !(*epsilon_decay_value > 0.0)) {
    throw std::invalid_argument("epsilon_decay_value must be positive");
  }
  if (!(step_decay >= 0.0 && step_decay < 1.0)) {
    throw std::invalid_argument("step_decay must lie in [0, 1)");
  }
  if (episodes < 0) throw std::invalid_argument("episodes must be >= 0");
  if (max_steps_per_episode <= 0) {
    throw std::invalid_argument("max_steps_per_episode must be positive");
  }
  if (!(convergence_threshold > 0.0)) {
    throw std::invalid_argument("convergence_threshold must be positive");
  }
  if (stable_window <= 0) throw std::invalid_argument("stable_window must be positive");
}

ActionId select_action(const QTable& q, StateId state, double epsilon, Rng& rng) {
  if (uniform01(rng) < epsilon) {
    return static_cast<ActionId>(uniform_index(rng, q.num_actions()));
  }
  return q.argmax_in_row(state);
}

TrainResult train(Environment& env, const TrainConfig& config,
                  const WatchPairs& watch_pairs) {
  config.check();
  const WorkflowGraph& graph = env.graph();
  TrainResult result;
  result.q_table = QTable(graph.num_states(), graph.num_actions());
  QTable& q = result.q_table;
  TrainTelemetry& tel = result.telemetry;

  Rng rng(config.seed);
  const double decay = config.resolved_decay_value();
  double epsilon = config.epsilon0;
  int quiet_updates = 0;

  for (int episode = 0; episode < config.episodes; ++episode) {
    StateId state = env.reset();
    double episodic_return = 0.0;
    int steps = 0;
    bool done = false;
    tel.epsilon_trace.push_back(epsilon);

    while (!done && !graph.is_terminal(state) &&
           steps < config.max_steps_per_episode) {
      const ActionId action = select_action(q, state, epsilon, rng);
      const StepOutcome out = env.step(action, rng);
      episodic_return += out.reward;
      ++steps;

      const double max_next = out.done ? 0.0 : q.max_in_row(out.next_state);
      const double old_q = q.at(state, action);
      const double new_q =
          bellman_update(old_q, out.reward, max_next, config.alpha, config.gamma);
      q.at(state, action) = new_q;

      if (watch_pairs.count({state, action})) {
        tel.tracked_updates.push_back({old_q, new_q, episode, action});
      }
      tel.q_updates.push_back({old_q, new_q, episode, action});
      state = out.next_state;
      done = out.done;

      if (config.step_decay > 0.0) {
        epsilon = std::max(config.epsilon_min, epsilon * (1.0 - config.step_decay));
      }

      if (config.convergence_mode != ConvergenceMode::kNone && new_q != old_q) {
        if (std::fabs(new_q - old_q) < config.convergence_threshold) {
          ++quiet_updates;
        } else {
          quiet_updates = 0;
        }
        const int needed =
            config.convergence_mode == ConvergenceMode::kPaper ? 1 : config.stable_window;
        if (quiet_updates >= needed) {
          result.converged = true;
          result.episodes_to_convergence = episode + 1;
          break;
        }
      }
    }

    tel.episode_rewards.push_back({episodic_return, episode, steps});
    if (result.converged) break;
    epsilon = std::max(config.epsilon_min, epsilon - decay * 0.5);
  }
  return result;
}

namespace {

double expected_backup(const WorkflowGraph& graph, const RewardVariant& variant,
                       StateId s, ActionId a, double gamma,
                       const std::vector<double>& value) {
  double total = 0.0;
  for (const Transition& t : graph.edges(s, a)) {
    if (t.probability <= 0.0) continue;
    const bool terminal = graph.is_terminal(t.next_state);
    const double next = terminal ? 0.0 : value[t.next_state];
    total += t.probability * (variant.planning_reward(t, terminal) + gamma * next);
  }
  return total;
}

}  // namespace

QTable value_iteration(const WorkflowGraph& graph, const RewardVariant& variant,
                       double gamma, double tolerance) {
  if (!(gamma >= 0.0 && gamma < 1.0)) throw std::invalid_argument("gamma must lie in [0, 1)");
  if (!(tolerance > 0.0)) throw std::invalid_argument("tolerance must be positive");
  const int n = graph.num_states();
  const int m = graph.num_actions();
  QTable q(n, m);
  std::vector<double> value(n, 0.0);
  while (true) {
    double delta = 0.0;
    QTable next(n, m);
    for (StateId s = 0; s < n; ++s) {
      if (graph.is_terminal(s)) continue;
      for (ActionId a = 0; a < m; ++a) {
        next.at(s, a) = expected_backup(graph, variant, s, a, gamma, value);
        delta = std::max(delta, std::fabs(next.at(s, a) - q.at(s, a)));
      }
    }
    q = std::move(next);
    for (StateId s = 0; s < n; ++s) {
      value[s] = graph.is_terminal(s) ? 0.0 : q.max_in_row(s);
    }
    if (delta < tolerance) break;
  }
  return q;
}

std::vector<double> policy_value(const WorkflowGraph& graph,
                                 const RewardVariant& variant,
                                 std::span<const ActionId> policy, double gamma,
                                 double tolerance) {
  if (!(gamma >= 0.0 && gamma < 1.0)) throw std::invalid_argument("gamma must lie in [0, 1)");
  if (!(tolerance > 0.0)) throw std::invalid_argument("tolerance must be positive");
  const int n = graph.num_states();
  if (policy.size() != static_cast<std::size_t>(n)) {
    throw LengthMismatch(policy.size(), static_cast<std::size_t>(n));
  }
  std::vector<double> value(n, 0.0);
  while (true) {
    double delta = 0.0;
    std::vector<double> next(n, 0.0);
    for (StateId s = 0; s < n; ++s) {
      if (graph.is_terminal(s)) continue;
      next[s] = expected_backup(graph, variant, s, policy[s], gamma, value);
      delta = std::max(delta, std::fabs(next[s] - value[s]));
    }
    value = std::move(next);
    if (delta < tolerance) break;
  }
  return value;
}

double evaluate_policy(Environment& env, const QTable& q, int episodes, Rng& rng,
                       int max_steps) {
  if (episodes < 1) throw std::invalid_argument("episodes must be >= 1");
  double total = 0.0;
  for (int e = 0; e < episodes; ++e) {
    StateId state = env.reset();
    double ret = 0.0;
    for (int step = 0; step < max_steps && !env.graph().is_terminal(state); ++step) {
      const StepOutcome out = env.step(q.argmax_in_row(state), rng);
      ret += out.reward;
      state = out.next_state;
      if (out.done) break;
    }
    total += ret;
  }
  return total / episodes;
}

}  // namespace rlfi
