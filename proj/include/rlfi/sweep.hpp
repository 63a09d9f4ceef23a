#ifndef RLFI_SWEEP_HPP_
#define RLFI_SWEEP_HPP_

#include <map>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "rlfi/mdp_env.hpp"
#include "rlfi/qlearn.hpp"
#include "rlfi/workflow_graph.hpp"

namespace rlfi {

std::vector<double> default_learning_rates();
std::vector<std::string> default_environment_names();

struct SweepConfig {
  std::vector<double> learning_rates = default_learning_rates();
  std::vector<std::string> environment_names = default_environment_names();
  TrainConfig base;
  int seeds_per_cell = 1;
  int early_step_threshold = 15;
  // Worker threads; results do not depend on it.
  int jobs = 1;

  // Throws std::invalid_argument describing the first bad field.
  void check() const;
};

struct CellKey {
  std::string env;
  int lr_index = 0;
  int seed_index = 0;

  friend auto operator<=>(const CellKey&, const CellKey&) = default;
};

struct SweepResult {
  std::vector<std::string> environment_names;
  std::vector<double> learning_rates;
  int seeds_per_cell = 1;
  int episode_budget = 0;
  std::map<CellKey, TrainResult> cells;

  const TrainResult& at(const std::string& env, double lr, int seed_index = 0) const;

  friend bool operator==(const SweepResult&, const SweepResult&) = default;
};

// Seed for one cell. Injective over (env, lr, seed) indices below 2^16 each.
std::uint64_t cell_seed(std::uint64_t base_seed, int env_index, int lr_index,
                        int seed_index);

// Directory name for a cell, e.g. env_new2_0.4_0.
std::string cell_name(const std::string& env, double lr, int seed_index);

// Shortest decimal text that reads back as `lr`.
std::string format_lr(double lr);

SweepResult run_sweep(const WorkflowGraph& graph, const SweepConfig& config);

struct ConvergenceRow {
  std::string env;
  double lr = 0.0;
  double median_episodes = 0.0;
  double converged_fraction = 0.0;

  friend bool operator==(const ConvergenceRow&, const ConvergenceRow&) = default;
};

// One row per (env, lr), sorted by env then lr. Cells that never converged
// count as the episode budget.
std::vector<ConvergenceRow> convergence_table(const SweepResult& result);

struct RewardPoint {
  int episode = 0;
  double reward_per_step = 0.0;
};

// Average reward per step over episodes [first, last] for every env at `lr`,
// seed index 0. Episodes with zero steps are skipped.
std::map<std::string, std::vector<RewardPoint>> reward_dynamics(
    const SweepResult& result, double lr, std::pair<int, int> window = {3, 100});

}  // namespace rlfi

#endif  // RLFI_SWEEP_HPP_
