#include "rlfi/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace rlfi {

std::vector<double> default_learning_rates() {
  return {0.001, 0.01, 0.05, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
}

std::vector<std::string> default_environment_names() {
  return {"env_new1", "env_new2", "env_new3"};
}

void SweepConfig::check() const {
  if (learning_rates.empty()) throw std::invalid_argument("learning_rates is empty");
  for (std::size_t i = 0; i < learning_rates.size(); ++i) {
    const double lr = learning_rates[i];
    if (!(lr > 0.0 && lr <= 1.0)) {
      throw std::invalid_argument("learning rate " + format_lr(lr) + " outside (0, 1]");
    }
    if (i > 0 && !(lr > learning_rates[i - 1])) {
      throw std::invalid_argument("learning_rates must be strictly increasing");
    }
  }
  if (environment_names.empty()) {
    throw std::invalid_argument("environment_names is empty");
  }
  for (std::size_t i = 0; i < environment_names.size(); ++i) {
    if (!kind_from_env_name(environment_names[i])) {
      throw std::invalid_argument("unknown environment " + environment_names[i]);
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (environment_names[i] == environment_names[j]) {
        throw std::invalid_argument("duplicate environment " + environment_names[i]);
      }
    }
  }
  if (seeds_per_cell < 1) throw std::invalid_argument("seeds_per_cell must be >= 1");
  if (learning_rates.size() > 0xffff || seeds_per_cell > 0xffff) {
    throw std::invalid_argument("sweep grid too large");
  }
  if (early_step_threshold < 0) {
    throw std::invalid_argument("early_step_threshold must be >= 0");
  }
  if (jobs < 1) throw std::invalid_argument("jobs must be >= 1");
  base.check();
}

const TrainResult& SweepResult::at(const std::string& env, double lr,
                                   int seed_index) const {
  for (std::size_t i = 0; i < learning_rates.size(); ++i) {
    if (learning_rates[i] == lr) {
      auto it = cells.find({env, static_cast<int>(i), seed_index});
      if (it == cells.end()) break;
      return it->second;
    }
  }
  throw MissingLearningRate(lr);
}

std::uint64_t cell_seed(std::uint64_t base_seed, int env_index, int lr_index,
                        int seed_index) {
  const std::uint64_t packed = (static_cast<std::uint64_t>(env_index) << 48) |
                               (static_cast<std::uint64_t>(lr_index) << 32) |
                               static_cast<std::uint64_t>(seed_index);
  return mix64(base_seed + mix64(packed));
}

std::string format_lr(double lr) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, lr);
  return std::string(buf, res.ptr);
}

std::string cell_name(const std::string& env, double lr, int seed_index) {
  return env + "_" + format_lr(lr) + "_" + std::to_string(seed_index);
}

SweepResult run_sweep(const WorkflowGraph& graph, const SweepConfig& config) {
  config.check();
  auto shared = std::make_shared<const WorkflowGraph>(graph);

  struct Job {
    CellKey key;
    RewardVariant variant;
    TrainConfig train;
  };
  std::vector<Job> work;
  for (std::size_t e = 0; e < config.environment_names.size(); ++e) {
    const std::string& name = config.environment_names[e];
    RewardVariant variant{*kind_from_env_name(name), config.early_step_threshold};
    for (std::size_t l = 0; l < config.learning_rates.size(); ++l) {
      for (int k = 0; k < config.seeds_per_cell; ++k) {
        TrainConfig tc = config.base;
        tc.alpha = config.learning_rates[l];
        tc.seed = cell_seed(config.base.seed, static_cast<int>(e),
                            static_cast<int>(l), k);
        work.push_back({{name, static_cast<int>(l), k}, variant, tc});
      }
    }
  }

  std::vector<TrainResult> out(work.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < work.size(); i = next++) {
      Environment env(shared, work[i].variant);
      out[i] = train(env, work[i].train);
    }
  };
  const int threads =
      static_cast<int>(std::min<std::size_t>(config.jobs, work.size()));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  }

  SweepResult result;
  result.environment_names = config.environment_names;
  result.learning_rates = config.learning_rates;
  result.seeds_per_cell = config.seeds_per_cell;
  result.episode_budget = config.base.episodes;
  for (std::size_t i = 0; i < work.size(); ++i) {
    result.cells.emplace(work[i].key, std::move(out[i]));
  }
  return result;
}

namespace {

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  if (n == 0) return 0.0;
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

std::vector<ConvergenceRow> convergence_table(const SweepResult& result) {
  std::vector<std::string> envs = result.environment_names;
  std::sort(envs.begin(), envs.end());
  std::vector<ConvergenceRow> rows;
  for (const std::string& env : envs) {
    for (std::size_t l = 0; l < result.learning_rates.size(); ++l) {
      std::vector<double> episodes;
      int converged = 0;
      for (int k = 0; k < result.seeds_per_cell; ++k) {
        auto it = result.cells.find({env, static_cast<int>(l), k});
        if (it == result.cells.end()) continue;
        const TrainResult& r = it->second;
        if (r.converged && r.episodes_to_convergence) {
          episodes.push_back(*r.episodes_to_convergence);
          ++converged;
        } else {
          episodes.push_back(result.episode_budget);
        }
      }
      if (episodes.empty()) continue;
      rows.push_back({env, result.learning_rates[l], median(episodes),
                      static_cast<double>(converged) / episodes.size()});
    }
  }
  std::stable_sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
    return a.env != b.env ? a.env < b.env : a.lr < b.lr;
  });
  return rows;
}

std::map<std::string, std::vector<RewardPoint>> reward_dynamics(
    const SweepResult& result, double lr, std::pair<int, int> window) {
  std::map<std::string, std::vector<RewardPoint>> series;
  for (const std::string& env : result.environment_names) {
    const TrainResult& r = result.at(env, lr, 0);
    std::vector<RewardPoint>& points = series[env];
    for (const EpisodeReward& e : r.telemetry.episode_rewards) {
      if (e.episode < window.first || e.episode > window.second) continue;
      if (e.steps == 0) continue;
      points.push_back({e.episode, e.episodic_return / e.steps});
    }
  }
  return series;
}

}  // namespace rlfi
