#ifndef RLFI_TELEMETRY_HPP_
#define RLFI_TELEMETRY_HPP_

#include <filesystem>
#include <string>
#include <string_view>

#include "rlfi/qlearn.hpp"

namespace rlfi {

std::string q_updates_csv(const std::vector<QUpdate>& updates);
std::string episode_rewards_csv(const std::vector<EpisodeReward>& rewards);
std::string epsilon_trace_csv(const std::vector<double>& trace);

// Header state,a0,a1,...; values printed exactly so a reload is lossless.
std::string qtable_csv(const QTable& q);
QTable parse_qtable_csv(std::string_view text);

// q_updates.csv, episode_rewards.csv, epsilon_trace.csv, tracked_updates.csv
// and qtable.csv under `dir`.
void write_train_outputs(const std::filesystem::path& dir, const TrainResult& result);

}  // namespace rlfi

#endif  // RLFI_TELEMETRY_HPP_
