#include "rlfi/telemetry.hpp"

#include "rlfi/csv.hpp"
#include "rlfi/errors.hpp"
#include "rlfi/files.hpp"

namespace rlfi {

std::string q_updates_csv(const std::vector<QUpdate>& updates) {
  std::string out = "old_q,new_q,episode,action\n";
  for (const QUpdate& u : updates) {
    out += format_g12(u.old_q) + "," + format_g12(u.new_q) + "," +
           std::to_string(u.episode) + "," + std::to_string(u.action) + "\n";
  }
  return out;
}

std::string episode_rewards_csv(const std::vector<EpisodeReward>& rewards) {
  std::string out = "return,episode,steps\n";
  for (const EpisodeReward& r : rewards) {
    out += format_g12(r.episodic_return) + "," + std::to_string(r.episode) + "," +
           std::to_string(r.steps) + "\n";
  }
  return out;
}

std::string epsilon_trace_csv(const std::vector<double>& trace) {
  std::string out = "episode,epsilon\n";
  for (std::size_t i = 0; i < trace.size(); ++i) {
    out += std::to_string(i) + "," + format_g12(trace[i]) + "\n";
  }
  return out;
}

std::string qtable_csv(const QTable& q) {
  std::string out = "state";
  for (ActionId a = 0; a < q.num_actions(); ++a) out += ",a" + std::to_string(a);
  out += "\n";
  for (StateId s = 0; s < q.num_states(); ++s) {
    out += std::to_string(s);
    for (double v : q.row(s)) out += "," + format_exact(v);
    out += "\n";
  }
  return out;
}

QTable parse_qtable_csv(std::string_view text) {
  const auto records = parse_csv(text);
  if (records.empty()) throw ParseError(1, "empty q-table");
  const auto& header = records[0].fields;
  if (header.size() < 2 || header[0] != "state") {
    throw ParseError(1, "q-table header must start with 'state'");
  }
  const int num_actions = static_cast<int>(header.size()) - 1;
  for (int a = 0; a < num_actions; ++a) {
    if (header[a + 1] != "a" + std::to_string(a)) {
      throw ParseError(1, "unexpected column '" + header[a + 1] + "'");
    }
  }
  const int num_states = static_cast<int>(records.size()) - 1;
  QTable q(num_states, num_actions);
  for (int s = 0; s < num_states; ++s) {
    const CsvRecord& rec = records[s + 1];
    if (rec.fields.size() != header.size()) {
      throw ParseError(rec.line, "expected " + std::to_string(header.size()) + " fields");
    }
    if (parse_integer(rec.fields[0], rec.line, "state") != s) {
      throw ParseError(rec.line, "rows must list states 0..n-1 in order");
    }
    for (int a = 0; a < num_actions; ++a) {
      q.at(s, a) = parse_real(rec.fields[a + 1], rec.line, header[a + 1]);
    }
  }
  return q;
}

void write_train_outputs(const std::filesystem::path& dir, const TrainResult& result) {
  const TrainTelemetry& t = result.telemetry;
  write_text_file(dir / "q_updates.csv", q_updates_csv(t.q_updates));
  write_text_file(dir / "tracked_updates.csv", q_updates_csv(t.tracked_updates));
  write_text_file(dir / "episode_rewards.csv", episode_rewards_csv(t.episode_rewards));
  write_text_file(dir / "epsilon_trace.csv", epsilon_trace_csv(t.epsilon_trace));
  write_text_file(dir / "qtable.csv", qtable_csv(result.q_table));
}

}  // namespace rlfi
