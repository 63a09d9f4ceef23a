#include "rlfi/command_plan.hpp"

#include <sys/wait.h>

#include <algorithm>
#include <array>
#include <cctype>
#include <chrono>
#include <cstdio>

#include "json_util.hpp"

namespace rlfi {

namespace {

bool is_identifier(std::string_view s) {
  if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) {
    return false;
  }
  return std::all_of(s.begin(), s.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
  });
}

bool is_supported(std::string_view name) {
  return name == "pid" || name == "image" || name == "profile" || name == "outdir";
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

// Calls on_name for every {identifier} in `tmpl` and on_text for the text
// between them.
template <typename OnName, typename OnText>
void scan_template(std::string_view tmpl, OnName on_name, OnText on_text) {
  std::size_t i = 0;
  while (i < tmpl.size()) {
    const std::size_t open = tmpl.find('{', i);
    if (open == std::string_view::npos) break;
    const std::size_t close = tmpl.find('}', open + 1);
    if (close == std::string_view::npos) break;
    const std::string_view name = tmpl.substr(open + 1, close - open - 1);
    if (!is_identifier(name)) {
      on_text(tmpl.substr(i, open + 1 - i));
      i = open + 1;
      continue;
    }
    on_text(tmpl.substr(i, open - i));
    on_name(name);
    i = close + 1;
  }
  on_text(tmpl.substr(i));
}

}  // namespace

std::size_t CommandPlan::sentinel_count() const {
  return static_cast<std::size_t>(std::count_if(
      steps.begin(), steps.end(), [](const PlanStep& s) { return s.command.is_sentinel; }));
}

bool is_sentinel_text(std::string_view text) {
  return text == kActionOutOfListSize || text == kTransitionalState;
}

std::string substitute(std::string_view tmpl, const CommandContext& ctx) {
  std::string out;
  scan_template(
      tmpl,
      [&](std::string_view name) {
        const std::optional<std::string>* value = nullptr;
        if (name == "pid") {
          out += std::to_string(ctx.pid);
          return;
        }
        if (name == "image") value = &ctx.image;
        if (name == "profile") value = &ctx.profile;
        if (name == "outdir") value = &ctx.outdir;
        if (!value || !value->has_value()) throw UnboundPlaceholder(std::string(name));
        out += **value;
      },
      [&](std::string_view text) { out += text; });
  return out;
}

RenderedCommand create_command(const CommandMenu& menu, StateId state, ActionId action,
                               const CommandContext& ctx) {
  auto it = menu.find(state);
  if (it == menu.end()) return {std::string(kTransitionalState), true};
  if (action < 0 || static_cast<std::size_t>(action) >= it->second.size()) {
    return {std::string(kActionOutOfListSize), true};
  }
  return {substitute(it->second[action], ctx), false};
}

CommandPlan render_plan(const Trajectory& trajectory, const CommandMenu& menu,
                        const CommandContext& ctx, std::string trajectory_id,
                        std::string graph_hash) {
  CommandPlan plan;
  plan.trajectory_id = std::move(trajectory_id);
  plan.graph_hash = std::move(graph_hash);
  for (const auto& [state, action] : trajectory) {
    plan.steps.push_back({state, action, create_command(menu, state, action, ctx)});
  }
  return plan;
}

std::size_t template_count(const CommandMenu& menu) {
  std::size_t n = 0;
  for (const auto& [_, templates] : menu) n += templates.size();
  return n;
}

std::vector<std::string> menu_problems(const CommandMenu& menu) {
  std::vector<std::string> problems;
  for (const auto& [state, templates] : menu) {
    for (std::size_t i = 0; i < templates.size(); ++i) {
      const std::string where =
          "state " + std::to_string(state) + " slot " + std::to_string(i);
      if (trim(templates[i]).empty()) problems.push_back(where + ": empty template");
      scan_template(
          templates[i],
          [&](std::string_view name) {
            if (!is_supported(name)) {
              problems.push_back(where + ": unsupported placeholder {" +
                                 std::string(name) + "}");
            }
          },
          [](std::string_view) {});
    }
  }
  return problems;
}

CommandMenu load_menu(std::string_view document) {
  using namespace detail;
  const json doc = parse_json(document);
  if (!doc.is_object()) schema_error("$", "expected an object");
  CommandMenu menu;
  for (const auto& [key, value] : doc.items()) {
    const std::string path = "$." + key;
    const StateId state = parse_state_key(key, "$");
    if (menu.count(state)) schema_error(path, "duplicate state");
    if (!value.is_array()) schema_error(path, "expected an array");
    std::vector<std::string> templates;
    for (std::size_t i = 0; i < value.size(); ++i) {
      templates.push_back(as_string(value[i], path + "[" + std::to_string(i) + "]"));
    }
    menu.emplace(state, std::move(templates));
  }
  const auto problems = menu_problems(menu);
  if (!problems.empty()) schema_error("$", problems.front());
  return menu;
}

std::string serialize_menu(const CommandMenu& menu) {
  detail::json doc = detail::json::object();
  for (const auto& [state, templates] : menu) doc[std::to_string(state)] = templates;
  return doc.dump(2) + "\n";
}

std::string serialize_plan_jsonl(const CommandPlan& plan) {
  std::string out;
  for (const PlanStep& step : plan.steps) {
    detail::json line = {{"state", step.state},
                         {"action", step.action},
                         {"command", step.command.text},
                         {"sentinel", step.command.is_sentinel}};
    out += line.dump() + "\n";
  }
  return out;
}

CommandPlan load_plan_jsonl(std::string_view text) {
  using namespace detail;
  CommandPlan plan;
  int line = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view raw = text.substr(pos, end - pos);
    pos = end + 1;
    ++line;
    if (trim(raw).empty()) continue;
    json obj;
    try {
      obj = json::parse(raw.begin(), raw.end());
    } catch (const json::parse_error& e) {
      throw ParseError(line, e.what());
    }
    const std::string where = "line " + std::to_string(line);
    require_fields(obj, where, {"state", "action", "command", "sentinel"});
    PlanStep step;
    step.state = as_int(obj["state"], where + ".state");
    step.action = as_int(obj["action"], where + ".action");
    step.command.text = as_string(obj["command"], where + ".command");
    if (!obj["sentinel"].is_boolean()) schema_error(where + ".sentinel", "expected a boolean");
    step.command.is_sentinel = obj["sentinel"].get<bool>();
    if (step.command.is_sentinel != is_sentinel_text(step.command.text)) {
      schema_error(where + ".sentinel", "flag disagrees with the command text");
    }
    plan.steps.push_back(std::move(step));
  }
  return plan;
}

// Runners

RunOutcome DryRunRunner::run(const std::string& command) { return {0, 0.0, command}; }

RunOutcome ShellRunner::run(const std::string& command) {
  const auto start = std::chrono::steady_clock::now();
  const std::string wrapped = "( " + command + " ) 2>&1";
  FILE* pipe = ::popen(wrapped.c_str(), "r");
  if (!pipe) return {127, 0.0, "failed to start /bin/sh"};
  RunOutcome out;
  std::array<char, 4096> buf;
  std::size_t n;
  while ((n = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) out.output.append(buf.data(), n);
  const int raw = ::pclose(pipe);
  if (raw == -1) {
    out.status = 127;
  } else if (WIFEXITED(raw)) {
    out.status = WEXITSTATUS(raw);
  } else if (WIFSIGNALED(raw)) {
    out.status = 128 + WTERMSIG(raw);
  }
  out.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

RunOutcome ScriptedRunner::run(const std::string& command) {
  calls_.push_back(command);
  auto it = script_.find(command);
  return it == script_.end() ? fallback_ : it->second;
}

// Hash lookups

std::vector<std::string> extract_digests(std::string_view text) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    std::size_t j = i;
    while (j < text.size() && !std::isspace(static_cast<unsigned char>(text[j]))) ++j;
    const std::string_view token = text.substr(i, j - i);
    const bool hex = std::all_of(token.begin(), token.end(), [](char c) {
      return std::isxdigit(static_cast<unsigned char>(c));
    });
    if (hex && (token.size() == 32 || token.size() == 40 || token.size() == 64)) {
      std::string digest(token);
      std::transform(digest.begin(), digest.end(), digest.begin(),
                     [](unsigned char c) { return std::tolower(c); });
      out.push_back(std::move(digest));
    }
    i = j;
  }
  return out;
}

namespace {

constexpr std::string_view kHashCommand = "hashlookup";

// Producer text of "<producer> | hashlookup", or nullopt.
std::optional<std::string_view> hash_producer(std::string_view command) {
  command = trim(command);
  if (command.size() <= kHashCommand.size() || !command.ends_with(kHashCommand)) {
    return std::nullopt;
  }
  std::string_view head = trim(command.substr(0, command.size() - kHashCommand.size()));
  if (head.empty() || head.back() != '|') return std::nullopt;
  head.remove_suffix(1);
  head = trim(head);
  if (head.empty()) return std::nullopt;
  return head;
}

bool is_direct_hash(std::string_view command) {
  command = trim(command);
  return command == kHashCommand ||
         (command.starts_with(kHashCommand) && command.size() > kHashCommand.size() &&
          std::isspace(static_cast<unsigned char>(command[kHashCommand.size()])));
}

std::string verdict_line(const HashVerdict& v) {
  const char* label = !v.malicious ? "unknown" : (*v.malicious ? "malicious" : "clean");
  return v.digest + " " + label + " " + v.source + "\n";
}

}  // namespace

bool is_hash_step(std::string_view command) {
  return is_direct_hash(command) || hash_producer(command).has_value();
}

void execute_plan(const CommandPlan& plan, CommandRunner& runner,
                  HashLookupClient& hash_client, const ExecuteOptions& options,
                  std::vector<LogEntry>& log) {
  for (std::size_t i = 0; i < plan.steps.size(); ++i) {
    const RenderedCommand& cmd = plan.steps[i].command;
    if (cmd.is_sentinel && options.skip_sentinels) continue;

    LogEntry entry;
    entry.step = i;
    if (cmd.is_sentinel) {
      entry.output = cmd.text;
    } else if (is_hash_step(cmd.text)) {
      std::string digest_source;
      if (auto producer = hash_producer(cmd.text)) {
        RunOutcome r = runner.run(std::string(*producer));
        entry.status = r.status;
        entry.seconds = r.seconds;
        entry.output = r.output;
        digest_source = runner.dry_run() ? std::string() : r.output;
      } else {
        digest_source = std::string(trim(cmd.text).substr(kHashCommand.size()));
      }
      if (entry.status == 0) {
        const auto start = std::chrono::steady_clock::now();
        for (const std::string& d : extract_digests(digest_source)) {
          entry.output += verdict_line(hash_client.lookup(d));
        }
        if (!runner.dry_run()) {
          entry.seconds += std::chrono::duration<double>(
                               std::chrono::steady_clock::now() - start)
                               .count();
        }
      }
    } else {
      RunOutcome r = runner.run(cmd.text);
      entry.status = r.status;
      entry.seconds = r.seconds;
      entry.output = std::move(r.output);
    }
    log.push_back(std::move(entry));
    if (options.fail_fast && log.back().status != 0) {
      throw RunnerFailure(i, log.back().status);
    }
  }
}

std::vector<LogEntry> execute_plan(const CommandPlan& plan, CommandRunner& runner,
                                   HashLookupClient& hash_client,
                                   const ExecuteOptions& options) {
  std::vector<LogEntry> log;
  execute_plan(plan, runner, hash_client, options, log);
  return log;
}

}  // namespace rlfi
