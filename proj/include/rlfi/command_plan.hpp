#ifndef RLFI_COMMAND_PLAN_HPP_
#define RLFI_COMMAND_PLAN_HPP_

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "rlfi/policy_eval.hpp"
#include "rlfi/workflow_graph.hpp"

namespace rlfi {

inline constexpr std::string_view kActionOutOfListSize = "action out of list size";
inline constexpr std::string_view kTransitionalState = "transitional state";

// State -> ordered command templates. Templates may use {pid}, {image},
// {profile} and {outdir}; any other brace text is copied verbatim unless it
// looks like {identifier}.
using CommandMenu = std::map<StateId, std::vector<std::string>>;

struct CommandContext {
  long pid = 340;
  std::optional<std::string> image = "memory.raw";
  std::optional<std::string> profile = "Win10x64_19041";
  std::optional<std::string> outdir = "output";
};

struct RenderedCommand {
  std::string text;
  bool is_sentinel = false;

  friend bool operator==(const RenderedCommand&, const RenderedCommand&) = default;
};

struct PlanStep {
  StateId state = 0;
  ActionId action = 0;
  RenderedCommand command;

  friend bool operator==(const PlanStep&, const PlanStep&) = default;
};

struct CommandPlan {
  std::vector<PlanStep> steps;
  std::string trajectory_id;
  std::string graph_hash;

  std::size_t sentinel_count() const;
};

bool is_sentinel_text(std::string_view text);

// Throws UnboundPlaceholder for {name} with no value in `ctx`.
std::string substitute(std::string_view tmpl, const CommandContext& ctx);

RenderedCommand create_command(const CommandMenu& menu, StateId state, ActionId action,
                               const CommandContext& ctx);

CommandPlan render_plan(const Trajectory& trajectory, const CommandMenu& menu,
                        const CommandContext& ctx, std::string trajectory_id = {},
                        std::string graph_hash = {});

const CommandMenu& default_menu();
std::size_t template_count(const CommandMenu& menu);

// Empty templates and unsupported placeholder names.
std::vector<std::string> menu_problems(const CommandMenu& menu);

// {"0": [template, ...], ...}. Throws ParseError.
CommandMenu load_menu(std::string_view document);
std::string serialize_menu(const CommandMenu& menu);

// One {"state", "action", "command", "sentinel"} object per line.
std::string serialize_plan_jsonl(const CommandPlan& plan);
// Throws ParseError; `sentinel` must agree with the command text.
CommandPlan load_plan_jsonl(std::string_view text);

// Execution

struct RunOutcome {
  int status = 0;
  double seconds = 0.0;
  std::string output;
};

class CommandRunner {
 public:
  virtual ~CommandRunner() = default;
  virtual RunOutcome run(const std::string& command) = 0;
  virtual bool dry_run() const { return false; }
};

// Echoes the command, status 0, 0.0 s.
class DryRunRunner : public CommandRunner {
 public:
  RunOutcome run(const std::string& command) override;
  bool dry_run() const override { return true; }
};

// Runs through /bin/sh, capturing stdout and stderr.
class ShellRunner : public CommandRunner {
 public:
  RunOutcome run(const std::string& command) override;
};

// Fixed outcome per command text; unknown commands get `fallback`.
class ScriptedRunner : public CommandRunner {
 public:
  explicit ScriptedRunner(std::map<std::string, RunOutcome> script,
                          RunOutcome fallback = {})
      : script_(std::move(script)), fallback_(std::move(fallback)) {}
  RunOutcome run(const std::string& command) override;
  const std::vector<std::string>& calls() const { return calls_; }

 private:
  std::map<std::string, RunOutcome> script_;
  RunOutcome fallback_;
  std::vector<std::string> calls_;
};

struct HashVerdict {
  std::string digest;
  std::optional<bool> malicious;
  std::string source;

  friend bool operator==(const HashVerdict&, const HashVerdict&) = default;
};

class HashLookupClient {
 public:
  virtual ~HashLookupClient() = default;
  virtual HashVerdict lookup(const std::string& digest) = 0;
};

class DryRunHashClient : public HashLookupClient {
 public:
  HashVerdict lookup(const std::string& digest) override {
    return {digest, std::nullopt, "unknown"};
  }
};

// VirusTotal v3 file lookup. Null when built without TLS support or when
// VT_API_KEY is unset.
std::unique_ptr<HashLookupClient> make_virustotal_client();

// Hex digests (32, 40 or 64 characters) found as whitespace separated tokens.
std::vector<std::string> extract_digests(std::string_view text);

// A hash step is "hashlookup <digest>..." or "<producer> | hashlookup"; the
// producer runs on the runner and digests are read from its output.
bool is_hash_step(std::string_view command);

struct ExecuteOptions {
  bool skip_sentinels = true;
  bool fail_fast = false;
};

struct LogEntry {
  std::size_t step = 0;
  int status = 0;
  double seconds = 0.0;
  std::string output;

  friend bool operator==(const LogEntry&, const LogEntry&) = default;
};

// Runs steps in order. A nonzero status is recorded; with fail_fast it also
// throws RunnerFailure after the entry is appended to `log`.
void execute_plan(const CommandPlan& plan, CommandRunner& runner,
                  HashLookupClient& hash_client, const ExecuteOptions& options,
                  std::vector<LogEntry>& log);

std::vector<LogEntry> execute_plan(const CommandPlan& plan, CommandRunner& runner,
                                   HashLookupClient& hash_client,
                                   const ExecuteOptions& options = {});

}  // namespace rlfi

#endif  // RLFI_COMMAND_PLAN_HPP_
