#include "rlfi/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <map>
#include <optional>

#include "json_util.hpp"
#include "rlfi/command_plan.hpp"
#include "rlfi/csv.hpp"
#include "rlfi/files.hpp"
#include "rlfi/mdp_env.hpp"
#include "rlfi/policy_eval.hpp"
#include "rlfi/qlearn.hpp"
#include "rlfi/reporting.hpp"
#include "rlfi/sweep.hpp"
#include "rlfi/telemetry.hpp"
#include "rlfi/workflow_graph.hpp"

namespace fs = std::filesystem;

namespace rlfi {

namespace {

using detail::json;

// Raised for bad flags or config values; maps to kExitUsage.
class UsageError : public Error {
 public:
  using Error::Error;
};

struct Settings {
  std::optional<fs::path> graph;
  std::optional<fs::path> ideal;
  std::optional<fs::path> menu;
  std::vector<fs::path> timings;
  std::string variant = "baseline";
  TrainConfig train;
  int early_step_threshold = 15;
  SweepConfig sweep;
  fs::path out = "out";
};

// Values given on the command line; unset ones fall back to the config file.
struct Flags {
  std::optional<std::string> config, graph, ideal, menu, out, variant, convergence;
  std::vector<std::string> timings;
  std::optional<std::uint64_t> seed;
  std::optional<double> alpha, gamma, epsilon0, epsilon_decay, epsilon_min, step_decay,
      threshold;
  std::optional<int> episodes, max_steps, stable_window, early_threshold, seeds_per_cell,
      jobs;
  std::vector<double> lrs;
  std::vector<std::string> envs;
};

void apply_config_file(const fs::path& path, Settings& s) {
  using namespace detail;
  const json doc = parse_json(read_text_file(path));
  require_fields(doc, "$", {},
                 {"graph", "ideal", "menu", "timings", "variant", "out", "seed", "train",
                  "sweep"});
  const fs::path base = path.parent_path();
  auto resolve = [&](const json& v, const std::string& where) {
    fs::path p = as_string(v, where);
    return p.is_absolute() ? p : base / p;
  };
  if (doc.contains("graph")) s.graph = resolve(doc["graph"], "$.graph");
  if (doc.contains("ideal")) s.ideal = resolve(doc["ideal"], "$.ideal");
  if (doc.contains("menu")) s.menu = resolve(doc["menu"], "$.menu");
  if (doc.contains("timings")) {
    const json& t = doc["timings"];
    if (t.is_string()) {
      s.timings = {resolve(t, "$.timings")};
    } else {
      if (!t.is_array()) schema_error("$.timings", "expected a string or an array");
      s.timings.clear();
      for (std::size_t i = 0; i < t.size(); ++i) {
        s.timings.push_back(resolve(t[i], "$.timings[" + std::to_string(i) + "]"));
      }
    }
  }
  if (doc.contains("variant")) s.variant = as_string(doc["variant"], "$.variant");
  if (doc.contains("out")) s.out = resolve(doc["out"], "$.out");
  if (doc.contains("seed")) {
    if (!doc["seed"].is_number_unsigned()) schema_error("$.seed", "expected an unsigned integer");
    s.train.seed = doc["seed"].get<std::uint64_t>();
  }
  if (doc.contains("train")) {
    const json& t = doc["train"];
    require_fields(t, "$.train", {},
                   {"alpha", "gamma", "epsilon0", "epsilon_decay_value", "epsilon_min",
                    "step_decay", "episodes", "max_steps_per_episode",
                    "convergence_threshold", "convergence_mode", "stable_window",
                    "early_step_threshold"});
    auto num = [&](const char* key, double& dst) {
      if (t.contains(key)) dst = as_number(t[key], std::string("$.train.") + key);
    };
    auto integer = [&](const char* key, int& dst) {
      if (t.contains(key)) dst = as_int(t[key], std::string("$.train.") + key);
    };
    num("alpha", s.train.alpha);
    num("gamma", s.train.gamma);
    num("epsilon0", s.train.epsilon0);
    num("epsilon_min", s.train.epsilon_min);
    num("step_decay", s.train.step_decay);
    num("convergence_threshold", s.train.convergence_threshold);
    if (t.contains("epsilon_decay_value")) {
      s.train.epsilon_decay_value =
          as_number(t["epsilon_decay_value"], "$.train.epsilon_decay_value");
    }
    integer("episodes", s.train.episodes);
    integer("max_steps_per_episode", s.train.max_steps_per_episode);
    integer("stable_window", s.train.stable_window);
    integer("early_step_threshold", s.early_step_threshold);
    if (t.contains("convergence_mode")) {
      const std::string& m = as_string(t["convergence_mode"], "$.train.convergence_mode");
      auto mode = convergence_mode_from_string(m);
      if (!mode) schema_error("$.train.convergence_mode", "unknown mode '" + m + "'");
      s.train.convergence_mode = *mode;
    }
  }
  if (doc.contains("sweep")) {
    const json& w = doc["sweep"];
    require_fields(w, "$.sweep", {},
                   {"learning_rates", "environment_names", "seeds_per_cell", "jobs"});
    if (w.contains("learning_rates")) {
      const json& a = w["learning_rates"];
      if (!a.is_array()) schema_error("$.sweep.learning_rates", "expected an array");
      s.sweep.learning_rates.clear();
      for (std::size_t i = 0; i < a.size(); ++i) {
        s.sweep.learning_rates.push_back(
            as_number(a[i], "$.sweep.learning_rates[" + std::to_string(i) + "]"));
      }
    }
    if (w.contains("environment_names")) {
      const json& a = w["environment_names"];
      if (!a.is_array()) schema_error("$.sweep.environment_names", "expected an array");
      s.sweep.environment_names.clear();
      for (std::size_t i = 0; i < a.size(); ++i) {
        s.sweep.environment_names.push_back(
            as_string(a[i], "$.sweep.environment_names[" + std::to_string(i) + "]"));
      }
    }
    if (w.contains("seeds_per_cell")) {
      s.sweep.seeds_per_cell = as_int(w["seeds_per_cell"], "$.sweep.seeds_per_cell");
    }
    if (w.contains("jobs")) s.sweep.jobs = as_int(w["jobs"], "$.sweep.jobs");
  }
}

Settings resolve_settings(const Flags& f) {
  Settings s;
  if (f.config) {
    if (!fs::exists(*f.config)) throw UsageError("config file not found: " + *f.config);
    apply_config_file(*f.config, s);
  }
  if (f.graph) s.graph = *f.graph;
  if (f.ideal) s.ideal = *f.ideal;
  if (f.menu) s.menu = *f.menu;
  if (!f.timings.empty()) s.timings.assign(f.timings.begin(), f.timings.end());
  if (f.out) s.out = *f.out;
  if (f.variant) s.variant = *f.variant;
  if (f.seed) s.train.seed = *f.seed;
  if (f.alpha) s.train.alpha = *f.alpha;
  if (f.gamma) s.train.gamma = *f.gamma;
  if (f.epsilon0) s.train.epsilon0 = *f.epsilon0;
  if (f.epsilon_decay) s.train.epsilon_decay_value = *f.epsilon_decay;
  if (f.epsilon_min) s.train.epsilon_min = *f.epsilon_min;
  if (f.step_decay) s.train.step_decay = *f.step_decay;
  if (f.threshold) s.train.convergence_threshold = *f.threshold;
  if (f.episodes) s.train.episodes = *f.episodes;
  if (f.max_steps) s.train.max_steps_per_episode = *f.max_steps;
  if (f.stable_window) s.train.stable_window = *f.stable_window;
  if (f.early_threshold) s.early_step_threshold = *f.early_threshold;
  if (f.convergence) {
    auto mode = convergence_mode_from_string(*f.convergence);
    if (!mode) throw UsageError("unknown convergence mode '" + *f.convergence + "'");
    s.train.convergence_mode = *mode;
  }
  if (!f.lrs.empty()) s.sweep.learning_rates = f.lrs;
  if (!f.envs.empty()) {
    s.sweep.environment_names.clear();
    for (const std::string& e : f.envs) {
      auto kind = kind_from_flag(e);
      if (!kind) throw UsageError("unknown environment '" + e + "'");
      s.sweep.environment_names.push_back(env_name(*kind));
    }
  }
  if (f.seeds_per_cell) s.sweep.seeds_per_cell = *f.seeds_per_cell;
  if (f.jobs) s.sweep.jobs = *f.jobs;

  s.sweep.base = s.train;
  s.sweep.early_step_threshold = s.early_step_threshold;

  for (const auto* p : {&s.graph, &s.ideal, &s.menu}) {
    if (*p && !fs::exists(**p)) throw UsageError("file not found: " + (*p)->string());
  }
  for (const fs::path& p : s.timings) {
    if (!fs::exists(p)) throw UsageError("file not found: " + p.string());
  }
  try {
    s.train.check();
  } catch (const std::invalid_argument& e) {
    throw UsageError(std::string("invalid training config: ") + e.what());
  }
  if (s.early_step_threshold < 0) throw UsageError("early step threshold must be >= 0");
  return s;
}

RewardVariant variant_of(const Settings& s) {
  auto kind = kind_from_flag(s.variant);
  if (!kind) throw UsageError("unknown variant '" + s.variant + "'");
  return {*kind, s.early_step_threshold};
}

WorkflowGraph graph_of(const Settings& s) {
  if (!s.graph) return default_graph();
  return load_graph(read_text_file(*s.graph));
}

std::string graph_source(const Settings& s) {
  return s.graph ? s.graph->generic_string() : std::string("default");
}

IdealActionList ideal_of(const Settings& s, const WorkflowGraph& graph) {
  IdealActionList ideal =
      s.ideal ? load_ideal(read_text_file(*s.ideal))
              : (s.graph ? derive_ideal(graph, RewardVariant::baseline(), TrainConfig{}.gamma)
                         : default_ideal());
  try {
    check_ideal(graph, ideal);
  } catch (const LengthMismatch& e) {
    throw UsageError(std::string("ideal list does not fit the graph: ") + e.what());
  }
  return ideal;
}

CommandMenu menu_of(const Settings& s) {
  return s.menu ? load_menu(read_text_file(*s.menu)) : default_menu();
}

json train_config_json(const TrainConfig& c, int early_step_threshold) {
  return {{"alpha", c.alpha},
          {"gamma", c.gamma},
          {"epsilon0", c.epsilon0},
          {"epsilon_decay_value", c.resolved_decay_value()},
          {"epsilon_min", c.epsilon_min},
          {"step_decay", c.step_decay},
          {"episodes", c.episodes},
          {"max_steps_per_episode", c.max_steps_per_episode},
          {"convergence_threshold", c.convergence_threshold},
          {"convergence_mode", to_string(c.convergence_mode)},
          {"stable_window", c.stable_window},
          {"early_step_threshold", early_step_threshold},
          {"seed", c.seed}};
}

json convergence_json(const TrainResult& r) {
  return {{"converged", r.converged},
          {"episodes_to_convergence",
           r.episodes_to_convergence ? json(*r.episodes_to_convergence) : json(nullptr)},
          {"episodes_run", r.telemetry.episode_rewards.size()}};
}

WatchPairs parse_watch(const std::vector<std::string>& specs) {
  WatchPairs pairs;
  for (const std::string& spec : specs) {
    const auto colon = spec.find(':');
    if (colon == std::string::npos) throw UsageError("--watch expects STATE:ACTION");
    try {
      pairs.insert({static_cast<int>(parse_integer(spec.substr(0, colon), 0, "state")),
                    static_cast<int>(parse_integer(spec.substr(colon + 1), 0, "action"))});
    } catch (const ParseError&) {
      throw UsageError("--watch expects STATE:ACTION, got '" + spec + "'");
    }
  }
  return pairs;
}

// Subcommands

int cmd_validate_graph(const Settings& s, std::ostream& out) {
  const std::string text = s.graph ? read_text_file(*s.graph) : serialize_graph(default_graph());
  std::vector<GraphViolation> violations;
  WorkflowGraph graph;
  try {
    graph = load_graph(text);
  } catch (const ValidationError& e) {
    violations = e.violations();
  }
  if (!violations.empty()) {
    for (const GraphViolation& v : violations) out << to_string(v) << "\n";
    out << violations.size() << " violation(s)\n";
    return kExitViolation;
  }
  out << "ok: " << graph.num_states() << " states, " << graph.num_actions() << " actions, "
      << graph.populated_count() << " populated pairs, hash " << graph.hash() << "\n";
  return kExitOk;
}

int cmd_train(const Settings& s, const std::vector<std::string>& watch, std::ostream& out) {
  const RewardVariant variant = variant_of(s);
  const WorkflowGraph graph = graph_of(s);
  Environment env = make_env(graph, variant);
  const TrainResult result = train(env, s.train, parse_watch(watch));

  write_train_outputs(s.out, result);
  json manifest = {{"command", "train"},
                   {"variant", variant_flag(variant.kind)},
                   {"env", env_name(variant.kind)},
                   {"graph", graph_source(s)},
                   {"graph_hash", graph.hash()},
                   {"config", train_config_json(s.train, s.early_step_threshold)}};
  manifest.update(convergence_json(result));
  write_text_file(s.out / "manifest.json", manifest.dump(2) + "\n");

  out << env_name(variant.kind) << " alpha " << format_lr(s.train.alpha) << ": ";
  if (result.converged) {
    out << "converged after " << *result.episodes_to_convergence << " episodes\n";
  } else {
    out << "no convergence in " << result.telemetry.episode_rewards.size() << " episodes\n";
  }
  return kExitOk;
}

int cmd_sweep(const Settings& s, std::ostream& out) {
  try {
    s.sweep.check();
  } catch (const std::invalid_argument& e) {
    throw UsageError(std::string("invalid sweep config: ") + e.what());
  }
  const WorkflowGraph graph = graph_of(s);
  const SweepResult result = run_sweep(graph, s.sweep);

  json cells = json::array();
  for (std::size_t e = 0; e < result.environment_names.size(); ++e) {
    const std::string& env = result.environment_names[e];
    for (std::size_t l = 0; l < result.learning_rates.size(); ++l) {
      for (int k = 0; k < result.seeds_per_cell; ++k) {
        const double lr = result.learning_rates[l];
        const TrainResult& r = result.cells.at({env, static_cast<int>(l), k});
        const std::string name = cell_name(env, lr, k);
        write_train_outputs(s.out / name, r);
        json cell = {{"name", name},
                     {"env", env},
                     {"lr", lr},
                     {"seed_index", k},
                     {"seed", cell_seed(s.sweep.base.seed, static_cast<int>(e),
                                        static_cast<int>(l), k)}};
        cell.update(convergence_json(r));
        cells.push_back(cell);
      }
    }
  }
  json manifest = {{"command", "sweep"},
                   {"graph", graph_source(s)},
                   {"graph_hash", graph.hash()},
                   {"learning_rates", s.sweep.learning_rates},
                   {"environment_names", s.sweep.environment_names},
                   {"seeds_per_cell", s.sweep.seeds_per_cell},
                   {"base", train_config_json(s.sweep.base, s.early_step_threshold)},
                   {"cells", cells}};
  write_text_file(s.out / "sweep.json", manifest.dump(2) + "\n");

  const auto table = convergence_table(result);
  const std::string csv = convergence_csv(table);
  write_text_file(s.out / "convergence_table.csv", csv);
  out << csv;
  return kExitOk;
}

struct LoadedRun {
  std::string env;
  double lr = 0.0;
  std::vector<QTable> tables;
};

std::vector<LoadedRun> load_runs(const fs::path& dir) {
  std::vector<LoadedRun> runs;
  if (fs::exists(dir / "sweep.json")) {
    const json doc = detail::parse_json(read_text_file(dir / "sweep.json"));
    std::map<std::pair<std::string, double>, std::size_t> index;
    for (const json& cell : doc.at("cells")) {
      const std::string env = cell.at("env").get<std::string>();
      const double lr = cell.at("lr").get<double>();
      auto [it, fresh] = index.emplace(std::make_pair(env, lr), runs.size());
      if (fresh) runs.push_back({env, lr, {}});
      runs[it->second].tables.push_back(parse_qtable_csv(
          read_text_file(dir / cell.at("name").get<std::string>() / "qtable.csv")));
    }
    return runs;
  }
  if (fs::exists(dir / "manifest.json")) {
    const json doc = detail::parse_json(read_text_file(dir / "manifest.json"));
    runs.push_back({doc.at("env").get<std::string>(),
                    doc.at("config").at("alpha").get<double>(),
                    {parse_qtable_csv(read_text_file(dir / "qtable.csv"))}});
    return runs;
  }
  throw UsageError(dir.string() + " holds neither sweep.json nor manifest.json");
}

int cmd_eval(const Settings& s, const std::string& from,
             const std::optional<std::string>& softmax, std::ostream& out) {
  const WorkflowGraph graph = graph_of(s);
  const IdealActionList ideal = ideal_of(s, graph);
  if (!fs::exists(from)) throw UsageError("run directory not found: " + from);
  std::optional<SoftmaxMode> mode;
  if (softmax) {
    if (*softmax == "sample") {
      mode = SoftmaxMode::kSample;
    } else if (*softmax == "argmax") {
      mode = SoftmaxMode::kArgmaxOfProbs;
    } else {
      throw UsageError("--softmax expects sample or argmax");
    }
  }

  Rng rng(s.train.seed);
  std::vector<AccuracyRow> rows;
  for (const LoadedRun& run : load_runs(from)) {
    double total = 0.0;
    for (const QTable& q : run.tables) {
      if (q.num_states() != graph.num_states() || q.num_actions() != graph.num_actions()) {
        throw UsageError("q-table shape does not match the graph");
      }
      const PolicyVector policy = mode ? softmax_policy(q, *mode, rng) : greedy_policy(q);
      total += get_acc(ideal.actions, policy);
    }
    rows.push_back({run.env, run.lr, total / static_cast<double>(run.tables.size())});
  }
  std::stable_sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
    return a.env != b.env ? a.env < b.env : a.lr < b.lr;
  });
  write_text_file(s.out / "accuracy.csv", accuracy_csv(rows));

  std::map<std::string, const AccuracyRow*> best;
  for (const AccuracyRow& r : rows) {
    auto& slot = best[r.env];
    if (!slot || r.accuracy > slot->accuracy) slot = &r;
  }
  for (const AccuracyRow& r : rows) {
    out << r.env << " lr " << format_lr(r.lr) << " accuracy " << format_accuracy(r.accuracy)
        << "\n";
  }
  for (const auto& [env, r] : best) {
    out << "best " << env << ": lr " << format_lr(r->lr) << " accuracy "
        << format_accuracy(r->accuracy) << "\n";
  }
  return kExitOk;
}

struct PlanFlags {
  std::optional<long> pid;
  std::optional<std::string> image, profile, outdir, plan;
  int max_hops = 20;
  int start = 0;
  bool strict = false;
};

CommandContext context_of(const PlanFlags& p) {
  CommandContext ctx;
  if (p.pid) ctx.pid = *p.pid;
  if (p.image) ctx.image = *p.image;
  if (p.profile) ctx.profile = *p.profile;
  if (p.outdir) ctx.outdir = *p.outdir;
  if (ctx.pid <= 0) throw UsageError("--pid must be positive");
  return ctx;
}

CommandPlan build_plan(const Settings& s, const PlanFlags& p) {
  const WorkflowGraph graph = graph_of(s);
  const IdealActionList ideal = ideal_of(s, graph);
  if (p.start < 0 || p.start >= graph.num_states()) throw UsageError("--start out of range");
  if (p.max_hops < 0) throw UsageError("--max-hops must be >= 0");
  const Trajectory path = simulate_trajectory(graph, ideal, p.start, p.max_hops);
  return render_plan(path, menu_of(s), context_of(p), "ideal-from-" + std::to_string(p.start),
                     graph.hash());
}

void print_plan(const CommandPlan& plan, std::ostream& out) {
  for (std::size_t i = 0; i < plan.steps.size(); ++i) {
    const PlanStep& st = plan.steps[i];
    out << i << "\t" << st.state << "\t" << st.action << "\t" << st.command.text << "\n";
  }
}

int cmd_plan(const Settings& s, const PlanFlags& p, std::ostream& out, std::ostream& err) {
  const CommandPlan plan = build_plan(s, p);
  write_text_file(s.out / "plan.jsonl", serialize_plan_jsonl(plan));
  print_plan(plan, out);
  if (p.strict && !plan.steps.empty() && plan.sentinel_count() == plan.steps.size()) {
    err << "plan has only sentinel steps\n";
    return kExitUsage;
  }
  return kExitOk;
}

struct RunFlags {
  std::string runner = "dry-run";
  bool confirmed = false;
  bool fail_fast = false;
  bool keep_sentinels = false;
  bool submit_hashes = false;
  std::string family = "investigation";
};

int cmd_run_plan(const Settings& s, const PlanFlags& p, const RunFlags& r, std::ostream& out,
                 std::ostream& err) {
  std::unique_ptr<CommandRunner> runner;
  if (r.runner == "dry-run") {
    runner = std::make_unique<DryRunRunner>();
  } else if (r.runner == "shell") {
    if (!r.confirmed) {
      throw UsageError("--runner shell also needs --i-understand-this-executes-commands");
    }
    runner = std::make_unique<ShellRunner>();
  } else {
    throw UsageError("--runner expects dry-run or shell");
  }

  std::unique_ptr<HashLookupClient> hashes = std::make_unique<DryRunHashClient>();
  if (r.submit_hashes) {
    if (r.runner != "shell") throw UsageError("--submit-hashes needs --runner shell");
    hashes = make_virustotal_client();
    if (!hashes) {
      throw UsageError("hash submission needs VT_API_KEY and a build with TLS support");
    }
  }

  CommandPlan plan;
  if (p.plan) {
    if (!fs::exists(*p.plan)) throw UsageError("plan file not found: " + *p.plan);
    plan = load_plan_jsonl(read_text_file(*p.plan));
  } else {
    plan = build_plan(s, p);
  }
  if (p.strict && !plan.steps.empty() && plan.sentinel_count() == plan.steps.size()) {
    err << "plan has only sentinel steps\n";
    return kExitUsage;
  }

  ExecuteOptions options;
  options.skip_sentinels = !r.keep_sentinels;
  options.fail_fast = r.fail_fast;
  std::vector<LogEntry> log;
  int status = kExitOk;
  try {
    execute_plan(plan, *runner, *hashes, options, log);
  } catch (const RunnerFailure& e) {
    err << e.what() << "\n";
    status = kExitViolation;
  }

  TimingDataset timings;
  std::map<std::string, int> uses;
  std::string log_csv = "step,state,action,status,seconds,output\n";
  for (const LogEntry& e : log) {
    const PlanStep& st = plan.steps[e.step];
    std::string command = st.command.text;
    if (++uses[command] > 1) command += " (step " + std::to_string(e.step) + ")";
    timings.records.push_back({r.family, "RL Agent", command, e.seconds});
    char name[32];
    std::snprintf(name, sizeof name, "step_%03zu.txt", e.step);
    write_text_file(s.out / "outputs" / name, e.output);
    log_csv += csv_row({std::to_string(e.step), std::to_string(st.state),
                        std::to_string(st.action), std::to_string(e.status),
                        format_g12(e.seconds), std::string("outputs/") + name});
    out << e.step << "\tstatus " << e.status << "\t" << format_g12(e.seconds) << " s\t"
        << st.command.text << "\n";
  }
  write_text_file(s.out / "timings.csv", serialize_timings(timings));
  write_text_file(s.out / "execution_log.csv", log_csv);
  return status;
}

struct ReportFlags {
  std::optional<std::string> sweep_dir, accuracy;
  double lr = 0.4;
  int window_first = 3;
  int window_last = 100;
  bool svg = false;
};

int cmd_report(const Settings& s, const ReportFlags& r, std::ostream& out) {
  std::vector<Figure> figures;
  auto add = [&](const std::string& name, const std::string& csv, Figure fig) {
    write_text_file(s.out / (name + ".csv"), csv);
    fig.name = name;
    figures.push_back(std::move(fig));
  };

  if (!s.timings.empty()) {
    TimingDataset all;
    for (const fs::path& p : s.timings) {
      TimingDataset ds = load_timings(read_text_file(p));
      all.records.insert(all.records.end(), ds.records.begin(), ds.records.end());
    }
    // Re-validate the union for duplicates across files.
    all = load_timings(serialize_timings(all));
    const Totals totals = compare_totals(all);
    add("totals", totals_csv(totals),
        {"", "Total analysis time per malware family", "malware family", "seconds",
         totals_plot_data(totals), family_ticks(totals)});
    std::vector<TotalRow> ranked = totals.grand;
    std::stable_sort(ranked.begin(), ranked.end(),
                     [](const auto& a, const auto& b) { return a.seconds < b.seconds; });
    for (const TotalRow& row : ranked) {
      out << row.executor << "\t" << format_g12(row.seconds) << " s\n";
    }
  }

  if (r.sweep_dir) {
    const fs::path dir = *r.sweep_dir;
    if (!fs::exists(dir / "convergence_table.csv")) {
      throw UsageError("no convergence_table.csv in " + dir.string());
    }
    const auto table = parse_convergence_csv(read_text_file(dir / "convergence_table.csv"));
    add("convergence", convergence_csv(table),
        {"", "Episodes to convergence", "learning rate", "episodes",
         convergence_plot_data(table), {}});

    const json doc = detail::parse_json(read_text_file(dir / "sweep.json"));
    std::map<std::string, std::vector<RewardPoint>> dynamics;
    for (const json& cell : doc.at("cells")) {
      if (cell.at("lr").get<double>() != r.lr || cell.at("seed_index").get<int>() != 0) {
        continue;
      }
      const auto records = parse_csv(read_text_file(
          dir / cell.at("name").get<std::string>() / "episode_rewards.csv"));
      auto& points = dynamics[cell.at("env").get<std::string>()];
      for (std::size_t i = 1; i < records.size(); ++i) {
        const auto& f = records[i].fields;
        const int episode = static_cast<int>(parse_integer(f.at(1), records[i].line, "episode"));
        const long long steps = parse_integer(f.at(2), records[i].line, "steps");
        if (episode < r.window_first || episode > r.window_last || steps == 0) continue;
        points.push_back({episode, parse_real(f.at(0), records[i].line, "return") / steps});
      }
    }
    if (dynamics.empty()) throw UsageError("learning rate " + format_lr(r.lr) + " not in sweep");
    add("reward_dynamics", reward_dynamics_csv(dynamics),
        {"", "Average reward per step, lr " + format_lr(r.lr), "episode", "reward per step",
         reward_plot_data(dynamics), {}});
  }

  if (r.accuracy) {
    if (!fs::exists(*r.accuracy)) throw UsageError("file not found: " + *r.accuracy);
    const auto rows = parse_accuracy_csv(read_text_file(*r.accuracy));
    add("accuracy", accuracy_csv(rows),
        {"", "Accuracy against the ideal list", "learning rate", "accuracy",
         accuracy_plot_data(rows), {}});
  }

  if (figures.empty()) throw UsageError("nothing to report: pass --timings, --sweep or --accuracy");
  for (const Figure& fig : figures) {
    emit_report(fig, ReportFormat::kCsv, s.out / "series");
    if (r.svg) emit_report(fig, ReportFormat::kSvg, s.out);
  }
  return kExitOk;
}

int cmd_export_defaults(const Settings& s, std::ostream& out) {
  write_text_file(s.out / "default_graph.json", serialize_graph(default_graph()));
  write_text_file(s.out / "default_ideal.json", serialize_ideal(default_ideal()));
  write_text_file(s.out / "default_menu.json", serialize_menu(default_menu()));
  out << "wrote default_graph.json, default_ideal.json, default_menu.json to "
      << s.out.generic_string() << "\n";
  return kExitOk;
}

void add_train_flags(CLI::App* cmd, Flags& f) {
  cmd->add_option("--variant", f.variant,
                  "baseline, terminal-bonus or time-penalty (env_new1..3 also accepted)");
  cmd->add_option("--alpha", f.alpha, "learning rate in (0, 1]");
  cmd->add_option("--gamma", f.gamma, "discount in [0, 1)");
  cmd->add_option("--epsilon0", f.epsilon0, "initial exploration probability");
  cmd->add_option("--epsilon-decay", f.epsilon_decay,
                  "post-episode decay value (epsilon -= value * 0.5)");
  cmd->add_option("--epsilon-min", f.epsilon_min, "exploration floor");
  cmd->add_option("--step-decay", f.step_decay, "per-step multiplicative decay");
  cmd->add_option("--episodes", f.episodes, "episode budget");
  cmd->add_option("--max-steps", f.max_steps, "step cap per episode");
  cmd->add_option("--threshold", f.threshold, "convergence threshold");
  cmd->add_option("--convergence", f.convergence, "paper, stable or none");
  cmd->add_option("--stable-window", f.stable_window,
                  "consecutive small updates required in stable mode");
  cmd->add_option("--early-threshold", f.early_threshold,
                  "terminal-bonus early-step threshold");
}

void add_plan_flags(CLI::App* cmd, PlanFlags& p) {
  cmd->add_option("--pid", p.pid, "process id substituted for {pid}");
  cmd->add_option("--image", p.image, "memory image substituted for {image}");
  cmd->add_option("--profile", p.profile, "OS profile substituted for {profile}");
  cmd->add_option("--outdir", p.outdir, "directory substituted for {outdir}");
  cmd->add_option("--max-hops", p.max_hops, "trajectory hop cap")->capture_default_str();
  cmd->add_option("--start", p.start, "start state")->capture_default_str();
  cmd->add_flag("--strict", p.strict, "exit 2 when every step is a sentinel");
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Q-learning driven memory forensics workflow planner"};
  app.name("rlfi");
  app.require_subcommand(1);

  Flags f;
  app.add_option("--config", f.config, "JSON config file (flags take precedence)");
  app.add_option("--out", f.out, "output directory");
  app.add_option("--seed", f.seed, "seed for every stochastic step");
  app.add_option("--graph", f.graph, "workflow graph JSON (default: embedded graph)");
  app.add_option("--ideal", f.ideal, "ideal action list JSON");
  app.add_option("--menu", f.menu, "command menu JSON");
  app.add_option("--timings", f.timings, "timing CSV (repeatable)");

  auto* validate = app.add_subcommand("validate-graph", "check a workflow graph");
  std::optional<std::string> graph_positional;
  validate->add_option("graph", graph_positional, "graph JSON path");

  auto* train_cmd = app.add_subcommand("train", "train one Q-table");
  add_train_flags(train_cmd, f);
  std::vector<std::string> watch;
  train_cmd->add_option("--watch", watch, "STATE:ACTION pairs to track (repeatable)");

  auto* sweep_cmd = app.add_subcommand("sweep", "train over learning rates and environments");
  add_train_flags(sweep_cmd, f);
  sweep_cmd->add_option("--lrs", f.lrs, "comma separated learning rates")->delimiter(',');
  sweep_cmd->add_option("--envs", f.envs, "comma separated environments")->delimiter(',');
  sweep_cmd->add_option("--seeds-per-cell", f.seeds_per_cell, "runs per (env, lr)");
  sweep_cmd->add_option("--jobs", f.jobs, "worker threads");

  auto* eval_cmd = app.add_subcommand("eval", "score learned policies against the ideal list");
  std::string from;
  std::optional<std::string> softmax;
  eval_cmd->add_option("--from", from, "train or sweep output directory")->required();
  eval_cmd->add_option("--softmax", softmax, "sample or argmax");

  PlanFlags plan_flags;
  auto* plan_cmd = app.add_subcommand("plan", "render the ideal trajectory as commands");
  add_plan_flags(plan_cmd, plan_flags);

  RunFlags run_flags;
  auto* run_cmd = app.add_subcommand("run-plan", "execute a plan (dry run by default)");
  add_plan_flags(run_cmd, plan_flags);
  run_cmd->add_option("--plan", plan_flags.plan, "plan JSONL (default: render the ideal plan)");
  run_cmd->add_option("--runner", run_flags.runner, "dry-run or shell")->capture_default_str();
  run_cmd->add_flag("--i-understand-this-executes-commands", run_flags.confirmed,
                    "required with --runner shell");
  run_cmd->add_flag("--fail-fast", run_flags.fail_fast, "stop at the first failing step");
  run_cmd->add_flag("--keep-sentinels", run_flags.keep_sentinels,
                    "log sentinel steps instead of skipping them");
  run_cmd->add_flag("--submit-hashes", run_flags.submit_hashes,
                    "send hash steps to VirusTotal (needs VT_API_KEY)");
  run_cmd->add_option("--family", run_flags.family, "family label for timing rows")
      ->capture_default_str();

  ReportFlags report_flags;
  auto* report_cmd = app.add_subcommand("report", "emit tables and plot data");
  report_cmd->add_option("--sweep", report_flags.sweep_dir, "sweep output directory");
  report_cmd->add_option("--accuracy", report_flags.accuracy, "accuracy.csv from eval");
  report_cmd->add_option("--lr", report_flags.lr, "learning rate for reward dynamics")
      ->capture_default_str();
  report_cmd->add_option("--window-first", report_flags.window_first, "first episode")
      ->capture_default_str();
  report_cmd->add_option("--window-last", report_flags.window_last, "last episode")
      ->capture_default_str();
  report_cmd->add_flag("--svg", report_flags.svg, "also write an SVG per table");

  auto* export_cmd =
      app.add_subcommand("export-defaults", "write the embedded graph, ideal list and menu");

  for (CLI::App* sub : app.get_subcommands({})) sub->fallthrough();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (graph_positional) f.graph = *graph_positional;
    const Settings s = resolve_settings(f);
    if (validate->parsed()) return cmd_validate_graph(s, out);
    if (train_cmd->parsed()) return cmd_train(s, watch, out);
    if (sweep_cmd->parsed()) return cmd_sweep(s, out);
    if (eval_cmd->parsed()) return cmd_eval(s, from, softmax, out);
    if (plan_cmd->parsed()) return cmd_plan(s, plan_flags, out, err);
    if (run_cmd->parsed()) return cmd_run_plan(s, plan_flags, run_flags, out, err);
    if (report_cmd->parsed()) return cmd_report(s, report_flags, out);
    if (export_cmd->parsed()) return cmd_export_defaults(s, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ValidationError& e) {
    err << "invalid graph: " << e.what() << "\n";
    return kExitUsage;
  } catch (const DuplicateRecord& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const LengthMismatch& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitViolation;
  }
  return kExitUsage;
}

}  // namespace rlfi
