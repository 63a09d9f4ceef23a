#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "rlfi/cli.hpp"
#include "rlfi/command_plan.hpp"
#include "rlfi/policy_eval.hpp"
#include "rlfi/qlearn.hpp"
#include "rlfi/reporting.hpp"
#include "rlfi/sweep.hpp"

namespace py = pybind11;
using namespace rlfi;

namespace {

RewardVariant variant_from(const std::string& name, int early_step_threshold) {
  auto kind = kind_from_flag(name);
  if (!kind) throw py::value_error("unknown variant '" + name + "'");
  return {*kind, early_step_threshold};
}

ConvergenceMode mode_from(const std::string& name) {
  auto mode = convergence_mode_from_string(name);
  if (!mode) throw py::value_error("unknown convergence mode '" + name + "'");
  return *mode;
}

py::array_t<double> to_array(const QTable& q) {
  py::array_t<double> out({q.num_states(), q.num_actions()});
  auto view = out.mutable_unchecked<2>();
  for (StateId s = 0; s < q.num_states(); ++s)
    for (ActionId a = 0; a < q.num_actions(); ++a) view(s, a) = q.at(s, a);
  return out;
}

QTable from_array(const py::array_t<double, py::array::c_style | py::array::forcecast>& arr) {
  if (arr.ndim() != 2) throw py::value_error("q-table must be two-dimensional");
  auto view = arr.unchecked<2>();
  QTable q(static_cast<int>(arr.shape(0)), static_cast<int>(arr.shape(1)));
  for (StateId s = 0; s < q.num_states(); ++s)
    for (ActionId a = 0; a < q.num_actions(); ++a) q.at(s, a) = view(s, a);
  return q;
}

py::dict train_result_dict(const TrainResult& r) {
  py::dict d;
  d["q_table"] = to_array(r.q_table);
  d["converged"] = r.converged;
  d["episodes_to_convergence"] = r.episodes_to_convergence;
  py::list rewards;
  for (const EpisodeReward& e : r.telemetry.episode_rewards) {
    rewards.append(py::make_tuple(e.episodic_return, e.episode, e.steps));
  }
  d["episode_rewards"] = rewards;
  d["epsilon_trace"] = r.telemetry.epsilon_trace;
  d["num_updates"] = r.telemetry.q_updates.size();
  return d;
}

TrainConfig make_config(double alpha, double gamma, double epsilon0,
                        std::optional<double> epsilon_decay_value, double epsilon_min,
                        int episodes, int max_steps, double threshold,
                        const std::string& convergence, int stable_window, std::uint64_t seed) {
  TrainConfig c;
  c.alpha = alpha;
  c.gamma = gamma;
  c.epsilon0 = epsilon0;
  c.epsilon_decay_value = epsilon_decay_value;
  c.epsilon_min = epsilon_min;
  c.episodes = episodes;
  c.max_steps_per_episode = max_steps;
  c.convergence_threshold = threshold;
  c.convergence_mode = mode_from(convergence);
  c.stable_window = stable_window;
  c.seed = seed;
  return c;
}

py::list plan_rows(const CommandPlan& plan) {
  py::list rows;
  for (const PlanStep& s : plan.steps) {
    py::dict d;
    d["state"] = s.state;
    d["action"] = s.action;
    d["command"] = s.command.text;
    d["sentinel"] = s.command.is_sentinel;
    rows.append(d);
  }
  return rows;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Q-learning over forensic investigation workflows";

  auto base = py::register_exception<Error>(m, "RlfiError", PyExc_RuntimeError);
  py::register_exception<ParseError>(m, "ParseError", base.ptr());
  py::register_exception<ValidationError>(m, "ValidationError", base.ptr());
  py::register_exception<UnboundPlaceholder>(m, "UnboundPlaceholder", base.ptr());
  py::register_exception<LengthMismatch>(m, "LengthMismatch", base.ptr());
  py::register_exception<NonFiniteInput>(m, "NonFiniteInput", base.ptr());
  py::register_exception<DuplicateRecord>(m, "DuplicateRecord", base.ptr());

  py::class_<WorkflowGraph>(m, "WorkflowGraph")
      .def_property_readonly("num_states", &WorkflowGraph::num_states)
      .def_property_readonly("num_actions", &WorkflowGraph::num_actions)
      .def_property_readonly("terminal_states", &WorkflowGraph::terminal_states)
      .def_property_readonly("milestones", &WorkflowGraph::milestones)
      .def("populated_count", &WorkflowGraph::populated_count)
      .def("is_terminal", &WorkflowGraph::is_terminal)
      .def("hash", &WorkflowGraph::hash)
      .def("to_json", [](const WorkflowGraph& g) { return serialize_graph(g); })
      .def("edges",
           [](const WorkflowGraph& g, StateId s, ActionId a) {
             py::list out;
             for (const Transition& t : g.edges(s, a)) {
               out.append(py::make_tuple(t.probability, t.next_state, t.reward, t.done));
             }
             return out;
           })
      .def("__eq__", [](const WorkflowGraph& a, const WorkflowGraph& b) { return a == b; });

  m.def("default_graph", [] { return default_graph(); });
  m.def("load_graph", [](const std::string& text) { return load_graph(text); });
  m.def(
      "validate",
      [](const WorkflowGraph& g) {
        std::vector<std::string> out;
        for (const GraphViolation& v : validate(g)) out.push_back(to_string(v));
        return out;
      },
      "Violation descriptions, empty for a valid graph.");

  m.def(
      "train",
      [](const WorkflowGraph& g, const std::string& variant, double alpha, double gamma,
         double epsilon0, std::optional<double> epsilon_decay_value, double epsilon_min,
         int episodes, int max_steps, double threshold, const std::string& convergence,
         int stable_window, std::uint64_t seed, int early_step_threshold) {
        TrainConfig c = make_config(alpha, gamma, epsilon0, epsilon_decay_value, epsilon_min,
                                    episodes, max_steps, threshold, convergence, stable_window,
                                    seed);
        Environment env = make_env(g, variant_from(variant, early_step_threshold));
        TrainResult r;
        {
          py::gil_scoped_release release;
          r = train(env, c);
        }
        return train_result_dict(r);
      },
      py::arg("graph"), py::arg("variant") = "baseline", py::arg("alpha") = 0.1,
      py::arg("gamma") = 0.9, py::arg("epsilon0") = 0.9,
      py::arg("epsilon_decay_value") = py::none(), py::arg("epsilon_min") = 0.0,
      py::arg("episodes") = 1000, py::arg("max_steps") = 200, py::arg("threshold") = 1e-4,
      py::arg("convergence") = "stable", py::arg("stable_window") = 50, py::arg("seed") = 0,
      py::arg("early_step_threshold") = 15);

  m.def(
      "value_iteration",
      [](const WorkflowGraph& g, const std::string& variant, double gamma, double tolerance) {
        return to_array(value_iteration(g, variant_from(variant, 15), gamma, tolerance));
      },
      py::arg("graph"), py::arg("variant") = "baseline", py::arg("gamma") = 0.9,
      py::arg("tolerance") = 1e-10);

  m.def("bellman_update", &bellman_update, py::arg("q_sa"), py::arg("reward"),
        py::arg("max_next_q"), py::arg("alpha"), py::arg("gamma"));

  m.def(
      "sweep",
      [](const WorkflowGraph& g, std::vector<double> learning_rates,
         std::vector<std::string> environments, int episodes, std::uint64_t seed,
         int seeds_per_cell, const std::string& convergence, int jobs) {
        SweepConfig c;
        if (!learning_rates.empty()) c.learning_rates = std::move(learning_rates);
        if (!environments.empty()) c.environment_names = std::move(environments);
        c.base.episodes = episodes;
        c.base.seed = seed;
        c.base.convergence_mode = mode_from(convergence);
        c.seeds_per_cell = seeds_per_cell;
        c.jobs = jobs;
        SweepResult r;
        {
          py::gil_scoped_release release;
          r = run_sweep(g, c);
        }
        py::dict cells;
        for (const auto& [key, result] : r.cells) {
          cells[py::str(cell_name(key.env, r.learning_rates[key.lr_index], key.seed_index))] =
              train_result_dict(result);
        }
        py::list table;
        for (const ConvergenceRow& row : convergence_table(r)) {
          table.append(py::make_tuple(row.env, row.lr, row.median_episodes,
                                      row.converged_fraction));
        }
        py::dict out;
        out["cells"] = cells;
        out["convergence_table"] = table;
        return out;
      },
      py::arg("graph"), py::arg("learning_rates") = std::vector<double>{},
      py::arg("environments") = std::vector<std::string>{}, py::arg("episodes") = 1000,
      py::arg("seed") = 0, py::arg("seeds_per_cell") = 1, py::arg("convergence") = "stable",
      py::arg("jobs") = 1);

  m.def("default_learning_rates", &default_learning_rates);
  m.def("cell_seed", &cell_seed);

  m.def("stable_softmax", [](const std::vector<double>& x) { return stable_softmax(x); });
  m.def("greedy_policy", [](const py::array_t<double, py::array::c_style | py::array::forcecast>&
                                q) { return greedy_policy(from_array(q)); });
  m.def(
      "softmax_policy",
      [](const py::array_t<double, py::array::c_style | py::array::forcecast>& q,
         const std::string& mode, std::uint64_t seed) {
        if (mode != "sample" && mode != "argmax") throw py::value_error("mode is sample or argmax");
        Rng rng(seed);
        return softmax_policy(from_array(q),
                              mode == "sample" ? SoftmaxMode::kSample : SoftmaxMode::kArgmaxOfProbs,
                              rng);
      },
      py::arg("q_table"), py::arg("mode") = "argmax", py::arg("seed") = 0);
  m.def("get_acc", [](const std::vector<ActionId>& ideal, const std::vector<ActionId>& pred) {
    return get_acc(ideal, pred);
  });
  m.def("format_accuracy", &format_accuracy);

  m.def("default_ideal", [] {
    const IdealActionList& i = default_ideal();
    return py::make_tuple(i.actions, i.landing);
  });
  m.def(
      "simulate_trajectory",
      [](const WorkflowGraph& g, std::vector<ActionId> actions, std::vector<StateId> landing,
         StateId start, int max_hops) {
        return simulate_trajectory(g, {std::move(actions), std::move(landing)}, start, max_hops);
      },
      py::arg("graph"), py::arg("actions"), py::arg("landing"), py::arg("start") = 0,
      py::arg("max_hops") = 20);

  m.attr("ACTION_OUT_OF_LIST_SIZE") = std::string(kActionOutOfListSize);
  m.attr("TRANSITIONAL_STATE") = std::string(kTransitionalState);
  m.def("default_menu", [] { return default_menu(); });
  m.def(
      "create_command",
      [](const CommandMenu& menu, StateId state, ActionId action, long pid,
         std::optional<std::string> image, std::optional<std::string> profile,
         std::optional<std::string> outdir) {
        return create_command(menu, state, action, {pid, image, profile, outdir}).text;
      },
      py::arg("menu"), py::arg("state"), py::arg("action"), py::arg("pid") = 340,
      py::arg("image") = "memory.raw", py::arg("profile") = "Win10x64_19041",
      py::arg("outdir") = "output");
  m.def(
      "render_plan",
      [](const Trajectory& trajectory, const CommandMenu& menu, long pid) {
        CommandContext ctx;
        ctx.pid = pid;
        return plan_rows(render_plan(trajectory, menu, ctx));
      },
      py::arg("trajectory"), py::arg("menu"), py::arg("pid") = 340);
  m.def(
      "dry_run",
      [](const Trajectory& trajectory, const CommandMenu& menu, bool skip_sentinels) {
        CommandPlan plan = render_plan(trajectory, menu, {});
        DryRunRunner runner;
        DryRunHashClient hashes;
        py::list out;
        for (const LogEntry& e : execute_plan(plan, runner, hashes, {skip_sentinels, false})) {
          out.append(py::make_tuple(e.step, e.status, e.seconds, e.output));
        }
        return out;
      },
      py::arg("trajectory"), py::arg("menu"), py::arg("skip_sentinels") = true);

  m.def(
      "compare_totals",
      [](const std::string& csv_text) {
        Totals t = compare_totals(load_timings(csv_text));
        py::dict per_family, grand;
        for (const TotalRow& r : t.per_family) {
          per_family[py::make_tuple(r.executor, r.family)] = r.seconds;
        }
        for (const TotalRow& r : t.grand) grand[py::str(r.executor)] = r.seconds;
        py::dict out;
        out["per_family"] = per_family;
        out["grand"] = grand;
        return out;
      },
      "Totals from timing CSV text (family,executor,command,seconds).");

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        int code;
        {
          py::gil_scoped_release release;
          code = run_cli(args, out, err);
        }
        return py::make_tuple(code, out.str(), err.str());
      },
      "Runs the command line tool in-process; returns (exit_code, stdout, stderr).");
}
