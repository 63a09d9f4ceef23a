#include <gtest/gtest.h>

#include "rlfi/command_plan.hpp"
#include "support.hpp"

namespace rlfi {
namespace {

CommandMenu four_slot_menu() {
  return {{3, {"a", "b", "c", "d"}}, {30, {"x", "y", "windows.dlllist --pid {pid}"}}};
}

TEST(CreateCommand, Sentinels) {
  CommandContext ctx;
  auto out = create_command(four_slot_menu(), 3, 7, ctx);
  EXPECT_EQ(out.text, "action out of list size");
  EXPECT_TRUE(out.is_sentinel);
  out = create_command(four_slot_menu(), 12, 0, ctx);
  EXPECT_EQ(out.text, "transitional state");
  EXPECT_TRUE(out.is_sentinel);
  EXPECT_EQ(create_command(four_slot_menu(), 3, -1, ctx).text, kActionOutOfListSize);
  EXPECT_EQ(create_command(four_slot_menu(), -4, 0, ctx).text, kTransitionalState);
}

TEST(CreateCommand, Substitutes) {
  CommandContext ctx;
  auto out = create_command(four_slot_menu(), 30, 2, ctx);
  EXPECT_EQ(out.text, "windows.dlllist --pid 340");
  EXPECT_FALSE(out.is_sentinel);
  ctx.pid = 512;
  EXPECT_EQ(create_command(four_slot_menu(), 30, 2, ctx).text, "windows.dlllist --pid 512");
}

TEST(Substitute, Placeholders) {
  CommandContext ctx;
  EXPECT_EQ(substitute("vol -f {image} -o {outdir} {profile}", ctx),
            "vol -f memory.raw -o output Win10x64_19041");
  EXPECT_EQ(substitute("awk '{print $1}' x {}", ctx), "awk '{print $1}' x {}");
  ctx.image.reset();
  EXPECT_THROW(substitute("vol -f {image}", ctx), UnboundPlaceholder);
  EXPECT_THROW(substitute("{nope}", ctx), UnboundPlaceholder);
}

TEST(DefaultMenu, Shape) {
  const CommandMenu& menu = default_menu();
  EXPECT_EQ(template_count(menu), 109u);
  for (const auto& [state, templates] : menu) {
    EXPECT_GE(templates.size(), 3u) << state;
    EXPECT_LE(templates.size(), 10u) << state;
  }
  ASSERT_TRUE(menu.count(0));
  EXPECT_NE(menu.at(0).front().find("git clone"), std::string::npos);
  EXPECT_TRUE(menu_problems(menu).empty());
  EXPECT_EQ(menu.at(30).at(2), "vol -f {image} windows.dlllist --pid {pid}");
}

TEST(MenuProblems, FlagsEmptyAndUnsupported) {
  CommandMenu menu{{1, {" ", "run {bogus}", "ok {pid}"}}};
  auto problems = menu_problems(menu);
  ASSERT_EQ(problems.size(), 2u);
  EXPECT_NE(problems[0].find("empty"), std::string::npos);
  EXPECT_NE(problems[1].find("{bogus}"), std::string::npos);
  EXPECT_THROW(load_menu(R"({"1": ["run {bogus}"]})"), ParseError);
}

TEST(Menu, RoundTrip) {
  std::string text = serialize_menu(default_menu());
  EXPECT_EQ(load_menu(text), default_menu());
  EXPECT_THROW(load_menu(R"({"x": ["a"]})"), ParseError);
  EXPECT_THROW(load_menu(R"([1, 2])"), ParseError);
}

TEST(RenderPlan, DefaultIdealHasNoSentinels) {
  Trajectory t = simulate_trajectory(default_graph(), default_ideal());
  CommandPlan plan = render_plan(t, default_menu(), {});
  ASSERT_EQ(plan.steps.size(), t.size());
  EXPECT_EQ(plan.sentinel_count(), 0u);
  for (std::size_t i = 0; i < t.size(); ++i) {
    EXPECT_EQ(plan.steps[i].state, t[i].first);
    EXPECT_EQ(plan.steps[i].action, t[i].second);
  }
}

TEST(RenderPlan, EmptyAndTransitional) {
  EXPECT_TRUE(render_plan({}, default_menu(), {}).steps.empty());
  CommandPlan plan = render_plan({{0, 0}, {12, 1}}, default_menu(), {});
  EXPECT_FALSE(plan.steps[0].command.is_sentinel);
  EXPECT_TRUE(plan.steps[1].command.is_sentinel);
  EXPECT_EQ(plan.steps[1].command.text, "transitional state");
}

TEST(PlanJsonl, RoundTrip) {
  CommandPlan plan = render_plan({{0, 0}, {12, 1}, {30, 2}}, default_menu(), {});
  CommandPlan back = load_plan_jsonl(serialize_plan_jsonl(plan));
  EXPECT_EQ(back.steps, plan.steps);
  EXPECT_THROW(load_plan_jsonl(R"({"state": 1, "action": 0, "command": "transitional state", "sentinel": false})"),
               ParseError);
  try {
    load_plan_jsonl("\n{\"state\": 1,");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2);
  }
}

CommandPlan nine_step_plan() {
  Trajectory t;
  for (StateId s : {0, 2, 5, 10, 15, 20, 30, 35, 40}) t.push_back({s, 0});
  return render_plan(t, default_menu(), {});
}

TEST(ExecutePlan, DryRun) {
  DryRunRunner runner;
  DryRunHashClient hashes;
  CommandPlan plan = nine_step_plan();
  auto log = execute_plan(plan, runner, hashes);
  ASSERT_EQ(log.size(), 9u);
  for (std::size_t i = 0; i < log.size(); ++i) {
    EXPECT_EQ(log[i].status, 0);
    EXPECT_EQ(log[i].seconds, 0.0);
    EXPECT_EQ(log[i].output, plan.steps[i].command.text);
  }
  EXPECT_EQ(execute_plan(plan, runner, hashes), log);
}

TEST(ExecutePlan, SkipsSentinels) {
  CommandPlan plan = render_plan({{0, 0}, {12, 0}, {0, 9}, {2, 1}}, default_menu(), {});
  ASSERT_EQ(plan.sentinel_count(), 2u);
  DryRunRunner runner;
  DryRunHashClient hashes;
  EXPECT_EQ(execute_plan(plan, runner, hashes).size(), plan.steps.size() - 2);
  auto kept = execute_plan(plan, runner, hashes, {false, false});
  ASSERT_EQ(kept.size(), 4u);
  EXPECT_EQ(kept[1].output, "transitional state");
}

TEST(ExecutePlan, ScriptedDurations) {
  CommandPlan plan = nine_step_plan();
  std::map<std::string, RunOutcome> script;
  for (std::size_t i = 0; i < plan.steps.size(); ++i) {
    script[plan.steps[i].command.text] = {0, 0.25 * (i + 1), "ok"};
  }
  ScriptedRunner runner(script);
  DryRunHashClient hashes;
  auto log = execute_plan(plan, runner, hashes);
  ASSERT_EQ(log.size(), 9u);
  for (std::size_t i = 0; i < log.size(); ++i) EXPECT_EQ(log[i].seconds, 0.25 * (i + 1));
  EXPECT_EQ(runner.calls().size(), 9u);
}

TEST(ExecutePlan, FailFast) {
  CommandPlan plan = nine_step_plan();
  ScriptedRunner runner({{plan.steps[2].command.text, {3, 0.0, "boom"}}});
  DryRunHashClient hashes;
  std::vector<LogEntry> log;
  try {
    execute_plan(plan, runner, hashes, {true, true}, log);
    FAIL();
  } catch (const RunnerFailure& e) {
    EXPECT_EQ(e.step(), 2u);
    EXPECT_EQ(e.status(), 3);
  }
  EXPECT_EQ(log.size(), 3u);
  ScriptedRunner lenient({{plan.steps[2].command.text, {3, 0.0, "boom"}}});
  EXPECT_EQ(execute_plan(plan, lenient, hashes).size(), 9u);
}

class FakeHashes : public HashLookupClient {
 public:
  HashVerdict lookup(const std::string& digest) override {
    seen.push_back(digest);
    return {digest, true, "fake"};
  }
  std::vector<std::string> seen;
};

TEST(ExecutePlan, HashSteps) {
  const std::string digest(64, 'a');
  CommandPlan plan;
  plan.steps.push_back({60, 0, {"hashlookup " + std::string(64, 'A'), false}});
  plan.steps.push_back({60, 1, {"sha256sum f | hashlookup", false}});
  ScriptedRunner runner({{"sha256sum f", {0, 0.5, std::string(32, 'b') + "  f\n"}}});
  FakeHashes hashes;
  auto log = execute_plan(plan, runner, hashes);
  ASSERT_EQ(log.size(), 2u);
  EXPECT_EQ(hashes.seen, (std::vector<std::string>{digest, std::string(32, 'b')}));
  EXPECT_NE(log[0].output.find("malicious fake"), std::string::npos);
  EXPECT_EQ(runner.calls(), (std::vector<std::string>{"sha256sum f"}));
}

TEST(ExecutePlan, DryRunHashStepsNeverLookUp) {
  CommandPlan plan;
  plan.steps.push_back({60, 1, {"sha256sum f | hashlookup", false}});
  DryRunRunner runner;
  FakeHashes hashes;
  auto log = execute_plan(plan, runner, hashes);
  EXPECT_TRUE(hashes.seen.empty());
  EXPECT_EQ(log[0].output, "sha256sum f");
}

TEST(Hashes, Extraction) {
  EXPECT_TRUE(is_hash_step("hashlookup abc"));
  EXPECT_TRUE(is_hash_step("sha256sum x | hashlookup"));
  EXPECT_FALSE(is_hash_step("hashlookupx"));
  EXPECT_FALSE(is_hash_step("| hashlookup"));
  auto d = extract_digests(std::string(40, 'F') + " zz " + std::string(33, 'a') + "\n" +
                           std::string(32, '1'));
  EXPECT_EQ(d, (std::vector<std::string>{std::string(40, 'f'), std::string(32, '1')}));
  DryRunHashClient dry;
  EXPECT_EQ(dry.lookup("ab").source, "unknown");
  EXPECT_FALSE(dry.lookup("ab").malicious.has_value());
}

TEST(ShellRunner, CapturesOutputAndStatus) {
  ShellRunner runner;
  RunOutcome ok = runner.run("printf hi; printf err >&2");
  EXPECT_EQ(ok.status, 0);
  EXPECT_EQ(ok.output, "hierr");
  EXPECT_GE(ok.seconds, 0.0);
  EXPECT_EQ(runner.run("exit 4").status, 4);
}

}  // namespace
}  // namespace rlfi
