#include <gtest/gtest.h>

#include "rlfi/csv.hpp"
#include "rlfi/files.hpp"
#include "rlfi/reporting.hpp"
#include "support.hpp"

namespace rlfi {
namespace {

std::string fixture_text() {
  return read_text_file(std::filesystem::path(RLFI_RESOURCE_DIR) / "timings_fixture.csv");
}

TEST(Timings, CountsRecords) {
  std::string doc = "family,executor,command,seconds\n";
  for (const char* f : {"A", "B", "C"})
    for (const char* e : {"X", "Y"})
      for (int c = 0; c < 4; ++c)
        doc += std::string(f) + "," + e + ",cmd" + std::to_string(c) + ",1.5\n";
  EXPECT_EQ(load_timings(doc).records.size(), 24u);
}

TEST(Timings, Rejects) {
  EXPECT_THROW(load_timings("family,executor,command,seconds\nA,X,c,-1\n"), ParseError);
  EXPECT_THROW(load_timings("family,executor,command,seconds\n,X,c,1\n"), ParseError);
  EXPECT_THROW(load_timings("family,executor,command,seconds\nA,X,c,nan\n"), ParseError);
  EXPECT_THROW(load_timings("fam,executor,command,seconds\n"), ParseError);
  EXPECT_THROW(load_timings("family,executor,command,seconds\nA,X,c,1\nA,X,c,2\n"),
               DuplicateRecord);
  EXPECT_TRUE(load_timings("family,executor,command,seconds\n").records.empty());
}

TEST(Timings, RoundTrip) {
  TimingDataset ds = load_timings(fixture_text());
  EXPECT_EQ(ds.records.size(), 72u);
  EXPECT_EQ(load_timings(serialize_timings(ds)), ds);
  TimingDataset odd{{{"fam, \"x\"", "exec", "cmd\nwith break", 0.1 + 0.2}}};
  EXPECT_EQ(load_timings(serialize_timings(odd)), odd);
}

TEST(Totals, Addition) {
  TimingDataset ds{{{"a", "E", "c", 10.0}, {"b", "E", "c", 20.0}, {"c", "E", "c", 30.0}}};
  Totals t = compare_totals(ds);
  ASSERT_EQ(t.grand.size(), 1u);
  EXPECT_EQ(t.grand[0].seconds, 60.0);
  EXPECT_EQ(t.per_family.size(), 3u);
  Totals empty = compare_totals({});
  EXPECT_TRUE(empty.per_family.empty());
  EXPECT_TRUE(empty.grand.empty());
}

TEST(Totals, FixtureMatchesHandSums) {
  Totals t = compare_totals(load_timings(fixture_text()));
  std::map<std::string, double> grand;
  for (const auto& r : t.grand) grand[r.executor] = r.seconds;
  EXPECT_EQ(grand.at("Collab"), 612.75);
  EXPECT_EQ(grand.at("PowerShell"), 432.0);
  EXPECT_EQ(grand.at("RL Agent"), 216.0);
  EXPECT_EQ(grand.at("RL Agent"), grand.at("PowerShell") / 2);
  std::map<std::pair<std::string, std::string>, double> fam;
  for (const auto& r : t.per_family) fam[{r.executor, r.family}] = r.seconds;
  EXPECT_EQ(fam.at({"Collab", "Cerber"}), 219.25);
  EXPECT_EQ(fam.at({"PowerShell", "Cridex"}), 108.0);
  EXPECT_EQ(fam.at({"RL Agent", "WannaCry"}), 82.5);
}

TEST(Totals, Csv) {
  TimingDataset ds{{{"a", "E", "c", 1.5}, {"a", "F", "c", 2.0}}};
  EXPECT_EQ(totals_csv(compare_totals(ds)),
            "executor,scope,family,total_seconds\n"
            "E,family,a,1.5\nF,family,a,2\nE,grand,,1.5\nF,grand,,2\n");
}

TEST(Tables, RoundTrips) {
  std::vector<AccuracyRow> acc{{"env_new1", 0.4, 0.9375}, {"env_new2", 0.001, 1.0}};
  auto back = parse_accuracy_csv(accuracy_csv(acc));
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[0].lr, 0.4);
  EXPECT_EQ(back[0].accuracy, 0.9375);
  std::vector<ConvergenceRow> conv{{"env_new1", 0.4, 37.5, 0.8}, {"env_new3", 0.9, 1000, 0}};
  EXPECT_EQ(parse_convergence_csv(convergence_csv(conv)), conv);
  std::map<std::string, std::vector<RewardPoint>> rd{{"env_new1", {{3, -0.25}, {4, 0.5}}}};
  auto rd_back = parse_reward_dynamics_csv(reward_dynamics_csv(rd));
  ASSERT_EQ(rd_back["env_new1"].size(), 2u);
  EXPECT_EQ(rd_back["env_new1"][1].reward_per_step, 0.5);
  EXPECT_THROW(parse_accuracy_csv("env,lr\n"), ParseError);
}

std::vector<ConvergenceRow> grid_table() {
  std::vector<ConvergenceRow> rows;
  for (const char* env : {"env_new1", "env_new2", "env_new3"}) {
    double k = 1;
    for (double lr : default_learning_rates()) rows.push_back({env, lr, 10 * k++, 1.0});
  }
  return rows;
}

TEST(PlotData, ConvergenceShape) {
  auto table = grid_table();
  auto series = convergence_plot_data(table);
  ASSERT_EQ(series.size(), 3u);
  for (const auto& s : series) {
    EXPECT_EQ(s.points.size(), 12u);
    EXPECT_EQ(s.kind, SeriesKind::kScatter);
  }
  for (std::size_t i = 0; i < 12; ++i) EXPECT_EQ(series[0].points[i].second, table[i].median_episodes);
  std::erase_if(table, [](const auto& r) { return r.env == "env_new2"; });
  series = convergence_plot_data(table);
  ASSERT_EQ(series.size(), 2u);
  EXPECT_EQ(series[1].name, "env_new3");
  EXPECT_EQ(series[1].points.size(), 12u);
}

TEST(PlotData, Totals) {
  Totals t = compare_totals(load_timings(fixture_text()));
  auto series = totals_plot_data(t);
  ASSERT_EQ(series.size(), 3u);
  EXPECT_EQ(series[2].name, "RL Agent");
  auto ticks = family_ticks(t);
  ASSERT_EQ(ticks.size(), 3u);
  EXPECT_EQ(ticks[0].second, "Cerber");
  EXPECT_EQ(ticks[2].first, 3.0);
}

Figure two_series_figure() {
  return {"reward_dynamics", "Reward per step", "episode", "reward",
          {{"env_new1", {{3, -0.1}, {4, 0.2}}, SeriesKind::kLine},
           {"env new/2", {{3, 0.0}, {4, 0.1}}, SeriesKind::kLine}},
          {}};
}

TEST(EmitReport, CsvPerSeries) {
  testing::TempDir dir;
  auto paths = emit_report(two_series_figure(), ReportFormat::kCsv, dir.path());
  ASSERT_EQ(paths.size(), 2u);
  EXPECT_EQ(paths[1].filename(), "reward_dynamics_env_new_2.csv");
  auto a = parse_csv(read_text_file(paths[0]));
  auto b = parse_csv(read_text_file(paths[1]));
  EXPECT_EQ(a.size(), b.size());
  EXPECT_EQ(a[0].fields, (std::vector<std::string>{"x", "y"}));
}

TEST(EmitReport, SvgIsDeterministic) {
  testing::TempDir d1, d2;
  auto p1 = emit_report(two_series_figure(), ReportFormat::kSvg, d1.path());
  auto p2 = emit_report(two_series_figure(), ReportFormat::kSvg, d2.path());
  ASSERT_EQ(p1.size(), 1u);
  std::string svg = read_text_file(p1[0]);
  EXPECT_EQ(svg, read_text_file(p2[0]));
  EXPECT_EQ(svg.rfind("<svg", 0), 0u);
  EXPECT_NE(svg.find("env new/2"), std::string::npos);
  EXPECT_NE(svg.find("</svg>"), std::string::npos);
}

TEST(RenderSvg, EscapesAndLabelsCategories) {
  Totals t = compare_totals(load_timings(fixture_text()));
  Figure f{"totals", "A <b> & c", "family", "seconds", totals_plot_data(t), family_ticks(t)};
  std::string svg = render_svg(f);
  EXPECT_NE(svg.find("A &lt;b&gt; &amp; c"), std::string::npos);
  EXPECT_NE(svg.find(">Cridex<"), std::string::npos);
  EXPECT_EQ(render_svg(f), svg);
}

TEST(Slug, Basic) {
  EXPECT_EQ(slug("RL Agent"), "rl_agent");
  EXPECT_EQ(slug("env_new1"), "env_new1");
}

}  // namespace
}  // namespace rlfi
