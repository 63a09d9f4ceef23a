#ifndef RLFI_REPORTING_HPP_
#define RLFI_REPORTING_HPP_

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "rlfi/sweep.hpp"

namespace rlfi {

struct TimingRecord {
  std::string family;
  std::string executor;
  std::string command;
  double seconds = 0.0;

  friend bool operator==(const TimingRecord&, const TimingRecord&) = default;
};

struct TimingDataset {
  std::vector<TimingRecord> records;

  friend bool operator==(const TimingDataset&, const TimingDataset&) = default;
};

// CSV with header family,executor,command,seconds. Throws ParseError or
// DuplicateRecord.
TimingDataset load_timings(std::string_view document);
std::string serialize_timings(const TimingDataset& ds);

struct TotalRow {
  std::string executor;
  std::string family;  // empty on grand-total rows
  double seconds = 0.0;

  friend bool operator==(const TotalRow&, const TotalRow&) = default;
};

struct Totals {
  std::vector<TotalRow> per_family;  // sorted by executor, then family
  std::vector<TotalRow> grand;       // sorted by executor

  friend bool operator==(const Totals&, const Totals&) = default;
};

// Sums are accumulated in record order.
Totals compare_totals(const TimingDataset& ds);

// executor,scope,family,total_seconds with scope "family" or "grand".
std::string totals_csv(const Totals& totals);

struct AccuracyRow {
  std::string env;
  double lr = 0.0;
  double accuracy = 0.0;

  friend bool operator==(const AccuracyRow&, const AccuracyRow&) = default;
};

// env,lr,accuracy_5dp
std::string accuracy_csv(const std::vector<AccuracyRow>& rows);
std::vector<AccuracyRow> parse_accuracy_csv(std::string_view text);

// env,lr,median_episodes,converged_fraction
std::string convergence_csv(const std::vector<ConvergenceRow>& rows);
std::vector<ConvergenceRow> parse_convergence_csv(std::string_view text);

// env,episode,reward_per_step
std::string reward_dynamics_csv(const std::map<std::string, std::vector<RewardPoint>>& series);
std::map<std::string, std::vector<RewardPoint>> parse_reward_dynamics_csv(
    std::string_view text);

enum class SeriesKind { kScatter, kLine, kBar };

struct PlotSeries {
  std::string name;
  std::vector<std::pair<double, double>> points;
  SeriesKind kind = SeriesKind::kLine;

  friend bool operator==(const PlotSeries&, const PlotSeries&) = default;
};

// Scatter of median episodes against lr, one series per env.
std::vector<PlotSeries> convergence_plot_data(const std::vector<ConvergenceRow>& table);
std::vector<PlotSeries> reward_plot_data(
    const std::map<std::string, std::vector<RewardPoint>>& series);
std::vector<PlotSeries> accuracy_plot_data(const std::vector<AccuracyRow>& rows);
// One bar series per executor; x is the 1-based family position in sorted order.
std::vector<PlotSeries> totals_plot_data(const Totals& totals);
// Family names at the x positions used by totals_plot_data.
std::vector<std::pair<double, std::string>> family_ticks(const Totals& totals);

struct Figure {
  std::string name;  // file stem
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<PlotSeries> series;
  // Category labels; empty means numeric ticks.
  std::vector<std::pair<double, std::string>> x_ticks;
};

enum class ReportFormat { kCsv, kSvg };

// csv: <dir>/<figure>_<series>.csv per non-empty series, header x,y.
// svg: <dir>/<figure>.svg. Returns the written paths. Throws IoError.
std::vector<std::filesystem::path> emit_report(const Figure& figure, ReportFormat format,
                                               const std::filesystem::path& dir);

// Self-contained SVG document; identical input gives identical bytes.
std::string render_svg(const Figure& figure);

// Lower-case alphanumerics with '_' for anything else.
std::string slug(std::string_view name);

}  // namespace rlfi

#endif  // RLFI_REPORTING_HPP_
