#include "rlfi/reporting.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <set>
#include <tuple>

#include "rlfi/csv.hpp"
#include "rlfi/errors.hpp"
#include "rlfi/files.hpp"
#include "rlfi/policy_eval.hpp"

namespace rlfi {

namespace {

void expect_header(const std::vector<CsvRecord>& records,
                   const std::vector<std::string>& header) {
  if (records.empty()) throw ParseError(1, "missing header");
  if (records[0].fields != header) {
    std::string want;
    for (const auto& h : header) want += (want.empty() ? "" : ",") + h;
    throw ParseError(records[0].line, "expected header " + want);
  }
}

void expect_width(const CsvRecord& rec, std::size_t n) {
  if (rec.fields.size() != n) {
    throw ParseError(rec.line, "expected " + std::to_string(n) + " fields, got " +
                                   std::to_string(rec.fields.size()));
  }
}

}  // namespace

// Timings

TimingDataset load_timings(std::string_view document) {
  const auto records = parse_csv(document);
  expect_header(records, {"family", "executor", "command", "seconds"});
  TimingDataset ds;
  std::set<std::tuple<std::string, std::string, std::string>> seen;
  for (std::size_t i = 1; i < records.size(); ++i) {
    const CsvRecord& rec = records[i];
    expect_width(rec, 4);
    TimingRecord r{rec.fields[0], rec.fields[1], rec.fields[2],
                   parse_real(rec.fields[3], rec.line, "seconds")};
    if (r.family.empty()) throw ParseError(rec.line, "family is empty");
    if (r.executor.empty()) throw ParseError(rec.line, "executor is empty");
    if (!std::isfinite(r.seconds) || r.seconds < 0.0) {
      throw ParseError(rec.line, "seconds must be a finite value >= 0");
    }
    if (!seen.emplace(r.family, r.executor, r.command).second) {
      throw DuplicateRecord("line " + std::to_string(rec.line) + ": duplicate record (" +
                            r.family + ", " + r.executor + ", " + r.command + ")");
    }
    ds.records.push_back(std::move(r));
  }
  return ds;
}

std::string serialize_timings(const TimingDataset& ds) {
  std::string out = "family,executor,command,seconds\n";
  for (const TimingRecord& r : ds.records) {
    out += csv_row({r.family, r.executor, r.command, format_exact(r.seconds)});
  }
  return out;
}

Totals compare_totals(const TimingDataset& ds) {
  std::map<std::pair<std::string, std::string>, double> by_family;
  std::map<std::string, double> grand;
  for (const TimingRecord& r : ds.records) {
    by_family[{r.executor, r.family}] += r.seconds;
    grand[r.executor] += r.seconds;
  }
  Totals totals;
  for (const auto& [key, secs] : by_family) {
    totals.per_family.push_back({key.first, key.second, secs});
  }
  for (const auto& [executor, secs] : grand) totals.grand.push_back({executor, "", secs});
  return totals;
}

std::string totals_csv(const Totals& totals) {
  std::string out = "executor,scope,family,total_seconds\n";
  for (const TotalRow& r : totals.per_family) {
    out += csv_row({r.executor, "family", r.family, format_g12(r.seconds)});
  }
  for (const TotalRow& r : totals.grand) {
    out += csv_row({r.executor, "grand", "", format_g12(r.seconds)});
  }
  return out;
}

// Tables

std::string accuracy_csv(const std::vector<AccuracyRow>& rows) {
  std::string out = "env,lr,accuracy_5dp\n";
  for (const AccuracyRow& r : rows) {
    out += csv_row({r.env, format_lr(r.lr), format_accuracy(r.accuracy)});
  }
  return out;
}

std::vector<AccuracyRow> parse_accuracy_csv(std::string_view text) {
  const auto records = parse_csv(text);
  expect_header(records, {"env", "lr", "accuracy_5dp"});
  std::vector<AccuracyRow> rows;
  for (std::size_t i = 1; i < records.size(); ++i) {
    const CsvRecord& rec = records[i];
    expect_width(rec, 3);
    rows.push_back({rec.fields[0], parse_real(rec.fields[1], rec.line, "lr"),
                    parse_real(rec.fields[2], rec.line, "accuracy_5dp")});
  }
  return rows;
}

std::string convergence_csv(const std::vector<ConvergenceRow>& rows) {
  std::string out = "env,lr,median_episodes,converged_fraction\n";
  for (const ConvergenceRow& r : rows) {
    out += csv_row({r.env, format_lr(r.lr), format_g12(r.median_episodes),
                    format_g12(r.converged_fraction)});
  }
  return out;
}

std::vector<ConvergenceRow> parse_convergence_csv(std::string_view text) {
  const auto records = parse_csv(text);
  expect_header(records, {"env", "lr", "median_episodes", "converged_fraction"});
  std::vector<ConvergenceRow> rows;
  for (std::size_t i = 1; i < records.size(); ++i) {
    const CsvRecord& rec = records[i];
    expect_width(rec, 4);
    rows.push_back({rec.fields[0], parse_real(rec.fields[1], rec.line, "lr"),
                    parse_real(rec.fields[2], rec.line, "median_episodes"),
                    parse_real(rec.fields[3], rec.line, "converged_fraction")});
  }
  return rows;
}

std::string reward_dynamics_csv(
    const std::map<std::string, std::vector<RewardPoint>>& series) {
  std::string out = "env,episode,reward_per_step\n";
  for (const auto& [env, points] : series) {
    for (const RewardPoint& p : points) {
      out += csv_row({env, std::to_string(p.episode), format_g12(p.reward_per_step)});
    }
  }
  return out;
}

std::map<std::string, std::vector<RewardPoint>> parse_reward_dynamics_csv(
    std::string_view text) {
  const auto records = parse_csv(text);
  expect_header(records, {"env", "episode", "reward_per_step"});
  std::map<std::string, std::vector<RewardPoint>> series;
  for (std::size_t i = 1; i < records.size(); ++i) {
    const CsvRecord& rec = records[i];
    expect_width(rec, 3);
    series[rec.fields[0]].push_back(
        {static_cast<int>(parse_integer(rec.fields[1], rec.line, "episode")),
         parse_real(rec.fields[2], rec.line, "reward_per_step")});
  }
  return series;
}

// Plot data

std::vector<PlotSeries> convergence_plot_data(const std::vector<ConvergenceRow>& table) {
  std::map<std::string, PlotSeries> by_env;
  for (const ConvergenceRow& r : table) {
    PlotSeries& s = by_env[r.env];
    s.name = r.env;
    s.kind = SeriesKind::kScatter;
    s.points.emplace_back(r.lr, r.median_episodes);
  }
  std::vector<PlotSeries> out;
  for (auto& [_, s] : by_env) out.push_back(std::move(s));
  return out;
}

std::vector<PlotSeries> reward_plot_data(
    const std::map<std::string, std::vector<RewardPoint>>& series) {
  std::vector<PlotSeries> out;
  for (const auto& [env, points] : series) {
    if (points.empty()) continue;
    PlotSeries s{env, {}, SeriesKind::kLine};
    for (const RewardPoint& p : points) s.points.emplace_back(p.episode, p.reward_per_step);
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<PlotSeries> accuracy_plot_data(const std::vector<AccuracyRow>& rows) {
  std::map<std::string, PlotSeries> by_env;
  for (const AccuracyRow& r : rows) {
    PlotSeries& s = by_env[r.env];
    s.name = r.env;
    s.kind = SeriesKind::kLine;
    s.points.emplace_back(r.lr, r.accuracy);
  }
  std::vector<PlotSeries> out;
  for (auto& [_, s] : by_env) {
    std::stable_sort(s.points.begin(), s.points.end());
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<PlotSeries> totals_plot_data(const Totals& totals) {
  std::set<std::string> families;
  for (const TotalRow& r : totals.per_family) families.insert(r.family);
  std::map<std::string, double> position;
  double k = 1.0;
  for (const std::string& f : families) position[f] = k++;
  std::map<std::string, PlotSeries> by_exec;
  for (const TotalRow& r : totals.per_family) {
    PlotSeries& s = by_exec[r.executor];
    s.name = r.executor;
    s.kind = SeriesKind::kBar;
    s.points.emplace_back(position[r.family], r.seconds);
  }
  std::vector<PlotSeries> out;
  for (auto& [_, s] : by_exec) out.push_back(std::move(s));
  return out;
}

std::vector<std::pair<double, std::string>> family_ticks(const Totals& totals) {
  std::set<std::string> families;
  for (const TotalRow& r : totals.per_family) families.insert(r.family);
  std::vector<std::pair<double, std::string>> ticks;
  double k = 1.0;
  for (const std::string& f : families) ticks.emplace_back(k++, f);
  return ticks;
}

// Output

std::string slug(std::string_view name) {
  std::string out;
  for (char c : name) {
    const auto u = static_cast<unsigned char>(c);
    out += std::isalnum(u) ? static_cast<char>(std::tolower(u)) : '_';
  }
  return out.empty() ? "series" : out;
}

namespace {

std::string fmt2(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  // Avoid "-0.00".
  if (std::string_view(buf) == "-0.00") return "0.00";
  return buf;
}

std::string tick_label(double v) {
  if (std::fabs(v) < 1e-12) return "0";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

// Multiples of 1, 2 or 5 x 10^k inside [lo, hi], about five of them.
std::vector<double> nice_ticks(double lo, double hi) {
  const double raw = (hi - lo) / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 5.0, 10.0}) {
    step = m * mag;
    if (step >= raw) break;
  }
  std::vector<double> ticks;
  for (double k = std::ceil(lo / step); k * step <= hi + step * 1e-9; k += 1.0) {
    ticks.push_back(k * step);
  }
  return ticks;
}

std::string xml_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

constexpr std::array<const char*, 6> kPalette = {"#1f77b4", "#d62728", "#2ca02c",
                                                 "#ff7f0e", "#9467bd", "#8c564b"};

}  // namespace

std::string render_svg(const Figure& figure) {
  constexpr double kWidth = 720, kHeight = 440;
  constexpr double kLeft = 80, kRight = 170, kTop = 40, kBottom = 60;
  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;

  bool any = false, bars = false;
  double x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  for (const PlotSeries& s : figure.series) {
    bars = bars || s.kind == SeriesKind::kBar;
    for (const auto& [x, y] : s.points) {
      if (!any) {
        x0 = x1 = x;
        y0 = y1 = y;
        any = true;
      }
      x0 = std::min(x0, x);
      x1 = std::max(x1, x);
      y0 = std::min(y0, y);
      y1 = std::max(y1, y);
    }
  }
  if (bars) {
    x0 -= 0.5;
    x1 += 0.5;
    y0 = std::min(y0, 0.0);
  }
  if (x1 == x0) { x0 -= 1; x1 += 1; }
  if (y1 == y0) { y0 -= 1; y1 += 1; }
  const double pad = (y1 - y0) * 0.05;
  if (!bars || y0 < 0) y0 -= pad;
  y1 += pad;

  auto px = [&](double x) { return kLeft + (x - x0) / (x1 - x0) * plot_w; };
  auto py = [&](double y) { return kTop + (y1 - y) / (y1 - y0) * plot_h; };

  std::string out;
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"720\" height=\"440\" "
         "viewBox=\"0 0 720 440\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out += "<rect width=\"720\" height=\"440\" fill=\"#ffffff\"/>\n";
  out += "<text x=\"" + fmt2(kLeft + plot_w / 2) + "\" y=\"24\" text-anchor=\"middle\" "
         "font-size=\"15\">" + xml_escape(figure.title) + "</text>\n";
  out += "<rect x=\"" + fmt2(kLeft) + "\" y=\"" + fmt2(kTop) + "\" width=\"" +
         fmt2(plot_w) + "\" height=\"" + fmt2(plot_h) +
         "\" fill=\"none\" stroke=\"#333333\"/>\n";

  std::vector<std::pair<double, std::string>> x_ticks = figure.x_ticks;
  if (x_ticks.empty()) {
    for (double v : nice_ticks(x0, x1)) x_ticks.emplace_back(v, tick_label(v));
  }
  for (const auto& [xv, label] : x_ticks) {
    out += "<line x1=\"" + fmt2(px(xv)) + "\" y1=\"" + fmt2(kTop + plot_h) + "\" x2=\"" +
           fmt2(px(xv)) + "\" y2=\"" + fmt2(kTop + plot_h + 5) + "\" stroke=\"#333333\"/>\n";
    out += "<text x=\"" + fmt2(px(xv)) + "\" y=\"" + fmt2(kTop + plot_h + 18) +
           "\" text-anchor=\"middle\">" + xml_escape(label) + "</text>\n";
  }
  for (double yv : nice_ticks(y0, y1)) {
    out += "<line x1=\"" + fmt2(kLeft - 5) + "\" y1=\"" + fmt2(py(yv)) + "\" x2=\"" +
           fmt2(kLeft) + "\" y2=\"" + fmt2(py(yv)) + "\" stroke=\"#333333\"/>\n";
    out += "<text x=\"" + fmt2(kLeft - 8) + "\" y=\"" + fmt2(py(yv) + 4) +
           "\" text-anchor=\"end\">" + tick_label(yv) + "</text>\n";
  }
  out += "<text x=\"" + fmt2(kLeft + plot_w / 2) + "\" y=\"" + fmt2(kHeight - 18) +
         "\" text-anchor=\"middle\">" + xml_escape(figure.x_label) + "</text>\n";
  out += "<text x=\"18\" y=\"" + fmt2(kTop + plot_h / 2) +
         "\" text-anchor=\"middle\" transform=\"rotate(-90 18 " +
         fmt2(kTop + plot_h / 2) + ")\">" + xml_escape(figure.y_label) + "</text>\n";

  std::size_t bar_series = 0;
  for (const PlotSeries& s : figure.series) bar_series += s.kind == SeriesKind::kBar;
  const double slot = plot_w / (x1 - x0);
  const double bar_w = bar_series ? slot * 0.8 / bar_series : 0.0;
  std::size_t bar_index = 0;

  for (std::size_t k = 0; k < figure.series.size(); ++k) {
    const PlotSeries& s = figure.series[k];
    const std::string color = kPalette[k % kPalette.size()];
    if (s.kind == SeriesKind::kLine && !s.points.empty()) {
      out += "<polyline fill=\"none\" stroke=\"" + color + "\" stroke-width=\"1.5\" points=\"";
      for (std::size_t i = 0; i < s.points.size(); ++i) {
        if (i) out += " ";
        out += fmt2(px(s.points[i].first)) + "," + fmt2(py(s.points[i].second));
      }
      out += "\"/>\n";
    } else if (s.kind == SeriesKind::kScatter) {
      for (const auto& [x, y] : s.points) {
        out += "<circle cx=\"" + fmt2(px(x)) + "\" cy=\"" + fmt2(py(y)) +
               "\" r=\"3.5\" fill=\"" + color + "\"/>\n";
      }
    } else if (s.kind == SeriesKind::kBar) {
      for (const auto& [x, y] : s.points) {
        const double left = px(x) - slot * 0.4 + bar_w * bar_index;
        const double top = py(std::max(y, 0.0));
        const double bottom = py(std::min(y, 0.0));
        out += "<rect x=\"" + fmt2(left) + "\" y=\"" + fmt2(top) + "\" width=\"" +
               fmt2(bar_w) + "\" height=\"" + fmt2(bottom - top) + "\" fill=\"" + color +
               "\"/>\n";
      }
      ++bar_index;
    }
    const double ly = kTop + 14 + 18 * static_cast<double>(k);
    out += "<rect x=\"" + fmt2(kWidth - kRight + 16) + "\" y=\"" + fmt2(ly - 9) +
           "\" width=\"10\" height=\"10\" fill=\"" + color + "\"/>\n";
    out += "<text x=\"" + fmt2(kWidth - kRight + 32) + "\" y=\"" + fmt2(ly) + "\">" +
           xml_escape(s.name) + "</text>\n";
  }
  out += "</svg>\n";
  return out;
}

std::vector<std::filesystem::path> emit_report(const Figure& figure, ReportFormat format,
                                               const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> written;
  if (format == ReportFormat::kSvg) {
    const auto path = dir / (figure.name + ".svg");
    write_text_file(path, render_svg(figure));
    written.push_back(path);
    return written;
  }
  for (const PlotSeries& s : figure.series) {
    if (s.points.empty()) continue;
    std::string text = "x,y\n";
    for (const auto& [x, y] : s.points) text += format_g12(x) + "," + format_g12(y) + "\n";
    const auto path = dir / (figure.name + "_" + slug(s.name) + ".csv");
    write_text_file(path, text);
    written.push_back(path);
  }
  return written;
}

}  // namespace rlfi
