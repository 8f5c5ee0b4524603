#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pulse/errors.hpp"
#include "pulse/eval.hpp"

namespace pulse {

inline std::string eval_task_name(EvalTask t) {
  switch (t) {
    case EvalTask::kEcgBeats: return "ecg_beats";
    case EvalTask::kPpgBeats: return "ppg_beats";
    case EvalTask::kMseOnly: return "mse_only";
  }
  throw ConfigError("unknown eval task");
}

inline EvalTask eval_task_from_name(const std::string& s) {
  if (s == "ecg_beats") return EvalTask::kEcgBeats;
  if (s == "ppg_beats") return EvalTask::kPpgBeats;
  if (s == "mse_only") return EvalTask::kMseOnly;
  throw ConfigError("unknown eval task '" + s + "'");
}

namespace detail {

// JSON has no NaN literal; undefined metrics serialize as null.
inline nlohmann::json num_or_null(double v) {
  if (std::isnan(v)) return nullptr;
  return v;
}

inline double num_from(const nlohmann::json& j) {
  if (j.is_null()) return std::numeric_limits<double>::quiet_NaN();
  return j.get<double>();
}

inline nlohmann::json ci_to_json(const ConfidenceInterval& ci) {
  return {{"point", num_or_null(ci.point)},
          {"lo", num_or_null(ci.lo)},
          {"hi", num_or_null(ci.hi)}};
}

inline ConfidenceInterval ci_from_json(const nlohmann::json& j) {
  ConfidenceInterval ci;
  ci.point = num_from(j.at("point"));
  ci.lo = num_from(j.at("lo"));
  ci.hi = num_from(j.at("hi"));
  return ci;
}

}  // namespace detail

inline nlohmann::json eval_report_to_json(const EvalReport& r) {
  nlohmann::json per = nlohmann::json::array();
  for (const auto& s : r.per_waveform)
    per.push_back({{"id", s.id},
                   {"mse_missing", s.mse_missing},
                   {"tp", s.tp},
                   {"fp", s.fp},
                   {"fn", s.fn}});
  return {{"task", eval_task_name(r.task)},
          {"per_waveform", per},
          {"totals", {{"tp", r.total_tp}, {"fp", r.total_fp}, {"fn", r.total_fn}}},
          {"aggregate",
           {{"mse", detail::ci_to_json(r.mse)},
            {"f1", detail::ci_to_json(r.f1)},
            {"precision", detail::ci_to_json(r.precision)},
            {"sensitivity", detail::ci_to_json(r.sensitivity)}}}};
}

inline EvalReport eval_report_from_json(const nlohmann::json& j) {
  EvalReport r;
  try {
    r.task = eval_task_from_name(j.at("task").get<std::string>());
    for (const auto& pj : j.at("per_waveform")) {
      PerWaveformStats s;
      s.id = pj.at("id").get<std::string>();
      s.mse_missing = pj.at("mse_missing").get<double>();
      s.tp = pj.at("tp").get<std::size_t>();
      s.fp = pj.at("fp").get<std::size_t>();
      s.fn = pj.at("fn").get<std::size_t>();
      r.per_waveform.push_back(std::move(s));
    }
    const auto& tot = j.at("totals");
    r.total_tp = tot.at("tp").get<std::size_t>();
    r.total_fp = tot.at("fp").get<std::size_t>();
    r.total_fn = tot.at("fn").get<std::size_t>();
    const auto& agg = j.at("aggregate");
    r.mse = detail::ci_from_json(agg.at("mse"));
    r.f1 = detail::ci_from_json(agg.at("f1"));
    r.precision = detail::ci_from_json(agg.at("precision"));
    r.sensitivity = detail::ci_from_json(agg.at("sensitivity"));
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("bad evaluation report json: ") + e.what());
  }
  return r;
}

inline void write_eval_report(const EvalReport& r, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot open '" + path + "' for writing");
  os << eval_report_to_json(r).dump(2) << "\n";
  if (!os) throw IoError("write failed for '" + path + "'");
}

inline EvalReport read_eval_report(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open '" + path + "'");
  nlohmann::json j;
  try {
    is >> j;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("bad evaluation report json: ") + e.what());
  }
  return eval_report_from_json(j);
}

/// Per-waveform statistics as CSV (for external density plotting).
inline void write_per_waveform_csv(const EvalReport& r, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot open '" + path + "' for writing");
  os << "id,mse_missing,tp,fp,fn\n";
  os.precision(17);
  for (const auto& s : r.per_waveform)
    os << s.id << "," << s.mse_missing << "," << s.tp << "," << s.fp << ","
       << s.fn << "\n";
  if (!os) throw IoError("write failed for '" + path + "'");
}

// ---------------------------------------------------------------------------
// Method-comparison table.
// ---------------------------------------------------------------------------

/// Formats a metric cell as "<point> ± <half-width>" with the leading zero
/// dropped ("0.64" -> ".64"); NaN metrics render as "NaN".
inline std::string format_metric_cell(double point, double half_width) {
  if (std::isnan(point)) return "NaN";
  auto fmt = [](double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.3g", v);
    std::string s(buf);
    if (s.rfind("0.", 0) == 0) s.erase(0, 1);
    else if (s.rfind("-0.", 0) == 0) s.erase(1, 1);
    return s;
  };
  if (std::isnan(half_width)) return fmt(point) + " ± NaN";
  return fmt(point) + " ± " + fmt(half_width);
}

struct ComparisonTable {
  std::string csv;
  std::string text;
};

/// Rows = methods, columns = MSE / F1 / Precision / Sensitivity, each cell
/// "point ± half-width". All reports must come from the same task.
inline ComparisonTable comparison_table(
    const std::vector<std::pair<std::string, EvalReport>>& reports) {
  if (reports.empty()) throw ParameterError("comparison table needs at least one report");
  for (const auto& [name, r] : reports)
    if (r.task != reports.front().second.task)
      throw ParameterError("cannot mix evaluation tasks in one table ('" + name + "')");

  const std::vector<std::string> cols = {"MSE", "F1", "Prec", "Sens"};
  std::vector<std::vector<std::string>> cells;
  for (const auto& [name, r] : reports) {
    auto cell = [](const ConfidenceInterval& ci) {
      const double hw = (std::isnan(ci.lo) || std::isnan(ci.hi))
                            ? std::numeric_limits<double>::quiet_NaN()
                            : (ci.hi - ci.lo) / 2.0;
      return format_metric_cell(ci.point, hw);
    };
    cells.push_back({name, cell(r.mse), cell(r.f1), cell(r.precision),
                     cell(r.sensitivity)});
  }

  ComparisonTable out;
  std::ostringstream csv;
  csv << "method,MSE,F1,Prec,Sens\n";
  for (const auto& row : cells) {
    for (std::size_t i = 0; i < row.size(); ++i)
      csv << (i ? "," : "") << "\"" << row[i] << "\"";
    csv << "\n";
  }
  out.csv = csv.str();

  std::vector<std::size_t> width(5, 0);
  std::vector<std::string> header = {"method", "MSE", "F1", "Prec", "Sens"};
  for (std::size_t i = 0; i < 5; ++i) width[i] = header[i].size();
  for (const auto& row : cells)
    for (std::size_t i = 0; i < 5; ++i) width[i] = std::max(width[i], row[i].size());
  std::ostringstream text;
  auto emit_row = [&](const std::vector<std::string>& row) {
    for (std::size_t i = 0; i < 5; ++i) {
      text << row[i] << std::string(width[i] - row[i].size(), ' ');
      text << (i + 1 < 5 ? "  " : "");
    }
    text << "\n";
  };
  emit_row(header);
  for (const auto& row : cells) emit_row(row);
  out.text = text.str();
  return out;
}

}  // namespace pulse
