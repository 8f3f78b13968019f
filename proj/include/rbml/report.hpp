#pragma once

#include <cstdio>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "rbml/grid.hpp"
#include "rbml/model_io.hpp"

namespace rbml {

struct ReportMeta {
  std::string family;
  std::uint64_t seed = 0;
  std::string primary_eval;
  std::vector<std::string> classes;
  std::size_t top_k = 3;
};

namespace detail {

inline std::string fixed4(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", v);
  return buf;
}

inline nlohmann::json optional_array(const std::vector<std::optional<double>>& v) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& x : v)
    arr.push_back(x ? nlohmann::json(*x) : nlohmann::json(nullptr));
  return arr;
}

inline nlohmann::json auc_array(const std::vector<std::optional<RocCurve>>& v) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& x : v)
    arr.push_back(x ? nlohmann::json(x->auc) : nlohmann::json(nullptr));
  return arr;
}

}  // namespace detail

inline nlohmann::json to_json(const EvalReport& rep) {
  nlohmann::json j;
  j["eval_set"] = rep.eval_set_name;
  j["n"] = rep.n;
  j["overall_accuracy"] = rep.overall_accuracy;
  j["per_class_accuracy"] = detail::optional_array(rep.per_class_accuracy);
  j["confusion"] = rep.confusion;
  j["auc"] = detail::auc_array(rep.roc);
  nlohmann::json roc = nlohmann::json::array();
  for (const auto& curve : rep.roc) {
    if (!curve) {
      roc.push_back(nullptr);
      continue;
    }
    nlohmann::json pts = nlohmann::json::array();
    for (const auto& p : curve->points) pts.push_back({p.fpr, p.tpr});
    roc.push_back(std::move(pts));
  }
  j["roc"] = std::move(roc);
  return j;
}

// Per-class summary of a single evaluation.
inline std::string eval_report_markdown(const EvalReport& rep,
                                        const std::vector<std::string>& classes) {
  std::string md = "**" + rep.eval_set_name + "** — n=" + std::to_string(rep.n) +
                   ", overall accuracy " + detail::fixed4(rep.overall_accuracy) + "\n\n";
  md += "| Class | Accuracy | AUC |\n|---|---|---|\n";
  for (std::size_t c = 0; c < classes.size(); ++c) {
    md += "| " + classes[c] + " | ";
    md += rep.per_class_accuracy[c] ? detail::fixed4(*rep.per_class_accuracy[c]) : "n/a";
    md += " | ";
    md += rep.roc[c] ? detail::fixed4(rep.roc[c]->auc) : "n/a";
    md += " |\n";
  }
  return md;
}

// Canonical JSON form of a ranked result table. Deterministic for a fixed
// run: object keys are sorted and doubles round-trip exactly.
inline nlohmann::json report_to_json(std::span<const CellResult> results,
                                     const ReportMeta& meta) {
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t r = 0; r < results.size(); ++r) {
    const auto& res = results[r];
    nlohmann::json row;
    row["rank"] = r + 1;
    row["label"] = cell_label(res.cell);
    row["variant"] = to_string(res.cell.variant);
    row["n_estimators"] = res.cell.params.n_estimators;
    if (res.cell.params.family == "forest")
      row["max_samples"] = res.cell.params.max_samples;
    else
      row["learning_rate"] = res.cell.params.learning_rate;
    row["max_depth"] = res.cell.params.max_depth
                           ? nlohmann::json(*res.cell.params.max_depth)
                           : nlohmann::json(nullptr);
    row["status"] = res.ok ? "ok" : "error";
    if (!res.ok) row["error"] = res.error;
    nlohmann::json pools;
    for (const auto& [name, scores] : res.pools) {
      pools[name] = {{"val_acc", scores.val.overall_accuracy},
                     {"test_acc", scores.test.overall_accuracy},
                     {"val_per_class", detail::optional_array(scores.val.per_class_accuracy)},
                     {"test_per_class", detail::optional_array(scores.test.per_class_accuracy)},
                     {"val_auc", detail::auc_array(scores.val.roc)},
                     {"test_auc", detail::auc_array(scores.test.roc)}};
    }
    row["pools"] = std::move(pools);
    rows.push_back(std::move(row));
  }

  nlohmann::json report;
  report["schema"] = "rbml-report-v1";
  report["family"] = meta.family;
  report["seed"] = meta.seed;
  report["primary_eval"] = meta.primary_eval;
  report["classes"] = meta.classes;
  report["rows"] = std::move(rows);
  return report;
}

// Markdown table: one row per configuration, paired Val/Test accuracy
// columns per eval pool.
inline std::string render_markdown(const nlohmann::json& report) {
  std::vector<std::string> pool_names;
  for (const auto& row : report.at("rows"))
    if (row.at("status") == "ok") {
      for (auto it = row.at("pools").begin(); it != row.at("pools").end(); ++it)
        pool_names.push_back(it.key());
      break;
    }

  std::string md = "| Rank | Configuration |";
  std::string sep = "|---|---|";
  for (const auto& p : pool_names) {
    md += " " + p + " Val Acc | " + p + " Test Acc |";
    sep += "---|---|";
  }
  md += "\n" + sep + "\n";
  for (const auto& row : report.at("rows")) {
    md += "| " + row.at("rank").dump() + " | " + row.at("label").get<std::string>() + " |";
    if (row.at("status") == "ok") {
      for (const auto& p : pool_names) {
        const auto& scores = row.at("pools").at(p);
        md += " " + detail::fixed4(scores.at("val_acc").get<double>()) + " | " +
              detail::fixed4(scores.at("test_acc").get<double>()) + " |";
      }
    } else {
      for (std::size_t i = 0; i < pool_names.size(); ++i) md += " error | error |";
    }
    md += "\n";
  }
  return md;
}

inline std::string render_csv(const nlohmann::json& report) {
  std::vector<std::string> pool_names;
  for (const auto& row : report.at("rows"))
    if (row.at("status") == "ok") {
      for (auto it = row.at("pools").begin(); it != row.at("pools").end(); ++it)
        pool_names.push_back(it.key());
      break;
    }

  std::string csv = "rank,configuration";
  for (const auto& p : pool_names) csv += "," + p + "_val_acc," + p + "_test_acc";
  csv += ",status\n";
  for (const auto& row : report.at("rows")) {
    csv += row.at("rank").dump() + ",\"" + row.at("label").get<std::string>() + "\"";
    for (const auto& p : pool_names) {
      if (row.at("status") == "ok") {
        const auto& scores = row.at("pools").at(p);
        csv += "," + detail::fixed4(scores.at("val_acc").get<double>()) + "," +
               detail::fixed4(scores.at("test_acc").get<double>());
      } else {
        csv += ",,";
      }
    }
    csv += std::string(",") + row.at("status").get<std::string>() + "\n";
  }
  return csv;
}

// Copy of the report restricted to its first k rows (they are rank-sorted).
inline nlohmann::json report_head(const nlohmann::json& report, std::size_t k) {
  nlohmann::json out = report;
  auto& rows = out.at("rows");
  if (rows.size() > k) rows.erase(rows.begin() + static_cast<std::ptrdiff_t>(k), rows.end());
  return out;
}

enum class ReportFormat { markdown, csv, json };

inline ReportFormat report_format_from_string(const std::string& s) {
  if (s == "markdown" || s == "md") return ReportFormat::markdown;
  if (s == "csv") return ReportFormat::csv;
  if (s == "json") return ReportFormat::json;
  throw data_error("unknown report format: " + s);
}

inline void emit_report(const nlohmann::json& report, ReportFormat format,
                        const std::filesystem::path& path) {
  if (report.at("rows").empty()) throw data_error("emit_report: no results");
  switch (format) {
    case ReportFormat::markdown: write_atomic(path, render_markdown(report)); break;
    case ReportFormat::csv: write_atomic(path, render_csv(report)); break;
    case ReportFormat::json: write_atomic(path, report.dump(2) + "\n"); break;
  }
}

// CSV sidecars next to a report: per-class accuracy bars for every row, ROC
// points for the top_k rows.
inline void emit_sidecars(std::span<const CellResult> results, const ReportMeta& meta,
                          const std::filesystem::path& stem) {
  std::string per_class = "rank,configuration,pool,split,class,accuracy\n";
  for (std::size_t r = 0; r < results.size(); ++r) {
    const auto& res = results[r];
    if (!res.ok) continue;
    for (const auto& [pool, scores] : res.pools) {
      for (int split = 0; split < 2; ++split) {
        const EvalReport& rep = split == 0 ? scores.val : scores.test;
        for (std::size_t c = 0; c < rep.per_class_accuracy.size(); ++c) {
          per_class += std::to_string(r + 1) + ",\"" + cell_label(res.cell) + "\"," +
                       pool + ',' + (split == 0 ? "val" : "test") + ',' +
                       meta.classes.at(c) + ',';
          if (rep.per_class_accuracy[c])
            per_class += detail::fixed4(*rep.per_class_accuracy[c]);
          per_class += '\n';
        }
      }
    }
  }
  write_atomic(stem.string() + "_per_class.csv", per_class);

  std::string roc = "rank,configuration,pool,split,class,fpr,tpr\n";
  for (std::size_t r = 0; r < std::min(results.size(), meta.top_k); ++r) {
    const auto& res = results[r];
    if (!res.ok) continue;
    for (const auto& [pool, scores] : res.pools) {
      for (int split = 0; split < 2; ++split) {
        const EvalReport& rep = split == 0 ? scores.val : scores.test;
        for (std::size_t c = 0; c < rep.roc.size(); ++c) {
          if (!rep.roc[c]) continue;
          for (const auto& pt : rep.roc[c]->points)
            roc += std::to_string(r + 1) + ",\"" + cell_label(res.cell) + "\"," + pool +
                   ',' + (split == 0 ? "val" : "test") + ',' + meta.classes.at(c) +
                   ',' + detail::fixed4(pt.fpr) + ',' + detail::fixed4(pt.tpr) + '\n';
        }
      }
    }
  }
  write_atomic(stem.string() + "_roc.csv", roc);
}

}  // namespace rbml
