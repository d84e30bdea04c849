// eval/report.h

// Copyright 2026 The octsep Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef OCTSEP_EVAL_REPORT_H_
#define OCTSEP_EVAL_REPORT_H_

#include <string>
#include <vector>

#include "eval/evaluate.h"

namespace octsep {

inline constexpr const char *kReportSchema = "octsep.report.v1";

struct ReportFiles {
  std::string records;    // <name>.records.jsonl, one line per mixture
  std::string summary;    // <name>.summary.json, metadata and aggregates
  std::string aggregate;  // <name>.aggregate.tsv
  std::string table;      // <name>.table.tsv, method x (preset, strategy)
  std::string chart;      // <name>.svg
};

nlohmann::json SummaryJson(const EvalReport &report);
ReportFiles EmitReport(const EvalReport &report, const std::string &dir, const std::string &name);

std::vector<MixtureRecord> LoadRecords(const std::string &path);
std::map<std::string, Stats> LoadAggregateTable(const std::string &path);

// Column order of the method table: each preset crossed with each strategy.
std::vector<std::string> TableColumns();
// Method label and column of a summary, from its metadata.
std::string MethodOf(const nlohmann::json &summary);
std::string ColumnOf(const nlohmann::json &summary);

struct BarGroup {
  std::string label;
  std::vector<std::pair<std::string, double>> bars;  // series, value
};
// Grouped bar chart as a standalone SVG document.
std::string RenderBarChart(const std::string &title, const std::string &y_label, const std::vector<BarGroup> &groups);

// Merges summaries into <dir>/table.tsv (one row per method) and
// <dir>/conditions.svg (one bar group per column: single-condition models,
// the ensemble and oracle OCT). Returns the table path.
std::string EmitCombinedReport(const std::vector<nlohmann::json> &summaries, const std::string &dir);

}  // namespace octsep

#endif  // OCTSEP_EVAL_REPORT_H_
