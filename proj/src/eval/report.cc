// eval/report.cc

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

#include "eval/report.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

namespace octsep {

namespace fs = std::filesystem;

namespace {

const char *kStrategies[] = {"random", "different-superclass", "same-superclass"};
const char *kPresets[] = {"hard", "easy"};

std::ofstream OpenOut(const std::string &path) {
  std::ofstream out(path, std::ios::trunc);
  Require(out.good(), ErrorCode::kIo, "cannot write '", path, "'");
  out << std::setprecision(17);
  return out;
}

void CloseOut(std::ofstream &out, const std::string &path) {
  out.flush();
  Require(out.good(), ErrorCode::kIo, "short write to '", path, "'");
}

std::string Escape(const std::string &s) {
  std::string o;
  for (char c : s) {
    switch (c) {
      case '&': o += "&amp;"; break;
      case '<': o += "&lt;"; break;
      case '>': o += "&gt;"; break;
      case '"': o += "&quot;"; break;
      default: o += c;
    }
  }
  return o;
}

std::string Fixed(double v, int digits) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(digits) << v;
  return os.str();
}

}  // namespace

nlohmann::json SummaryJson(const EvalReport &report) {
  nlohmann::json aggregates = nlohmann::json::object();
  for (const auto &[key, s] : report.aggregates())
    aggregates[key] = {{"count", s.count}, {"mean", s.mean}, {"median", s.median}, {"std", s.std}};
  nlohmann::json j = {{"schema", kReportSchema},
                      {"protocol", report.protocol},
                      {"records", report.records.size()},
                      {"skipped_mixtures", report.skipped_mixtures()},
                      {"targets_per_mixture", 2},
                      {"aggregates", aggregates},
                      {"metadata", report.metadata}};
  if (!report.condition.empty()) j["condition"] = report.condition;
  return j;
}

std::vector<std::string> TableColumns() {
  std::vector<std::string> cols;
  for (const char *p : kPresets)
    for (const char *s : kStrategies) cols.push_back(std::string(p) + "/" + s);
  return cols;
}

std::string MethodOf(const nlohmann::json &summary) {
  const nlohmann::json &m = summary.value("metadata", nlohmann::json::object());
  if (m.contains("method")) return m["method"];
  const std::string protocol = summary.value("protocol", "?");
  if (protocol == "condition") return m.value("regime", std::string("model")) + "@" + summary.value("condition", "?");
  if (protocol == "oracle-oct") return "oracle " + m.value("regime", std::string("oct"));
  if (protocol == "pit-oracle") return "oracle pit";
  return "oracle " + protocol;
}

std::string ColumnOf(const nlohmann::json &summary) {
  const nlohmann::json &m = summary.value("metadata", nlohmann::json::object());
  return m.value("preset", std::string("?")) + "/" + m.value("strategy", std::string("?"));
}

ReportFiles EmitReport(const EvalReport &report, const std::string &dir, const std::string &name) {
  Require(!name.empty(), ErrorCode::kInvalidArgument, "report name must not be empty");
  fs::create_directories(dir);
  const fs::path base = fs::path(dir) / name;
  ReportFiles f{base.string() + ".records.jsonl", base.string() + ".summary.json", base.string() + ".aggregate.tsv",
                base.string() + ".table.tsv", base.string() + ".svg"};

  {
    std::ofstream out = OpenOut(f.records);
    for (const MixtureRecord &r : report.records) out << RecordToJson(r).dump() << '\n';
    CloseOut(out, f.records);
  }
  const nlohmann::json summary = SummaryJson(report);
  {
    std::ofstream out = OpenOut(f.summary);
    out << summary.dump(2) << '\n';
    CloseOut(out, f.summary);
  }
  const auto aggregates = report.aggregates();
  {
    std::ofstream out = OpenOut(f.aggregate);
    out << "key\tcount\tmean\tmedian\tstd\n";
    for (const auto &[key, s] : aggregates)
      out << key << '\t' << s.count << '\t' << s.mean << '\t' << s.median << '\t' << s.std << '\n';
    CloseOut(out, f.aggregate);
  }
  {
    std::ofstream out = OpenOut(f.table);
    out << "method";
    for (const std::string &c : TableColumns()) out << '\t' << c;
    out << '\n' << MethodOf(summary);
    for (const std::string &c : TableColumns()) {
      out << '\t';
      if (c == ColumnOf(summary)) out << Fixed(aggregates.at("si_sdr/valid").mean, 2);
    }
    out << '\n';
    CloseOut(out, f.table);
  }
  {
    BarGroup g{"SI-SDR", {}}, gi{"SI-SDRi", {}};
    for (const auto &[key, s] : aggregates) {
      const auto slash = key.find('/');
      auto &bars = key.substr(0, slash) == "si_sdr" ? g.bars : gi.bars;
      bars.emplace_back(key.substr(slash + 1), s.mean);
    }
    std::ofstream out = OpenOut(f.chart);
    out << RenderBarChart(name + " (" + report.protocol + ")", "mean dB", {g, gi});
    CloseOut(out, f.chart);
  }
  return f;
}

std::vector<MixtureRecord> LoadRecords(const std::string &path) {
  std::ifstream in(path);
  Require(in.good(), ErrorCode::kIo, "cannot open '", path, "'");
  std::vector<MixtureRecord> out;
  int line_no = 0;
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    if (line.empty()) continue;
    try {
      out.push_back(RecordFromJson(nlohmann::json::parse(line)));
    } catch (const Error &) {
      throw;
    } catch (const std::exception &e) {
      Fail(ErrorCode::kData, path, ":", line_no, ": ", e.what());
    }
  }
  return out;
}

std::map<std::string, Stats> LoadAggregateTable(const std::string &path) {
  std::ifstream in(path);
  Require(in.good(), ErrorCode::kIo, "cannot open '", path, "'");
  std::map<std::string, Stats> out;
  std::string line;
  std::getline(in, line);
  Require(line == "key\tcount\tmean\tmedian\tstd", ErrorCode::kData, path, ": unexpected header");
  for (int line_no = 2; std::getline(in, line); ++line_no) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string key;
    Stats s;
    Require(static_cast<bool>(std::getline(row, key, '\t') >> s.count >> s.mean >> s.median >> s.std), ErrorCode::kData,
            path, ":", line_no, ": malformed row");
    out[key] = s;
  }
  return out;
}

std::string RenderBarChart(const std::string &title, const std::string &y_label, const std::vector<BarGroup> &groups) {
  std::vector<std::string> series;
  double lo = 0.0, hi = 0.0;
  for (const BarGroup &g : groups)
    for (const auto &[s, v] : g.bars) {
      if (std::find(series.begin(), series.end(), s) == series.end()) series.push_back(s);
      if (std::isfinite(v)) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
    }
  if (hi - lo < 1e-9) hi = lo + 1.0;
  const double pad = 0.08 * (hi - lo);
  hi += pad;
  if (lo < 0.0) lo -= pad;

  const int bar_w = 22, gap = 30, left = 70, top = 50, plot_h = 300, legend_w = 230;
  const std::size_t nbars = std::max<std::size_t>(series.size(), 1);
  const int group_w = static_cast<int>(nbars) * bar_w + gap;
  const int plot_w = std::max<int>(200, static_cast<int>(groups.size()) * group_w);
  const int width = left + plot_w + legend_w, height = top + plot_h + 70;
  const auto y_of = [&](double v) { return top + plot_h * (hi - v) / (hi - lo); };
  static const char *palette[] = {"#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f",
                                  "#edc948", "#b07aa1", "#ff9da7", "#9c755f", "#bab0ac"};

  std::ostringstream s;
  s << std::fixed << std::setprecision(2);
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
    << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s << "<text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">" << Escape(title)
    << "</text>\n";
  s << "<text transform=\"translate(16," << top + plot_h / 2 << ") rotate(-90)\" text-anchor=\"middle\">"
    << Escape(y_label) << "</text>\n";
  for (int k = 0; k <= 5; ++k) {
    const double v = lo + (hi - lo) * k / 5.0;
    const double y = y_of(v);
    s << "<line x1=\"" << left << "\" x2=\"" << left + plot_w << "\" y1=\"" << y << "\" y2=\"" << y
      << "\" stroke=\"#ddd\"/>\n";
    s << "<text x=\"" << left - 6 << "\" y=\"" << y + 4 << "\" text-anchor=\"end\">" << Fixed(v, 1) << "</text>\n";
  }
  s << "<line x1=\"" << left << "\" x2=\"" << left + plot_w << "\" y1=\"" << y_of(0.0) << "\" y2=\"" << y_of(0.0)
    << "\" stroke=\"black\"/>\n";
  for (std::size_t gi = 0; gi < groups.size(); ++gi) {
    const double x0 = left + gap / 2.0 + gi * group_w;
    for (const auto &[name, v] : groups[gi].bars) {
      const std::size_t si = std::find(series.begin(), series.end(), name) - series.begin();
      const double x = x0 + si * bar_w;
      const double y = y_of(std::max(v, 0.0)), h = std::abs(y_of(v) - y_of(0.0));
      s << "<rect x=\"" << x << "\" y=\"" << (v >= 0 ? y : y_of(0.0)) << "\" width=\"" << bar_w - 2
        << "\" height=\"" << h << "\" fill=\"" << palette[si % 10] << "\"><title>" << Escape(name) << ": "
        << Fixed(v, 2) << " dB</title></rect>\n";
    }
    s << "<text x=\"" << x0 + (group_w - gap) / 2.0 << "\" y=\"" << top + plot_h + 20
      << "\" text-anchor=\"middle\">" << Escape(groups[gi].label) << "</text>\n";
  }
  for (std::size_t si = 0; si < series.size(); ++si) {
    const int y = top + 10 + static_cast<int>(si) * 18;
    s << "<rect x=\"" << left + plot_w + 20 << "\" y=\"" << y - 10 << "\" width=\"12\" height=\"12\" fill=\""
      << palette[si % 10] << "\"/>\n";
    s << "<text x=\"" << left + plot_w + 38 << "\" y=\"" << y << "\">" << Escape(series[si]) << "</text>\n";
  }
  s << "</svg>\n";
  return s.str();
}

std::string EmitCombinedReport(const std::vector<nlohmann::json> &summaries, const std::string &dir) {
  fs::create_directories(dir);
  std::vector<std::string> methods;
  std::map<std::pair<std::string, std::string>, double> cell;
  for (const nlohmann::json &s : summaries) {
    const std::string m = MethodOf(s);
    if (std::find(methods.begin(), methods.end(), m) == methods.end()) methods.push_back(m);
    cell[{m, ColumnOf(s)}] = s.at("aggregates").at("si_sdr/valid").at("mean").get<double>();
  }
  const std::string table = (fs::path(dir) / "table.tsv").string();
  {
    std::ofstream out = OpenOut(table);
    out << "method";
    for (const std::string &c : TableColumns()) out << '\t' << c;
    out << '\n';
    for (const std::string &m : methods) {
      out << m;
      for (const std::string &c : TableColumns()) {
        out << '\t';
        if (const auto it = cell.find({m, c}); it != cell.end()) out << Fixed(it->second, 2);
      }
      out << '\n';
    }
    CloseOut(out, table);
  }
  // Condition comparison: single-condition models evaluated on their own
  // condition, the oracle ensemble and oracle OCT.
  std::vector<BarGroup> groups;
  for (const std::string &c : TableColumns()) {
    BarGroup g{c, {}};
    for (const std::string &m : methods) {
      const auto it = cell.find({m, c});
      if (it == cell.end()) continue;
      const bool single = m.rfind("single:", 0) == 0;
      if (single || m == "oracle ensemble" || m.rfind("oracle oct", 0) == 0) g.bars.emplace_back(m, it->second);
    }
    if (!g.bars.empty()) groups.push_back(std::move(g));
  }
  std::ofstream out = OpenOut((fs::path(dir) / "conditions.svg").string());
  out << RenderBarChart("Mean test SI-SDR per condition", "SI-SDR (dB)", groups);
  CloseOut(out, (fs::path(dir) / "conditions.svg").string());
  return table;
}

}  // namespace octsep
