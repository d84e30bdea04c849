// mixgen/corpus.cc

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

#include "mixgen/corpus.h"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "signal/wav_io.h"

namespace octsep {

namespace fs = std::filesystem;

namespace {

std::vector<std::string> SplitTabs(const std::string &line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find('\t', start);
    out.push_back(line.substr(start, pos == std::string::npos ? std::string::npos : pos - start));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string Trim(const std::string &s) {
  const auto b = s.find_first_not_of(" \r\n\t");
  if (b == std::string::npos) return "";
  return s.substr(b, s.find_last_not_of(" \r\n\t") - b + 1);
}

// Minimal CSV field splitter with double-quote support (FSD50K label lists
// are quoted because they contain commas).
std::vector<std::string> SplitCsv(const std::string &line) {
  std::vector<std::string> out(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (ch == '"') {
      if (quoted && i + 1 < line.size() && line[i + 1] == '"') {
        out.back() += '"';
        ++i;
      } else {
        quoted = !quoted;
      }
    } else if (ch == ',' && !quoted) {
      out.emplace_back();
    } else if (ch != '\r') {
      out.back() += ch;
    }
  }
  return out;
}

CorpusEntry MakeEntry(const std::string &path, const std::string &display_path, const std::string &cls,
                      const std::map<std::string, std::string> &ontology,
                      const std::map<std::string, std::string> &harmonicity) {
  const auto sup = ontology.find(cls);
  Require(sup != ontology.end(), ErrorCode::kData, "class '", cls, "' has no super-class");
  const auto harm = harmonicity.find(cls);
  Require(harm != harmonicity.end(), ErrorCode::kData, "class '", cls, "' has no harmonicity tag");
  const WavInfo info = ProbeWav(path);
  CorpusEntry e;
  e.path = display_path;
  e.class_name = cls;
  e.super_class = sup->second;
  e.harmonicity = harm->second;
  e.sample_rate = info.sample_rate;
  e.duration_s = static_cast<double>(info.num_samples) / info.sample_rate;
  return e;
}

}  // namespace

Corpus::Corpus(std::vector<CorpusEntry> entries, std::string root)
    : entries_(std::move(entries)), root_(std::move(root)) {
  std::map<std::string, std::string> super_of;
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    const CorpusEntry &e = entries_[i];
    Require(!e.path.empty(), ErrorCode::kData, "corpus entry ", i, ": empty path");
    Require(!e.class_name.empty(), ErrorCode::kData, "corpus entry ", i, ": empty class");
    Require(!e.super_class.empty(), ErrorCode::kData, "corpus entry ", i, " (", e.class_name,
            "): empty super-class");
    Require(e.harmonicity == "harmonic" || e.harmonicity == "percussive", ErrorCode::kData,
            "corpus entry ", i, " (", e.class_name, "): harmonicity must be harmonic|percussive");
    Require(e.duration_s > 0.0, ErrorCode::kData, "corpus entry ", i, ": duration must be positive");
    Require(e.sample_rate > 0, ErrorCode::kData, "corpus entry ", i, ": bad sample rate");
    const auto [it, inserted] = super_of.emplace(e.class_name, e.super_class);
    Require(inserted || it->second == e.super_class, ErrorCode::kData, "class '", e.class_name,
            "' maps to two super-classes (", it->second, ", ", e.super_class, ")");
  }
  for (const auto &[cls, sup] : super_of) {
    class_index_[cls] = static_cast<int>(classes_.size());
    classes_.push_back(cls);
    class_super_.push_back(sup);
  }
  clips_.resize(classes_.size());
  for (std::size_t i = 0; i < entries_.size(); ++i)
    clips_[class_index_.at(entries_[i].class_name)].push_back(static_cast<int>(i));
}

std::string Corpus::ResolvePath(const CorpusEntry &e) const {
  const fs::path p(e.path);
  if (p.is_absolute() || root_.empty()) return p.string();
  return (fs::path(root_) / p).string();
}

const std::string &Corpus::SuperClassOf(int class_index) const { return class_super_.at(class_index); }

int Corpus::ClassIndex(const std::string &name) const {
  const auto it = class_index_.find(name);
  Require(it != class_index_.end(), ErrorCode::kInvalidArgument, "unknown class '", name, "'");
  return it->second;
}

std::vector<std::string> Corpus::SuperClasses() const {
  std::set<std::string> s(class_super_.begin(), class_super_.end());
  return {s.begin(), s.end()};
}

Corpus LoadManifest(const std::string &path) {
  std::ifstream in(path);
  Require(static_cast<bool>(in), ErrorCode::kIo, "cannot open manifest '", path, "'");
  std::vector<CorpusEntry> entries;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (Trim(line).empty() || line[0] == '#') continue;
    const std::vector<std::string> f = SplitTabs(line);
    Require(f.size() == 6, ErrorCode::kData, path, ":", line_no, ": expected 6 tab-separated columns, got ",
            f.size());
    if (f[0] == "path") continue;  // optional column header row
    CorpusEntry e;
    e.path = Trim(f[0]);
    e.class_name = Trim(f[1]);
    e.super_class = Trim(f[2]);
    e.harmonicity = Trim(f[3]);
    Require(!e.super_class.empty(), ErrorCode::kData, path, ":", line_no, ": class '", e.class_name,
            "' without super-class");
    Require(!e.harmonicity.empty(), ErrorCode::kData, path, ":", line_no, ": missing harmonicity tag");
    try {
      e.duration_s = std::stod(f[4]);
      e.sample_rate = std::stoi(f[5]);
    } catch (const std::exception &) {
      Fail(ErrorCode::kData, path, ":", line_no, ": malformed duration or sample rate");
    }
    try {
      Corpus({e}, "");
    } catch (const Error &err) {
      Fail(ErrorCode::kData, path, ":", line_no, ": ", err.what());
    }
    entries.push_back(std::move(e));
  }
  Require(!entries.empty(), ErrorCode::kData, "manifest '", path, "' has no entries");
  return Corpus(std::move(entries), fs::path(path).parent_path().string());
}

void SaveManifest(const std::string &path, const std::vector<CorpusEntry> &entries) {
  std::ofstream out(path);
  Require(static_cast<bool>(out), ErrorCode::kIo, "cannot write manifest '", path, "'");
  out << kManifestHeader << "\n";
  out << "path\tclass\tsuper_class\tharmonicity\tduration_s\tsample_rate\n";
  for (const CorpusEntry &e : entries) {
    std::ostringstream dur;
    dur.precision(17);
    dur << e.duration_s;
    out << e.path << '\t' << e.class_name << '\t' << e.super_class << '\t' << e.harmonicity << '\t'
        << dur.str() << '\t' << e.sample_rate << '\n';
  }
  Require(static_cast<bool>(out), ErrorCode::kIo, "error writing manifest '", path, "'");
}

std::map<std::string, std::string> LoadLookup(const std::string &path, const char *what) {
  std::ifstream in(path);
  Require(static_cast<bool>(in), ErrorCode::kIo, "cannot open ", what, " file '", path, "'");
  std::map<std::string, std::string> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (Trim(line).empty() || line[0] == '#') continue;
    const std::vector<std::string> f = SplitTabs(line);
    Require(f.size() == 2 && !Trim(f[0]).empty() && !Trim(f[1]).empty(), ErrorCode::kData, path, ":",
            line_no, ": expected <class>\\t<", what, ">");
    out[Trim(f[0])] = Trim(f[1]);
  }
  return out;
}

std::vector<CorpusEntry> ScanClassTree(const std::string &root, const std::string &ontology_path,
                                       const std::string &harmonicity_path) {
  const auto ontology = LoadLookup(ontology_path, "ontology");
  const auto harmonicity = LoadLookup(harmonicity_path, "harmonicity");
  Require(fs::is_directory(root), ErrorCode::kIo, "not a directory: '", root, "'");
  std::vector<fs::path> files;
  for (const auto &item : fs::recursive_directory_iterator(root))
    if (item.is_regular_file() && item.path().extension() == ".wav") files.push_back(item.path());
  std::sort(files.begin(), files.end());
  std::vector<CorpusEntry> entries;
  for (const fs::path &f : files) {
    const fs::path rel = fs::relative(f, root);
    Require(std::distance(rel.begin(), rel.end()) == 2, ErrorCode::kData, "expected <class>/<clip>.wav, got '",
            rel.string(), "'");
    entries.push_back(MakeEntry(f.string(), rel.string(), rel.begin()->string(), ontology, harmonicity));
  }
  Require(!entries.empty(), ErrorCode::kData, "no .wav files under '", root, "'");
  return entries;
}

std::vector<CorpusEntry> ScanFsd50k(const std::string &root, const std::string &ontology_path,
                                    const std::string &harmonicity_path) {
  const auto ontology = LoadLookup(ontology_path, "ontology");
  const auto harmonicity = LoadLookup(harmonicity_path, "harmonicity");
  const fs::path csv = fs::path(root) / "FSD50K.ground_truth" / "dev.csv";
  std::ifstream in(csv);
  Require(static_cast<bool>(in), ErrorCode::kIo, "cannot open '", csv.string(), "'");
  std::string line;
  Require(static_cast<bool>(std::getline(in, line)), ErrorCode::kData, "empty '", csv.string(), "'");
  const std::vector<std::string> header = SplitCsv(line);
  const auto col = [&](const char *name) {
    const auto it = std::find(header.begin(), header.end(), name);
    Require(it != header.end(), ErrorCode::kData, csv.string(), ": missing column '", name, "'");
    return static_cast<std::size_t>(it - header.begin());
  };
  const std::size_t fname_col = col("fname"), labels_col = col("labels");
  std::vector<CorpusEntry> entries;
  while (std::getline(in, line)) {
    if (Trim(line).empty()) continue;
    const std::vector<std::string> f = SplitCsv(line);
    if (f.size() <= std::max(fname_col, labels_col)) continue;
    const std::string &labels = f[labels_col];
    if (labels.find(',') != std::string::npos || !ontology.count(labels)) continue;
    const std::string rel = "FSD50K.dev_audio/" + f[fname_col] + ".wav";
    entries.push_back(MakeEntry((fs::path(root) / rel).string(), rel, labels, ontology, harmonicity));
  }
  Require(!entries.empty(), ErrorCode::kData, "no single-label clips of ontology classes in '", csv.string(), "'");
  return entries;
}

}  // namespace octsep
