// mixgen/corpus.h

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

#ifndef OCTSEP_MIXGEN_CORPUS_H_
#define OCTSEP_MIXGEN_CORPUS_H_

#include <map>
#include <string>
#include <vector>

#include "conditioning/condition.h"

namespace octsep {

struct CorpusEntry {
  std::string path;  // as written in the manifest; relative paths resolve against root
  std::string class_name;
  std::string super_class;
  std::string harmonicity;  // harmonic | percussive
  double duration_s = 0.0;
  int sample_rate = 0;

  SourceMetadata Metadata() const { return {class_name, super_class, harmonicity, class_name}; }
};

// Immutable after construction. Classes are kept in sorted order so that
// indices do not depend on manifest row order.
class Corpus {
 public:
  Corpus() = default;
  // Validates entries; throws kData naming the offending entry.
  Corpus(std::vector<CorpusEntry> entries, std::string root);

  const std::vector<CorpusEntry> &entries() const { return entries_; }
  const std::string &root() const { return root_; }
  std::string ResolvePath(const CorpusEntry &e) const;

  const std::vector<std::string> &classes() const { return classes_; }
  const std::string &SuperClassOf(int class_index) const;
  // Entry indices of one class, in manifest order.
  const std::vector<int> &ClipsOf(int class_index) const { return clips_[class_index]; }
  int ClassIndex(const std::string &name) const;
  std::vector<std::string> SuperClasses() const;

 private:
  std::vector<CorpusEntry> entries_;
  std::string root_;
  std::vector<std::string> classes_;
  std::vector<std::string> class_super_;
  std::vector<std::vector<int>> clips_;
  std::map<std::string, int> class_index_;
};

inline constexpr const char *kManifestHeader = "# octsep manifest v1";

// Tab-separated, one header comment line then one row per clip with columns
// path, class, super_class, harmonicity, duration_s, sample_rate. Lines
// starting with '#' are comments. Relative paths resolve against the
// manifest's directory.
Corpus LoadManifest(const std::string &path);
void SaveManifest(const std::string &path, const std::vector<CorpusEntry> &entries);

// Two-column tab-separated lookup files: class -> super-class and
// class -> harmonicity tag.
std::map<std::string, std::string> LoadLookup(const std::string &path, const char *what);

// Builds manifest rows from a <root>/<class>/<clip>.wav tree. Classes missing
// from either lookup are rejected.
std::vector<CorpusEntry> ScanClassTree(const std::string &root, const std::string &ontology_path,
                                       const std::string &harmonicity_path);

// FSD50K-style adapter: reads <root>/FSD50K.ground_truth/dev.csv and keeps
// single-label clips whose label is listed in the ontology lookup.
std::vector<CorpusEntry> ScanFsd50k(const std::string &root, const std::string &ontology_path,
                                    const std::string &harmonicity_path);

}  // namespace octsep

#endif  // OCTSEP_MIXGEN_CORPUS_H_
