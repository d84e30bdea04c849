// config/config.h

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

#ifndef OCTSEP_CONFIG_CONFIG_H_
#define OCTSEP_CONFIG_CONFIG_H_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace octsep {

struct ConfigKey {
  const char *key;
  const char *default_value;
  const char *doc;
};

// Flat "key = value" configuration. Every key must appear in Schema(); the
// file format allows blank lines and '#' comments.
class Config {
 public:
  static const std::vector<ConfigKey> &Schema();

  Config();  // all defaults

  void LoadFile(const std::string &path);
  void Parse(const std::string &text, const std::string &origin = "<string>");
  void Set(const std::string &key, const std::string &value);
  // Environment overrides: OCTSEP_CORPUS_ROOT sets corpus.manifest to
  // <root>/manifest.tsv, OCTSEP_OUT_DIR sets out.dir, OCTSEP_FSD50K_ROOT
  // sets corpus.fsd50k_root.
  void ApplyEnvironment();

  bool Has(const std::string &key) const;
  const std::string &Get(const std::string &key) const;
  std::string GetString(const std::string &key) const { return Get(key); }
  double GetDouble(const std::string &key) const;
  long long GetInt(const std::string &key) const;
  std::uint64_t GetUint64(const std::string &key) const;
  bool GetBool(const std::string &key) const;

  // Sorted "key = value" lines; the hash covers this text.
  std::string Dump() const;
  std::uint64_t Hash() const;
  const std::map<std::string, std::string> &values() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

}  // namespace octsep

#endif  // OCTSEP_CONFIG_CONFIG_H_
