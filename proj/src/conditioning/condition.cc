// conditioning/condition.cc

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

#include "conditioning/condition.h"

#include <algorithm>
#include <cmath>

namespace octsep {

const char *ConditionTypeName(ConditionType type) {
  switch (type) {
    case ConditionType::kEnergy: return "energy";
    case ConditionType::kHarmonicity: return "harmonicity";
    case ConditionType::kOrder: return "order";
    case ConditionType::kText: return "text";
  }
  return "unknown";
}

ConditionType ParseConditionType(std::string_view name) {
  for (ConditionType t : kAllConditionTypes)
    if (name == ConditionTypeName(t)) return t;
  Fail(ErrorCode::kInvalidArgument, "unknown condition type: ", name);
}

std::string Condition::ToString() const {
  return std::string(ConditionTypeName(type)) + ":" + value;
}

int DiscreteIndex(const Condition &c) {
  Require(c.type != ConditionType::kText, ErrorCode::kInvalidArgument,
          "text condition has no discrete index");
  const std::string token = c.ToString();
  for (std::size_t i = 0; i < kDiscreteVocabulary.size(); ++i)
    if (kDiscreteVocabulary[i] == token) return static_cast<int>(i);
  Fail(ErrorCode::kInvalidArgument, "unknown discrete condition token: ", token);
}

void ValidateCondition(const Condition &c) {
  if (c.type == ConditionType::kText)
    Require(!c.value.empty(), ErrorCode::kInvalidArgument, "empty text condition");
  else
    DiscreteIndex(c);
}

ConditionAnnotation Annotate(const std::vector<Waveform> &sources, const std::vector<double> &gains,
                             const std::vector<SourceMetadata> &metadata,
                             const std::vector<double> &onsets_s, const AnnotateOptions &opts) {
  Require(sources.size() == 2 && gains.size() == 2 && metadata.size() == 2 && onsets_s.size() == 2,
          ErrorCode::kInvalidArgument, "annotate: exactly two sources are supported");
  for (int i = 0; i < 2; ++i) {
    const SourceMetadata &m = metadata[i];
    Require(!m.class_name.empty(), ErrorCode::kData, "annotate: source ", i, " has no class name");
    Require(!m.super_class.empty(), ErrorCode::kData, "annotate: source ", i, " has no super-class");
    Require(m.harmonicity == "harmonic" || m.harmonicity == "percussive", ErrorCode::kData,
            "annotate: source ", i, " has no harmonicity tag");
  }
  ConditionAnnotation a;
  for (int i = 0; i < 2; ++i) {
    a.energies[i] = gains[i] * gains[i] * Energy(sources[i]);
    a.onsets_s[i] = onsets_s[i];
  }
  const int high = a.energies[0] >= a.energies[1] ? 0 : 1;
  const int first = onsets_s[0] <= onsets_s[1] ? 0 : 1;
  for (int i = 0; i < 2; ++i) {
    SourceConditions &s = a.sources[i];
    s.energy = i == high ? "high" : "low";
    s.order = i == first ? "first" : "second";
    s.harmonicity = metadata[i].harmonicity;
    s.text = metadata[i].description.empty() ? metadata[i].class_name : metadata[i].description;
  }
  a.valid[Index(ConditionType::kEnergy)] = true;
  a.valid[Index(ConditionType::kHarmonicity)] = metadata[0].harmonicity != metadata[1].harmonicity;
  a.valid[Index(ConditionType::kOrder)] =
      std::abs(onsets_s[0] - onsets_s[1]) >= opts.min_onset_gap_s;
  a.valid[Index(ConditionType::kText)] = true;
  return a;
}

Condition ConditionFor(const ConditionAnnotation &a, int target, ConditionType type) {
  Require(target == 0 || target == 1, ErrorCode::kInvalidArgument, "target index must be 0 or 1");
  const SourceConditions &s = a.sources[target];
  switch (type) {
    case ConditionType::kEnergy: return {type, s.energy};
    case ConditionType::kHarmonicity: return {type, s.harmonicity};
    case ConditionType::kOrder: return {type, s.order};
    case ConditionType::kText: return {type, s.text};
  }
  Fail(ErrorCode::kInternal, "bad condition type");
}

std::vector<Condition> EquivalentConditions(const ConditionAnnotation &a, int target) {
  std::vector<Condition> out;
  for (ConditionType t : kAllConditionTypes)
    if (a.IsValid(t)) out.push_back(ConditionFor(a, target, t));
  return out;
}

}  // namespace octsep
