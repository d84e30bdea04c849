// conditioning/condition.h

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

#ifndef OCTSEP_CONDITIONING_CONDITION_H_
#define OCTSEP_CONDITIONING_CONDITION_H_

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "signal/waveform.h"

namespace octsep {

// The declaration order is also the tie-break order of the optimal-condition
// search.
enum class ConditionType { kEnergy = 0, kHarmonicity = 1, kOrder = 2, kText = 3 };

inline constexpr int kNumConditionTypes = 4;
inline constexpr std::array<ConditionType, kNumConditionTypes> kAllConditionTypes = {
    ConditionType::kEnergy, ConditionType::kHarmonicity, ConditionType::kOrder,
    ConditionType::kText};

const char *ConditionTypeName(ConditionType type);
ConditionType ParseConditionType(std::string_view name);
inline int Index(ConditionType t) { return static_cast<int>(t); }

// A semantic query: a discrete token for energy/harmonicity/order, or a
// free-text class description.
struct Condition {
  ConditionType type = ConditionType::kText;
  std::string value;

  bool operator==(const Condition &) const = default;
  std::string ToString() const;  // "energy:high", "text:Guitar"
};

// Discrete vocabulary shared by all one-hot queries. Index in this table is
// the one-hot position.
inline constexpr std::array<std::string_view, 6> kDiscreteVocabulary = {
    "energy:high",   "energy:low",  "harmonicity:harmonic", "harmonicity:percussive",
    "order:first",   "order:second"};

// Throws kInvalidArgument for text conditions and unknown tokens.
int DiscreteIndex(const Condition &c);
void ValidateCondition(const Condition &c);

// Per-source semantic tags.
struct SourceMetadata {
  std::string class_name;
  std::string super_class;
  std::string harmonicity;  // "harmonic" | "percussive"
  std::string description;  // text query; defaults to class_name when empty
};

struct SourceConditions {
  std::string energy;       // high | low
  std::string harmonicity;  // harmonic | percussive
  std::string order;        // first | second
  std::string text;
};

struct ConditionAnnotation {
  std::array<SourceConditions, 2> sources;
  std::array<bool, kNumConditionTypes> valid{};
  std::array<double, 2> energies{};  // post-gain
  std::array<double, 2> onsets_s{};

  bool IsValid(ConditionType t) const { return valid[Index(t)]; }
};

struct AnnotateOptions {
  double min_onset_gap_s = 0.05;
};

// Two-source annotation. Energy compares post-gain energies (ties make the
// lower index "high"); order compares onsets and is invalid when they are
// closer than min_onset_gap_s; harmonicity is invalid when both sources carry
// the same tag; text is always valid.
ConditionAnnotation Annotate(const std::vector<Waveform> &sources, const std::vector<double> &gains,
                             const std::vector<SourceMetadata> &metadata,
                             const std::vector<double> &onsets_s,
                             const AnnotateOptions &opts = {});

// Condition of the given type describing the target source, whether or not
// the type is valid for this mixture.
Condition ConditionFor(const ConditionAnnotation &a, int target, ConditionType type);

// One condition per valid type, in kAllConditionTypes order.
std::vector<Condition> EquivalentConditions(const ConditionAnnotation &a, int target);

}  // namespace octsep

#endif  // OCTSEP_CONDITIONING_CONDITION_H_
