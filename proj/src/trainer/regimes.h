// trainer/regimes.h

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

#ifndef OCTSEP_TRAINER_REGIMES_H_
#define OCTSEP_TRAINER_REGIMES_H_

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "mixgen/mixture.h"
#include "trainer/model.h"

namespace octsep {

enum class Regime { kPit, kHct, kOct, kOctpp, kSingle };

struct RegimeSpec {
  Regime regime = Regime::kOct;
  ConditionType single_type = ConditionType::kText;  // kSingle only

  static RegimeSpec Parse(const std::string &s);  // pit|hct|oct|octpp|single:<type>
  std::string ToString() const;
  bool operator==(const RegimeSpec &) const = default;
};

// One training mixture with its randomly drawn target.
struct TrainExample {
  std::vector<float> mixture;
  std::array<std::vector<float>, 2> sources;
  ConditionAnnotation annotation;
  int target = 0;
  std::uint64_t seed = 0;

  const std::vector<float> &target_source() const { return sources[target]; }
  const std::vector<float> &other_source() const { return sources[1 - target]; }
};

// The target index comes from a stream derived from the sample seed, so it
// does not depend on the regime.
TrainExample MakeTrainExample(const MixtureSample &sample);
std::vector<float> ToFloat(const std::vector<double> &x);

struct LossTerms {
  double total = 0.0;
  double target = 0.0;  // D(est_T, s_T)
  double other = 0.0;   // D(est_O, s_O)
};

struct HctForward {
  SeparatorOutput<float> output;
  Separator<float>::Cache cache;
  LossTerms terms;
};

// D(est_T, s_T) + D(est_O, s_O) for the condition vector c.
HctForward HctLoss(const Separator<float> &sep, const TrainExample &ex, const nn::Vec<float> &c,
                   bool keep_cache);
// Backpropagates scale * loss; returns d(scale * loss) / dc.
nn::Vec<float> HctBackward(Separator<float> &sep, const TrainExample &ex, const HctForward &fwd, double scale);

struct CandidateLoss {
  Condition condition;
  double loss = 0.0;
};

// Index of the first minimum; candidate order encodes the type tie-break.
int ArgminLoss(const std::vector<CandidateLoss> &table);

struct Selection {
  int index = -1;
  std::vector<CandidateLoss> table;
  HctForward winner;  // forward pass of the selected candidate, cache kept
};

// Evaluates every candidate and returns the first minimum in candidate
// order. Throws kInvalidArgument on an empty set.
Selection SelectOptimalCondition(const Separator<float> &sep, const TrainExample &ex,
                                 const std::vector<Condition> &candidates,
                                 const std::vector<nn::Vec<float>> &vectors);

struct RegimeOptions {
  RegimeSpec regime;
  std::array<double, kNumConditionTypes> prior{1.0, 1.0, 1.0, 1.0};
  std::array<bool, kNumConditionTypes> candidate_types{true, true, true, true};
  std::optional<ConditionType> anchor;
  double reg_weight = 1.0;
  bool stop_gradient_target = false;

  static std::array<double, kNumConditionTypes> ParsePrior(const std::string &s);
  static std::array<bool, kNumConditionTypes> ParseTypeSet(const std::string &s);
  static std::optional<ConditionType> ParseAnchor(const std::string &s);
};

struct SampleReport {
  bool skipped = false;
  std::optional<Condition> input;        // hct / single / octpp input condition
  std::vector<CandidateLoss> table;      // oct / octpp sweep
  int selected = -1;
  double loss = 0.0;                     // everything backpropagated for this sample
  LossTerms terms;                       // of the primary term
  std::optional<double> anchor_loss;     // oct anchor term
  std::optional<double> input_loss;      // octpp L(r(x,c))
  std::optional<double> consistency;     // octpp ||r(x,c) - r(x,c*)||^2
  std::array<int, 2> permutation{0, 1};  // pit
};

// Draws a condition type from the prior restricted to the valid types.
std::optional<ConditionType> SampleConditionType(const ConditionAnnotation &a,
                                                 const std::array<double, kNumConditionTypes> &prior, Rng &rng);

// Runs one sample of the configured regime and accumulates scale times its
// parameter gradients into the model.
SampleReport TrainSample(Model &model, const TrainExample &ex, const RegimeOptions &opts, double scale);

}  // namespace octsep

#endif  // OCTSEP_TRAINER_REGIMES_H_
