// eval/evaluate.h

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

#ifndef OCTSEP_EVAL_EVALUATE_H_
#define OCTSEP_EVAL_EVALUATE_H_

#include <array>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"
#include "trainer/model.h"
#include "trainer/regimes.h"

namespace octsep {

// Read-only separation interface, so protocols can be exercised with stubs.
class SeparationModel {
 public:
  virtual ~SeparationModel() = default;
  virtual SeparatorOutput<float> Separate(std::span<const float> mixture, const Condition &c) const = 0;
  virtual SeparatorOutput<float> SeparateUnconditioned(std::span<const float> mixture) const = 0;
};

class ModelSeparation : public SeparationModel {
 public:
  explicit ModelSeparation(const Model &model) : model_(model) {}
  SeparatorOutput<float> Separate(std::span<const float> mixture, const Condition &c) const override {
    return model_.Separate(mixture, c);
  }
  SeparatorOutput<float> SeparateUnconditioned(std::span<const float> mixture) const override {
    return model_.SeparateUnconditioned(mixture);
  }

 private:
  const Model &model_;
};

struct TestSet {
  std::size_t size = 0;
  std::uint64_t seed = 0;
  std::function<TrainExample(std::size_t)> get;
};

TestSet MakeTestSet(const DatasetStream &stream);
TestSet MakeTestSet(std::vector<TrainExample> examples, std::uint64_t seed = 0);

struct TargetScore {
  std::string condition;  // condition type used; "pit" for the PIT oracle
  std::string value;      // condition value; empty for the PIT oracle
  bool valid = true;      // false when the requested type is invalid for the mixture
  double si_sdr = 0.0;
  double si_sdri = 0.0;
  double mixture_si_sdr = 0.0;
};

// Both targets of one test mixture; targets[k] scores source k.
struct MixtureRecord {
  std::size_t index = 0;
  std::uint64_t seed = 0;
  std::array<std::string, 2> classes;
  std::array<TargetScore, 2> targets;
};

struct Stats {
  std::size_t count = 0;
  double mean = 0.0;
  double median = 0.0;
  double std = 0.0;  // population
};

Stats ComputeStats(std::vector<double> values);

// Aggregates keyed "<metric>/<group>": metric si_sdr or si_sdri; group
// "all", "valid" or "type:<condition>" (valid pairs scored with that type).
std::map<std::string, Stats> Aggregate(const std::vector<MixtureRecord> &records);

struct EvalReport {
  std::string protocol;  // condition, ensemble, oracle-oct, pit-oracle
  std::string condition; // condition protocol only
  nlohmann::json metadata = nlohmann::json::object();
  std::vector<MixtureRecord> records;

  std::size_t skipped_mixtures() const;  // mixtures with an invalid requested condition
  std::map<std::string, Stats> aggregates() const { return Aggregate(records); }
};

nlohmann::json RecordToJson(const MixtureRecord &r);
MixtureRecord RecordFromJson(const nlohmann::json &j);

// Protocols. `threads` <= 0 uses the hardware concurrency.
EvalReport EvaluateCondition(const SeparationModel &model, const TestSet &test, ConditionType type, int threads = 0);
EvalReport EvaluateOracleEnsemble(const std::map<ConditionType, const SeparationModel *> &models, const TestSet &test,
                                  int threads = 0);
EvalReport EvaluateOracleOct(const SeparationModel &model, const TestSet &test, int threads = 0);
EvalReport EvaluatePitOracle(const SeparationModel &model, const TestSet &test, int threads = 0);

}  // namespace octsep

#endif  // OCTSEP_EVAL_EVALUATE_H_
