// trainer/trainer.h

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

#ifndef OCTSEP_TRAINER_TRAINER_H_
#define OCTSEP_TRAINER_TRAINER_H_

#include <functional>
#include <memory>
#include <ostream>
#include <string>
#include <vector>

#include "config/config.h"
#include "json.hpp"
#include "nn/adam.h"
#include "trainer/checkpoint.h"
#include "trainer/regimes.h"
#include "trainer/setup.h"

namespace octsep {

inline constexpr const char *kMetricsSchema = "octsep.metrics.v1";

struct TrainOptions {
  int batch_size = 6;
  double lr = 1e-3;
  int lr_halving_epochs = 15;
  int epochs = 10;
  long long batches_per_epoch = 0;  // 0: whole epoch
  double grad_clip = 5.0;           // 0: disabled
  bool validate = true;
  bool resume = false;
  std::uint64_t seed = 1;

  static TrainOptions FromConfig(const Config &config);
};

// Step schedule: base * 2^-floor(epoch / halving_epochs).
double LearningRate(double base, int halving_epochs, int epoch);

struct StepReport {
  long long step = 0;  // optimizer updates so far, this one included
  int epoch = 0;
  double lr = 0.0;
  double grad_norm = 0.0;  // before clipping
  double loss = 0.0;       // mean over trained samples
  int trained = 0;
  int skipped = 0;
  std::vector<SampleReport> samples;
  std::array<int, kNumConditionTypes> selected_counts{};
  std::array<int, 2> permutation_counts{};  // identity, swapped

  nlohmann::json ToJson(const RegimeSpec &regime) const;
};

class Trainer {
 public:
  Trainer(Model *model, RegimeOptions regime, TrainOptions opts);

  // One optimizer update on the batch at the epoch's learning rate. Throws
  // kNumeric, naming the sample seeds, on a non-finite loss or gradient.
  StepReport Step(const std::vector<TrainExample> &batch, int epoch);

  Model &model() { return *model_; }
  nn::Adam<float> &optimizer() { return adam_; }
  const RegimeOptions &regime() const { return regime_; }
  const TrainOptions &options() const { return opts_; }

 private:
  Model *model_;
  RegimeOptions regime_;
  TrainOptions opts_;
  nn::Adam<float> adam_;
};

struct ValidationResult {
  double si_sdr = 0.0;   // mean over (mixture, target) pairs
  double si_sdri = 0.0;
  std::size_t pairs = 0;
};

// Conditioned models are scored with the text condition for both targets;
// PIT models with the better slot assignment.
ValidationResult Validate(const Model &model, const std::vector<TrainExample> &examples, const RegimeSpec &regime);

std::vector<TrainExample> MaterializeSplit(const DatasetStream &stream, std::size_t epoch = 0);

struct TrainResult {
  std::string best_checkpoint;
  std::string last_checkpoint;
  std::string metrics_path;
  int epochs_completed = 0;
  double best_validation = 0.0;
};

// Runs (or resumes) the configured experiment under out.dir: metrics.jsonl,
// last.ckpt and best.ckpt. Progress lines go to `log` when given.
TrainResult RunTraining(const Config &config, std::shared_ptr<const ClipStore> clips, std::ostream *log = nullptr);

struct LoadedModel {
  Config config;
  std::unique_ptr<Model> model;
  nlohmann::json header;
};

// Rebuilds the model recorded in a checkpoint's config echo.
LoadedModel LoadModel(const std::string &checkpoint_path);

// Keys whose values fix the parameter layout; resume requires them equal.
std::uint64_t ModelLayoutHash(const Config &config);

}  // namespace octsep

#endif  // OCTSEP_TRAINER_TRAINER_H_
