// trainer/model.h

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

#ifndef OCTSEP_TRAINER_MODEL_H_
#define OCTSEP_TRAINER_MODEL_H_

#include <memory>
#include <optional>
#include <string>

#include "conditioning/condition_encoder.h"
#include "conditioning/text_embed.h"
#include "refine/refiner.h"
#include "separator/separator.h"

namespace octsep {

struct ModelConfig {
  SeparatorConfig separator;
  TextEmbedderConfig text;
  bool use_refiner = false;
  RefinerConfig refiner;
  RefinerInit refiner_init = RefinerInit::kPassThrough;

  void Validate() const;
};

// Separator, condition encoder and (for OCT++) refiner, trained in float.
// Parameter names are namespaced "separator/", "condition/" and "refiner/".
class Model {
 public:
  using Real = float;

  explicit Model(const ModelConfig &config);

  const ModelConfig &config() const { return config_; }
  void Init(std::uint64_t seed);

  Separator<Real> &separator() { return separator_; }
  const Separator<Real> &separator() const { return separator_; }
  ConditionEncoder<Real> &encoder() { return encoder_; }
  const ConditionEncoder<Real> &encoder() const { return encoder_; }
  bool has_refiner() const { return refiner_.has_value(); }
  Refiner<Real> &refiner() { return *refiner_; }
  const Refiner<Real> &refiner() const { return *refiner_; }

  // Visits every parameter; the refiner namespace only when present.
  void Visit(const nn::ParamVisitor<Real> &fn);
  void ZeroGrad();
  double GradNorm();
  void ScaleGrad(double s);
  bool AllFinite();
  std::int64_t NumParams();

  // Evaluation-mode separation for one condition. Applies the refiner when
  // present and `refine` is set.
  SeparatorOutput<Real> Separate(std::span<const Real> mixture, const Condition &condition,
                                 bool refine = true) const;
  SeparatorOutput<Real> SeparateUnconditioned(std::span<const Real> mixture) const;

 private:
  ModelConfig config_;
  Separator<Real> separator_;
  ConditionEncoder<Real> encoder_;
  std::optional<Refiner<Real>> refiner_;
};

}  // namespace octsep

#endif  // OCTSEP_TRAINER_MODEL_H_
