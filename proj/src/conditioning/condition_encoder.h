// conditioning/condition_encoder.h

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

#ifndef OCTSEP_CONDITIONING_CONDITION_ENCODER_H_
#define OCTSEP_CONDITIONING_CONDITION_ENCODER_H_

#include <memory>
#include <string>

#include "conditioning/condition.h"
#include "conditioning/text_embed.h"
#include "nn/layers.h"

namespace octsep {

// Maps any Condition into the shared d_c-dimensional space consumed by the
// separator and the refiner:
//   discrete -> one-hot over kDiscreteVocabulary -> learned linear map
//   text     -> text embedding -> learned linear map
// plus a learned null vector for unconditioned (permutation-invariant) use.
template <typename T>
class ConditionEncoder {
 public:
  ConditionEncoder(int condition_dim, std::shared_ptr<const TextEmbedder> text)
      : text_(std::move(text)),
        discrete_(condition_dim, static_cast<int>(kDiscreteVocabulary.size())),
        text_proj_(text_->dim(), condition_dim),
        null_(condition_dim, 1) {
    Require(condition_dim > 0, ErrorCode::kConfig, "condition_dim must be positive");
  }

  int dim() const { return static_cast<int>(null_.value.rows()); }
  const TextEmbedder &text_embedder() const { return *text_; }

  void Init(Rng &rng) {
    nn::FillGaussian(discrete_.value, rng, 1.0);
    // Unit-norm text features: unit-variance weights give unit-variance
    // outputs, matching the discrete embedding scale.
    nn::FillGaussian(text_proj_.w.value, rng, 1.0);
    text_proj_.b.value.setZero();
    nn::FillGaussian(null_.value, rng, 1.0);
  }

  nn::Vec<T> Encode(const Condition &c) const {
    ValidateCondition(c);
    if (c.type != ConditionType::kText) return discrete_.value.col(DiscreteIndex(c));
    return text_proj_.Forward(TextFeatures(c.value)).col(0);
  }

  nn::Vec<T> Null() const { return null_.value.col(0); }

  void Backward(const Condition &c, const nn::Vec<T> &dc) {
    if (c.type != ConditionType::kText) {
      discrete_.grad.col(DiscreteIndex(c)) += dc;
      return;
    }
    const nn::Mat<T> dcm = dc;
    text_proj_.Backward(TextFeatures(c.value), dcm);
  }

  void BackwardNull(const nn::Vec<T> &dc) { null_.grad.col(0) += dc; }

  void Visit(const std::string &prefix, const nn::ParamVisitor<T> &fn) {
    fn(prefix + "discrete", discrete_);
    text_proj_.Visit(prefix + "text_proj.", fn);
    fn(prefix + "null", null_);
  }

 private:
  nn::Mat<T> TextFeatures(const std::string &text) const {
    const std::vector<double> e = text_->Embed(text);
    nn::Mat<T> m(static_cast<Eigen::Index>(e.size()), 1);
    for (std::size_t i = 0; i < e.size(); ++i) m(static_cast<Eigen::Index>(i), 0) = static_cast<T>(e[i]);
    return m;
  }

  std::shared_ptr<const TextEmbedder> text_;
  nn::Param<T> discrete_;
  nn::Dense<T> text_proj_;
  nn::Param<T> null_;
};

}  // namespace octsep

#endif  // OCTSEP_CONDITIONING_CONDITION_ENCODER_H_
