// trainer/model.cc

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

#include "trainer/model.h"

#include <cmath>

namespace octsep {

void ModelConfig::Validate() const {
  separator.Validate();
  if (use_refiner) {
    refiner.Validate();
    Require(refiner.condition_dim == separator.condition_dim, ErrorCode::kConfig,
            "refiner condition_dim must equal the separator condition_dim");
  }
}

Model::Model(const ModelConfig &config)
    : config_(config),
      separator_(config.separator),
      encoder_(config.separator.condition_dim, MakeTextEmbedder(config.text)) {
  config_.Validate();
  if (config_.use_refiner) refiner_.emplace(config_.refiner);
}

void Model::Init(std::uint64_t seed) {
  Rng sep_rng(DeriveSeed({seed, 0x5e9}));
  separator_.Init(sep_rng);
  Rng enc_rng(DeriveSeed({seed, 0xc0d}));
  encoder_.Init(enc_rng);
  if (refiner_) {
    Rng ref_rng(DeriveSeed({seed, 0x4ef}));
    refiner_->Init(ref_rng, config_.refiner_init);
  }
  ZeroGrad();
}

void Model::Visit(const nn::ParamVisitor<Real> &fn) {
  separator_.Visit("separator/", fn);
  encoder_.Visit("condition/", fn);
  if (refiner_) refiner_->Visit("refiner/", fn);
}

void Model::ZeroGrad() {
  Visit([](const std::string &, nn::Param<Real> &p) { p.ZeroGrad(); });
}

double Model::GradNorm() {
  double sq = 0.0;
  Visit([&](const std::string &, nn::Param<Real> &p) { sq += p.grad.template cast<double>().squaredNorm(); });
  return std::sqrt(sq);
}

void Model::ScaleGrad(double s) {
  Visit([&](const std::string &, nn::Param<Real> &p) { p.grad *= static_cast<Real>(s); });
}

bool Model::AllFinite() {
  bool ok = true;
  Visit([&](const std::string &, nn::Param<Real> &p) { ok = ok && p.value.allFinite(); });
  return ok;
}

std::int64_t Model::NumParams() {
  std::int64_t n = 0;
  Visit([&](const std::string &, nn::Param<Real> &p) { n += p.size(); });
  return n;
}

SeparatorOutput<Model::Real> Model::Separate(std::span<const Real> mixture, const Condition &condition,
                                             bool refine) const {
  nn::Vec<Real> c = encoder_.Encode(condition);
  if (refiner_ && refine) c = refiner_->Refine(mixture, c);
  return separator_.Forward(mixture, c, nullptr);
}

SeparatorOutput<Model::Real> Model::SeparateUnconditioned(std::span<const Real> mixture) const {
  return separator_.Forward(mixture, encoder_.Null(), nullptr);
}

}  // namespace octsep
