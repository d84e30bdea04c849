// refine/refiner.cc

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

#include "refine/refiner.h"

#include <algorithm>

namespace octsep {

void RefinerConfig::Validate() const {
  Require(channels > 0 && enc_kernel > 0 && enc_stride > 0, ErrorCode::kConfig,
          "refiner: encoder sizes must be positive");
  Require(stages >= 0 && stage_stride >= 1, ErrorCode::kConfig, "refiner: bad stage layout");
  Require(heads >= 1 && mixture_dim % heads == 0, ErrorCode::kConfig,
          "refiner: mixture_dim must be divisible by heads");
  Require(condition_dim > 0, ErrorCode::kConfig, "refiner: condition_dim must be positive");
  Require(hidden >= 2 * condition_dim, ErrorCode::kConfig,
          "refiner: hidden width must be at least 2 * condition_dim for pass-through init");
}

template <typename T>
Refiner<T>::Refiner(const RefinerConfig &config)
    : config_(config),
      encoder_(config.channels, config.enc_kernel, config.enc_stride),
      proj_(config.channels, config.channels),
      act_(config.channels),
      pool_(config.channels, config.mixture_dim, config.heads),
      mlp_(config.mixture_dim + config.condition_dim, config.hidden, config.condition_dim) {
  config.Validate();
  for (int s = 0; s < config.stages; ++s)
    stages_.emplace_back(config.channels, 2 * config.stage_stride + 1, config.stage_stride);
}

template <typename T>
void Refiner<T>::Init(Rng &rng, RefinerInit mode) {
  encoder_.InitUniform(rng);
  proj_.InitUniform(rng);
  for (auto &s : stages_) s.InitUniform(rng);
  pool_.InitUniform(rng);
  mlp_.l1.InitUniform(rng);
  mlp_.l2.InitUniform(rng);
  if (mode == RefinerInit::kRandom) return;
  // hidden[0:d] = relu(c), hidden[d:2d] = relu(-c), output = relu(c) - relu(-c).
  // Remaining hidden units stay random on the input side but have zero
  // outgoing weights.
  const int d = config_.condition_dim, m = config_.mixture_dim;
  auto &w1 = mlp_.l1.w.value;
  w1.topRows(2 * d).setZero();
  for (int i = 0; i < d; ++i) {
    w1(i, m + i) = T(1);
    w1(d + i, m + i) = T(-1);
  }
  mlp_.l1.b.value.topRows(2 * d).setZero();
  auto &w2 = mlp_.l2.w.value;
  w2.setZero();
  for (int i = 0; i < d; ++i) {
    w2(i, i) = T(1);
    w2(i, d + i) = T(-1);
  }
  mlp_.l2.b.value.setZero();
}

template <typename T>
nn::Vec<T> Refiner<T>::EncodeMixture(std::span<const T> mixture, MixtureCache *cache) const {
  Require(!mixture.empty(), ErrorCode::kInvalidArgument, "refiner: empty mixture");
  for (T v : mixture)
    Require(std::isfinite(v), ErrorCode::kInvalidArgument, "refiner: non-finite input");
  const auto n = static_cast<Eigen::Index>(mixture.size());
  std::vector<T> padded(static_cast<std::size_t>(encoder_.PaddedLen(n)), T(0));
  std::copy(mixture.begin(), mixture.end(), padded.begin());
  nn::Mat<T> enc_pre = encoder_.Forward(padded);
  nn::Mat<T> enc = nn::Relu(enc_pre);
  nn::Mat<T> proj_pre = proj_.Forward(enc);
  std::vector<nn::Mat<T>> maps;
  maps.push_back(act_.Forward(proj_pre));
  for (const auto &s : stages_) maps.push_back(s.Forward(maps.back()));
  typename nn::AttentionPool<T>::Cache pool;
  nn::Vec<T> phi = pool_.Forward(maps.back(), cache ? &pool : nullptr);
  if (cache) {
    cache->length = mixture.size();
    cache->padded = std::move(padded);
    cache->enc_pre = std::move(enc_pre);
    cache->enc = std::move(enc);
    cache->proj_pre = std::move(proj_pre);
    cache->stages = std::move(maps);
    cache->pool = std::move(pool);
  }
  return phi;
}

template <typename T>
std::vector<T> Refiner<T>::EncodeMixtureBackward(const MixtureCache &cache, const nn::Vec<T> &d_phi,
                                                 bool want_dx) {
  nn::Mat<T> g = pool_.Backward(cache.stages.back(), cache.pool, d_phi);
  for (std::size_t s = stages_.size(); s-- > 0;) g = stages_[s].Backward(cache.stages[s], g);
  g = act_.Backward(cache.proj_pre, g);
  g = proj_.Backward(cache.enc, g);
  g = nn::ReluBackward(cache.enc_pre, g);
  std::vector<T> dx;
  if (want_dx) dx.assign(cache.padded.size(), T(0));
  encoder_.Backward(cache.padded, g, dx);
  if (want_dx) dx.resize(cache.length);
  return dx;
}

template <typename T>
nn::Vec<T> Refiner<T>::RefineEncoded(const nn::Vec<T> &phi, const nn::Vec<T> &condition,
                                     RefineCache *cache) const {
  Require(phi.size() == config_.mixture_dim && condition.size() == config_.condition_dim,
          ErrorCode::kInvalidArgument, "refiner: dimension mismatch");
  nn::Vec<T> in(phi.size() + condition.size());
  in << phi, condition;
  return mlp_.Forward(in, cache);
}

template <typename T>
nn::Vec<T> Refiner<T>::RefineBackward(const RefineCache &cache, const nn::Vec<T> &d_refined,
                                      nn::Vec<T> *d_phi) {
  const nn::Vec<T> d_in = mlp_.Backward(cache, d_refined);
  if (d_phi) *d_phi += d_in.head(config_.mixture_dim);
  return d_in.tail(config_.condition_dim);
}

template <typename T>
void Refiner<T>::Visit(const std::string &prefix, const nn::ParamVisitor<T> &fn) {
  encoder_.Visit(prefix + "encoder.", fn);
  proj_.Visit(prefix + "proj.", fn);
  act_.Visit(prefix + "act.", fn);
  for (std::size_t s = 0; s < stages_.size(); ++s)
    stages_[s].Visit(prefix + "stage" + std::to_string(s) + ".", fn);
  pool_.Visit(prefix + "pool.", fn);
  mlp_.Visit(prefix + "mlp.", fn);
}

template class Refiner<float>;
template class Refiner<double>;

}  // namespace octsep
