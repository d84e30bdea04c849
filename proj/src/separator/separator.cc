// separator/separator.cc

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

#include "separator/separator.h"

#include <algorithm>

#include "signal/consistency.h"

namespace octsep {

void SeparatorConfig::Validate() const {
  Require(num_blocks >= 1, ErrorCode::kConfig, "separator: num_blocks must be >= 1");
  Require(channels >= 1 && hidden_channels >= 1, ErrorCode::kConfig,
          "separator: channel counts must be positive");
  Require(enc_kernel >= 1 && enc_stride >= 1, ErrorCode::kConfig,
          "separator: encoder kernel/stride must be positive");
  Require(upsampling_depth >= 1, ErrorCode::kConfig, "separator: upsampling_depth must be >= 1");
  Require(condition_dim >= 1, ErrorCode::kConfig, "separator: condition_dim must be positive");
  Require(output_slots == 2, ErrorCode::kConfig, "separator: exactly two output slots are supported");
}

std::int64_t ParamCount(const SeparatorConfig &config) {
  config.Validate();
  const std::int64_t c = config.channels, h = config.hidden_channels, k = config.enc_kernel;
  const std::int64_t d = config.upsampling_depth, dc = config.condition_dim;
  const std::int64_t block = 2 * (c * dc + c) + h * c + h + 2 * h + h + d * (5 * h + h) + 2 * h +
                             h + c * h + c;
  return c * k + 2 * c + c * c + c + config.num_blocks * block + c + 2 * c * c + 2 * c + c * k;
}

template <typename T>
Separator<T>::Separator(const SeparatorConfig &config)
    : config_(config),
      encoder_(config.channels, config.enc_kernel, config.enc_stride),
      enc_norm_(config.channels),
      bottleneck_(config.channels, config.channels),
      mask_act_(config.channels),
      mask_(config.channels, 2 * config.channels),
      decoder_(config.channels, config.enc_kernel, config.enc_stride) {
  config.Validate();
  const int c = config.channels, h = config.hidden_channels;
  for (int b = 0; b < config.num_blocks; ++b) {
    Block block{nn::Film<T>(config.condition_dim, c), nn::Dense<T>(c, h), nn::ChannelNorm<T>(h),
                nn::PRelu<T>(h), {}, nn::ChannelNorm<T>(h), nn::PRelu<T>(h), nn::Dense<T>(h, c)};
    for (int s = 0; s < config.upsampling_depth; ++s)
      block.stages.emplace_back(h, 5, s == 0 ? 1 : 2);
    blocks_.push_back(std::move(block));
  }
}

template <typename T>
void Separator<T>::Init(Rng &rng) {
  encoder_.InitUniform(rng);
  bottleneck_.InitUniform(rng);
  for (Block &b : blocks_) {
    b.film.InitIdentity();
    b.proj.InitUniform(rng);
    for (auto &s : b.stages) s.InitUniform(rng);
    b.out.InitUniform(rng);
    // Residual branches start small.
    b.out.w.value *= T(0.1);
    b.out.b.value.setZero();
  }
  mask_.InitUniform(rng);
  decoder_.InitUniform(rng);
}

template <typename T>
nn::Mat<T> Separator<T>::BlockForward(const Block &b, const nn::Mat<T> &h, const nn::Vec<T> &c,
                                      BlockCache *cache) const {
  nn::Mat<T> film_out = b.film.Forward(h, c);
  nn::Mat<T> proj_out = b.proj.Forward(film_out);
  typename nn::ChannelNorm<T>::Cache n1;
  nn::Mat<T> act1_in = b.norm1.Forward(proj_out, cache ? &n1 : nullptr);
  nn::Mat<T> act1_out = b.act1.Forward(act1_in);

  const std::size_t depth = b.stages.size();
  std::vector<nn::Mat<T>> stages(depth);
  stages[0] = b.stages[0].Forward(act1_out);
  for (std::size_t s = 1; s < depth; ++s) stages[s] = b.stages[s].Forward(stages[s - 1]);
  nn::Mat<T> fused = stages[depth - 1];
  for (std::size_t s = depth - 1; s-- > 0;) {
    nn::Mat<T> up = nn::Upsample2(fused, stages[s].cols());
    up += stages[s];
    fused = std::move(up);
  }

  typename nn::ChannelNorm<T>::Cache n2;
  nn::Mat<T> act2_in = b.norm2.Forward(fused, cache ? &n2 : nullptr);
  nn::Mat<T> act2_out = b.act2.Forward(act2_in);
  nn::Mat<T> out = b.out.Forward(act2_out);
  out += h;
  if (cache) {
    cache->input = h;
    cache->film_out = std::move(film_out);
    cache->proj_out = std::move(proj_out);
    cache->norm1 = std::move(n1);
    cache->act1_in = std::move(act1_in);
    cache->act1_out = std::move(act1_out);
    cache->stages = std::move(stages);
    cache->norm2 = std::move(n2);
    cache->act2_in = std::move(act2_in);
    cache->act2_out = std::move(act2_out);
  }
  return out;
}

template <typename T>
nn::Mat<T> Separator<T>::BlockBackward(Block &b, const BlockCache &cache, const nn::Vec<T> &c,
                                       const nn::Mat<T> &dout, nn::Vec<T> *dc) {
  nn::Mat<T> dh = dout;  // residual path
  nn::Mat<T> g = b.out.Backward(cache.act2_out, dout);
  g = b.act2.Backward(cache.act2_in, g);
  g = b.norm2.Backward(cache.norm2, g);

  const std::size_t depth = b.stages.size();
  // Undo the coarse-to-fine fusion: every stage receives the gradient of the
  // fused map at its own resolution.
  std::vector<nn::Mat<T>> d_stage(depth);
  nn::Mat<T> d_fused = std::move(g);
  for (std::size_t s = 0; s + 1 < depth; ++s) {
    d_stage[s] = d_fused;
    d_fused = nn::Upsample2Backward(d_fused, cache.stages[s + 1].cols());
  }
  d_stage[depth - 1] = std::move(d_fused);
  for (std::size_t s = depth; s-- > 1;)
    d_stage[s - 1] += b.stages[s].Backward(cache.stages[s - 1], d_stage[s]);
  g = b.stages[0].Backward(cache.act1_out, d_stage[0]);

  g = b.act1.Backward(cache.act1_in, g);
  g = b.norm1.Backward(cache.norm1, g);
  g = b.proj.Backward(cache.film_out, g);
  dh += b.film.Backward(cache.input, c, g, dc);
  return dh;
}

template <typename T>
SeparatorOutput<T> Separator<T>::Forward(std::span<const T> mixture, const nn::Vec<T> &condition,
                                         Cache *cache) const {
  Require(!mixture.empty(), ErrorCode::kInvalidArgument, "separator: empty mixture");
  Require(condition.size() == config_.condition_dim, ErrorCode::kInvalidArgument,
          "separator: condition dimension ", condition.size(), " != ", config_.condition_dim);
  for (T v : mixture)
    Require(std::isfinite(v), ErrorCode::kInvalidArgument, "separator: non-finite input");
  const auto n = static_cast<Eigen::Index>(mixture.size());
  std::vector<T> padded(static_cast<std::size_t>(encoder_.PaddedLen(n)), T(0));
  std::copy(mixture.begin(), mixture.end(), padded.begin());

  nn::Mat<T> enc_pre = encoder_.Forward(padded);
  nn::Mat<T> enc = nn::Relu(enc_pre);
  typename nn::ChannelNorm<T>::Cache enc_norm;
  nn::Mat<T> normed = enc_norm_.Forward(enc, cache ? &enc_norm : nullptr);
  nn::Mat<T> h = bottleneck_.Forward(normed);
  if (cache) cache->blocks.assign(blocks_.size(), BlockCache{});
  for (std::size_t b = 0; b < blocks_.size(); ++b)
    h = BlockForward(blocks_[b], h, condition, cache ? &cache->blocks[b] : nullptr);
  nn::Mat<T> mask_act = mask_act_.Forward(h);
  nn::Mat<T> mask = nn::Sigmoid(mask_.Forward(mask_act));

  const Eigen::Index c = config_.channels;
  const nn::Mat<T> s_t = mask.topRows(c).cwiseProduct(enc);
  const nn::Mat<T> s_o = mask.bottomRows(c).cwiseProduct(enc);
  std::vector<T> y_t = decoder_.Forward(s_t), y_o = decoder_.Forward(s_o);
  y_t.resize(mixture.size());
  y_o.resize(mixture.size());
  ApplyMixtureConsistency<T>(y_t, y_o, mixture);

  if (cache) {
    cache->length = mixture.size();
    cache->padded = std::move(padded);
    cache->enc_pre = std::move(enc_pre);
    cache->enc = std::move(enc);
    cache->enc_norm = std::move(enc_norm);
    cache->normed = std::move(normed);
    cache->mask_in = std::move(h);
    cache->mask_act = std::move(mask_act);
    cache->mask = std::move(mask);
    cache->condition = condition;
  }
  return {std::move(y_t), std::move(y_o)};
}

template <typename T>
nn::Vec<T> Separator<T>::Backward(const Cache &cache, std::span<const T> d_target,
                                  std::span<const T> d_other) {
  Require(d_target.size() == cache.length && d_other.size() == cache.length,
          ErrorCode::kInvalidArgument, "separator backward: gradient length mismatch");
  std::vector<T> g_t(cache.padded.size(), T(0)), g_o(cache.padded.size(), T(0));
  std::copy(d_target.begin(), d_target.end(), g_t.begin());
  std::copy(d_other.begin(), d_other.end(), g_o.begin());
  MixtureConsistencyBackward<T>(std::span<T>(g_t.data(), cache.length),
                                std::span<T>(g_o.data(), cache.length));

  const Eigen::Index c = config_.channels;
  const nn::Mat<T> s_t = cache.mask.topRows(c).cwiseProduct(cache.enc);
  const nn::Mat<T> s_o = cache.mask.bottomRows(c).cwiseProduct(cache.enc);
  const nn::Mat<T> ds_t = decoder_.Backward(s_t, g_t);
  const nn::Mat<T> ds_o = decoder_.Backward(s_o, g_o);

  nn::Mat<T> d_mask(2 * c, cache.enc.cols());
  d_mask.topRows(c) = ds_t.cwiseProduct(cache.enc);
  d_mask.bottomRows(c) = ds_o.cwiseProduct(cache.enc);
  nn::Mat<T> d_enc = ds_t.cwiseProduct(cache.mask.topRows(c)) + ds_o.cwiseProduct(cache.mask.bottomRows(c));
  d_mask.array() *= cache.mask.array() * (T(1) - cache.mask.array());

  nn::Mat<T> g = mask_.Backward(cache.mask_act, d_mask);
  g = mask_act_.Backward(cache.mask_in, g);
  nn::Vec<T> dc = nn::Vec<T>::Zero(config_.condition_dim);
  for (std::size_t b = blocks_.size(); b-- > 0;)
    g = BlockBackward(blocks_[b], cache.blocks[b], cache.condition, g, &dc);
  g = bottleneck_.Backward(cache.normed, g);
  d_enc += enc_norm_.Backward(cache.enc_norm, g);
  encoder_.Backward(cache.padded, nn::ReluBackward(cache.enc_pre, d_enc));
  return dc;
}

template <typename T>
void Separator<T>::Visit(const std::string &prefix, const nn::ParamVisitor<T> &fn) {
  encoder_.Visit(prefix + "encoder.", fn);
  enc_norm_.Visit(prefix + "enc_norm.", fn);
  bottleneck_.Visit(prefix + "bottleneck.", fn);
  for (std::size_t b = 0; b < blocks_.size(); ++b) {
    Block &blk = blocks_[b];
    const std::string p = prefix + "block" + std::to_string(b) + ".";
    blk.film.Visit(p + "film.", fn);
    blk.proj.Visit(p + "proj.", fn);
    blk.norm1.Visit(p + "norm1.", fn);
    blk.act1.Visit(p + "act1.", fn);
    for (std::size_t s = 0; s < blk.stages.size(); ++s)
      blk.stages[s].Visit(p + "stage" + std::to_string(s) + ".", fn);
    blk.norm2.Visit(p + "norm2.", fn);
    blk.act2.Visit(p + "act2.", fn);
    blk.out.Visit(p + "out.", fn);
  }
  mask_act_.Visit(prefix + "mask_act.", fn);
  mask_.Visit(prefix + "mask.", fn);
  decoder_.Visit(prefix + "decoder.", fn);
}

template class Separator<float>;
template class Separator<double>;

}  // namespace octsep
