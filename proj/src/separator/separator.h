// separator/separator.h

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

#ifndef OCTSEP_SEPARATOR_SEPARATOR_H_
#define OCTSEP_SEPARATOR_SEPARATOR_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "nn/layers.h"

namespace octsep {

struct SeparatorConfig {
  int num_blocks = 2;        // conditioned U-ConvBlocks
  int channels = 64;         // encoder basis and bottleneck width
  int hidden_channels = 128; // width inside each block
  int enc_kernel = 21;
  int enc_stride = 10;
  int upsampling_depth = 4;  // resolutions per block (stride-2 stages + 1)
  int condition_dim = 128;
  int output_slots = 2;

  void Validate() const;
  bool operator==(const SeparatorConfig &) const = default;
};

// Number of learnable scalars:
//   C*K                                   encoder
// + 2C + C*C + C                          encoder norm, bottleneck
// + B * [ 2(C*d_c + C)                    FiLM
//       + H*C + H + 2H + H                projection, norm, PReLU
//       + D*(5H + H)                      depthwise stages
//       + 2H + H + C*H + C ]              norm, PReLU, output projection
// + C + 2C*C + 2C                         mask PReLU and projection
// + C*K                                   decoder
std::int64_t ParamCount(const SeparatorConfig &config);

template <typename T>
struct SeparatorOutput {
  std::vector<T> target;
  std::vector<T> other;
};

// Conditional two-slot separator f(x, c). Time-domain encoder, B residual
// U-ConvBlocks each preceded by FiLM, sigmoid masks on the encoded mixture,
// shared overlap-add decoder and a mixture-consistency projection.
template <typename T>
class Separator {
 public:
  struct BlockCache {
    nn::Mat<T> input, film_out, proj_out, act1_in, act1_out;
    typename nn::ChannelNorm<T>::Cache norm1, norm2;
    std::vector<nn::Mat<T>> stages;  // depthwise outputs, finest first
    nn::Mat<T> act2_in, act2_out;
  };

  struct Cache {
    std::size_t length = 0;
    std::vector<T> padded;
    nn::Mat<T> enc_pre, enc, normed, mask_in, mask_act, mask;
    typename nn::ChannelNorm<T>::Cache enc_norm;
    std::vector<BlockCache> blocks;
    nn::Vec<T> condition;
  };

  explicit Separator(const SeparatorConfig &config);

  const SeparatorConfig &config() const { return config_; }
  void Init(Rng &rng);

  // Cache is filled when non-null (training); evaluation passes nullptr.
  SeparatorOutput<T> Forward(std::span<const T> mixture, const nn::Vec<T> &condition,
                             Cache *cache) const;

  // Accumulates parameter gradients; returns d loss / d condition.
  nn::Vec<T> Backward(const Cache &cache, std::span<const T> d_target, std::span<const T> d_other);

  void Visit(const std::string &prefix, const nn::ParamVisitor<T> &fn);

  nn::Film<T> &film(int block) { return blocks_[block].film; }

 private:
  struct Block {
    nn::Film<T> film;
    nn::Dense<T> proj;
    nn::ChannelNorm<T> norm1;
    nn::PRelu<T> act1;
    std::vector<nn::DepthwiseConv<T>> stages;
    nn::ChannelNorm<T> norm2;
    nn::PRelu<T> act2;
    nn::Dense<T> out;
  };

  nn::Mat<T> BlockForward(const Block &b, const nn::Mat<T> &h, const nn::Vec<T> &c,
                          BlockCache *cache) const;
  nn::Mat<T> BlockBackward(Block &b, const BlockCache &cache, const nn::Vec<T> &c,
                           const nn::Mat<T> &dout, nn::Vec<T> *dc);

  SeparatorConfig config_;
  nn::FrameConv<T> encoder_;
  nn::ChannelNorm<T> enc_norm_;
  nn::Dense<T> bottleneck_;
  std::vector<Block> blocks_;
  nn::PRelu<T> mask_act_;
  nn::Dense<T> mask_;
  nn::OverlapAdd<T> decoder_;
};

extern template class Separator<float>;
extern template class Separator<double>;

}  // namespace octsep

#endif  // OCTSEP_SEPARATOR_SEPARATOR_H_
