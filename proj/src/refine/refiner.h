// refine/refiner.h

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

#ifndef OCTSEP_REFINE_REFINER_H_
#define OCTSEP_REFINE_REFINER_H_

#include <span>
#include <string>
#include <vector>

#include "nn/layers.h"

namespace octsep {

struct RefinerConfig {
  int channels = 64;      // encoder width (512 at paper scale)
  int enc_kernel = 21;
  int enc_stride = 10;
  int stages = 4;         // depthwise downsampling layers
  int stage_stride = 4;
  int heads = 2;          // attention pooling heads
  int mixture_dim = 128;  // d_phi
  int hidden = 256;       // MLP hidden width, >= 2 * condition_dim
  int condition_dim = 128;

  void Validate() const;
  bool operator==(const RefinerConfig &) const = default;
};

enum class RefinerInit {
  // Identity on the condition slice, zero on the mixture slice:
  // refine(x, c) == c exactly.
  kPassThrough,
  kRandom,
};

// Query refinement r(x, c) = g(concat(phi(x), c)):
//   phi: learned filterbank -> 1x1 projection + PReLU -> strided depthwise
//        stages -> multi-head attention pooling (length independent);
//   g:   two-layer MLP with a rectifier in between.
template <typename T>
class Refiner {
 public:
  struct MixtureCache {
    std::size_t length = 0;
    std::vector<T> padded;
    nn::Mat<T> enc_pre, enc, proj_pre;
    std::vector<nn::Mat<T>> stages;  // stages[0] is the PReLU output
    typename nn::AttentionPool<T>::Cache pool;
  };
  using RefineCache = typename nn::Mlp<T>::Cache;

  explicit Refiner(const RefinerConfig &config);

  const RefinerConfig &config() const { return config_; }
  void Init(Rng &rng, RefinerInit mode = RefinerInit::kPassThrough);

  nn::Vec<T> EncodeMixture(std::span<const T> mixture, MixtureCache *cache) const;
  // Returns dx (unpadded) when want_dx, else empty.
  std::vector<T> EncodeMixtureBackward(const MixtureCache &cache, const nn::Vec<T> &d_phi,
                                       bool want_dx = false);

  nn::Vec<T> RefineEncoded(const nn::Vec<T> &phi, const nn::Vec<T> &condition,
                           RefineCache *cache) const;
  // Accumulates g's gradients; adds into *d_phi and returns d condition.
  nn::Vec<T> RefineBackward(const RefineCache &cache, const nn::Vec<T> &d_refined, nn::Vec<T> *d_phi);

  nn::Vec<T> Refine(std::span<const T> mixture, const nn::Vec<T> &condition) const {
    return RefineEncoded(EncodeMixture(mixture, nullptr), condition, nullptr);
  }

  void Visit(const std::string &prefix, const nn::ParamVisitor<T> &fn);

 private:
  RefinerConfig config_;
  nn::FrameConv<T> encoder_;
  nn::Dense<T> proj_;
  nn::PRelu<T> act_;
  std::vector<nn::DepthwiseConv<T>> stages_;
  nn::AttentionPool<T> pool_;
  nn::Mlp<T> mlp_;
};

extern template class Refiner<float>;
extern template class Refiner<double>;

}  // namespace octsep

#endif  // OCTSEP_REFINE_REFINER_H_
