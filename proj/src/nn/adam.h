// nn/adam.h

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

#ifndef OCTSEP_NN_ADAM_H_
#define OCTSEP_NN_ADAM_H_

#include <cmath>
#include <map>
#include <string>

#include "nn/tensor.h"

namespace octsep::nn {

struct AdamOptions {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// Adaptive-moment optimizer with bias correction. Moment buffers are keyed
// by parameter name so they survive checkpoint round trips.
template <typename T>
class Adam {
 public:
  struct Moments {
    Mat<T> m, v;
  };

  explicit Adam(AdamOptions opts = {}) : opts_(opts) {}

  template <typename Model>
  void Step(Model &model, double lr) {
    ++steps_;
    const double c1 = 1.0 - std::pow(opts_.beta1, static_cast<double>(steps_));
    const double c2 = 1.0 - std::pow(opts_.beta2, static_cast<double>(steps_));
    const T b1 = static_cast<T>(opts_.beta1), b2 = static_cast<T>(opts_.beta2);
    const T step = static_cast<T>(lr / c1);
    const T inv_c2 = static_cast<T>(1.0 / c2), eps = static_cast<T>(opts_.eps);
    model.Visit([&](const std::string &name, Param<T> &p) {
      auto it = state_.find(name);
      if (it == state_.end())
        it = state_.emplace(name, Moments{Mat<T>::Zero(p.value.rows(), p.value.cols()),
                                          Mat<T>::Zero(p.value.rows(), p.value.cols())})
                 .first;
      Moments &s = it->second;
      s.m = b1 * s.m + (T(1) - b1) * p.grad;
      s.v = b2 * s.v + (T(1) - b2) * p.grad.cwiseAbs2();
      p.value.array() -= step * s.m.array() / ((s.v.array() * inv_c2).sqrt() + eps);
    });
  }

  long long steps() const { return steps_; }
  void set_steps(long long s) { steps_ = s; }
  std::map<std::string, Moments> &state() { return state_; }
  const std::map<std::string, Moments> &state() const { return state_; }

 private:
  AdamOptions opts_;
  long long steps_ = 0;
  std::map<std::string, Moments> state_;
};

}  // namespace octsep::nn

#endif  // OCTSEP_NN_ADAM_H_
