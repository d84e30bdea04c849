// signal/consistency.h

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

#ifndef OCTSEP_SIGNAL_CONSISTENCY_H_
#define OCTSEP_SIGNAL_CONSISTENCY_H_

#include <span>
#include <utility>

#include "signal/waveform.h"

namespace octsep {

// Projects two estimates onto the set {a + b = mixture}: each estimate
// receives half of the residual. In place.
template <typename T>
void ApplyMixtureConsistency(std::span<T> est_t, std::span<T> est_o, std::span<const T> mixture) {
  Require(est_t.size() == mixture.size() && est_o.size() == mixture.size(),
          ErrorCode::kInvalidArgument, "mixture_consistency: length mismatch");
  for (std::size_t i = 0; i < mixture.size(); ++i) {
    const T half_residual = (mixture[i] - est_t[i] - est_o[i]) / T(2);
    est_t[i] += half_residual;
    est_o[i] += half_residual;
  }
}

// Backward of the projection: the Jacobian is I - 11^T/2 per sample.
template <typename T>
void MixtureConsistencyBackward(std::span<T> grad_t, std::span<T> grad_o) {
  for (std::size_t i = 0; i < grad_t.size(); ++i) {
    const T mean = (grad_t[i] + grad_o[i]) / T(2);
    grad_t[i] -= mean;
    grad_o[i] -= mean;
  }
}

inline std::pair<Waveform, Waveform> MixtureConsistency(const Waveform &est_t,
                                                        const Waveform &est_o,
                                                        const Waveform &mixture) {
  RequireCompatible(est_t, mixture, "mixture_consistency");
  RequireCompatible(est_o, mixture, "mixture_consistency");
  std::pair<Waveform, Waveform> out{est_t, est_o};
  ApplyMixtureConsistency<double>(out.first.span(), out.second.span(), mixture.span());
  return out;
}

}  // namespace octsep

#endif  // OCTSEP_SIGNAL_CONSISTENCY_H_
