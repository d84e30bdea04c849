// signal/pit.h

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

#ifndef OCTSEP_SIGNAL_PIT_H_
#define OCTSEP_SIGNAL_PIT_H_

#include <vector>

#include "signal/waveform.h"

namespace octsep {

inline constexpr int kMaxExhaustivePit = 6;

struct PitResult {
  double loss = 0.0;
  // permutation[i] is the estimate assigned to reference i (0-based).
  std::vector<int> permutation;
};

// cost[i][j] = reconstruction loss of estimate j against reference i.
using CostMatrix = std::vector<std::vector<double>>;

// Minimum-sum assignment. Up to kMaxExhaustivePit sources every permutation
// is enumerated in lexicographic order and the first minimum wins; larger
// problems fall back to the Hungarian method.
PitResult SolveAssignment(const CostMatrix &cost);

PitResult PitLoss(const std::vector<Waveform> &estimates,
                  const std::vector<Waveform> &references);

}  // namespace octsep

#endif  // OCTSEP_SIGNAL_PIT_H_
