// signal/pit.cc

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

#include "signal/pit.h"

#include <algorithm>
#include <limits>
#include <numeric>

#include "signal/metrics.h"

namespace octsep {

namespace {

PitResult Exhaustive(const CostMatrix &cost) {
  const int m = static_cast<int>(cost.size());
  std::vector<int> perm(m);
  std::iota(perm.begin(), perm.end(), 0);
  PitResult best;
  best.loss = std::numeric_limits<double>::infinity();
  do {
    double total = 0.0;
    for (int i = 0; i < m; ++i) total += cost[i][perm[i]];
    if (total < best.loss) {
      best.loss = total;
      best.permutation = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

// O(m^3) Hungarian algorithm (potentials form).
PitResult Hungarian(const CostMatrix &cost) {
  const int m = static_cast<int>(cost.size());
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(m + 1, 0.0), v(m + 1, 0.0), minv(m + 1);
  std::vector<int> p(m + 1, 0), way(m + 1, 0);
  std::vector<char> used(m + 1);
  for (int i = 1; i <= m; ++i) {
    p[0] = i;
    int j0 = 0;
    std::fill(minv.begin(), minv.end(), inf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= m; ++j) {
        if (used[j]) continue;
        const double cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= m; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  PitResult out;
  out.permutation.assign(m, 0);
  for (int j = 1; j <= m; ++j) out.permutation[p[j] - 1] = j - 1;
  for (int i = 0; i < m; ++i) out.loss += cost[i][out.permutation[i]];
  return out;
}

}  // namespace

PitResult SolveAssignment(const CostMatrix &cost) {
  Require(!cost.empty(), ErrorCode::kInvalidArgument, "pit: no sources");
  for (const auto &row : cost)
    Require(row.size() == cost.size(), ErrorCode::kInvalidArgument, "pit: cost matrix not square");
  return cost.size() <= static_cast<std::size_t>(kMaxExhaustivePit) ? Exhaustive(cost)
                                                                    : Hungarian(cost);
}

PitResult PitLoss(const std::vector<Waveform> &estimates,
                  const std::vector<Waveform> &references) {
  Require(estimates.size() == references.size(), ErrorCode::kInvalidArgument,
          "pit: ", estimates.size(), " estimates vs ", references.size(), " references");
  Require(!estimates.empty(), ErrorCode::kInvalidArgument, "pit: no sources");
  const std::size_t m = references.size();
  CostMatrix cost(m, std::vector<double>(m));
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) cost[i][j] = ReconstructionLoss(estimates[j], references[i]);
  return SolveAssignment(cost);
}

}  // namespace octsep
