// signal/waveform.h

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

#ifndef OCTSEP_SIGNAL_WAVEFORM_H_
#define OCTSEP_SIGNAL_WAVEFORM_H_

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "base/error.h"

namespace octsep {

// Mono sample sequence with its rate. Amplitudes are dimensionless
// (full scale = 1.0).
struct Waveform {
  std::vector<double> samples;
  int sample_rate = 0;

  Waveform() = default;
  Waveform(std::vector<double> s, int rate) : samples(std::move(s)), sample_rate(rate) {}

  std::size_t size() const { return samples.size(); }
  double duration_s() const {
    return sample_rate > 0 ? static_cast<double>(samples.size()) / sample_rate : 0.0;
  }
  std::span<const double> span() const { return samples; }
  std::span<double> span() { return samples; }

  // Throws kInvalidArgument on empty, non-finite or rate <= 0.
  void Validate(const char *what = "waveform") const {
    Require(sample_rate > 0, ErrorCode::kInvalidArgument, what, ": sample rate must be positive");
    Require(!samples.empty(), ErrorCode::kInvalidArgument, what, ": empty waveform");
    for (double v : samples)
      Require(std::isfinite(v), ErrorCode::kInvalidArgument, what, ": non-finite sample");
  }
};

inline void RequireCompatible(const Waveform &a, const Waveform &b, const char *what) {
  Require(a.sample_rate == b.sample_rate, ErrorCode::kInvalidArgument, what,
          ": sample rate mismatch (", a.sample_rate, " vs ", b.sample_rate, ")");
  Require(a.size() == b.size(), ErrorCode::kInvalidArgument, what, ": length mismatch (",
          a.size(), " vs ", b.size(), ")");
}

template <typename T>
double Energy(std::span<const T> x) {
  double e = 0.0;
  for (T v : x) e += static_cast<double>(v) * static_cast<double>(v);
  return e;
}

inline double Energy(const Waveform &w) { return Energy<double>(w.span()); }

template <typename T>
double Rms(std::span<const T> x) {
  return x.empty() ? 0.0 : std::sqrt(Energy(x) / static_cast<double>(x.size()));
}

}  // namespace octsep

#endif  // OCTSEP_SIGNAL_WAVEFORM_H_
