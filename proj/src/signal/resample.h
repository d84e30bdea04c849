// signal/resample.h

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

#ifndef OCTSEP_SIGNAL_RESAMPLE_H_
#define OCTSEP_SIGNAL_RESAMPLE_H_

#include <vector>

#include "signal/waveform.h"

namespace octsep {

// Rational polyphase resampler with a Kaiser-windowed sinc prototype.
//
// Quality with the defaults (16 zero crossings per side, beta 8.6, cutoff at
// 0.95 of the lower Nyquist): passband ripple below 0.01 dB up to ~0.9 of the
// lower Nyquist, stopband attenuation around 80 dB. Output length is
// ceil(n * up / down). Group delay is compensated, so a sinusoid stays in
// phase with its analytic counterpart away from the edges.
struct ResampleOptions {
  int zero_crossings = 16;
  double kaiser_beta = 8.6;
  double rolloff = 0.95;
};

class PolyphaseResampler {
 public:
  PolyphaseResampler(int from_rate, int to_rate, const ResampleOptions &opts = {});

  std::vector<double> Process(const std::vector<double> &input) const;
  int up() const { return up_; }
  int down() const { return down_; }

 private:
  int up_ = 1;
  int down_ = 1;
  int half_ = 0;  // filter half-length in upsampled samples
  std::vector<double> taps_;
};

Waveform Resample(const Waveform &wave, int to_rate, const ResampleOptions &opts = {});

}  // namespace octsep

#endif  // OCTSEP_SIGNAL_RESAMPLE_H_
