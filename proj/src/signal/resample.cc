// signal/resample.cc

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

#include "signal/resample.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace octsep {

namespace {

double BesselI0(double x) {
  double sum = 1.0, term = 1.0;
  const double q = x * x / 4.0;
  for (int k = 1; k < 64; ++k) {
    term *= q / (static_cast<double>(k) * k);
    sum += term;
    if (term < 1e-17 * sum) break;
  }
  return sum;
}

}  // namespace

PolyphaseResampler::PolyphaseResampler(int from_rate, int to_rate, const ResampleOptions &opts) {
  Require(from_rate > 0 && to_rate > 0, ErrorCode::kInvalidArgument,
          "resample: rates must be positive");
  const int g = std::gcd(from_rate, to_rate);
  up_ = to_rate / g;
  down_ = from_rate / g;
  if (up_ == 1 && down_ == 1) return;
  const int factor = std::max(up_, down_);
  half_ = opts.zero_crossings * factor;
  // Cutoff in cycles per upsampled sample.
  const double fc = opts.rolloff * 0.5 / factor;
  const double i0_beta = BesselI0(opts.kaiser_beta);
  taps_.resize(2 * half_ + 1);
  for (int n = -half_; n <= half_; ++n) {
    const double t = static_cast<double>(n);
    const double sinc = n == 0 ? 2.0 * fc
                               : std::sin(2.0 * std::numbers::pi * fc * t) / (std::numbers::pi * t);
    const double r = t / half_;
    const double window = BesselI0(opts.kaiser_beta * std::sqrt(std::max(0.0, 1.0 - r * r))) / i0_beta;
    taps_[n + half_] = up_ * sinc * window;
  }
}

std::vector<double> PolyphaseResampler::Process(const std::vector<double> &input) const {
  if (up_ == 1 && down_ == 1) return input;
  const long long n_in = static_cast<long long>(input.size());
  const long long n_out = (n_in * up_ + down_ - 1) / down_;
  std::vector<double> out(static_cast<std::size_t>(n_out), 0.0);
  for (long long m = 0; m < n_out; ++m) {
    const long long t = m * down_;  // position on the upsampled grid
    // input sample n sits at n * up_; tap index t - n * up_ + half_ in [0, 2 half_]
    long long n_lo = (t - half_ + up_ - 1);
    n_lo = n_lo >= 0 ? n_lo / up_ : -((-n_lo) / up_);
    const long long n_hi = std::min(n_in - 1, (t + half_) / up_);
    double acc = 0.0;
    for (long long n = std::max(0LL, n_lo); n <= n_hi; ++n) {
      const long long k = t - n * up_ + half_;
      if (k < 0 || k > 2LL * half_) continue;
      acc += input[static_cast<std::size_t>(n)] * taps_[static_cast<std::size_t>(k)];
    }
    out[static_cast<std::size_t>(m)] = acc;
  }
  return out;
}

Waveform Resample(const Waveform &wave, int to_rate, const ResampleOptions &opts) {
  if (wave.sample_rate == to_rate) return wave;
  PolyphaseResampler r(wave.sample_rate, to_rate, opts);
  return Waveform(r.Process(wave.samples), to_rate);
}

}  // namespace octsep
