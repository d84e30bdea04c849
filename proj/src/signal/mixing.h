// signal/mixing.h

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

#ifndef OCTSEP_SIGNAL_MIXING_H_
#define OCTSEP_SIGNAL_MIXING_H_

#include <span>
#include <vector>

#include "signal/waveform.h"

namespace octsep {

struct MixResult {
  Waveform mixture;
  double gain_b = 1.0;
};

// Scales source_b so that 10 log10(E_a / (gain_b^2 E_b)) == snr_db and
// returns source_a + gain_b * source_b.
MixResult MixAtSnr(const Waveform &source_a, const Waveform &source_b, double snr_db);

double SnrDb(std::span<const double> a, std::span<const double> b);

// Half-open time interval in seconds.
struct Interval {
  double start = 0.0;
  double end = 0.0;
  double length() const { return end - start; }
};

using IntervalSet = std::vector<Interval>;

// Sorted, merged, zero-length intervals dropped.
IntervalSet NormalizeIntervals(IntervalSet set);
double SupportLength(const IntervalSet &set);
IntervalSet Shift(const IntervalSet &set, double offset_s);

// |a ∩ b| / min(|a|, |b|). Symmetric, in [0, 1].
double OverlapFraction(const IntervalSet &a, const IntervalSet &b);

struct ActivityOptions {
  double frame_s = 0.025;
  double threshold_dbfs = -40.0;
};

// Frames whose RMS exceeds the threshold, merged into intervals.
IntervalSet DetectActivity(std::span<const double> samples, int sample_rate,
                           const ActivityOptions &opts = {});

}  // namespace octsep

#endif  // OCTSEP_SIGNAL_MIXING_H_
