// signal/mixing.cc

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

#include "signal/mixing.h"

#include <algorithm>
#include <cmath>

namespace octsep {

MixResult MixAtSnr(const Waveform &source_a, const Waveform &source_b, double snr_db) {
  RequireCompatible(source_a, source_b, "mix_at_snr");
  Require(std::isfinite(snr_db), ErrorCode::kInvalidArgument, "mix_at_snr: non-finite snr");
  const double ea = Energy(source_a), eb = Energy(source_b);
  Require(ea > 0.0 && eb > 0.0, ErrorCode::kInvalidArgument,
          "mix_at_snr: zero-energy source");
  MixResult out;
  out.gain_b = std::sqrt(ea / (eb * std::pow(10.0, snr_db / 10.0)));
  out.mixture = source_a;
  for (std::size_t i = 0; i < out.mixture.size(); ++i)
    out.mixture.samples[i] += out.gain_b * source_b.samples[i];
  return out;
}

double SnrDb(std::span<const double> a, std::span<const double> b) {
  return 10.0 * std::log10(Energy(a) / Energy(b));
}

IntervalSet NormalizeIntervals(IntervalSet set) {
  std::erase_if(set, [](const Interval &iv) { return !(iv.end > iv.start); });
  std::sort(set.begin(), set.end(),
            [](const Interval &x, const Interval &y) { return x.start < y.start; });
  IntervalSet merged;
  for (const Interval &iv : set) {
    if (!merged.empty() && iv.start <= merged.back().end)
      merged.back().end = std::max(merged.back().end, iv.end);
    else
      merged.push_back(iv);
  }
  return merged;
}

double SupportLength(const IntervalSet &set) {
  double total = 0.0;
  for (const Interval &iv : NormalizeIntervals(set)) total += iv.length();
  return total;
}

IntervalSet Shift(const IntervalSet &set, double offset_s) {
  IntervalSet out = set;
  for (Interval &iv : out) {
    iv.start += offset_s;
    iv.end += offset_s;
  }
  return out;
}

double OverlapFraction(const IntervalSet &a, const IntervalSet &b) {
  const IntervalSet na = NormalizeIntervals(a), nb = NormalizeIntervals(b);
  const double la = SupportLength(na), lb = SupportLength(nb);
  Require(la > 0.0 && lb > 0.0, ErrorCode::kInvalidArgument, "overlap_fraction: empty support");
  double inter = 0.0;
  std::size_t i = 0, j = 0;
  while (i < na.size() && j < nb.size()) {
    const double lo = std::max(na[i].start, nb[j].start);
    const double hi = std::min(na[i].end, nb[j].end);
    if (hi > lo) inter += hi - lo;
    if (na[i].end < nb[j].end)
      ++i;
    else
      ++j;
  }
  return std::clamp(inter / std::min(la, lb), 0.0, 1.0);
}

IntervalSet DetectActivity(std::span<const double> samples, int sample_rate,
                           const ActivityOptions &opts) {
  Require(sample_rate > 0, ErrorCode::kInvalidArgument, "detect_activity: bad sample rate");
  const std::size_t frame =
      std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(opts.frame_s * sample_rate)));
  const double threshold = std::pow(10.0, opts.threshold_dbfs / 20.0);
  IntervalSet set;
  for (std::size_t start = 0; start < samples.size(); start += frame) {
    const std::size_t n = std::min(frame, samples.size() - start);
    if (Rms(samples.subspan(start, n)) > threshold)
      set.push_back({static_cast<double>(start) / sample_rate,
                     static_cast<double>(start + n) / sample_rate});
  }
  return NormalizeIntervals(std::move(set));
}

}  // namespace octsep
