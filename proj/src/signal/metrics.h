// signal/metrics.h

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

#ifndef OCTSEP_SIGNAL_METRICS_H_
#define OCTSEP_SIGNAL_METRICS_H_

#include <cmath>
#include <numbers>
#include <span>

#include "base/error.h"
#include "signal/waveform.h"

namespace octsep {

inline constexpr double kSiSdrEpsilon = 1e-8;
// References with RMS below this are treated as inactive targets.
inline constexpr double kSilenceRms = 1e-6;

namespace internal {

inline constexpr double kDbPerNeper = 10.0 / std::numbers::ln10;

template <typename T>
void RequireSameLength(std::span<const T> est, std::span<const T> ref) {
  Require(est.size() == ref.size(), ErrorCode::kInvalidArgument,
          "length mismatch: estimate ", est.size(), " vs reference ", ref.size());
  Require(!ref.empty(), ErrorCode::kInvalidArgument, "empty signal");
}

}  // namespace internal

// Scale-invariant SDR in dB:
//   alpha = <est, ref> / (|ref|^2 + eps)
//   10 log10(|alpha ref|^2 / (|alpha ref - est|^2 + eps))
// When grad is non-empty it receives d(SI-SDR)/d(est).
template <typename T>
double SiSdr(std::span<const T> est, std::span<const T> ref, double eps = kSiSdrEpsilon,
             std::span<T> grad = {}) {
  internal::RequireSameLength(est, ref);
  double ref_energy = 0.0, dot = 0.0;
  for (std::size_t i = 0; i < ref.size(); ++i) {
    const double s = ref[i];
    ref_energy += s * s;
    dot += static_cast<double>(est[i]) * s;
  }
  Require(ref_energy > 0.0, ErrorCode::kInvalidArgument,
          "degenerate reference: zero energy (use the inactive-target loss)");
  const double alpha = dot / (ref_energy + eps);
  double residual = 0.0, residual_dot_ref = 0.0;
  for (std::size_t i = 0; i < ref.size(); ++i) {
    const double e = alpha * ref[i] - static_cast<double>(est[i]);
    residual += e * e;
    residual_dot_ref += e * ref[i];
  }
  const double target_energy = alpha * alpha * ref_energy;
  const double noise = residual + eps;
  if (!grad.empty()) {
    Require(grad.size() == est.size(), ErrorCode::kInvalidArgument, "gradient buffer size");
    const double inv = 1.0 / (ref_energy + eps);
    const double ca = internal::kDbPerNeper * 2.0 * alpha * ref_energy * inv / target_energy;
    const double cb = internal::kDbPerNeper * 2.0 / noise;
    for (std::size_t i = 0; i < ref.size(); ++i) {
      const double e = alpha * ref[i] - static_cast<double>(est[i]);
      const double d_noise = residual_dot_ref * inv * ref[i] - e;
      grad[i] = static_cast<T>(ca * ref[i] - cb * d_noise);
    }
  }
  return internal::kDbPerNeper * (std::log(target_energy) - std::log(noise));
}

inline double SiSdr(const Waveform &est, const Waveform &ref, double eps = kSiSdrEpsilon) {
  RequireCompatible(est, ref, "si_sdr");
  return SiSdr<double>(est.span(), ref.span(), eps);
}

template <typename T>
bool IsSilent(std::span<const T> ref) {
  return Rms(ref) < kSilenceRms;
}

// 10 log10(|est|^2 + eps): drives the estimate toward silence.
template <typename T>
double InactiveTargetLoss(std::span<const T> est, double eps = kSiSdrEpsilon,
                          std::span<T> grad = {}) {
  const double energy = Energy(est);
  if (!grad.empty()) {
    const double c = internal::kDbPerNeper * 2.0 / (energy + eps);
    for (std::size_t i = 0; i < est.size(); ++i)
      grad[i] = static_cast<T>(c * static_cast<double>(est[i]));
  }
  return internal::kDbPerNeper * std::log(energy + eps);
}

// Negative SI-SDR, with the inactive-target fallback for silent references.
// Not symmetric: est and ref have distinct roles.
template <typename T>
double ReconstructionLoss(std::span<const T> est, std::span<const T> ref,
                          std::span<T> grad = {}) {
  internal::RequireSameLength(est, ref);
  if (IsSilent(ref)) return InactiveTargetLoss(est, kSiSdrEpsilon, grad);
  const double v = SiSdr(est, ref, kSiSdrEpsilon, grad);
  for (auto &g : grad) g = -g;
  return -v;
}

inline double ReconstructionLoss(const Waveform &est, const Waveform &ref) {
  RequireCompatible(est, ref, "reconstruction_loss");
  return ReconstructionLoss<double>(est.span(), ref.span());
}

}  // namespace octsep

#endif  // OCTSEP_SIGNAL_METRICS_H_
