// mixgen/synth_corpus.cc

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

#include "mixgen/synth_corpus.h"

#include <algorithm>
#include <cmath>
#include <complex>
#include <filesystem>
#include <fstream>
#include <numbers>

#include <unsupported/Eigen/FFT>

#include "signal/mixing.h"
#include "signal/wav_io.h"

namespace octsep {

namespace fs = std::filesystem;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Linear attack/release so that no clip starts or ends with a step.
void ApplyFades(std::vector<double> &x, int rate) {
  const std::size_t fade = std::min<std::size_t>(x.size() / 4, static_cast<std::size_t>(0.02 * rate));
  for (std::size_t i = 0; i < fade; ++i) {
    const double g = static_cast<double>(i) / fade;
    x[i] *= g;
    x[x.size() - 1 - i] *= g;
  }
}

// Sum of harmonics k*f0 below Nyquist with amplitude weight(k); phase is
// integrated so f0 may vary per sample.
template <typename F0, typename Weight>
void AddHarmonics(std::vector<double> &x, int rate, F0 f0_at, Weight weight, int max_harmonics) {
  double phase = 0.0;
  for (std::size_t n = 0; n < x.size(); ++n) {
    const double f0 = f0_at(n);
    phase += kTwoPi * f0 / rate;
    if (phase > kTwoPi) phase -= kTwoPi;
    double v = 0.0;
    for (int k = 1; k <= max_harmonics && k * f0 < 0.45 * rate; ++k) v += weight(k) * std::sin(k * phase);
    x[n] += v;
  }
}

// Repeated events: excitation(rng) noise decaying with time constant tau.
void AddDecayingEvents(std::vector<double> &x, int rate, Rng &rng, double min_gap_s, double max_gap_s,
                       double tau_s, double lowpass) {
  std::size_t onset = static_cast<std::size_t>(Uniform(rng, 0.0, 0.05) * rate);
  double state = 0.0;
  while (onset < x.size()) {
    const double amp = Uniform(rng, 0.6, 1.0);
    const std::size_t len = std::min(x.size() - onset, static_cast<std::size_t>(6 * tau_s * rate));
    for (std::size_t i = 0; i < len; ++i) {
      const double noise = Gaussian(rng);
      state = lowpass * state + (1.0 - lowpass) * noise;
      x[onset + i] += amp * std::exp(-static_cast<double>(i) / (tau_s * rate)) * state;
    }
    onset += static_cast<std::size_t>(Uniform(rng, min_gap_s, max_gap_s) * rate);
  }
}

// Stationary noise bed at `level` times the current RMS, so that percussive
// clips stay active between events. `lowpass` and `highpass` colour the bed
// like the events.
void AddNoiseBed(std::vector<double> &x, Rng &rng, double level, double lowpass, bool highpass) {
  const double scale = level * Rms<double>(x);
  double state = 0.0, prev = 0.0;
  std::vector<double> bed(x.size());
  for (double &v : bed) {
    state = lowpass * state + (1.0 - lowpass) * Gaussian(rng);
    v = highpass ? state - 0.5 * prev : state;
    prev = state;
  }
  const double bed_rms = Rms<double>(bed);
  for (std::size_t n = 0; n < x.size(); ++n) x[n] += scale * bed[n] / bed_rms;
}

}  // namespace

const std::vector<SynthClassInfo> &SynthClasses() {
  static const std::vector<SynthClassInfo> kClasses = {
      {SynthClass::kOrgan, "Organ", "Harmonic", "harmonic"},
      {SynthClass::kSynthLead, "Synth Lead", "Harmonic", "harmonic"},
      {SynthClass::kViolinLike, "Violin-like", "Harmonic", "harmonic"},
      {SynthClass::kSirenLike, "Siren-like", "Harmonic", "harmonic"},
      {SynthClass::kSnareLike, "Snare-like", "Percussive", "percussive"},
      {SynthClass::kClockLike, "Clock-like", "Percussive", "percussive"},
      {SynthClass::kRainLike, "Rain-like", "Percussive", "percussive"},
      {SynthClass::kDrumLike, "Drum-like", "Percussive", "percussive"},
  };
  return kClasses;
}

Waveform SynthesizeClip(const SynthCorpusSpec &spec, SynthClass cls, int clip_index) {
  Rng rng(DeriveSeed({spec.seed, static_cast<std::uint64_t>(cls), static_cast<std::uint64_t>(clip_index)}));
  const int rate = spec.sample_rate;
  const double duration = Uniform(rng, spec.min_duration_s, spec.max_duration_s);
  std::vector<double> x(static_cast<std::size_t>(duration * rate), 0.0);

  switch (cls) {
    case SynthClass::kOrgan: {
      const double f0 = 110.0 * std::pow(2.0, Uniform(rng, 0.0, 2.0));
      const double tilt = Uniform(rng, 0.7, 1.3);
      AddHarmonics(x, rate, [&](std::size_t) { return f0; }, [&](int k) { return std::pow(k, -tilt); }, 6);
      break;
    }
    case SynthClass::kSynthLead: {
      // A short melody of notes from a pentatonic scale.
      static constexpr int kScale[] = {0, 2, 4, 7, 9, 12};
      const double base = 150.0 * std::pow(2.0, Uniform(rng, 0.0, 1.0));
      const double note_s = Uniform(rng, 0.25, 0.5);
      std::vector<double> notes;
      for (std::size_t n = 0; n * note_s * rate < x.size() + 1; ++n)
        notes.push_back(base * std::pow(2.0, kScale[UniformIndex(rng, 6)] / 12.0));
      AddHarmonics(
          x, rate, [&](std::size_t n) { return notes[static_cast<std::size_t>(n / (note_s * rate))]; },
          [](int k) { return 1.0 / k; }, 40);
      break;
    }
    case SynthClass::kViolinLike: {
      const double f0 = 200.0 * std::pow(2.0, Uniform(rng, 0.0, 2.0));
      const double rate_hz = Uniform(rng, 5.0, 7.0), depth = Uniform(rng, 0.01, 0.02);
      AddHarmonics(
          x, rate, [&](std::size_t n) { return f0 * (1.0 + depth * std::sin(kTwoPi * rate_hz * n / rate)); },
          [](int k) { return std::pow(k, -1.5); }, 12);
      break;
    }
    case SynthClass::kSirenLike: {
      const double lo = Uniform(rng, 450.0, 650.0), hi = lo * Uniform(rng, 1.8, 2.4);
      const double period = Uniform(rng, 1.0, 3.0), start = Uniform(rng, 0.0, kTwoPi);
      AddHarmonics(
          x, rate,
          [&](std::size_t n) {
            return lo + (hi - lo) * 0.5 * (1.0 + std::sin(start + kTwoPi * n / (period * rate)));
          },
          [](int k) { return k == 1 ? 1.0 : 0.3 / k; }, 3);
      break;
    }
    case SynthClass::kSnareLike:
      AddDecayingEvents(x, rate, rng, 0.15, 0.3, Uniform(rng, 0.04, 0.07), 0.0);
      AddNoiseBed(x, rng, 0.25, 0.0, false);
      break;
    case SynthClass::kClockLike: {
      // Bright clicks: first-difference of short noise bursts.
      std::vector<double> burst(x.size(), 0.0);
      AddDecayingEvents(burst, rate, rng, 0.08, 0.14, Uniform(rng, 0.015, 0.025), 0.0);
      for (std::size_t n = x.size(); n-- > 1;) x[n] = burst[n] - 0.5 * burst[n - 1];
      AddNoiseBed(x, rng, 0.25, 0.0, true);
      break;
    }
    case SynthClass::kRainLike: {
      // Band-limited noise bed plus sparse droplets.
      const double lp = Uniform(rng, 0.3, 0.5);
      double s1 = 0.0, s2 = 0.0;
      for (double &v : x) {
        s1 = lp * s1 + (1.0 - lp) * Gaussian(rng);
        v = s1 - s2;
        s2 = 0.995 * s2 + 0.005 * s1;
      }
      std::vector<double> drops(x.size(), 0.0);
      AddDecayingEvents(drops, rate, rng, 0.02, 0.1, 0.004, 0.0);
      for (std::size_t n = 0; n < x.size(); ++n) x[n] += 0.5 * drops[n];
      break;
    }
    case SynthClass::kDrumLike: {
      const double lowpass = Uniform(rng, 0.5, 0.7);
      AddDecayingEvents(x, rate, rng, 0.2, 0.4, Uniform(rng, 0.06, 0.1), lowpass);
      AddNoiseBed(x, rng, 0.25, lowpass, false);
      break;
    }
  }
  ApplyFades(x, rate);
  const double rms = Rms<double>(x);
  const double target = std::pow(10.0, spec.level_dbfs / 20.0);
  for (double &v : x) v *= target / rms;
  return Waveform(std::move(x), rate);
}

Corpus SynthCorpus(const SynthCorpusSpec &spec, const std::string &out_dir) {
  Require(spec.clips_per_class >= 1, ErrorCode::kConfig, "synth corpus: clips_per_class must be >= 1");
  Require(spec.sample_rate > 0, ErrorCode::kConfig, "synth corpus: bad sample rate");
  Require(spec.min_duration_s > 0.0 && spec.max_duration_s >= spec.min_duration_s, ErrorCode::kConfig,
          "synth corpus: bad duration range");
  fs::create_directories(out_dir);
  std::vector<CorpusEntry> entries;
  std::ofstream ontology(fs::path(out_dir) / "ontology.tsv"), harmonicity(fs::path(out_dir) / "harmonicity.tsv");
  Require(ontology && harmonicity, ErrorCode::kIo, "cannot write lookup files under '", out_dir, "'");
  for (const SynthClassInfo &info : SynthClasses()) {
    ontology << info.name << '\t' << info.super_class << '\n';
    harmonicity << info.name << '\t' << info.harmonicity << '\n';
    const std::string dir = info.name;
    fs::create_directories(fs::path(out_dir) / dir);
    for (int i = 0; i < spec.clips_per_class; ++i) {
      const Waveform w = SynthesizeClip(spec, info.id, i);
      char name[32];
      std::snprintf(name, sizeof(name), "%02d.wav", i);
      const std::string rel = dir + "/" + name;
      WriteWav((fs::path(out_dir) / rel).string(), w, WavFormat::kFloat32);
      entries.push_back({rel, info.name, info.super_class, info.harmonicity,
                         static_cast<double>(w.size()) / w.sample_rate, w.sample_rate});
    }
  }
  const std::string manifest = (fs::path(out_dir) / "manifest.tsv").string();
  SaveManifest(manifest, entries);
  return LoadManifest(manifest);
}

double SpectralFlatness(const Waveform &wave, int frame) {
  Eigen::FFT<double> fft;
  std::vector<double> buf(static_cast<std::size_t>(frame));
  std::vector<std::complex<double>> spec;
  const double threshold = std::pow(10.0, ActivityOptions{}.threshold_dbfs / 20.0);
  double total = 0.0;
  int count = 0;
  for (std::size_t start = 0; start + frame <= wave.size(); start += frame / 2) {
    const std::span<const double> seg = wave.span().subspan(start, frame);
    if (Rms(seg) <= threshold) continue;
    for (int i = 0; i < frame; ++i)
      buf[i] = seg[i] * (0.5 - 0.5 * std::cos(kTwoPi * i / frame));  // Hann
    fft.fwd(spec, buf);
    double log_sum = 0.0, sum = 0.0;
    const int bins = frame / 2 + 1;
    for (int k = 0; k < bins; ++k) {
      const double p = std::norm(spec[k]) + 1e-12;
      log_sum += std::log(p);
      sum += p;
    }
    total += std::exp(log_sum / bins) / (sum / bins);
    ++count;
  }
  return count ? total / count : 0.0;
}

}  // namespace octsep
