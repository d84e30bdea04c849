// mixgen/mixture.cc

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

#include "mixgen/mixture.h"

#include <algorithm>
#include <cmath>

#include "signal/resample.h"
#include "signal/wav_io.h"

namespace octsep {

const char *PairStrategyName(PairStrategy s) {
  switch (s) {
    case PairStrategy::kRandom: return "random";
    case PairStrategy::kDifferentSuperclass: return "different-superclass";
    case PairStrategy::kSameSuperclass: return "same-superclass";
  }
  return "?";
}

PairStrategy ParsePairStrategy(const std::string &name) {
  for (PairStrategy s : {PairStrategy::kRandom, PairStrategy::kDifferentSuperclass, PairStrategy::kSameSuperclass})
    if (name == PairStrategyName(s)) return s;
  Fail(ErrorCode::kConfig, "unknown pairing strategy '", name,
       "' (expected random, different-superclass or same-superclass)");
}

std::size_t MixturePreset::num_samples() const {
  return static_cast<std::size_t>(std::llround(duration_s * sample_rate));
}

void MixturePreset::Validate() const {
  Require(snr_lo_db >= 0.0 && snr_lo_db <= snr_hi_db, ErrorCode::kConfig, "preset '", name,
          "': need 0 <= snr_lo <= snr_hi");
  Require(min_overlap > 0.0 && min_overlap <= 1.0, ErrorCode::kConfig, "preset '", name,
          "': min_overlap must be in (0, 1]");
  Require(sample_rate > 0 && duration_s > 0.0, ErrorCode::kConfig, "preset '", name,
          "': bad duration or sample rate");
  const double n = duration_s * sample_rate;
  Require(std::abs(n - std::round(n)) < 1e-9, ErrorCode::kConfig, "preset '", name,
          "': duration * sample_rate must be integral");
}

MixturePreset NamedPreset(const std::string &name, PairStrategy strategy) {
  MixturePreset p;
  p.name = name;
  p.strategy = strategy;
  if (name == "hard") {
    p.snr_lo_db = 0.0;
    p.snr_hi_db = 2.5;
    p.min_overlap = 0.8;
  } else if (name == "easy") {
    p.snr_lo_db = 0.0;
    p.snr_hi_db = 5.0;
    p.min_overlap = 0.6;
  } else {
    Fail(ErrorCode::kConfig, "unknown preset '", name, "' (expected hard or easy)");
  }
  return p;
}

DatasetSizes NamedSizes(const std::string &scale) {
  if (scale == "desk") return {2000, 200, 500};
  if (scale == "paper") return {20000, 3000, 5000};
  Fail(ErrorCode::kConfig, "unknown dataset scale '", scale, "' (expected desk or paper)");
}

ClipPair SamplePair(const Corpus &corpus, PairStrategy strategy, Rng &rng) {
  const int n = static_cast<int>(corpus.classes().size());
  // Eligible unordered class pairs; cheap to enumerate for any real corpus.
  std::vector<std::pair<int, int>> pairs;
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b) {
      const bool same = corpus.SuperClassOf(a) == corpus.SuperClassOf(b);
      if (strategy == PairStrategy::kDifferentSuperclass && same) continue;
      if (strategy == PairStrategy::kSameSuperclass && !same) continue;
      pairs.emplace_back(a, b);
    }
  Require(!pairs.empty(), ErrorCode::kData, "corpus cannot satisfy pairing strategy '",
          PairStrategyName(strategy), "' (", n, " classes)");
  auto [a, b] = pairs[UniformIndex(rng, pairs.size())];
  if (UniformIndex(rng, 2) == 1) std::swap(a, b);
  ClipPair out;
  const auto &ca = corpus.ClipsOf(a), &cb = corpus.ClipsOf(b);
  out.entries[0] = ca[UniformIndex(rng, ca.size())];
  out.entries[1] = cb[UniformIndex(rng, cb.size())];
  return out;
}

ClipStore::ClipStore(std::shared_ptr<const Corpus> corpus, int sample_rate)
    : corpus_(std::move(corpus)), rate_(sample_rate), cache_(corpus_->entries().size()) {
  Require(sample_rate > 0, ErrorCode::kConfig, "clip store: bad sample rate");
}

std::shared_ptr<const Clip> ClipStore::Get(int entry) const {
  Require(entry >= 0 && static_cast<std::size_t>(entry) < cache_.size(), ErrorCode::kInvalidArgument,
          "clip index out of range");
  {
    std::lock_guard<std::mutex> lock(mu_);
    if (cache_[entry]) return cache_[entry];
  }
  const CorpusEntry &e = corpus_->entries()[entry];
  Waveform w = ReadWav(corpus_->ResolvePath(e));
  if (w.sample_rate != rate_) w = Resample(w, rate_);
  auto clip = std::make_shared<Clip>();
  clip->activity = DetectActivity(w.span(), w.sample_rate);
  Require(!clip->activity.empty(), ErrorCode::kData, "clip '", e.path, "' has no active frames");
  clip->wave = std::move(w);
  std::lock_guard<std::mutex> lock(mu_);
  if (!cache_[entry]) cache_[entry] = std::move(clip);
  return cache_[entry];
}

namespace {

struct Placement {
  std::size_t crop_start = 0;  // first clip sample used
  std::size_t length = 0;      // samples copied
  std::size_t offset = 0;      // canvas position of the first copied sample
};

Placement DrawPlacement(const Clip &clip, std::size_t canvas, Rng &rng) {
  Placement p;
  const std::size_t n = clip.wave.size();
  if (n >= canvas) {
    p.crop_start = UniformIndex(rng, n - canvas + 1);
    p.length = canvas;
  } else {
    p.length = n;
    p.offset = UniformIndex(rng, canvas - n + 1);
  }
  return p;
}

IntervalSet PlacedActivity(const Clip &clip, const Placement &p, int rate) {
  const double lo = static_cast<double>(p.crop_start) / rate;
  const double hi = static_cast<double>(p.crop_start + p.length) / rate;
  IntervalSet out;
  for (const Interval &iv : clip.activity) {
    const double s = std::max(iv.start, lo), e = std::min(iv.end, hi);
    if (e > s) out.push_back({s - lo, e - lo});
  }
  return Shift(out, static_cast<double>(p.offset) / rate);
}

Waveform Place(const Clip &clip, const Placement &p, std::size_t canvas, int rate) {
  std::vector<double> x(canvas, 0.0);
  std::copy_n(clip.wave.samples.begin() + static_cast<std::ptrdiff_t>(p.crop_start), p.length,
              x.begin() + static_cast<std::ptrdiff_t>(p.offset));
  return Waveform(std::move(x), rate);
}

}  // namespace

MixtureSample Synthesize(const ClipStore &clips, const ClipPair &pair, const MixturePreset &preset,
                         std::uint64_t seed) {
  preset.Validate();
  Require(clips.sample_rate() == preset.sample_rate, ErrorCode::kConfig,
          "clip store rate differs from the preset rate");
  const Corpus &corpus = clips.corpus();
  Rng rng(seed);
  const std::size_t canvas = preset.num_samples();
  const int rate = preset.sample_rate;
  const std::array<std::shared_ptr<const Clip>, 2> clip = {clips.Get(pair.entries[0]), clips.Get(pair.entries[1])};

  std::array<Placement, 2> place;
  std::array<IntervalSet, 2> act;
  double overlap = -1.0;
  for (int attempt = 0; attempt < kMaxPlacementTries; ++attempt) {
    for (int k = 0; k < 2; ++k) {
      place[k] = DrawPlacement(*clip[k], canvas, rng);
      act[k] = PlacedActivity(*clip[k], place[k], rate);
    }
    if (act[0].empty() || act[1].empty()) continue;
    overlap = OverlapFraction(act[0], act[1]);
    if (overlap >= preset.min_overlap) break;
    overlap = -1.0;
  }
  Require(overlap >= 0.0, ErrorCode::kData, "cannot place clips '", corpus.entries()[pair.entries[0]].path,
          "' and '", corpus.entries()[pair.entries[1]].path, "' with overlap >= ", preset.min_overlap,
          " in ", kMaxPlacementTries, " tries");

  const double snr = Uniform(rng, preset.snr_lo_db, preset.snr_hi_db);
  const Waveform a = Place(*clip[0], place[0], canvas, rate);
  const Waveform b = Place(*clip[1], place[1], canvas, rate);
  const MixResult mix = MixAtSnr(a, b, snr);

  MixtureSample out;
  out.mixture = mix.mixture;
  out.sources[0] = a;
  out.sources[1] = b;
  for (double &v : out.sources[1].samples) v *= mix.gain_b;
  out.entries = pair.entries;
  for (int k = 0; k < 2; ++k) out.metadata[k] = corpus.entries()[pair.entries[k]].Metadata();
  out.annotation = Annotate({a, b}, {1.0, mix.gain_b}, {out.metadata[0], out.metadata[1]},
                            {act[0].front().start, act[1].front().start},
                            AnnotateOptions{preset.min_onset_gap_s});
  out.snr_db = snr;
  out.overlap = overlap;
  out.seed = seed;
  return out;
}

DatasetStream::DatasetStream(std::shared_ptr<const ClipStore> clips, MixturePreset preset, std::size_t size,
                             std::uint64_t seed)
    : clips_(std::move(clips)), preset_(std::move(preset)), size_(size), seed_(seed) {
  Require(size_ >= 1, ErrorCode::kConfig, "dataset stream: size must be >= 1");
  preset_.Validate();
}

std::uint64_t DatasetStream::SampleSeed(std::size_t epoch, std::size_t index) const {
  return DeriveSeed({seed_, static_cast<std::uint64_t>(epoch), static_cast<std::uint64_t>(index)});
}

MixtureSample DatasetStream::Get(std::size_t epoch, std::size_t index) const {
  Require(index < size_, ErrorCode::kInvalidArgument, "dataset stream: index ", index, " >= size ", size_);
  const std::uint64_t seed = SampleSeed(epoch, index);
  // Pair choice and placement use separate streams so that changing the
  // placement logic never reshuffles which clips are paired.
  Rng pair_rng(DeriveSeed({seed, 1}));
  const ClipPair pair = SamplePair(clips_->corpus(), preset_.strategy, pair_rng);
  return Synthesize(*clips_, pair, preset_, DeriveSeed({seed, 2}));
}

}  // namespace octsep
