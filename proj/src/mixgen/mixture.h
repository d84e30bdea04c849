// mixgen/mixture.h

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

#ifndef OCTSEP_MIXGEN_MIXTURE_H_
#define OCTSEP_MIXGEN_MIXTURE_H_

#include <array>
#include <cstdint>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "base/random.h"
#include "conditioning/condition.h"
#include "mixgen/corpus.h"
#include "signal/mixing.h"

namespace octsep {

enum class PairStrategy { kRandom, kDifferentSuperclass, kSameSuperclass };

const char *PairStrategyName(PairStrategy s);  // random | different-superclass | same-superclass
PairStrategy ParsePairStrategy(const std::string &name);

struct MixturePreset {
  std::string name = "hard";
  double snr_lo_db = 0.0;
  double snr_hi_db = 2.5;
  double min_overlap = 0.8;
  double duration_s = 5.0;
  int sample_rate = 8000;
  PairStrategy strategy = PairStrategy::kRandom;
  double min_onset_gap_s = 0.05;  // order condition validity

  std::size_t num_samples() const;
  void Validate() const;
};

// "hard": U[0, 2.5] dB, overlap >= 0.8. "easy": U[0, 5] dB, overlap >= 0.6.
MixturePreset NamedPreset(const std::string &name, PairStrategy strategy = PairStrategy::kRandom);

struct DatasetSizes {
  std::size_t train = 2000;  // mixtures per epoch
  std::size_t validation = 200;
  std::size_t test = 500;
};

// "desk" (2000/200/500) or "paper" (20000/3000/5000).
DatasetSizes NamedSizes(const std::string &scale);

struct ClipPair {
  std::array<int, 2> entries{};  // corpus entry indices
};

// Uniform over eligible unordered class pairs, random order, then uniform
// over clips within each class. Throws kData when the corpus cannot satisfy
// the strategy.
ClipPair SamplePair(const Corpus &corpus, PairStrategy strategy, Rng &rng);

// Decoded clip at the preset rate, with its activity support.
struct Clip {
  Waveform wave;
  IntervalSet activity;
};

// Lazily decodes and resamples corpus clips. Safe for concurrent use.
class ClipStore {
 public:
  ClipStore(std::shared_ptr<const Corpus> corpus, int sample_rate);
  const Corpus &corpus() const { return *corpus_; }
  std::shared_ptr<const Corpus> corpus_ptr() const { return corpus_; }
  std::shared_ptr<const Clip> Get(int entry) const;
  int sample_rate() const { return rate_; }

 private:
  std::shared_ptr<const Corpus> corpus_;
  int rate_;
  mutable std::mutex mu_;
  mutable std::vector<std::shared_ptr<const Clip>> cache_;
};

struct MixtureSample {
  Waveform mixture;
  std::array<Waveform, 2> sources;  // post-gain; sources[0] is the louder one
  std::array<int, 2> entries{};
  std::array<SourceMetadata, 2> metadata;
  ConditionAnnotation annotation;
  double snr_db = 0.0;
  double overlap = 0.0;
  std::uint64_t seed = 0;
};

inline constexpr int kMaxPlacementTries = 100;

// Places both clips on the preset canvas with random crops/onsets until the
// activity overlap reaches min_overlap, draws the SNR and annotates. A pure
// function of (pair, preset, seed).
MixtureSample Synthesize(const ClipStore &clips, const ClipPair &pair, const MixturePreset &preset,
                         std::uint64_t seed);

// Random-access stream: sample i of epoch e is generated from
// DeriveSeed(seed, e, i).
class DatasetStream {
 public:
  DatasetStream(std::shared_ptr<const ClipStore> clips, MixturePreset preset, std::size_t size,
                std::uint64_t seed);

  std::size_t size() const { return size_; }
  std::uint64_t seed() const { return seed_; }
  const MixturePreset &preset() const { return preset_; }
  std::uint64_t SampleSeed(std::size_t epoch, std::size_t index) const;
  MixtureSample Get(std::size_t epoch, std::size_t index) const;

 private:
  std::shared_ptr<const ClipStore> clips_;
  MixturePreset preset_;
  std::size_t size_;
  std::uint64_t seed_;
};

}  // namespace octsep

#endif  // OCTSEP_MIXGEN_MIXTURE_H_
