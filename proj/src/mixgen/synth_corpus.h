// mixgen/synth_corpus.h

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

#ifndef OCTSEP_MIXGEN_SYNTH_CORPUS_H_
#define OCTSEP_MIXGEN_SYNTH_CORPUS_H_

#include <cstdint>
#include <string>
#include <vector>

#include "base/random.h"
#include "mixgen/corpus.h"
#include "signal/waveform.h"

namespace octsep {

enum class SynthClass {
  kOrgan,       // stacked sines
  kSynthLead,   // band-limited sawtooth melody
  kViolinLike,  // vibrato tone
  kSirenLike,   // periodic chirp
  kSnareLike,   // white-noise bursts
  kClockLike,   // click train
  kRainLike,    // band-pass noise with droplets
  kDrumLike,    // decaying low impulses
};

struct SynthClassInfo {
  SynthClass id;
  const char *name;
  const char *super_class;
  const char *harmonicity;
};

const std::vector<SynthClassInfo> &SynthClasses();

struct SynthCorpusSpec {
  int clips_per_class = 25;
  int sample_rate = 8000;
  double min_duration_s = 1.5;
  double max_duration_s = 4.0;
  double level_dbfs = -20.0;  // clip RMS
  std::uint64_t seed = 0x5eedc0de;
};

// One clip; a pure function of (spec, class, clip index).
Waveform SynthesizeClip(const SynthCorpusSpec &spec, SynthClass cls, int clip_index);

// Writes <out_dir>/<class name>/<nn>.wav, manifest.tsv, ontology.tsv and
// harmonicity.tsv, and returns the corpus read back from the manifest.
Corpus SynthCorpus(const SynthCorpusSpec &spec, const std::string &out_dir);

// Mean per-frame spectral flatness (geometric over arithmetic mean of the
// power spectrum) over frames above the activity threshold.
double SpectralFlatness(const Waveform &wave, int frame = 256);

}  // namespace octsep

#endif  // OCTSEP_MIXGEN_SYNTH_CORPUS_H_
