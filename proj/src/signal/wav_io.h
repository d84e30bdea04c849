// signal/wav_io.h

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

#ifndef OCTSEP_SIGNAL_WAV_IO_H_
#define OCTSEP_SIGNAL_WAV_IO_H_

#include <string>

#include "signal/waveform.h"

namespace octsep {

enum class WavFormat { kPcm16, kFloat32 };

// Mono RIFF/WAVE reader: 16-bit integer PCM or 32-bit IEEE float
// (plain or WAVE_FORMAT_EXTENSIBLE). Samples are scaled to [-1, 1).
Waveform ReadWav(const std::string &path);

// Header-only probe: sample count and rate without decoding.
struct WavInfo {
  std::size_t num_samples = 0;
  int sample_rate = 0;
  int channels = 0;
};
WavInfo ProbeWav(const std::string &path);

// PCM16 output is clipped to full scale and rounded to nearest.
void WriteWav(const std::string &path, const Waveform &wave, WavFormat format = WavFormat::kFloat32);

}  // namespace octsep

#endif  // OCTSEP_SIGNAL_WAV_IO_H_
