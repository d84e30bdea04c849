// app/commands.h

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

#ifndef OCTSEP_APP_COMMANDS_H_
#define OCTSEP_APP_COMMANDS_H_

#include <functional>
#include <string>
#include <vector>

#include "config/config.h"
#include "json.hpp"

namespace octsep {

using LogFn = std::function<void(const std::string &line)>;

// Writes the synthetic corpus into `out_dir` (empty: the directory of
// corpus.manifest) and points corpus.manifest at it.
nlohmann::json SynthCorpusCommand(Config *config, const std::string &out_dir);

// Scans corpus.audio_root (tree) or corpus.fsd50k_root (fsd50k) and writes a
// manifest to `out_path` (empty: corpus.manifest).
nlohmann::json GenManifestCommand(const Config &config, const std::string &out_path);

// One seeded mixture with its annotation; writes mixture and source WAVs
// when `wav_dir` is not empty.
nlohmann::json InspectMixtureCommand(const Config &config, const std::string &split, std::size_t index,
                                     std::size_t epoch, const std::string &wav_dir);

nlohmann::json TrainCommand(const Config &config, const LogFn &log);

// Runs eval.protocol on eval.split and emits the report under
// <out.dir>/reports. Returns the summary plus the written file paths.
nlohmann::json EvaluateCommand(const Config &config, const LogFn &log);

// Merges summary files (empty: every *.summary.json under
// <out.dir>/reports) into a method table and condition chart in `out_dir`
// (empty: <out.dir>/reports).
nlohmann::json ReportCommand(const Config &config, const std::vector<std::string> &summaries,
                             const std::string &out_dir);

}  // namespace octsep

#endif  // OCTSEP_APP_COMMANDS_H_
