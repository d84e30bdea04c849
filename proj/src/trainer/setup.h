// trainer/setup.h

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

#ifndef OCTSEP_TRAINER_SETUP_H_
#define OCTSEP_TRAINER_SETUP_H_

#include <memory>
#include <string>

#include "config/config.h"
#include "mixgen/mixture.h"
#include "trainer/model.h"
#include "trainer/regimes.h"

namespace octsep {

// Translation of the flat key-value configuration into module configs.
MixturePreset PresetFromConfig(const Config &config);
DatasetSizes SizesFromConfig(const Config &config);
RegimeOptions RegimeOptionsFromConfig(const Config &config);
// The refiner is built for the octpp regime only.
ModelConfig ModelConfigFromConfig(const Config &config, bool use_refiner);
ModelConfig ModelConfigFromConfig(const Config &config);

// Loads corpus.manifest and wraps it in a clip store at the preset rate.
std::shared_ptr<const ClipStore> ClipStoreFromConfig(const Config &config);

enum class Split { kTrain, kValidation, kTest };
Split ParseSplit(const std::string &s);

// Frozen held-out sets use their own seeds; the training stream derives its
// seed from the master seed.
DatasetStream StreamForSplit(const Config &config, std::shared_ptr<const ClipStore> clips, Split split);

}  // namespace octsep

#endif  // OCTSEP_TRAINER_SETUP_H_
