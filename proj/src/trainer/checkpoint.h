// trainer/checkpoint.h

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

#ifndef OCTSEP_TRAINER_CHECKPOINT_H_
#define OCTSEP_TRAINER_CHECKPOINT_H_

#include <map>
#include <string>

#include "json.hpp"
#include "nn/adam.h"
#include "trainer/model.h"

namespace octsep {

inline constexpr int kCheckpointVersion = 1;

// Single-file archive: an 8-byte magic, a JSON header (schema version,
// config echo, counters, tensor directory) and raw little-endian float32
// tensor data in directory order. Optimizer moments live under "adam/m/" and
// "adam/v/"; refiner parameters under "refiner/".
struct Checkpoint {
  nlohmann::json header = nlohmann::json::object();
  std::map<std::string, nn::Mat<float>> tensors;
};

void SaveCheckpoint(const std::string &path, const Checkpoint &ckpt);
Checkpoint LoadCheckpoint(const std::string &path);

// Copies parameters and, when given, optimizer state into the archive.
void StoreModel(Model &model, const nn::Adam<float> *adam, Checkpoint *ckpt);
// Restores parameters by name. Every model tensor must be present except the
// refiner namespace, which keeps its initialization when the archive has
// none. Shape mismatches are errors.
void RestoreModel(const Checkpoint &ckpt, Model *model, nn::Adam<float> *adam);
bool HasRefiner(const Checkpoint &ckpt);

}  // namespace octsep

#endif  // OCTSEP_TRAINER_CHECKPOINT_H_
