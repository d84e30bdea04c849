// trainer/checkpoint.cc

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

#include "trainer/checkpoint.h"

#include <cstdio>
#include <cstring>
#include <fstream>

namespace octsep {

namespace {

constexpr char kMagic[8] = {'O', 'C', 'T', 'C', 'K', 'P', 'T', '\n'};
const std::string kRefinerPrefix = "refiner/";
const std::string kAdamM = "adam/m/";
const std::string kAdamV = "adam/v/";

bool StartsWith(const std::string &s, const std::string &prefix) { return s.rfind(prefix, 0) == 0; }

}  // namespace

void SaveCheckpoint(const std::string &path, const Checkpoint &ckpt) {
  nlohmann::json header = ckpt.header;
  header["schema"] = "octsep.checkpoint";
  header["version"] = kCheckpointVersion;
  nlohmann::json dir = nlohmann::json::array();
  for (const auto &[name, m] : ckpt.tensors) dir.push_back({{"name", name}, {"rows", m.rows()}, {"cols", m.cols()}});
  header["tensors"] = dir;
  const std::string text = header.dump();

  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    Require(out.good(), ErrorCode::kIo, "cannot write checkpoint '", tmp, "'");
    out.write(kMagic, sizeof(kMagic));
    const std::uint64_t len = text.size();
    out.write(reinterpret_cast<const char *>(&len), sizeof(len));
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    for (const auto &[name, m] : ckpt.tensors)
      out.write(reinterpret_cast<const char *>(m.data()), static_cast<std::streamsize>(m.size() * sizeof(float)));
    Require(out.good(), ErrorCode::kIo, "short write to checkpoint '", tmp, "'");
  }
  Require(std::rename(tmp.c_str(), path.c_str()) == 0, ErrorCode::kIo, "cannot move checkpoint into '", path, "'");
}

Checkpoint LoadCheckpoint(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  Require(in.good(), ErrorCode::kIo, "cannot open checkpoint '", path, "'");
  char magic[sizeof(kMagic)];
  in.read(magic, sizeof(magic));
  Require(in.good() && std::memcmp(magic, kMagic, sizeof(kMagic)) == 0, ErrorCode::kData, "'", path,
          "' is not an octsep checkpoint");
  std::uint64_t len = 0;
  in.read(reinterpret_cast<char *>(&len), sizeof(len));
  Require(in.good() && len < (1ull << 30), ErrorCode::kData, "'", path, "': corrupt header length");
  std::string text(len, '\0');
  in.read(text.data(), static_cast<std::streamsize>(len));
  Require(in.good(), ErrorCode::kData, "'", path, "': truncated header");
  Checkpoint ckpt;
  try {
    ckpt.header = nlohmann::json::parse(text);
  } catch (const std::exception &e) {
    Fail(ErrorCode::kData, "'", path, "': bad header: ", e.what());
  }
  const int version = ckpt.header.value("version", -1);
  Require(version == kCheckpointVersion, ErrorCode::kData, "'", path, "': unsupported checkpoint version ", version);
  for (const auto &t : ckpt.header.at("tensors")) {
    const std::string name = t.at("name");
    const long rows = t.at("rows"), cols = t.at("cols");
    Require(rows >= 0 && cols >= 0, ErrorCode::kData, "'", path, "': bad shape for '", name, "'");
    nn::Mat<float> m(rows, cols);
    in.read(reinterpret_cast<char *>(m.data()), static_cast<std::streamsize>(m.size() * sizeof(float)));
    Require(in.good(), ErrorCode::kData, "'", path, "': truncated tensor '", name, "'");
    ckpt.tensors.emplace(name, std::move(m));
  }
  ckpt.header.erase("tensors");
  return ckpt;
}

void StoreModel(Model &model, const nn::Adam<float> *adam, Checkpoint *ckpt) {
  model.Visit([&](const std::string &name, nn::Param<float> &p) { ckpt->tensors[name] = p.value; });
  if (adam == nullptr) return;
  for (const auto &[name, s] : adam->state()) {
    ckpt->tensors[kAdamM + name] = s.m;
    ckpt->tensors[kAdamV + name] = s.v;
  }
  ckpt->header["adam_steps"] = adam->steps();
}

void RestoreModel(const Checkpoint &ckpt, Model *model, nn::Adam<float> *adam) {
  model->Visit([&](const std::string &name, nn::Param<float> &p) {
    const auto it = ckpt.tensors.find(name);
    if (it == ckpt.tensors.end()) {
      Require(StartsWith(name, kRefinerPrefix), ErrorCode::kData, "checkpoint has no tensor '", name, "'");
      return;
    }
    Require(it->second.rows() == p.value.rows() && it->second.cols() == p.value.cols(), ErrorCode::kData,
            "checkpoint tensor '", name, "' is ", it->second.rows(), "x", it->second.cols(), ", model expects ",
            p.value.rows(), "x", p.value.cols());
    p.value = it->second;
  });
  if (adam == nullptr) return;
  adam->state().clear();
  for (const auto &[name, m] : ckpt.tensors) {
    if (!StartsWith(name, kAdamM)) continue;
    const std::string param = name.substr(kAdamM.size());
    const auto v = ckpt.tensors.find(kAdamV + param);
    Require(v != ckpt.tensors.end(), ErrorCode::kData, "checkpoint lacks second moment for '", param, "'");
    adam->state()[param] = {m, v->second};
  }
  adam->set_steps(ckpt.header.value("adam_steps", 0ll));
}

bool HasRefiner(const Checkpoint &ckpt) {
  for (const auto &[name, m] : ckpt.tensors)
    if (StartsWith(name, kRefinerPrefix)) return true;
  return false;
}

}  // namespace octsep
