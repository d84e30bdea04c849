// config/config.cc

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

#include "config/config.h"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "base/error.h"
#include "base/random.h"

namespace octsep {

namespace {

std::string Trim(const std::string &s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  return s.substr(b, s.find_last_not_of(" \t\r\n") - b + 1);
}

}  // namespace

const std::vector<ConfigKey> &Config::Schema() {
  static const std::vector<ConfigKey> kSchema = {
      {"seed", "1", "master seed for parameter init and training streams"},
      {"out.dir", "out", "output directory for checkpoints, logs and reports"},
      {"corpus.manifest", "corpus/manifest.tsv", "manifest consumed by train/evaluate"},
      {"corpus.synth_clips_per_class", "25", "synthetic corpus: clips per class"},
      {"corpus.synth_seed", "1592639710", "synthetic corpus: generator seed"},
      {"corpus.synth_sample_rate", "8000", "synthetic corpus: sample rate"},
      {"corpus.synth_min_duration_s", "1.5", "synthetic corpus: shortest clip"},
      {"corpus.synth_max_duration_s", "4.0", "synthetic corpus: longest clip"},
      {"corpus.format", "tree", "gen-manifest input: tree (<root>/<class>/*.wav) or fsd50k"},
      {"corpus.audio_root", "", "gen-manifest: audio root for the tree format"},
      {"corpus.fsd50k_root", "", "gen-manifest: FSD50K root for the fsd50k format"},
      {"corpus.ontology", "", "gen-manifest: class<TAB>super-class file"},
      {"corpus.harmonicity", "", "gen-manifest: class<TAB>harmonic|percussive file"},
      {"mix.preset", "hard", "hard (U[0,2.5] dB, overlap 0.8) or easy (U[0,5] dB, overlap 0.6)"},
      {"mix.strategy", "random", "random, different-superclass or same-superclass"},
      {"mix.duration_s", "5.0", "mixture length in seconds"},
      {"mix.scale", "desk", "dataset sizes: desk (2000/200/500) or paper (20000/3000/5000)"},
      {"mix.train_size", "0", "mixtures per epoch; 0 uses the scale default"},
      {"mix.val_size", "0", "validation mixtures; 0 uses the scale default"},
      {"mix.test_size", "0", "test mixtures; 0 uses the scale default"},
      {"mix.val_seed", "1001", "frozen validation set seed"},
      {"mix.test_seed", "2002", "frozen test set seed"},
      {"cond.dim", "128", "condition vector dimension d_c"},
      {"cond.min_onset_gap_s", "0.05", "order condition validity threshold"},
      {"cond.text_backend", "hashed", "hashed or external (token table)"},
      {"cond.text_dim", "64", "hashed text embedding dimension"},
      {"cond.text_buckets", "1024", "hashed text embedding buckets"},
      {"cond.text_seed", "32327", "hashed text embedding seed"},
      {"cond.text_table", "", "external backend: token<TAB>vector file"},
      {"cond.text_pooling", "mean", "external backend pooling: mean or first"},
      {"model.blocks", "2", "separator U-ConvBlocks B"},
      {"model.channels", "64", "separator channels"},
      {"model.hidden", "128", "separator block hidden channels"},
      {"model.enc_kernel", "21", "separator encoder kernel (samples)"},
      {"model.enc_stride", "10", "separator encoder stride (samples)"},
      {"model.depth", "4", "resolutions per block"},
      {"refine.channels", "64", "refiner encoder channels"},
      {"refine.enc_kernel", "21", "refiner encoder kernel"},
      {"refine.enc_stride", "10", "refiner encoder stride"},
      {"refine.stages", "4", "refiner depthwise downsampling stages"},
      {"refine.stage_stride", "4", "refiner stage stride"},
      {"refine.heads", "2", "refiner attention pooling heads"},
      {"refine.mixture_dim", "128", "mixture embedding dimension d_phi"},
      {"refine.hidden", "256", "refinement MLP hidden width"},
      {"refine.init", "pass-through", "pass-through or random"},
      {"refine.reg_weight", "1.0", "weight of the refinement consistency term"},
      {"refine.stop_gradient_target", "false", "treat r(x,c*) as a constant in the consistency term"},
      {"train.regime", "oct", "pit, hct, oct, octpp or single:<type>"},
      {"train.batch_size", "6", "mixtures per optimizer step"},
      {"train.lr", "0.001", "initial learning rate"},
      {"train.lr_halving_epochs", "15", "halve the learning rate every this many epochs"},
      {"train.epochs", "10", "training epochs"},
      {"train.batches_per_epoch", "0", "cap on batches per epoch; 0 means the whole epoch"},
      {"train.prior", "energy:1,harmonicity:1,order:1,text:1", "condition sampling weights"},
      {"train.candidates", "energy,harmonicity,order,text", "condition types eligible for the optimal-condition sweep"},
      {"train.anchor", "none", "anchor condition type for oct/octpp, or none"},
      {"train.grad_clip", "5.0", "global gradient norm clip; 0 disables"},
      {"train.validate", "true", "run validation after every epoch"},
      {"train.resume", "false", "continue from <out.dir>/last.ckpt when present"},
      {"eval.protocol", "condition", "condition, ensemble, oracle-oct or pit-oracle"},
      {"eval.condition", "text", "condition type for the condition protocol"},
      {"eval.checkpoint", "", "checkpoint to evaluate; empty uses <out.dir>/best.ckpt"},
      {"eval.models", "", "ensemble: type=checkpoint pairs, comma separated"},
      {"eval.split", "test", "test or validation"},
      {"eval.name", "", "report name; empty derives one from the protocol"},
  };
  return kSchema;
}

Config::Config() {
  for (const ConfigKey &k : Schema()) values_[k.key] = k.default_value;
}

void Config::LoadFile(const std::string &path) {
  std::ifstream in(path);
  Require(static_cast<bool>(in), ErrorCode::kIo, "cannot open config '", path, "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  Parse(ss.str(), path);
}

void Config::Parse(const std::string &text, const std::string &origin) {
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string body = Trim(line.substr(0, line.find('#')));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    Require(eq != std::string::npos, ErrorCode::kConfig, origin, ":", line_no, ": expected key = value");
    const std::string key = Trim(body.substr(0, eq));
    Require(values_.count(key), ErrorCode::kConfig, origin, ":", line_no, ": unknown key '", key, "'");
    values_[key] = Trim(body.substr(eq + 1));
  }
}

void Config::Set(const std::string &key, const std::string &value) {
  Require(values_.count(key), ErrorCode::kConfig, "unknown config key '", key, "'");
  values_[key] = value;
}

void Config::ApplyEnvironment() {
  if (const char *v = std::getenv("OCTSEP_CORPUS_ROOT"); v && *v) values_["corpus.manifest"] = std::string(v) + "/manifest.tsv";
  if (const char *v = std::getenv("OCTSEP_OUT_DIR"); v && *v) values_["out.dir"] = v;
  if (const char *v = std::getenv("OCTSEP_FSD50K_ROOT"); v && *v) values_["corpus.fsd50k_root"] = v;
}

bool Config::Has(const std::string &key) const { return values_.count(key) > 0; }

const std::string &Config::Get(const std::string &key) const {
  const auto it = values_.find(key);
  Require(it != values_.end(), ErrorCode::kConfig, "unknown config key '", key, "'");
  return it->second;
}

double Config::GetDouble(const std::string &key) const {
  const std::string &v = Get(key);
  try {
    std::size_t used = 0;
    const double d = std::stod(v, &used);
    if (used == v.size()) return d;
  } catch (const std::exception &) {
  }
  Fail(ErrorCode::kConfig, "config key '", key, "': expected a number, got '", v, "'");
}

long long Config::GetInt(const std::string &key) const {
  const std::string &v = Get(key);
  try {
    std::size_t used = 0;
    const long long d = std::stoll(v, &used, 0);
    if (used == v.size()) return d;
  } catch (const std::exception &) {
  }
  Fail(ErrorCode::kConfig, "config key '", key, "': expected an integer, got '", v, "'");
}

std::uint64_t Config::GetUint64(const std::string &key) const {
  const std::string &v = Get(key);
  try {
    std::size_t used = 0;
    Require(v.empty() || v[0] != '-', ErrorCode::kConfig, "negative");
    const unsigned long long d = std::stoull(v, &used, 0);
    if (used == v.size()) return d;
  } catch (const std::exception &) {
  }
  Fail(ErrorCode::kConfig, "config key '", key, "': expected a non-negative integer, got '", v, "'");
}

bool Config::GetBool(const std::string &key) const {
  const std::string &v = Get(key);
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  Fail(ErrorCode::kConfig, "config key '", key, "': expected true or false, got '", v, "'");
}

std::string Config::Dump() const {
  std::ostringstream out;
  for (const auto &[k, v] : values_) out << k << " = " << v << "\n";
  return out.str();
}

std::uint64_t Config::Hash() const { return Fnv1a64(Dump()); }

}  // namespace octsep
