// trainer/setup.cc

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

#include "trainer/setup.h"

namespace octsep {

namespace {

int PositiveInt(const Config &config, const std::string &key) {
  const long long v = config.GetInt(key);
  Require(v > 0 && v < (1ll << 31), ErrorCode::kConfig, key, " must be a positive integer, got ", v);
  return static_cast<int>(v);
}

}  // namespace

MixturePreset PresetFromConfig(const Config &config) {
  MixturePreset p = NamedPreset(config.Get("mix.preset"), ParsePairStrategy(config.Get("mix.strategy")));
  p.min_onset_gap_s = config.GetDouble("cond.min_onset_gap_s");
  p.duration_s = config.GetDouble("mix.duration_s");
  p.Validate();
  return p;
}

DatasetSizes SizesFromConfig(const Config &config) {
  DatasetSizes s = NamedSizes(config.Get("mix.scale"));
  if (const long long v = config.GetInt("mix.train_size"); v > 0) s.train = static_cast<std::size_t>(v);
  if (const long long v = config.GetInt("mix.val_size"); v > 0) s.validation = static_cast<std::size_t>(v);
  if (const long long v = config.GetInt("mix.test_size"); v > 0) s.test = static_cast<std::size_t>(v);
  return s;
}

RegimeOptions RegimeOptionsFromConfig(const Config &config) {
  RegimeOptions o;
  o.regime = RegimeSpec::Parse(config.Get("train.regime"));
  o.prior = RegimeOptions::ParsePrior(config.Get("train.prior"));
  o.candidate_types = RegimeOptions::ParseTypeSet(config.Get("train.candidates"));
  o.anchor = RegimeOptions::ParseAnchor(config.Get("train.anchor"));
  o.reg_weight = config.GetDouble("refine.reg_weight");
  Require(o.reg_weight >= 0.0, ErrorCode::kConfig, "refine.reg_weight must be nonnegative");
  o.stop_gradient_target = config.GetBool("refine.stop_gradient_target");
  return o;
}

ModelConfig ModelConfigFromConfig(const Config &config, bool use_refiner) {
  ModelConfig m;
  const int dc = PositiveInt(config, "cond.dim");
  m.separator.num_blocks = PositiveInt(config, "model.blocks");
  m.separator.channels = PositiveInt(config, "model.channels");
  m.separator.hidden_channels = PositiveInt(config, "model.hidden");
  m.separator.enc_kernel = PositiveInt(config, "model.enc_kernel");
  m.separator.enc_stride = PositiveInt(config, "model.enc_stride");
  m.separator.upsampling_depth = PositiveInt(config, "model.depth");
  m.separator.condition_dim = dc;

  m.text.backend = ParseTextBackend(config.Get("cond.text_backend"));
  m.text.dim = PositiveInt(config, "cond.text_dim");
  m.text.buckets = PositiveInt(config, "cond.text_buckets");
  m.text.seed = config.GetUint64("cond.text_seed");
  m.text.table_path = config.Get("cond.text_table");
  m.text.pooling = ParseTextPooling(config.Get("cond.text_pooling"));

  m.use_refiner = use_refiner;
  m.refiner.channels = PositiveInt(config, "refine.channels");
  m.refiner.enc_kernel = PositiveInt(config, "refine.enc_kernel");
  m.refiner.enc_stride = PositiveInt(config, "refine.enc_stride");
  m.refiner.stages = PositiveInt(config, "refine.stages");
  m.refiner.stage_stride = PositiveInt(config, "refine.stage_stride");
  m.refiner.heads = PositiveInt(config, "refine.heads");
  m.refiner.mixture_dim = PositiveInt(config, "refine.mixture_dim");
  m.refiner.hidden = PositiveInt(config, "refine.hidden");
  m.refiner.condition_dim = dc;
  const std::string init = config.Get("refine.init");
  if (init == "pass-through") {
    m.refiner_init = RefinerInit::kPassThrough;
  } else if (init == "random") {
    m.refiner_init = RefinerInit::kRandom;
  } else {
    Fail(ErrorCode::kConfig, "refine.init must be pass-through or random, got '", init, "'");
  }
  m.Validate();
  return m;
}

ModelConfig ModelConfigFromConfig(const Config &config) {
  return ModelConfigFromConfig(config, RegimeSpec::Parse(config.Get("train.regime")).regime == Regime::kOctpp);
}

std::shared_ptr<const ClipStore> ClipStoreFromConfig(const Config &config) {
  auto corpus = std::make_shared<const Corpus>(LoadManifest(config.Get("corpus.manifest")));
  return std::make_shared<const ClipStore>(corpus, PresetFromConfig(config).sample_rate);
}

Split ParseSplit(const std::string &s) {
  if (s == "train") return Split::kTrain;
  if (s == "validation" || s == "val") return Split::kValidation;
  if (s == "test") return Split::kTest;
  Fail(ErrorCode::kConfig, "unknown split '", s, "' (expected train, validation or test)");
}

DatasetStream StreamForSplit(const Config &config, std::shared_ptr<const ClipStore> clips, Split split) {
  const DatasetSizes sizes = SizesFromConfig(config);
  const MixturePreset preset = PresetFromConfig(config);
  switch (split) {
    case Split::kTrain:
      return DatasetStream(std::move(clips), preset, sizes.train, DeriveSeed({config.GetUint64("seed"), 0x74a1}));
    case Split::kValidation:
      return DatasetStream(std::move(clips), preset, sizes.validation, config.GetUint64("mix.val_seed"));
    case Split::kTest:
      return DatasetStream(std::move(clips), preset, sizes.test, config.GetUint64("mix.test_seed"));
  }
  Fail(ErrorCode::kInternal, "unhandled split");
}

}  // namespace octsep
