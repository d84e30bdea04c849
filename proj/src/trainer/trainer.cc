// trainer/trainer.cc

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

#include "trainer/trainer.h"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "base/allocator.h"
#include "signal/metrics.h"

namespace octsep {

namespace fs = std::filesystem;

TrainOptions TrainOptions::FromConfig(const Config &config) {
  TrainOptions o;
  o.batch_size = static_cast<int>(config.GetInt("train.batch_size"));
  o.lr = config.GetDouble("train.lr");
  o.lr_halving_epochs = static_cast<int>(config.GetInt("train.lr_halving_epochs"));
  o.epochs = static_cast<int>(config.GetInt("train.epochs"));
  o.batches_per_epoch = config.GetInt("train.batches_per_epoch");
  o.grad_clip = config.GetDouble("train.grad_clip");
  o.validate = config.GetBool("train.validate");
  o.resume = config.GetBool("train.resume");
  o.seed = config.GetUint64("seed");
  Require(o.batch_size >= 1, ErrorCode::kConfig, "train.batch_size must be >= 1");
  Require(o.lr > 0.0, ErrorCode::kConfig, "train.lr must be positive");
  Require(o.lr_halving_epochs >= 1, ErrorCode::kConfig, "train.lr_halving_epochs must be >= 1");
  Require(o.epochs >= 0, ErrorCode::kConfig, "train.epochs must be >= 0");
  Require(o.batches_per_epoch >= 0, ErrorCode::kConfig, "train.batches_per_epoch must be >= 0");
  Require(o.grad_clip >= 0.0, ErrorCode::kConfig, "train.grad_clip must be >= 0");
  return o;
}

double LearningRate(double base, int halving_epochs, int epoch) {
  Require(halving_epochs >= 1 && epoch >= 0, ErrorCode::kInvalidArgument, "bad learning-rate schedule arguments");
  return base * std::ldexp(1.0, -(epoch / halving_epochs));
}

nlohmann::json StepReport::ToJson(const RegimeSpec &regime) const {
  nlohmann::json j = {{"schema", kMetricsSchema}, {"kind", "step"},       {"step", step},
                      {"epoch", epoch},           {"regime", regime.ToString()}, {"lr", lr},
                      {"grad_norm", grad_norm},   {"loss", loss},        {"trained", trained},
                      {"skipped", skipped}};
  double target = 0.0, other = 0.0, anchor = 0.0, input = 0.0, consistency = 0.0;
  int anchors = 0;
  for (const SampleReport &s : samples) {
    if (s.skipped) continue;
    target += s.terms.target;
    other += s.terms.other;
    if (s.anchor_loss) {
      anchor += *s.anchor_loss;
      ++anchors;
    }
    if (s.input_loss) input += *s.input_loss;
    if (s.consistency) consistency += *s.consistency;
  }
  const double n = std::max(trained, 1);
  nlohmann::json terms = {{"target", target / n}, {"other", other / n}};
  if (regime.regime == Regime::kOct || regime.regime == Regime::kOctpp) {
    double selected = 0.0;
    for (const SampleReport &s : samples)
      if (!s.skipped) selected += s.table[s.selected].loss;
    terms["selected"] = selected / n;
    nlohmann::json counts = nlohmann::json::object();
    for (ConditionType t : kAllConditionTypes) counts[ConditionTypeName(t)] = selected_counts[Index(t)];
    j["c_star"] = counts;
  }
  if (regime.regime == Regime::kOct) {
    terms["anchor"] = anchor / n;
    j["anchor_updates"] = anchors;
  }
  if (regime.regime == Regime::kOctpp) {
    terms["input"] = input / n;
    terms["consistency"] = consistency / n;
  }
  if (regime.regime == Regime::kPit) j["permutations"] = {{"identity", permutation_counts[0]}, {"swapped", permutation_counts[1]}};
  j["terms"] = terms;
  return j;
}

Trainer::Trainer(Model *model, RegimeOptions regime, TrainOptions opts)
    : model_(model), regime_(std::move(regime)), opts_(opts) {
  Require(model_ != nullptr, ErrorCode::kInvalidArgument, "trainer needs a model");
  Require(regime_.regime.regime != Regime::kOctpp || model_->has_refiner(), ErrorCode::kConfig,
          "octpp regime requires a model with a refiner");
}

StepReport Trainer::Step(const std::vector<TrainExample> &batch, int epoch) {
  Require(!batch.empty(), ErrorCode::kInvalidArgument, "empty batch");
  StepReport r;
  r.epoch = epoch;
  r.lr = LearningRate(opts_.lr, opts_.lr_halving_epochs, epoch);
  model_->ZeroGrad();
  double total = 0.0;
  for (const TrainExample &ex : batch) {
    const auto finite = [](const std::vector<float> &v) {
      for (float x : v)
        if (!std::isfinite(x)) return false;
      return true;
    };
    Require(finite(ex.mixture) && finite(ex.sources[0]) && finite(ex.sources[1]), ErrorCode::kNumeric,
            "non-finite input at epoch ", epoch, " step ", adam_.steps() + 1, "; sample seed ", ex.seed);
    SampleReport s;
    try {
      s = TrainSample(*model_, ex, regime_, 1.0);
    } catch (const Error &e) {
      Fail(e.code(), e.what(), " (epoch ", epoch, " step ", adam_.steps() + 1, ", sample seed ", ex.seed, ")");
    }
    if (s.skipped) {
      ++r.skipped;
    } else {
      ++r.trained;
      total += s.loss;
      if (s.selected >= 0) ++r.selected_counts[Index(s.table[s.selected].condition.type)];
      ++r.permutation_counts[s.permutation[0] == 0 ? 0 : 1];
    }
    r.samples.push_back(std::move(s));
  }
  r.step = adam_.steps();
  if (r.trained == 0) return r;
  model_->ScaleGrad(1.0 / r.trained);
  r.loss = total / r.trained;
  r.grad_norm = model_->GradNorm();
  if (!std::isfinite(r.loss) || !std::isfinite(r.grad_norm)) {
    std::ostringstream seeds;
    for (std::size_t i = 0; i < batch.size(); ++i) seeds << (i ? "," : "") << batch[i].seed;
    Fail(ErrorCode::kNumeric, "non-finite ", std::isfinite(r.loss) ? "gradient" : "loss", " at epoch ", epoch,
         " step ", adam_.steps() + 1, "; batch sample seeds ", seeds.str());
  }
  if (opts_.grad_clip > 0.0 && r.grad_norm > opts_.grad_clip) model_->ScaleGrad(opts_.grad_clip / r.grad_norm);
  adam_.Step(*model_, r.lr);
  r.step = adam_.steps();
  return r;
}

ValidationResult Validate(const Model &model, const std::vector<TrainExample> &examples, const RegimeSpec &regime) {
  ValidationResult v;
  double sum = 0.0, sumi = 0.0;
  for (const TrainExample &ex : examples) {
    if (regime.regime == Regime::kPit) {
      const SeparatorOutput<float> out = model.SeparateUnconditioned(ex.mixture);
      const std::array<const std::vector<float> *, 2> est = {&out.target, &out.other};
      double best = -std::numeric_limits<double>::infinity();
      for (int p = 0; p < 2; ++p)
        best = std::max(best, SiSdr<float>(*est[p], ex.sources[0]) + SiSdr<float>(*est[1 - p], ex.sources[1]));
      sum += best;
      sumi += best - SiSdr<float>(ex.mixture, ex.sources[0]) - SiSdr<float>(ex.mixture, ex.sources[1]);
      v.pairs += 2;
      continue;
    }
    for (int t = 0; t < 2; ++t) {
      const Condition c = ConditionFor(ex.annotation, t, ConditionType::kText);
      const SeparatorOutput<float> out = model.Separate(ex.mixture, c);
      const double s = SiSdr<float>(out.target, ex.sources[t]);
      sum += s;
      sumi += s - SiSdr<float>(ex.mixture, ex.sources[t]);
      ++v.pairs;
    }
  }
  if (v.pairs > 0) {
    v.si_sdr = sum / v.pairs;
    v.si_sdri = sumi / v.pairs;
  }
  return v;
}

std::vector<TrainExample> MaterializeSplit(const DatasetStream &stream, std::size_t epoch) {
  std::vector<TrainExample> out;
  out.reserve(stream.size());
  for (std::size_t i = 0; i < stream.size(); ++i) out.push_back(MakeTrainExample(stream.Get(epoch, i)));
  return out;
}

std::uint64_t ModelLayoutHash(const Config &config) {
  std::ostringstream os;
  for (const auto &[k, v] : config.values())
    if (k.rfind("model.", 0) == 0 || k.rfind("refine.", 0) == 0 || k.rfind("cond.", 0) == 0 || k == "train.regime")
      os << k << '=' << v << '\n';
  return Fnv1a64(os.str());
}

namespace {

std::vector<std::string> ReadLines(const std::string &path) {
  std::vector<std::string> lines;
  std::ifstream in(path);
  for (std::string line; std::getline(in, line);)
    if (!line.empty()) lines.push_back(line);
  return lines;
}

// Drops records written after the checkpoint being resumed from.
void TruncateMetrics(const std::string &path, int epochs_completed) {
  std::vector<std::string> keep;
  for (const std::string &line : ReadLines(path)) {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const std::exception &) {
      continue;
    }
    const std::string kind = j.value("kind", "");
    if ((kind == "step" && j.value("epoch", 0) < epochs_completed) ||
        (kind == "epoch" && j.value("epochs_completed", 0) <= epochs_completed) || kind == "run")
      keep.push_back(line);
  }
  std::ofstream out(path, std::ios::trunc);
  for (const std::string &line : keep) out << line << '\n';
}

}  // namespace

TrainResult RunTraining(const Config &config, std::shared_ptr<const ClipStore> clips, std::ostream *log) {
  RetainHeapMemory();
  const TrainOptions opts = TrainOptions::FromConfig(config);
  const RegimeOptions regime = RegimeOptionsFromConfig(config);
  const ModelConfig model_config = ModelConfigFromConfig(config);
  const fs::path dir = config.Get("out.dir");
  fs::create_directories(dir);

  TrainResult result;
  result.best_checkpoint = (dir / "best.ckpt").string();
  result.last_checkpoint = (dir / "last.ckpt").string();
  result.metrics_path = (dir / "metrics.jsonl").string();

  Model model(model_config);
  model.Init(opts.seed);
  Trainer trainer(&model, regime, opts);
  const DatasetStream train = StreamForSplit(config, clips, Split::kTrain);
  std::vector<TrainExample> val;
  if (opts.validate) val = MaterializeSplit(StreamForSplit(config, clips, Split::kValidation));

  int start_epoch = 0;
  double best = -std::numeric_limits<double>::infinity();
  const std::uint64_t layout = ModelLayoutHash(config);
  if (opts.resume && fs::exists(result.last_checkpoint)) {
    const Checkpoint ckpt = LoadCheckpoint(result.last_checkpoint);
    Require(ckpt.header.value("layout_hash", std::uint64_t{0}) == layout, ErrorCode::kConfig, "'",
            result.last_checkpoint, "' was written with a different model configuration");
    Require(ckpt.header.value("seed", std::uint64_t{0}) == opts.seed, ErrorCode::kConfig, "'",
            result.last_checkpoint, "' was written with a different seed");
    RestoreModel(ckpt, &model, &trainer.optimizer());
    start_epoch = ckpt.header.at("epochs_completed");
    if (ckpt.header.contains("best_validation") && ckpt.header["best_validation"].is_number())
      best = ckpt.header["best_validation"].get<double>();
    TruncateMetrics(result.metrics_path, start_epoch);
    if (log) *log << "resuming " << result.last_checkpoint << " after epoch " << start_epoch << "\n";
  } else {
    std::ofstream(result.metrics_path, std::ios::trunc);
  }
  std::ofstream metrics(result.metrics_path, std::ios::app);
  Require(metrics.good(), ErrorCode::kIo, "cannot write '", result.metrics_path, "'");

  const auto write = [&](const nlohmann::json &j) {
    metrics << j.dump() << '\n';
    metrics.flush();
  };
  const auto validation_json = [&](const ValidationResult &v) {
    return nlohmann::json{{"si_sdr", v.si_sdr}, {"si_sdri", v.si_sdri}, {"pairs", v.pairs},
                          {"condition", regime.regime.regime == Regime::kPit ? "pit-oracle" : "text"}};
  };
  if (start_epoch == 0) {
    nlohmann::json run = {{"schema", kMetricsSchema},        {"kind", "run"},
                          {"regime", regime.regime.ToString()}, {"seed", opts.seed},
                          {"config_hash", config.Hash()},     {"parameters", model.NumParams()},
                          {"train_size", train.size()},       {"validation_size", val.size()}};
    nlohmann::json epoch0 = {{"schema", kMetricsSchema}, {"kind", "epoch"}, {"epochs_completed", 0}};
    if (opts.validate) epoch0["validation"] = validation_json(Validate(model, val, regime.regime));
    write(run);
    write(epoch0);
  }

  const auto save = [&](const std::string &path, int epochs_completed) {
    Checkpoint ckpt;
    ckpt.header["config"] = config.Dump();
    ckpt.header["config_hash"] = config.Hash();
    ckpt.header["layout_hash"] = layout;
    ckpt.header["regime"] = regime.regime.ToString();
    ckpt.header["seed"] = opts.seed;
    ckpt.header["epochs_completed"] = epochs_completed;
    ckpt.header["best_validation"] = std::isfinite(best) ? nlohmann::json(best) : nlohmann::json(nullptr);
    // Every random draw derives from (seed, epoch, index), so the seed is the
    // full generator state at an epoch boundary.
    ckpt.header["rng"] = {{"seed", opts.seed}, {"train_stream_seed", train.seed()}, {"next_epoch", epochs_completed}};
    StoreModel(model, &trainer.optimizer(), &ckpt);
    SaveCheckpoint(path, ckpt);
  };

  std::size_t batches = (train.size() + opts.batch_size - 1) / opts.batch_size;
  if (opts.batches_per_epoch > 0) batches = std::min<std::size_t>(batches, opts.batches_per_epoch);
  for (int epoch = start_epoch; epoch < opts.epochs; ++epoch) {
    const auto t0 = std::chrono::steady_clock::now();
    double loss_sum = 0.0;
    long long trained = 0;
    for (std::size_t b = 0; b < batches; ++b) {
      std::vector<TrainExample> batch;
      for (std::size_t i = b * opts.batch_size; i < std::min(train.size(), (b + 1) * opts.batch_size); ++i)
        batch.push_back(MakeTrainExample(train.Get(epoch, i)));
      const StepReport r = trainer.Step(batch, epoch);
      loss_sum += r.loss * r.trained;
      trained += r.trained;
      write(r.ToJson(regime.regime));
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    nlohmann::json rec = {{"schema", kMetricsSchema},
                          {"kind", "epoch"},
                          {"epochs_completed", epoch + 1},
                          {"lr", LearningRate(opts.lr, opts.lr_halving_epochs, epoch)},
                          {"train_loss", trained > 0 ? loss_sum / trained : 0.0},
                          {"train_seconds", seconds}};
    bool improved = !opts.validate;
    if (opts.validate) {
      const ValidationResult v = Validate(model, val, regime.regime);
      rec["validation"] = validation_json(v);
      if (v.si_sdr > best) {
        best = v.si_sdr;
        improved = true;
      }
    }
    rec["best"] = improved;
    save(result.last_checkpoint, epoch + 1);
    if (improved) save(result.best_checkpoint, epoch + 1);
    write(rec);
    if (log) {
      *log << "epoch " << epoch + 1 << "/" << opts.epochs << " loss " << rec["train_loss"].get<double>();
      if (opts.validate) *log << " val SI-SDR " << rec["validation"]["si_sdr"].get<double>() << " dB";
      *log << " (" << seconds << " s)\n";
      log->flush();
    }
  }
  if (opts.epochs == 0 || !fs::exists(result.last_checkpoint)) {
    save(result.last_checkpoint, start_epoch);
    if (!fs::exists(result.best_checkpoint)) save(result.best_checkpoint, start_epoch);
  }
  result.epochs_completed = std::max(start_epoch, opts.epochs);
  result.best_validation = best;
  return result;
}

LoadedModel LoadModel(const std::string &checkpoint_path) {
  const Checkpoint ckpt = LoadCheckpoint(checkpoint_path);
  LoadedModel out;
  Require(ckpt.header.contains("config"), ErrorCode::kData, "'", checkpoint_path, "' has no config echo");
  out.config.Parse(ckpt.header.at("config").get<std::string>(), checkpoint_path + ":config");
  out.model = std::make_unique<Model>(ModelConfigFromConfig(out.config, HasRefiner(ckpt)));
  out.model->Init(out.config.GetUint64("seed"));
  RestoreModel(ckpt, out.model.get(), nullptr);
  out.header = ckpt.header;
  return out;
}

}  // namespace octsep
