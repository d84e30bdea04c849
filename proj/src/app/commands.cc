// app/commands.cc

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

#include "app/commands.h"

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "eval/report.h"
#include "mixgen/synth_corpus.h"
#include "signal/wav_io.h"
#include "trainer/trainer.h"

namespace octsep {

namespace fs = std::filesystem;

namespace {

std::string Hex(std::uint64_t v) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << v;
  return os.str();
}

std::uint64_t Checksum(const std::vector<double> &x) {
  return Fnv1a64(std::string_view(reinterpret_cast<const char *>(x.data()), x.size() * sizeof(double)));
}

std::uint64_t FileChecksum(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  Require(in.good(), ErrorCode::kIo, "cannot open '", path, "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return Fnv1a64(ss.str());
}

// Line-buffered stream forwarding complete lines to a callback.
class LogBuf : public std::stringbuf {
 public:
  explicit LogBuf(LogFn fn) : fn_(std::move(fn)) {}
  int sync() override {
    std::string s = str();
    std::size_t start = 0;
    for (std::size_t nl; (nl = s.find('\n', start)) != std::string::npos; start = nl + 1)
      if (fn_) fn_(s.substr(start, nl - start));
    str(s.substr(start));
    return 0;
  }

 private:
  LogFn fn_;
};

nlohmann::json AnnotationJson(const ConditionAnnotation &a) {
  nlohmann::json valid = nlohmann::json::object();
  for (ConditionType t : kAllConditionTypes) valid[ConditionTypeName(t)] = a.IsValid(t);
  nlohmann::json sources = nlohmann::json::array();
  for (int k = 0; k < 2; ++k)
    sources.push_back({{"energy", a.sources[k].energy},
                       {"harmonicity", a.sources[k].harmonicity},
                       {"order", a.sources[k].order},
                       {"text", a.sources[k].text},
                       {"energy_value", a.energies[k]},
                       {"onset_s", a.onsets_s[k]}});
  return {{"valid", valid}, {"sources", sources}};
}

// Layout keys must agree between the evaluation config and the checkpoint.
void CheckCompatible(const Config &session, const Config &ckpt, const std::string &path) {
  for (const auto &[key, value] : ckpt.values()) {
    const bool layout = key.rfind("model.", 0) == 0 || key.rfind("cond.", 0) == 0 ||
                        (key.rfind("refine.", 0) == 0 && key != "refine.reg_weight" &&
                         key != "refine.stop_gradient_target" && key != "refine.init");
    if (layout && session.Get(key) != value)
      Fail(ErrorCode::kConfig, "checkpoint/config mismatch: '", path, "' has ", key, " = ", value,
           " but the configuration has ", session.Get(key));
  }
}

std::string DefaultCheckpoint(const Config &config) {
  const std::string explicit_path = config.Get("eval.checkpoint");
  return explicit_path.empty() ? (fs::path(config.Get("out.dir")) / "best.ckpt").string() : explicit_path;
}

}  // namespace

nlohmann::json SynthCorpusCommand(Config *config, const std::string &out_dir) {
  SynthCorpusSpec spec;
  spec.clips_per_class = static_cast<int>(config->GetInt("corpus.synth_clips_per_class"));
  spec.seed = config->GetUint64("corpus.synth_seed");
  spec.sample_rate = static_cast<int>(config->GetInt("corpus.synth_sample_rate"));
  spec.min_duration_s = config->GetDouble("corpus.synth_min_duration_s");
  spec.max_duration_s = config->GetDouble("corpus.synth_max_duration_s");
  const std::string dir = out_dir.empty() ? fs::path(config->Get("corpus.manifest")).parent_path().string() : out_dir;
  Require(!dir.empty(), ErrorCode::kConfig, "no output directory for the synthetic corpus");
  const Corpus corpus = SynthCorpus(spec, dir);
  const std::string manifest = (fs::path(dir) / "manifest.tsv").string();
  config->Set("corpus.manifest", manifest);
  return {{"manifest", manifest},
          {"clips", corpus.entries().size()},
          {"classes", corpus.classes()},
          {"checksum", Hex(FileChecksum(manifest))}};
}

nlohmann::json GenManifestCommand(const Config &config, const std::string &out_path) {
  const std::string format = config.Get("corpus.format");
  const std::string ontology = config.Get("corpus.ontology"), harm = config.Get("corpus.harmonicity");
  Require(!ontology.empty() && !harm.empty(), ErrorCode::kConfig,
          "gen-manifest needs corpus.ontology and corpus.harmonicity");
  std::vector<CorpusEntry> entries;
  std::string root;
  if (format == "tree") {
    root = config.Get("corpus.audio_root");
    Require(!root.empty(), ErrorCode::kConfig, "gen-manifest: corpus.audio_root is empty");
    entries = ScanClassTree(root, ontology, harm);
  } else if (format == "fsd50k") {
    root = config.Get("corpus.fsd50k_root");
    Require(!root.empty(), ErrorCode::kConfig, "gen-manifest: corpus.fsd50k_root is empty");
    entries = ScanFsd50k(root, ontology, harm);
  } else {
    Fail(ErrorCode::kConfig, "corpus.format must be tree or fsd50k, got '", format, "'");
  }
  const std::string path = out_path.empty() ? config.Get("corpus.manifest") : out_path;
  // Relative clip paths resolve against the manifest directory.
  const fs::path base = fs::absolute(fs::path(path)).parent_path();
  for (CorpusEntry &e : entries) {
    const fs::path abs = fs::absolute(fs::path(root) / e.path);
    e.path = fs::relative(abs, base).string();
  }
  if (!base.empty()) fs::create_directories(base);
  SaveManifest(path, entries);
  const Corpus corpus = LoadManifest(path);
  return {{"manifest", path}, {"clips", corpus.entries().size()}, {"classes", corpus.classes().size()}};
}

nlohmann::json InspectMixtureCommand(const Config &config, const std::string &split, std::size_t index,
                                     std::size_t epoch, const std::string &wav_dir) {
  const auto clips = ClipStoreFromConfig(config);
  const DatasetStream stream = StreamForSplit(config, clips, ParseSplit(split));
  Require(index < stream.size(), ErrorCode::kInvalidArgument, "index ", index, " is outside the ", split,
          " split of ", stream.size(), " mixtures");
  const MixtureSample s = stream.Get(epoch, index);
  nlohmann::json sources = nlohmann::json::array();
  for (int k = 0; k < 2; ++k) {
    const CorpusEntry &e = clips->corpus().entries()[s.entries[k]];
    sources.push_back({{"path", e.path},
                       {"class", e.class_name},
                       {"super_class", e.super_class},
                       {"harmonicity", e.harmonicity},
                       {"checksum", Hex(Checksum(s.sources[k].samples))}});
  }
  nlohmann::json j = {{"split", split},
                      {"index", index},
                      {"epoch", epoch},
                      {"seed", s.seed},
                      {"preset", stream.preset().name},
                      {"strategy", PairStrategyName(stream.preset().strategy)},
                      {"sample_rate", s.mixture.sample_rate},
                      {"num_samples", s.mixture.samples.size()},
                      {"snr_db", s.snr_db},
                      {"overlap", s.overlap},
                      {"sources", sources},
                      {"annotation", AnnotationJson(s.annotation)},
                      {"mixture_checksum", Hex(Checksum(s.mixture.samples))}};
  if (!wav_dir.empty()) {
    fs::create_directories(wav_dir);
    WriteWav((fs::path(wav_dir) / "mixture.wav").string(), s.mixture);
    WriteWav((fs::path(wav_dir) / "source0.wav").string(), s.sources[0]);
    WriteWav((fs::path(wav_dir) / "source1.wav").string(), s.sources[1]);
    j["wav_dir"] = wav_dir;
  }
  return j;
}

nlohmann::json TrainCommand(const Config &config, const LogFn &log) {
  LogBuf buf(log);
  std::ostream out(&buf);
  const auto clips = ClipStoreFromConfig(config);
  const TrainResult r = RunTraining(config, clips, &out);
  out.flush();
  return {{"best_checkpoint", r.best_checkpoint},
          {"last_checkpoint", r.last_checkpoint},
          {"metrics", r.metrics_path},
          {"epochs_completed", r.epochs_completed},
          {"best_validation_si_sdr", std::isfinite(r.best_validation) ? nlohmann::json(r.best_validation) : nullptr}};
}

nlohmann::json EvaluateCommand(const Config &config, const LogFn &log) {
  const std::string protocol = config.Get("eval.protocol");
  const auto clips = ClipStoreFromConfig(config);
  const std::string split = config.Get("eval.split");
  const DatasetStream stream = StreamForSplit(config, clips, ParseSplit(split));
  const TestSet test = MakeTestSet(stream);

  EvalReport report;
  nlohmann::json meta = {{"config_hash", Hex(config.Hash())},
                         {"split", split},
                         {"test_seed", stream.seed()},
                         {"test_size", stream.size()},
                         {"preset", stream.preset().name},
                         {"strategy", PairStrategyName(stream.preset().strategy)},
                         {"targets_per_mixture", 2}};
  std::string name = config.Get("eval.name");
  if (protocol == "ensemble") {
    std::vector<LoadedModel> loaded;
    std::vector<std::unique_ptr<ModelSeparation>> seps;
    std::map<ConditionType, const SeparationModel *> members;
    nlohmann::json ckpts = nlohmann::json::object();
    std::istringstream in(config.Get("eval.models"));
    loaded.reserve(kNumConditionTypes);
    for (std::string item; std::getline(in, item, ',');) {
      const auto eq = item.find('=');
      Require(eq != std::string::npos, ErrorCode::kConfig, "eval.models entry '", item, "': expected <type>=<checkpoint>");
      const ConditionType t = ParseConditionType(item.substr(0, eq));
      const std::string path = item.substr(eq + 1);
      loaded.push_back(LoadModel(path));
      CheckCompatible(config, loaded.back().config, path);
      seps.push_back(std::make_unique<ModelSeparation>(*loaded.back().model));
      members[t] = seps.back().get();
      ckpts[ConditionTypeName(t)] = {{"path", path}, {"id", Hex(FileChecksum(path))}};
    }
    Require(!members.empty(), ErrorCode::kConfig, "ensemble protocol needs eval.models");
    if (log) log("evaluating oracle ensemble of " + std::to_string(members.size()) + " models on " +
                 std::to_string(test.size) + " mixtures");
    report = EvaluateOracleEnsemble(members, test);
    meta["checkpoints"] = ckpts;
    meta["method"] = "oracle ensemble";
    if (name.empty()) name = "ensemble";
  } else {
    const std::string path = DefaultCheckpoint(config);
    const LoadedModel loaded = LoadModel(path);
    CheckCompatible(config, loaded.config, path);
    const ModelSeparation sep(*loaded.model);
    const std::string regime = loaded.header.value("regime", loaded.config.Get("train.regime"));
    meta["checkpoint"] = path;
    meta["checkpoint_id"] = Hex(FileChecksum(path));
    meta["regime"] = regime;
    meta["epochs_completed"] = loaded.header.value("epochs_completed", 0);
    if (log) log("evaluating " + protocol + " on " + std::to_string(test.size) + " " + split + " mixtures with " + path);
    if (protocol == "condition") {
      const ConditionType t = ParseConditionType(config.Get("eval.condition"));
      report = EvaluateCondition(sep, test, t);
      if (name.empty()) name = "condition-" + std::string(ConditionTypeName(t));
    } else if (protocol == "oracle-oct") {
      report = EvaluateOracleOct(sep, test);
      if (name.empty()) name = "oracle-oct";
    } else if (protocol == "pit-oracle") {
      report = EvaluatePitOracle(sep, test);
      if (name.empty()) name = "pit-oracle";
    } else {
      Fail(ErrorCode::kConfig, "unknown eval.protocol '", protocol,
           "' (expected condition, ensemble, oracle-oct or pit-oracle)");
    }
  }
  report.metadata = meta;
  if (config.Get("eval.name").empty())
    name += "-" + stream.preset().name + "-" + PairStrategyName(stream.preset().strategy);
  const std::string dir = (fs::path(config.Get("out.dir")) / "reports").string();
  const ReportFiles f = EmitReport(report, dir, name);
  nlohmann::json out = SummaryJson(report);
  out["files"] = {{"records", f.records}, {"summary", f.summary}, {"aggregate", f.aggregate},
                  {"table", f.table},     {"chart", f.chart}};
  return out;
}

nlohmann::json ReportCommand(const Config &config, const std::vector<std::string> &summaries,
                             const std::string &out_dir) {
  const fs::path reports = fs::path(config.Get("out.dir")) / "reports";
  std::vector<std::string> paths = summaries;
  if (paths.empty() && fs::exists(reports)) {
    for (const auto &e : fs::directory_iterator(reports)) {
      const std::string p = e.path().string();
      if (p.size() > 13 && p.substr(p.size() - 13) == ".summary.json") paths.push_back(p);
    }
    std::sort(paths.begin(), paths.end());
  }
  Require(!paths.empty(), ErrorCode::kInvalidArgument, "no report summaries found under '", reports.string(), "'");
  std::vector<nlohmann::json> loaded;
  for (const std::string &p : paths) {
    std::ifstream in(p);
    Require(in.good(), ErrorCode::kIo, "cannot open '", p, "'");
    try {
      loaded.push_back(nlohmann::json::parse(in));
    } catch (const std::exception &e) {
      Fail(ErrorCode::kData, "'", p, "': ", e.what());
    }
    Require(loaded.back().value("schema", "") == kReportSchema, ErrorCode::kData, "'", p,
            "' is not an evaluation summary");
  }
  const std::string dir = out_dir.empty() ? reports.string() : out_dir;
  const std::string table = EmitCombinedReport(loaded, dir);
  return {{"table", table}, {"chart", (fs::path(dir) / "conditions.svg").string()}, {"summaries", paths.size()}};
}

}  // namespace octsep
