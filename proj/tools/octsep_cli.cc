// tools/octsep_cli.cc

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

// Command-line front end. Talks to the library through the C interface only.

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "octsep/octsep.h"

namespace {

struct Failure {
  octsep_status status;
  std::string message;
};

void Check(octsep_status s) {
  if (s != OCTSEP_OK) throw Failure{s, octsep_last_error()};
}

void Set(octsep_session *session, const std::string &key, const std::string &value) {
  Check(octsep_session_set(session, key.c_str(), value.c_str()));
}

void PrintLog(const char *line, void *) { std::fprintf(stderr, "%s\n", line); }

int PrintError(const std::string &code, int status, const std::string &message) {
  const nlohmann::json j = {{"code", code}, {"status", status}, {"message", message}};
  std::fprintf(stderr, "octsep: error: %s\n", j.dump().c_str());
  return 1;
}

std::string StrategyName(const std::string &s) {
  static const std::map<std::string, std::string> names = {{"random", "random"},
                                                           {"different", "different-superclass"},
                                                           {"same", "same-superclass"}};
  return names.at(s);
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"octsep: conditional target sound separation with optimal condition training", "octsep"};
  app.require_subcommand(1);
  app.set_version_flag("--version", octsep_version());

  std::string config_path, preset, strategy, regime, device = "cpu", out_dir;
  std::vector<std::string> overrides;
  std::uint64_t seed = 0;
  bool quiet = false;
  const auto global = [&](CLI::App *a) {
    a->add_option("--config", config_path, "configuration file (key = value lines)")->check(CLI::ExistingFile);
    a->add_option("--seed", seed, "master seed");
    a->add_option("--preset", preset, "mixture difficulty")->check(CLI::IsMember({"hard", "easy"}));
    a->add_option("--strategy", strategy, "super-class pairing")->check(CLI::IsMember({"random", "different", "same"}));
    a->add_option("--regime", regime, "pit, hct, oct, octpp or single:<type>");
    a->add_option("--device", device, "compute device (cpu)");
    a->add_option("--out-dir", out_dir, "output directory");
    a->add_option("--set", overrides, "extra key=value configuration override (repeatable)");
    a->add_flag("--quiet", quiet, "suppress progress lines");
  };
  global(&app);
  app.fallthrough();

  std::string synth_out;
  CLI::App *synth = app.add_subcommand("synth-corpus", "write the synthetic 8-class corpus and its manifest");
  synth->add_option("--out", synth_out, "corpus directory (default: directory of corpus.manifest)");

  std::string gm_format, gm_root, gm_ontology, gm_harm, gm_out;
  CLI::App *gen = app.add_subcommand("gen-manifest", "scan an audio tree or FSD50K into a manifest");
  gen->add_option("--format", gm_format, "tree or fsd50k")->check(CLI::IsMember({"tree", "fsd50k"}));
  gen->add_option("--root", gm_root, "audio root");
  gen->add_option("--ontology", gm_ontology, "class<TAB>super-class file");
  gen->add_option("--harmonicity", gm_harm, "class<TAB>harmonic|percussive file");
  gen->add_option("--out", gm_out, "manifest path (default: corpus.manifest)");

  int epochs = -1;
  bool resume = false;
  CLI::App *train = app.add_subcommand("train", "train a separator under the selected regime");
  train->add_option("--epochs", epochs, "training epochs");
  train->add_flag("--resume", resume, "continue from <out-dir>/last.ckpt");

  std::string ev_protocol, ev_condition, ev_checkpoint, ev_models, ev_split, ev_name;
  CLI::App *evaluate = app.add_subcommand("evaluate", "score a checkpoint on the held-out set");
  evaluate->add_option("--protocol", ev_protocol, "condition, ensemble, oracle-oct or pit-oracle")
      ->check(CLI::IsMember({"condition", "ensemble", "oracle-oct", "pit-oracle"}));
  evaluate->add_option("--condition", ev_condition, "condition type for the condition protocol");
  evaluate->add_option("--checkpoint", ev_checkpoint, "checkpoint (default: <out-dir>/best.ckpt)");
  evaluate->add_option("--models", ev_models, "ensemble members as type=checkpoint,...");
  evaluate->add_option("--split", ev_split, "test or validation")->check(CLI::IsMember({"test", "validation"}));
  evaluate->add_option("--name", ev_name, "report name");

  std::vector<std::string> summaries;
  std::string report_out;
  CLI::App *report = app.add_subcommand("report", "merge evaluation summaries into a table and chart");
  report->add_option("summaries", summaries, "summary files (default: <out-dir>/reports/*.summary.json)");
  report->add_option("--out", report_out, "output directory");

  std::string im_split = "train", im_wav;
  std::uint64_t im_index = 0, im_epoch = 0;
  CLI::App *inspect = app.add_subcommand("inspect-mixture", "dump one seeded mixture and its annotation");
  inspect->add_option("--split", im_split, "train, validation or test")
      ->check(CLI::IsMember({"train", "validation", "test"}));
  inspect->add_option("--index", im_index, "mixture index within the split");
  inspect->add_option("--epoch", im_epoch, "training epoch (train split)");
  inspect->add_option("--wav-dir", im_wav, "also write mixture and source WAVs here");

  for (CLI::App *sub : {synth, gen, train, evaluate, report, inspect}) global(sub);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    app.exit(e);
    std::cerr << app.help();
    return 2;
  }

  octsep_session *session = nullptr;
  try {
    Check(octsep_session_create(&session));
    if (!quiet) octsep_session_set_log(session, PrintLog, nullptr);
    if (!config_path.empty()) Check(octsep_session_load_config(session, config_path.c_str()));
    Check(octsep_session_apply_environment(session));
    if (device != "cpu") throw Failure{OCTSEP_ERR_UNSUPPORTED, "device '" + device + "' is not available; use cpu"};
    for (const std::string &kv : overrides) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw Failure{OCTSEP_ERR_INVALID_ARGUMENT, "--set expects key=value, got '" + kv + "'"};
      Set(session, kv.substr(0, eq), kv.substr(eq + 1));
    }
    const std::vector<CLI::App *> used = app.get_subcommands();
    if (app.count("--seed") || std::any_of(used.begin(), used.end(), [](CLI::App *s) { return s->count("--seed") > 0; }))
      Set(session, "seed", std::to_string(seed));
    if (!preset.empty()) Set(session, "mix.preset", preset);
    if (!strategy.empty()) Set(session, "mix.strategy", StrategyName(strategy));
    if (!out_dir.empty()) Set(session, "out.dir", out_dir);

    octsep_status status = OCTSEP_OK;
    if (*synth) {
      status = octsep_synth_corpus(session, synth_out.empty() ? nullptr : synth_out.c_str());
    } else if (*gen) {
      if (!gm_format.empty()) Set(session, "corpus.format", gm_format);
      if (!gm_root.empty()) Set(session, gm_format == "fsd50k" ? "corpus.fsd50k_root" : "corpus.audio_root", gm_root);
      if (!gm_ontology.empty()) Set(session, "corpus.ontology", gm_ontology);
      if (!gm_harm.empty()) Set(session, "corpus.harmonicity", gm_harm);
      status = octsep_gen_manifest(session, gm_out.empty() ? nullptr : gm_out.c_str());
    } else if (*train) {
      if (!regime.empty()) Set(session, "train.regime", regime);
      if (epochs >= 0) Set(session, "train.epochs", std::to_string(epochs));
      if (resume) Set(session, "train.resume", "true");
      status = octsep_train(session);
    } else if (*evaluate) {
      // --regime selects what the checkpoint is asked: single:<type> is the
      // condition protocol with that type, pit the permutation oracle.
      if (regime.rfind("single:", 0) == 0) {
        Set(session, "eval.protocol", "condition");
        Set(session, "eval.condition", regime.substr(7));
      } else if (regime == "pit") {
        Set(session, "eval.protocol", "pit-oracle");
      } else if (!regime.empty() && regime != "hct" && regime != "oct" && regime != "octpp") {
        throw Failure{OCTSEP_ERR_CONFIG, "unknown regime '" + regime + "'"};
      }
      if (!ev_protocol.empty()) Set(session, "eval.protocol", ev_protocol);
      if (!ev_condition.empty()) Set(session, "eval.condition", ev_condition);
      if (!ev_checkpoint.empty()) Set(session, "eval.checkpoint", ev_checkpoint);
      if (!ev_models.empty()) Set(session, "eval.models", ev_models);
      if (!ev_split.empty()) Set(session, "eval.split", ev_split);
      if (!ev_name.empty()) Set(session, "eval.name", ev_name);
      status = octsep_evaluate(session);
    } else if (*report) {
      std::vector<const char *> ptrs;
      for (const std::string &s : summaries) ptrs.push_back(s.c_str());
      status = octsep_report(session, ptrs.data(), ptrs.size(), report_out.empty() ? nullptr : report_out.c_str());
    } else if (*inspect) {
      status = octsep_inspect_mixture(session, im_split.c_str(), im_index, im_epoch,
                                      im_wav.empty() ? nullptr : im_wav.c_str());
    }
    Check(status);
    std::printf("%s\n", octsep_session_result(session));
    octsep_session_destroy(session);
    return 0;
  } catch (const Failure &f) {
    octsep_session_destroy(session);
    return PrintError(octsep_status_name(f.status), f.status, f.message);
  }
}
