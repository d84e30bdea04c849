// capi/octsep_capi.cc

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

#include "octsep/octsep.h"

#include <cstring>
#include <memory>
#include <sstream>
#include <string>

#include "app/commands.h"
#include "base/allocator.h"
#include "trainer/trainer.h"

struct octsep_session {
  octsep::Config config;
  std::string result = "{}";
  std::string scratch;
  octsep_log_fn log = nullptr;
  void *log_user = nullptr;
};

struct octsep_model {
  octsep::LoadedModel loaded;
};

namespace {

thread_local std::string g_last_error;

octsep_status Record(octsep_status s, const std::string &what) {
  g_last_error = what;
  return s;
}

template <typename Fn>
octsep_status Guard(Fn &&fn) {
  try {
    fn();
    return OCTSEP_OK;
  } catch (const octsep::Error &e) {
    return Record(static_cast<octsep_status>(e.code()), e.what());
  } catch (const std::bad_alloc &) {
    return Record(OCTSEP_ERR_INTERNAL, "out of memory");
  } catch (const std::exception &e) {
    return Record(OCTSEP_ERR_INTERNAL, e.what());
  }
}

#define OCTSEP_REQUIRE_ARG(cond, what) \
  if (!(cond)) return Record(OCTSEP_ERR_INVALID_ARGUMENT, what)

std::string Str(const char *s) { return s ? s : ""; }

octsep::LogFn Logger(octsep_session *s) {
  if (!s->log) return {};
  return [s](const std::string &line) { s->log(line.c_str(), s->log_user); };
}

}  // namespace

extern "C" {

const char *octsep_version(void) { return "0.1.0"; }

const char *octsep_status_name(octsep_status status) {
  if (status == OCTSEP_OK) return "ok";
  return octsep::ErrorCodeName(static_cast<octsep::ErrorCode>(status));
}

const char *octsep_last_error(void) { return g_last_error.c_str(); }

octsep_status octsep_session_create(octsep_session **out) {
  OCTSEP_REQUIRE_ARG(out, "octsep_session_create: out is NULL");
  return Guard([&] {
    octsep::RetainHeapMemory();
    *out = new octsep_session();
  });
}

void octsep_session_destroy(octsep_session *session) { delete session; }

octsep_status octsep_session_load_config(octsep_session *session, const char *path) {
  OCTSEP_REQUIRE_ARG(session && path, "octsep_session_load_config: NULL argument");
  return Guard([&] { session->config.LoadFile(path); });
}

octsep_status octsep_session_set(octsep_session *session, const char *key, const char *value) {
  OCTSEP_REQUIRE_ARG(session && key && value, "octsep_session_set: NULL argument");
  return Guard([&] { session->config.Set(key, value); });
}

octsep_status octsep_session_apply_environment(octsep_session *session) {
  OCTSEP_REQUIRE_ARG(session, "octsep_session_apply_environment: NULL session");
  return Guard([&] { session->config.ApplyEnvironment(); });
}

octsep_status octsep_session_get(octsep_session *session, const char *key, const char **value) {
  OCTSEP_REQUIRE_ARG(session && key && value, "octsep_session_get: NULL argument");
  return Guard([&] {
    session->scratch = session->config.Get(key);
    *value = session->scratch.c_str();
  });
}

octsep_status octsep_session_dump_config(octsep_session *session, const char **text) {
  OCTSEP_REQUIRE_ARG(session && text, "octsep_session_dump_config: NULL argument");
  return Guard([&] {
    session->scratch = session->config.Dump();
    *text = session->scratch.c_str();
  });
}

const char *octsep_config_schema(void) {
  static const std::string text = [] {
    std::ostringstream os;
    for (const octsep::ConfigKey &k : octsep::Config::Schema())
      os << k.key << '\t' << k.default_value << '\t' << k.doc << '\n';
    return os.str();
  }();
  return text.c_str();
}

const char *octsep_session_result(octsep_session *session) { return session ? session->result.c_str() : "{}"; }

void octsep_session_set_log(octsep_session *session, octsep_log_fn fn, void *user) {
  if (!session) return;
  session->log = fn;
  session->log_user = user;
}

octsep_status octsep_synth_corpus(octsep_session *session, const char *out_dir) {
  OCTSEP_REQUIRE_ARG(session, "octsep_synth_corpus: NULL session");
  return Guard([&] { session->result = octsep::SynthCorpusCommand(&session->config, Str(out_dir)).dump(); });
}

octsep_status octsep_gen_manifest(octsep_session *session, const char *out_path) {
  OCTSEP_REQUIRE_ARG(session, "octsep_gen_manifest: NULL session");
  return Guard([&] { session->result = octsep::GenManifestCommand(session->config, Str(out_path)).dump(); });
}

octsep_status octsep_inspect_mixture(octsep_session *session, const char *split, uint64_t index, uint64_t epoch,
                                     const char *wav_dir) {
  OCTSEP_REQUIRE_ARG(session, "octsep_inspect_mixture: NULL session");
  return Guard([&] {
    session->result =
        octsep::InspectMixtureCommand(session->config, split ? split : "train", index, epoch, Str(wav_dir)).dump();
  });
}

octsep_status octsep_train(octsep_session *session) {
  OCTSEP_REQUIRE_ARG(session, "octsep_train: NULL session");
  return Guard([&] { session->result = octsep::TrainCommand(session->config, Logger(session)).dump(); });
}

octsep_status octsep_evaluate(octsep_session *session) {
  OCTSEP_REQUIRE_ARG(session, "octsep_evaluate: NULL session");
  return Guard([&] { session->result = octsep::EvaluateCommand(session->config, Logger(session)).dump(); });
}

octsep_status octsep_report(octsep_session *session, const char *const *summaries, size_t count, const char *out_dir) {
  OCTSEP_REQUIRE_ARG(session && (summaries || count == 0), "octsep_report: NULL argument");
  return Guard([&] {
    std::vector<std::string> paths;
    for (size_t i = 0; i < count; ++i) paths.push_back(Str(summaries[i]));
    session->result = octsep::ReportCommand(session->config, paths, Str(out_dir)).dump();
  });
}

octsep_status octsep_model_load(const char *checkpoint, octsep_model **out) {
  OCTSEP_REQUIRE_ARG(checkpoint && out, "octsep_model_load: NULL argument");
  return Guard([&] {
    octsep::RetainHeapMemory();
    auto m = std::make_unique<octsep_model>();
    m->loaded = octsep::LoadModel(checkpoint);
    *out = m.release();
  });
}

void octsep_model_destroy(octsep_model *model) { delete model; }

octsep_status octsep_model_num_params(const octsep_model *model, int64_t *out) {
  OCTSEP_REQUIRE_ARG(model && out, "octsep_model_num_params: NULL argument");
  return Guard([&] { *out = model->loaded.model->NumParams(); });
}

int octsep_model_has_refiner(const octsep_model *model) { return model && model->loaded.model->has_refiner(); }

octsep_status octsep_model_separate(const octsep_model *model, const float *mixture, size_t length,
                                    const char *condition_type, const char *condition_value, float *target,
                                    float *other) {
  OCTSEP_REQUIRE_ARG(model && mixture && target && other, "octsep_model_separate: NULL argument");
  OCTSEP_REQUIRE_ARG(length > 0, "octsep_model_separate: empty mixture");
  return Guard([&] {
    const std::span<const float> x(mixture, length);
    octsep::SeparatorOutput<float> out;
    if (condition_type == nullptr) {
      out = model->loaded.model->SeparateUnconditioned(x);
    } else {
      const octsep::Condition c{octsep::ParseConditionType(condition_type), Str(condition_value)};
      out = model->loaded.model->Separate(x, c);
    }
    std::memcpy(target, out.target.data(), length * sizeof(float));
    std::memcpy(other, out.other.data(), length * sizeof(float));
  });
}

}  // extern "C"
