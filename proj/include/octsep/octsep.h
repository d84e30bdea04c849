// octsep/octsep.h

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

// C interface to the octsep conditional separation library. All handles are
// opaque; every fallible call returns an octsep_status and leaves a
// description in octsep_last_error() on failure. Strings returned by the
// library stay valid until the next call on the same handle (or, for
// octsep_last_error, the next failing call on the same thread).

#ifndef OCTSEP_OCTSEP_H_
#define OCTSEP_OCTSEP_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define OCTSEP_API __declspec(dllexport)
#else
#define OCTSEP_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum octsep_status {
  OCTSEP_OK = 0,
  OCTSEP_ERR_INVALID_ARGUMENT = 1,
  OCTSEP_ERR_IO = 2,
  OCTSEP_ERR_CONFIG = 3,
  OCTSEP_ERR_DATA = 4,
  OCTSEP_ERR_NUMERIC = 5,
  OCTSEP_ERR_UNSUPPORTED = 6,
  OCTSEP_ERR_INTERNAL = 7
} octsep_status;

typedef struct octsep_session octsep_session;
typedef struct octsep_model octsep_model;

// Receives one progress line at a time.
typedef void (*octsep_log_fn)(const char *line, void *user);

OCTSEP_API const char *octsep_version(void);
OCTSEP_API const char *octsep_status_name(octsep_status status);
OCTSEP_API const char *octsep_last_error(void);

// Sessions hold a configuration and the JSON result of the last command.
OCTSEP_API octsep_status octsep_session_create(octsep_session **out);
OCTSEP_API void octsep_session_destroy(octsep_session *session);
OCTSEP_API octsep_status octsep_session_load_config(octsep_session *session, const char *path);
OCTSEP_API octsep_status octsep_session_set(octsep_session *session, const char *key, const char *value);
OCTSEP_API octsep_status octsep_session_apply_environment(octsep_session *session);
OCTSEP_API octsep_status octsep_session_get(octsep_session *session, const char *key, const char **value);
OCTSEP_API octsep_status octsep_session_dump_config(octsep_session *session, const char **text);
// Documented configuration keys as "key<TAB>default<TAB>description" lines.
OCTSEP_API const char *octsep_config_schema(void);
OCTSEP_API const char *octsep_session_result(octsep_session *session);
OCTSEP_API void octsep_session_set_log(octsep_session *session, octsep_log_fn fn, void *user);

// Commands. Each stores a JSON document retrievable with
// octsep_session_result().
OCTSEP_API octsep_status octsep_synth_corpus(octsep_session *session, const char *out_dir);
OCTSEP_API octsep_status octsep_gen_manifest(octsep_session *session, const char *out_path);
OCTSEP_API octsep_status octsep_inspect_mixture(octsep_session *session, const char *split, uint64_t index,
                                                uint64_t epoch, const char *wav_dir);
OCTSEP_API octsep_status octsep_train(octsep_session *session);
OCTSEP_API octsep_status octsep_evaluate(octsep_session *session);
OCTSEP_API octsep_status octsep_report(octsep_session *session, const char *const *summaries, size_t count,
                                       const char *out_dir);

// Trained models.
OCTSEP_API octsep_status octsep_model_load(const char *checkpoint, octsep_model **out);
OCTSEP_API void octsep_model_destroy(octsep_model *model);
OCTSEP_API octsep_status octsep_model_num_params(const octsep_model *model, int64_t *out);
OCTSEP_API int octsep_model_has_refiner(const octsep_model *model);
// Separates `mixture` for a condition given as type ("energy", "harmonicity",
// "order", "text") and value ("high", "percussive", "first", a class
// description, ...). A NULL type runs the unconditioned (null-query) path.
// Both outputs hold `length` samples.
OCTSEP_API octsep_status octsep_model_separate(const octsep_model *model, const float *mixture, size_t length,
                                               const char *condition_type, const char *condition_value,
                                               float *target, float *other);

#ifdef __cplusplus
}
#endif

#endif  // OCTSEP_OCTSEP_H_
