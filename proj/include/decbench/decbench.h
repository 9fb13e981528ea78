// Copyright 2026 The decbench Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef DECBENCH_DECBENCH_H_
#define DECBENCH_DECBENCH_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(DECBENCH_BUILDING)
#define DECBENCH_API __declspec(dllexport)
#else
#define DECBENCH_API __declspec(dllimport)
#endif
#else
#define DECBENCH_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum decbench_status {
  DECBENCH_OK = 0,
  DECBENCH_INVALID_ARGUMENT = 1, /* null pointer, size mismatch */
  DECBENCH_DOMAIN = 2,           /* malformed model or parameter */
  DECBENCH_UNSUPPORTED = 3,      /* operation undefined for the inputs */
  DECBENCH_UNCONVERGED = 4,      /* saddle solver stopped above tolerance */
  DECBENCH_IO = 5,
  DECBENCH_CONFIG = 6,           /* bad or unknown config keys */
  DECBENCH_INTERNAL = 7
} decbench_status;

/* A model class with its designated true model and optional Q class. */
typedef struct decbench_class decbench_class;
/* Pass/fail lines from a run or verify call. */
typedef struct decbench_report decbench_report;

DECBENCH_API const char* decbench_version(void);
DECBENCH_API const char* decbench_status_string(decbench_status status);
/* Message of the last failed call on this thread; never null. */
DECBENCH_API const char* decbench_last_error(void);
DECBENCH_API void decbench_string_free(char* s);

DECBENCH_API decbench_status decbench_class_from_json(const char* json,
                                                      decbench_class** out);
/* "lock(H,Delta)", "ps-hard(H)", "bandit(...)" or "complete(...)". */
DECBENCH_API decbench_status decbench_make_environment(const char* key,
                                                       size_t true_model,
                                                       decbench_class** out);
/* Caller frees *out_json with decbench_string_free. */
DECBENCH_API decbench_status decbench_class_to_json(const decbench_class* cls,
                                                    char** out_json);
DECBENCH_API decbench_status decbench_class_dims(const decbench_class* cls,
                                                 size_t* num_models,
                                                 size_t* num_decisions,
                                                 size_t* num_q_functions);
DECBENCH_API void decbench_class_free(decbench_class* cls);

/* Solves the DEC at mu. mu ranges over models for "sq" and "hellinger" and
 * over the Q class for "bilinear" and "sbe". p_out receives num_decisions
 * entries. */
DECBENCH_API decbench_status decbench_solve_dec(
    const decbench_class* cls, const char* divergence, int optimistic,
    double gamma, const double* mu, size_t mu_len, double tol, double* value,
    double* gap, double* p_out, size_t p_len);

/* Runs a config file (or preset config) on the given seeds; seeds may be
 * null to use the config's own. */
DECBENCH_API decbench_status decbench_run_config(const char* config_path,
                                                 const char* out_dir,
                                                 const uint64_t* seeds,
                                                 size_t num_seeds, size_t jobs,
                                                 decbench_report** out);
DECBENCH_API decbench_status decbench_run_preset(const char* name,
                                                 const char* out_dir,
                                                 const uint64_t* seeds,
                                                 size_t num_seeds, size_t jobs,
                                                 decbench_report** out);
DECBENCH_API decbench_status decbench_verify(const char* suite,
                                             decbench_report** out);

DECBENCH_API size_t decbench_report_size(const decbench_report* report);
DECBENCH_API decbench_status decbench_report_line(const decbench_report* report,
                                                  size_t index,
                                                  const char** name,
                                                  int* passed,
                                                  const char** detail);
DECBENCH_API int decbench_report_passed(const decbench_report* report);
/* Summary document; owned by the report. */
DECBENCH_API const char* decbench_report_json(const decbench_report* report);
DECBENCH_API void decbench_report_free(decbench_report* report);

#ifdef __cplusplus
}
#endif

#endif /* DECBENCH_DECBENCH_H_ */
