// Copyright 2026 The pwmstream Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef PWM_PWM_H_
#define PWM_PWM_H_

/* C interface to the pwm library. Every function returns a pwm_status; on
 * failure pwm_last_error() describes the problem (thread-local, valid until
 * the next failing call on the same thread). Strings returned through char**
 * are owned by the caller and released with pwm_string_free. */

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define PWM_API __declspec(dllexport)
#else
#define PWM_API __attribute__((visibility("default")))
#endif

typedef enum pwm_status {
  PWM_OK = 0,
  PWM_ERR_INVALID_ARGUMENT = 1,
  PWM_ERR_CONTRACT = 2,        /* e.g. abstention passed to a synchronous rule */
  PWM_ERR_MISSING_PENDING = 3, /* label for a slot that was never predicted */
  PWM_ERR_NOT_APPLICABLE = 4,  /* bound precondition does not hold */
  PWM_ERR_BUDGET_EXCEEDED = 5, /* oracle enumeration too large */
  PWM_ERR_PARSE = 6,
  PWM_ERR_SCHEMA = 7,
  PWM_ERR_CONFIG = 8,
  PWM_ERR_VERSION = 9,
  PWM_ERR_IO = 10,
  PWM_ERR_INTERNAL = 11
} pwm_status;

PWM_API const char* pwm_last_error(void);
PWM_API const char* pwm_status_name(pwm_status status);
PWM_API const char* pwm_version(void);
PWM_API void pwm_string_free(char* s);

/* ---- aggregators ------------------------------------------------------ */

typedef struct pwm_aggregator pwm_aggregator;

typedef struct pwm_aggregator_options {
  int freeze_bias;     /* pwm/epwm: keep the bias weight at 0 */
  int64_t max_delay;   /* pending predictions older than this are dropped; < 0 = keep all */
  double beta;         /* wm, blum, trackexp */
  double gamma;        /* blum */
  double share_alpha;  /* trackexp */
} pwm_aggregator_options;

PWM_API pwm_aggregator_options pwm_aggregator_options_default(void);

/* kind: "pwm", "epwm", "wm", "blum", "trackexp", "am", "alone".
 * learner is the owning learner's 0-based index (used by "alone").
 * options may be NULL. */
PWM_API pwm_status pwm_aggregator_create(const char* kind, size_t learners, size_t learner,
                                         const pwm_aggregator_options* options,
                                         pwm_aggregator** out);
PWM_API void pwm_aggregator_destroy(pwm_aggregator* agg);

/* local: the K local predictions s_1..s_K, each -1, +1 or 0 (abstain).
 * *label receives -1 or +1. */
PWM_API pwm_status pwm_aggregator_predict(pwm_aggregator* agg, int64_t slot, const int8_t* local,
                                          size_t learners, int* label);
PWM_API pwm_status pwm_aggregator_observe(pwm_aggregator* agg, int64_t slot, int label);

/* Copies up to capacity weights; *length always receives the full count. */
PWM_API pwm_status pwm_aggregator_weights(const pwm_aggregator* agg, double* out, size_t capacity,
                                          size_t* length);
PWM_API pwm_status pwm_aggregator_snapshot(const pwm_aggregator* agg, char** json);
PWM_API pwm_status pwm_aggregator_restore(const char* json, pwm_aggregator** out);

/* ---- bounds ----------------------------------------------------------- */

PWM_API pwm_status pwm_bound_b1(size_t learners, size_t instances, double p_opt, double* out);
PWM_API pwm_status pwm_bound_b2(size_t learners, size_t instances, double p_star, size_t v_star,
                                double* out);
PWM_API pwm_status pwm_bound_b(size_t learners, size_t instances, double p_opt, double p_star,
                               size_t v_star, double* out);
PWM_API pwm_status pwm_bound_delayed(double base, const int64_t* max_delays, size_t learners,
                                     size_t instances, double* out);
PWM_API pwm_status pwm_lambda_term(double epsilon, double z, double* out);
PWM_API pwm_status pwm_bound_missing(double base, double mu, double epsilon,
                                     size_t observed_errors, double* out);
PWM_API pwm_status pwm_bound_async(double base, double alpha, double* out);

/* ---- best static aggregation ------------------------------------------ */

/* predictions: steps x learners row-major local predictions (+1/-1);
 * labels: steps entries. weights receives learners+1 values. */
PWM_API pwm_status pwm_static_oracle(const int8_t* predictions, const int* labels, size_t steps,
                                     size_t learners, int weight_cap, uint64_t budget,
                                     int64_t* weights, size_t* mistakes, int* exact);

/* ---- experiments ------------------------------------------------------ */

typedef struct pwm_experiment pwm_experiment;

PWM_API pwm_status pwm_experiment_load(const char* path, pwm_experiment** out);
PWM_API pwm_status pwm_experiment_parse(const char* json, const char* base_dir,
                                        pwm_experiment** out);
PWM_API void pwm_experiment_destroy(pwm_experiment* exp);

/* Runs every (sweep point, seed). output_dir may be NULL. *report receives
 * {"output_dir":..,"records":..,"summary":..,"runs":n,
 *  "failures":[{"seed":s,"point":p,"message":..}]}. Failed runs are listed
 * in the report; the call itself still returns PWM_OK. */
PWM_API pwm_status pwm_experiment_run(pwm_experiment* exp, const char* output_dir, char** report);

/* Plays a saved trace through the experiment's aggregators; *metrics
 * receives the full run metrics as JSON. */
PWM_API pwm_status pwm_experiment_replay(pwm_experiment* exp, const char* trace_path,
                                         char** metrics);

/* Builds the trace for one seed (first sweep point) and saves it. */
PWM_API pwm_status pwm_experiment_export_trace(pwm_experiment* exp, uint64_t seed,
                                               const char* path);

#ifdef __cplusplus
}
#endif

#endif /* PWM_PWM_H_ */
