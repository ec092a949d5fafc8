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

#include "pwm/pwm.h"

#include <algorithm>
#include <cstdlib>
#include <cstring>
#include <memory>
#include <new>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "pwm/aggregators.hpp"
#include "pwm/bounds.hpp"
#include "pwm/error.hpp"
#include "pwm/experiment.hpp"
#include "pwm/oracle.hpp"
#include "pwm/trace_io.hpp"

struct pwm_aggregator {
  std::unique_ptr<pwm::Aggregator> impl;
  std::size_t learners = 0;
};

struct pwm_experiment {
  pwm::ExperimentConfig config;
};

namespace {

thread_local std::string g_last_error;

pwm_status fail(pwm_status status, const std::string& message) {
  g_last_error = message;
  return status;
}

template <class F>
pwm_status guarded(F&& body) {
  try {
    body();
    return PWM_OK;
  } catch (const pwm::MissingPendingError& e) {
    return fail(PWM_ERR_MISSING_PENDING, e.what());
  } catch (const pwm::NotApplicableError& e) {
    return fail(PWM_ERR_NOT_APPLICABLE, e.what());
  } catch (const pwm::ContractViolation& e) {
    return fail(PWM_ERR_CONTRACT, e.what());
  } catch (const pwm::BudgetExceededError& e) {
    return fail(PWM_ERR_BUDGET_EXCEEDED, e.what());
  } catch (const pwm::ParseError& e) {
    return fail(PWM_ERR_PARSE,
                std::string(e.what()) + " (at offset " + std::to_string(e.position()) + ")");
  } catch (const pwm::SchemaError& e) {
    return fail(PWM_ERR_SCHEMA, e.what());
  } catch (const pwm::ConfigError& e) {
    return fail(PWM_ERR_CONFIG, e.what());
  } catch (const pwm::VersionError& e) {
    return fail(PWM_ERR_VERSION, e.what());
  } catch (const pwm::IoError& e) {
    return fail(PWM_ERR_IO, e.what());
  } catch (const std::logic_error& e) {
    return fail(PWM_ERR_INVALID_ARGUMENT, e.what());
  } catch (const std::bad_alloc&) {
    return fail(PWM_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(PWM_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(PWM_ERR_INTERNAL, "unknown error");
  }
}

#define PWM_REQUIRE(cond, msg) \
  if (!(cond)) return fail(PWM_ERR_INVALID_ARGUMENT, msg)

char* dup_string(const std::string& s) {
  auto* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

pwm::PredictionVector to_vector(const int8_t* local, std::size_t k) {
  std::vector<pwm::LocalPrediction> preds;
  preds.reserve(k);
  for (std::size_t i = 0; i < k; ++i) preds.push_back(pwm::LocalPrediction::from_int(local[i]));
  return pwm::PredictionVector(preds);
}

}  // namespace

extern "C" {

const char* pwm_last_error(void) { return g_last_error.c_str(); }

const char* pwm_status_name(pwm_status status) {
  switch (status) {
    case PWM_OK: return "ok";
    case PWM_ERR_INVALID_ARGUMENT: return "invalid argument";
    case PWM_ERR_CONTRACT: return "contract violation";
    case PWM_ERR_MISSING_PENDING: return "missing pending prediction";
    case PWM_ERR_NOT_APPLICABLE: return "not applicable";
    case PWM_ERR_BUDGET_EXCEEDED: return "budget exceeded";
    case PWM_ERR_PARSE: return "parse error";
    case PWM_ERR_SCHEMA: return "schema error";
    case PWM_ERR_CONFIG: return "configuration error";
    case PWM_ERR_VERSION: return "version mismatch";
    case PWM_ERR_IO: return "i/o error";
    case PWM_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* pwm_version(void) { return "1.0.0"; }

void pwm_string_free(char* s) { std::free(s); }

pwm_aggregator_options pwm_aggregator_options_default(void) {
  const pwm::MultiplicativeParams m;
  return {0, -1, m.beta, m.gamma, m.share_alpha};
}

pwm_status pwm_aggregator_create(const char* kind, size_t learners, size_t learner,
                                 const pwm_aggregator_options* options, pwm_aggregator** out) {
  PWM_REQUIRE(kind != nullptr && out != nullptr, "null argument");
  *out = nullptr;
  return guarded([&] {
    const auto opts = options ? *options : pwm_aggregator_options_default();
    pwm::AggregatorSpec spec;
    spec.kind = pwm::aggregator_kind_from_string(kind);
    spec.freeze_bias = opts.freeze_bias != 0;
    if (opts.max_delay >= 0) spec.max_delay = opts.max_delay;
    spec.multiplicative = {opts.beta, opts.gamma, opts.share_alpha};
    auto handle = std::make_unique<pwm_aggregator>();
    handle->impl = pwm::make_aggregator(spec, learners, learner);
    handle->learners = learners;
    *out = handle.release();
  });
}

void pwm_aggregator_destroy(pwm_aggregator* agg) { delete agg; }

pwm_status pwm_aggregator_predict(pwm_aggregator* agg, int64_t slot, const int8_t* local,
                                  size_t learners, int* label) {
  PWM_REQUIRE(agg != nullptr && label != nullptr, "null argument");
  PWM_REQUIRE(local != nullptr || learners == 0, "null prediction array");
  PWM_REQUIRE(learners == agg->learners, "prediction count does not match the aggregator");
  return guarded([&] { *label = agg->impl->predict(slot, to_vector(local, learners)).value(); });
}

pwm_status pwm_aggregator_observe(pwm_aggregator* agg, int64_t slot, int label) {
  PWM_REQUIRE(agg != nullptr, "null argument");
  return guarded([&] { agg->impl->observe_label(slot, pwm::BinaryLabel::from_int(label)); });
}

pwm_status pwm_aggregator_weights(const pwm_aggregator* agg, double* out, size_t capacity,
                                  size_t* length) {
  PWM_REQUIRE(agg != nullptr && length != nullptr, "null argument");
  PWM_REQUIRE(out != nullptr || capacity == 0, "null output buffer");
  return guarded([&] {
    const auto w = agg->impl->weights();
    *length = w.size();
    std::copy_n(w.begin(), std::min(capacity, w.size()), out);
  });
}

pwm_status pwm_aggregator_snapshot(const pwm_aggregator* agg, char** json) {
  PWM_REQUIRE(agg != nullptr && json != nullptr, "null argument");
  return guarded([&] { *json = dup_string(agg->impl->snapshot().to_json()); });
}

pwm_status pwm_aggregator_restore(const char* json, pwm_aggregator** out) {
  PWM_REQUIRE(json != nullptr && out != nullptr, "null argument");
  *out = nullptr;
  return guarded([&] {
    const auto snap = pwm::AggregatorSnapshot::from_json(json);
    auto handle = std::make_unique<pwm_aggregator>();
    handle->impl = pwm::restore_aggregator(snap);
    handle->learners = snap.integers.empty() ? 0 : static_cast<std::size_t>(snap.integers.front());
    *out = handle.release();
  });
}

pwm_status pwm_bound_b1(size_t learners, size_t instances, double p_opt, double* out) {
  PWM_REQUIRE(out != nullptr, "null argument");
  return guarded([&] { *out = pwm::bound_b1(learners, instances, p_opt); });
}

pwm_status pwm_bound_b2(size_t learners, size_t instances, double p_star, size_t v_star,
                        double* out) {
  PWM_REQUIRE(out != nullptr, "null argument");
  return guarded([&] { *out = pwm::bound_b2(learners, instances, p_star, v_star); });
}

pwm_status pwm_bound_b(size_t learners, size_t instances, double p_opt, double p_star,
                       size_t v_star, double* out) {
  PWM_REQUIRE(out != nullptr, "null argument");
  return guarded([&] { *out = pwm::bound_b(learners, instances, p_opt, p_star, v_star); });
}

pwm_status pwm_bound_delayed(double base, const int64_t* max_delays, size_t learners,
                             size_t instances, double* out) {
  PWM_REQUIRE(out != nullptr, "null argument");
  PWM_REQUIRE(max_delays != nullptr || learners == 0, "null delay array");
  return guarded([&] {
    *out = pwm::bound_delayed(base, std::span<const std::int64_t>(max_delays, learners), instances,
                              learners);
  });
}

pwm_status pwm_lambda_term(double epsilon, double z, double* out) {
  PWM_REQUIRE(out != nullptr, "null argument");
  return guarded([&] { *out = pwm::lambda_term(epsilon, z); });
}

pwm_status pwm_bound_missing(double base, double mu, double epsilon, size_t observed_errors,
                             double* out) {
  PWM_REQUIRE(out != nullptr, "null argument");
  return guarded([&] { *out = pwm::bound_missing(base, mu, epsilon, observed_errors); });
}

pwm_status pwm_bound_async(double base, double alpha, double* out) {
  PWM_REQUIRE(out != nullptr, "null argument");
  return guarded([&] { *out = pwm::bound_async(base, alpha); });
}

pwm_status pwm_static_oracle(const int8_t* predictions, const int* labels, size_t steps,
                             size_t learners, int weight_cap, uint64_t budget, int64_t* weights,
                             size_t* mistakes, int* exact) {
  PWM_REQUIRE(weights != nullptr && mistakes != nullptr && exact != nullptr, "null argument");
  PWM_REQUIRE(steps == 0 || (predictions != nullptr && labels != nullptr), "null trace");
  return guarded([&] {
    std::vector<pwm::TraceStep> trace;
    trace.reserve(steps);
    for (std::size_t n = 0; n < steps; ++n)
      trace.push_back({to_vector(predictions + n * learners, learners),
                       pwm::BinaryLabel::from_int(labels[n])});
    const auto r = pwm::optimal_static_oracle(trace, weight_cap, budget);
    const auto w = r.optimal_weights.values();
    std::copy(w.begin(), w.end(), weights);
    *mistakes = r.mistakes;
    *exact = r.exact ? 1 : 0;
  });
}

pwm_status pwm_experiment_load(const char* path, pwm_experiment** out) {
  PWM_REQUIRE(path != nullptr && out != nullptr, "null argument");
  *out = nullptr;
  return guarded([&] {
    auto exp = std::make_unique<pwm_experiment>();
    exp->config = pwm::load_experiment_config(path);
    *out = exp.release();
  });
}

pwm_status pwm_experiment_parse(const char* json, const char* base_dir, pwm_experiment** out) {
  PWM_REQUIRE(json != nullptr && out != nullptr, "null argument");
  *out = nullptr;
  return guarded([&] {
    auto exp = std::make_unique<pwm_experiment>();
    exp->config = pwm::parse_experiment_config(json, base_dir ? base_dir : ".");
    *out = exp.release();
  });
}

void pwm_experiment_destroy(pwm_experiment* exp) { delete exp; }

pwm_status pwm_experiment_run(pwm_experiment* exp, const char* output_dir, char** report) {
  PWM_REQUIRE(exp != nullptr && report != nullptr, "null argument");
  return guarded([&] {
    std::optional<std::string> dir;
    if (output_dir != nullptr) dir = output_dir;
    const auto outcome = pwm::run_experiment(exp->config, dir);
    nlohmann::json failures = nlohmann::json::array();
    for (const auto& f : outcome.failures)
      failures.push_back({{"seed", f.seed}, {"point", f.point}, {"message", f.message}});
    const nlohmann::json doc = {{"output_dir", outcome.output_dir},
                                {"records", outcome.records_path},
                                {"summary", outcome.summary_path},
                                {"runs", outcome.runs},
                                {"failures", std::move(failures)}};
    *report = dup_string(doc.dump());
  });
}

pwm_status pwm_experiment_replay(pwm_experiment* exp, const char* trace_path, char** metrics) {
  PWM_REQUIRE(exp != nullptr && trace_path != nullptr && metrics != nullptr, "null argument");
  return guarded([&] {
    const auto trace = pwm::load_trace(trace_path);
    *metrics = dup_string(pwm::metrics_to_json(pwm::replay_trace(trace, exp->config)));
  });
}

pwm_status pwm_experiment_export_trace(pwm_experiment* exp, uint64_t seed, const char* path) {
  PWM_REQUIRE(exp != nullptr && path != nullptr, "null argument");
  return guarded([&] {
    const auto points = pwm::expand_sweep(exp->config);
    pwm::save_trace(path, pwm::build_trace(points.front(), seed));
  });
}

}  // extern "C"
