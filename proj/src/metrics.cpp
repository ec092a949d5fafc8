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

#include "pwm/metrics.hpp"

#include <algorithm>
#include <stdexcept>

#include "pwm/bounds.hpp"
#include "pwm/error.hpp"

namespace pwm {

ClassifierErrorRates classifier_error_rates(std::span<const TraceStep> trace) {
  if (trace.empty()) throw std::invalid_argument("classifier error rates need a non-empty trace");
  const auto k = trace.front().predictions.learners();
  ClassifierErrorRates out;
  out.mistakes.assign(k, 0);
  for (const auto& step : trace) {
    if (step.predictions.learners() != k)
      throw std::invalid_argument("trace has inconsistent learner counts");
    for (std::size_t i = 0; i < k; ++i)
      if (step.predictions[i + 1] != step.label.value()) ++out.mistakes[i];
  }
  const auto n = static_cast<double>(trace.size());
  const auto best = *std::min_element(out.mistakes.begin(), out.mistakes.end());
  for (auto m : out.mistakes) {
    out.rates.push_back(static_cast<double>(m) / n);
    if (m == best) ++out.v_star;
  }
  out.p_star = static_cast<double>(best) / n;
  return out;
}

const AggregatorMetrics* RunMetrics::find(AggregatorKind kind) const {
  for (const auto& a : aggregators)
    if (a.kind == kind) return &a;
  return nullptr;
}

MetricsAccumulator::MetricsAccumulator(std::size_t learners,
                                       std::span<const AggregatorKind> aggregators)
    : learners_(learners),
      kinds_(aggregators.begin(), aggregators.end()),
      wrong_(kinds_.size(), std::vector<std::vector<std::uint8_t>>(learners)),
      observed_errors_(kinds_.size(), std::vector<std::size_t>(learners, 0)),
      per_concept_(kinds_.size()) {}

void MetricsAccumulator::record_prediction(std::size_t aggregator, std::size_t learner,
                                           TimeSlot slot, ConceptId concept_id, bool mistake) {
  auto& flags = wrong_.at(aggregator).at(learner);
  if (slot < 1) throw std::invalid_argument("time slots start at 1");
  if (flags.size() < static_cast<std::size_t>(slot)) flags.resize(static_cast<std::size_t>(slot), 0);
  flags[static_cast<std::size_t>(slot) - 1] = mistake ? 1 : 0;
  auto& tally = per_concept_[aggregator][concept_id];
  if (learner == 0) ++tally.slots;
  if (mistake) ++tally.mistakes;
}

void MetricsAccumulator::record_release(std::size_t aggregator, std::size_t learner,
                                        TimeSlot slot) {
  const auto& flags = wrong_.at(aggregator).at(learner);
  const auto idx = static_cast<std::size_t>(slot) - 1;
  if (slot < 1 || idx >= flags.size())
    throw std::out_of_range("release for a slot without a recorded prediction");
  if (flags[idx]) ++observed_errors_[aggregator][learner];
}

void MetricsAccumulator::record_synchronized(const PredictionVector& s, BinaryLabel y) {
  sync_trace_.push_back(TraceStep{s, y});
}

RunMetrics MetricsAccumulator::finalize(
    const FinalizeOptions& options,
    std::vector<std::vector<std::vector<double>>> final_weights) const {
  RunMetrics out;
  out.learners = learners_;
  out.instances = instances_;
  out.synchronized_slots = sync_trace_.size();
  out.label_probability = options.label_probability;
  if (instances_ == 0) throw std::invalid_argument("cannot finalize an empty run");
  const double n = static_cast<double>(instances_);
  out.alpha = static_cast<double>(instances_ - sync_trace_.size()) / n;

  double base = 1.0;
  if (!sync_trace_.empty()) {
    out.classifiers = classifier_error_rates(sync_trace_);
    const double m = static_cast<double>(sync_trace_.size());
    out.oracle.p_opt = out.classifiers.p_star;
    if (options.compute_oracle) {
      try {
        const auto res =
            optimal_static_oracle(sync_trace_, options.oracle_weight_cap, options.oracle_budget);
        out.oracle.available = true;
        out.oracle.exact = res.exact;
        out.oracle.weights = res.optimal_weights;
        // A best single classifier is always reachable, so P^O <= P*.
        out.oracle.p_opt = std::min(static_cast<double>(res.mistakes) / m, out.classifiers.p_star);
      } catch (const BudgetExceededError& e) {
        out.oracle.note = e.what();
      }
    } else {
      out.oracle.note = "oracle disabled";
    }
    const auto mm = sync_trace_.size();
    out.bounds.b1 = bound_b1(learners_, mm, out.oracle.p_opt);
    out.bounds.b2 = bound_b2(learners_, mm, out.classifiers.p_star, out.classifiers.v_star);
    out.bounds.b = std::min({out.bounds.b1, out.bounds.b2, 1.0});
    base = out.bounds.b;
  }

  double env = base;
  if (!options.max_delays.empty() &&
      std::any_of(options.max_delays.begin(), options.max_delays.end(),
                  [](std::int64_t d) { return d > 0; })) {
    out.bounds.delayed = bound_delayed(base, options.max_delays, instances_, learners_);
    env += *out.bounds.delayed - base;
  }
  if (out.alpha > 0.0) {
    out.bounds.async = bound_async(base, out.alpha);
    env += out.alpha;
  }
  out.bounds.environment = std::min(env, 1.0);

  for (std::size_t a = 0; a < kinds_.size(); ++a) {
    AggregatorMetrics am;
    am.kind = kinds_[a];
    am.per_concept = per_concept_[a];
    am.observed_errors = observed_errors_[a];
    double total = 0.0;
    for (std::size_t i = 0; i < learners_; ++i) {
      const auto& flags = wrong_[a][i];
      const auto count = static_cast<std::size_t>(std::count(flags.begin(), flags.end(), 1));
      am.mistakes.push_back(count);
      am.p_learner.push_back(static_cast<double>(count) / n);
      total += am.p_learner.back();
      std::optional<double> missing;
      if (options.label_probability < 1.0 &&
          (am.kind == AggregatorKind::pwm || am.kind == AggregatorKind::epwm)) {
        try {
          missing = bound_missing(out.bounds.environment, options.label_probability,
                                  options.epsilon, am.observed_errors[i]);
        } catch (const NotApplicableError&) {
        }
      }
      am.bound_missing.push_back(missing);
    }
    am.p_system = total / static_cast<double>(learners_);
    if (a < final_weights.size()) am.final_weights = std::move(final_weights[a]);
    out.aggregators.push_back(std::move(am));
  }
  return out;
}

}  // namespace pwm
