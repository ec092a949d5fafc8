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

#include "pwm/environment.hpp"

#include <algorithm>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>

#include "pwm/error.hpp"
#include "pwm/rng.hpp"

namespace pwm {

EventTrace schedule(Stream& stream, const EnvironmentSpec& spec, std::size_t instances) {
  if (instances < 1) throw std::invalid_argument("schedule needs N >= 1");
  const auto k = stream.learners();
  if (!spec.delay.max_delay.empty() && spec.delay.max_delay.size() != k)
    throw ConfigError("environment.delay", "need one max delay per learner");
  if (!spec.arrival.probability.empty() && spec.arrival.probability.size() != k)
    throw ConfigError("environment.arrival", "need one arrival probability per learner");
  if (!(spec.labels.probability >= 0.0 && spec.labels.probability <= 1.0))
    throw ConfigError("environment.label_probability", "must be in [0,1]");
  for (std::size_t i = 0; i < k; ++i) {
    if (spec.delay.bound(i) < 0) throw ConfigError("environment.delay", "max delay must be >= 0");
    const double p = spec.arrival.at(i);
    if (!(p > 0.0 && p <= 1.0))
      throw ConfigError("environment.arrival_probability", "must be in (0,1]");
  }

  Rng delay_rng = Rng::derived(spec.seed, {0xE1});
  Rng label_rng = Rng::derived(spec.seed, {0xE2});
  Rng arrival_rng = Rng::derived(spec.seed, {0xE3});

  EventTrace trace;
  trace.dimensions = stream.dimensions();
  trace.label_probability = spec.labels.probability;
  for (std::size_t i = 0; i < k; ++i) trace.max_delays.push_back(spec.delay.bound(i));
  trace.events.reserve(instances);
  for (std::size_t n = 1; n <= instances; ++n) {
    auto sample = stream.next();
    StreamEvent ev;
    ev.slot = static_cast<TimeSlot>(n);
    ev.label = sample.label;
    ev.concept_id = sample.concept_id;
    ev.learners.resize(k);
    for (std::size_t i = 0; i < k; ++i) {
      auto& obs = ev.learners[i];
      // Every draw happens unconditionally so that changing one model's
      // parameters leaves the other models' realizations untouched.
      const bool arrived = arrival_rng.bernoulli(spec.arrival.at(i));
      const bool observed = label_rng.bernoulli(spec.labels.probability);
      TimeSlot delay = 0;
      switch (spec.delay.kind) {
        case DelayKind::none: break;
        case DelayKind::uniform: delay = delay_rng.uniform_int(spec.delay.bound(i)); break;
        case DelayKind::fixed: delay = spec.delay.bound(i); break;
      }
      obs.arrived = arrived;
      if (arrived) obs.features = std::move(sample.features[i]);
      if (observed) obs.release = ev.slot + delay;
    }
    trace.events.push_back(std::move(ev));
  }
  return trace;
}

std::size_t synchronized_slots(const EventTrace& trace, std::size_t learners) {
  return static_cast<std::size_t>(
      std::count_if(trace.events.begin(), trace.events.end(), [&](const StreamEvent& ev) {
        return std::all_of(ev.learners.begin(),
                           ev.learners.begin() + static_cast<std::ptrdiff_t>(learners),
                           [](const LearnerObservation& o) { return o.arrived; });
      }));
}

RunMetrics run_learners(const EventTrace& trace, const RunSpec& spec) {
  const auto total_learners = trace.learners();
  if (total_learners == 0) throw ConfigError("", "trace has no learners");
  if (trace.events.empty()) throw ConfigError("", "trace has no events");
  if (spec.aggregators.empty()) throw ConfigError("aggregators", "no aggregator requested");
  const auto k = spec.aggregated_learners == 0 ? total_learners : spec.aggregated_learners;
  if (k > total_learners)
    throw ConfigError("aggregated_learners", "requested " + std::to_string(k) +
                                                 " learners but the trace has " +
                                                 std::to_string(total_learners));
  if (trace.max_delays.size() != total_learners)
    throw ConfigError("", "trace max delay list does not match the learner count");

  const auto n_slots = trace.events.size();
  for (const auto& ev : trace.events) {
    if (ev.learners.size() != total_learners)
      throw ConfigError("", "event at slot " + std::to_string(ev.slot) +
                                " has the wrong learner count");
  }
  const bool any_missing_arrival = synchronized_slots(trace, k) != n_slots;

  std::vector<std::size_t> dims(trace.dimensions.begin(),
                                trace.dimensions.begin() + static_cast<std::ptrdiff_t>(k));
  auto classifiers = make_classifiers(spec.classifier, dims);

  std::vector<AggregatorKind> kinds;
  std::vector<std::vector<std::unique_ptr<Aggregator>>> aggs;
  for (const auto& agg_spec : spec.aggregators) {
    kinds.push_back(agg_spec.kind);
    std::vector<std::unique_ptr<Aggregator>> per_learner;
    for (std::size_t i = 0; i < k; ++i) {
      auto s = agg_spec;
      s.max_delay = trace.max_delays[i];
      per_learner.push_back(make_aggregator(s, k, i));
    }
    if (any_missing_arrival && !per_learner.front()->accepts_abstentions())
      throw ConfigError("aggregators", "'" + to_string(agg_spec.kind) +
                                           "' cannot aggregate with missing arrivals; use epwm");
    aggs.push_back(std::move(per_learner));
  }

  // releases[n-1] = (learner, slot) pairs delivered at the end of slot n.
  std::vector<std::vector<std::pair<std::size_t, TimeSlot>>> releases(n_slots);
  for (std::size_t idx = 0; idx < n_slots; ++idx) {
    const auto& ev = trace.events[idx];
    if (ev.slot != static_cast<TimeSlot>(idx + 1))
      throw ConfigError("", "trace slots must run 1..N in order");
    for (std::size_t i = 0; i < k; ++i) {
      const auto& rel = ev.learners[i].release;
      if (!rel) continue;
      if (*rel < ev.slot) throw ConfigError("", "label released before its slot");
      if (*rel - ev.slot > trace.max_delays[i])
        throw ConfigError("", "realized delay exceeds the learner's max delay");
      if (*rel <= static_cast<TimeSlot>(n_slots))
        releases[static_cast<std::size_t>(*rel) - 1].emplace_back(i, ev.slot);
    }
  }
  for (auto& r : releases) std::sort(r.begin(), r.end());

  MetricsAccumulator acc(k, kinds);
  std::vector<LocalPrediction> local(k, LocalPrediction::abstain());
  for (std::size_t idx = 0; idx < n_slots; ++idx) {
    const auto& ev = trace.events[idx];
    acc.record_slot();
    // Observation and local prediction exchange.
    for (std::size_t i = 0; i < k; ++i) {
      const auto& obs = ev.learners[i];
      local[i] = obs.arrived ? classifiers[i]->predict(obs.features) : LocalPrediction::abstain();
    }
    const PredictionVector s(local);
    if (!s.has_abstention()) acc.record_synchronized(s, ev.label);
    // Final predictions.
    for (std::size_t a = 0; a < aggs.size(); ++a)
      for (std::size_t i = 0; i < k; ++i) {
        const auto y_hat = aggs[a][i]->predict(ev.slot, s);
        acc.record_prediction(a, i, ev.slot, ev.concept_id, y_hat != ev.label);
      }
    // Feedback and configuration update.
    for (const auto& [learner, slot] : releases[idx]) {
      const auto& origin = trace.events[static_cast<std::size_t>(slot) - 1];
      for (std::size_t a = 0; a < aggs.size(); ++a) {
        aggs[a][learner]->observe_label(slot, origin.label);
        acc.record_release(a, learner, slot);
      }
      const auto& obs = origin.learners[learner];
      if (obs.arrived) classifiers[learner]->learn(obs.features, origin.label);
    }
    if (spec.observer)
      for (std::size_t a = 0; a < aggs.size(); ++a)
        for (std::size_t i = 0; i < k; ++i) spec.observer(ev.slot, a, i, *aggs[a][i]);
  }

  std::vector<std::vector<std::vector<double>>> final_weights(aggs.size());
  for (std::size_t a = 0; a < aggs.size(); ++a)
    for (const auto& agg : aggs[a]) final_weights[a].push_back(agg->weights());

  MetricsAccumulator::FinalizeOptions options;
  options.oracle_weight_cap = spec.oracle_weight_cap;
  options.oracle_budget = spec.oracle_budget;
  options.compute_oracle = spec.compute_oracle;
  options.max_delays.assign(trace.max_delays.begin(),
                            trace.max_delays.begin() + static_cast<std::ptrdiff_t>(k));
  options.label_probability = trace.label_probability;
  options.epsilon = spec.epsilon;
  return acc.finalize(options, std::move(final_weights));
}

}  // namespace pwm
