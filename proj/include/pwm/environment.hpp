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

#pragma once

// Distributed-environment simulator. schedule() turns a source into a fixed
// list of per-slot events (who observed an instance, when each learner gets
// the label, if ever); run_learners() plays those events through local
// classifiers and per-learner aggregators and returns RunMetrics.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "pwm/aggregators.hpp"
#include "pwm/classifiers.hpp"
#include "pwm/core.hpp"
#include "pwm/metrics.hpp"
#include "pwm/oracle.hpp"
#include "pwm/streams.hpp"

namespace pwm {

enum class DelayKind {
  none,     // label released in the same slot
  uniform,  // d ~ U{0..max_delay_i}
  fixed,    // d = max_delay_i
};

struct DelayModel {
  DelayKind kind = DelayKind::none;
  std::vector<TimeSlot> max_delay;  // per learner; empty means 0 for all

  TimeSlot bound(std::size_t learner) const {
    return kind == DelayKind::none || max_delay.empty() ? 0 : max_delay.at(learner);
  }
};

struct LabelObservationModel {
  double probability = 1.0;  // mu: chance a learner ever sees a given label
};

struct ArrivalModel {
  std::vector<double> probability;  // per learner; empty means always arrives

  double at(std::size_t learner) const {
    return probability.empty() ? 1.0 : probability.at(learner);
  }
};

struct EnvironmentSpec {
  DelayModel delay;
  LabelObservationModel labels;
  ArrivalModel arrival;
  std::uint64_t seed = 1;
};

struct LearnerObservation {
  bool arrived = true;
  std::vector<double> features;   // empty when the learner did not arrive
  std::optional<TimeSlot> release;  // slot at which the label reaches this learner
};

struct StreamEvent {
  TimeSlot slot = 1;
  BinaryLabel label = BinaryLabel::positive();
  ConceptId concept_id = 0;
  std::vector<LearnerObservation> learners;
};

struct EventTrace {
  std::vector<std::size_t> dimensions;  // per learner feature count
  std::vector<TimeSlot> max_delays;     // per learner
  double label_probability = 1.0;
  std::vector<StreamEvent> events;

  std::size_t learners() const noexcept { return dimensions.size(); }
};

// Deterministic in (stream state, spec.seed). The three models draw from
// independent generator streams.
EventTrace schedule(Stream& stream, const EnvironmentSpec& spec, std::size_t instances);

// Number of slots in which all of the first `learners` learners arrived.
std::size_t synchronized_slots(const EventTrace& trace, std::size_t learners);

struct RunSpec {
  std::vector<AggregatorSpec> aggregators;
  ClassifierSpec classifier;
  // Aggregate only the first k learners' predictions (0 = all).
  std::size_t aggregated_learners = 0;
  int oracle_weight_cap = kDefaultOracleWeightCap;
  std::uint64_t oracle_budget = kDefaultOracleBudget;
  bool compute_oracle = true;
  double epsilon = 0.05;
  // Called at the end of every slot for every (aggregator, learner).
  std::function<void(TimeSlot, std::size_t aggregator, std::size_t learner, const Aggregator&)>
      observer;
};

// Throws ConfigError when the spec does not fit the trace (e.g. an aggregator
// that cannot take abstentions on a trace with missing arrivals).
RunMetrics run_learners(const EventTrace& trace, const RunSpec& spec);

}  // namespace pwm
