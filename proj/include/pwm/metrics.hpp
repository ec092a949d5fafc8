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

// Empirical mistake accounting: per-classifier error rates (P_i, P*, v*),
// the best static aggregation (P^O), per-learner and system mistake
// probabilities of every aggregator, and the bounds evaluated on them.

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pwm/aggregators.hpp"
#include "pwm/core.hpp"
#include "pwm/oracle.hpp"
#include "pwm/streams.hpp"

namespace pwm {

struct ClassifierErrorRates {
  std::vector<std::size_t> mistakes;  // per classifier
  std::vector<double> rates;          // P_i
  double p_star = 0.0;
  std::size_t v_star = 0;
};

// Exact counts over the trace; every classifier with P_i == P* counts
// towards v*. Abstentions count as disagreements.
ClassifierErrorRates classifier_error_rates(std::span<const TraceStep> trace);

struct ConceptTally {
  std::size_t slots = 0;
  std::size_t mistakes = 0;  // summed over learners
};

struct AggregatorMetrics {
  AggregatorKind kind = AggregatorKind::pwm;
  std::vector<std::size_t> mistakes;         // per learner, over all N slots
  std::vector<double> p_learner;             // P_i^agg
  double p_system = 0.0;                     // (1/K) sum_i P_i^agg
  std::vector<std::size_t> observed_errors;  // N_e per learner
  std::map<ConceptId, ConceptTally> per_concept;
  std::vector<std::vector<double>> final_weights;  // per learner
  // Missing-label bound per learner (nullopt: not applicable / not evaluated).
  std::vector<std::optional<double>> bound_missing;
};

struct OracleStats {
  bool available = false;
  bool exact = false;
  double p_opt = 0.0;
  WeightVector weights;
  std::string note;  // why it is unavailable, if so
};

struct BoundSet {
  double b1 = 1.0;
  double b2 = 1.0;
  double b = 1.0;
  std::optional<double> delayed;  // present when some max delay > 0
  std::optional<double> async;    // present when alpha > 0
  double environment = 1.0;       // min(B + delay term + alpha, 1)
};

struct RunMetrics {
  std::size_t learners = 0;
  std::size_t instances = 0;
  std::size_t synchronized_slots = 0;  // M
  double alpha = 0.0;                  // (N - M) / N
  double label_probability = 1.0;
  ClassifierErrorRates classifiers;    // over synchronized slots
  OracleStats oracle;                  // over synchronized slots
  BoundSet bounds;
  std::vector<AggregatorMetrics> aggregators;

  const AggregatorMetrics* find(AggregatorKind kind) const;
};

// Incremental fold over a run; finalize() derives every rate and bound.
class MetricsAccumulator {
 public:
  MetricsAccumulator(std::size_t learners, std::span<const AggregatorKind> aggregators);

  void record_prediction(std::size_t aggregator, std::size_t learner, TimeSlot slot,
                         ConceptId concept_id, bool mistake);
  // Label for `slot` released to `learner`; counts an observed error when the
  // prediction made at `slot` was wrong.
  void record_release(std::size_t aggregator, std::size_t learner, TimeSlot slot);
  // Slot in which every learner reported (no abstentions).
  void record_synchronized(const PredictionVector& s, BinaryLabel y);
  void record_slot() { ++instances_; }

  struct FinalizeOptions {
    int oracle_weight_cap = kDefaultOracleWeightCap;
    std::uint64_t oracle_budget = kDefaultOracleBudget;
    bool compute_oracle = true;
    std::vector<std::int64_t> max_delays;  // per learner
    double label_probability = 1.0;
    double epsilon = 0.05;
  };
  RunMetrics finalize(const FinalizeOptions& options,
                      std::vector<std::vector<std::vector<double>>> final_weights) const;

  std::span<const TraceStep> synchronized_trace() const { return sync_trace_; }

 private:
  std::size_t learners_;
  std::vector<AggregatorKind> kinds_;
  std::size_t instances_ = 0;
  // [aggregator][learner][slot-1] -> mistake flag
  std::vector<std::vector<std::vector<std::uint8_t>>> wrong_;
  std::vector<std::vector<std::size_t>> observed_errors_;
  std::vector<std::map<ConceptId, ConceptTally>> per_concept_;
  std::vector<TraceStep> sync_trace_;
};

}  // namespace pwm
