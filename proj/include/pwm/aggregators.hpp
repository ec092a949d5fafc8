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

// Ensemble aggregation rules.
//
// The additive rule (PWM) keeps an integer weight per learner plus a bias
// weight for the virtual learner, predicts sgn(w.s) and adds y*s on every
// mistake. The extended variant keeps two such vectors: one for slots in
// which every learner reported, one for slots with abstainers (their entry
// is 0). Labels may arrive late or out of order; the stored prediction
// vector is re-scored with the *current* weights when its label shows up.
//
// WM, Blum and TrackExp are the multiplicative baselines; they have no bias
// weight. Average majority is the unweighted vote.

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "pwm/core.hpp"

namespace pwm {

// ---------------------------------------------------------------------------
// PWM
// ---------------------------------------------------------------------------

struct PwmState {
  WeightVector weights;
  // Pins the virtual-learner weight at 0 (ablation without bias).
  bool freeze_bias = false;

  static PwmState fresh(std::size_t learners, bool freeze_bias = false) {
    return PwmState{WeightVector(learners), freeze_bias};
  }
};

// Throws ContractViolation if s contains an abstention.
BinaryLabel pwm_predict(const PwmState& state, const PredictionVector& s);
PwmState pwm_update(PwmState state, const PredictionVector& s, BinaryLabel y);

// ---------------------------------------------------------------------------
// Extended PWM
// ---------------------------------------------------------------------------

class ExtendedPwmState {
 public:
  // max_delay bounds how long a prediction vector waits for its label;
  // older entries are evicted on the next predict(). nullopt keeps everything.
  explicit ExtendedPwmState(std::size_t learners, std::optional<TimeSlot> max_delay = std::nullopt,
                            bool freeze_bias = false);

  BinaryLabel predict(TimeSlot slot, const PredictionVector& s);
  // Returns true when the label triggered a weight update.
  bool observe_label(TimeSlot slot, BinaryLabel y);

  const WeightVector& weights_sync() const noexcept { return sync_; }
  const WeightVector& weights_async() const noexcept { return async_; }
  void set_weights(WeightVector sync, WeightVector async);
  std::size_t pending_size() const noexcept { return pending_.size(); }
  bool is_pending(TimeSlot slot) const { return pending_.contains(slot); }
  const std::map<TimeSlot, PredictionVector>& pending() const noexcept { return pending_; }
  void restore_pending(std::map<TimeSlot, PredictionVector> pending) { pending_ = std::move(pending); }
  std::optional<TimeSlot> max_delay() const noexcept { return max_delay_; }
  bool freeze_bias() const noexcept { return freeze_bias_; }
  std::size_t learners() const noexcept { return sync_.size() - 1; }

 private:
  WeightVector sync_;
  WeightVector async_;
  std::map<TimeSlot, PredictionVector> pending_;
  std::optional<TimeSlot> max_delay_;
  bool freeze_bias_;
};

inline BinaryLabel epwm_predict(ExtendedPwmState& state, TimeSlot slot, const PredictionVector& s) {
  return state.predict(slot, s);
}
inline void epwm_observe_label(ExtendedPwmState& state, TimeSlot slot, BinaryLabel y) {
  state.observe_label(slot, y);
}

// ---------------------------------------------------------------------------
// Multiplicative baselines
// ---------------------------------------------------------------------------

enum class MultiplicativeKind { wm, blum, trackexp };

struct MultiplicativeParams {
  double beta = 0.5;
  double gamma = 1.5;        // Blum only
  double share_alpha = 0.25; // TrackExp only
};

struct MultiplicativeState {
  MultiplicativeKind kind = MultiplicativeKind::wm;
  std::vector<double> weights;
  MultiplicativeParams params;

  static MultiplicativeState fresh(MultiplicativeKind kind, std::size_t learners,
                                   MultiplicativeParams params = {});
};

struct StepResult {
  BinaryLabel prediction;
  MultiplicativeState state;
};

// sgn(sum_k w_k s_k) over learner entries; the virtual entry is ignored.
BinaryLabel multiplicative_predict(const MultiplicativeState& state, const PredictionVector& s);
StepResult wm_step(MultiplicativeState state, const PredictionVector& s, BinaryLabel y);
StepResult blum_step(MultiplicativeState state, const PredictionVector& s, BinaryLabel y);
StepResult trackexp_step(MultiplicativeState state, const PredictionVector& s, BinaryLabel y);
// Dispatches on state.kind.
StepResult multiplicative_step(MultiplicativeState state, const PredictionVector& s, BinaryLabel y);

BinaryLabel average_majority(const PredictionVector& s);

// ---------------------------------------------------------------------------
// Per-learner runtime wrapper used by the simulator
// ---------------------------------------------------------------------------

enum class AggregatorKind { pwm, epwm, wm, blum, trackexp, am, alone };

std::string to_string(AggregatorKind kind);
AggregatorKind aggregator_kind_from_string(const std::string& name);

struct AggregatorSpec {
  AggregatorKind kind = AggregatorKind::pwm;
  bool freeze_bias = false;
  MultiplicativeParams multiplicative;
  std::optional<TimeSlot> max_delay;
};

// Flat, versioned checkpoint of an aggregator.
struct AggregatorSnapshot {
  static constexpr int kVersion = 1;
  int version = kVersion;
  std::string kind;
  std::vector<std::int64_t> integers;
  std::vector<double> reals;

  std::string to_json() const;
  static AggregatorSnapshot from_json(const std::string& text);
};

class Aggregator {
 public:
  virtual ~Aggregator() = default;
  virtual AggregatorKind kind() const noexcept = 0;
  // Final prediction for `slot`; the vector is kept until its label arrives.
  virtual BinaryLabel predict(TimeSlot slot, const PredictionVector& s) = 0;
  // Throws MissingPendingError for a slot that was never predicted.
  virtual void observe_label(TimeSlot slot, BinaryLabel y) = 0;
  virtual bool accepts_abstentions() const noexcept = 0;
  // Integer weights for PWM kinds (sync vector first for epwm), real weights
  // for multiplicative kinds; empty for stateless rules.
  virtual std::vector<double> weights() const = 0;
  virtual AggregatorSnapshot snapshot() const = 0;
};

// `learner` is the owning learner's index (used by the alone rule).
std::unique_ptr<Aggregator> make_aggregator(const AggregatorSpec& spec, std::size_t learners,
                                            std::size_t learner);
std::unique_ptr<Aggregator> restore_aggregator(const AggregatorSnapshot& snapshot);

}  // namespace pwm
