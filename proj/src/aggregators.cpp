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

#include "pwm/aggregators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "json.hpp"

#include "pwm/error.hpp"

namespace pwm {

// ---------------------------------------------------------------------------
// PWM
// ---------------------------------------------------------------------------

BinaryLabel pwm_predict(const PwmState& state, const PredictionVector& s) {
  if (s.has_abstention())
    throw ContractViolation("synchronous PWM received an abstention; use the extended variant");
  return sign(inner_product(state.weights, s));
}

PwmState pwm_update(PwmState state, const PredictionVector& s, BinaryLabel y) {
  if (pwm_predict(state, s) != y) state.weights.add_scaled(s, y, state.freeze_bias);
  return state;
}

// ---------------------------------------------------------------------------
// Extended PWM
// ---------------------------------------------------------------------------

ExtendedPwmState::ExtendedPwmState(std::size_t learners, std::optional<TimeSlot> max_delay,
                                   bool freeze_bias)
    : sync_(learners), async_(learners), max_delay_(max_delay), freeze_bias_(freeze_bias) {
  if (max_delay_ && *max_delay_ < 0) throw std::invalid_argument("max delay must be >= 0");
}

void ExtendedPwmState::set_weights(WeightVector sync, WeightVector async) {
  if (sync.size() != sync_.size() || async.size() != async_.size())
    throw std::invalid_argument("weight vector length mismatch");
  sync_ = std::move(sync);
  async_ = std::move(async);
}

BinaryLabel ExtendedPwmState::predict(TimeSlot slot, const PredictionVector& s) {
  if (s.size() != sync_.size()) throw std::invalid_argument("prediction vector length mismatch");
  if (pending_.contains(slot))
    throw ContractViolation("slot " + std::to_string(slot) + " already has a pending prediction");
  if (max_delay_) pending_.erase(pending_.begin(), pending_.lower_bound(slot - *max_delay_));
  const auto& w = s.has_abstention() ? async_ : sync_;
  pending_.emplace(slot, s);
  return sign(inner_product(w, s));
}

bool ExtendedPwmState::observe_label(TimeSlot slot, BinaryLabel y) {
  auto it = pending_.find(slot);
  if (it == pending_.end())
    throw MissingPendingError("no pending prediction for slot " + std::to_string(slot));
  const PredictionVector s = std::move(it->second);
  pending_.erase(it);
  auto& w = s.has_abstention() ? async_ : sync_;
  if (sign(inner_product(w, s)) == y) return false;
  w.add_scaled(s, y, freeze_bias_);
  return true;
}

// ---------------------------------------------------------------------------
// Multiplicative baselines
// ---------------------------------------------------------------------------

MultiplicativeState MultiplicativeState::fresh(MultiplicativeKind kind, std::size_t learners,
                                               MultiplicativeParams params) {
  if (!(params.beta > 0.0 && params.beta <= 1.0)) throw std::invalid_argument("beta must be in (0,1]");
  if (!(params.gamma >= 1.0)) throw std::invalid_argument("gamma must be >= 1");
  if (!(params.share_alpha >= 0.0 && params.share_alpha <= 1.0))
    throw std::invalid_argument("share alpha must be in [0,1]");
  return MultiplicativeState{kind, std::vector<double>(learners, 1.0), params};
}

namespace {

void require_full(const MultiplicativeState& state, const PredictionVector& s) {
  if (s.learners() != state.weights.size())
    throw std::invalid_argument("prediction vector length mismatch");
  if (s.has_abstention())
    throw ContractViolation("multiplicative baselines do not accept abstentions");
}

// Prediction is invariant to a common positive scale; rescale when the
// weights drift towards the ends of the double range and keep every weight
// strictly positive.
void keep_in_range(std::vector<double>& w) {
  const double top = *std::max_element(w.begin(), w.end());
  if (top < 1e-100 || top > 1e100)
    for (auto& v : w) v /= top;
  for (auto& v : w) v = std::max(v, std::numeric_limits<double>::min());
}

}  // namespace

BinaryLabel multiplicative_predict(const MultiplicativeState& state, const PredictionVector& s) {
  require_full(state, s);
  double total = 0.0;
  for (std::size_t k = 0; k < state.weights.size(); ++k) total += state.weights[k] * s[k + 1];
  return sign(total);
}

StepResult wm_step(MultiplicativeState state, const PredictionVector& s, BinaryLabel y) {
  const auto prediction = multiplicative_predict(state, s);
  if (prediction != y) {
    for (std::size_t k = 0; k < state.weights.size(); ++k)
      if (s[k + 1] != y.value()) state.weights[k] *= state.params.beta;
    keep_in_range(state.weights);
  }
  return {prediction, std::move(state)};
}

StepResult blum_step(MultiplicativeState state, const PredictionVector& s, BinaryLabel y) {
  const auto prediction = multiplicative_predict(state, s);
  const bool mistake = prediction != y;
  for (std::size_t k = 0; k < state.weights.size(); ++k) {
    if (s[k + 1] != y.value())
      state.weights[k] *= state.params.beta;
    else if (mistake)
      state.weights[k] *= state.params.gamma;
  }
  keep_in_range(state.weights);
  return {prediction, std::move(state)};
}

// Sharing is mistake driven, like the WM update it follows.
StepResult trackexp_step(MultiplicativeState state, const PredictionVector& s, BinaryLabel y) {
  auto result = wm_step(std::move(state), s, y);
  if (result.prediction == y) return result;
  auto& w = result.state.weights;
  const double alpha = result.state.params.share_alpha;
  double total = 0.0;
  for (double v : w) total += v;
  const double share = alpha * total / static_cast<double>(w.size());
  for (auto& v : w) v = (1.0 - alpha) * v + share;
  keep_in_range(w);
  return result;
}

StepResult multiplicative_step(MultiplicativeState state, const PredictionVector& s, BinaryLabel y) {
  switch (state.kind) {
    case MultiplicativeKind::wm: return wm_step(std::move(state), s, y);
    case MultiplicativeKind::blum: return blum_step(std::move(state), s, y);
    case MultiplicativeKind::trackexp: return trackexp_step(std::move(state), s, y);
  }
  throw std::logic_error("unknown multiplicative kind");
}

BinaryLabel average_majority(const PredictionVector& s) {
  int total = 0;
  for (std::size_t j = 1; j < s.size(); ++j) total += s[j];
  return sign(static_cast<std::int64_t>(total));
}

// ---------------------------------------------------------------------------
// Runtime wrappers
// ---------------------------------------------------------------------------

std::string to_string(AggregatorKind kind) {
  switch (kind) {
    case AggregatorKind::pwm: return "pwm";
    case AggregatorKind::epwm: return "epwm";
    case AggregatorKind::wm: return "wm";
    case AggregatorKind::blum: return "blum";
    case AggregatorKind::trackexp: return "trackexp";
    case AggregatorKind::am: return "am";
    case AggregatorKind::alone: return "alone";
  }
  return "?";
}

AggregatorKind aggregator_kind_from_string(const std::string& name) {
  for (auto k : {AggregatorKind::pwm, AggregatorKind::epwm, AggregatorKind::wm,
                 AggregatorKind::blum, AggregatorKind::trackexp, AggregatorKind::am,
                 AggregatorKind::alone})
    if (to_string(k) == name) return k;
  throw std::invalid_argument("unknown aggregator '" + name + "'");
}

std::string AggregatorSnapshot::to_json() const {
  nlohmann::json j;
  j["version"] = version;
  j["kind"] = kind;
  j["integers"] = integers;
  j["reals"] = reals;
  return j.dump();
}

AggregatorSnapshot AggregatorSnapshot::from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("aggregator snapshot: ") + e.what(), e.byte);
  }
  AggregatorSnapshot out;
  try {
    out.version = j.at("version").get<int>();
    out.kind = j.at("kind").get<std::string>();
    out.integers = j.at("integers").get<std::vector<std::int64_t>>();
    out.reals = j.at("reals").get<std::vector<double>>();
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("aggregator snapshot: ") + e.what());
  }
  if (out.version != kVersion)
    throw VersionError("unsupported aggregator snapshot version " + std::to_string(out.version));
  return out;
}

namespace {

// Pending prediction vectors awaiting a label, evicted after max_delay.
class PendingStore {
 public:
  explicit PendingStore(std::optional<TimeSlot> max_delay) : max_delay_(max_delay) {}

  void put(TimeSlot slot, const PredictionVector& s) {
    if (entries_.contains(slot))
      throw ContractViolation("slot " + std::to_string(slot) + " already has a pending prediction");
    if (max_delay_) entries_.erase(entries_.begin(), entries_.lower_bound(slot - *max_delay_));
    entries_.emplace(slot, s);
  }

  PredictionVector take(TimeSlot slot) {
    auto it = entries_.find(slot);
    if (it == entries_.end())
      throw MissingPendingError("no pending prediction for slot " + std::to_string(slot));
    auto s = std::move(it->second);
    entries_.erase(it);
    return s;
  }

  std::optional<TimeSlot> max_delay() const { return max_delay_; }
  const std::map<TimeSlot, PredictionVector>& entries() const { return entries_; }
  std::map<TimeSlot, PredictionVector>& entries() { return entries_; }

 private:
  std::optional<TimeSlot> max_delay_;
  std::map<TimeSlot, PredictionVector> entries_;
};

std::int64_t encode_delay(std::optional<TimeSlot> d) { return d ? *d : -1; }
std::optional<TimeSlot> decode_delay(std::int64_t v) {
  return v < 0 ? std::nullopt : std::optional<TimeSlot>(v);
}

void append_pending(std::vector<std::int64_t>& out, const std::map<TimeSlot, PredictionVector>& p) {
  out.push_back(static_cast<std::int64_t>(p.size()));
  for (const auto& [slot, s] : p) {
    out.push_back(slot);
    for (auto e : s.entries()) out.push_back(e);
  }
}

// Sequential reader over a snapshot's integer list.
class IntReader {
 public:
  explicit IntReader(const std::vector<std::int64_t>& v) : v_(v) {}
  std::int64_t next() {
    if (pos_ >= v_.size()) throw SchemaError("aggregator snapshot is truncated");
    return v_[pos_++];
  }
  WeightVector weights(std::size_t learners) {
    std::vector<std::int64_t> w(learners + 1);
    for (auto& x : w) x = next();
    return WeightVector(std::move(w));
  }
  std::map<TimeSlot, PredictionVector> pending(std::size_t learners) {
    std::map<TimeSlot, PredictionVector> out;
    const auto n = next();
    for (std::int64_t i = 0; i < n; ++i) {
      const auto slot = next();
      std::vector<int> entries(learners + 1);
      for (auto& e : entries) e = static_cast<int>(next());
      out.emplace(slot, PredictionVector::from_entries(entries));
    }
    return out;
  }
  void expect_end() const {
    if (pos_ != v_.size()) throw SchemaError("aggregator snapshot has trailing data");
  }

 private:
  const std::vector<std::int64_t>& v_;
  std::size_t pos_ = 0;
};

class PwmAggregator final : public Aggregator {
 public:
  PwmAggregator(std::size_t learners, bool freeze_bias, std::optional<TimeSlot> max_delay)
      : state_(PwmState::fresh(learners, freeze_bias)), pending_(max_delay) {}

  AggregatorKind kind() const noexcept override { return AggregatorKind::pwm; }
  bool accepts_abstentions() const noexcept override { return false; }

  BinaryLabel predict(TimeSlot slot, const PredictionVector& s) override {
    const auto y_hat = pwm_predict(state_, s);
    pending_.put(slot, s);
    return y_hat;
  }
  void observe_label(TimeSlot slot, BinaryLabel y) override {
    state_ = pwm_update(std::move(state_), pending_.take(slot), y);
  }
  std::vector<double> weights() const override {
    const auto w = state_.weights.values();
    return {w.begin(), w.end()};
  }
  AggregatorSnapshot snapshot() const override {
    AggregatorSnapshot snap;
    snap.kind = "pwm";
    const auto learners = state_.weights.size() - 1;
    snap.integers = {static_cast<std::int64_t>(learners), state_.freeze_bias ? 1 : 0,
                     encode_delay(pending_.max_delay())};
    for (auto w : state_.weights.values()) snap.integers.push_back(w);
    append_pending(snap.integers, pending_.entries());
    return snap;
  }
  static std::unique_ptr<Aggregator> restore(const AggregatorSnapshot& snap) {
    IntReader r(snap.integers);
    const auto learners = static_cast<std::size_t>(r.next());
    const bool freeze = r.next() != 0;
    const auto delay = decode_delay(r.next());
    auto agg = std::make_unique<PwmAggregator>(learners, freeze, delay);
    agg->state_.weights = r.weights(learners);
    agg->pending_.entries() = r.pending(learners);
    r.expect_end();
    return agg;
  }

 private:
  PwmState state_;
  PendingStore pending_;
};

class ExtendedPwmAggregator final : public Aggregator {
 public:
  ExtendedPwmAggregator(std::size_t learners, bool freeze_bias, std::optional<TimeSlot> max_delay)
      : state_(learners, max_delay, freeze_bias) {}

  AggregatorKind kind() const noexcept override { return AggregatorKind::epwm; }
  bool accepts_abstentions() const noexcept override { return true; }
  BinaryLabel predict(TimeSlot slot, const PredictionVector& s) override {
    return state_.predict(slot, s);
  }
  void observe_label(TimeSlot slot, BinaryLabel y) override { state_.observe_label(slot, y); }
  std::vector<double> weights() const override {
    std::vector<double> out;
    for (auto w : state_.weights_sync().values()) out.push_back(static_cast<double>(w));
    for (auto w : state_.weights_async().values()) out.push_back(static_cast<double>(w));
    return out;
  }
  const ExtendedPwmState& state() const { return state_; }
  AggregatorSnapshot snapshot() const override {
    AggregatorSnapshot snap;
    snap.kind = "epwm";
    snap.integers = {static_cast<std::int64_t>(state_.learners()), state_.freeze_bias() ? 1 : 0,
                     encode_delay(state_.max_delay())};
    for (auto w : state_.weights_sync().values()) snap.integers.push_back(w);
    for (auto w : state_.weights_async().values()) snap.integers.push_back(w);
    append_pending(snap.integers, state_.pending());
    return snap;
  }
  static std::unique_ptr<Aggregator> restore(const AggregatorSnapshot& snap) {
    IntReader r(snap.integers);
    const auto learners = static_cast<std::size_t>(r.next());
    const bool freeze = r.next() != 0;
    const auto delay = decode_delay(r.next());
    auto agg = std::make_unique<ExtendedPwmAggregator>(learners, freeze, delay);
    auto sync = r.weights(learners);
    auto async = r.weights(learners);
    agg->state_.set_weights(std::move(sync), std::move(async));
    agg->state_.restore_pending(r.pending(learners));
    r.expect_end();
    return agg;
  }

 private:
  ExtendedPwmState state_;
};

MultiplicativeKind to_multiplicative(AggregatorKind kind) {
  switch (kind) {
    case AggregatorKind::wm: return MultiplicativeKind::wm;
    case AggregatorKind::blum: return MultiplicativeKind::blum;
    case AggregatorKind::trackexp: return MultiplicativeKind::trackexp;
    default: throw std::invalid_argument("not a multiplicative aggregator");
  }
}

AggregatorKind from_multiplicative(MultiplicativeKind kind) {
  switch (kind) {
    case MultiplicativeKind::wm: return AggregatorKind::wm;
    case MultiplicativeKind::blum: return AggregatorKind::blum;
    case MultiplicativeKind::trackexp: return AggregatorKind::trackexp;
  }
  return AggregatorKind::wm;
}

class MultiplicativeAggregator final : public Aggregator {
 public:
  MultiplicativeAggregator(MultiplicativeKind kind, std::size_t learners,
                           MultiplicativeParams params, std::optional<TimeSlot> max_delay)
      : state_(MultiplicativeState::fresh(kind, learners, params)), pending_(max_delay) {}

  AggregatorKind kind() const noexcept override { return from_multiplicative(state_.kind); }
  bool accepts_abstentions() const noexcept override { return false; }
  BinaryLabel predict(TimeSlot slot, const PredictionVector& s) override {
    const auto y_hat = multiplicative_predict(state_, s);
    pending_.put(slot, s);
    return y_hat;
  }
  void observe_label(TimeSlot slot, BinaryLabel y) override {
    state_ = multiplicative_step(std::move(state_), pending_.take(slot), y).state;
  }
  std::vector<double> weights() const override { return state_.weights; }
  AggregatorSnapshot snapshot() const override {
    AggregatorSnapshot snap;
    snap.kind = to_string(kind());
    snap.integers = {static_cast<std::int64_t>(state_.weights.size()),
                     encode_delay(pending_.max_delay())};
    append_pending(snap.integers, pending_.entries());
    snap.reals = {state_.params.beta, state_.params.gamma, state_.params.share_alpha};
    snap.reals.insert(snap.reals.end(), state_.weights.begin(), state_.weights.end());
    return snap;
  }
  static std::unique_ptr<Aggregator> restore(const AggregatorSnapshot& snap) {
    IntReader r(snap.integers);
    const auto learners = static_cast<std::size_t>(r.next());
    const auto delay = decode_delay(r.next());
    if (snap.reals.size() != 3 + learners) throw SchemaError("multiplicative snapshot size mismatch");
    MultiplicativeParams params{snap.reals[0], snap.reals[1], snap.reals[2]};
    auto agg = std::make_unique<MultiplicativeAggregator>(
        to_multiplicative(aggregator_kind_from_string(snap.kind)), learners, params, delay);
    agg->pending_.entries() = r.pending(learners);
    r.expect_end();
    std::copy(snap.reals.begin() + 3, snap.reals.end(), agg->state_.weights.begin());
    return agg;
  }

 private:
  MultiplicativeState state_;
  PendingStore pending_;
};

class AverageMajorityAggregator final : public Aggregator {
 public:
  explicit AverageMajorityAggregator(std::size_t learners) : learners_(learners) {}
  AggregatorKind kind() const noexcept override { return AggregatorKind::am; }
  bool accepts_abstentions() const noexcept override { return true; }
  BinaryLabel predict(TimeSlot, const PredictionVector& s) override { return average_majority(s); }
  void observe_label(TimeSlot, BinaryLabel) override {}
  std::vector<double> weights() const override { return {}; }
  AggregatorSnapshot snapshot() const override {
    return {AggregatorSnapshot::kVersion, "am", {static_cast<std::int64_t>(learners_)}, {}};
  }

 private:
  std::size_t learners_;
};

// The learner's own local prediction; an abstaining learner falls back to
// sgn(0) = +1.
class AloneAggregator final : public Aggregator {
 public:
  AloneAggregator(std::size_t learners, std::size_t learner) : learners_(learners), learner_(learner) {
    if (learner >= learners) throw std::invalid_argument("alone: learner index out of range");
  }
  AggregatorKind kind() const noexcept override { return AggregatorKind::alone; }
  bool accepts_abstentions() const noexcept override { return true; }
  BinaryLabel predict(TimeSlot, const PredictionVector& s) override {
    return sign(static_cast<std::int64_t>(s[learner_ + 1]));
  }
  void observe_label(TimeSlot, BinaryLabel) override {}
  std::vector<double> weights() const override { return {}; }
  AggregatorSnapshot snapshot() const override {
    return {AggregatorSnapshot::kVersion,
            "alone",
            {static_cast<std::int64_t>(learners_), static_cast<std::int64_t>(learner_)},
            {}};
  }

 private:
  std::size_t learners_;
  std::size_t learner_;
};

}  // namespace

std::unique_ptr<Aggregator> make_aggregator(const AggregatorSpec& spec, std::size_t learners,
                                            std::size_t learner) {
  if (learners == 0) throw std::invalid_argument("an aggregator needs at least one learner");
  switch (spec.kind) {
    case AggregatorKind::pwm:
      return std::make_unique<PwmAggregator>(learners, spec.freeze_bias, spec.max_delay);
    case AggregatorKind::epwm:
      return std::make_unique<ExtendedPwmAggregator>(learners, spec.freeze_bias, spec.max_delay);
    case AggregatorKind::wm:
    case AggregatorKind::blum:
    case AggregatorKind::trackexp:
      return std::make_unique<MultiplicativeAggregator>(to_multiplicative(spec.kind), learners,
                                                        spec.multiplicative, spec.max_delay);
    case AggregatorKind::am: return std::make_unique<AverageMajorityAggregator>(learners);
    case AggregatorKind::alone: return std::make_unique<AloneAggregator>(learners, learner);
  }
  throw std::logic_error("unknown aggregator kind");
}

std::unique_ptr<Aggregator> restore_aggregator(const AggregatorSnapshot& snap) {
  if (snap.version != AggregatorSnapshot::kVersion)
    throw VersionError("unsupported aggregator snapshot version " + std::to_string(snap.version));
  const auto kind = aggregator_kind_from_string(snap.kind);
  switch (kind) {
    case AggregatorKind::pwm: return PwmAggregator::restore(snap);
    case AggregatorKind::epwm: return ExtendedPwmAggregator::restore(snap);
    case AggregatorKind::wm:
    case AggregatorKind::blum:
    case AggregatorKind::trackexp: return MultiplicativeAggregator::restore(snap);
    case AggregatorKind::am: {
      if (snap.integers.size() != 1) throw SchemaError("am snapshot malformed");
      return std::make_unique<AverageMajorityAggregator>(static_cast<std::size_t>(snap.integers[0]));
    }
    case AggregatorKind::alone: {
      if (snap.integers.size() != 2) throw SchemaError("alone snapshot malformed");
      return std::make_unique<AloneAggregator>(static_cast<std::size_t>(snap.integers[0]),
                                               static_cast<std::size_t>(snap.integers[1]));
    }
  }
  throw std::logic_error("unknown aggregator kind");
}

}  // namespace pwm
