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

// Domain types shared by every module: labels, local predictions, the
// (K+1)-long prediction vector with its virtual learner, and integer
// aggregation weights.
//
// Learners are indexed 0..K-1 in code. In a PredictionVector or
// WeightVector, entry 0 belongs to the virtual learner (always predicts +1)
// and learner j lives at entry j+1.

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <vector>

namespace pwm {

using TimeSlot = std::int64_t;

class BinaryLabel {
 public:
  static constexpr BinaryLabel positive() noexcept { return BinaryLabel(1); }
  static constexpr BinaryLabel negative() noexcept { return BinaryLabel(-1); }
  // Throws std::invalid_argument unless v is -1 or +1.
  static BinaryLabel from_int(int v);

  constexpr int value() const noexcept { return value_; }
  constexpr BinaryLabel operator-() const noexcept { return BinaryLabel(-value_); }
  friend constexpr bool operator==(BinaryLabel, BinaryLabel) = default;

 private:
  explicit constexpr BinaryLabel(int v) noexcept : value_(static_cast<std::int8_t>(v)) {}
  std::int8_t value_;
};

class LocalPrediction {
 public:
  constexpr LocalPrediction(BinaryLabel label) noexcept  // NOLINT(implicit)
      : value_(static_cast<std::int8_t>(label.value())) {}
  static constexpr LocalPrediction abstain() noexcept { return LocalPrediction(); }
  // Accepts -1, 0 (abstain) and +1.
  static LocalPrediction from_int(int v);

  constexpr int value() const noexcept { return value_; }
  constexpr bool is_abstain() const noexcept { return value_ == 0; }
  friend constexpr bool operator==(LocalPrediction, LocalPrediction) = default;

 private:
  constexpr LocalPrediction() noexcept : value_(0) {}
  std::int8_t value_;
};

// (1, s_1, ..., s_K). Abstaining learners are stored as 0 so the inner
// product needs no special case.
class PredictionVector {
 public:
  PredictionVector() = default;
  explicit PredictionVector(std::span<const LocalPrediction> local);
  PredictionVector(std::initializer_list<LocalPrediction> local)
      : PredictionVector(std::span<const LocalPrediction>(local.begin(), local.size())) {}
  // Full entries including the leading virtual 1; validated.
  static PredictionVector from_entries(std::span<const int> entries);
  static PredictionVector from_entries(std::initializer_list<int> entries) {
    return from_entries(std::span<const int>(entries.begin(), entries.size()));
  }

  std::size_t size() const noexcept { return entries_.size(); }
  std::size_t learners() const noexcept { return entries_.empty() ? 0 : entries_.size() - 1; }
  int operator[](std::size_t entry) const { return entries_[entry]; }
  std::span<const std::int8_t> entries() const noexcept { return entries_; }
  LocalPrediction local(std::size_t learner) const;
  bool has_abstention() const noexcept;
  // Keeps the virtual entry and the first `learners` local predictions.
  PredictionVector truncated(std::size_t learners) const;

  friend bool operator==(const PredictionVector&, const PredictionVector&) = default;

 private:
  std::vector<std::int8_t> entries_;
};

class WeightVector {
 public:
  WeightVector() = default;
  // All-zero vector for K learners (K+1 entries).
  explicit WeightVector(std::size_t learners) : weights_(learners + 1, 0) {}
  WeightVector(std::initializer_list<std::int64_t> values) : weights_(values) {}
  explicit WeightVector(std::vector<std::int64_t> values) : weights_(std::move(values)) {}

  std::size_t size() const noexcept { return weights_.size(); }
  std::int64_t operator[](std::size_t entry) const { return weights_[entry]; }
  std::span<const std::int64_t> values() const noexcept { return weights_; }
  std::int64_t abs_sum() const noexcept;

  // w <- w + y*s. With freeze_bias the virtual entry stays untouched.
  void add_scaled(const PredictionVector& s, BinaryLabel y, bool freeze_bias = false);

  friend bool operator==(const WeightVector&, const WeightVector&) = default;

 private:
  std::vector<std::int64_t> weights_;
};

struct LabeledInstance {
  TimeSlot time_slot = 1;
  std::vector<double> features;
  BinaryLabel label = BinaryLabel::positive();
};

// sgn with sgn(0) = +1. Throws std::invalid_argument on NaN/inf.
BinaryLabel sign(double v);
constexpr BinaryLabel sign(std::int64_t v) noexcept {
  return v >= 0 ? BinaryLabel::positive() : BinaryLabel::negative();
}

// Integer dot product; abstain entries contribute nothing. Throws
// std::invalid_argument on length mismatch.
std::int64_t inner_product(const WeightVector& w, const PredictionVector& s);

}  // namespace pwm
