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

#include "pwm/core.hpp"

#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace pwm {

BinaryLabel BinaryLabel::from_int(int v) {
  if (v == 1) return positive();
  if (v == -1) return negative();
  throw std::invalid_argument("binary label must be -1 or +1, got " + std::to_string(v));
}

LocalPrediction LocalPrediction::from_int(int v) {
  if (v == 0) return abstain();
  return LocalPrediction(BinaryLabel::from_int(v));
}

PredictionVector::PredictionVector(std::span<const LocalPrediction> local) {
  entries_.reserve(local.size() + 1);
  entries_.push_back(1);
  for (const auto& p : local) entries_.push_back(static_cast<std::int8_t>(p.value()));
}

PredictionVector PredictionVector::from_entries(std::span<const int> entries) {
  if (entries.empty() || entries[0] != 1)
    throw std::invalid_argument("prediction vector entry 0 (virtual learner) must be 1");
  PredictionVector out;
  out.entries_.reserve(entries.size());
  for (int e : entries) {
    if (e < -1 || e > 1)
      throw std::invalid_argument("prediction entries must be in {-1, 0, +1}");
    out.entries_.push_back(static_cast<std::int8_t>(e));
  }
  return out;
}

LocalPrediction PredictionVector::local(std::size_t learner) const {
  if (learner + 1 >= entries_.size()) throw std::out_of_range("learner index out of range");
  return LocalPrediction::from_int(entries_[learner + 1]);
}

bool PredictionVector::has_abstention() const noexcept {
  for (std::size_t i = 1; i < entries_.size(); ++i)
    if (entries_[i] == 0) return true;
  return false;
}

PredictionVector PredictionVector::truncated(std::size_t learners) const {
  if (learners + 1 > entries_.size()) throw std::out_of_range("cannot truncate to more learners");
  PredictionVector out;
  out.entries_.assign(entries_.begin(), entries_.begin() + static_cast<std::ptrdiff_t>(learners + 1));
  return out;
}

std::int64_t WeightVector::abs_sum() const noexcept {
  std::int64_t total = 0;
  for (auto w : weights_) total += std::llabs(w);
  return total;
}

void WeightVector::add_scaled(const PredictionVector& s, BinaryLabel y, bool freeze_bias) {
  if (s.size() != weights_.size())
    throw std::invalid_argument("weight/prediction length mismatch");
  const auto entries = s.entries();
  for (std::size_t j = freeze_bias ? 1 : 0; j < weights_.size(); ++j)
    weights_[j] += static_cast<std::int64_t>(y.value()) * entries[j];
}

BinaryLabel sign(double v) {
  if (!std::isfinite(v)) throw std::invalid_argument("sign of a non-finite value");
  return v >= 0.0 ? BinaryLabel::positive() : BinaryLabel::negative();
}

std::int64_t inner_product(const WeightVector& w, const PredictionVector& s) {
  if (w.size() != s.size())
    throw std::invalid_argument("inner product length mismatch: " + std::to_string(w.size()) +
                                " vs " + std::to_string(s.size()));
  std::int64_t acc = 0;
  const auto weights = w.values();
  const auto entries = s.entries();
  for (std::size_t j = 0; j < weights.size(); ++j) acc += weights[j] * entries[j];
  return acc;
}

}  // namespace pwm
