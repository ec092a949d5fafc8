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

// Best static (hindsight) integer weight vector for a recorded trace of
// prediction vectors and labels.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "pwm/core.hpp"

namespace pwm {

struct TraceStep {
  PredictionVector predictions;
  BinaryLabel label;
};

struct StaticOracleResult {
  WeightVector optimal_weights;
  std::size_t mistakes = 0;
  // True when the enumeration is guaranteed to reach the minimum over all
  // real weight vectors (K <= 4 with weight_cap >= 5). Otherwise `mistakes`
  // only upper-bounds the true minimum.
  bool exact = false;
};

inline constexpr int kDefaultOracleWeightCap = 5;
inline constexpr std::uint64_t kDefaultOracleBudget = 2'000'000'000ULL;

// Exhaustive search over [-cap, cap]^(K+1). Ties resolve to the
// lexicographically smallest vector. Throws BudgetExceededError when
// (2*cap+1)^(K+1) times the number of distinct prediction patterns exceeds
// `budget`.
StaticOracleResult optimal_static_oracle(std::span<const TraceStep> trace,
                                         int weight_cap = kDefaultOracleWeightCap,
                                         std::uint64_t budget = kDefaultOracleBudget);

// Mistakes of a fixed weight vector on a trace (abstentions allowed).
std::size_t count_static_mistakes(const WeightVector& w, std::span<const TraceStep> trace);

}  // namespace pwm
