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

#include <cstdint>
#include <initializer_list>
#include <random>

namespace pwm {

// Portable seeded generator. Bits come from std::mt19937_64 (fully specified
// by the standard); the real-valued draws below are computed here rather than
// through <random> distributions, whose algorithms are implementation-defined.
//
//   uniform01: top 53 bits of one engine output times 2^-53, in [0, 1).
//   normal:    Box-Muller on two uniform01 draws (u1 mapped to (0, 1]),
//              one variate per pair; the sine branch is discarded.
//   bernoulli: uniform01() < p.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  // Independent stream for (seed, tag...), mixed through std::seed_seq.
  static Rng derived(std::uint64_t seed, std::initializer_list<std::uint64_t> tags);

  std::uint64_t next_bits() { return engine_(); }
  double uniform01();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }
  // Integer uniformly distributed on [0, bound_inclusive].
  std::int64_t uniform_int(std::int64_t bound_inclusive);
  double normal(double mean, double stddev);
  bool bernoulli(double p) { return uniform01() < p; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace pwm
