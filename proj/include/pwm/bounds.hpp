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

// Closed-form upper bounds on the additive-rule mistake probability.
//
//   B1 = 2 K P^O + K(K+1)/N                       (best static aggregation)
//   B2 = f(P*, v*),  f(x,y) = 2x + a + sqrt(a^2 + 4 a x),  a = (K+1)/(2 N y)
//   B  = min(B1, B2, 1)
//
// and their distributed-environment extensions (delays, missing labels,
// asynchronous arrivals). All functions throw std::invalid_argument on
// out-of-range inputs.

#include <cstddef>
#include <cstdint>
#include <span>

namespace pwm {

struct BoundInputs {
  std::size_t learners = 1;     // K
  std::size_t instances = 1;    // N
  double p_opt = 0.0;           // P^O
  double p_star = 0.0;          // P*
  std::size_t v_star = 1;       // v*
};

double bound_b1(std::size_t learners, std::size_t instances, double p_opt);
double bound_b2(std::size_t learners, std::size_t instances, double p_star, std::size_t v_star);
double bound_b(std::size_t learners, std::size_t instances, double p_opt, double p_star,
               std::size_t v_star);
inline double bound_b(const BoundInputs& in) {
  return bound_b(in.learners, in.instances, in.p_opt, in.p_star, in.v_star);
}

// base + sum(max_delays) / (N K)
double bound_delayed(double base, std::span<const std::int64_t> max_delays, std::size_t instances,
                     std::size_t learners);

// sqrt(ln(1/epsilon) / (2 z)); z = 0 is undefined.
double lambda_term(double epsilon, double z);

// base / (mu - lambda(epsilon, observed_errors)). Throws NotApplicableError
// when lambda >= mu (including observed_errors == 0).
double bound_missing(double base, double mu, double epsilon, std::size_t observed_errors);

// min(base + alpha, 1)
double bound_async(double base, double alpha);

}  // namespace pwm
