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

#include "pwm/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "pwm/error.hpp"

namespace pwm {

namespace {

void require_probability(double p, const char* name) {
  if (!(p >= 0.0 && p <= 1.0))
    throw std::invalid_argument(std::string(name) + " must be a probability in [0,1]");
}

void require_sizes(std::size_t learners, std::size_t instances) {
  if (learners < 1) throw std::invalid_argument("K must be >= 1");
  if (instances < 1) throw std::invalid_argument("N must be >= 1");
}

void require_base(double base) {
  if (!(base >= 0.0 && std::isfinite(base))) throw std::invalid_argument("base bound must be >= 0");
}

}  // namespace

double bound_b1(std::size_t learners, std::size_t instances, double p_opt) {
  require_sizes(learners, instances);
  require_probability(p_opt, "p_opt");
  const double k = static_cast<double>(learners);
  return 2.0 * k * p_opt + k * (k + 1.0) / static_cast<double>(instances);
}

double bound_b2(std::size_t learners, std::size_t instances, double p_star, std::size_t v_star) {
  require_sizes(learners, instances);
  require_probability(p_star, "p_star");
  if (v_star < 1 || v_star > learners) throw std::invalid_argument("v_star must be in [1, K]");
  const double a = (static_cast<double>(learners) + 1.0) /
                   (2.0 * static_cast<double>(instances) * static_cast<double>(v_star));
  return 2.0 * p_star + a + std::sqrt(a * a + 4.0 * a * p_star);
}

double bound_b(std::size_t learners, std::size_t instances, double p_opt, double p_star,
               std::size_t v_star) {
  return std::min({bound_b1(learners, instances, p_opt),
                   bound_b2(learners, instances, p_star, v_star), 1.0});
}

double bound_delayed(double base, std::span<const std::int64_t> max_delays, std::size_t instances,
                     std::size_t learners) {
  require_sizes(learners, instances);
  require_base(base);
  if (max_delays.size() != learners)
    throw std::invalid_argument("need one max delay per learner");
  double total = 0.0;
  for (auto d : max_delays) {
    if (d < 0) throw std::invalid_argument("max delays must be >= 0");
    total += static_cast<double>(d);
  }
  return base + total / (static_cast<double>(instances) * static_cast<double>(learners));
}

double lambda_term(double epsilon, double z) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw std::invalid_argument("epsilon must be in (0,1)");
  if (!(z > 0.0)) throw std::invalid_argument("lambda is undefined for z <= 0");
  return std::sqrt(std::log(1.0 / epsilon) / (2.0 * z));
}

double bound_missing(double base, double mu, double epsilon, std::size_t observed_errors) {
  require_base(base);
  if (!(mu > 0.0 && mu <= 1.0)) throw std::invalid_argument("mu must be in (0,1]");
  if (observed_errors == 0)
    throw NotApplicableError("missing-label bound needs at least one observed error");
  const double lambda = lambda_term(epsilon, static_cast<double>(observed_errors));
  if (lambda >= mu)
    throw NotApplicableError("lambda(" + std::to_string(epsilon) + ", " +
                             std::to_string(observed_errors) + ") = " + std::to_string(lambda) +
                             " >= mu = " + std::to_string(mu));
  return base / (mu - lambda);
}

double bound_async(double base, double alpha) {
  require_base(base);
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw std::invalid_argument("alpha must be in [0,1]");
  return std::min(base + alpha, 1.0);
}

}  // namespace pwm
