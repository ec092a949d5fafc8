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

#include <algorithm>
#include <random>
#include <set>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "pwm/error.hpp"
#include "pwm/metrics.hpp"
#include "pwm/oracle.hpp"
#include "reference_oracle.hpp"

using namespace pwm;

namespace {

TraceStep step(std::initializer_list<int> e, int y) {
  return {PredictionVector::from_entries(e), BinaryLabel::from_int(y)};
}

std::vector<TraceStep> random_trace(std::mt19937_64& gen, std::size_t k, std::size_t n) {
  std::vector<TraceStep> t;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<int> e{1};
    for (std::size_t j = 0; j < k; ++j) e.push_back(gen() & 1 ? 1 : -1);
    t.push_back({PredictionVector::from_entries(e), gen() & 1 ? BinaryLabel::positive()
                                                               : BinaryLabel::negative()});
  }
  return t;
}

std::size_t reference_min(const std::vector<TraceStep>& t) {
  std::vector<std::vector<int>> steps;
  std::vector<int> labels;
  for (const auto& s : t) {
    steps.emplace_back(s.predictions.entries().begin(), s.predictions.entries().end());
    labels.push_back(s.label.value());
  }
  return reference::min_static_mistakes(steps, labels);
}

}  // namespace

TEST_CASE("oracle: perfect learner gives zero mistakes") {
  std::vector<TraceStep> t;
  std::mt19937_64 gen(1);
  for (int n = 0; n < 30; ++n) {
    const int y = gen() & 1 ? 1 : -1;
    t.push_back(step({1, y, gen() & 1 ? 1 : -1, gen() & 1 ? 1 : -1}, y));
  }
  const auto r = optimal_static_oracle(t);
  CHECK(r.mistakes == 0);
  CHECK(r.exact);
  CHECK(count_static_mistakes(WeightVector{0, 1, 0, 0}, t) == 0);
  CHECK(count_static_mistakes(r.optimal_weights, t) == 0);
}

TEST_CASE("oracle: XOR trace has one unavoidable mistake") {
  const std::vector<TraceStep> t{step({1, 1, 1}, -1), step({1, 1, -1}, 1), step({1, -1, 1}, 1),
                                 step({1, -1, -1}, -1)};
  const auto r = optimal_static_oracle(t);
  CHECK(r.mistakes == 1);
  CHECK(static_cast<double>(r.mistakes) / t.size() == doctest::Approx(0.25));
  // test-side brute force over [-3,3]^3
  std::size_t best = t.size();
  for (int a = -3; a <= 3; ++a)
    for (int b = -3; b <= 3; ++b)
      for (int c = -3; c <= 3; ++c)
        best = std::min(best, count_static_mistakes(WeightVector{a, b, c}, t));
  CHECK(best == 1);
}

TEST_CASE("oracle: single instance, tie-breaking and contract errors") {
  const std::vector<TraceStep> one{step({1, -1, 1}, -1)};
  const auto r = optimal_static_oracle(one);
  CHECK(r.mistakes == 0);
  // lexicographically smallest zero-mistake vector in [-5,5]^3
  CHECK(r.optimal_weights == WeightVector{-5, -5, -5});

  CHECK_THROWS_AS(optimal_static_oracle(std::vector<TraceStep>{}), std::invalid_argument);
  CHECK_THROWS_AS(optimal_static_oracle(std::vector<TraceStep>{step({1, 0, 1}, 1)}),
                  ContractViolation);
  CHECK_THROWS_AS(optimal_static_oracle(one, 0), std::invalid_argument);
}

TEST_CASE("oracle: exactness flag and budget") {
  std::mt19937_64 gen(2);
  CHECK(optimal_static_oracle(random_trace(gen, 4, 20)).exact);
  CHECK_FALSE(optimal_static_oracle(random_trace(gen, 4, 20), 4).exact);
  CHECK_FALSE(optimal_static_oracle(random_trace(gen, 5, 20), 1).exact);
  CHECK_THROWS_AS(optimal_static_oracle(random_trace(gen, 8, 50), 5, 1000000), BudgetExceededError);
}

TEST_CASE("oracle matches the separability reference on random small traces") {
  std::mt19937_64 gen(3);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t k = 1 + trial % 3;
    const auto t = random_trace(gen, k, 1 + gen() % 12);
    CHECK(optimal_static_oracle(t).mistakes == reference_min(t));
  }
}

TEST_CASE("oracle beats every single classifier and is permutation invariant") {
  std::mt19937_64 gen(4);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t k = 1 + trial % 4;
    auto t = random_trace(gen, k, 25);
    const auto r = optimal_static_oracle(t);
    const auto rates = classifier_error_rates(t);
    for (auto m : rates.mistakes) CHECK(r.mistakes <= m);
    std::shuffle(t.begin(), t.end(), gen);
    CHECK(optimal_static_oracle(t).mistakes == r.mistakes);
  }
}

TEST_CASE("weight cap 5 reaches every threshold function of up to 4 inputs") {
  // Known counts of linearly separable Boolean functions of k inputs.
  const std::size_t expected[] = {0, 4, 14, 104, 1882};
  for (std::size_t k = 1; k <= 4; ++k) {
    std::vector<std::vector<int>> points;
    for (std::size_t m = 0; m < (1u << k); ++m) {
      std::vector<int> e{1};
      for (std::size_t j = 0; j < k; ++j) e.push_back((m >> j) & 1 ? 1 : -1);
      points.push_back(e);
    }
    std::set<std::uint32_t> dichotomies;
    std::vector<int> w(k + 1, -5);
    while (true) {
      std::uint32_t d = 0;
      for (std::size_t p = 0; p < points.size(); ++p) {
        long dot = 0;
        for (std::size_t j = 0; j <= k; ++j) dot += w[j] * points[p][j];
        if (dot >= 0) d |= 1u << p;
      }
      dichotomies.insert(d);
      std::size_t j = 0;
      while (j <= k && ++w[j] > 5) w[j++] = -5;
      if (j > k) break;
    }
    CHECK(dichotomies.size() == expected[k]);
  }
}
