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

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "pwm/bounds.hpp"
#include "pwm/error.hpp"

using namespace pwm;
using doctest::Approx;

TEST_CASE("bound_b1 examples") {
  CHECK(bound_b1(8, 20000, 0.0) == Approx(0.0036));
  CHECK(bound_b1(1, 100, 0.1) == Approx(0.22));
  CHECK(bound_b1(8, 1000000000, 0.1) == Approx(1.6).epsilon(1e-6));
  CHECK_THROWS_AS(bound_b1(0, 10, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(bound_b1(2, 0, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(bound_b1(2, 10, 1.5), std::invalid_argument);
}

TEST_CASE("bound_b2 examples") {
  CHECK(bound_b2(8, 1000, 0.0, 2) == Approx(0.0045));
  // f(0.5, 1) with a = 9/2000: 1 + a + sqrt(a^2 + 2a)
  const double a = 9.0 / 2000.0;
  CHECK(bound_b2(8, 1000, 0.5, 1) == Approx(1.0 + a + std::sqrt(a * a + 2.0 * a)).epsilon(1e-14));
  CHECK(bound_b2(8, 1000, 0.5, 1) == Approx(1.099475).epsilon(1e-6));
  CHECK(bound_b2(8, 1000000000, 0.2, 3) == Approx(0.4).epsilon(1e-3));
  CHECK(bound_b2(8, 1000, 0.0, 8) == Approx(0.001125));
  CHECK_THROWS_AS(bound_b2(8, 1000, 0.1, 0), std::invalid_argument);
  CHECK_THROWS_AS(bound_b2(8, 1000, 0.1, 9), std::invalid_argument);
}

TEST_CASE("bound_b takes the minimum and caps at 1") {
  CHECK(bound_b(8, 10, 0.5, 0.5, 1) == 1.0);
  CHECK(bound_b(2, 20000, 0.0, 0.3, 1) == Approx(bound_b1(2, 20000, 0.0)));
  const double b2 = bound_b2(8, 1000, 0.0, 8);
  CHECK(b2 == Approx(9.0 / 8000.0));
  CHECK(b2 < bound_b1(8, 1000, 0.0));
  CHECK(bound_b(8, 1000, 0.0, 0.0, 8) == Approx(b2));
  CHECK(bound_b(BoundInputs{8, 1000, 0.0, 0.0, 8}) == Approx(b2));
}

TEST_CASE("bound properties on random inputs") {
  std::mt19937_64 gen(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 2000; ++t) {
    const std::size_t k = 1 + gen() % 16, n = 1 + gen() % 100000;
    const double p_star = u(gen), p_opt = p_star * u(gen);
    const std::size_t v = 1 + gen() % k;
    const double b = bound_b(k, n, p_opt, p_star, v);
    CHECK(b <= bound_b1(k, n, p_opt));
    CHECK(b <= bound_b2(k, n, p_star, v));
    CHECK(b <= 1.0);
    const double dp = 0.01 * u(gen);
    if (p_opt + dp <= 1.0) CHECK(bound_b1(k, n, p_opt + dp) >= bound_b1(k, n, p_opt));
    CHECK(bound_b1(k + 1, n, p_opt) >= bound_b1(k, n, p_opt));
    if (p_star + dp <= 1.0) CHECK(bound_b2(k, n, p_star + dp, v) >= bound_b2(k, n, p_star, v));
    if (v < k) CHECK(bound_b2(k, n, p_star, v + 1) <= bound_b2(k, n, p_star, v));
  }
}

TEST_CASE("bound_delayed examples") {
  const std::vector<std::int64_t> zero{0, 0, 0};
  CHECK(bound_delayed(0.3, zero, 100, 3) == Approx(0.3));
  const std::vector<std::int64_t> d{10, 30};
  CHECK(bound_delayed(0.1, d, 1000, 2) == Approx(0.12));
  CHECK(bound_delayed(0.1, d, 1000000000, 2) == Approx(0.1).epsilon(1e-7));
  CHECK_THROWS_AS(bound_delayed(0.1, d, 1000, 3), std::invalid_argument);
  const std::vector<std::int64_t> bad{-1, 2};
  CHECK_THROWS_AS(bound_delayed(0.1, bad, 1000, 2), std::invalid_argument);
}

TEST_CASE("lambda_term examples") {
  CHECK(lambda_term(std::exp(-2.0), 1.0) == Approx(1.0));
  CHECK(lambda_term(0.05, 100.0) == Approx(0.122388).epsilon(1e-5));
  CHECK(lambda_term(0.05, 1e12) < 1e-5);
  CHECK_THROWS_AS(lambda_term(0.05, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(lambda_term(0.0, 10.0), std::invalid_argument);
  CHECK_THROWS_AS(lambda_term(1.0, 10.0), std::invalid_argument);
}

TEST_CASE("bound_missing examples") {
  CHECK(bound_missing(0.2, 1.0, 0.05, 1000000000) == Approx(0.2).epsilon(1e-4));
  CHECK(bound_missing(0.2, 0.5, 0.05, 100) == Approx(0.2 / (0.5 - lambda_term(0.05, 100))));
  CHECK(bound_missing(0.2, 0.5, 0.05, 100) == Approx(0.52965).epsilon(1e-4));
  CHECK_THROWS_AS(bound_missing(0.2, 0.1, 0.05, 10), NotApplicableError);
  CHECK_THROWS_AS(bound_missing(0.2, 0.5, 0.05, 0), NotApplicableError);
  CHECK_THROWS_AS(bound_missing(0.2, 0.0, 0.05, 10), std::invalid_argument);
}

TEST_CASE("bound_async examples") {
  CHECK(bound_async(0.3, 0.0) == Approx(0.3));
  CHECK(bound_async(0.3, 0.2) == Approx(0.5));
  CHECK(bound_async(0.9, 0.5) == 1.0);
  CHECK_THROWS_AS(bound_async(0.3, 1.2), std::invalid_argument);
  CHECK_THROWS_AS(bound_async(-0.1, 0.2), std::invalid_argument);
}
