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
#include <cmath>
#include <vector>

#include "doctest.h"
#include "pwm/environment.hpp"
#include "pwm/error.hpp"
#include "pwm/experiment.hpp"
#include "pwm/metrics.hpp"

using namespace pwm;

namespace {

EventTrace s3_trace(std::size_t k, std::size_t n, const EnvironmentSpec& env, std::uint64_t seed = 1,
                    double mu = 1.0) {
  GaussianSource src({k, mu, seed});
  return schedule(src, env, n);
}

RunSpec spec_for(std::initializer_list<AggregatorKind> kinds, ClassifierKind ck) {
  RunSpec spec;
  for (auto k : kinds) {
    AggregatorSpec a;
    a.kind = k;
    spec.aggregators.push_back(a);
  }
  spec.classifier.kind = ck;
  spec.compute_oracle = false;
  return spec;
}

}  // namespace

TEST_CASE("trivial models give the ideal setting") {
  const auto t = s3_trace(3, 200, EnvironmentSpec{});
  CHECK(t.learners() == 3);
  CHECK(t.max_delays == std::vector<TimeSlot>{0, 0, 0});
  for (const auto& ev : t.events)
    for (const auto& o : ev.learners) {
      CHECK(o.arrived);
      REQUIRE(o.release.has_value());
      CHECK(*o.release == ev.slot);
      CHECK(o.features.size() == 1);
    }
  CHECK(synchronized_slots(t, 3) == 200);
}

TEST_CASE("label observation fraction follows mu") {
  EnvironmentSpec env;
  env.labels.probability = 0.5;
  const auto t = s3_trace(4, 10000, env);
  for (std::size_t i = 0; i < 4; ++i) {
    std::size_t seen = 0;
    for (const auto& ev : t.events) seen += ev.learners[i].release.has_value();
    CHECK(std::abs(seen / 10000.0 - 0.5) <= 0.02);
  }
}

TEST_CASE("realized delays never exceed the maximum") {
  EnvironmentSpec env;
  env.delay.kind = DelayKind::uniform;
  env.delay.max_delay = {0, 5, 20};
  const auto t = s3_trace(3, 3000, env);
  std::vector<TimeSlot> largest(3, 0);
  for (const auto& ev : t.events)
    for (std::size_t i = 0; i < 3; ++i) {
      const auto d = *ev.learners[i].release - ev.slot;
      CHECK(d >= 0);
      CHECK(d <= env.delay.max_delay[i]);
      largest[i] = std::max(largest[i], d);
    }
  CHECK(largest == std::vector<TimeSlot>{0, 5, 20});

  env.delay.kind = DelayKind::fixed;
  const auto f = s3_trace(3, 50, env);
  for (const auto& ev : f.events)
    for (std::size_t i = 0; i < 3; ++i) CHECK(*ev.learners[i].release - ev.slot == env.delay.max_delay[i]);
}

TEST_CASE("alpha matches realized arrivals") {
  EnvironmentSpec env;
  env.arrival.probability = {0.9, 0.8};
  const auto t = s3_trace(2, 2000, env);
  std::size_t m = 0;
  for (const auto& ev : t.events) {
    m += ev.learners[0].arrived && ev.learners[1].arrived;
    for (const auto& o : ev.learners) CHECK(o.arrived == !o.features.empty());
  }
  CHECK(synchronized_slots(t, 2) == m);
  const auto metrics = run_learners(t, spec_for({AggregatorKind::epwm}, ClassifierKind::threshold));
  CHECK(metrics.synchronized_slots == m);
  CHECK(metrics.alpha == static_cast<double>(2000 - m) / 2000.0);
  CHECK(metrics.bounds.async.has_value());

  EnvironmentSpec full;
  const auto ideal = run_learners(s3_trace(2, 100, full), spec_for({AggregatorKind::pwm}, ClassifierKind::threshold));
  CHECK(ideal.alpha == 0.0);
}

TEST_CASE("schedule is deterministic in its seeds") {
  EnvironmentSpec env;
  env.delay.kind = DelayKind::uniform;
  env.delay.max_delay = {3, 3};
  env.labels.probability = 0.7;
  env.arrival.probability = {0.9, 0.9};
  env.seed = 42;
  const auto a = s3_trace(2, 300, env), b = s3_trace(2, 300, env);
  for (std::size_t n = 0; n < 300; ++n)
    for (std::size_t i = 0; i < 2; ++i) {
      CHECK(a.events[n].learners[i].arrived == b.events[n].learners[i].arrived);
      CHECK(a.events[n].learners[i].release == b.events[n].learners[i].release);
      CHECK(a.events[n].learners[i].features == b.events[n].learners[i].features);
    }
  auto spec = spec_for({AggregatorKind::epwm, AggregatorKind::alone}, ClassifierKind::logistic);
  spec.compute_oracle = true;
  CHECK(metrics_to_json(run_learners(a, spec)) == metrics_to_json(run_learners(b, spec)));
}

TEST_CASE("single perfect expert: at most one PWM mistake") {
  EventTrace t;
  t.dimensions = {1};
  t.max_delays = {0};
  for (TimeSlot n = 1; n <= 300; ++n) {
    StreamEvent ev;
    ev.slot = n;
    ev.label = n % 3 ? BinaryLabel::positive() : BinaryLabel::negative();
    LearnerObservation o;
    o.features = {static_cast<double>(ev.label.value())};
    o.release = n;
    ev.learners = {o};
    t.events.push_back(ev);
  }
  const auto m = run_learners(t, spec_for({AggregatorKind::pwm}, ClassifierKind::threshold));
  CHECK(m.aggregators[0].mistakes[0] <= 1);
  CHECK(m.classifiers.p_star == 0.0);
}

TEST_CASE("ideal setting: every learner evolves identically") {
  const auto t = s3_trace(4, 500, EnvironmentSpec{}, 3, 0.5);
  auto spec = spec_for({AggregatorKind::pwm, AggregatorKind::epwm}, ClassifierKind::logistic);
  std::size_t checks = 0;
  std::vector<std::vector<double>> current(4);
  spec.observer = [&](TimeSlot, std::size_t, std::size_t learner, const Aggregator& agg) {
    current[learner] = agg.weights();
    if (learner == 3) {
      for (std::size_t i = 1; i < 4; ++i) CHECK(current[i] == current[0]);
      ++checks;
    }
  };
  const auto m = run_learners(t, spec);
  CHECK(checks == 1000);
  for (const auto& a : m.aggregators)
    for (std::size_t i = 1; i < 4; ++i) CHECK(a.p_learner[i] == a.p_learner[0]);
}

TEST_CASE("a learner's weights do not depend on another learner's label releases") {
  EnvironmentSpec env;
  env.delay.kind = DelayKind::uniform;
  env.delay.max_delay = {4, 4};
  env.labels.probability = 0.8;
  auto t = s3_trace(2, 400, env, 9);
  auto spec = spec_for({AggregatorKind::epwm}, ClassifierKind::threshold);
  auto record = [&](const EventTrace& trace) {
    std::vector<std::vector<double>> w;
    auto s = spec;
    s.observer = [&](TimeSlot, std::size_t, std::size_t learner, const Aggregator& agg) {
      if (learner == 0) w.push_back(agg.weights());
    };
    run_learners(trace, s);
    return w;
  };
  const auto before = record(t);
  for (auto& ev : t.events) ev.learners[1].release.reset();
  CHECK(record(t) == before);
}

TEST_CASE("no learner arrives: prediction from the async bias") {
  EventTrace t;
  t.dimensions = {1, 1};
  t.max_delays = {0, 0};
  for (TimeSlot n = 1; n <= 20; ++n) {
    StreamEvent ev;
    ev.slot = n;
    ev.label = BinaryLabel::negative();
    LearnerObservation o;
    o.arrived = false;
    o.release = n;
    ev.learners = {o, o};
    t.events.push_back(ev);
  }
  const auto m = run_learners(t, spec_for({AggregatorKind::epwm}, ClassifierKind::threshold));
  // first slot predicts sgn(0) = +1, then the bias goes negative
  CHECK(m.aggregators[0].mistakes == std::vector<std::size_t>{1, 1});
  CHECK(m.instances == 20);
  CHECK(m.alpha == 1.0);
}

TEST_CASE("configuration errors") {
  EnvironmentSpec env;
  env.arrival.probability = {0.5, 0.5};
  const auto t = s3_trace(2, 50, env);
  for (auto k : {AggregatorKind::pwm, AggregatorKind::wm, AggregatorKind::blum, AggregatorKind::trackexp})
    CHECK_THROWS_AS(run_learners(t, spec_for({k}, ClassifierKind::threshold)), ConfigError);
  auto spec = spec_for({AggregatorKind::epwm}, ClassifierKind::threshold);
  spec.aggregated_learners = 3;
  CHECK_THROWS_AS(run_learners(t, spec), ConfigError);
  CHECK_THROWS_AS(run_learners(t, spec_for({}, ClassifierKind::threshold)), ConfigError);
}

TEST_CASE("aggregating a prefix of the learners") {
  const auto t = s3_trace(6, 300, EnvironmentSpec{});
  auto spec = spec_for({AggregatorKind::pwm, AggregatorKind::am}, ClassifierKind::threshold);
  spec.aggregated_learners = 2;
  const auto m = run_learners(t, spec);
  CHECK(m.learners == 2);
  CHECK(m.aggregators[0].final_weights[0].size() == 3);
}
