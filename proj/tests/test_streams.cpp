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
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "doctest.h"
#include "pwm/error.hpp"
#include "pwm/rng.hpp"
#include "pwm/streams.hpp"

using namespace pwm;
namespace fs = std::filesystem;

namespace {

fs::path write_temp(const std::string& name, const std::string& text) {
  const auto dir = fs::temp_directory_path() / "pwm_stream_tests";
  fs::create_directories(dir);
  const auto p = dir / name;
  std::ofstream(p, std::ios::binary) << text;
  return p;
}

double correlation(const std::vector<double>& a, const std::vector<double>& b) {
  const double n = static_cast<double>(a.size());
  double ma = 0, mb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) ma += a[i], mb += b[i];
  ma /= n, mb /= n;
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  return sab / std::sqrt(saa * sbb);
}

}  // namespace

TEST_CASE("rng is deterministic and derived streams differ") {
  Rng a(5), b(5);
  for (int i = 0; i < 100; ++i) CHECK(a.next_bits() == b.next_bits());
  auto c = Rng::derived(5, {1}), d = Rng::derived(5, {2});
  CHECK(c.next_bits() != d.next_bits());
  Rng u(9);
  for (int i = 0; i < 10000; ++i) {
    const double x = u.uniform01();
    CHECK(x >= 0.0);
    CHECK(x < 1.0);
    const auto k = u.uniform_int(20);
    CHECK(k >= 0);
    CHECK(k <= 20);
  }
}

TEST_CASE("S1: frozen hyperplane labels are its sign") {
  RotatingHyperplaneSource src({1, 1, 0.0, 3});
  src.set_theta({1.0, 0.0, 0.0});
  for (int n = 0; n < 500; ++n) {
    const auto s = src.next();
    CHECK(s.label == sign(s.features[0][0]));
    CHECK(src.theta() == std::vector<double>{1.0, 0.0, 0.0});
  }
}

TEST_CASE("S1: features uniform in the cube, labels balanced, irrelevant learners independent") {
  RotatingHyperplaneSource src({4, 2, 0.1, 11});
  const int n = 10000;
  int positives = 0;
  std::vector<double> y, x_irrelevant, x_relevant_score;
  for (int i = 0; i < n; ++i) {
    const auto theta = src.theta();
    const auto s = src.next();
    for (const auto& f : s.features)
      for (double v : f) {
        CHECK(v >= -1.0);
        CHECK(v < 1.0);
      }
    positives += s.label == BinaryLabel::positive();
    y.push_back(s.label.value());
    x_irrelevant.push_back(s.features[3][0]);
    double score = 0;
    for (std::size_t l = 0; l < 3; ++l) score += theta[l] * s.features[0][l];
    x_relevant_score.push_back(score);
  }
  const double frac = static_cast<double>(positives) / n;
  CHECK(frac >= 0.35);
  CHECK(frac <= 0.65);
  CHECK(std::abs(correlation(y, x_irrelevant)) < 4.0 / std::sqrt(static_cast<double>(n)));
  CHECK(correlation(y, x_relevant_score) > 0.2);
}

TEST_CASE("S1: same seed gives identical streams") {
  RotatingHyperplaneSource a({3, 2, 0.1, 8}), b({3, 2, 0.1, 8});
  for (int i = 0; i < 200; ++i) {
    const auto sa = a.next(), sb = b.next();
    CHECK(sa.features == sb.features);
    CHECK(sa.label == sb.label);
  }
  CHECK_THROWS_AS(RotatingHyperplaneSource({3, 4, 0.1, 1}), std::invalid_argument);
}

TEST_CASE("S2: noiseless observations equal the events") {
  EventDetectionConfig c;
  c.learners = 4;
  c.noise_good = c.noise_bad = 0.0;
  c.event_prob = 0.3;
  c.seed = 4;
  EventDetectionSource src(c);
  for (int n = 0; n < 300; ++n) {
    const auto s = src.next();
    bool any = false;
    for (std::size_t i = 0; i < 4; ++i) {
      CHECK(s.features[i][0] == static_cast<double>(src.last_events()[i]));
      any = any || src.last_events()[i] == 1;
    }
    CHECK(s.label == (any ? BinaryLabel::positive() : BinaryLabel::negative()));
  }
}

TEST_CASE("S2: label rule all") {
  EventDetectionConfig c;
  c.learners = 2;
  c.event_prob = 0.5;
  c.label_rule = EventLabelRule::all;
  EventDetectionSource src(c);
  for (int n = 0; n < 300; ++n) {
    const auto s = src.next();
    const bool all = src.last_events()[0] == 1 && src.last_events()[1] == 1;
    CHECK(s.label == (all ? BinaryLabel::positive() : BinaryLabel::negative()));
  }
}

TEST_CASE("S2: absorbing chain keeps one concept") {
  EventDetectionConfig c;
  c.switch_prob = 0.0;
  EventDetectionSource src(c);
  const auto states = src.bad_states();
  for (int n = 0; n < 2000; ++n) CHECK(src.next().concept_id == 0);
  CHECK(src.bad_states() == states);
}

TEST_CASE("S2: stationary bad-state fraction and one concept id per drift slot") {
  EventDetectionConfig c;
  c.learners = 8;
  c.seed = 17;
  EventDetectionSource src(c);
  const int n = 100000;
  double bad = 0;
  std::uint64_t drifts = 0;
  auto prev = src.bad_states();
  ConceptId last = 0;
  for (int i = 0; i < n; ++i) {
    const auto s = src.next();
    CHECK(s.concept_id == last);
    const auto& now = src.bad_states();
    if (now != prev) ++drifts;
    prev = now;
    last = src.concept_id();
    CHECK(last == drifts);
    for (bool b : now) bad += b;
  }
  CHECK(bad / (8.0 * n) == doctest::Approx(0.5).epsilon(0.1));
}

TEST_CASE("S2: variance versus standard deviation interpretation") {
  EventDetectionConfig c;
  c.learners = 1;
  c.event_prob = 0.0;
  c.switch_prob = 0.0;
  c.noise_good = c.noise_bad = 0.25;
  for (bool as_variance : {true, false}) {
    c.noise_as_variance = as_variance;
    EventDetectionSource src(c);
    double sum = 0, sq = 0;
    const int n = 50000;
    for (int i = 0; i < n; ++i) {
      const double v = src.next().features[0][0] + 1.0;
      sum += v;
      sq += v * v;
    }
    const double var = sq / n - (sum / n) * (sum / n);
    CHECK(var == doctest::Approx(as_variance ? 0.25 : 0.0625).epsilon(0.05));
  }
}

TEST_CASE("S3: conditional means and unit variance") {
  GaussianSource src({3, 0.7, 2});
  const int n = 40000;
  double sum_pos = 0, sq_pos = 0;
  int n_pos = 0, n_total_pos = 0;
  for (int i = 0; i < n; ++i) {
    const auto s = src.next();
    if (s.label == BinaryLabel::positive()) {
      ++n_total_pos;
      for (const auto& f : s.features) {
        sum_pos += f[0];
        sq_pos += f[0] * f[0];
        ++n_pos;
      }
    }
  }
  const double mean = sum_pos / n_pos;
  CHECK(std::abs(mean - 0.7) < 3.0 / std::sqrt(static_cast<double>(n_pos)));
  const double var = sq_pos / n_pos - mean * mean;
  // sd of the sample variance of normals is sqrt(2/n)
  CHECK(std::abs(var - 1.0) < 3.0 * std::sqrt(2.0 / n_pos));
  CHECK(std::abs(n_total_pos / static_cast<double>(n) - 0.5) < 3.0 * 0.5 / std::sqrt(n * 1.0));
}

TEST_CASE("S3: mu = 0 carries no information") {
  GaussianSource src({1, 0.0, 5});
  const int n = 20000;
  int correct = 0;
  for (int i = 0; i < n; ++i) {
    const auto s = src.next();
    correct += sign(s.features[0][0]) == s.label;
  }
  CHECK(std::abs(correct / static_cast<double>(n) - 0.5) < 4.0 * 0.5 / std::sqrt(n * 1.0));
}

TEST_CASE("CSV ingestion with label mapping") {
  const auto schema_path = write_temp(
      "schema.json",
      R"({"label":"y","label_mapping":"zero_one","columns":[{"name":"a","learner":0,"feature":0},{"name":"b","learner":1,"feature":0},{"name":"c","learner":1,"feature":1}]})");
  const auto csv = write_temp("data.csv", "c,a,y,b\n3,1.5,0,2\n-3,-1.5,1,-2\n");
  const auto schema = load_csv_schema(schema_path.string());
  CHECK(schema.learners() == 2);
  CHECK(schema.dimensions() == std::vector<std::size_t>{1, 2});
  const auto rows = csv_ingest(csv.string(), schema);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].label == BinaryLabel::negative());
  CHECK(rows[1].label == BinaryLabel::positive());
  CHECK(rows[0].features[0] == std::vector<double>{1.5});
  CHECK(rows[0].features[1] == std::vector<double>{2.0, 3.0});

  ReplayStream a(rows, schema.dimensions()), b(rows, schema.dimensions());
  for (int i = 0; i < 2; ++i) {
    const auto sa = a.next(), sb = b.next();
    CHECK(sa.features == sb.features);
    CHECK(sa.label == sb.label);
  }
  CHECK_THROWS_AS(a.next(), std::out_of_range);
}

TEST_CASE("CSV errors") {
  const auto schema = parse_csv_schema(
      R"({"label":"y","label_mapping":"plus_minus","columns":[{"name":"a","learner":0,"feature":0}]})");
  const auto missing = write_temp("missing.csv", "y,b\n1,2\n");
  CHECK_THROWS_AS(csv_ingest(missing.string(), schema), SchemaError);

  const auto unmapped = write_temp("unmapped.csv", "a,y\n1,1\n2,0\n");
  CHECK_THROWS_AS(csv_ingest(unmapped.string(), schema), SchemaError);

  const auto malformed = write_temp("malformed.csv", "a,y\n1,1\nfoo,-1\n");
  try {
    csv_ingest(malformed.string(), schema);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.position() == 3);
  }
  const auto short_row = write_temp("short.csv", "a,y\n1\n");
  CHECK_THROWS_AS(csv_ingest(short_row.string(), schema), ParseError);
  CHECK_THROWS_AS(csv_ingest("/nonexistent/file.csv", schema), IoError);
  CHECK_THROWS(parse_csv_schema(R"({"label":"y"})"));
}
