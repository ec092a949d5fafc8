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

// Synthetic drifting sources and CSV replay. A source emits, per slot, one
// feature vector per learner plus the shared label, tagged with the id of
// the concept (vector of sources) that generated it.

#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "pwm/core.hpp"
#include "pwm/rng.hpp"

namespace pwm {

using ConceptId = std::uint64_t;

struct StreamSample {
  std::vector<std::vector<double>> features;  // one vector per learner
  BinaryLabel label = BinaryLabel::positive();
  ConceptId concept_id = 0;
};

class Stream {
 public:
  virtual ~Stream() = default;
  virtual StreamSample next() = 0;
  virtual std::size_t learners() const = 0;
  virtual std::vector<std::size_t> dimensions() const = 0;
};

// S1: each learner sees x ~ U[-1,1]^3; y = +1 iff sum over the first
// `relevant` learners of theta_i . x_i >= 0. theta starts N(0,1) and takes a
// Gaussian random-walk step after every slot.
struct RotatingHyperplaneConfig {
  std::size_t learners = 16;
  std::size_t relevant = 8;
  double walk_std = 0.1;
  std::uint64_t seed = 1;
};

class RotatingHyperplaneSource final : public Stream {
 public:
  static constexpr std::size_t kDimension = 3;
  explicit RotatingHyperplaneSource(const RotatingHyperplaneConfig& config);

  StreamSample next() override;
  std::size_t learners() const override { return config_.learners; }
  std::vector<std::size_t> dimensions() const override {
    return std::vector<std::size_t>(config_.learners, kDimension);
  }
  // relevant x 3, row-major.
  const std::vector<double>& theta() const noexcept { return theta_; }
  void set_theta(std::vector<double> theta);

 private:
  RotatingHyperplaneConfig config_;
  Rng features_rng_;
  Rng walk_rng_;
  std::vector<double> theta_;
};

// How the shared label relates to the per-learner local events.
enum class EventLabelRule {
  any,  // +1 iff at least one local event fired
  all,  // +1 iff every local event fired
};

// S2: learner i observes x_i = e_i + noise, e_i = +1 with probability
// event_prob (else -1). Each learner's source is in a good or bad state
// (2-state Markov chain, symmetric switch probability) which selects the
// noise level.
struct EventDetectionConfig {
  std::size_t learners = 8;
  double event_prob = 0.05;
  double noise_good = 0.5;
  double noise_bad = 1.0;
  // When true, noise_good/noise_bad are variances, otherwise std deviations.
  bool noise_as_variance = true;
  double switch_prob = 0.01;
  EventLabelRule label_rule = EventLabelRule::any;
  std::uint64_t seed = 1;
};

class EventDetectionSource final : public Stream {
 public:
  explicit EventDetectionSource(const EventDetectionConfig& config);

  StreamSample next() override;
  std::size_t learners() const override { return config_.learners; }
  std::vector<std::size_t> dimensions() const override {
    return std::vector<std::size_t>(config_.learners, 1);
  }
  // true = bad state.
  const std::vector<bool>& bad_states() const noexcept { return bad_; }
  // Events (+1/-1) drawn for the most recent slot.
  const std::vector<int>& last_events() const noexcept { return events_; }
  ConceptId concept_id() const noexcept { return concept_; }

 private:
  EventDetectionConfig config_;
  Rng rng_;
  std::vector<bool> bad_;
  std::vector<int> events_;
  ConceptId concept_ = 0;
  double std_good_;
  double std_bad_;
};

// S3: y = +/-1 with probability 1/2 each; x_i ~ N(y*mu, 1) independently.
struct GaussianConfig {
  std::size_t learners = 8;
  double mu = 1.0;
  std::uint64_t seed = 1;
};

class GaussianSource final : public Stream {
 public:
  explicit GaussianSource(const GaussianConfig& config);
  StreamSample next() override;
  std::size_t learners() const override { return config_.learners; }
  std::vector<std::size_t> dimensions() const override {
    return std::vector<std::size_t>(config_.learners, 1);
  }

 private:
  GaussianConfig config_;
  Rng rng_;
};

// ---------------------------------------------------------------------------
// CSV ingestion
// ---------------------------------------------------------------------------

enum class LabelMapping {
  zero_one,    // 0 -> -1, 1 -> +1
  plus_minus,  // -1 -> -1, +1 -> +1
};

struct CsvColumn {
  std::string name;
  std::size_t learner = 0;
  std::size_t feature = 0;
};

struct CsvSchema {
  std::string label_column;
  LabelMapping mapping = LabelMapping::zero_one;
  std::vector<CsvColumn> columns;

  std::size_t learners() const;
  std::vector<std::size_t> dimensions() const;
};

// Schema file (JSON): {"label": "y", "label_mapping": "zero_one",
//  "columns": [{"name": "a", "learner": 0, "feature": 0}, ...]}
CsvSchema load_csv_schema(const std::string& path);
CsvSchema parse_csv_schema(const std::string& json_text);

// Reads the whole file. Malformed rows raise ParseError carrying the 1-based
// line number; label values outside the mapping or columns missing from the
// header raise SchemaError.
std::vector<StreamSample> csv_ingest(const std::string& path, const CsvSchema& schema);

// Replays a fixed sequence; throws std::out_of_range when exhausted.
class ReplayStream final : public Stream {
 public:
  ReplayStream(std::vector<StreamSample> samples, std::vector<std::size_t> dimensions);
  StreamSample next() override;
  std::size_t learners() const override { return dimensions_.size(); }
  std::vector<std::size_t> dimensions() const override { return dimensions_; }
  std::size_t size() const noexcept { return samples_.size(); }

 private:
  std::vector<StreamSample> samples_;
  std::vector<std::size_t> dimensions_;
  std::size_t cursor_ = 0;
};

}  // namespace pwm
