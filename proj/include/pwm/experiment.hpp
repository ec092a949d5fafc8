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

// Declarative experiment files: one JSON document describes the stream, the
// environment, the aggregators and the seeds; an optional sweep varies one
// numeric key. See docs/config.md for the grammar.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pwm/environment.hpp"

namespace pwm {

enum class StreamKind { s1, s2, s3, csv };

struct StreamConfig {
  StreamKind kind = StreamKind::s1;
  std::size_t learners = 8;
  // s1
  std::size_t relevant = 8;
  double walk_std = 0.1;
  // s2
  double event_prob = 0.05;
  double noise_good = 0.5;
  double noise_bad = 1.0;
  bool noise_as_variance = true;
  double switch_prob = 0.01;
  EventLabelRule label_rule = EventLabelRule::any;
  // s3
  double mu = 1.0;
  // csv (paths relative to the config file)
  std::string csv_path;
  std::string schema_path;
};

struct EnvironmentConfig {
  DelayKind delay_kind = DelayKind::none;
  std::vector<TimeSlot> max_delay;  // one entry = same for every learner
  double label_probability = 1.0;
  std::vector<double> arrival_probability;  // one entry = same for every learner
  double epsilon = 0.05;
};

struct SweepConfig {
  std::string key;  // dotted key path, e.g. "stream.mu"
  std::vector<double> values;
};

struct ExperimentConfig {
  std::string name = "experiment";
  StreamConfig stream;
  std::size_t instances = 1000;  // 0 with csv = whole file
  std::size_t aggregated_learners = 0;
  std::vector<AggregatorSpec> aggregators;
  ClassifierSpec classifier;
  EnvironmentConfig environment;
  std::vector<std::uint64_t> seeds;
  std::optional<SweepConfig> sweep;
  int oracle_weight_cap = kDefaultOracleWeightCap;
  std::uint64_t oracle_budget = kDefaultOracleBudget;
  bool compute_oracle = true;
  std::string output_dir;  // empty: $PWMSIM_OUTPUT_DIR, then "pwmsim-out"
  bool export_traces = false;
  std::size_t threads = 0;  // 0 = hardware concurrency
  std::string base_dir = ".";
  std::string source;  // normalized JSON the config was parsed from
};

// Throws ConfigError carrying the offending key path (unknown keys included).
ExperimentConfig parse_experiment_config(const std::string& json_text,
                                         const std::string& base_dir = ".");
ExperimentConfig load_experiment_config(const std::string& path);

// One config per sweep point (the config itself when there is no sweep).
std::vector<ExperimentConfig> expand_sweep(const ExperimentConfig& config);

EnvironmentSpec environment_spec(const ExperimentConfig& config, std::size_t learners,
                                 std::uint64_t seed);
RunSpec run_spec(const ExperimentConfig& config);

// Builds the stream for `seed` and schedules `config.instances` events.
EventTrace build_trace(const ExperimentConfig& config, std::uint64_t seed);

// One line-delimited record per aggregator of a run.
std::vector<std::string> metrics_records(const RunMetrics& metrics, std::uint64_t seed,
                                         const std::string& sweep_key, double sweep_value);
// Full RunMetrics as a single JSON document.
std::string metrics_to_json(const RunMetrics& metrics);

struct FailedRun {
  std::uint64_t seed = 0;
  std::size_t point = 0;
  std::string message;
};

struct ExperimentOutcome {
  std::string output_dir;
  std::string records_path;
  std::string summary_path;
  std::size_t runs = 0;
  std::vector<FailedRun> failures;
};

// Runs every (seed, sweep point), writing records.jsonl and the summary CSV.
// Individual run failures are collected, not thrown.
ExperimentOutcome run_experiment(const ExperimentConfig& config,
                                 const std::optional<std::string>& output_dir = std::nullopt);

// Plays a saved trace through the config's aggregators and classifier.
RunMetrics replay_trace(const EventTrace& trace, const ExperimentConfig& config);

}  // namespace pwm
