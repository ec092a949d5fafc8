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

#include "pwm/streams.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "pwm/error.hpp"

namespace pwm {

// ---------------------------------------------------------------------------
// S1
// ---------------------------------------------------------------------------

RotatingHyperplaneSource::RotatingHyperplaneSource(const RotatingHyperplaneConfig& config)
    : config_(config),
      features_rng_(Rng::derived(config.seed, {0x51, 1})),
      walk_rng_(Rng::derived(config.seed, {0x51, 2})) {
  if (config_.learners == 0) throw std::invalid_argument("S1 needs at least one learner");
  if (config_.relevant == 0 || config_.relevant > config_.learners)
    throw std::invalid_argument("S1 relevant learner count must be in [1, K]");
  if (!(config_.walk_std >= 0.0)) throw std::invalid_argument("S1 walk std must be >= 0");
  theta_.resize(config_.relevant * kDimension);
  for (auto& t : theta_) t = walk_rng_.normal(0.0, 1.0);
}

void RotatingHyperplaneSource::set_theta(std::vector<double> theta) {
  if (theta.size() != theta_.size()) throw std::invalid_argument("S1 theta has wrong size");
  theta_ = std::move(theta);
}

StreamSample RotatingHyperplaneSource::next() {
  StreamSample out;
  out.features.assign(config_.learners, std::vector<double>(kDimension));
  for (auto& x : out.features)
    for (auto& v : x) v = features_rng_.uniform(-1.0, 1.0);
  double score = 0.0;
  for (std::size_t i = 0; i < config_.relevant; ++i)
    for (std::size_t l = 0; l < kDimension; ++l)
      score += theta_[i * kDimension + l] * out.features[i][l];
  out.label = sign(score);
  if (config_.walk_std > 0.0)
    for (auto& t : theta_) t += walk_rng_.normal(0.0, config_.walk_std);
  return out;
}

// ---------------------------------------------------------------------------
// S2
// ---------------------------------------------------------------------------

EventDetectionSource::EventDetectionSource(const EventDetectionConfig& config)
    : config_(config), rng_(Rng::derived(config.seed, {0x52})) {
  if (config_.learners == 0) throw std::invalid_argument("S2 needs at least one learner");
  if (!(config_.event_prob >= 0.0 && config_.event_prob <= 1.0))
    throw std::invalid_argument("S2 event probability must be in [0,1]");
  if (!(config_.switch_prob >= 0.0 && config_.switch_prob <= 1.0))
    throw std::invalid_argument("S2 switch probability must be in [0,1]");
  if (!(config_.noise_good >= 0.0 && config_.noise_bad >= 0.0))
    throw std::invalid_argument("S2 noise levels must be >= 0");
  std_good_ = config_.noise_as_variance ? std::sqrt(config_.noise_good) : config_.noise_good;
  std_bad_ = config_.noise_as_variance ? std::sqrt(config_.noise_bad) : config_.noise_bad;
  // Start from the chain's stationary distribution (uniform).
  bad_.resize(config_.learners);
  for (std::size_t i = 0; i < bad_.size(); ++i) bad_[i] = rng_.bernoulli(0.5);
  events_.assign(config_.learners, -1);
}

StreamSample EventDetectionSource::next() {
  StreamSample out;
  out.features.resize(config_.learners);
  out.concept_id = concept_;
  std::size_t fired = 0;
  for (std::size_t i = 0; i < config_.learners; ++i) {
    events_[i] = rng_.bernoulli(config_.event_prob) ? 1 : -1;
    if (events_[i] == 1) ++fired;
    const double noise = rng_.normal(0.0, bad_[i] ? std_bad_ : std_good_);
    out.features[i] = {static_cast<double>(events_[i]) + noise};
  }
  switch (config_.label_rule) {
    case EventLabelRule::any:
      out.label = fired > 0 ? BinaryLabel::positive() : BinaryLabel::negative();
      break;
    case EventLabelRule::all:
      out.label = fired == config_.learners ? BinaryLabel::positive() : BinaryLabel::negative();
      break;
  }
  bool drift = false;
  for (std::size_t i = 0; i < config_.learners; ++i) {
    if (rng_.bernoulli(config_.switch_prob)) {
      bad_[i] = !bad_[i];
      drift = true;
    }
  }
  if (drift) ++concept_;
  return out;
}

// ---------------------------------------------------------------------------
// S3
// ---------------------------------------------------------------------------

GaussianSource::GaussianSource(const GaussianConfig& config)
    : config_(config), rng_(Rng::derived(config.seed, {0x53})) {
  if (config_.learners == 0) throw std::invalid_argument("S3 needs at least one learner");
  if (!(config_.mu >= 0.0)) throw std::invalid_argument("S3 mu must be >= 0");
}

StreamSample GaussianSource::next() {
  StreamSample out;
  out.label = rng_.bernoulli(0.5) ? BinaryLabel::positive() : BinaryLabel::negative();
  const double mean = out.label.value() * config_.mu;
  out.features.resize(config_.learners);
  for (auto& x : out.features) x = {rng_.normal(mean, 1.0)};
  return out;
}

// ---------------------------------------------------------------------------
// CSV
// ---------------------------------------------------------------------------

std::size_t CsvSchema::learners() const {
  std::size_t k = 0;
  for (const auto& c : columns) k = std::max(k, c.learner + 1);
  return k;
}

std::vector<std::size_t> CsvSchema::dimensions() const {
  std::vector<std::size_t> dims(learners(), 0);
  for (const auto& c : columns) dims[c.learner] = std::max(dims[c.learner], c.feature + 1);
  return dims;
}

CsvSchema parse_csv_schema(const std::string& json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("csv schema: ") + e.what(), e.byte);
  }
  CsvSchema schema;
  try {
    schema.label_column = j.at("label").get<std::string>();
    const auto mapping = j.value("label_mapping", std::string("zero_one"));
    if (mapping == "zero_one")
      schema.mapping = LabelMapping::zero_one;
    else if (mapping == "plus_minus")
      schema.mapping = LabelMapping::plus_minus;
    else
      throw SchemaError("csv schema: unknown label_mapping '" + mapping + "'");
    for (const auto& c : j.at("columns"))
      schema.columns.push_back(CsvColumn{c.at("name").get<std::string>(),
                                         c.at("learner").get<std::size_t>(),
                                         c.value("feature", std::size_t{0})});
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("csv schema: ") + e.what());
  }
  if (schema.columns.empty()) throw SchemaError("csv schema maps no feature columns");
  // Every learner needs a contiguous 0..d-1 feature range.
  std::map<std::pair<std::size_t, std::size_t>, int> seen;
  for (const auto& c : schema.columns)
    if (++seen[{c.learner, c.feature}] > 1)
      throw SchemaError("csv schema maps two columns to learner " + std::to_string(c.learner) +
                        " feature " + std::to_string(c.feature));
  const auto dims = schema.dimensions();
  std::size_t expected = 0;
  for (auto d : dims) expected += d;
  if (expected != schema.columns.size() ||
      std::any_of(dims.begin(), dims.end(), [](std::size_t d) { return d == 0; }))
    throw SchemaError("csv schema must cover features 0..d-1 of every learner 0..K-1");
  return schema;
}

CsvSchema load_csv_schema(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open csv schema '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_csv_schema(buf.str());
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_row(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

std::vector<StreamSample> csv_ingest(const std::string& path, const CsvSchema& schema) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open csv file '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw ParseError("csv file is empty", 1);
  const auto header = split_row(line);
  const auto column_index = [&](const std::string& name) {
    for (std::size_t c = 0; c < header.size(); ++c)
      if (header[c] == name) return c;
    throw SchemaError("csv header has no column '" + name + "'");
  };
  const auto label_col = column_index(schema.label_column);
  std::vector<std::size_t> feature_cols;
  for (const auto& c : schema.columns) feature_cols.push_back(column_index(c.name));
  const auto dims = schema.dimensions();

  std::vector<StreamSample> out;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split_row(line);
    if (cells.size() != header.size())
      throw ParseError("csv line " + std::to_string(line_no) + ": expected " +
                           std::to_string(header.size()) + " fields, got " +
                           std::to_string(cells.size()),
                       line_no);
    const auto parse_number = [&](const std::string& cell) {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(cell, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used == 0 || used != cell.size())
        throw ParseError("csv line " + std::to_string(line_no) + ": '" + cell + "' is not a number",
                         line_no);
      return v;
    };
    StreamSample sample;
    sample.features.resize(dims.size());
    for (std::size_t i = 0; i < dims.size(); ++i) sample.features[i].assign(dims[i], 0.0);
    for (std::size_t c = 0; c < schema.columns.size(); ++c)
      sample.features[schema.columns[c].learner][schema.columns[c].feature] =
          parse_number(cells[feature_cols[c]]);
    const double raw = parse_number(cells[label_col]);
    if (schema.mapping == LabelMapping::zero_one && (raw == 0.0 || raw == 1.0))
      sample.label = raw == 1.0 ? BinaryLabel::positive() : BinaryLabel::negative();
    else if (schema.mapping == LabelMapping::plus_minus && (raw == -1.0 || raw == 1.0))
      sample.label = raw == 1.0 ? BinaryLabel::positive() : BinaryLabel::negative();
    else
      throw SchemaError("csv line " + std::to_string(line_no) + ": label value '" +
                        cells[label_col] + "' is not covered by the label mapping");
    out.push_back(std::move(sample));
  }
  return out;
}

ReplayStream::ReplayStream(std::vector<StreamSample> samples, std::vector<std::size_t> dimensions)
    : samples_(std::move(samples)), dimensions_(std::move(dimensions)) {}

StreamSample ReplayStream::next() {
  if (cursor_ >= samples_.size()) throw std::out_of_range("replay stream exhausted");
  return samples_[cursor_++];
}

}  // namespace pwm
