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

// Local classifiers producing each learner's s_i. Aggregators never see
// these types; they only receive the resulting PredictionVector.

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "pwm/core.hpp"

namespace pwm {

class LocalClassifier {
 public:
  virtual ~LocalClassifier() = default;
  virtual LocalPrediction predict(std::span<const double> features) const = 0;
  virtual void learn(std::span<const double> features, BinaryLabel label) = 0;
  // Flat list of reals for warm starts; restore() accepts the same layout.
  virtual std::vector<double> snapshot() const = 0;
  virtual void restore(std::span<const double> snapshot) = 0;
  virtual std::unique_ptr<LocalClassifier> clone() const = 0;
};

struct OnlineLogisticRegression {
  std::vector<double> coefficients;
  double intercept = 0.0;
  double learning_rate = 0.1;
  // Per-coordinate bound on the gradient of one step.
  double gradient_clip = 10.0;
  bool use_intercept = true;

  static OnlineLogisticRegression zeros(std::size_t dimension, double learning_rate = 0.1) {
    OnlineLogisticRegression m;
    m.coefficients.assign(dimension, 0.0);
    m.learning_rate = learning_rate;
    return m;
  }
};

// +1 iff intercept + coefficients.x >= 0.
LocalPrediction lr_predict(const OnlineLogisticRegression& model, std::span<const double> x);
// One SGD step on the logistic loss, labels mapped -1 -> 0, +1 -> 1.
OnlineLogisticRegression lr_update(OnlineLogisticRegression model, std::span<const double> x,
                                   BinaryLabel y);
double lr_probability(const OnlineLogisticRegression& model, std::span<const double> x);

struct ThresholdClassifier {
  double threshold = 0.0;
  std::size_t dimension_index = 0;
};

// +1 iff x[dimension_index] >= threshold.
LocalPrediction threshold_predict(const ThresholdClassifier& model, std::span<const double> x);

class LogisticClassifier final : public LocalClassifier {
 public:
  explicit LogisticClassifier(OnlineLogisticRegression model);
  LocalPrediction predict(std::span<const double> features) const override;
  void learn(std::span<const double> features, BinaryLabel label) override;
  std::vector<double> snapshot() const override;
  void restore(std::span<const double> snapshot) override;
  std::unique_ptr<LocalClassifier> clone() const override;
  const OnlineLogisticRegression& model() const noexcept { return model_; }

 private:
  OnlineLogisticRegression model_;
};

class ThresholdRule final : public LocalClassifier {
 public:
  explicit ThresholdRule(ThresholdClassifier model) : model_(model) {}
  LocalPrediction predict(std::span<const double> features) const override;
  void learn(std::span<const double>, BinaryLabel) override {}
  std::vector<double> snapshot() const override;
  void restore(std::span<const double> snapshot) override;
  std::unique_ptr<LocalClassifier> clone() const override;
  const ThresholdClassifier& model() const noexcept { return model_; }

 private:
  ThresholdClassifier model_;
};

enum class ClassifierKind { logistic, threshold };

struct ClassifierSpec {
  ClassifierKind kind = ClassifierKind::logistic;
  double learning_rate = 0.1;
  double gradient_clip = 10.0;
  bool use_intercept = true;
  double threshold = 0.0;
  std::size_t dimension_index = 0;
};

// One fresh classifier per learner; dimensions[i] is learner i's feature count.
std::vector<std::unique_ptr<LocalClassifier>> make_classifiers(
    const ClassifierSpec& spec, std::span<const std::size_t> dimensions);

std::string to_string(ClassifierKind kind);
ClassifierKind classifier_kind_from_string(const std::string& name);

}  // namespace pwm
