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

#include "pwm/classifiers.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pwm {

namespace {

double linear_score(const OnlineLogisticRegression& model, std::span<const double> x) {
  if (x.size() != model.coefficients.size())
    throw std::invalid_argument("logistic model expects " +
                                std::to_string(model.coefficients.size()) + " features, got " +
                                std::to_string(x.size()));
  double z = model.use_intercept ? model.intercept : 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) z += model.coefficients[j] * x[j];
  return z;
}

}  // namespace

LocalPrediction lr_predict(const OnlineLogisticRegression& model, std::span<const double> x) {
  return sign(linear_score(model, x));
}

double lr_probability(const OnlineLogisticRegression& model, std::span<const double> x) {
  return 1.0 / (1.0 + std::exp(-linear_score(model, x)));
}

OnlineLogisticRegression lr_update(OnlineLogisticRegression model, std::span<const double> x,
                                   BinaryLabel y) {
  if (!(model.learning_rate >= 0.0))
    throw std::invalid_argument("learning rate must be non-negative");
  const double target = y == BinaryLabel::positive() ? 1.0 : 0.0;
  const double residual = target - lr_probability(model, x);
  const auto clip = [&](double g) {
    return std::clamp(g, -model.gradient_clip, model.gradient_clip);
  };
  if (model.use_intercept) model.intercept += model.learning_rate * clip(residual);
  for (std::size_t j = 0; j < x.size(); ++j)
    model.coefficients[j] += model.learning_rate * clip(residual * x[j]);
  return model;
}

LocalPrediction threshold_predict(const ThresholdClassifier& model, std::span<const double> x) {
  if (model.dimension_index >= x.size())
    throw std::invalid_argument("threshold classifier dimension index " +
                                std::to_string(model.dimension_index) + " out of range for " +
                                std::to_string(x.size()) + " features");
  return x[model.dimension_index] >= model.threshold ? BinaryLabel::positive()
                                                     : BinaryLabel::negative();
}

LogisticClassifier::LogisticClassifier(OnlineLogisticRegression model) : model_(std::move(model)) {
  if (!(model_.learning_rate >= 0.0)) throw std::invalid_argument("learning rate must be >= 0");
}

LocalPrediction LogisticClassifier::predict(std::span<const double> features) const {
  return lr_predict(model_, features);
}

void LogisticClassifier::learn(std::span<const double> features, BinaryLabel label) {
  model_ = lr_update(std::move(model_), features, label);
}

// Layout: [intercept, coefficients...].
std::vector<double> LogisticClassifier::snapshot() const {
  std::vector<double> out;
  out.reserve(model_.coefficients.size() + 1);
  out.push_back(model_.intercept);
  out.insert(out.end(), model_.coefficients.begin(), model_.coefficients.end());
  return out;
}

void LogisticClassifier::restore(std::span<const double> snapshot) {
  if (snapshot.size() != model_.coefficients.size() + 1)
    throw std::invalid_argument("logistic snapshot has wrong length");
  model_.intercept = snapshot[0];
  std::copy(snapshot.begin() + 1, snapshot.end(), model_.coefficients.begin());
}

std::unique_ptr<LocalClassifier> LogisticClassifier::clone() const {
  return std::make_unique<LogisticClassifier>(*this);
}

LocalPrediction ThresholdRule::predict(std::span<const double> features) const {
  return threshold_predict(model_, features);
}

std::vector<double> ThresholdRule::snapshot() const {
  return {model_.threshold, static_cast<double>(model_.dimension_index)};
}

void ThresholdRule::restore(std::span<const double> snapshot) {
  if (snapshot.size() != 2) throw std::invalid_argument("threshold snapshot has wrong length");
  model_.threshold = snapshot[0];
  model_.dimension_index = static_cast<std::size_t>(snapshot[1]);
}

std::unique_ptr<LocalClassifier> ThresholdRule::clone() const {
  return std::make_unique<ThresholdRule>(*this);
}

std::vector<std::unique_ptr<LocalClassifier>> make_classifiers(
    const ClassifierSpec& spec, std::span<const std::size_t> dimensions) {
  std::vector<std::unique_ptr<LocalClassifier>> out;
  out.reserve(dimensions.size());
  for (auto dim : dimensions) {
    switch (spec.kind) {
      case ClassifierKind::logistic: {
        auto m = OnlineLogisticRegression::zeros(dim, spec.learning_rate);
        m.gradient_clip = spec.gradient_clip;
        m.use_intercept = spec.use_intercept;
        out.push_back(std::make_unique<LogisticClassifier>(std::move(m)));
        break;
      }
      case ClassifierKind::threshold:
        if (spec.dimension_index >= dim)
          throw std::invalid_argument("threshold dimension index out of range");
        out.push_back(std::make_unique<ThresholdRule>(
            ThresholdClassifier{spec.threshold, spec.dimension_index}));
        break;
    }
  }
  return out;
}

std::string to_string(ClassifierKind kind) {
  return kind == ClassifierKind::logistic ? "logistic" : "threshold";
}

ClassifierKind classifier_kind_from_string(const std::string& name) {
  if (name == "logistic") return ClassifierKind::logistic;
  if (name == "threshold") return ClassifierKind::threshold;
  throw std::invalid_argument("unknown classifier kind '" + name + "'");
}

}  // namespace pwm
