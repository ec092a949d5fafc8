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

#include "pwm/oracle.hpp"

#include <limits>
#include <map>
#include <stdexcept>
#include <string>

#include "pwm/error.hpp"

namespace pwm {

namespace {

struct Pattern {
  std::vector<std::int8_t> entries;
  std::size_t positives = 0;
  std::size_t negatives = 0;
};

class Enumerator {
 public:
  Enumerator(std::vector<Pattern> patterns, std::size_t dims, int cap)
      : patterns_(std::move(patterns)), dims_(dims), cap_(cap), current_(dims, 0),
        partial_(dims + 1, std::vector<std::int64_t>(patterns_.size(), 0)) {}

  void run() { descend(0); }

  std::vector<std::int64_t> best;
  std::size_t best_mistakes = std::numeric_limits<std::size_t>::max();

 private:
  // Returns true once a zero-mistake vector is found: enumeration order is
  // lexicographic, so nothing later can beat it.
  bool descend(std::size_t depth) {
    if (depth == dims_) return evaluate();
    const auto& prev = partial_[depth];
    auto& next = partial_[depth + 1];
    for (int w = -cap_; w <= cap_; ++w) {
      current_[depth] = w;
      for (std::size_t p = 0; p < patterns_.size(); ++p)
        next[p] = prev[p] + static_cast<std::int64_t>(w) * patterns_[p].entries[depth];
      if (descend(depth + 1)) return true;
    }
    return false;
  }

  bool evaluate() {
    const auto& dots = partial_[dims_];
    std::size_t mistakes = 0;
    for (std::size_t p = 0; p < patterns_.size(); ++p) {
      mistakes += dots[p] >= 0 ? patterns_[p].negatives : patterns_[p].positives;
      if (mistakes >= best_mistakes) return false;
    }
    best_mistakes = mistakes;
    best = current_;
    return mistakes == 0;
  }

  std::vector<Pattern> patterns_;
  std::size_t dims_;
  int cap_;
  std::vector<std::int64_t> current_;
  std::vector<std::vector<std::int64_t>> partial_;
};

}  // namespace

StaticOracleResult optimal_static_oracle(std::span<const TraceStep> trace, int weight_cap,
                                         std::uint64_t budget) {
  if (trace.empty()) throw std::invalid_argument("oracle needs a non-empty trace");
  if (weight_cap < 1) throw std::invalid_argument("weight cap must be >= 1");
  const auto dims = trace.front().predictions.size();
  if (dims < 2) throw std::invalid_argument("oracle needs at least one learner");

  std::map<std::vector<std::int8_t>, Pattern> by_pattern;
  for (const auto& step : trace) {
    if (step.predictions.size() != dims)
      throw std::invalid_argument("trace has inconsistent learner counts");
    if (step.predictions.has_abstention())
      throw ContractViolation("oracle trace must not contain abstentions");
    const auto e = step.predictions.entries();
    auto& pat = by_pattern[std::vector<std::int8_t>(e.begin(), e.end())];
    if (pat.entries.empty()) pat.entries.assign(e.begin(), e.end());
    (step.label == BinaryLabel::positive() ? pat.positives : pat.negatives) += 1;
  }

  const double per_coord = 2.0 * weight_cap + 1.0;
  double cost = static_cast<double>(by_pattern.size());
  for (std::size_t d = 0; d < dims; ++d) cost *= per_coord;
  if (cost > static_cast<double>(budget))
    throw BudgetExceededError("static oracle needs ~" + std::to_string(cost) +
                              " evaluations for K=" + std::to_string(dims - 1) +
                              ", cap=" + std::to_string(weight_cap) +
                              "; lower weight_cap or raise the budget");

  std::vector<Pattern> patterns;
  patterns.reserve(by_pattern.size());
  for (auto& [key, pat] : by_pattern) patterns.push_back(std::move(pat));

  Enumerator search(std::move(patterns), dims, weight_cap);
  search.run();

  StaticOracleResult result;
  result.optimal_weights = WeightVector(std::move(search.best));
  result.mistakes = search.best_mistakes;
  result.exact = dims - 1 <= 4 && weight_cap >= 5;
  return result;
}

std::size_t count_static_mistakes(const WeightVector& w, std::span<const TraceStep> trace) {
  std::size_t mistakes = 0;
  for (const auto& step : trace)
    if (sign(inner_product(w, step.predictions)) != step.label) ++mistakes;
  return mistakes;
}

}  // namespace pwm
