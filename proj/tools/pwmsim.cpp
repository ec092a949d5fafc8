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

// pwmsim: experiment runner, bound calculator and trace replayer.
//
// Exit codes: 0 success, 1 runtime or I/O failure (including failed seeds),
// 2 invalid configuration or arguments, 3 a requested bound is not applicable.

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "pwm/pwm.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitConfig = 2;
constexpr int kExitNotApplicable = 3;

int exit_code(pwm_status s) {
  switch (s) {
    case PWM_OK: return kExitOk;
    case PWM_ERR_CONFIG:
    case PWM_ERR_INVALID_ARGUMENT: return kExitConfig;
    case PWM_ERR_NOT_APPLICABLE: return kExitNotApplicable;
    default: return kExitRuntime;
  }
}

int report(pwm_status s, const std::string& context) {
  std::cerr << "pwmsim: " << context << ": " << pwm_status_name(s) << ": " << pwm_last_error()
            << "\n";
  return exit_code(s);
}

struct Owned {
  char* p = nullptr;
  ~Owned() { pwm_string_free(p); }
};

struct ExperimentHandle {
  pwm_experiment* p = nullptr;
  ~ExperimentHandle() { pwm_experiment_destroy(p); }
};

int cmd_run(const std::string& config, const std::string& output) {
  ExperimentHandle exp;
  if (auto s = pwm_experiment_load(config.c_str(), &exp.p); s != PWM_OK) return report(s, config);
  Owned rep;
  const auto s = pwm_experiment_run(exp.p, output.empty() ? nullptr : output.c_str(), &rep.p);
  if (s != PWM_OK) return report(s, "run");
  const auto doc = nlohmann::json::parse(rep.p);
  std::cout << "runs completed: " << doc["runs"].get<std::size_t>() << "\n"
            << "records: " << doc["records"].get<std::string>() << "\n"
            << "summary: " << doc["summary"].get<std::string>() << "\n";
  const auto& failures = doc["failures"];
  if (!failures.empty()) {
    std::cerr << "pwmsim: " << failures.size() << " run(s) failed\n";
    for (const auto& f : failures)
      std::cerr << "  seed " << f["seed"].get<std::uint64_t>() << " point "
                << f["point"].get<std::size_t>() << ": " << f["message"].get<std::string>() << "\n";
    return kExitRuntime;
  }
  return kExitOk;
}

int cmd_replay(const std::string& trace, const std::string& config, const std::string& output) {
  ExperimentHandle exp;
  if (auto s = pwm_experiment_load(config.c_str(), &exp.p); s != PWM_OK) return report(s, config);
  Owned metrics;
  if (auto s = pwm_experiment_replay(exp.p, trace.c_str(), &metrics.p); s != PWM_OK)
    return report(s, trace);
  if (output.empty()) {
    std::cout << metrics.p << "\n";
  } else {
    std::ofstream out(output, std::ios::binary);
    out << metrics.p << "\n";
    if (!out) {
      std::cerr << "pwmsim: cannot write " << output << "\n";
      return kExitRuntime;
    }
  }
  return kExitOk;
}

struct BoundArgs {
  std::optional<std::size_t> learners, instances, v_star, observed_errors;
  std::optional<double> p_opt, p_star, mu, alpha, base;
  double epsilon = 0.05;
  std::vector<std::int64_t> max_delays;
};

void print_value(const char* name, double v) { std::printf("%s = %.10g\n", name, v); }

int cmd_bounds(const BoundArgs& a) {
  int code = kExitOk;
  std::optional<double> b1, b2;
  auto check = [&](pwm_status s, const char* name) {
    if (s == PWM_OK) return true;
    if (s == PWM_ERR_NOT_APPLICABLE) {
      std::printf("%s = not applicable (%s)\n", name, pwm_last_error());
      if (code == kExitOk) code = kExitNotApplicable;
    } else {
      std::fprintf(stderr, "pwmsim: %s: %s\n", name, pwm_last_error());
      code = exit_code(s);
    }
    return false;
  };
  const bool have_kn = a.learners && a.instances;
  if (have_kn && a.p_opt) {
    double v = 0;
    if (check(pwm_bound_b1(*a.learners, *a.instances, *a.p_opt, &v), "B1")) {
      print_value("B1", v);
      b1 = v;
    }
  }
  if (have_kn && a.p_star && a.v_star) {
    double v = 0;
    if (check(pwm_bound_b2(*a.learners, *a.instances, *a.p_star, *a.v_star, &v), "B2")) {
      print_value("B2", v);
      b2 = v;
    }
  }
  if (code == kExitConfig || code == kExitRuntime) return code;

  std::optional<double> base = a.base;
  if (b1 || b2) {
    const double b = std::min({b1.value_or(1.0), b2.value_or(1.0), 1.0});
    print_value("B", b);
    if (!base) base = b;
  }
  if (!base) {
    std::fprintf(stderr,
                 "pwmsim: bounds: give --learners and --instances with --p-opt and/or "
                 "--p-star/--v-star, or a --base value\n");
    return kExitConfig;
  }

  if (!a.max_delays.empty()) {
    if (!have_kn) {
      std::fprintf(stderr, "pwmsim: delayed bound needs --learners and --instances\n");
      return kExitConfig;
    }
    std::vector<std::int64_t> d = a.max_delays;
    if (d.size() == 1) d.assign(*a.learners, d.front());
    double v = 0;
    if (check(pwm_bound_delayed(*base, d.data(), d.size(), *a.instances, &v), "delayed"))
      print_value("delayed", v);
  }
  if (a.mu) {
    if (!a.observed_errors) {
      std::fprintf(stderr, "pwmsim: missing-label bound needs --observed-errors\n");
      return kExitConfig;
    }
    double lambda = 0;
    if (*a.observed_errors > 0 &&
        check(pwm_lambda_term(a.epsilon, static_cast<double>(*a.observed_errors), &lambda),
              "lambda"))
      print_value("lambda", lambda);
    double v = 0;
    if (check(pwm_bound_missing(*base, *a.mu, a.epsilon, *a.observed_errors, &v), "missing"))
      print_value("missing", v);
  }
  if (a.alpha) {
    double v = 0;
    if (check(pwm_bound_async(*base, *a.alpha, &v), "async")) print_value("async", v);
  }
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulator for weighted-majority aggregation of distributed stream classifiers"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(pwm_version()));

  std::string config, output, trace;
  auto* run = app.add_subcommand("run", "Run an experiment config (all seeds and sweep points)");
  run->add_option("config", config, "Experiment config (JSON)")->required();
  run->add_option("-o,--output", output,
                  "Output directory (default: config output.dir, then $PWMSIM_OUTPUT_DIR)");

  BoundArgs b;
  auto* bounds = app.add_subcommand("bounds", "Evaluate the mistake-probability bounds");
  bounds->add_option("-K,--learners", b.learners, "Number of learners K");
  bounds->add_option("-N,--instances", b.instances, "Number of instances N");
  bounds->add_option("--p-opt", b.p_opt, "Best static aggregation error P^O");
  bounds->add_option("--p-star", b.p_star, "Best classifier error P*");
  bounds->add_option("--v-star", b.v_star, "Number of classifiers attaining P*");
  bounds->add_option("--base", b.base, "Base bound for the extensions (default: B)");
  bounds->add_option("--max-delay", b.max_delays, "Max delay, one value or one per learner");
  bounds->add_option("--mu", b.mu, "Label observation probability");
  bounds->add_option("--epsilon", b.epsilon, "Confidence parameter")->capture_default_str();
  bounds->add_option("--observed-errors", b.observed_errors, "Observed error count N_e");
  bounds->add_option("--alpha", b.alpha, "Synchronization index");

  auto* replay = app.add_subcommand("replay", "Replay a saved event trace");
  replay->add_option("trace", trace, "Trace file (JSONL)")->required();
  replay->add_option("config", config, "Experiment config supplying aggregators")->required();
  replay->add_option("-o,--output", output, "Write metrics JSON here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  if (*run) return cmd_run(config, output);
  if (*bounds) return cmd_bounds(b);
  if (*replay) return cmd_replay(trace, config, output);
  return kExitConfig;
}
