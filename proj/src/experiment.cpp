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

#include "pwm/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "pwm/error.hpp"
#include "pwm/rng.hpp"
#include "pwm/trace_io.hpp"

namespace pwm {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

// Object view that remembers which keys were read so leftovers can be
// reported as unknown.
class Node {
 public:
  Node(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_, "expected an object");
  }

  bool has(const std::string& key) const { return j_.contains(key); }
  std::string path(const std::string& key) const { return join(path_, key); }

  const json& raw(const std::string& key) {
    used_.insert(key);
    return j_.at(key);
  }

  double real(const std::string& key, double def) {
    if (!has(key)) return def;
    const auto& v = raw(key);
    if (!v.is_number()) throw ConfigError(path(key), "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw ConfigError(path(key), "must be finite");
    return x;
  }

  std::int64_t integer(const std::string& key, std::int64_t def) {
    if (!has(key)) return def;
    return as_integer(raw(key), path(key));
  }

  std::size_t count(const std::string& key, std::size_t def) {
    const auto v = integer(key, static_cast<std::int64_t>(def));
    if (v < 0) throw ConfigError(path(key), "must be >= 0");
    return static_cast<std::size_t>(v);
  }

  bool boolean(const std::string& key, bool def) {
    if (!has(key)) return def;
    const auto& v = raw(key);
    if (!v.is_boolean()) throw ConfigError(path(key), "expected true or false");
    return v.get<bool>();
  }

  std::string string(const std::string& key, const std::string& def) {
    if (!has(key)) return def;
    const auto& v = raw(key);
    if (!v.is_string()) throw ConfigError(path(key), "expected a string");
    return v.get<std::string>();
  }

  Node child(const std::string& key) { return Node(raw(key), path(key)); }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!used_.count(it.key())) throw ConfigError(path(it.key()), "unknown key");
  }

  static std::int64_t as_integer(const json& v, const std::string& where) {
    if (v.is_number_integer()) return v.get<std::int64_t>();
    if (v.is_number_float()) {
      const double x = v.get<double>();
      if (std::isfinite(x) && x == std::floor(x) && std::abs(x) < 9.0e15)
        return static_cast<std::int64_t>(x);
    }
    throw ConfigError(where, "expected an integer");
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> used_;
};

void check_probability(double p, const std::string& where, bool allow_zero) {
  if (!(p <= 1.0 && (allow_zero ? p >= 0.0 : p > 0.0)))
    throw ConfigError(where, allow_zero ? "must be in [0, 1]" : "must be in (0, 1]");
}

StreamConfig parse_stream(Node n) {
  StreamConfig s;
  const auto kind = n.string("kind", "s1");
  if (kind == "s1") s.kind = StreamKind::s1;
  else if (kind == "s2") s.kind = StreamKind::s2;
  else if (kind == "s3") s.kind = StreamKind::s3;
  else if (kind == "csv") s.kind = StreamKind::csv;
  else throw ConfigError(n.path("kind"), "unknown stream kind '" + kind + "' (s1, s2, s3, csv)");

  switch (s.kind) {
    case StreamKind::s1:
      s.learners = n.count("learners", 16);
      s.relevant = n.count("relevant", 8);
      s.walk_std = n.real("walk_std", 0.1);
      if (s.relevant < 1 || s.relevant > s.learners)
        throw ConfigError(n.path("relevant"), "must be in [1, learners]");
      if (s.walk_std < 0) throw ConfigError(n.path("walk_std"), "must be >= 0");
      break;
    case StreamKind::s2: {
      s.learners = n.count("learners", 8);
      s.event_prob = n.real("event_prob", 0.05);
      s.noise_good = n.real("noise_good", 0.5);
      s.noise_bad = n.real("noise_bad", 1.0);
      s.noise_as_variance = n.boolean("noise_is_variance", true);
      s.switch_prob = n.real("switch_prob", 0.01);
      const auto rule = n.string("label_rule", "any");
      if (rule == "any") s.label_rule = EventLabelRule::any;
      else if (rule == "all") s.label_rule = EventLabelRule::all;
      else throw ConfigError(n.path("label_rule"), "expected 'any' or 'all'");
      check_probability(s.event_prob, n.path("event_prob"), true);
      check_probability(s.switch_prob, n.path("switch_prob"), true);
      if (s.noise_good < 0) throw ConfigError(n.path("noise_good"), "must be >= 0");
      if (s.noise_bad < 0) throw ConfigError(n.path("noise_bad"), "must be >= 0");
      break;
    }
    case StreamKind::s3:
      s.learners = n.count("learners", 8);
      s.mu = n.real("mu", 1.0);
      break;
    case StreamKind::csv:
      s.csv_path = n.string("path", "");
      s.schema_path = n.string("schema", "");
      if (s.csv_path.empty()) throw ConfigError(n.path("path"), "required for csv streams");
      if (s.schema_path.empty()) throw ConfigError(n.path("schema"), "required for csv streams");
      s.learners = 0;  // taken from the schema
      break;
  }
  if (s.kind != StreamKind::csv && s.learners < 1)
    throw ConfigError(n.path("learners"), "must be >= 1");
  n.finish();
  return s;
}

template <class T, class F>
std::vector<T> scalar_or_list(Node& n, const std::string& key, F convert) {
  std::vector<T> out;
  if (!n.has(key)) return out;
  const auto& v = n.raw(key);
  if (v.is_array()) {
    if (v.empty()) throw ConfigError(n.path(key), "list must not be empty");
    for (std::size_t i = 0; i < v.size(); ++i)
      out.push_back(convert(v[i], n.path(key) + "[" + std::to_string(i) + "]"));
  } else {
    out.push_back(convert(v, n.path(key)));
  }
  return out;
}

EnvironmentConfig parse_environment(Node n) {
  EnvironmentConfig e;
  if (n.has("delay")) {
    Node d = n.child("delay");
    const auto kind = d.string("kind", "uniform");
    if (kind == "none") e.delay_kind = DelayKind::none;
    else if (kind == "uniform") e.delay_kind = DelayKind::uniform;
    else if (kind == "fixed") e.delay_kind = DelayKind::fixed;
    else throw ConfigError(d.path("kind"), "expected none, uniform or fixed");
    e.max_delay = scalar_or_list<TimeSlot>(d, "max", [](const json& v, const std::string& w) {
      const auto x = Node::as_integer(v, w);
      if (x < 0) throw ConfigError(w, "must be >= 0");
      return static_cast<TimeSlot>(x);
    });
    if (e.delay_kind != DelayKind::none && e.max_delay.empty())
      throw ConfigError(d.path("max"), "required unless kind is none");
    d.finish();
  }
  e.label_probability = n.real("label_probability", 1.0);
  check_probability(e.label_probability, n.path("label_probability"), false);
  e.arrival_probability =
      scalar_or_list<double>(n, "arrival_probability", [](const json& v, const std::string& w) {
        if (!v.is_number()) throw ConfigError(w, "expected a number");
        const double p = v.get<double>();
        check_probability(p, w, false);
        return p;
      });
  e.epsilon = n.real("epsilon", 0.05);
  if (!(e.epsilon > 0.0 && e.epsilon < 1.0)) throw ConfigError(n.path("epsilon"), "must be in (0, 1)");
  n.finish();
  return e;
}

ClassifierSpec parse_classifier(Node n) {
  ClassifierSpec c;
  const auto kind = n.string("kind", "logistic");
  try {
    c.kind = classifier_kind_from_string(kind);
  } catch (const std::invalid_argument&) {
    throw ConfigError(n.path("kind"), "unknown classifier '" + kind + "' (logistic, threshold)");
  }
  c.learning_rate = n.real("learning_rate", c.learning_rate);
  c.gradient_clip = n.real("gradient_clip", c.gradient_clip);
  c.use_intercept = n.boolean("intercept", c.use_intercept);
  c.threshold = n.real("threshold", c.threshold);
  c.dimension_index = n.count("dimension", c.dimension_index);
  if (!(c.learning_rate > 0)) throw ConfigError(n.path("learning_rate"), "must be > 0");
  if (!(c.gradient_clip > 0)) throw ConfigError(n.path("gradient_clip"), "must be > 0");
  n.finish();
  return c;
}

std::vector<std::uint64_t> parse_seeds(Node& root) {
  if (!root.has("seeds")) return {1};
  const auto& v = root.raw("seeds");
  std::vector<std::uint64_t> seeds;
  if (v.is_array()) {
    for (std::size_t i = 0; i < v.size(); ++i) {
      const auto where = "seeds[" + std::to_string(i) + "]";
      const auto s = Node::as_integer(v[i], where);
      if (s < 0) throw ConfigError(where, "must be >= 0");
      seeds.push_back(static_cast<std::uint64_t>(s));
    }
  } else if (v.is_object()) {
    Node n(v, "seeds");
    const auto base = n.integer("base", 1);
    const auto count = n.count("count", 0);
    if (base < 0) throw ConfigError("seeds.base", "must be >= 0");
    n.finish();
    for (std::size_t i = 0; i < count; ++i) seeds.push_back(static_cast<std::uint64_t>(base) + i);
  } else {
    throw ConfigError("seeds", "expected a list or {\"base\": b, \"count\": n}");
  }
  if (seeds.empty()) throw ConfigError("seeds", "no seeds given");
  return seeds;
}

json* locate(json& root, const std::string& key_path, bool create) {
  json* cur = &root;
  std::stringstream ss(key_path);
  std::string part;
  while (std::getline(ss, part, '.')) {
    if (part.empty() || !cur->is_object()) return nullptr;
    if (!cur->contains(part)) {
      if (!create) return nullptr;
      (*cur)[part] = json::object();
    }
    cur = &(*cur)[part];
  }
  return cur;
}

json sweep_value_json(double v) {
  if (v == std::floor(v) && std::abs(v) < 9.0e15) return json(static_cast<std::int64_t>(v));
  return json(v);
}

ExperimentConfig parse_document(const json& doc, const std::string& base_dir) {
  Node root(doc, "");
  ExperimentConfig c;
  c.base_dir = base_dir;
  c.source = doc.dump();
  const auto version = root.integer("version", 1);
  if (version != 1)
    throw ConfigError("version", "config version " + std::to_string(version) + " is not supported");
  c.name = root.string("name", c.name);
  if (root.has("stream")) c.stream = parse_stream(root.child("stream"));
  else c.stream.learners = 16;  // s1 defaults
  c.instances = root.count("instances", c.instances);
  if (c.instances < 1 && c.stream.kind != StreamKind::csv)
    throw ConfigError("instances", "must be >= 1");
  c.aggregated_learners = root.count("aggregated_learners", 0);
  if (c.stream.kind != StreamKind::csv && c.aggregated_learners > c.stream.learners)
    throw ConfigError("aggregated_learners", "exceeds stream.learners");

  bool no_bias = false;
  if (root.has("pwm")) {
    Node p = root.child("pwm");
    no_bias = p.boolean("no_bias", false);
    p.finish();
  }
  MultiplicativeParams mult;
  if (root.has("multiplicative")) {
    Node m = root.child("multiplicative");
    mult.beta = m.real("beta", mult.beta);
    mult.gamma = m.real("gamma", mult.gamma);
    mult.share_alpha = m.real("alpha", mult.share_alpha);
    if (!(mult.beta > 0 && mult.beta < 1)) throw ConfigError("multiplicative.beta", "must be in (0, 1)");
    if (!(mult.gamma >= 1)) throw ConfigError("multiplicative.gamma", "must be >= 1");
    if (!(mult.share_alpha >= 0 && mult.share_alpha <= 1))
      throw ConfigError("multiplicative.alpha", "must be in [0, 1]");
    m.finish();
  }
  std::vector<std::string> names = {"pwm"};
  if (root.has("aggregators")) {
    const auto& v = root.raw("aggregators");
    if (!v.is_array()) throw ConfigError("aggregators", "expected a list of names");
    names.clear();
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_string())
        throw ConfigError("aggregators[" + std::to_string(i) + "]", "expected a name");
      names.push_back(v[i].get<std::string>());
    }
    if (names.empty()) throw ConfigError("aggregators", "no aggregator given");
  }
  std::set<std::string> seen;
  for (std::size_t i = 0; i < names.size(); ++i) {
    const auto where = "aggregators[" + std::to_string(i) + "]";
    if (!seen.insert(names[i]).second) throw ConfigError(where, "duplicate aggregator");
    AggregatorSpec spec;
    try {
      spec.kind = aggregator_kind_from_string(names[i]);
    } catch (const std::invalid_argument&) {
      throw ConfigError(where, "unknown aggregator '" + names[i] +
                                   "' (pwm, epwm, wm, blum, trackexp, am, alone)");
    }
    spec.freeze_bias = no_bias;
    spec.multiplicative = mult;
    c.aggregators.push_back(spec);
  }

  if (root.has("classifier")) c.classifier = parse_classifier(root.child("classifier"));
  if (root.has("environment")) c.environment = parse_environment(root.child("environment"));
  const auto k = c.stream.learners;
  if (k > 0) {
    if (c.environment.max_delay.size() > 1 && c.environment.max_delay.size() != k)
      throw ConfigError("environment.delay.max", "give one value or one per learner");
    if (c.environment.arrival_probability.size() > 1 && c.environment.arrival_probability.size() != k)
      throw ConfigError("environment.arrival_probability", "give one value or one per learner");
  }
  c.seeds = parse_seeds(root);

  if (root.has("oracle")) {
    Node o = root.child("oracle");
    const auto cap = o.integer("weight_cap", c.oracle_weight_cap);
    if (cap < 0 || cap > 1000) throw ConfigError("oracle.weight_cap", "must be in [0, 1000]");
    c.oracle_weight_cap = static_cast<int>(cap);
    const double budget = o.real("budget", static_cast<double>(c.oracle_budget));
    if (!(budget >= 1)) throw ConfigError("oracle.budget", "must be >= 1");
    c.oracle_budget = static_cast<std::uint64_t>(std::min(budget, 1.8e19));
    c.compute_oracle = o.boolean("enabled", true);
    o.finish();
  }
  if (root.has("output")) {
    Node o = root.child("output");
    c.output_dir = o.string("dir", "");
    c.export_traces = o.boolean("export_traces", false);
    o.finish();
  }
  c.threads = root.count("threads", 0);

  if (root.has("sweep")) {
    Node s = root.child("sweep");
    SweepConfig sweep;
    sweep.key = s.string("key", "");
    if (sweep.key.empty()) throw ConfigError("sweep.key", "required");
    if (!s.has("values")) throw ConfigError("sweep.values", "required");
    const auto& vals = s.raw("values");
    if (!vals.is_array() || vals.empty()) throw ConfigError("sweep.values", "expected a non-empty list");
    for (std::size_t i = 0; i < vals.size(); ++i) {
      if (!vals[i].is_number())
        throw ConfigError("sweep.values[" + std::to_string(i) + "]", "expected a number");
      sweep.values.push_back(vals[i].get<double>());
    }
    s.finish();
    if (sweep.key.rfind("sweep", 0) == 0 || sweep.key == "seeds" || sweep.key.rfind("seeds.", 0) == 0)
      throw ConfigError("sweep.key", "cannot sweep '" + sweep.key + "'");
    // The key must resolve to a scalar-valued setting; check by parsing the
    // first point.
    json probe = doc;
    probe.erase("sweep");
    json* slot = locate(probe, sweep.key, true);
    if (slot == nullptr || (!slot->is_null() && !slot->is_number() && !slot->empty()))
      throw ConfigError("sweep.key", "'" + sweep.key + "' is not a numeric setting");
    *slot = sweep_value_json(sweep.values.front());
    try {
      parse_document(probe, base_dir);
    } catch (const ConfigError& e) {
      throw ConfigError("sweep", std::string("at ") + sweep.key + "=" +
                                     std::to_string(sweep.values.front()) + ": " + e.what());
    }
    c.sweep = std::move(sweep);
  }
  root.finish();
  return c;
}

std::unique_ptr<Stream> make_stream(const ExperimentConfig& config, std::uint64_t seed,
                                    std::size_t& instances) {
  const auto& s = config.stream;
  instances = config.instances;
  switch (s.kind) {
    case StreamKind::s1:
      return std::make_unique<RotatingHyperplaneSource>(
          RotatingHyperplaneConfig{s.learners, s.relevant, s.walk_std, seed});
    case StreamKind::s2: {
      EventDetectionConfig c;
      c.learners = s.learners;
      c.event_prob = s.event_prob;
      c.noise_good = s.noise_good;
      c.noise_bad = s.noise_bad;
      c.noise_as_variance = s.noise_as_variance;
      c.switch_prob = s.switch_prob;
      c.label_rule = s.label_rule;
      c.seed = seed;
      return std::make_unique<EventDetectionSource>(c);
    }
    case StreamKind::s3:
      return std::make_unique<GaussianSource>(GaussianConfig{s.learners, s.mu, seed});
    case StreamKind::csv: {
      const auto resolve = [&](const std::string& p) {
        const fs::path path(p);
        return (path.is_absolute() ? path : fs::path(config.base_dir) / path).string();
      };
      const auto schema = load_csv_schema(resolve(s.schema_path));
      auto rows = csv_ingest(resolve(s.csv_path), schema);
      if (rows.empty()) throw ConfigError("stream.path", "csv file has no rows");
      if (instances == 0) instances = rows.size();
      if (instances > rows.size())
        throw ConfigError("instances", "csv file has only " + std::to_string(rows.size()) + " rows");
      return std::make_unique<ReplayStream>(std::move(rows), schema.dimensions());
    }
  }
  throw std::logic_error("unhandled stream kind");
}

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json concepts_json(const std::map<ConceptId, ConceptTally>& per_concept) {
  json out = json::object();
  for (const auto& [id, t] : per_concept) out[std::to_string(id)] = {t.slots, t.mistakes};
  return out;
}

json bound_missing_json(const std::vector<std::optional<double>>& v) {
  json out = json::array();
  for (const auto& b : v) out.push_back(optional_json(b));
  return out;
}

json bounds_json(const BoundSet& b) {
  return {{"b1", b.b1},
          {"b2", b.b2},
          {"b", b.b},
          {"delayed", optional_json(b.delayed)},
          {"async", optional_json(b.async)},
          {"environment", b.environment}};
}

json oracle_json(const OracleStats& o) {
  return {{"available", o.available},
          {"exact", o.exact},
          {"p_opt", o.p_opt},
          {"weights", o.available ? json(o.weights.values()) : json::array()},
          {"note", o.note}};
}

struct Summary {
  std::size_t runs = 0;
  double sum = 0, sum_sq = 0;
  double b = 0, b1 = 0, b2 = 0, env = 0, p_opt = 0, p_star = 0, alpha = 0;
};

struct TaskResult {
  bool ok = false;
  std::string error;
  std::vector<std::string> records;
  RunMetrics metrics;
};

std::string csv_number(double v) {
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

}  // namespace

ExperimentConfig parse_experiment_config(const std::string& json_text, const std::string& base_dir) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError("", std::string("invalid JSON: ") + e.what());
  }
  return parse_document(doc, base_dir);
}

ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  auto dir = fs::path(path).parent_path().string();
  return parse_experiment_config(ss.str(), dir.empty() ? "." : dir);
}

std::vector<ExperimentConfig> expand_sweep(const ExperimentConfig& config) {
  if (!config.sweep) return {config};
  std::vector<ExperimentConfig> out;
  for (double v : config.sweep->values) {
    json doc = json::parse(config.source);
    doc.erase("sweep");
    *locate(doc, config.sweep->key, true) = sweep_value_json(v);
    auto point = parse_document(doc, config.base_dir);
    out.push_back(std::move(point));
  }
  return out;
}

EnvironmentSpec environment_spec(const ExperimentConfig& config, std::size_t learners,
                                 std::uint64_t seed) {
  const auto& e = config.environment;
  EnvironmentSpec spec;
  spec.delay.kind = e.delay_kind;
  if (e.delay_kind != DelayKind::none) {
    if (e.max_delay.size() == 1) spec.delay.max_delay.assign(learners, e.max_delay.front());
    else if (e.max_delay.size() == learners) spec.delay.max_delay = e.max_delay;
    else throw ConfigError("environment.delay.max", "give one value or one per learner");
  }
  spec.labels.probability = e.label_probability;
  if (e.arrival_probability.size() == 1)
    spec.arrival.probability.assign(learners, e.arrival_probability.front());
  else if (e.arrival_probability.size() == learners)
    spec.arrival.probability = e.arrival_probability;
  else if (!e.arrival_probability.empty())
    throw ConfigError("environment.arrival_probability", "give one value or one per learner");
  spec.seed = seed;
  return spec;
}

RunSpec run_spec(const ExperimentConfig& config) {
  RunSpec spec;
  spec.aggregators = config.aggregators;
  spec.classifier = config.classifier;
  spec.aggregated_learners = config.aggregated_learners;
  spec.oracle_weight_cap = config.oracle_weight_cap;
  spec.oracle_budget = config.oracle_budget;
  spec.compute_oracle = config.compute_oracle;
  spec.epsilon = config.environment.epsilon;
  return spec;
}

EventTrace build_trace(const ExperimentConfig& config, std::uint64_t seed) {
  const auto stream_seed = Rng::derived(seed, {0x73747265616dULL}).next_bits();
  const auto env_seed = Rng::derived(seed, {0x656e76ULL}).next_bits();
  std::size_t instances = 0;
  auto stream = make_stream(config, stream_seed, instances);
  return schedule(*stream, environment_spec(config, stream->learners(), env_seed), instances);
}

std::string metrics_to_json(const RunMetrics& m) {
  json aggs = json::array();
  for (const auto& a : m.aggregators) {
    aggs.push_back({{"kind", to_string(a.kind)},
                    {"mistakes", a.mistakes},
                    {"p_learner", a.p_learner},
                    {"p_system", a.p_system},
                    {"observed_errors", a.observed_errors},
                    {"per_concept", concepts_json(a.per_concept)},
                    {"final_weights", a.final_weights},
                    {"bound_missing", bound_missing_json(a.bound_missing)}});
  }
  const json doc = {{"learners", m.learners},
                    {"instances", m.instances},
                    {"synchronized_slots", m.synchronized_slots},
                    {"alpha", m.alpha},
                    {"label_probability", m.label_probability},
                    {"classifiers",
                     {{"mistakes", m.classifiers.mistakes},
                      {"rates", m.classifiers.rates},
                      {"p_star", m.classifiers.p_star},
                      {"v_star", m.classifiers.v_star}}},
                    {"oracle", oracle_json(m.oracle)},
                    {"bounds", bounds_json(m.bounds)},
                    {"aggregators", std::move(aggs)}};
  return doc.dump();
}

std::vector<std::string> metrics_records(const RunMetrics& m, std::uint64_t seed,
                                         const std::string& sweep_key, double sweep_value) {
  std::vector<std::string> out;
  for (const auto& a : m.aggregators) {
    json r = {{"seed", seed},
              {"sweep_key", sweep_key.empty() ? json(nullptr) : json(sweep_key)},
              {"sweep_value", sweep_key.empty() ? json(nullptr) : json(sweep_value)},
              {"aggregator", to_string(a.kind)},
              {"learners", m.learners},
              {"instances", m.instances},
              {"synchronized_slots", m.synchronized_slots},
              {"alpha", m.alpha},
              {"label_probability", m.label_probability},
              {"p_system", a.p_system},
              {"p_learner", a.p_learner},
              {"mistakes", a.mistakes},
              {"observed_errors", a.observed_errors},
              {"classifier_rates", m.classifiers.rates},
              {"p_star", m.classifiers.p_star},
              {"v_star", m.classifiers.v_star},
              {"oracle", oracle_json(m.oracle)},
              {"bounds", bounds_json(m.bounds)},
              {"bound_missing", bound_missing_json(a.bound_missing)},
              {"per_concept", concepts_json(a.per_concept)},
              {"final_weights", a.final_weights}};
    out.push_back(r.dump());
  }
  return out;
}

ExperimentOutcome run_experiment(const ExperimentConfig& config,
                                 const std::optional<std::string>& output_dir) {
  const auto points = expand_sweep(config);
  const auto& seeds = config.seeds;
  if (seeds.empty()) throw ConfigError("seeds", "no seeds given");

  ExperimentOutcome outcome;
  if (output_dir && !output_dir->empty()) outcome.output_dir = *output_dir;
  else if (!config.output_dir.empty()) outcome.output_dir = config.output_dir;
  else if (const char* env = std::getenv("PWMSIM_OUTPUT_DIR"); env && *env) outcome.output_dir = env;
  else outcome.output_dir = "pwmsim-out";
  std::error_code ec;
  fs::create_directories(outcome.output_dir, ec);
  if (ec) throw IoError("cannot create output directory " + outcome.output_dir + ": " + ec.message());
  if (config.export_traces) {
    fs::create_directories(fs::path(outcome.output_dir) / "traces", ec);
    if (ec) throw IoError("cannot create trace directory: " + ec.message());
  }

  const std::string sweep_key = config.sweep ? config.sweep->key : "";
  const std::size_t n_tasks = points.size() * seeds.size();
  std::vector<TaskResult> results(n_tasks);
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t t = next++; t < n_tasks; t = next++) {
      const auto p = t / seeds.size();
      const auto seed = seeds[t % seeds.size()];
      auto& res = results[t];
      try {
        const auto trace = build_trace(points[p], seed);
        if (config.export_traces)
          save_trace((fs::path(outcome.output_dir) / "traces" /
                      ("point" + std::to_string(p) + "-seed" + std::to_string(seed) + ".jsonl"))
                         .string(),
                     trace);
        res.metrics = run_learners(trace, run_spec(points[p]));
        res.records = metrics_records(res.metrics, seed, sweep_key,
                                      config.sweep ? config.sweep->values[p] : 0.0);
        res.ok = true;
      } catch (const std::exception& e) {
        res.error = e.what();
      }
    }
  };
  std::size_t threads = config.threads ? config.threads : std::thread::hardware_concurrency();
  threads = std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(n_tasks, 1));
  std::vector<std::thread> pool;
  for (std::size_t i = 1; i < threads; ++i) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();

  // Single collector: records are written in (point, seed) order.
  outcome.records_path = (fs::path(outcome.output_dir) / "records.jsonl").string();
  std::ofstream records(outcome.records_path, std::ios::binary);
  if (!records) throw IoError("cannot open " + outcome.records_path);
  const json header = {
      {"format", "pwmsim.records"},
      {"version", 1},
      {"experiment", config.name},
      {"columns",
       {{"seed", "run seed"},
        {"sweep_key", "swept config key (null without a sweep)"},
        {"sweep_value", "value of the swept key"},
        {"aggregator", "aggregation rule"},
        {"learners", "K, learners aggregated"},
        {"instances", "N, slots simulated"},
        {"synchronized_slots", "M, slots in which every learner observed the instance"},
        {"alpha", "(N - M) / N"},
        {"label_probability", "probability that a learner ever receives a label"},
        {"p_system", "mean over learners of the per-learner mistake probability"},
        {"p_learner", "per-learner mistake probability over all N slots"},
        {"mistakes", "per-learner mistake counts"},
        {"observed_errors", "per-learner mistakes whose label was released"},
        {"classifier_rates", "P_i of each local classifier over synchronized slots"},
        {"p_star", "smallest classifier error rate"},
        {"v_star", "number of classifiers attaining p_star"},
        {"oracle", "best static weight vector over synchronized slots"},
        {"bounds", "b1, b2, b = min(b1, b2, 1), delayed, async, environment"},
        {"bound_missing", "per-learner missing-label bound (null: not applicable)"},
        {"per_concept", "concept id -> [slots, mistakes summed over learners]"},
        {"final_weights", "per-learner weights at the end of the run"}}}};
  records << header.dump() << '\n';

  std::vector<std::map<AggregatorKind, Summary>> summaries(points.size());
  std::vector<std::vector<AggregatorKind>> order(points.size());
  for (std::size_t t = 0; t < n_tasks; ++t) {
    const auto p = t / seeds.size();
    auto& res = results[t];
    if (!res.ok) {
      outcome.failures.push_back({seeds[t % seeds.size()], p, res.error});
      continue;
    }
    ++outcome.runs;
    for (const auto& line : res.records) records << line << '\n';
    for (const auto& a : res.metrics.aggregators) {
      auto [it, inserted] = summaries[p].try_emplace(a.kind);
      if (inserted) order[p].push_back(a.kind);
      auto& s = it->second;
      const auto& m = res.metrics;
      ++s.runs;
      s.sum += a.p_system;
      s.sum_sq += a.p_system * a.p_system;
      s.b += m.bounds.b;
      s.b1 += m.bounds.b1;
      s.b2 += m.bounds.b2;
      s.env += m.bounds.environment;
      s.p_opt += m.oracle.p_opt;
      s.p_star += m.classifiers.p_star;
      s.alpha += m.alpha;
    }
  }
  records.flush();
  if (!records) throw IoError("failed writing " + outcome.records_path);

  std::string stem = "summary";
  if (config.sweep) {
    auto key = config.sweep->key;
    std::replace(key.begin(), key.end(), '.', '_');
    stem += "_" + key;
  }
  outcome.summary_path = (fs::path(outcome.output_dir) / (stem + ".csv")).string();
  std::ofstream summary(outcome.summary_path, std::ios::binary);
  if (!summary) throw IoError("cannot open " + outcome.summary_path);
  summary << (config.sweep ? config.sweep->key : std::string("point"))
          << ",aggregator,runs,p_mean,p_se,bound_b,bound_b1,bound_b2,bound_environment,p_opt,p_star,"
             "alpha\n";
  for (std::size_t p = 0; p < points.size(); ++p) {
    for (auto kind : order[p]) {
      const auto& s = summaries[p].at(kind);
      const double n = static_cast<double>(s.runs);
      const double mean = s.sum / n;
      const double var = s.runs > 1 ? std::max(0.0, (s.sum_sq - n * mean * mean) / (n - 1)) : 0.0;
      summary << (config.sweep ? csv_number(config.sweep->values[p]) : std::to_string(p)) << ','
              << to_string(kind) << ',' << s.runs << ',' << csv_number(mean) << ','
              << csv_number(std::sqrt(var / n)) << ',' << csv_number(s.b / n) << ','
              << csv_number(s.b1 / n) << ',' << csv_number(s.b2 / n) << ','
              << csv_number(s.env / n) << ',' << csv_number(s.p_opt / n) << ','
              << csv_number(s.p_star / n) << ',' << csv_number(s.alpha / n) << '\n';
    }
  }
  summary.flush();
  if (!summary) throw IoError("failed writing " + outcome.summary_path);
  return outcome;
}

RunMetrics replay_trace(const EventTrace& trace, const ExperimentConfig& config) {
  return run_learners(trace, run_spec(config));
}

}  // namespace pwm
