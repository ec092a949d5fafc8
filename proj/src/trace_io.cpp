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

#include "pwm/trace_io.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#include "json.hpp"
#include "pwm/error.hpp"

namespace pwm {

using nlohmann::json;

namespace {

json event_to_json(const StreamEvent& ev) {
  json learners = json::array();
  for (const auto& obs : ev.learners) {
    json o = {{"a", obs.arrived ? 1 : 0}, {"x", obs.features}};
    o["r"] = obs.release ? json(*obs.release) : json(nullptr);
    learners.push_back(std::move(o));
  }
  return {{"slot", ev.slot},
          {"label", ev.label.value()},
          {"concept", ev.concept_id},
          {"learners", std::move(learners)}};
}

struct LineReader {
  std::istream& in;
  std::size_t offset = 0;  // byte offset of the next unread line

  // Returns false at clean EOF. `start` receives the line's byte offset.
  bool next(std::string& line, std::size_t& start) {
    start = offset;
    if (!std::getline(in, line)) return false;
    offset += line.size();
    if (!in.eof()) offset += 1;  // consumed newline
    return true;
  }
};

json parse_line(const std::string& line, std::size_t start) {
  try {
    return json::parse(line);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed trace record: ") + e.what(),
                     start + (e.byte > 0 ? e.byte - 1 : 0));
  }
}

template <class T>
T field(const json& j, const char* key, std::size_t start) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ParseError(std::string("bad or missing field '") + key + "': " + e.what(), start);
  }
}

}  // namespace

void write_trace(std::ostream& out, const EventTrace& trace) {
  const json header = {{"format", kTraceFormat},
                       {"version", kTraceVersion},
                       {"learners", trace.learners()},
                       {"dimensions", trace.dimensions},
                       {"max_delays", trace.max_delays},
                       {"label_probability", trace.label_probability},
                       {"events", trace.events.size()}};
  out << header.dump() << '\n';
  for (const auto& ev : trace.events) out << event_to_json(ev).dump() << '\n';
  if (!out) throw IoError("failed writing trace");
}

void save_trace(const std::string& path, const EventTrace& trace) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  write_trace(out, trace);
}

EventTrace read_trace(std::istream& in) {
  LineReader reader{in};
  std::string line;
  std::size_t start = 0;
  if (!reader.next(line, start)) throw ParseError("empty trace file", 0);
  const json header = parse_line(line, start);
  if (!header.is_object() || header.value("format", std::string()) != kTraceFormat)
    throw ParseError("not a pwmsim trace", 0);
  const int version = field<int>(header, "version", start);
  if (version != kTraceVersion)
    throw VersionError("trace version " + std::to_string(version) + " is not supported (expected " +
                       std::to_string(kTraceVersion) + ")");

  EventTrace trace;
  trace.dimensions = field<std::vector<std::size_t>>(header, "dimensions", start);
  trace.max_delays = field<std::vector<TimeSlot>>(header, "max_delays", start);
  trace.label_probability = field<double>(header, "label_probability", start);
  const auto n_events = field<std::size_t>(header, "events", start);
  const auto k = trace.learners();
  if (trace.max_delays.size() != k) throw ParseError("max_delays length differs from learners", start);
  if (header.contains("learners") && field<std::size_t>(header, "learners", start) != k)
    throw ParseError("learners differs from dimensions length", start);

  trace.events.reserve(n_events);
  for (std::size_t e = 0; e < n_events; ++e) {
    if (!reader.next(line, start))
      throw ParseError("trace truncated: expected " + std::to_string(n_events) + " events, got " +
                           std::to_string(e),
                       reader.offset);
    const json j = parse_line(line, start);
    StreamEvent ev;
    ev.slot = field<TimeSlot>(j, "slot", start);
    try {
      ev.label = BinaryLabel::from_int(field<int>(j, "label", start));
    } catch (const std::invalid_argument& ex) {
      throw ParseError(ex.what(), start);
    }
    ev.concept_id = field<ConceptId>(j, "concept", start);
    const auto learners = field<json>(j, "learners", start);
    if (!learners.is_array() || learners.size() != k)
      throw ParseError("event learner count differs from header", start);
    for (const auto& o : learners) {
      LearnerObservation obs;
      obs.arrived = field<int>(o, "a", start) != 0;
      obs.features = field<std::vector<double>>(o, "x", start);
      const auto r = field<json>(o, "r", start);
      if (!r.is_null()) {
        if (!r.is_number_integer()) throw ParseError("release slot must be an integer", start);
        obs.release = r.get<TimeSlot>();
      }
      ev.learners.push_back(std::move(obs));
    }
    trace.events.push_back(std::move(ev));
  }
  return trace;
}

EventTrace load_trace(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  return read_trace(in);
}

}  // namespace pwm
