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

// Line-delimited event traces for replay. Line 1 is a header
//   {"format":"pwmsim.trace","version":1,"learners":K,"dimensions":[...],
//    "max_delays":[...],"label_probability":mu,"events":N}
// followed by one StreamEvent per line:
//   {"slot":n,"label":1,"concept":c,"learners":[{"a":1,"x":[...],"r":n+d}, ...]}
// "r" is null when the label is never released to that learner. Doubles
// are written with round-trip precision.

#include <iosfwd>
#include <string>

#include "pwm/environment.hpp"

namespace pwm {

inline constexpr const char* kTraceFormat = "pwmsim.trace";
inline constexpr int kTraceVersion = 1;

void write_trace(std::ostream& out, const EventTrace& trace);
void save_trace(const std::string& path, const EventTrace& trace);

// ParseError::position() is the byte offset of the failure (truncation
// reports the offset where more input was expected). A header with another
// version raises VersionError.
EventTrace read_trace(std::istream& in);
EventTrace load_trace(const std::string& path);

}  // namespace pwm
