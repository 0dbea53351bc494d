// Copyright 2026 The kappa-sync Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Line-delimited JSON form of a RunTrace. Every line is one record
// {"kind", "stage", "node", "payload"}; see docs/trace-format.md.

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "kappa/engine.hpp"

namespace kappa {

void write_trace(std::ostream& out, const RunTrace& trace);
std::string trace_to_string(const RunTrace& trace);

/// Throws InvalidScenario on malformed input or a schema mismatch.
RunTrace read_trace(std::istream& in);

/// H-sequence file: {"schema", "n", "delta", "H": [[[a,b],...], ...]}.
struct SynchSequence {
  static constexpr const char* kSchema = "kappa-hseq/1";

  std::size_t n = 0;
  std::size_t delta = 0;
  std::vector<EdgeSet> H;
};

std::string hseq_to_string(const SynchSequence& seq);
SynchSequence parse_hseq(const std::string& text);

}  // namespace kappa
