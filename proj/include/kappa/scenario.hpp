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


// Declarative scenario files and the run/verify/synth/demo entry points
// shared by the CLI and the Python module.

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "kappa/engine.hpp"
#include "kappa/trace_io.hpp"
#include "kappa/verify.hpp"

namespace kappa {

struct CheckSpec {
  bool correctness = false;
  bool strong_nontriviality = false;
  bool fairness = false;
  std::optional<Phase> liveness;  // target phase
};

/// Parses "correctness,strong-nontriviality,liveness=40,fairness".
CheckSpec parse_checks(const std::string& list);

struct ScenarioConfig {
  std::string name;
  std::size_t n = 0;
  std::size_t delta = 0;
  std::size_t horizon = 0;
  std::uint64_t seed = 0;
  DynamicsPolicy dynamics;
  EdgeSet initial;
  SchedulerPolicy scheduler;
  std::string algorithm = "history-hash";
  std::vector<Input> inputs;  // empty: algorithm default per node
  CheckSpec checks;
};

/// Throws InvalidScenario with the offending field in the message.
ScenarioConfig parse_scenario(const std::string& json_text);
ScenarioConfig load_scenario(const std::filesystem::path& path);
std::string scenario_to_json(const ScenarioConfig& config);

/// Replaces the base seed and re-derives the dynamics and scheduler streams.
void reseed(ScenarioConfig& config, std::uint64_t seed);

/// Activation-gap bound the configured scheduler guarantees.
std::size_t expected_fairness_bound(const ScenarioConfig& config);

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;  // space-separated key=value pairs
};

struct VerifyOutcome {
  std::vector<CheckResult> checks;
  std::optional<verify::ExtractedSynch> synch;
  bool pass = false;
};

/// Always checks symmetry, the sandwich and pulled-state consistency, plus
/// whatever `spec` asks for.
VerifyOutcome verify_trace(const RunTrace& trace, const PortAssignment& ports, const CheckSpec& spec,
                           std::size_t fairness_bound);

struct ScenarioOutcome {
  RunTrace trace;
  VerifyOutcome verdict;
  std::string trace_text;
  std::string h_text;
  std::string report;
};

ScenarioOutcome run_scenario(const ScenarioConfig& config);

/// Writes trace.jsonl, H.json and report.txt.
void write_artifacts(const ScenarioOutcome& outcome, const std::filesystem::path& out_dir);

std::string render_report(const std::string& title, const std::vector<std::string>& preamble,
                          const std::vector<CheckResult>& checks);

struct SynthOutcome {
  ScenarioConfig scenario;
  ScenarioOutcome run;
  bool round_trip = false;
  bool phase_cadence = false;
  bool pass = false;
};

/// Builds the tripled-stage scenario for an H sequence, runs it and checks
/// that the H sequence, the phase cadence and the states come back.
SynthOutcome synth_from_synch(const SynchSequence& seq, const std::string& algorithm = "history-hash");

/// Writes scenario.json next to the run artifacts.
void write_synth_artifacts(const SynthOutcome& outcome, const std::filesystem::path& out_dir);

struct DemoOutcome {
  bool pass = false;
  std::string report;
};

/// `protocol` is a registered classic-PULL protocol, "kappa-handshake", or
/// "all".
DemoOutcome demo_impossibility(const std::string& protocol, std::size_t horizon = 20);

}  // namespace kappa
