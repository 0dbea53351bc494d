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


// kappa-sync: run scenarios, verify traces, synthesize from H sequences and
// play the edge-agreement demonstration.
//
// Exit codes: 0 ok, 1 a check failed, 2 invalid configuration or usage,
// 3 internal invariant violated.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "kappa/impossibility.hpp"
#include "kappa/scenario.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kCheckFailed = 1;
constexpr int kConfigInvalid = 2;
constexpr int kInvariant = 3;

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw kappa::InvalidScenario("cannot read " + path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"kappa-sync: synchronizer simulation and verification harness"};
  app.require_subcommand(1);
  app.fallthrough();
  int verbosity = 0;
  app.add_flag("-v,--verbose", verbosity, "Print the report to stdout (repeat for more)");

  std::string scenario_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  std::string checks;
  auto* run_cmd = app.add_subcommand("run", "Run a scenario file and its checks");
  run_cmd->add_option("scenario", scenario_path, "Scenario JSON file")->required();
  run_cmd->add_option("--out", out_dir, "Output directory")->required();
  run_cmd->add_option("--seed", seed, "Override the scenario seed");
  run_cmd->add_option("--checks", checks, "Override checks, e.g. correctness,liveness=40,fairness");

  std::string hseq_path;
  std::string synth_out;
  std::string synth_algo = "history-hash";
  auto* synth_cmd = app.add_subcommand("synth", "Build and run the tripled-stage scenario of an H sequence");
  synth_cmd->add_option("hfile", hseq_path, "H-sequence JSON file")->required();
  synth_cmd->add_option("--out", synth_out, "Output directory")->required();
  synth_cmd->add_option("--algorithm", synth_algo, "Simulated algorithm");

  std::string protocol;
  std::size_t demo_horizon = 20;
  auto* demo_cmd = app.add_subcommand("demo", "Edge-agreement demonstration for a protocol");
  demo_cmd->add_option("protocol", protocol, "commit-on-propose, revert-on-disconnect, wait-for-ack, never-propose, "
                                             "kappa-handshake or all")
      ->required();
  demo_cmd->add_option("--horizon", demo_horizon, "Stages per execution");

  std::string trace_path;
  std::string verify_checks = "correctness,strong-nontriviality";
  std::size_t verify_bound = 0;
  auto* verify_cmd = app.add_subcommand("verify", "Re-check a written trace");
  verify_cmd->add_option("trace", trace_path, "trace.jsonl")->required();
  verify_cmd->add_option("--checks", verify_checks, "Checks to run");
  verify_cmd->add_option("--fairness-bound", verify_bound, "Activation-gap bound (default: from the trace)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigInvalid;
  }

  try {
    if (*run_cmd) {
      kappa::ScenarioConfig config = kappa::load_scenario(scenario_path);
      if (seed) kappa::reseed(config, *seed);
      if (!checks.empty()) config.checks = kappa::parse_checks(checks);
      const auto outcome = kappa::run_scenario(config);
      kappa::write_artifacts(outcome, out_dir);
      if (verbosity > 0) std::cout << outcome.report;
      std::cout << (outcome.verdict.pass ? "PASS " : "FAIL ") << config.name << " -> " << out_dir << '\n';
      return outcome.verdict.pass ? kOk : kCheckFailed;
    }
    if (*synth_cmd) {
      const auto seq = kappa::parse_hseq(slurp(hseq_path));
      const auto outcome = kappa::synth_from_synch(seq, synth_algo);
      kappa::write_synth_artifacts(outcome, synth_out);
      if (verbosity > 0) std::cout << outcome.run.report;
      std::cout << (outcome.pass ? "PASS " : "FAIL ") << "synth -> " << synth_out << '\n';
      return outcome.pass ? kOk : kCheckFailed;
    }
    if (*demo_cmd) {
      const auto outcome = kappa::demo_impossibility(protocol, demo_horizon);
      std::cout << outcome.report;
      return outcome.pass ? kOk : kCheckFailed;
    }
    if (*verify_cmd) {
      std::ifstream in(trace_path, std::ios::binary);
      if (!in) throw kappa::InvalidScenario("cannot read " + trace_path);
      const kappa::RunTrace trace = kappa::read_trace(in);
      const kappa::PortAssignment ports = kappa::assign_ports(trace.graph);
      const std::size_t bound = verify_bound ? verify_bound : kappa::verify::default_fairness_bound(trace);
      const auto verdict = kappa::verify_trace(trace, ports, kappa::parse_checks(verify_checks), bound);
      std::cout << kappa::render_report("kappa-sync trace verification", {"trace " + trace_path}, verdict.checks);
      return verdict.pass ? kOk : kCheckFailed;
    }
  } catch (const kappa::InvalidScenario& e) {
    std::cerr << "config invalid: " << e.what() << '\n';
    return kConfigInvalid;
  } catch (const kappa::InvariantViolation& e) {
    std::cerr << "internal invariant violated: " << e.what() << '\n';
    return kInvariant;
  } catch (const kappa::ProtocolViolation& e) {
    std::cerr << "internal invariant violated: " << e.what() << '\n';
    return kInvariant;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInvariant;
  }
  return kOk;
}
