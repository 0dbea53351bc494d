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


#include <sstream>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "kappa/impossibility.hpp"
#include "kappa/scenario.hpp"

namespace py = pybind11;
using namespace kappa;

namespace {

std::vector<EdgeSet> to_edge_sets(const std::vector<std::vector<std::pair<NodeId, NodeId>>>& raw) {
  std::vector<EdgeSet> out;
  for (const auto& stage : raw) {
    EdgeSet s;
    for (const auto& [a, b] : stage) s.push_back(Edge{a, b});
    out.push_back(normalize(std::move(s)));
  }
  return out;
}

std::vector<std::vector<std::pair<NodeId, NodeId>>> from_edge_sets(const std::vector<EdgeSet>& sets) {
  std::vector<std::vector<std::pair<NodeId, NodeId>>> out;
  for (const EdgeSet& s : sets) {
    auto& stage = out.emplace_back();
    for (const Edge& e : s) stage.emplace_back(e.a, e.b);
  }
  return out;
}

py::bytes as_bytes(const Bytes& b) { return py::bytes(reinterpret_cast<const char*>(b.data()), b.size()); }

py::dict checks_dict(const std::vector<CheckResult>& checks) {
  py::dict d;
  for (const CheckResult& c : checks) d[py::str(c.name)] = py::make_tuple(c.pass, c.detail);
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "kappa-sync core bindings";

  py::register_exception<InvalidScenario>(m, "InvalidScenario", PyExc_ValueError);
  py::register_exception<InvariantViolation>(m, "InvariantViolation", PyExc_RuntimeError);

  m.def(
      "run_scenario",
      [](const std::string& config_json, std::optional<std::uint64_t> seed) {
        ScenarioConfig config = parse_scenario(config_json);
        if (seed) reseed(config, *seed);
        const ScenarioOutcome out = run_scenario(config);
        py::dict r;
        r["pass"] = out.verdict.pass;
        r["checks"] = checks_dict(out.verdict.checks);
        r["report"] = out.report;
        r["trace"] = out.trace_text;
        r["H"] = out.verdict.synch ? from_edge_sets(out.verdict.synch->H)
                                   : std::vector<std::vector<std::pair<NodeId, NodeId>>>{};
        std::vector<Phase> phases;
        for (const auto& f : out.trace.final_nodes) phases.push_back(f.phase);
        r["final_phases"] = phases;
        return r;
      },
      py::arg("config_json"), py::arg("seed") = py::none(),
      "Run a scenario given as JSON text; returns verdicts, report, trace text and H sequence.");

  m.def(
      "generate",
      [](const std::string& policy, std::size_t n, std::size_t delta, std::size_t t_max,
         const std::vector<std::pair<NodeId, NodeId>>& initial, double p_drop, double p_add, std::uint64_t seed) {
        DynamicsPolicy p;
        if (policy == "static") {
          p = DynamicsPolicy::make_static();
        } else if (policy == "random-churn") {
          p = DynamicsPolicy::random_churn(p_drop, p_add, seed);
        } else {
          throw InvalidScenario("unknown dynamics policy '" + policy + "'");
        }
        return from_edge_sets(generate(p, n, delta, t_max, to_edge_sets({initial}).front()).stages);
      },
      py::arg("policy"), py::arg("n"), py::arg("delta"), py::arg("t_max"),
      py::arg("initial") = std::vector<std::pair<NodeId, NodeId>>{}, py::arg("p_drop") = 0.0, py::arg("p_add") = 0.0,
      py::arg("seed") = 0);

  m.def(
      "reference_run",
      [](const std::string& algorithm, std::size_t n,
         const std::vector<std::vector<std::pair<NodeId, NodeId>>>& graphs, const std::vector<Input>& inputs,
         std::size_t steps) {
        const auto algo = make_algorithm(algorithm);
        const auto exec = reference_run(*algo, n, to_edge_sets(graphs), inputs, steps);
        py::list states;
        for (const auto& row : exec.states) {
          py::list r;
          for (const Bytes& b : row) r.append(as_bytes(b));
          states.append(r);
        }
        return states;
      },
      py::arg("algorithm"), py::arg("n"), py::arg("graphs"), py::arg("inputs") = std::vector<Input>{},
      py::arg("steps"));

  m.def(
      "synth",
      [](std::size_t n, std::size_t delta, const std::vector<std::vector<std::pair<NodeId, NodeId>>>& H,
         const std::string& algorithm) {
        SynchSequence seq;
        seq.n = n;
        seq.delta = delta;
        seq.H = to_edge_sets(H);
        const SynthOutcome out = synth_from_synch(seq, algorithm);
        py::dict r;
        r["pass"] = out.pass;
        r["round_trip"] = out.round_trip;
        r["phase_cadence"] = out.phase_cadence;
        r["stages"] = out.scenario.horizon;
        r["report"] = out.run.report;
        r["scenario"] = scenario_to_json(out.scenario);
        return r;
      },
      py::arg("n"), py::arg("delta"), py::arg("H"), py::arg("algorithm") = "history-hash",
      "Build the tripled-stage scenario for an H sequence, run it and check the round trip.");

  m.def(
      "extract_H",
      [](const std::string& trace_text) {
        std::istringstream in(trace_text);
        const RunTrace trace = read_trace(in);
        return from_edge_sets(verify::extract_H(trace, assign_ports(trace.graph)).H);
      },
      py::arg("trace_text"));

  m.def(
      "impossibility_demo",
      [](const std::string& protocol, std::size_t horizon) {
        const DemoOutcome out = demo_impossibility(protocol, horizon);
        return py::make_tuple(out.pass, out.report);
      },
      py::arg("protocol"), py::arg("horizon") = 20);

  m.def("protocol_names", &verify::protocol_names);
  m.def("algorithm_names", &algorithm_names);
}
