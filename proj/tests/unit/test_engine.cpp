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

#include "doctest.h"
#include "kappa/engine.hpp"
#include "kappa/trace_io.hpp"

using namespace kappa;

namespace {

RunTrace run_simple(const TimeVaryingGraph& g, const SchedulerPolicy& sched, std::size_t horizon,
                    const EngineOptions& opts = {}) {
  static const HistoryHashAlgo algo;
  return run(g, assign_ports(g), sched, algo, {}, horizon, opts);
}

}  // namespace

TEST_CASE("two nodes on a static edge execute at stage 2") {
  const auto g = generate(DynamicsPolicy::make_static(), 2, 1, 3, {Edge{0, 1}});
  const auto trace = run_simple(g, SchedulerPolicy::all_active(), 3);
  for (NodeId u = 0; u < 2; ++u) {
    REQUIRE(trace.completed_phases(u) == 1);
    CHECK(trace.phases[u][0].execute_stage == 2);
    CHECK(trace.phases[u][0].F == PortSet::from_bits(1));
    CHECK(trace.final_nodes[u].phase == 1);
  }
  CHECK(trace.stages[0].actions == std::vector<ActionKind>{ActionKind::Handshake, ActionKind::Handshake});
  CHECK(trace.stages[1].writes.size() == 2);  // both see the other's ack
}

TEST_CASE("isolated node takes two stages per phase") {
  TimeVaryingGraph g{1, 1, {{}}, "hand"};
  for (std::size_t k : {1, 4, 9}) {
    const auto trace = run_simple(g, SchedulerPolicy::all_active(), 2 * k);
    CHECK(trace.final_nodes[0].phase == k);
  }
}

TEST_CASE("runs are deterministic") {
  const auto g = generate(DynamicsPolicy::random_churn(0.1, 0.2, 5), 7, 3, 120);
  const auto a = trace_to_string(run_simple(g, SchedulerPolicy::random_subset(0.6, 6, 9), 120));
  const auto b = trace_to_string(run_simple(g, SchedulerPolicy::random_subset(0.6, 6, 9), 120));
  CHECK(a == b);
  const auto c = trace_to_string(run_simple(g, SchedulerPolicy::random_subset(0.6, 6, 10), 120));
  CHECK(a != c);
}

TEST_CASE("fairness audit") {
  const auto g = generate(DynamicsPolicy::make_static(), 8, 2, 1);
  CHECK(fairness_audit(run_simple(g, SchedulerPolicy::all_active(), 50), 1).max_gap == 1);
  const auto seq = fairness_audit(run_simple(g, SchedulerPolicy::sequential(), 80), 8);
  CHECK(seq.max_gap == 8);
  CHECK(seq.ok);
  const auto rnd = fairness_audit(run_simple(g, SchedulerPolicy::random_subset(0.3, 10, 1), 500), 10);
  CHECK(rnd.ok);
  CHECK(rnd.max_gap <= 10);
  CHECK(rnd.max_gap >= 5);
  CHECK_FALSE(fairness_audit(run_simple(g, SchedulerPolicy::sequential(), 80), 7).ok);
}

TEST_CASE("random-subset scheduler forces overdue nodes") {
  Scheduler s(SchedulerPolicy::random_subset(0.0, 3, 1), 2);
  CHECK(s.select(0).empty());
  CHECK(s.select(1).empty());
  CHECK(s.select(2) == std::vector<NodeId>{0, 1});
  CHECK(s.select(3).empty());
}

TEST_CASE("scripted scheduler falls back to everyone past its script") {
  Scheduler s(SchedulerPolicy::scripted({{2, 0, 2}, {}}), 3);
  CHECK(s.select(0) == std::vector<NodeId>{0, 2});
  CHECK(s.select(1).empty());
  CHECK(s.select(2) == std::vector<NodeId>{0, 1, 2});
  CHECK_THROWS_AS(Scheduler(SchedulerPolicy::scripted({{5}}), 3), InvalidScenario);
}

TEST_CASE("exactly one action enabled and phases monotone on churn") {
  const auto g = generate(DynamicsPolicy::random_churn(0.2, 0.2, 21), 9, 3, 200);
  std::vector<Phase> last(9, 0);
  EngineOptions opts;
  opts.on_stage_end = [&](Stage, const std::vector<NodeState>& states) {
    for (NodeId u = 0; u < 9; ++u) {
      CHECK(handshake_enabled(states[u]) != execute_synch_enabled(states[u]));
      CHECK(states[u].phase >= last[u]);
      CHECK(states[u].phase <= last[u] + 1);
      last[u] = states[u].phase;
    }
  };
  run_simple(g, SchedulerPolicy::random_subset(0.5, 5, 4), 200, opts);
}

TEST_CASE("detector holds exactly the ports lost since the previous activation") {
  const auto g = generate(DynamicsPolicy::random_churn(0.3, 0.3, 8), 6, 2, 150);
  const auto ports = assign_ports(g);
  std::vector<std::optional<Stage>> prev(6);
  std::size_t nonempty = 0;
  EngineOptions opts;
  opts.on_activation = [&](const ActivationEvent& ev) {
    // Oracle: ports occupied at some stage s-1 in [prev, t) whose edge is gone at s.
    PortSet expected;
    const Stage from = prev[ev.node] ? *prev[ev.node] + 1 : 1;
    for (Stage s = std::max<Stage>(from, 1); s <= ev.t; ++s) {
      for (Port p = 0; p < 2; ++p) {
        const auto v = ports.neighbor(s - 1, ev.node, p);
        if (v && !g.has_edge(s, ev.node, *v)) expected.insert(p);
      }
    }
    CHECK(ev.detector == expected);
    if (!expected.empty()) ++nonempty;
    prev[ev.node] = ev.t;
  };
  static const CounterAlgo algo;
  run(g, ports, SchedulerPolicy::random_subset(0.4, 6, 2), algo, {}, 150, opts);
  CHECK(nonempty > 0);
}

TEST_CASE("compacted views give the same run") {
  const auto g = generate(DynamicsPolicy::random_churn(0.15, 0.2, 33), 8, 3, 200);
  EngineOptions compacted;
  compacted.compact_views = true;
  const auto full = trace_to_string(run_simple(g, SchedulerPolicy::random_subset(0.7, 8, 5), 200));
  const auto small = trace_to_string(run_simple(g, SchedulerPolicy::random_subset(0.7, 8, 5), 200, compacted));
  CHECK(full == small);
}

TEST_CASE("engine rejects mismatched inputs") {
  const auto g = generate(DynamicsPolicy::make_static(), 3, 1, 2);
  static const MaxFloodAlgo algo;
  CHECK_THROWS_AS(run(g, assign_ports(g), SchedulerPolicy::all_active(), algo, {Input{1}}, 5), InvalidScenario);
  CHECK_THROWS_AS(run(g, assign_ports(g), SchedulerPolicy::all_active(), algo, {}, 0), InvalidScenario);
}

TEST_CASE("trace round trip") {
  const auto g = generate(DynamicsPolicy::random_churn(0.2, 0.2, 4), 5, 2, 60);
  const auto trace = run_simple(g, SchedulerPolicy::random_subset(0.5, 4, 4), 60);
  const std::string text = trace_to_string(trace);
  std::istringstream in(text);
  const RunTrace back = read_trace(in);
  CHECK(trace_to_string(back) == text);
  std::istringstream bad("{\"kind\":\"stage\"}\n");
  CHECK_THROWS_AS(read_trace(bad), InvalidScenario);
}
