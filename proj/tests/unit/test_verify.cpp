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


#include <random>

#include "../support/oracles.hpp"
#include "doctest.h"
#include "kappa/scenario.hpp"
#include "kappa/verify.hpp"

using namespace kappa;
using namespace kappa::verify;

namespace {

const HistoryHashAlgo kHash;

struct Run {
  TimeVaryingGraph graph;
  PortAssignment ports;
  RunTrace trace;
};

Run make_run(TimeVaryingGraph g, const SchedulerPolicy& sched, std::size_t horizon, const EngineOptions& opts = {}) {
  Run r{std::move(g), {}, {}};
  r.ports = assign_ports(r.graph);
  r.trace = run(r.graph, r.ports, sched, kHash, {}, horizon, opts);
  return r;
}

EdgeSet triangle() { return {Edge{0, 1}, Edge{0, 2}, Edge{1, 2}}; }

}  // namespace

TEST_CASE("static triangle extracts the triangle every phase") {
  const auto r = make_run(generate(DynamicsPolicy::make_static(), 3, 2, 9, triangle()), SchedulerPolicy::all_active(), 9);
  const auto x = extract_H(r.trace, r.ports);
  REQUIRE(x.comparable_phases == 3);
  for (const EdgeSet& h : x.H) CHECK(h == triangle());
  CHECK(check_correctness(r.trace, r.ports, kHash, {}).pass);
}

TEST_CASE("no edges means empty H") {
  const auto r = make_run(generate(DynamicsPolicy::make_static(), 4, 2, 1), SchedulerPolicy::random_subset(0.5, 3, 2), 40);
  const auto x = extract_H(r.trace, r.ports);
  CHECK(x.comparable_phases > 3);
  for (const EdgeSet& h : x.H) CHECK(h.empty());
}

TEST_CASE("edge gone before the second endpoint wakes is not in H") {
  TimeVaryingGraph g{2, 1, {{Edge{0, 1}}, {}}, "hand"};
  const auto r = make_run(g, SchedulerPolicy::scripted({{0}, {1}}), 10);
  const auto x = extract_H(r.trace, r.ports);
  REQUIRE(x.comparable_phases >= 1);
  CHECK(x.H[0].empty());
  CHECK(check_strong_nontriviality(r.trace, r.ports).pass);
}

TEST_CASE("single node is trivially correct") {
  TimeVaryingGraph g{1, 1, {{}}, "hand"};
  const auto r = make_run(g, SchedulerPolicy::all_active(), 12);
  const auto eq = check_correctness(r.trace, r.ports, kHash, {});
  CHECK(eq.pass);
  CHECK(eq.phases_compared == 6);
}

TEST_CASE("correctness, symmetry and sandwich under churn") {
  for (std::uint64_t seed = 0; seed < 12; ++seed) {
    const std::size_t n = 2 + seed % 9;
    const std::size_t delta = 1 + seed % 4;
    const auto g = generate(DynamicsPolicy::random_churn(0.1, 0.15, seed), n, delta, 150);
    const auto r = make_run(g, SchedulerPolicy::random_subset(0.7, 8, seed + 100), 150);
    const auto eq = check_correctness(r.trace, r.ports, kHash, {});
    CHECK(eq.pass);
    CHECK(eq.phases_compared > 5);
    CHECK(check_sandwich(r.trace).pass);
    CHECK(check_pulled_consistency(r.trace, r.ports).pass);
  }
}

TEST_CASE("skipping the ack precondition is caught") {
  EngineOptions faulty;
  faulty.faults.skip_ack_precondition = true;
  int caught = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto g = generate(DynamicsPolicy::random_churn(0.2, 0.2, seed), 6, 2, 120);
    try {
      const auto r = make_run(g, SchedulerPolicy::random_subset(0.6, 6, seed), 120, faulty);
      const auto eq = check_correctness(r.trace, r.ports, kHash, {});
      if (!eq.pass || !check_strong_nontriviality(r.trace, r.ports).pass) ++caught;
    } catch (const InvariantViolation&) {
      ++caught;  // includes one-sided F (symmetry violation)
    }
  }
  CHECK(caught > 0);
}

TEST_CASE("weak non-triviality construction") {
  SUBCASE("single edge") {
    const auto s = build_weak_nontriviality(2, 1, {{Edge{0, 1}}});
    REQUIRE(s.graph.lifetime() == 3);
    CHECK(s.horizon == 3);
    const auto r = make_run(s.graph, s.scheduler, s.horizon);
    CHECK(r.trace.final_nodes[0].phase == 1);
    CHECK(r.trace.final_nodes[1].phase == 1);
    CHECK(extract_H(r.trace, r.ports).H == std::vector<EdgeSet>{{Edge{0, 1}}});
  }
  SUBCASE("empty graph") {
    const auto s = build_weak_nontriviality(3, 2, {{}});
    const auto r = make_run(s.graph, s.scheduler, s.horizon);
    for (const auto& f : r.trace.final_nodes) CHECK(f.phase == 1);
  }
  SUBCASE("degree violation") {
    CHECK_THROWS_AS(build_weak_nontriviality(3, 1, {{Edge{0, 1}, Edge{0, 2}}}), InvalidScenario);
    CHECK_THROWS_AS(build_weak_nontriviality(3, 1, {}), InvalidScenario);
  }
  SUBCASE("script shape") {
    const auto s = build_weak_nontriviality(4, 2, {{Edge{1, 2}}, {}});
    REQUIRE(s.scheduler.script.size() == 6);
    CHECK(s.scheduler.script[0] == std::vector<NodeId>{0, 1, 2, 3});
    CHECK(s.scheduler.script[1] == std::vector<NodeId>{1, 2});
    CHECK(s.scheduler.script[4].empty());
  }
}

TEST_CASE("random H sequences round trip through synthesis") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 15; ++trial) {
    SynchSequence seq;
    seq.n = 1 + rng() % 10;
    seq.delta = 1 + rng() % 3;
    const std::size_t k = 1 + rng() % 8;
    for (std::size_t i = 0; i < k; ++i) seq.H.push_back(oracle::random_graph(rng, seq.n, seq.delta, 0.5));
    const auto out = synth_from_synch(seq);
    CHECK(out.round_trip);
    CHECK(out.phase_cadence);
    CHECK(out.pass);
  }
}

TEST_CASE("liveness cadence") {
  SUBCASE("all-active static graph advances every three stages") {
    const auto r = make_run(generate(DynamicsPolicy::make_static(), 3, 2, 1, triangle()), SchedulerPolicy::all_active(), 31);
    const auto lv = check_liveness(r.trace, 10, 1);
    CHECK(lv.pass);
    REQUIRE(lv.r.size() == 11);
    for (Phase i = 0; i <= 10; ++i) CHECK(lv.r[i] == 3 * i);
  }
  SUBCASE("isolated node advances every two stages") {
    TimeVaryingGraph g{1, 1, {{}}, "hand"};
    const auto r = make_run(g, SchedulerPolicy::all_active(), 20);
    const auto lv = check_liveness(r.trace, 10, 1);
    CHECK(lv.pass);
    for (Phase i = 0; i <= 10; ++i) CHECK(lv.r[i] == 2 * i);
  }
  SUBCASE("unreached target fails with a stall report") {
    TimeVaryingGraph g{1, 1, {{}}, "hand"};
    const auto r = make_run(g, SchedulerPolicy::all_active(), 6);
    const auto lv = check_liveness(r.trace, 10, 1);
    CHECK_FALSE(lv.pass);
    CHECK(lv.stuck_nodes == std::vector<NodeId>{0});
    CHECK_FALSE(lv.stall_detail.empty());
  }
}

TEST_CASE("strong non-triviality") {
  SUBCASE("static graph keeps every edge") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      const auto g = generate(DynamicsPolicy::make_static(), 4, 3, 1, {Edge{0, 1}, Edge{1, 2}, Edge{2, 3}, Edge{0, 3}});
      const auto r = make_run(g, SchedulerPolicy::random_subset(0.5, 5, seed), 100);
      const auto x = extract_H(r.trace, r.ports);
      for (const EdgeSet& h : x.H) CHECK(h == g.stages[0]);
      CHECK(check_strong_nontriviality(r.trace, r.ports).pass);
    }
  }
  SUBCASE("one-stage edge with no activation never enters H") {
    TimeVaryingGraph g{2, 1, {{}, {Edge{0, 1}}, {}}, "hand"};
    const auto r = make_run(g, SchedulerPolicy::scripted({{0, 1}, {}, {0, 1}}), 20);
    for (const EdgeSet& h : extract_H(r.trace, r.ports).H) CHECK(h.empty());
    CHECK(check_strong_nontriviality(r.trace, r.ports).pass);
  }
  SUBCASE("mutually valid for one stage is not enough") {
    // u starts phase 1 while v lags, v catches up and acks, the edge
    // vanishes before u is activated again.
    const EdgeSet e{Edge{0, 1}};
    TimeVaryingGraph g{2, 1, {{}, {}, e, e, e, e, {}}, "hand"};
    const auto r = make_run(g, SchedulerPolicy::scripted({{0}, {0}, {0}, {1}, {1}, {1}}), 20);
    const PersistenceOracle oracle(r.trace);
    CHECK(oracle.phase_start(0, 1) == Stage{2});
    CHECK(oracle.phase_start(1, 1) == Stage{5});
    CHECK(oracle.mutual_valid_persistent(0, 1, 1));
    CHECK_FALSE(oracle.must_be_in_H(0, 1, 1));
    const auto x = extract_H(r.trace, r.ports);
    REQUIRE(x.comparable_phases >= 2);
    CHECK(x.H[1].empty());
    const auto nt = check_strong_nontriviality(r.trace, r.ports);
    CHECK(nt.pass);
    CHECK(nt.mutual_not_blocked == 1);
  }
  SUBCASE("edge kept when the later endpoint blocks at once") {
    TimeVaryingGraph g{2, 1, {{Edge{0, 1}}, {Edge{0, 1}}, {}}, "hand"};
    const auto r = make_run(g, SchedulerPolicy::scripted({{0}, {1}}), 10);
    CHECK(PersistenceOracle(r.trace).must_be_in_H(0, 1, 0));
    CHECK(extract_H(r.trace, r.ports).H[0] == EdgeSet{Edge{0, 1}});
  }
  SUBCASE("two stages of overlap are enough") {
    TimeVaryingGraph g{2, 1, {{Edge{0, 1}}, {Edge{0, 1}}, {}}, "hand"};
    const auto r = make_run(g, SchedulerPolicy::scripted({{0}, {0, 1}}), 10);
    CHECK(PersistenceOracle(r.trace).must_be_in_H(0, 1, 0));
    CHECK(extract_H(r.trace, r.ports).H[0] == EdgeSet{Edge{0, 1}});
  }
  SUBCASE("churn agrees with the oracle both ways") {
    for (std::uint64_t seed = 0; seed < 15; ++seed) {
      const auto g = generate(DynamicsPolicy::random_churn(0.25, 0.25, seed), 7, 3, 150);
      const auto r = make_run(g, SchedulerPolicy::random_subset(0.5, 6, seed * 7 + 1), 150);
      const auto nt = check_strong_nontriviality(r.trace, r.ports);
      CHECK(nt.pass);
      CHECK(nt.missing.empty());
      CHECK(nt.spurious.empty());
    }
  }
}
