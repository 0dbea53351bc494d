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

#include "doctest.h"
#include "kappa/tvg.hpp"

using namespace kappa;

namespace {

EdgeSet triangle() { return {Edge{0, 1}, Edge{0, 2}, Edge{1, 2}}; }

std::size_t max_degree(const EdgeSet& edges, std::size_t n) {
  std::size_t best = 0;
  for (std::size_t d : degrees(edges, n)) best = std::max(best, d);
  return best;
}

}  // namespace

TEST_CASE("static policy copies the initial set") {
  const auto g = generate(DynamicsPolicy::make_static(), 3, 2, 5, triangle());
  REQUIRE(g.lifetime() == 5);
  for (Stage t = 0; t < 5; ++t) CHECK(g.stages[t] == triangle());
}

TEST_CASE("scripted policy is copied verbatim") {
  const auto g = generate(DynamicsPolicy::scripted({{}, {Edge{0, 1}}}), 2, 1, 0);
  REQUIRE(g.lifetime() == 2);
  CHECK(g.stages[0].empty());
  CHECK(g.stages[1] == EdgeSet{Edge{0, 1}});
}

TEST_CASE("random churn respects the degree bound at every stage") {
  const auto g = generate(DynamicsPolicy::random_churn(0.5, 0.5, 7), 6, 2, 100);
  REQUIRE(g.lifetime() == 100);
  std::size_t changes = 0;
  for (Stage t = 0; t < 100; ++t) {
    CHECK(max_degree(g.stages[t], 6) <= 2);
    if (t > 0 && g.stages[t] != g.stages[t - 1]) ++changes;
  }
  CHECK(changes > 10);
}

TEST_CASE("generate is reproducible and seed-sensitive") {
  const auto a = generate(DynamicsPolicy::random_churn(0.2, 0.3, 11), 8, 3, 50);
  const auto b = generate(DynamicsPolicy::random_churn(0.2, 0.3, 11), 8, 3, 50);
  const auto c = generate(DynamicsPolicy::random_churn(0.2, 0.3, 12), 8, 3, 50);
  CHECK(a.stages == b.stages);
  CHECK(a.stages != c.stages);
}

TEST_CASE("invalid graphs are rejected") {
  CHECK_THROWS_AS(generate(DynamicsPolicy::scripted({{Edge{0, 1}, Edge{0, 2}}}), 3, 1, 0), InvalidScenario);
  CHECK_THROWS_AS(generate(DynamicsPolicy::scripted({{Edge{0, 5}}}), 3, 2, 0), InvalidScenario);
  CHECK_THROWS_AS(generate(DynamicsPolicy::scripted({{Edge{1, 1}}}), 3, 2, 0), InvalidScenario);
  CHECK_THROWS_AS(generate(DynamicsPolicy::random_churn(1.5, 0.1, 0), 3, 2, 4), InvalidScenario);
}

TEST_CASE("stages past the lifetime freeze the last edge set") {
  const auto g = generate(DynamicsPolicy::scripted({{Edge{0, 1}}, {}}), 2, 1, 0);
  CHECK_FALSE(g.has_edge(7, 0, 1));
  CHECK(g.has_edge(0, 1, 0));
}

TEST_CASE("static triangle keeps its ports") {
  const auto g = generate(DynamicsPolicy::make_static(), 3, 2, 6, triangle());
  const auto ports = assign_ports(g);
  for (NodeId u = 0; u < 3; ++u) {
    for (NodeId v = 0; v < 3; ++v) {
      if (u == v) continue;
      const auto p0 = ports.port_of(0, u, v);
      REQUIRE(p0);
      for (Stage t = 1; t < 6; ++t) CHECK(ports.port_of(t, u, v) == p0);
    }
  }
}

TEST_CASE("lowest free port is reused by a new neighbor") {
  TimeVaryingGraph g{3, 1, {{Edge{0, 1}}, {}, {Edge{0, 2}}}, "hand"};
  const auto ports = assign_ports(g);
  CHECK(ports.neighbor(0, 0, 0) == NodeId{1});
  CHECK_FALSE(ports.neighbor(1, 0, 0));
  CHECK(ports.neighbor(2, 0, 0) == NodeId{2});
  CHECK(ports.port_of(2, 2, 0) == Port{0});
}

TEST_CASE("simultaneous new edges are ported by ascending neighbor") {
  TimeVaryingGraph g{3, 2, {{}, {Edge{0, 1}, Edge{0, 2}}}, "hand"};
  const auto ports = assign_ports(g);
  CHECK(ports.port_of(1, 0, 1) == Port{0});
  CHECK(ports.port_of(1, 0, 2) == Port{1});
}

TEST_CASE("port invariants hold on random churn") {
  const auto g = generate(DynamicsPolicy::random_churn(0.3, 0.4, 3), 7, 3, 80);
  const auto ports = assign_ports(g);
  for (Stage t = 0; t < 80; ++t) {
    for (NodeId u = 0; u < 7; ++u) {
      std::size_t occupied = 0;
      for (Port p = 0; p < 3; ++p) {
        const auto v = ports.neighbor(t, u, p);
        if (!v) continue;
        ++occupied;
        // Occupied ports are exactly the present edges, and symmetric.
        CHECK(g.has_edge(t, u, *v));
        const auto back = ports.port_of(t, *v, u);
        REQUIRE(back);
        CHECK(ports.neighbor(t, *v, *back) == u);
        // Persistent edges keep their port.
        if (t > 0 && g.has_edge(t - 1, u, *v)) CHECK(ports.port_of(t - 1, u, *v) == p);
      }
      CHECK(occupied == degrees(g.stages[t], 7)[u]);
    }
  }
}

TEST_CASE("disconnections") {
  SUBCASE("static graph reports nothing") {
    const auto g = generate(DynamicsPolicy::make_static(), 3, 2, 4, triangle());
    const auto ports = assign_ports(g);
    for (Stage t = 1; t < 4; ++t) {
      for (const PortSet& s : disconnections_at(g, ports, t)) CHECK(s.empty());
    }
  }
  SUBCASE("single vanishing edge") {
    TimeVaryingGraph g{2, 1, {{Edge{0, 1}}, {}}, "hand"};
    const auto ports = assign_ports(g);
    const auto d = disconnections_at(g, ports, 1);
    CHECK(d[0] == PortSet::from_bits(1));
    CHECK(d[1] == PortSet::from_bits(1));
  }
  SUBCASE("reported only at the stage it vanishes") {
    TimeVaryingGraph g{2, 1, {{Edge{0, 1}}, {Edge{0, 1}}, {}}, "hand"};
    const auto ports = assign_ports(g);
    for (const PortSet& s : disconnections_at(g, ports, 1)) CHECK(s.empty());
    for (const PortSet& s : disconnections_at(g, ports, 2)) CHECK(s.size() == 1);
  }
  SUBCASE("a port reused at once still counts as a disconnection") {
    TimeVaryingGraph g{3, 1, {{Edge{0, 1}}, {Edge{0, 2}}}, "hand"};
    const auto ports = assign_ports(g);
    const auto d = disconnections_at(g, ports, 1);
    CHECK(d[0].contains(0));
    CHECK(d[1].contains(0));
    CHECK(d[2].empty());
  }
}
