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

// Time-varying graphs: a fixed node set, one edge set per stage, and the
// port labels through which anonymous nodes see their incident edges.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "kappa/common.hpp"

namespace kappa {

struct TimeVaryingGraph {
  std::size_t n = 0;
  std::size_t delta = 0;
  std::vector<EdgeSet> stages;
  std::string generator_meta;

  std::size_t lifetime() const { return stages.size(); }

  /// Edge set of stage t. Stages past the lifetime repeat the last set.
  const EdgeSet& edges_at(Stage t) const;
  bool has_edge(Stage t, NodeId u, NodeId v) const;

  /// Throws InvalidScenario if an edge is out of range, a self-loop, or
  /// pushes some node past delta.
  void validate() const;
};

/// Validates one edge set against the node range and degree bound.
void validate_edge_set(const EdgeSet& edges, std::size_t n, std::size_t delta, std::string_view what);

struct DynamicsPolicy {
  enum class Kind { Static, RandomChurn, Scripted };

  Kind kind = Kind::Static;
  double p_drop = 0.0;
  double p_add = 0.0;
  std::vector<EdgeSet> script;
  std::uint64_t seed = 0;

  static DynamicsPolicy make_static() { return {}; }
  static DynamicsPolicy random_churn(double p_drop, double p_add, std::uint64_t seed) {
    DynamicsPolicy p;
    p.kind = Kind::RandomChurn;
    p.p_drop = p_drop;
    p.p_add = p_add;
    p.seed = seed;
    return p;
  }
  static DynamicsPolicy scripted(std::vector<EdgeSet> stages) {
    DynamicsPolicy p;
    p.kind = Kind::Scripted;
    p.script = std::move(stages);
    return p;
  }
};

/// Produces t_max stages. Static and random-churn start from `initial`;
/// scripted copies the script verbatim (t_max is ignored there).
TimeVaryingGraph generate(const DynamicsPolicy& policy, std::size_t n, std::size_t delta, std::size_t t_max,
                          const EdgeSet& initial = {});

/// Port labels per stage and node. Persistent edges keep their port; new
/// edges take the lowest free port, in ascending neighbor order.
class PortAssignment {
 public:
  PortAssignment() = default;

  std::size_t n() const { return n_; }
  std::size_t delta() const { return delta_; }
  std::size_t stages() const { return stage_count_; }

  /// Neighbor behind port p of node u at stage t (stages past the end repeat
  /// the last one).
  std::optional<NodeId> neighbor(Stage t, NodeId u, Port p) const;
  std::optional<Port> port_of(Stage t, NodeId u, NodeId v) const;
  PortSet occupied(Stage t, NodeId u) const;

  friend PortAssignment assign_ports(const TimeVaryingGraph& graph);

 private:
  static constexpr std::uint32_t kFree = ~std::uint32_t{0};

  std::size_t clamp(Stage t) const { return t < stage_count_ ? t : stage_count_ - 1; }
  std::uint32_t at(Stage t, NodeId u, Port p) const { return table_[(clamp(t) * n_ + u) * delta_ + p]; }

  std::size_t n_ = 0;
  std::size_t delta_ = 0;
  std::size_t stage_count_ = 0;
  std::vector<std::uint32_t> table_;
};

PortAssignment assign_ports(const TimeVaryingGraph& graph);

/// For every node, the ports occupied at t-1 whose edge is gone at t.
std::vector<PortSet> disconnections_at(const TimeVaryingGraph& graph, const PortAssignment& ports, Stage t);

}  // namespace kappa
