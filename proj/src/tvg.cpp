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

#include "kappa/tvg.hpp"

#include <algorithm>
#include <sstream>

#include "kappa/rng.hpp"

namespace kappa {

const EdgeSet& TimeVaryingGraph::edges_at(Stage t) const {
  static const EdgeSet kEmpty;
  if (stages.empty()) return kEmpty;
  return stages[std::min(t, stages.size() - 1)];
}

bool TimeVaryingGraph::has_edge(Stage t, NodeId u, NodeId v) const { return contains(edges_at(t), make_edge(u, v)); }

void validate_edge_set(const EdgeSet& edges, std::size_t n, std::size_t delta, std::string_view what) {
  for (const Edge& e : edges) {
    if (e.a == e.b || e.a >= n || e.b >= n) {
      std::ostringstream msg;
      msg << what << ": edge (" << e.a << "," << e.b << ") is a self-loop or out of range for n=" << n;
      throw InvalidScenario(msg.str());
    }
  }
  const auto deg = degrees(edges, n);
  for (std::size_t u = 0; u < n; ++u) {
    if (deg[u] > delta) {
      std::ostringstream msg;
      msg << what << ": node " << u << " has degree " << deg[u] << " > delta=" << delta;
      throw InvalidScenario(msg.str());
    }
  }
}

void TimeVaryingGraph::validate() const {
  if (n == 0) throw InvalidScenario("graph must have at least one node");
  if (delta == 0 || delta > PortSet::kMaxPorts) throw InvalidScenario("delta must be in [1, 64]");
  for (std::size_t t = 0; t < stages.size(); ++t) {
    if (!std::is_sorted(stages[t].begin(), stages[t].end()) ||
        std::adjacent_find(stages[t].begin(), stages[t].end()) != stages[t].end()) {
      throw InvalidScenario("stage " + std::to_string(t) + " is not a normalized edge set");
    }
    validate_edge_set(stages[t], n, delta, "stage " + std::to_string(t));
  }
}

namespace {

EdgeSet churn_step(const EdgeSet& previous, std::size_t n, std::size_t delta, double p_drop, double p_add, Rng& rng) {
  EdgeSet kept;
  for (const Edge& e : previous) {
    if (!rng.bernoulli(p_drop)) kept.push_back(e);
  }
  auto deg = degrees(kept, n);
  EdgeSet candidates;
  for (NodeId u = 0; u < n; ++u) {
    for (NodeId v = u + 1; v < n; ++v) {
      if (!contains(kept, Edge{u, v})) candidates.push_back(Edge{u, v});
    }
  }
  rng.shuffle(candidates);
  EdgeSet next = kept;
  for (const Edge& e : candidates) {
    if (!rng.bernoulli(p_add)) continue;
    if (deg[e.a] >= delta || deg[e.b] >= delta) continue;
    ++deg[e.a];
    ++deg[e.b];
    next.push_back(e);
  }
  return normalize(std::move(next));
}

}  // namespace

TimeVaryingGraph generate(const DynamicsPolicy& policy, std::size_t n, std::size_t delta, std::size_t t_max,
                          const EdgeSet& initial) {
  TimeVaryingGraph g;
  g.n = n;
  g.delta = delta;
  if (n == 0) throw InvalidScenario("n must be >= 1");
  if (delta == 0 || delta > PortSet::kMaxPorts) throw InvalidScenario("delta must be in [1, 64]");

  switch (policy.kind) {
    case DynamicsPolicy::Kind::Static: {
      if (t_max == 0) throw InvalidScenario("t_max must be >= 1");
      const EdgeSet start = normalize(initial);
      validate_edge_set(start, n, delta, "initial edge set");
      g.stages.assign(t_max, start);
      g.generator_meta = "static";
      break;
    }
    case DynamicsPolicy::Kind::RandomChurn: {
      if (t_max == 0) throw InvalidScenario("t_max must be >= 1");
      if (policy.p_drop < 0 || policy.p_drop > 1 || policy.p_add < 0 || policy.p_add > 1) {
        throw InvalidScenario("churn probabilities must lie in [0, 1]");
      }
      EdgeSet current = normalize(initial);
      validate_edge_set(current, n, delta, "initial edge set");
      Rng rng(policy.seed);
      g.stages.reserve(t_max);
      g.stages.push_back(current);
      for (std::size_t t = 1; t < t_max; ++t) {
        current = churn_step(current, n, delta, policy.p_drop, policy.p_add, rng);
        g.stages.push_back(current);
      }
      std::ostringstream meta;
      meta << "random-churn p_drop=" << policy.p_drop << " p_add=" << policy.p_add << " seed=" << policy.seed;
      g.generator_meta = meta.str();
      break;
    }
    case DynamicsPolicy::Kind::Scripted: {
      if (policy.script.empty()) throw InvalidScenario("scripted dynamics needs at least one stage");
      for (std::size_t t = 0; t < policy.script.size(); ++t) {
        EdgeSet stage = normalize(policy.script[t]);
        validate_edge_set(stage, n, delta, "scripted stage " + std::to_string(t));
        g.stages.push_back(std::move(stage));
      }
      g.generator_meta = "scripted";
      break;
    }
  }
  return g;
}

PortAssignment assign_ports(const TimeVaryingGraph& graph) {
  graph.validate();
  PortAssignment pa;
  pa.n_ = graph.n;
  pa.delta_ = graph.delta;
  pa.stage_count_ = std::max<std::size_t>(graph.lifetime(), 1);
  pa.table_.assign(pa.stage_count_ * pa.n_ * pa.delta_, PortAssignment::kFree);

  for (std::size_t t = 0; t < pa.stage_count_; ++t) {
    const EdgeSet& edges = graph.edges_at(t);
    std::vector<std::vector<NodeId>> adjacency(graph.n);
    for (const Edge& e : edges) {
      adjacency[e.a].push_back(e.b);
      adjacency[e.b].push_back(e.a);
    }
    for (NodeId u = 0; u < graph.n; ++u) {
      std::uint32_t* row = &pa.table_[(t * pa.n_ + u) * pa.delta_];
      auto& nbrs = adjacency[u];
      std::sort(nbrs.begin(), nbrs.end());
      std::vector<NodeId> fresh;
      if (t > 0) {
        const std::uint32_t* prev = &pa.table_[((t - 1) * pa.n_ + u) * pa.delta_];
        for (NodeId v : nbrs) {
          const auto* it = std::find(prev, prev + pa.delta_, v);
          if (it != prev + pa.delta_) {
            row[it - prev] = v;
          } else {
            fresh.push_back(v);
          }
        }
      } else {
        fresh = nbrs;
      }
      Port next_free = 0;
      for (NodeId v : fresh) {
        while (row[next_free] != PortAssignment::kFree) ++next_free;
        row[next_free] = v;
      }
    }
  }
  return pa;
}

std::optional<NodeId> PortAssignment::neighbor(Stage t, NodeId u, Port p) const {
  if (stage_count_ == 0 || u >= n_ || p >= delta_) return std::nullopt;
  const std::uint32_t v = at(t, u, p);
  if (v == kFree) return std::nullopt;
  return v;
}

std::optional<Port> PortAssignment::port_of(Stage t, NodeId u, NodeId v) const {
  if (stage_count_ == 0 || u >= n_) return std::nullopt;
  for (Port p = 0; p < delta_; ++p) {
    if (at(t, u, p) == v) return p;
  }
  return std::nullopt;
}

PortSet PortAssignment::occupied(Stage t, NodeId u) const {
  PortSet s;
  if (stage_count_ == 0 || u >= n_) return s;
  for (Port p = 0; p < delta_; ++p) {
    if (at(t, u, p) != kFree) s.insert(p);
  }
  return s;
}

std::vector<PortSet> disconnections_at(const TimeVaryingGraph& graph, const PortAssignment& ports, Stage t) {
  std::vector<PortSet> out(graph.n);
  if (t == 0) return out;
  for (NodeId u = 0; u < graph.n; ++u) {
    for (Port p : ports.occupied(t - 1, u).to_vector()) {
      const NodeId v = *ports.neighbor(t - 1, u, p);
      if (!graph.has_edge(t, u, v)) out[u].insert(p);
    }
  }
  return out;
}

}  // namespace kappa
