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

#include "kappa/engine.hpp"

#include <algorithm>
#include <sstream>

namespace kappa {

std::string SchedulerPolicy::describe() const {
  std::ostringstream out;
  switch (kind) {
    case Kind::AllActive:
      out << "all-active";
      break;
    case Kind::RandomSubset:
      out << "random-subset p_activate=" << p_activate << " fairness_bound=" << fairness_bound << " seed=" << seed;
      break;
    case Kind::Sequential:
      out << "sequential";
      break;
    case Kind::Scripted:
      out << "scripted stages=" << script.size();
      break;
  }
  return out.str();
}

Scheduler::Scheduler(SchedulerPolicy policy, std::size_t n)
    : policy_(std::move(policy)), n_(n), rng_(policy_.seed), last_(n) {
  if (policy_.kind == SchedulerPolicy::Kind::RandomSubset) {
    if (policy_.fairness_bound == 0) throw InvalidScenario("fairness bound must be >= 1");
    if (policy_.p_activate < 0 || policy_.p_activate > 1) throw InvalidScenario("p_activate must lie in [0, 1]");
  }
  if (policy_.kind == SchedulerPolicy::Kind::Scripted) {
    for (std::size_t t = 0; t < policy_.script.size(); ++t) {
      for (NodeId u : policy_.script[t]) {
        if (u >= n_) {
          throw InvalidScenario("scripted activation at stage " + std::to_string(t) + " names unknown node " +
                                std::to_string(u));
        }
      }
    }
  }
}

std::vector<NodeId> Scheduler::select(Stage t) {
  std::vector<NodeId> active;
  switch (policy_.kind) {
    case SchedulerPolicy::Kind::AllActive:
      for (NodeId u = 0; u < n_; ++u) active.push_back(u);
      break;
    case SchedulerPolicy::Kind::RandomSubset:
      for (NodeId u = 0; u < n_; ++u) {
        // Draw for every node so the stream does not depend on forcing.
        const bool coin = rng_.bernoulli(policy_.p_activate);
        const Stage gap = last_[u] ? t - *last_[u] : t + 1;
        if (coin || gap >= policy_.fairness_bound) active.push_back(u);
      }
      break;
    case SchedulerPolicy::Kind::Sequential:
      active.push_back(static_cast<NodeId>(t % n_));
      break;
    case SchedulerPolicy::Kind::Scripted:
      if (t < policy_.script.size()) {
        active = policy_.script[t];
        std::sort(active.begin(), active.end());
        active.erase(std::unique(active.begin(), active.end()), active.end());
      } else {
        for (NodeId u = 0; u < n_; ++u) active.push_back(u);
      }
      break;
  }
  for (NodeId u : active) last_[u] = t;
  return active;
}

Phase RunTrace::min_completed_phases() const {
  Phase m = ~Phase{0};
  for (const auto& ph : phases) m = std::min<Phase>(m, ph.size());
  return phases.empty() ? 0 : m;
}

namespace {

PulledView view_of(const NodeState& neighbor, PortSet neighbor_detector, Port neighbor_port) {
  PulledView v;
  v.phase = neighbor.phase;
  v.synch = neighbor.synch;
  v.P = neighbor.P;
  v.Dtilde = neighbor.Dtilde;
  v.D = neighbor_detector;
  v.port_label = neighbor_port;
  v.ack = neighbor.ports[neighbor_port].ack;
  v.algo_state = neighbor.algo_state;
  return v;
}

}  // namespace

RunTrace run(const TimeVaryingGraph& graph, const PortAssignment& ports, const SchedulerPolicy& scheduler,
             const SyncAlgorithm& algo, const std::vector<Input>& inputs, std::size_t horizon,
             const EngineOptions& options) {
  graph.validate();
  const std::size_t n = graph.n;
  if (ports.n() != n || ports.delta() != graph.delta) throw InvalidScenario("port assignment does not match graph");
  if (!inputs.empty() && inputs.size() != n) throw InvalidScenario("inputs must cover every node");
  if (horizon == 0) throw InvalidScenario("horizon must be >= 1");

  RunTrace trace;
  trace.graph = graph;
  trace.horizon = horizon;
  trace.overrun_stages = horizon > graph.lifetime() ? horizon - graph.lifetime() : 0;
  trace.algorithm = algo.name();
  trace.inputs = inputs;
  trace.scheduler = scheduler.describe();
  trace.fairness_bound = scheduler.kind == SchedulerPolicy::Kind::RandomSubset ? scheduler.fairness_bound : 0;
  trace.phases.resize(n);
  trace.stages.reserve(horizon);

  std::vector<NodeState> states;
  states.reserve(n);
  for (NodeId u = 0; u < n; ++u) {
    states.push_back(NodeState::initial(graph.delta, algo.init(u, inputs.empty() ? Input{} : inputs[u])));
  }
  std::vector<PortSet> detectors(n);
  std::vector<std::optional<Stage>> phase_start(n);
  Scheduler sched(scheduler, n);

  for (Stage t = 0; t < horizon; ++t) {
    StageRecord rec;
    rec.t = t;
    if (t > 0) {
      const auto lost = disconnections_at(graph, ports, t);
      for (NodeId u = 0; u < n; ++u) {
        if (lost[u].empty()) continue;
        detectors[u] |= lost[u];
        rec.disconnects.emplace_back(u, lost[u]);
      }
    }
    rec.phases_at_start.reserve(n);
    for (const NodeState& s : states) {
      enabled_action(s);  // throws unless exactly one guard holds
      rec.phases_at_start.push_back(s.phase);
    }

    rec.active = sched.select(t);
    const std::vector<NodeState> snapshot = states;
    const std::vector<PortSet> detector_snapshot = detectors;
    std::vector<bool> executed(n, false);

    for (NodeId u : rec.active) {
      const NodeState& before = snapshot[u];
      const ActionKind kind = enabled_action(before);
      rec.actions.push_back(kind);
      NodeState after;

      if (kind == ActionKind::Handshake) {
        NeighborReads reads(graph.delta);
        for (Port p : ports.occupied(t, u).to_vector()) {
          const NodeId v = *ports.neighbor(t, u, p);
          const Port back = *ports.port_of(t, v, u);
          reads[p] = view_of(snapshot[v], detector_snapshot[v], back);
        }
        if (!before.synch) phase_start[u] = t;
        HandshakeResult res = handshake(before, reads, detector_snapshot[u], options.faults);
        for (const BlockWrite& w : res.writes) {
          const auto target = ports.neighbor(t, u, w.via);
          if (!target) throw ProtocolViolation("block write through unoccupied port");
          if (snapshot[*target].phase != before.phase) {
            throw InvariantViolation("block write across phases at stage " + std::to_string(t));
          }
          rec.writes.push_back(WriteEvent{u, *target, w.remote_port});
        }
        after = std::move(res.state);
      } else {
        if (!phase_start[u]) throw InvariantViolation("execute without a phase start");
        after = execute_synch(before, algo);
        executed[u] = true;
        PhaseRecord pr;
        pr.phase = before.phase;
        pr.first_activation = *phase_start[u];
        pr.execute_stage = t;
        pr.P = before.P;
        pr.I = before.I;
        pr.Dtilde = before.Dtilde;
        pr.F = after.F;
        pr.state_before = before.algo_state;
        pr.state_after = after.algo_state;
        for (Port p : after.F.to_vector()) pr.consumed.emplace_back(p, before.pulled[p]->algo_state);
        trace.phases[u].push_back(std::move(pr));
        phase_start[u].reset();
      }

      if (options.compact_views) after = compact(std::move(after));
      if (options.on_activation) options.on_activation(ActivationEvent{t, u, kind, before, after, detector_snapshot[u]});
      states[u] = std::move(after);
    }

    for (const WriteEvent& w : rec.writes) {
      if (executed[w.target]) {
        throw InvariantViolation("block write landed on a node that finished its phase at stage " + std::to_string(t));
      }
      states[w.target] = apply_remote_block(std::move(states[w.target]), w.target_port);
    }
    for (NodeId u : rec.active) detectors[u].clear();

    trace.stages.push_back(std::move(rec));
    if (options.on_stage_end) options.on_stage_end(t, states);
  }

  trace.final_nodes.reserve(n);
  for (NodeId u = 0; u < n; ++u) {
    const NodeState& s = states[u];
    FinalNodeRecord f;
    f.phase = s.phase;
    f.synch = s.synch;
    f.open_phase_start = phase_start[u];
    f.P = s.P;
    f.Dtilde = s.Dtilde;
    f.blocked = s.blocked();
    f.enabled = enabled_action(s);
    trace.final_nodes.push_back(f);
  }
  return trace;
}

FairnessVerdict fairness_audit(const RunTrace& trace, std::size_t bound) {
  const std::size_t n = trace.n();
  std::vector<std::int64_t> last(n, -1);
  FairnessVerdict v;
  auto note = [&](NodeId u, std::int64_t t) {
    const auto gap = static_cast<std::size_t>(t - last[u]);
    if (gap > v.max_gap) {
      v.max_gap = gap;
      v.worst_node = u;
    }
    last[u] = t;
  };
  for (const StageRecord& rec : trace.stages) {
    for (NodeId u : rec.active) note(u, static_cast<std::int64_t>(rec.t));
  }
  for (NodeId u = 0; u < n; ++u) note(u, static_cast<std::int64_t>(trace.stages.size()));
  v.ok = v.max_gap <= bound;
  return v;
}

}  // namespace kappa
