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

// Semi-synchronous execution engine.
//
// Each stage: the stage's edge set takes effect and boundary disconnections
// are folded into the per-node detectors; the scheduler picks the activation
// set; every activated node runs its unique enabled action against the
// stage-start snapshot; local states are replaced, remote block writes are
// delivered, and the detectors of the activated nodes are cleared.

#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "kappa/algorithms.hpp"
#include "kappa/rng.hpp"
#include "kappa/synchronizer.hpp"
#include "kappa/tvg.hpp"

namespace kappa {

struct SchedulerPolicy {
  enum class Kind { AllActive, RandomSubset, Sequential, Scripted };

  Kind kind = Kind::AllActive;
  double p_activate = 0.5;
  /// Random-subset force-activates a node once it has gone this many stages
  /// without activation. Other kinds ignore it.
  std::size_t fairness_bound = 1;
  /// Scripted activation sets; stages past the end activate every node.
  std::vector<std::vector<NodeId>> script;
  std::uint64_t seed = 0;

  static SchedulerPolicy all_active() { return {}; }
  static SchedulerPolicy random_subset(double p, std::size_t bound, std::uint64_t seed) {
    SchedulerPolicy s;
    s.kind = Kind::RandomSubset;
    s.p_activate = p;
    s.fairness_bound = bound;
    s.seed = seed;
    return s;
  }
  static SchedulerPolicy sequential() {
    SchedulerPolicy s;
    s.kind = Kind::Sequential;
    return s;
  }
  static SchedulerPolicy scripted(std::vector<std::vector<NodeId>> sets) {
    SchedulerPolicy s;
    s.kind = Kind::Scripted;
    s.script = std::move(sets);
    return s;
  }

  std::string describe() const;
};

/// Stateful activation-set generator for one run.
class Scheduler {
 public:
  Scheduler(SchedulerPolicy policy, std::size_t n);

  /// Sorted activation set for stage t. Must be called for t = 0, 1, ...
  std::vector<NodeId> select(Stage t);

 private:
  SchedulerPolicy policy_;
  std::size_t n_;
  Rng rng_;
  std::vector<std::optional<Stage>> last_;
};

struct WriteEvent {
  NodeId writer = 0;
  NodeId target = 0;
  Port target_port = 0;

  friend bool operator==(const WriteEvent&, const WriteEvent&) = default;
};

struct StageRecord {
  Stage t = 0;
  std::vector<Phase> phases_at_start;
  std::vector<NodeId> active;
  std::vector<ActionKind> actions;  // parallel to `active`
  std::vector<WriteEvent> writes;
  std::vector<std::pair<NodeId, PortSet>> disconnects;  // ports folded into detectors at this boundary
};

/// One completed phase of one node, written when its ExecuteSynch runs.
struct PhaseRecord {
  Phase phase = 0;
  Stage first_activation = 0;  // first stage the node was activated in this phase
  Stage execute_stage = 0;
  PortSet P;
  PortSet I;
  PortSet Dtilde;  // as seen by the ExecuteSynch guard
  PortSet F;
  Bytes state_before;
  Bytes state_after;
  std::vector<std::pair<Port, Bytes>> consumed;  // pulled algorithm states fed to the step
};

struct FinalNodeRecord {
  Phase phase = 0;
  bool synch = false;
  std::optional<Stage> open_phase_start;  // first activation of the unfinished phase
  PortSet P;
  PortSet Dtilde;
  PortSet blocked;
  ActionKind enabled = ActionKind::Handshake;
};

struct RunTrace {
  static constexpr const char* kSchema = "kappa-trace/1";

  TimeVaryingGraph graph;
  std::size_t horizon = 0;
  std::size_t overrun_stages = 0;  // stages past the graph lifetime (last edge set frozen)
  std::string algorithm;
  std::vector<Input> inputs;
  std::string scheduler;
  std::size_t fairness_bound = 0;

  std::vector<StageRecord> stages;
  std::vector<std::vector<PhaseRecord>> phases;  // per node, in phase order
  std::vector<FinalNodeRecord> final_nodes;

  std::size_t n() const { return graph.n; }
  Phase completed_phases(NodeId u) const { return phases[u].size(); }
  Phase min_completed_phases() const;
};

struct ActivationEvent {
  Stage t;
  NodeId node;
  ActionKind kind;
  const NodeState& before;
  const NodeState& after;  // before remote writes of the same stage land
  PortSet detector;
};

struct EngineOptions {
  Faults faults;
  /// Replace stored views by `retained_view` after every activation.
  bool compact_views = false;
  std::function<void(const ActivationEvent&)> on_activation;
  /// Called with all node states at the end of every stage.
  std::function<void(Stage, const std::vector<NodeState>&)> on_stage_end;
};

RunTrace run(const TimeVaryingGraph& graph, const PortAssignment& ports, const SchedulerPolicy& scheduler,
             const SyncAlgorithm& algo, const std::vector<Input>& inputs, std::size_t horizon,
             const EngineOptions& options = {});

struct FairnessVerdict {
  bool ok = false;
  std::size_t max_gap = 0;
  NodeId worst_node = 0;
};

/// Largest number of stages between consecutive activations of a node,
/// counting from a virtual activation at stage -1 and up to the horizon.
FairnessVerdict fairness_audit(const RunTrace& trace, std::size_t bound);

}  // namespace kappa
