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

// Offline checkers over RunTraces. They resolve ports to nodes with the
// ground-truth PortAssignment, which node code never sees.

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "kappa/algorithms.hpp"
#include "kappa/engine.hpp"
#include "kappa/tvg.hpp"

namespace kappa::verify {

/// A node's F says an edge is in H_i but the other endpoint's F disagrees.
class SymmetryViolation : public InvariantViolation {
 public:
  SymmetryViolation(NodeId u, NodeId v, Phase phase);
  NodeId u;
  NodeId v;
  Phase phase;
};

struct ExtractedSynch {
  std::size_t n = 0;
  std::size_t delta = 0;
  std::vector<EdgeSet> H;  // H[i] for i < comparable_phases
  Phase comparable_phases = 0;
  std::size_t symmetric_pairs_checked = 0;  // includes phases past comparable_phases
};

/// Neighbor of u behind port p during u's phase-i record (resolved at the
/// phase's first activation).
NodeId resolve_port(const RunTrace& trace, const PortAssignment& ports, NodeId u, const PhaseRecord& rec, Port p);

/// Throws SymmetryViolation on any one-sided F membership.
ExtractedSynch extract_H(const RunTrace& trace, const PortAssignment& ports);

struct Divergence {
  NodeId node = 0;
  Phase phase = 0;
  Bytes semi;
  Bytes reference;
};

struct EquivalenceReport {
  bool pass = false;
  Phase phases_compared = 0;
  std::size_t states_compared = 0;
  std::vector<std::vector<bool>> matches;  // [phase][node]
  std::optional<Divergence> first_divergence;
};

EquivalenceReport check_correctness(const RunTrace& trace, const PortAssignment& ports, const SyncAlgorithm& algo,
                                    const std::vector<Input>& inputs);

struct SandwichReport {
  bool pass = true;
  std::size_t phases_checked = 0;
  std::string first_failure;
};

/// P \ D-tilde <= F <= P at every recorded ExecuteSynch.
SandwichReport check_sandwich(const RunTrace& trace);

struct PulledConsistencyReport {
  bool pass = true;
  std::size_t checked = 0;
  std::size_t unverifiable = 0;  // neighbor had not finished that phase by the horizon
  std::string first_failure;
};

/// Every algorithm state consumed over a port in F equals the neighbor's
/// state at the start of its own ExecuteSynch of the same phase.
PulledConsistencyReport check_pulled_consistency(const RunTrace& trace, const PortAssignment& ports);

struct WeakNontrivialityScenario {
  TimeVaryingGraph graph;
  SchedulerPolicy scheduler;
  std::size_t horizon = 0;
};

/// Each H_i becomes three identical stages; the script activates everyone at
/// 3i, the nodes with an H_i edge at 3i+1, and everyone at 3i+2.
WeakNontrivialityScenario build_weak_nontriviality(std::size_t n, std::size_t delta, const std::vector<EdgeSet>& H);

struct PairPhase {
  NodeId u = 0;
  NodeId v = 0;
  Phase phase = 0;
};

/// Independent ground-truth evaluator of when an edge must (and may) enter
/// H_i. It reads only activation sets, stage-start phases and edge presence.
///
/// Mutual valid persistence is evaluated with the interval starting at
/// max(t_(u,i), t_(v,i)) and ending when either node leaves phase i. An
/// edge enters H_i exactly when it stays present from min(t_(u,i), t_(v,i))
/// through a stage s2 such that one endpoint was activated at some stage
/// s1 < s2 and the other at s2, both endpoints being in phase i at the start
/// of s1 and s2.
class PersistenceOracle {
 public:
  explicit PersistenceOracle(const RunTrace& trace);

  /// First stage u is activated while in phase i.
  std::optional<Stage> phase_start(NodeId u, Phase i) const;

  /// Valid at the start of u's phase i and connected at some stage when
  /// both are in phase i, continuously since the later phase start.
  bool mutual_valid_persistent(NodeId u, NodeId v, Phase i) const;

  /// Persisted long enough for the two-stage ack/block exchange.
  bool must_be_in_H(NodeId u, NodeId v, Phase i) const;

 private:
  bool present_through(NodeId u, NodeId v, Stage from, Stage to) const;
  bool in_phase(Stage s, NodeId u, Phase i) const;
  bool valid_at_start(NodeId u, NodeId v, Phase i) const;

  const RunTrace& trace_;
  std::vector<std::vector<bool>> active_;  // [stage][node]
  std::vector<std::vector<Stage>> starts_;  // [node][phase]
};

struct NontrivialityReport {
  bool pass = false;
  std::size_t pairs_checked = 0;
  std::size_t edges_in_H = 0;
  std::size_t mutual_not_blocked = 0;  // mutually valid persistent but too briefly
  std::vector<PairPhase> missing;   // oracle says must be in H_i, extract says no
  std::vector<PairPhase> spurious;  // in H_i without the oracle's condition
  std::vector<PairPhase> not_mutual;  // in H_i but never mutually valid persistent
};

NontrivialityReport check_strong_nontriviality(const RunTrace& trace, const PortAssignment& ports);

struct LivenessReport {
  bool pass = false;
  bool monotone = true;
  Phase target = 0;
  Phase reached = 0;             // min phase after the last stage
  std::vector<Stage> r;          // r[i]: first stage whose start has min phase >= i
  std::size_t window = 0;        // stall window (harness heuristic)
  std::size_t longest_plateau = 0;
  std::vector<NodeId> stuck_nodes;
  std::string stall_detail;
};

/// Stall window used when a trace has no explicit fairness bound.
std::size_t default_fairness_bound(const RunTrace& trace);

/// Liveness window B * (delta + 2) * n * 4. A harness heuristic, not a bound
/// from the analysis.
std::size_t liveness_window(std::size_t bound, std::size_t delta, std::size_t n);

LivenessReport check_liveness(const RunTrace& trace, Phase target, std::size_t fairness_bound);

}  // namespace kappa::verify
