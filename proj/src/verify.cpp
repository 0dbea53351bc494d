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

#include "kappa/verify.hpp"

#include <algorithm>
#include <sstream>

namespace kappa::verify {

namespace {

std::string describe(PortSet s) {
  std::ostringstream out;
  out << '{';
  bool first = true;
  for (Port p : s.to_vector()) {
    out << (first ? "" : ",") << p;
    first = false;
  }
  out << '}';
  return out.str();
}

}  // namespace

SymmetryViolation::SymmetryViolation(NodeId u_, NodeId v_, Phase phase_)
    : InvariantViolation("one-sided H membership: node " + std::to_string(u_) + " holds node " + std::to_string(v_) +
                         " in F of phase " + std::to_string(phase_) + " but not vice versa"),
      u(u_),
      v(v_),
      phase(phase_) {}

NodeId resolve_port(const RunTrace&, const PortAssignment& ports, NodeId u, const PhaseRecord& rec, Port p) {
  const auto v = ports.neighbor(rec.first_activation, u, p);
  if (!v) {
    throw InvariantViolation("node " + std::to_string(u) + " phase " + std::to_string(rec.phase) + ": port " +
                             std::to_string(p) + " was not occupied at the phase start");
  }
  return *v;
}

ExtractedSynch extract_H(const RunTrace& trace, const PortAssignment& ports) {
  const std::size_t n = trace.n();
  ExtractedSynch out;
  out.n = n;
  out.delta = trace.graph.delta;
  out.comparable_phases = trace.min_completed_phases();
  out.H.resize(out.comparable_phases);

  for (NodeId u = 0; u < n; ++u) {
    for (const PhaseRecord& rec : trace.phases[u]) {
      const Phase i = rec.phase;
      for (Port p : rec.F.to_vector()) {
        const NodeId v = resolve_port(trace, ports, u, rec, p);
        if (trace.completed_phases(v) <= i) {
          // v never finished phase i. Only possible past the comparable
          // prefix; such an edge cannot be confirmed either way.
          if (i < out.comparable_phases) throw SymmetryViolation(u, v, i);
          continue;
        }
        const PhaseRecord& other = trace.phases[v][i];
        bool reciprocal = false;
        for (Port q : other.F.to_vector()) {
          if (resolve_port(trace, ports, v, other, q) == u) {
            reciprocal = true;
            break;
          }
        }
        if (!reciprocal) throw SymmetryViolation(u, v, i);
        ++out.symmetric_pairs_checked;
        if (i < out.comparable_phases) out.H[i].push_back(make_edge(u, v));
      }
    }
  }
  for (Phase i = 0; i < out.comparable_phases; ++i) {
    out.H[i] = normalize(std::move(out.H[i]));
    validate_edge_set(out.H[i], n, out.delta, "extracted H_" + std::to_string(i));
  }
  return out;
}

EquivalenceReport check_correctness(const RunTrace& trace, const PortAssignment& ports, const SyncAlgorithm& algo,
                                    const std::vector<Input>& inputs) {
  const ExtractedSynch synch = extract_H(trace, ports);
  const Phase m = synch.comparable_phases;
  const SyncExecution ref = reference_run(algo, trace.n(), synch.H, inputs, m);

  EquivalenceReport report;
  report.phases_compared = m;
  report.matches.assign(m, std::vector<bool>(trace.n(), false));
  for (Phase i = 0; i < m; ++i) {
    for (NodeId u = 0; u < trace.n(); ++u) {
      const PhaseRecord& rec = trace.phases[u][i];
      const bool before_ok = rec.state_before == ref.states[i][u];
      const bool after_ok = rec.state_after == ref.states[i + 1][u];
      report.matches[i][u] = before_ok && after_ok;
      report.states_compared += 2;
      if (!report.matches[i][u] && !report.first_divergence) {
        report.first_divergence = before_ok ? Divergence{u, i, rec.state_after, ref.states[i + 1][u]}
                                            : Divergence{u, i, rec.state_before, ref.states[i][u]};
      }
    }
  }
  report.pass = !report.first_divergence;
  return report;
}

SandwichReport check_sandwich(const RunTrace& trace) {
  SandwichReport report;
  for (NodeId u = 0; u < trace.n(); ++u) {
    for (const PhaseRecord& rec : trace.phases[u]) {
      ++report.phases_checked;
      const bool lower = (rec.P - rec.Dtilde).is_subset_of(rec.F);
      const bool upper = rec.F.is_subset_of(rec.P);
      if ((!lower || !upper) && report.pass) {
        report.pass = false;
        std::ostringstream msg;
        msg << "node " << u << " phase " << rec.phase << ": P=" << describe(rec.P) << " Dtilde=" << describe(rec.Dtilde)
            << " F=" << describe(rec.F);
        report.first_failure = msg.str();
      }
    }
  }
  return report;
}

PulledConsistencyReport check_pulled_consistency(const RunTrace& trace, const PortAssignment& ports) {
  PulledConsistencyReport report;
  for (NodeId u = 0; u < trace.n(); ++u) {
    for (const PhaseRecord& rec : trace.phases[u]) {
      for (const auto& [p, state] : rec.consumed) {
        const NodeId v = resolve_port(trace, ports, u, rec, p);
        if (trace.completed_phases(v) <= rec.phase) {
          ++report.unverifiable;
          continue;
        }
        ++report.checked;
        if (trace.phases[v][rec.phase].state_before != state && report.pass) {
          report.pass = false;
          report.first_failure = "node " + std::to_string(u) + " phase " + std::to_string(rec.phase) +
                                 " consumed a state of node " + std::to_string(v) +
                                 " that differs from its phase-start state";
        }
      }
    }
  }
  return report;
}

WeakNontrivialityScenario build_weak_nontriviality(std::size_t n, std::size_t delta, const std::vector<EdgeSet>& H) {
  if (H.empty()) throw InvalidScenario("H sequence must contain at least one graph");
  if (n == 0) throw InvalidScenario("n must be >= 1");
  WeakNontrivialityScenario out;
  out.graph.n = n;
  out.graph.delta = delta;
  out.graph.generator_meta = "weak-nontriviality x3";
  std::vector<NodeId> everyone(n);
  for (NodeId u = 0; u < n; ++u) everyone[u] = u;

  std::vector<std::vector<NodeId>> script;
  for (std::size_t i = 0; i < H.size(); ++i) {
    const EdgeSet h = normalize(H[i]);
    validate_edge_set(h, n, delta, "H_" + std::to_string(i));
    for (int copy = 0; copy < 3; ++copy) out.graph.stages.push_back(h);

    std::vector<NodeId> touched;
    for (const Edge& e : h) {
      touched.push_back(e.a);
      touched.push_back(e.b);
    }
    std::sort(touched.begin(), touched.end());
    touched.erase(std::unique(touched.begin(), touched.end()), touched.end());

    script.push_back(everyone);
    script.push_back(std::move(touched));
    script.push_back(everyone);
  }
  out.scheduler = SchedulerPolicy::scripted(std::move(script));
  out.horizon = out.graph.stages.size();
  return out;
}

// --- ground-truth persistence oracle ---------------------------------------

PersistenceOracle::PersistenceOracle(const RunTrace& trace) : trace_(trace), starts_(trace.n()) {
  active_.reserve(trace.stages.size());
  for (const StageRecord& rec : trace.stages) {
    std::vector<bool> row(trace.n(), false);
    for (NodeId u : rec.active) {
      row[u] = true;
      const Phase i = rec.phases_at_start[u];
      if (starts_[u].size() == i) {
        starts_[u].push_back(rec.t);
      } else if (starts_[u].size() < i) {
        throw InvariantViolation("node " + std::to_string(u) + " reached phase " + std::to_string(i) +
                                 " without being activated in an earlier phase");
      }
    }
    active_.push_back(std::move(row));
  }
}

std::optional<Stage> PersistenceOracle::phase_start(NodeId u, Phase i) const {
  if (i < starts_[u].size()) return starts_[u][i];
  return std::nullopt;
}

bool PersistenceOracle::in_phase(Stage s, NodeId u, Phase i) const {
  return s < trace_.stages.size() && trace_.stages[s].phases_at_start[u] == i;
}

bool PersistenceOracle::present_through(NodeId u, NodeId v, Stage from, Stage to) const {
  for (Stage r = from; r <= to; ++r) {
    if (!trace_.graph.has_edge(r, u, v)) return false;
  }
  return true;
}

bool PersistenceOracle::valid_at_start(NodeId u, NodeId v, Phase i) const {
  const auto a_u = phase_start(u, i);
  if (!a_u) return false;
  if (!trace_.graph.has_edge(*a_u, u, v)) return false;
  const Phase pv = trace_.stages[*a_u].phases_at_start[v];
  if (pv > i) return false;
  if (pv == i) {
    // v already started phase i: it must have seen the edge at its start
    // and kept it since.
    const auto a_v = phase_start(v, i);
    if (a_v && *a_v < *a_u && !present_through(u, v, *a_v, *a_u)) return false;
  }
  return true;
}

bool PersistenceOracle::mutual_valid_persistent(NodeId u, NodeId v, Phase i) const {
  const auto a_u = phase_start(u, i);
  const auto a_v = phase_start(v, i);
  if (!a_u || !a_v) return false;
  if (!valid_at_start(u, v, i) || !valid_at_start(v, u, i)) return false;
  const Stage later = std::max(*a_u, *a_v);
  if (!in_phase(later, u, i) || !in_phase(later, v, i)) return false;
  return present_through(u, v, std::min(*a_u, *a_v), later);
}

bool PersistenceOracle::must_be_in_H(NodeId u, NodeId v, Phase i) const {
  const auto a_u = phase_start(u, i);
  const auto a_v = phase_start(v, i);
  if (!a_u || !a_v) return false;
  const Stage from = std::min(*a_u, *a_v);
  const Stage last = trace_.stages.size();
  std::optional<Stage> first_u;
  std::optional<Stage> first_v;
  for (Stage s = from; s < last && trace_.graph.has_edge(s, u, v); ++s) {
    if (!in_phase(s, u, i) || !in_phase(s, v, i)) continue;
    const bool au = active_[s][u];
    const bool av = active_[s][v];
    if (!au && !av) continue;
    if (first_u && first_v) {
      // Both already acted, at the same earlier stage; any later activation
      // of either completes the exchange.
      return true;
    }
    if ((au && first_v && *first_v < s) || (av && first_u && *first_u < s)) return true;
    if (au && !first_u) first_u = s;
    if (av && !first_v) first_v = s;
  }
  return false;
}

NontrivialityReport check_strong_nontriviality(const RunTrace& trace, const PortAssignment& ports) {
  const ExtractedSynch synch = extract_H(trace, ports);
  const PersistenceOracle oracle(trace);
  NontrivialityReport report;
  for (Phase i = 0; i < synch.comparable_phases; ++i) {
    for (NodeId u = 0; u < trace.n(); ++u) {
      for (NodeId v = u + 1; v < trace.n(); ++v) {
        ++report.pairs_checked;
        const bool actual = contains(synch.H[i], Edge{u, v});
        const bool expected = oracle.must_be_in_H(u, v, i);
        const bool mutual = oracle.mutual_valid_persistent(u, v, i);
        if (actual) ++report.edges_in_H;
        if (expected && !actual) report.missing.push_back({u, v, i});
        if (actual && !expected) report.spurious.push_back({u, v, i});
        if (actual && !mutual) report.not_mutual.push_back({u, v, i});
        if (mutual && !actual) ++report.mutual_not_blocked;
      }
    }
  }
  report.pass = report.missing.empty() && report.spurious.empty() && report.not_mutual.empty();
  return report;
}

// --- liveness --------------------------------------------------------------

std::size_t default_fairness_bound(const RunTrace& trace) {
  if (trace.fairness_bound > 0) return trace.fairness_bound;
  return std::max<std::size_t>(1, fairness_audit(trace, 0).max_gap);
}

std::size_t liveness_window(std::size_t bound, std::size_t delta, std::size_t n) { return bound * (delta + 2) * n * 4; }

LivenessReport check_liveness(const RunTrace& trace, Phase target, std::size_t fairness_bound) {
  LivenessReport report;
  report.target = target;
  report.window = liveness_window(fairness_bound, trace.graph.delta, trace.n());

  std::vector<Phase> mins;
  mins.reserve(trace.stages.size() + 1);
  for (const StageRecord& rec : trace.stages) {
    mins.push_back(*std::min_element(rec.phases_at_start.begin(), rec.phases_at_start.end()));
  }
  Phase final_min = ~Phase{0};
  for (const FinalNodeRecord& f : trace.final_nodes) final_min = std::min(final_min, f.phase);
  mins.push_back(trace.final_nodes.empty() ? 0 : final_min);
  report.reached = mins.back();

  std::size_t plateau = 1;
  report.longest_plateau = 1;
  for (std::size_t s = 1; s < mins.size(); ++s) {
    if (mins[s] < mins[s - 1]) report.monotone = false;
    plateau = mins[s] == mins[s - 1] ? plateau + 1 : 1;
    report.longest_plateau = std::max(report.longest_plateau, plateau);
  }
  for (Phase i = 0; i <= std::min(target, report.reached); ++i) {
    const auto it = std::find_if(mins.begin(), mins.end(), [i](Phase m) { return m >= i; });
    report.r.push_back(static_cast<Stage>(it - mins.begin()));
  }

  const bool stalled = report.longest_plateau >= report.window;
  report.pass = report.monotone && report.reached >= target && !stalled;
  if (!report.pass) {
    std::ostringstream detail;
    if (!report.monotone) detail << "min phase decreased; ";
    if (stalled) detail << "no min-phase progress for " << report.longest_plateau << " stages (window " << report.window << "); ";
    for (NodeId u = 0; u < trace.final_nodes.size(); ++u) {
      const FinalNodeRecord& f = trace.final_nodes[u];
      if (f.phase != report.reached) continue;
      report.stuck_nodes.push_back(u);
      detail << "node " << u << " phase=" << f.phase << " synch=" << f.synch << " enabled=" << to_string(f.enabled)
             << " waiting_on=" << describe((f.P - f.Dtilde) - f.blocked) << "; ";
    }
    report.stall_detail = detail.str();
  }
  return report;
}

}  // namespace kappa::verify
