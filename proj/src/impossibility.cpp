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


#include "kappa/impossibility.hpp"

#include <sstream>

#include "kappa/engine.hpp"
#include "kappa/synchronizer.hpp"

namespace kappa::verify {

const char* to_string(Decision d) {
  switch (d) {
    case Decision::Undecided:
      return "undecided";
    case Decision::Zero:
      return "0";
    case Decision::One:
      return "1";
  }
  return "?";
}

namespace {

std::optional<std::uint8_t> peer(const std::vector<std::optional<Bytes>>& pulled) {
  for (const auto& s : pulled) {
    if (s) return s->empty() ? 0 : (*s)[0];
  }
  return std::nullopt;
}

// Decide 1 on first contact.
class CommitOnPropose final : public ClassicPullProtocol {
 public:
  std::string name() const override { return "commit-on-propose"; }
  Bytes init() const override { return {0}; }
  PullStep step(const Bytes& own, const std::vector<std::optional<Bytes>>& pulled) const override {
    enum : std::uint8_t { kFresh, kCommitted, kClosed };
    switch (own[0]) {
      case kFresh:
        return peer(pulled) ? PullStep{{kCommitted}, Decision::One} : PullStep{{kClosed}, Decision::Zero};
      case kCommitted:
        return {own, Decision::One};
      default:
        return {own, Decision::Zero};
    }
  }
};

// Tentative 1 that is withdrawn if the edge vanishes before the peer answers.
class RevertOnDisconnect final : public ClassicPullProtocol {
 public:
  std::string name() const override { return "revert-on-disconnect"; }
  Bytes init() const override { return {0}; }
  PullStep step(const Bytes& own, const std::vector<std::optional<Bytes>>& pulled) const override {
    enum : std::uint8_t { kFresh, kProposed, kConfirmed, kReverted };
    const auto p = peer(pulled);
    switch (own[0]) {
      case kFresh:
        if (!p) return {{kReverted}, Decision::Zero};
        return *p == kFresh ? PullStep{{kProposed}, Decision::One} : PullStep{{kConfirmed}, Decision::One};
      case kProposed:
        if (!p) return {{kReverted}, Decision::Zero};
        return *p == kFresh ? PullStep{own, Decision::One} : PullStep{{kConfirmed}, Decision::One};
      case kConfirmed:
        return {own, Decision::One};
      default:
        return {own, Decision::Zero};
    }
  }
};

// Initiator waits for an explicit ack it can only see by pulling again.
class WaitForAck final : public ClassicPullProtocol {
 public:
  std::string name() const override { return "wait-for-ack"; }
  Bytes init() const override { return {0}; }
  PullStep step(const Bytes& own, const std::vector<std::optional<Bytes>>& pulled) const override {
    enum : std::uint8_t { kFresh, kWaiting, kAcked, kCommitted, kClosed };
    const auto p = peer(pulled);
    switch (own[0]) {
      case kFresh:
        if (!p) return {{kClosed}, Decision::Zero};
        return *p == kWaiting ? PullStep{{kAcked}, Decision::One} : PullStep{{kWaiting}, Decision::Undecided};
      case kWaiting:
        if (p && *p == kAcked) return {{kCommitted}, Decision::One};
        return {own, Decision::Undecided};
      case kAcked:
      case kCommitted:
        return {own, Decision::One};
      default:
        return {own, Decision::Zero};
    }
  }
};

class NeverPropose final : public ClassicPullProtocol {
 public:
  std::string name() const override { return "never-propose"; }
  Bytes init() const override { return {0}; }
  PullStep step(const Bytes& own, const std::vector<std::optional<Bytes>>&) const override {
    return {own, Decision::Zero};
  }
};

Observation observe(const Bytes& own, const std::vector<std::optional<Bytes>>& pulled) {
  Observation o{1};
  o.push_back(static_cast<std::uint8_t>(own.size()));
  o.insert(o.end(), own.begin(), own.end());
  for (const auto& s : pulled) {
    if (!s) {
      o.push_back(0);
      continue;
    }
    o.push_back(1);
    o.push_back(static_cast<std::uint8_t>(s->size()));
    o.insert(o.end(), s->begin(), s->end());
  }
  return o;
}

bool edge_present(Stage t) { return t < 2; }

bool active(bool exec_a, Stage t, int node) {
  if (t >= 2) return true;
  if (t == 0) return node == 0;
  return exec_a && node == 1;
}

std::string outcome_of(Decision u, Decision v) {
  if (u == Decision::Undecided || v == Decision::Undecided) return "undecided";
  if (u != v) return "disagree";
  return u == Decision::One ? "agree-1" : "agree-0";
}

PullExecution run_pull(const ClassicPullProtocol& protocol, bool exec_a, std::size_t horizon) {
  PullExecution ex;
  ex.label = exec_a ? "A" : "B";
  Bytes state[2] = {protocol.init(), protocol.init()};
  Decision decision[2] = {Decision::Undecided, Decision::Undecided};
  bool pulled_peer[2] = {false, false};
  for (Stage t = 0; t < horizon; ++t) {
    const Bytes snapshot[2] = {state[0], state[1]};
    for (int w = 0; w < 2; ++w) {
      if (!active(exec_a, t, w)) {
        if (w == 0) ex.u_observations.push_back({});
        continue;
      }
      std::vector<std::optional<Bytes>> pulled(1);
      if (edge_present(t)) {
        pulled[0] = snapshot[1 - w];
        pulled_peer[w] = true;
      }
      if (w == 0) ex.u_observations.push_back(observe(snapshot[w], pulled));
      PullStep s = protocol.step(snapshot[w], pulled);
      state[w] = std::move(s.state);
      decision[w] = s.decision;
    }
    ex.u_decisions.push_back(decision[0]);
    ex.v_decisions.push_back(decision[1]);
  }
  ex.u_final = decision[0];
  ex.v_final = decision[1];
  ex.mutually_observed = pulled_peer[0] && pulled_peer[1];
  ex.outcome = outcome_of(ex.u_final, ex.v_final);
  return ex;
}

HandshakeExecution run_handshake(bool exec_a, std::size_t horizon, std::vector<Bytes>& u_states) {
  TimeVaryingGraph g;
  g.n = 2;
  g.delta = 1;
  g.stages = {{Edge{0, 1}}, {Edge{0, 1}}, {}};
  g.generator_meta = "edge-agreement demo";
  const PortAssignment ports = assign_ports(g);
  const auto sched = SchedulerPolicy::scripted(exec_a ? std::vector<std::vector<NodeId>>{{0}, {1}}
                                                      : std::vector<std::vector<NodeId>>{{0}, {}});
  EngineOptions opts;
  opts.on_stage_end = [&](Stage, const std::vector<NodeState>& states) { u_states.push_back(encode_memory(states[0])); };
  CounterAlgo algo;
  const RunTrace trace = run(g, ports, sched, algo, {}, horizon, opts);

  HandshakeExecution ex;
  ex.label = exec_a ? "A" : "B";
  if (trace.completed_phases(0) == 0 || trace.completed_phases(1) == 0) {
    throw InvariantViolation("handshake demo: a node never finished phase 0");
  }
  ex.u_F = trace.phases[0][0].F;
  ex.v_F = trace.phases[1][0].F;
  const Decision du = ex.u_F.empty() ? Decision::Zero : Decision::One;
  const Decision dv = ex.v_F.empty() ? Decision::Zero : Decision::One;
  ex.outcome = outcome_of(du, dv);
  return ex;
}

std::string set_string(PortSet s) {
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

std::unique_ptr<ClassicPullProtocol> make_protocol(std::string_view name) {
  if (name == "commit-on-propose") return std::make_unique<CommitOnPropose>();
  if (name == "revert-on-disconnect") return std::make_unique<RevertOnDisconnect>();
  if (name == "wait-for-ack") return std::make_unique<WaitForAck>();
  if (name == "never-propose") return std::make_unique<NeverPropose>();
  throw InvalidScenario("unknown protocol '" + std::string(name) + "'");
}

std::vector<std::string> protocol_names() {
  return {"commit-on-propose", "revert-on-disconnect", "wait-for-ack", "never-propose"};
}

ImpossibilityRecord impossibility_demo(const ClassicPullProtocol& protocol, std::size_t horizon) {
  if (horizon < 3) throw InvalidScenario("demo horizon must cover the disconnect (>= 3 stages)");
  ImpossibilityRecord r;
  r.protocol = protocol.name();
  r.horizon = horizon;
  r.a = run_pull(protocol, true, horizon);
  r.b = run_pull(protocol, false, horizon);

  r.observations_identical = true;
  for (Stage t = 0; t < horizon; ++t) {
    if (r.a.u_observations[t] != r.b.u_observations[t]) {
      r.observations_identical = false;
      r.first_observation_difference = t;
      break;
    }
  }
  if (r.observations_identical && r.a.u_decisions != r.b.u_decisions) {
    throw InvariantViolation("protocol " + r.protocol + " is not observation-driven");
  }

  std::vector<std::string> failures;
  if (r.a.outcome == "disagree") failures.push_back("agreement violated in A");
  if (r.a.outcome == "undecided") failures.push_back("no decision in A");
  if (r.b.outcome == "disagree") failures.push_back("agreement violated in B");
  if (r.b.outcome == "undecided") failures.push_back("no decision in B");
  if (r.a.outcome == "agree-0" && r.a.mutually_observed) failures.push_back("trivial: mutually observed edge dropped in A");
  r.dilemma = r.observations_identical && !failures.empty();
  std::ostringstream v;
  for (std::size_t k = 0; k < failures.size(); ++k) v << (k ? "; " : "") << failures[k];
  r.verdict = failures.empty() ? "no failure observed" : v.str();
  return r;
}

HandshakeDemo kappa_handshake_demo(std::size_t horizon) {
  if (horizon < 4) throw InvalidScenario("demo horizon must be >= 4 stages");
  HandshakeDemo d;
  d.horizon = horizon;
  std::vector<Bytes> ua;
  std::vector<Bytes> ub;
  d.a = run_handshake(true, horizon, ua);
  d.b = run_handshake(false, horizon, ub);
  for (Stage t = 0; t < horizon; ++t) {
    if (ua[t] != ub[t]) {
      d.a.first_u_difference = d.b.first_u_difference = t;
      break;
    }
  }
  d.consistent = d.a.outcome.starts_with("agree") && d.b.outcome.starts_with("agree");
  return d;
}

std::string render(const ImpossibilityRecord& r) {
  std::ostringstream out;
  out << kImpossibilityHeader << '\n';
  out << "protocol " << r.protocol << " horizon=" << r.horizon << '\n';
  for (const PullExecution* ex : {&r.a, &r.b}) {
    out << "execution " << ex->label << " u=" << to_string(ex->u_final) << " v=" << to_string(ex->v_final)
        << " outcome=" << ex->outcome << " mutually_observed=" << (ex->mutually_observed ? "yes" : "no") << '\n';
    out << "  u-observations";
    for (const Observation& o : ex->u_observations) out << ' ' << (o.empty() ? "-" : to_hex(o));
    out << '\n';
  }
  out << "u-observations identical=" << (r.observations_identical ? "yes" : "no");
  if (r.first_observation_difference) out << " first_difference=" << *r.first_observation_difference;
  out << '\n';
  out << "verdict " << r.verdict << '\n';
  out << "dilemma " << (r.dilemma ? "FORCED" : "NOT-SHOWN") << '\n';
  return out.str();
}

std::string render(const HandshakeDemo& d) {
  std::ostringstream out;
  out << kImpossibilityHeader << '\n';
  out << "protocol kappa-handshake (block registers) horizon=" << d.horizon << '\n';
  for (const HandshakeExecution* ex : {&d.a, &d.b}) {
    out << "execution " << ex->label << " u.F0=" << set_string(ex->u_F) << " v.F0=" << set_string(ex->v_F)
        << " outcome=" << ex->outcome << '\n';
  }
  out << "u-local-state first_difference=";
  if (d.a.first_u_difference) {
    out << *d.a.first_u_difference;
  } else {
    out << "none";
  }
  out << '\n';
  out << "dilemma " << (d.consistent ? "AVOIDED" : "NOT-AVOIDED") << '\n';
  return out.str();
}

}  // namespace kappa::verify
