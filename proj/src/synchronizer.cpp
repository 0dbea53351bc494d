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

#include "kappa/synchronizer.hpp"

#include <stdexcept>
#include <string>

namespace kappa {

NodeState NodeState::initial(std::size_t delta, Bytes algo_state) {
  if (delta == 0 || delta > PortSet::kMaxPorts) throw InvalidScenario("delta must be in [1, 64]");
  NodeState s;
  s.ports.resize(delta);
  for (Port p = 0; p < delta; ++p) s.ports[p].label = p;
  s.pulled.resize(delta);
  s.algo_state = std::move(algo_state);
  return s;
}

PortSet NodeState::blocked() const {
  PortSet out;
  for (Port p = 0; p < ports.size(); ++p) {
    if (ports[p].block) out.insert(p);
  }
  return out;
}

const char* to_string(ActionKind kind) { return kind == ActionKind::Handshake ? "handshake" : "execute"; }

bool handshake_enabled(const NodeState& state) {
  if (!state.synch) return true;
  return !(state.P - state.Dtilde).is_subset_of(state.blocked());
}

bool execute_synch_enabled(const NodeState& state) {
  return state.synch && (state.P - state.Dtilde).is_subset_of(state.blocked());
}

ActionKind enabled_action(const NodeState& state) {
  const bool hs = handshake_enabled(state);
  const bool ex = execute_synch_enabled(state);
  if (hs == ex) {
    throw InvariantViolation(std::string("guards not complementary: handshake=") + (hs ? "1" : "0") +
                             " execute=" + (ex ? "1" : "0"));
  }
  return hs ? ActionKind::Handshake : ActionKind::ExecuteSynch;
}

namespace {

const PulledView& read_port(const NeighborReads& reads, Port p) {
  if (p >= reads.size() || !reads[p]) {
    throw ProtocolViolation("pull through unoccupied port " + std::to_string(p));
  }
  return *reads[p];
}

PortSet occupied_ports(const NeighborReads& reads) {
  PortSet out;
  for (Port p = 0; p < reads.size(); ++p) {
    if (reads[p]) out.insert(p);
  }
  return out;
}

bool is_invalid(const PulledView& x, Phase own_phase) {
  if (x.phase > own_phase) return true;
  if (x.phase == own_phase && x.synch) {
    return !x.P.contains(x.port_label) || (x.Dtilde | x.D).contains(x.port_label);
  }
  return false;
}

}  // namespace

HandshakeResult handshake(const NodeState& state, const NeighborReads& reads, PortSet detector, const Faults& faults) {
  if (!handshake_enabled(state)) throw ProtocolViolation("handshake invoked while not enabled");
  if (reads.size() > state.delta()) throw ProtocolViolation("more reads than ports");

  HandshakeResult out{state, {}};
  NodeState& s = out.state;

  if (!s.synch) {
    const PortSet live = occupied_ports(reads);
    for (Port p : live.to_vector()) s.pulled[p] = read_port(reads, p);
    s.Dtilde.clear();
    s.I.clear();
    for (Port p : live.to_vector()) {
      if (is_invalid(*s.pulled[p], s.phase)) s.I.insert(p);
    }
    s.P = live - s.I;
    s.synch = true;
  } else {
    for (Port p : (s.P - (s.Dtilde | detector)).to_vector()) {
      const PulledView& fresh = read_port(reads, p);
      auto& stored = s.pulled[p];
      if (!stored) throw ProtocolViolation("valid port " + std::to_string(p) + " has no pulled view");
      if (stored->phase < s.phase) {
        stored = fresh;
      } else {
        stored->ack = fresh.ack;
      }
    }
    s.Dtilde |= detector;
  }

  for (Port p : (s.P - s.Dtilde).to_vector()) {
    const PulledView& x = *s.pulled[p];
    PortLocalState& local = s.ports[p];
    if (x.phase != s.phase || local.block) continue;
    if (x.ack || faults.skip_ack_precondition) {
      out.writes.push_back(BlockWrite{p, x.port_label});
      local.block = true;
    } else {
      local.ack = true;
    }
  }
  return out;
}

NodeState execute_synch(const NodeState& state, const SyncAlgorithm& algo) {
  if (!execute_synch_enabled(state)) throw ProtocolViolation("execute_synch invoked while not enabled");
  NodeState s = state;
  s.F = s.P & s.blocked();

  std::vector<Bytes> neighbor_states;
  for (Port p : s.F.to_vector()) {
    if (!s.pulled[p]) throw ProtocolViolation("blocked port " + std::to_string(p) + " has no pulled view");
    neighbor_states.push_back(s.pulled[p]->algo_state);
  }
  s.algo_state = algo.step(s.algo_state, std::move(neighbor_states));
  s.phase += 1;
  s.synch = false;
  for (PortLocalState& port : s.ports) {
    port.ack = false;
    port.block = false;
  }
  for (auto& view : s.pulled) view.reset();
  return s;
}

NodeState apply_remote_block(NodeState state, Port port) {
  if (port >= state.ports.size()) throw ProtocolViolation("remote block on nonexistent port " + std::to_string(port));
  state.ports[port].block = true;
  return state;
}

PulledView retained_view(const PulledView& view, Phase own_phase) {
  PulledView out;
  if (view.phase < own_phase) {
    out.phase = own_phase - 1;
  } else if (view.phase == own_phase) {
    out.phase = own_phase;
  } else {
    out.phase = own_phase + 1;
  }
  out.port_label = view.port_label;
  out.ack = view.ack;
  out.algo_state = view.algo_state;
  return out;
}

NodeState compact(NodeState state) {
  for (auto& view : state.pulled) {
    if (view) view = retained_view(*view, state.phase);
  }
  return state;
}

namespace {

class BitWriter {
 public:
  void put(std::uint64_t value, std::size_t bits) {
    for (std::size_t i = 0; i < bits; ++i) {
      if (used_ % 8 == 0) out_.push_back(0);
      if ((value >> i) & 1) out_.back() |= static_cast<std::uint8_t>(1u << (used_ % 8));
      ++used_;
    }
  }
  Bytes take() { return std::move(out_); }

 private:
  Bytes out_;
  std::size_t used_ = 0;
};

std::size_t bit_length(std::uint64_t v) { return v == 0 ? 0 : 64 - static_cast<std::size_t>(__builtin_clzll(v)); }

constexpr std::size_t kPhaseLengthBits = 7;

}  // namespace

std::size_t phase_field_bits(Phase phase) { return kPhaseLengthBits + bit_length(phase); }

Bytes encode_memory(const NodeState& state) {
  BitWriter w;
  w.put(state.synch ? 1 : 0, kMemoryHeaderBits);
  const std::size_t len = bit_length(state.phase);
  w.put(len, kPhaseLengthBits);
  w.put(state.phase, len);
  for (Port p = 0; p < state.delta(); ++p) {
    const PortLocalState& local = state.ports[p];
    const auto& view = state.pulled[p];
    w.put(local.ack, 1);
    w.put(local.block, 1);
    w.put(state.I.contains(p), 1);
    w.put(state.P.contains(p), 1);
    w.put(state.Dtilde.contains(p), 1);
    w.put(state.F.contains(p), 1);
    w.put(view.has_value(), 1);
    w.put(view && view->ack, 1);
    w.put(view ? view->port_label : 0, 6);
    std::uint64_t relation = 0;
    if (view) relation = view->phase < state.phase ? 1 : (view->phase == state.phase ? 2 : 3);
    w.put(relation, 2);
  }
  return w.take();
}

MemoryHeader decode_memory_header(const Bytes& image) {
  std::size_t pos = 0;
  const auto get = [&](std::size_t bits) {
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < bits; ++i, ++pos) {
      if (pos / 8 >= image.size()) throw std::invalid_argument("truncated memory image");
      if ((image[pos / 8] >> (pos % 8)) & 1) v |= std::uint64_t{1} << i;
    }
    return v;
  };
  MemoryHeader h;
  h.synch = get(kMemoryHeaderBits) != 0;
  h.phase = get(static_cast<std::size_t>(get(kPhaseLengthBits)));
  return h;
}

}  // namespace kappa
