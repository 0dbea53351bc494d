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

// Per-node synchronizer state machine.
//
// A node alternates between two guarded actions. Handshake collects the
// phase's valid neighbors and runs the ack/block exchange on every port that
// is still connected; ExecuteSynch fires once every valid persistent port is
// blocked, runs one step of the simulated synchronous algorithm on the
// blocked ports and moves to the next phase.
//
// Actions are pure functions: they read stage-start snapshots of the
// neighbors and return the new local state plus the remote block writes the
// engine must deliver at the end of the stage.

#pragma once

#include <optional>
#include <vector>

#include "kappa/algorithms.hpp"
#include "kappa/common.hpp"

namespace kappa {

struct PortLocalState {
  Port label = 0;
  bool ack = false;
  bool block = false;  // the only multi-writer register

  friend bool operator==(const PortLocalState&, const PortLocalState&) = default;
};

/// What a node learns about the neighbor behind one of its ports.
struct PulledView {
  Phase phase = 0;
  bool synch = false;
  PortSet P;
  PortSet Dtilde;
  PortSet D;  // neighbor's detector set at the start of the pulling stage
  Port port_label = 0;  // neighbor-side port of this edge
  bool ack = false;     // neighbor's ack on port_label
  Bytes algo_state;

  friend bool operator==(const PulledView&, const PulledView&) = default;
};

struct NodeState {
  bool synch = false;
  Phase phase = 0;
  std::vector<PortLocalState> ports;
  PortSet I;       // invalid ports of the current phase
  PortSet P;       // valid ports of the current phase
  PortSet Dtilde;  // ports disconnected during the current phase
  PortSet F;       // ports used by the last ExecuteSynch
  std::vector<std::optional<PulledView>> pulled;
  Bytes algo_state;

  static NodeState initial(std::size_t delta, Bytes algo_state);

  std::size_t delta() const { return ports.size(); }
  PortSet blocked() const;

  friend bool operator==(const NodeState&, const NodeState&) = default;
};

enum class ActionKind { Handshake, ExecuteSynch };

const char* to_string(ActionKind kind);

bool handshake_enabled(const NodeState& state);
bool execute_synch_enabled(const NodeState& state);

/// The unique enabled action. Throws InvariantViolation if the two guards
/// ever agree, which would contradict the complementary guard design.
ActionKind enabled_action(const NodeState& state);

/// Remote write: set the block bit of `remote_port` at the neighbor behind
/// local port `via`.
struct BlockWrite {
  Port via = 0;
  Port remote_port = 0;

  friend bool operator==(const BlockWrite&, const BlockWrite&) = default;
};

struct HandshakeResult {
  NodeState state;
  std::vector<BlockWrite> writes;
};

/// Fault injection for harness self-tests. Never set in real runs.
struct Faults {
  /// Block as soon as the neighbor is seen in the same phase, without
  /// waiting for its ack.
  bool skip_ack_precondition = false;
};

/// Stage-start views of the neighbors, indexed by local port. Exactly the
/// occupied ports carry a value.
using NeighborReads = std::vector<std::optional<PulledView>>;

HandshakeResult handshake(const NodeState& state, const NeighborReads& reads, PortSet detector,
                          const Faults& faults = {});

NodeState execute_synch(const NodeState& state, const SyncAlgorithm& algo);

/// Idempotent: the register only ever receives the value 1.
NodeState apply_remote_block(NodeState state, Port port);

/// Canonical bit-packed form of a node's synchronizer memory, padded to a
/// whole byte at the end. Layout: synch (1 bit), phase length L (7 bits),
/// phase (L bits, L = bit length of the phase), then one fixed record per
/// port. Each pulled view keeps only what later activations consult (see
/// `retained_view`). The algorithm state is excluded.
Bytes encode_memory(const NodeState& state);

/// Per-port record size in `encode_memory`, in bits: eight flags, the
/// 6-bit neighbor port label and the 2-bit phase relation.
inline constexpr std::size_t kPortRecordBits = 16;
/// Synch flag width in `encode_memory`, in bits.
inline constexpr std::size_t kMemoryHeaderBits = 1;

/// Bits the phase counter takes in `encode_memory` (length field included).
std::size_t phase_field_bits(Phase phase);

struct MemoryHeader {
  bool synch = false;
  Phase phase = 0;
};

/// Reads back the synch flag and phase of an `encode_memory` image.
MemoryHeader decode_memory_header(const Bytes& image);

/// Projection of a stored view onto the fields a node can still read after
/// the activation that pulled it: the phase relative to its own phase,
/// the port label, the ack bit and the algorithm state. The P / D-tilde / D
/// sets and the synch flag are only consulted while computing I.
PulledView retained_view(const PulledView& view, Phase own_phase);

/// Applies `retained_view` to every stored view.
NodeState compact(NodeState state);

}  // namespace kappa
