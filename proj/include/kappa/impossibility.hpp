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


// Edge agreement under classic PULL versus the block-register extension,
// played out on the two-node scenario where u cannot tell whether v woke up
// before their edge vanished.

#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "kappa/common.hpp"

namespace kappa::verify {

enum class Decision { Undecided, Zero, One };
const char* to_string(Decision d);

struct PullStep {
  Bytes state;
  Decision decision = Decision::Undecided;
};

/// Deterministic per-node rule with read-only access to neighbors. Every node
/// starts in the same state (the network is anonymous).
class ClassicPullProtocol {
 public:
  virtual ~ClassicPullProtocol() = default;
  virtual std::string name() const = 0;
  virtual Bytes init() const = 0;
  /// `pulled[p]` holds the neighbor's state behind port p, if occupied.
  virtual PullStep step(const Bytes& own, const std::vector<std::optional<Bytes>>& pulled) const = 0;
};

std::unique_ptr<ClassicPullProtocol> make_protocol(std::string_view name);
std::vector<std::string> protocol_names();

/// One node's view of a stage: empty when not activated, otherwise a
/// serialization of its own state and the pulled neighbor states.
using Observation = Bytes;

struct PullExecution {
  std::string label;                    // "A" or "B"
  std::vector<Observation> u_observations;  // one per stage
  std::vector<Decision> u_decisions;    // output after each stage
  std::vector<Decision> v_decisions;
  Decision u_final = Decision::Undecided;
  Decision v_final = Decision::Undecided;
  bool mutually_observed = false;  // both pulled each other while the edge existed
  std::string outcome;             // agree-1, agree-0, disagree, undecided
};

struct HandshakeExecution {
  std::string label;
  PortSet u_F;  // F^0 of u and v
  PortSet v_F;
  std::string outcome;               // agree-1, agree-0, disagree
  std::optional<Stage> first_u_difference;  // first stage where u's local state differs from the other run
};

struct ImpossibilityRecord {
  std::string protocol;
  std::size_t horizon = 0;
  PullExecution a;
  PullExecution b;
  bool observations_identical = false;
  std::optional<Stage> first_observation_difference;
  bool dilemma = false;
  std::string verdict;
};

struct HandshakeDemo {
  std::size_t horizon = 0;
  HandshakeExecution a;
  HandshakeExecution b;
  bool consistent = false;  // agreement in A and B
};

/// Execution A: u active at stage 0, v at 1, edge present for stages 0 and 1,
/// gone from stage 2, both active every stage from 2 on. Execution B: the
/// same with v idle at stage 1.
ImpossibilityRecord impossibility_demo(const ClassicPullProtocol& protocol, std::size_t horizon = 20);

/// The ack/block handshake on the same two scripts.
HandshakeDemo kappa_handshake_demo(std::size_t horizon = 20);

std::string render(const ImpossibilityRecord& record);
std::string render(const HandshakeDemo& demo);

inline constexpr const char* kImpossibilityHeader =
    "# edge-agreement demonstration on the two-node proof scenario (not a universal prover over all protocols)";

}  // namespace kappa::verify
