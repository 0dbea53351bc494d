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


#include "doctest.h"
#include "kappa/synchronizer.hpp"

using namespace kappa;

namespace {

const CounterAlgo kCounter;

NodeState fresh(std::size_t delta) { return NodeState::initial(delta, kCounter.init(0, {})); }

PulledView view(Phase phase, bool synch, Port back, bool ack = false) {
  PulledView v;
  v.phase = phase;
  v.synch = synch;
  v.port_label = back;
  v.ack = ack;
  v.algo_state = kCounter.init(0, {});
  return v;
}

PortSet ports_of(std::initializer_list<Port> ps) {
  PortSet s;
  for (Port p : ps) s.insert(p);
  return s;
}

}  // namespace

TEST_CASE("guards") {
  SUBCASE("fresh node runs Handshake") { CHECK(enabled_action(fresh(3)) == ActionKind::Handshake); }
  SUBCASE("all valid ports blocked enables ExecuteSynch") {
    NodeState s = fresh(3);
    s.synch = true;
    s.P = ports_of({2});
    s.ports[2].block = true;
    CHECK(enabled_action(s) == ActionKind::ExecuteSynch);
    s.ports[2].block = false;
    CHECK(enabled_action(s) == ActionKind::Handshake);
  }
  SUBCASE("vacuous quantifier") {
    NodeState s = fresh(1);
    s.synch = true;
    s.P = ports_of({0});
    s.Dtilde = ports_of({0});
    CHECK(enabled_action(s) == ActionKind::ExecuteSynch);
  }
}

TEST_CASE("isolated node handshake") {
  const auto res = handshake(fresh(2), NeighborReads(2), {});
  CHECK(res.state.synch);
  CHECK(res.state.P.empty());
  CHECK(res.state.I.empty());
  CHECK(res.writes.empty());
  CHECK(enabled_action(res.state) == ActionKind::ExecuteSynch);
  const NodeState next = execute_synch(res.state, kCounter);
  CHECK(next.phase == 1);
  CHECK(next.F.empty());
  CHECK(CounterAlgo::decode(next.algo_state) == 1);
}

TEST_CASE("first handshake classifies neighbors") {
  NeighborReads reads(4);
  reads[0] = view(0, false, 0);              // same phase, not started
  reads[1] = view(1, false, 0);              // higher phase: invalid
  reads[2] = view(0, true, 3);               // same phase, started, P lacks us: invalid
  reads[2]->P = ports_of({1});
  reads[3] = view(0, true, 1);               // same phase, started, we are in its P but disconnected
  reads[3]->P = ports_of({1});
  reads[3]->D = ports_of({1});
  const auto res = handshake(fresh(4), reads, {});
  CHECK(res.state.I == ports_of({1, 2, 3}));
  CHECK(res.state.P == ports_of({0}));
  CHECK(res.state.ports[0].ack);
  CHECK(res.writes.empty());
}

TEST_CASE("lower-phase neighbor stays valid but is not acked") {
  NodeState s = fresh(1);
  s.phase = 3;
  NeighborReads reads(1);
  reads[0] = view(2, true, 0);
  const auto res = handshake(s, reads, {});
  CHECK(res.state.P == ports_of({0}));
  CHECK_FALSE(res.state.ports[0].ack);
}

TEST_CASE("seeing an ack produces a remote block") {
  // Node c meeting b, which already acked.
  NeighborReads reads(1);
  reads[0] = view(0, true, 2, true);
  reads[0]->P = ports_of({2});
  const auto res = handshake(fresh(1), reads, {});
  REQUIRE(res.writes.size() == 1);
  CHECK(res.writes[0] == BlockWrite{0, 2});
  CHECK(res.state.ports[0].block);
  CHECK(enabled_action(res.state) == ActionKind::ExecuteSynch);
}

TEST_CASE("second handshake folds the detector and skips disconnected ports") {
  NeighborReads reads(2);
  reads[0] = view(0, false, 0);
  reads[1] = view(0, false, 0);
  auto first = handshake(fresh(2), reads, {});
  REQUIRE(first.state.P == ports_of({0, 1}));
  NeighborReads later(2);
  later[0] = view(0, true, 0, true);
  later[0]->P = ports_of({0});
  const auto second = handshake(first.state, later, ports_of({1}));
  CHECK(second.state.Dtilde == ports_of({1}));
  CHECK(second.writes.size() == 1);
  CHECK(enabled_action(second.state) == ActionKind::ExecuteSynch);
}

TEST_CASE("blocked port whose edge vanished still feeds the step") {
  NodeState s = fresh(1);
  s.synch = true;
  s.P = ports_of({0});
  s.Dtilde = ports_of({0});
  s.ports[0].block = true;
  s.pulled[0] = view(0, true, 0);
  s.pulled[0]->algo_state = CounterAlgo{}.init(0, {});
  const NodeState next = execute_synch(s, kCounter);
  CHECK(next.F == ports_of({0}));
  CHECK(next.phase == 1);
  CHECK_FALSE(next.synch);
  CHECK_FALSE(next.ports[0].block);
  CHECK_FALSE(next.pulled[0]);
}

TEST_CASE("remote block") {
  NodeState s = fresh(2);
  s = apply_remote_block(std::move(s), 1);
  CHECK(s.ports[1].block);
  const NodeState again = apply_remote_block(s, 1);
  CHECK(again == s);
  SUBCASE("local and remote writes in the same stage agree") {
    NodeState local = fresh(1);
    local.ports[0].block = true;
    CHECK(apply_remote_block(local, 0).ports[0].block);
  }
  CHECK_THROWS_AS(apply_remote_block(fresh(1), 3), ProtocolViolation);
}

TEST_CASE("pulling through an unoccupied valid port is a protocol violation") {
  NeighborReads reads(1);
  reads[0] = view(0, false, 0);
  const auto first = handshake(fresh(1), reads, {});
  CHECK_THROWS_AS(handshake(first.state, NeighborReads(1), {}), ProtocolViolation);
}

TEST_CASE("memory encoding") {
  NodeState s = fresh(4);
  const auto bytes_for = [](std::size_t bits) { return (bits + 7) / 8; };
  CHECK(encode_memory(s).size() == bytes_for(kMemoryHeaderBits + phase_field_bits(0) + 4 * kPortRecordBits));
  CHECK(phase_field_bits(0) == 7);
  CHECK(phase_field_bits(1) == 8);
  CHECK(phase_field_bits(300) == 16);
  CHECK(phase_field_bits(~std::uint64_t{0}) == 71);
  for (Phase p : {Phase{0}, Phase{1}, Phase{127}, Phase{128}, Phase{16384}, Phase{1} << 40, ~Phase{0}}) {
    s.phase = p;
    s.synch = (p % 2) == 1;
    const Bytes image = encode_memory(s);
    CHECK(image.size() == bytes_for(kMemoryHeaderBits + phase_field_bits(p) + 4 * kPortRecordBits));
    const MemoryHeader h = decode_memory_header(image);
    CHECK(h.phase == p);
    CHECK(h.synch == s.synch);
  }
}

TEST_CASE("memory image tracks port flags") {
  NodeState s = fresh(2);
  const Bytes before = encode_memory(s);
  s.ports[1].block = true;
  CHECK(encode_memory(s) != before);
}

TEST_CASE("retained view keeps only the phase relation") {
  PulledView v = view(7, true, 2, true);
  v.P = ports_of({1, 2});
  const PulledView r = retained_view(v, 9);
  CHECK(r.phase == 8);
  CHECK(r.P.empty());
  CHECK(r.port_label == 2);
  CHECK(r.ack);
  CHECK(retained_view(view(9, false, 0), 9).phase == 9);
  CHECK(retained_view(view(12, false, 0), 9).phase == 10);
}
