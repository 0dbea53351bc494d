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

#pragma once

#include <bit>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace kappa {

using NodeId = std::uint32_t;
using Port = std::uint32_t;
using Stage = std::size_t;
using Phase = std::uint64_t;
using Bytes = std::vector<std::uint8_t>;

/// Scenario input (config, graph, script) does not describe a valid run.
class InvalidScenario : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A node action was asked to do something the model forbids, e.g. pull
/// through a port with no edge behind it. Always an engine bug.
class ProtocolViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// A run-time invariant of the synchronizer or engine failed.
class InvariantViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Undirected edge with endpoints stored in ascending order.
struct Edge {
  NodeId a = 0;
  NodeId b = 0;

  friend auto operator<=>(const Edge&, const Edge&) = default;
};

inline Edge make_edge(NodeId u, NodeId v) { return u < v ? Edge{u, v} : Edge{v, u}; }

/// Sorted, duplicate-free list of undirected edges.
using EdgeSet = std::vector<Edge>;

EdgeSet normalize(EdgeSet edges);
bool contains(const EdgeSet& edges, Edge e);
std::vector<std::size_t> degrees(const EdgeSet& edges, std::size_t n);

/// Set of port indices, capped at 64 ports per node.
class PortSet {
 public:
  static constexpr std::size_t kMaxPorts = 64;

  PortSet() = default;
  PortSet(std::initializer_list<Port> ports) {
    for (Port p : ports) insert(p);
  }
  static PortSet from_bits(std::uint64_t bits) {
    PortSet s;
    s.bits_ = bits;
    return s;
  }
  static PortSet all(std::size_t count) {
    return from_bits(count >= kMaxPorts ? ~std::uint64_t{0} : (std::uint64_t{1} << count) - 1);
  }

  bool contains(Port p) const { return p < kMaxPorts && ((bits_ >> p) & 1u) != 0; }
  void insert(Port p) {
    if (p >= kMaxPorts) throw std::out_of_range("port index exceeds PortSet capacity");
    bits_ |= std::uint64_t{1} << p;
  }
  void erase(Port p) {
    if (p < kMaxPorts) bits_ &= ~(std::uint64_t{1} << p);
  }
  void clear() { bits_ = 0; }
  bool empty() const { return bits_ == 0; }
  std::size_t size() const { return static_cast<std::size_t>(std::popcount(bits_)); }
  std::uint64_t bits() const { return bits_; }

  bool is_subset_of(PortSet other) const { return (bits_ & ~other.bits_) == 0; }

  /// Ports in ascending order.
  std::vector<Port> to_vector() const {
    std::vector<Port> out;
    for (std::uint64_t b = bits_; b != 0; b &= b - 1) out.push_back(static_cast<Port>(std::countr_zero(b)));
    return out;
  }

  friend PortSet operator|(PortSet x, PortSet y) { return from_bits(x.bits_ | y.bits_); }
  friend PortSet operator&(PortSet x, PortSet y) { return from_bits(x.bits_ & y.bits_); }
  /// Set difference.
  friend PortSet operator-(PortSet x, PortSet y) { return from_bits(x.bits_ & ~y.bits_); }
  PortSet& operator|=(PortSet y) {
    bits_ |= y.bits_;
    return *this;
  }
  friend bool operator==(PortSet, PortSet) = default;

 private:
  std::uint64_t bits_ = 0;
};

std::string to_hex(const Bytes& bytes);
Bytes from_hex(std::string_view hex);

}  // namespace kappa
