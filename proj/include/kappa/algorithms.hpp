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

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "kappa/common.hpp"

namespace kappa {

using Input = std::optional<std::int64_t>;

/// A deterministic synchronous algorithm over anonymous neighborhoods.
///
/// States are opaque byte strings. Neighbor states reach the algorithm as an
/// unordered collection; `step` sorts them bytewise before handing them to
/// `advance`, so no port or identity information leaks in and iteration
/// order is canonical.
class SyncAlgorithm {
 public:
  virtual ~SyncAlgorithm() = default;

  virtual std::string name() const = 0;
  virtual Bytes init(NodeId node, Input input) const = 0;
  virtual bool terminated(const Bytes& state) const = 0;

  Bytes step(const Bytes& own, std::vector<Bytes> neighbors) const;

 protected:
  /// `neighbors` is sorted bytewise.
  virtual Bytes advance(const Bytes& own, std::span<const Bytes> neighbors) const = 0;
};

/// State is the number of steps taken. Terminates once that reaches `limit`
/// (never, when no limit is given).
class CounterAlgo final : public SyncAlgorithm {
 public:
  explicit CounterAlgo(std::optional<std::uint64_t> limit = std::nullopt) : limit_(limit) {}

  std::string name() const override { return "counter"; }
  Bytes init(NodeId node, Input input) const override;
  bool terminated(const Bytes& state) const override;

  static std::uint64_t decode(const Bytes& state);

 protected:
  Bytes advance(const Bytes& own, std::span<const Bytes> neighbors) const override;

 private:
  std::optional<std::uint64_t> limit_;
};

/// State is the largest input value seen so far.
class MaxFloodAlgo final : public SyncAlgorithm {
 public:
  std::string name() const override { return "max-flood"; }
  /// Input defaults to the node index.
  Bytes init(NodeId node, Input input) const override;
  bool terminated(const Bytes&) const override { return false; }

  static Bytes encode(std::int64_t value);
  static std::int64_t decode(const Bytes& state);

 protected:
  Bytes advance(const Bytes& own, std::span<const Bytes> neighbors) const override;
};

/// State is a SHA-256 chain over (previous digest, sorted neighbor digests).
/// Two nodes end with equal digests only if their rooted anonymous
/// interaction histories coincide, which makes state equality a very
/// sensitive probe of execution equivalence.
class HistoryHashAlgo final : public SyncAlgorithm {
 public:
  std::string name() const override { return "history-hash"; }
  Bytes init(NodeId node, Input input) const override;
  bool terminated(const Bytes&) const override { return false; }

  static Bytes initial_digest();
  static Bytes chain(const Bytes& own, std::span<const Bytes> sorted_neighbors);

 protected:
  Bytes advance(const Bytes& own, std::span<const Bytes> neighbors) const override;
};

/// Builds a builtin by name: "counter", "max-flood", "history-hash".
std::unique_ptr<SyncAlgorithm> make_algorithm(std::string_view name);
std::vector<std::string> algorithm_names();

/// SHA-256 of the concatenated parts.
Bytes sha256(std::span<const Bytes> parts);

/// states[0] holds the initial states; states[j + 1] is the result of step j
/// over graphs[j].
struct SyncExecution {
  std::vector<EdgeSet> graphs;
  std::vector<std::vector<Bytes>> states;
};

SyncExecution reference_run(const SyncAlgorithm& algo, std::size_t n, const std::vector<EdgeSet>& graphs,
                            const std::vector<Input>& inputs, std::size_t steps);

}  // namespace kappa
