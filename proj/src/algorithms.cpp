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

#include "kappa/algorithms.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <memory>

namespace kappa {

namespace {

Bytes le64(std::uint64_t v) {
  Bytes out(8);
  for (int i = 0; i < 8; ++i) out[i] = static_cast<std::uint8_t>(v >> (8 * i));
  return out;
}

std::uint64_t read_le64(const Bytes& b) {
  if (b.size() != 8) throw std::invalid_argument("expected an 8-byte state");
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | b[i];
  return v;
}

}  // namespace

Bytes SyncAlgorithm::step(const Bytes& own, std::vector<Bytes> neighbors) const {
  std::sort(neighbors.begin(), neighbors.end());
  return advance(own, neighbors);
}

Bytes sha256(std::span<const Bytes> parts) {
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("sha256: digest init failed");
  }
  for (const Bytes& p : parts) {
    if (!p.empty() && EVP_DigestUpdate(ctx.get(), p.data(), p.size()) != 1) {
      throw std::runtime_error("sha256: digest update failed");
    }
  }
  Bytes out(EVP_MAX_MD_SIZE);
  unsigned int len = 0;
  if (EVP_DigestFinal_ex(ctx.get(), out.data(), &len) != 1) throw std::runtime_error("sha256: digest final failed");
  out.resize(len);
  return out;
}

// --- counter ---------------------------------------------------------------

Bytes CounterAlgo::init(NodeId, Input) const { return le64(0); }

bool CounterAlgo::terminated(const Bytes& state) const { return limit_ && decode(state) >= *limit_; }

std::uint64_t CounterAlgo::decode(const Bytes& state) { return read_le64(state); }

Bytes CounterAlgo::advance(const Bytes& own, std::span<const Bytes>) const { return le64(decode(own) + 1); }

// --- max-flood -------------------------------------------------------------

Bytes MaxFloodAlgo::encode(std::int64_t value) { return le64(static_cast<std::uint64_t>(value)); }

std::int64_t MaxFloodAlgo::decode(const Bytes& state) { return static_cast<std::int64_t>(read_le64(state)); }

Bytes MaxFloodAlgo::init(NodeId node, Input input) const { return encode(input.value_or(static_cast<std::int64_t>(node))); }

Bytes MaxFloodAlgo::advance(const Bytes& own, std::span<const Bytes> neighbors) const {
  std::int64_t best = decode(own);
  for (const Bytes& s : neighbors) best = std::max(best, decode(s));
  return encode(best);
}

// --- history-hash ----------------------------------------------------------

Bytes HistoryHashAlgo::initial_digest() {
  static const Bytes kSeed = [] {
    const std::string tag = "kappa-sync/history-hash/init/v1";
    const Bytes part(tag.begin(), tag.end());
    return sha256(std::span<const Bytes>(&part, 1));
  }();
  return kSeed;
}

Bytes HistoryHashAlgo::init(NodeId, Input) const { return initial_digest(); }

Bytes HistoryHashAlgo::chain(const Bytes& own, std::span<const Bytes> sorted_neighbors) {
  std::vector<Bytes> parts;
  parts.reserve(sorted_neighbors.size() + 2);
  parts.push_back(own);
  parts.push_back(le64(sorted_neighbors.size()));
  parts.insert(parts.end(), sorted_neighbors.begin(), sorted_neighbors.end());
  return sha256(parts);
}

Bytes HistoryHashAlgo::advance(const Bytes& own, std::span<const Bytes> neighbors) const {
  return chain(own, neighbors);
}

// --- registry --------------------------------------------------------------

std::unique_ptr<SyncAlgorithm> make_algorithm(std::string_view name) {
  if (name == "counter") return std::make_unique<CounterAlgo>();
  if (name == "max-flood") return std::make_unique<MaxFloodAlgo>();
  if (name == "history-hash") return std::make_unique<HistoryHashAlgo>();
  throw InvalidScenario("unknown algorithm '" + std::string(name) + "'");
}

std::vector<std::string> algorithm_names() { return {"counter", "history-hash", "max-flood"}; }

// --- reference executor ----------------------------------------------------

SyncExecution reference_run(const SyncAlgorithm& algo, std::size_t n, const std::vector<EdgeSet>& graphs,
                            const std::vector<Input>& inputs, std::size_t steps) {
  if (steps > graphs.size()) throw InvalidScenario("reference_run: fewer graphs than steps");
  if (!inputs.empty() && inputs.size() != n) throw InvalidScenario("reference_run: inputs must cover every node");

  SyncExecution exec;
  exec.graphs.assign(graphs.begin(), graphs.begin() + static_cast<std::ptrdiff_t>(steps));
  exec.states.reserve(steps + 1);

  std::vector<Bytes> current(n);
  for (NodeId u = 0; u < n; ++u) current[u] = algo.init(u, inputs.empty() ? Input{} : inputs[u]);
  exec.states.push_back(current);

  for (std::size_t j = 0; j < steps; ++j) {
    std::vector<std::vector<NodeId>> adjacency(n);
    for (const Edge& e : graphs[j]) {
      if (e.a >= n || e.b >= n || e.a == e.b) throw InvalidScenario("reference_run: edge out of range");
      adjacency[e.a].push_back(e.b);
      adjacency[e.b].push_back(e.a);
    }
    std::vector<Bytes> next(n);
    for (NodeId u = 0; u < n; ++u) {
      std::vector<Bytes> nbrs;
      nbrs.reserve(adjacency[u].size());
      for (NodeId v : adjacency[u]) nbrs.push_back(current[v]);
      next[u] = algo.step(current[u], std::move(nbrs));
    }
    current = std::move(next);
    exec.states.push_back(current);
  }
  return exec;
}

}  // namespace kappa
