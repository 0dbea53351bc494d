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


// Test-only oracles. They share no code with the library beyond plain types.

#pragma once

#include <openssl/sha.h>

#include <algorithm>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "kappa/common.hpp"

namespace oracle {

using kappa::Bytes;
using kappa::Edge;
using kappa::EdgeSet;

inline Bytes sha256_concat(const Bytes& data) {
  Bytes out(SHA256_DIGEST_LENGTH);
  SHA256(data.data(), data.size(), out.data());
  return out;
}

inline Bytes u64le(std::uint64_t v) {
  Bytes b;
  for (int i = 0; i < 8; ++i) b.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xFF));
  return b;
}

inline std::uint64_t from_u64le(const Bytes& b) {
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < 8; ++i) v |= std::uint64_t{b.at(i)} << (8 * i);
  return v;
}

inline Bytes history_seed() {
  const std::string tag = "kappa-sync/history-hash/init/v1";
  return sha256_concat(Bytes(tag.begin(), tag.end()));
}

/// Adjacency-matrix executor for the three built-in algorithms.
inline std::vector<std::vector<Bytes>> brute_force(const std::string& algo, std::size_t n,
                                                   const std::vector<EdgeSet>& graphs,
                                                   const std::vector<std::int64_t>& inputs, std::size_t steps) {
  std::vector<std::vector<Bytes>> rows;
  std::vector<Bytes> cur(n);
  for (std::size_t u = 0; u < n; ++u) {
    if (algo == "counter") cur[u] = u64le(0);
    if (algo == "max-flood") cur[u] = u64le(static_cast<std::uint64_t>(inputs.empty() ? std::int64_t(u) : inputs[u]));
    if (algo == "history-hash") cur[u] = history_seed();
  }
  rows.push_back(cur);
  for (std::size_t j = 0; j < steps; ++j) {
    std::vector<std::vector<char>> adj(n, std::vector<char>(n, 0));
    for (const Edge& e : graphs[j]) adj[e.a][e.b] = adj[e.b][e.a] = 1;
    std::vector<Bytes> next(n);
    for (std::size_t u = 0; u < n; ++u) {
      std::vector<Bytes> nb;
      for (std::size_t v = 0; v < n; ++v) {
        if (adj[u][v]) nb.push_back(cur[v]);
      }
      if (algo == "counter") {
        next[u] = u64le(from_u64le(cur[u]) + 1);
      } else if (algo == "max-flood") {
        auto best = static_cast<std::int64_t>(from_u64le(cur[u]));
        for (const Bytes& b : nb) best = std::max(best, static_cast<std::int64_t>(from_u64le(b)));
        next[u] = u64le(static_cast<std::uint64_t>(best));
      } else {
        std::sort(nb.begin(), nb.end());
        Bytes msg = cur[u];
        const Bytes cnt = u64le(nb.size());
        msg.insert(msg.end(), cnt.begin(), cnt.end());
        for (const Bytes& b : nb) msg.insert(msg.end(), b.begin(), b.end());
        next[u] = sha256_concat(msg);
      }
    }
    cur = next;
    rows.push_back(cur);
  }
  return rows;
}

/// reach[u] after k steps: nodes with a temporal path to u.
inline std::vector<std::vector<bool>> temporal_reach(std::size_t n, const std::vector<EdgeSet>& graphs, std::size_t k) {
  std::vector<std::vector<bool>> reach(n, std::vector<bool>(n, false));
  for (std::size_t u = 0; u < n; ++u) reach[u][u] = true;
  for (std::size_t j = 0; j < k; ++j) {
    auto next = reach;
    for (const Edge& e : graphs[j]) {
      for (std::size_t w = 0; w < n; ++w) {
        if (reach[e.a][w]) next[e.b][w] = true;
        if (reach[e.b][w]) next[e.a][w] = true;
      }
    }
    reach = next;
  }
  return reach;
}

/// Random simple graph with max degree <= delta.
inline EdgeSet random_graph(std::mt19937_64& rng, std::size_t n, std::size_t delta, double density) {
  std::vector<Edge> cand;
  for (kappa::NodeId a = 0; a < n; ++a) {
    for (kappa::NodeId b = a + 1; b < n; ++b) cand.push_back(Edge{a, b});
  }
  std::shuffle(cand.begin(), cand.end(), rng);
  std::vector<std::size_t> deg(n, 0);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  EdgeSet out;
  for (const Edge& e : cand) {
    if (coin(rng) >= density || deg[e.a] >= delta || deg[e.b] >= delta) continue;
    ++deg[e.a];
    ++deg[e.b];
    out.push_back(e);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace oracle
