// Copyright 2026 The otkit Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "otkit/graphcheck.hpp"

#include <algorithm>
#include <cstdint>
#include <deque>

#include <fmt/format.h>

#include "otkit/errors.hpp"

namespace otkit {
namespace {

void CheckNode(int node, int count, std::string_view what) {
  if (node < 0 || node >= count) {
    throw IndexError(fmt::format("{} {} outside 1..{}", what, node + 1, count));
  }
}

// Shortest path from `from` to `to` avoiding nodes with blocked[x] set.
std::vector<int> ShortestPath(const Graph& graph, int from, int to,
                              const std::vector<char>& blocked) {
  std::vector<int> previous(graph.node_count, -2);
  std::deque<int> queue{from};
  previous[from] = -1;
  while (!queue.empty()) {
    const int x = queue.front();
    queue.pop_front();
    if (x == to) break;
    for (int y : graph.adjacency[x]) {
      if (previous[y] == -2 && !blocked[y]) {
        previous[y] = x;
        queue.push_back(y);
      }
    }
  }
  std::vector<int> path;
  if (previous[to] == -2) return path;
  for (int x = to; x != -1; x = previous[x]) path.push_back(x);
  std::reverse(path.begin(), path.end());
  return path;
}

// Cycle v, u, ..., w closed through a shortest u-w path that avoids v and
// the rest of v's neighbourhood; empty when no such path exists.
std::vector<int> CycleThrough(const Graph& graph, int v, int u, int w) {
  std::vector<char> blocked(graph.node_count, 0);
  blocked[v] = 1;
  for (int x : graph.adjacency[v]) blocked[x] = 1;
  blocked[u] = 0;
  blocked[w] = 0;
  std::vector<int> path = ShortestPath(graph, u, w, blocked);
  if (path.empty()) return path;
  path.insert(path.begin(), v);
  return path;
}

}  // namespace

Graph Graph::FromEdges(int node_count, std::span<const std::pair<int, int>> edges) {
  if (node_count < 0) throw ParameterError("negative node count");
  Graph g;
  g.node_count = node_count;
  g.adjacency.resize(node_count);
  for (const auto& [a, b] : edges) {
    CheckNode(a, node_count, "node");
    CheckNode(b, node_count, "node");
    if (a == b) throw ParameterError(fmt::format("self loop at node {}", a + 1));
    g.adjacency[a].push_back(b);
    g.adjacency[b].push_back(a);
  }
  for (auto& list : g.adjacency) {
    std::sort(list.begin(), list.end());
    list.erase(std::unique(list.begin(), list.end()), list.end());
  }
  return g;
}

Graph Graph::FromPattern(const SparseSymmetric& matrix) {
  Graph g;
  g.node_count = matrix.dim;
  g.adjacency = matrix.Adjacency();
  return g;
}

bool Graph::HasEdge(int a, int b) const {
  const auto& list = adjacency[a];
  return std::binary_search(list.begin(), list.end(), b);
}

std::size_t Graph::edge_count() const {
  std::size_t total = 0;
  for (const auto& list : adjacency) total += list.size();
  return total / 2;
}

BipartiteGraph::BipartiteGraph(int left_count, int right_count,
                               std::vector<std::pair<int, int>> edges)
    : left_(left_count), right_(right_count), edges_(std::move(edges)) {
  if (left_ < 0 || right_ < 0) throw ParameterError("negative node count");
  left_adj_.resize(left_);
  right_adj_.resize(right_);
  for (const auto& [i, k] : edges_) {
    CheckNode(i, left_, "left node");
    CheckNode(k, right_, "right node");
    left_adj_[i].push_back(k);
    right_adj_[k].push_back(i);
  }
  for (int i = 0; i < left_; ++i) {
    auto& list = left_adj_[i];
    std::sort(list.begin(), list.end());
    if (std::adjacent_find(list.begin(), list.end()) != list.end()) {
      throw ParameterError(fmt::format("duplicate edge at left node {}", i + 1));
    }
  }
  for (auto& list : right_adj_) std::sort(list.begin(), list.end());
}

BipartiteGraph BipartiteGraph::FromSupport(int m, int n, std::span<const VarIndex> index) {
  std::vector<std::pair<int, int>> edges;
  edges.reserve(index.size());
  const VarIndex total = static_cast<VarIndex>(m) * n;
  for (VarIndex j : index) {
    if (j < 0 || j >= total) {
      throw IndexError(fmt::format("variable {} outside 1..{}", j + 1, total));
    }
    edges.emplace_back(static_cast<int>(j % m), static_cast<int>(j / m));
  }
  return BipartiteGraph(m, n, std::move(edges));
}

Graph BipartiteGraph::AsGraph() const {
  std::vector<std::pair<int, int>> shifted;
  shifted.reserve(edges_.size());
  for (const auto& [i, k] : edges_) shifted.emplace_back(i, left_ + k);
  return Graph::FromEdges(left_ + right_, shifted);
}

bool BipartiteGraph::IsAcyclic() const {
  // A forest has exactly nodes - components edges.
  std::vector<int> parent(left_ + right_);
  for (std::size_t v = 0; v < parent.size(); ++v) parent[v] = static_cast<int>(v);
  const auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const auto& [i, k] : edges_) {
    const int a = find(i);
    const int b = find(left_ + k);
    if (a == b) return false;
    parent[a] = b;
  }
  return true;
}

Graph SecondaryGraph(const BipartiteGraph& graph, BipartiteSide side) {
  const bool left = side == BipartiteSide::kLeft;
  const int count = left ? graph.left_count() : graph.right_count();
  Graph g;
  g.node_count = count;
  g.adjacency.resize(count);
  std::vector<int> mark(count, -1);
  for (int x = 0; x < count; ++x) {
    const auto& first = left ? graph.left_neighbours(x) : graph.right_neighbours(x);
    for (int mid : first) {
      const auto& second = left ? graph.right_neighbours(mid) : graph.left_neighbours(mid);
      for (int z : second) {
        if (z != x && mark[z] != x) {
          mark[z] = x;
          g.adjacency[x].push_back(z);
        }
      }
    }
    std::sort(g.adjacency[x].begin(), g.adjacency[x].end());
  }
  return g;
}

std::vector<int> MaximumCardinalitySearch(const Graph& graph) {
  const int n = graph.node_count;
  std::vector<int> weight(n, 0);
  std::vector<char> visited(n, 0);
  std::vector<int> order(n);
  for (int step = n - 1; step >= 0; --step) {
    int best = -1;
    for (int v = 0; v < n; ++v) {
      if (!visited[v] && (best == -1 || weight[v] > weight[best])) best = v;
    }
    visited[best] = 1;
    order[step] = best;
    for (int u : graph.adjacency[best]) {
      if (!visited[u]) ++weight[u];
    }
  }
  return order;
}

ChordalityResult IsChordal(const Graph& graph) {
  ChordalityResult result;
  const int n = graph.node_count;
  std::vector<int> order = MaximumCardinalitySearch(graph);
  std::vector<int> position(n);
  for (int t = 0; t < n; ++t) position[order[t]] = t;

  struct Violation {
    int v, u, w;
  };
  std::vector<Violation> violations;
  for (int v : order) {
    int parent = -1;
    for (int x : graph.adjacency[v]) {
      if (position[x] > position[v] && (parent == -1 || position[x] < position[parent])) {
        parent = x;
      }
    }
    if (parent == -1) continue;
    for (int x : graph.adjacency[v]) {
      if (x != parent && position[x] > position[v] && !graph.HasEdge(parent, x)) {
        violations.push_back({v, parent, x});
      }
    }
  }
  if (violations.empty()) {
    result.chordal = true;
    result.order = std::move(order);
    return result;
  }
  for (const auto& bad : violations) {
    auto cycle = CycleThrough(graph, bad.v, bad.u, bad.w);
    if (!cycle.empty() && IsChordlessCycle(graph, cycle)) {
      result.cycle = std::move(cycle);
      return result;
    }
  }
  // Any chordless cycle passes through some v whose two cycle neighbours
  // are non-adjacent members of N(v); try them all.
  for (int v = 0; v < n; ++v) {
    const auto& nb = graph.adjacency[v];
    for (std::size_t a = 0; a < nb.size(); ++a) {
      for (std::size_t b = a + 1; b < nb.size(); ++b) {
        if (graph.HasEdge(nb[a], nb[b])) continue;
        auto cycle = CycleThrough(graph, v, nb[a], nb[b]);
        if (!cycle.empty() && IsChordlessCycle(graph, cycle)) {
          result.cycle = std::move(cycle);
          return result;
        }
      }
    }
  }
  throw NumericError("chordality check found a violation but no chordless cycle");
}

bool IsChordlessCycle(const Graph& graph, std::span<const int> cycle) {
  const std::size_t len = cycle.size();
  if (len < 3) return false;
  std::vector<int> sorted(cycle.begin(), cycle.end());
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) return false;
  for (int v : cycle) {
    if (v < 0 || v >= graph.node_count) return false;
  }
  for (std::size_t a = 0; a < len; ++a) {
    for (std::size_t b = a + 1; b < len; ++b) {
      const bool consecutive = b == a + 1 || (a == 0 && b == len - 1);
      if (graph.HasEdge(cycle[a], cycle[b]) != consecutive) return false;
    }
  }
  return true;
}

CycleWitness FindChordlessCycle(const BipartiteGraph& graph, int min_length, int max_nodes) {
  const int n = graph.left_count() + graph.right_count();
  if (max_nodes > 64) throw ParameterError("cycle search supports at most 64 nodes");
  if (n > max_nodes) {
    throw ResourceError(
        fmt::format("cycle search limited to {} nodes, graph has {}", max_nodes, n));
  }
  const Graph g = graph.AsGraph();
  std::vector<std::uint64_t> nbr(n, 0);
  for (int v = 0; v < n; ++v) {
    for (int u : g.adjacency[v]) nbr[v] |= std::uint64_t{1} << u;
  }
  CycleWitness witness;
  std::vector<int> path;

  // Extends an induced path starting at path[0] (its smallest node).
  // `interior_nbrs` covers the neighbours of path[1..len-2].
  const auto extend = [&](auto&& self, std::uint64_t on_path,
                          std::uint64_t interior_nbrs) -> bool {
    const int start = path.front();
    const int last = path.back();
    const std::uint64_t start_bit = std::uint64_t{1} << start;
    for (int x : g.adjacency[last]) {
      const std::uint64_t bit = std::uint64_t{1} << x;
      if (x <= start || (on_path & bit) || (interior_nbrs & bit)) continue;
      if (path.size() >= 2 && (nbr[x] & start_bit)) {
        if (static_cast<int>(path.size()) + 1 >= min_length) {
          witness.found = true;
          witness.cycle = path;
          witness.cycle.push_back(x);
          return true;
        }
        continue;
      }
      const std::uint64_t next_interior =
          path.size() >= 2 ? interior_nbrs | nbr[last] : interior_nbrs;
      path.push_back(x);
      if (self(self, on_path | bit, next_interior)) return true;
      path.pop_back();
    }
    return false;
  };

  for (int s = 0; s < n; ++s) {
    path.assign(1, s);
    if (extend(extend, std::uint64_t{1} << s, 0)) return witness;
  }
  return witness;
}

bool ZeroFillVerify(const Graph& pattern, std::span<const int> order) {
  const int n = pattern.node_count;
  if (static_cast<int>(order.size()) != n) {
    throw DimensionError("elimination order length differs from the node count");
  }
  std::vector<int> position(n, -1);
  for (int t = 0; t < n; ++t) {
    CheckNode(order[t], n, "node");
    if (position[order[t]] != -1) throw ParameterError("elimination order repeats a node");
    position[order[t]] = t;
  }
  std::vector<int> later;
  for (int v = 0; v < n; ++v) {
    later.clear();
    for (int u : pattern.adjacency[v]) {
      if (position[u] > position[v]) later.push_back(u);
    }
    for (std::size_t a = 0; a < later.size(); ++a) {
      for (std::size_t b = a + 1; b < later.size(); ++b) {
        if (!pattern.HasEdge(later[a], later[b])) return false;
      }
    }
  }
  return true;
}

}  // namespace otkit
