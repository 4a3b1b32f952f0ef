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

#ifndef OTKIT_GRAPHCHECK_HPP_
#define OTKIT_GRAPHCHECK_HPP_

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "otkit/instance.hpp"
#include "otkit/sparse.hpp"

namespace otkit {

// Simple undirected graph with sorted adjacency lists.
struct Graph {
  int node_count = 0;
  std::vector<std::vector<int>> adjacency;

  // Duplicates are merged; self loops and out-of-range ends throw.
  static Graph FromEdges(int node_count, std::span<const std::pair<int, int>> edges);
  // Off-diagonal pattern of a symmetric matrix.
  static Graph FromPattern(const SparseSymmetric& matrix);

  bool HasEdge(int a, int b) const;
  std::size_t edge_count() const;
};

// Bipartite graph between m left and n right nodes, i.e. the pattern of an
// m x n biadjacency matrix.
class BipartiteGraph {
 public:
  // Throws IndexError for out-of-range ends and ParameterError for
  // duplicate edges.
  BipartiteGraph(int left_count, int right_count,
                 std::vector<std::pair<int, int>> edges);
  // Edges (j % m, j / m) of a column-major variable set.
  static BipartiteGraph FromSupport(int m, int n, std::span<const VarIndex> index);

  int left_count() const { return left_; }
  int right_count() const { return right_; }
  const std::vector<std::pair<int, int>>& edges() const { return edges_; }
  // Neighbours of left node i (right indices) and of right node k.
  const std::vector<int>& left_neighbours(int i) const { return left_adj_[i]; }
  const std::vector<int>& right_neighbours(int k) const { return right_adj_[k]; }

  // Whole graph with left nodes 0..m-1 and right nodes m..m+n-1.
  Graph AsGraph() const;
  bool IsAcyclic() const;

 private:
  int left_;
  int right_;
  std::vector<std::pair<int, int>> edges_;
  std::vector<std::vector<int>> left_adj_;
  std::vector<std::vector<int>> right_adj_;
};

enum class BipartiteSide { kLeft, kRight };

// Nodes of one side, adjacent iff a path of length two joins them. The left
// secondary graph is the off-diagonal pattern of B B^T, the right one that of
// B^T B.
Graph SecondaryGraph(const BipartiteGraph& graph,
                     BipartiteSide side = BipartiteSide::kLeft);

// Elimination order from maximum cardinality search (reverse visit order);
// a perfect elimination ordering whenever the graph is chordal.
std::vector<int> MaximumCardinalitySearch(const Graph& graph);

struct ChordalityResult {
  bool chordal = false;
  // Perfect elimination ordering (first eliminated first) when chordal.
  std::vector<int> order;
  // A chordless cycle of length >= 4 otherwise, as consecutive nodes.
  std::vector<int> cycle;
};

ChordalityResult IsChordal(const Graph& graph);

// True when `cycle` is a cycle of `graph` with no chord.
bool IsChordlessCycle(const Graph& graph, std::span<const int> cycle);

struct CycleWitness {
  bool found = false;
  std::vector<int> cycle;  // AsGraph() numbering
};

// Exhaustive search for a chordless cycle of length >= min_length. Throws
// ResourceError when the graph has more than max_nodes nodes.
CycleWitness FindChordlessCycle(const BipartiteGraph& graph, int min_length = 8,
                                int max_nodes = 24);

// Symbolic elimination of `pattern` in `order` (first eliminated first)
// creates no entry outside the pattern.
bool ZeroFillVerify(const Graph& pattern, std::span<const int> order);

}  // namespace otkit

#endif  // OTKIT_GRAPHCHECK_HPP_
