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

#include <algorithm>
#include <iterator>
#include <set>
#include <utility>
#include <vector>

#include "otkit/linsolve.hpp"

namespace otkit {

std::vector<int> MinimumDegreeOrdering(const SparseSymmetric& matrix) {
  const int n = matrix.dim;
  std::vector<std::vector<int>> adj = matrix.Adjacency();
  for (auto& list : adj) {
    std::sort(list.begin(), list.end());
    list.erase(std::unique(list.begin(), list.end()), list.end());
  }
  std::set<std::pair<int, int>> queue;
  for (int v = 0; v < n; ++v) queue.emplace(static_cast<int>(adj[v].size()), v);

  std::vector<int> perm;
  perm.reserve(n);
  std::vector<int> merged;
  while (!queue.empty()) {
    const int v = queue.begin()->second;
    queue.erase(queue.begin());
    perm.push_back(v);
    const std::vector<int> clique = std::move(adj[v]);
    adj[v].clear();
    for (int u : clique) {
      queue.erase({static_cast<int>(adj[u].size()), u});
      merged.clear();
      std::set_union(adj[u].begin(), adj[u].end(), clique.begin(), clique.end(),
                     std::back_inserter(merged));
      std::erase_if(merged, [&](int w) { return w == u || w == v; });
      adj[u].swap(merged);
      queue.emplace(static_cast<int>(adj[u].size()), u);
    }
  }
  return perm;
}

}  // namespace otkit
