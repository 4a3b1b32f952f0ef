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

#include "otkit/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>

#include <fmt/format.h>

#include "otkit/errors.hpp"
#include "otkit/graphcheck.hpp"

namespace otkit {
namespace {

// Tree path between row node `row` and column node m + `col` in the basis
// tree, as basis positions ordered from the row end.
std::vector<std::size_t> TreePath(const std::vector<std::pair<int, int>>& basis, int m,
                                  int n, int row, int col) {
  std::vector<std::vector<std::pair<int, std::size_t>>> adj(m + n);
  for (std::size_t t = 0; t < basis.size(); ++t) {
    adj[basis[t].first].emplace_back(m + basis[t].second, t);
    adj[m + basis[t].second].emplace_back(basis[t].first, t);
  }
  std::vector<long long> via(m + n, -1);
  std::vector<int> from(m + n, -1);
  std::vector<char> seen(m + n, 0);
  std::deque<int> queue{row};
  seen[row] = 1;
  while (!queue.empty()) {
    const int x = queue.front();
    queue.pop_front();
    for (const auto& [y, t] : adj[x]) {
      if (!seen[y]) {
        seen[y] = 1;
        from[y] = x;
        via[y] = static_cast<long long>(t);
        queue.push_back(y);
      }
    }
  }
  const int target = m + col;
  if (!seen[target]) throw NumericError("transportation simplex: basis is not a spanning tree");
  std::vector<std::size_t> path;
  for (int x = target; x != row; x = from[x]) path.push_back(static_cast<std::size_t>(via[x]));
  std::reverse(path.begin(), path.end());
  return path;
}

// Potentials with u[0] = 0 and u_i + v_k = c_ik on basic cells.
void Potentials(const std::vector<std::pair<int, int>>& basis, int m, int n,
                std::span<const double> cost, std::vector<double>& u, std::vector<double>& v) {
  std::vector<std::vector<int>> adj(m + n);
  for (const auto& [i, k] : basis) {
    adj[i].push_back(m + k);
    adj[m + k].push_back(i);
  }
  std::vector<double> pot(m + n, 0.0);
  std::vector<char> seen(m + n, 0);
  std::deque<int> queue{0};
  seen[0] = 1;
  while (!queue.empty()) {
    const int x = queue.front();
    queue.pop_front();
    for (int y : adj[x]) {
      if (seen[y]) continue;
      seen[y] = 1;
      const int i = x < m ? x : y;
      const int k = (x < m ? y : x) - m;
      const double c = cost[static_cast<std::size_t>(i) + static_cast<std::size_t>(k) * m];
      pot[y] = c - pot[x];
      queue.push_back(y);
    }
  }
  u.assign(pot.begin(), pot.begin() + m);
  v.assign(pot.begin() + m, pot.end());
}

}  // namespace

double ReferenceSolution::wasserstein(int q) const {
  const double value = std::max(objective, 0.0);
  return q <= 1 ? value : std::pow(value, 1.0 / q);
}

ReferenceSolution ReferenceSolve(std::span<const double> a, std::span<const double> b,
                                 std::span<const double> cost) {
  const int m = static_cast<int>(a.size());
  const int n = static_cast<int>(b.size());
  if (m == 0 || n == 0) throw DimensionError("oracle needs at least one source and sink");
  const long long vars = static_cast<long long>(m) * n;
  if (static_cast<long long>(cost.size()) != vars) {
    throw DimensionError(fmt::format("cost has {} entries, expected {}", cost.size(), vars));
  }
  if (vars > kOracleMaxVariables) {
    throw ResourceError(fmt::format("oracle limited to {} variables, instance has {}",
                                    kOracleMaxVariables, vars));
  }
  double max_cost = 0.0;
  for (double c : cost) {
    if (!std::isfinite(c) || c < 0.0) throw ParameterError("costs must be finite and >= 0");
    max_cost = std::max(max_cost, c);
  }
  for (double x : a) {
    if (!std::isfinite(x) || x < 0.0) throw ParameterError("masses must be finite and >= 0");
  }
  for (double x : b) {
    if (!std::isfinite(x) || x < 0.0) throw ParameterError("masses must be finite and >= 0");
  }
  const double sa = std::accumulate(a.begin(), a.end(), 0.0);
  const double sb = std::accumulate(b.begin(), b.end(), 0.0);
  if (std::abs(sa - sb) > 1e-12 * std::max({1.0, sa, sb})) {
    throw ParameterError(fmt::format("unbalanced marginals: {} vs {}", sa, sb));
  }

  ReferenceSolution sol;
  sol.m = m;
  sol.n = n;
  const auto at = [m](int i, int k) {
    return static_cast<std::size_t>(i) + static_cast<std::size_t>(k) * m;
  };
  std::vector<double> x(static_cast<std::size_t>(vars), 0.0);

  // Northwest corner; ties advance the row so exactly m + n - 1 cells are basic.
  std::vector<double> supply(a.begin(), a.end());
  std::vector<double> demand(b.begin(), b.end());
  std::vector<std::pair<int, int>> basis;
  int i = 0;
  int k = 0;
  while (true) {
    const double amount = std::min(supply[i], demand[k]);
    x[at(i, k)] = amount;
    basis.emplace_back(i, k);
    supply[i] -= amount;
    demand[k] -= amount;
    if (i == m - 1 && k == n - 1) break;
    if (k == n - 1 || (i < m - 1 && supply[i] <= demand[k])) {
      ++i;
    } else {
      ++k;
    }
  }

  const double eps = 1e-12 * std::max(max_cost, 1.0);
  std::vector<double> u, v;
  const long long max_pivots = 1'000'000;
  while (true) {
    Potentials(basis, m, n, cost, u, v);
    int enter_i = -1;
    int enter_k = -1;
    for (int kk = 0; kk < n && enter_i < 0; ++kk) {
      for (int ii = 0; ii < m; ++ii) {
        if (cost[at(ii, kk)] - u[ii] - v[kk] < -eps) {
          enter_i = ii;
          enter_k = kk;
          break;
        }
      }
    }
    if (enter_i < 0) break;
    if (++sol.pivots > max_pivots) throw NumericError("transportation simplex: pivot limit");
    const auto path = TreePath(basis, m, n, enter_i, enter_k);
    // Path cells alternate -, +, -, ... starting from the row end.
    double theta = std::numeric_limits<double>::infinity();
    std::size_t leave = basis.size();
    for (std::size_t t = 0; t < path.size(); t += 2) {
      const auto [ci, ck] = basis[path[t]];
      const double value = x[at(ci, ck)];
      const std::size_t idx = at(ci, ck);
      if (value < theta ||
          (value == theta && idx < at(basis[leave].first, basis[leave].second))) {
        theta = value;
        leave = path[t];
      }
    }
    for (std::size_t t = 0; t < path.size(); ++t) {
      const auto [ci, ck] = basis[path[t]];
      x[at(ci, ck)] += (t % 2 == 0 ? -theta : theta);
    }
    x[at(basis[leave].first, basis[leave].second)] = 0.0;
    x[at(enter_i, enter_k)] = theta;
    basis[leave] = {enter_i, enter_k};
  }

  Potentials(basis, m, n, cost, u, v);
  std::vector<char> basic(static_cast<std::size_t>(vars), 0);
  for (const auto& [bi, bk] : basis) basic[at(bi, bk)] = 1;
  sol.unique_optimum = true;
  const double gap = 1e-9 * std::max(max_cost, 1.0);
  for (int kk = 0; kk < n; ++kk) {
    for (int ii = 0; ii < m; ++ii) {
      if (!basic[at(ii, kk)] && cost[at(ii, kk)] - u[ii] - v[kk] <= gap) {
        sol.unique_optimum = false;
      }
    }
  }
  for (double& value : x) value = std::max(value, 0.0);
  sol.plan = std::move(x);
  sol.basis = std::move(basis);
  std::vector<std::pair<int, int>> positive;
  for (int kk = 0; kk < n; ++kk) {
    for (int ii = 0; ii < m; ++ii) {
      const double value = sol.plan[at(ii, kk)];
      if (value > 0.0) {
        positive.emplace_back(ii, kk);
        sol.objective += cost[at(ii, kk)] * value;
      }
    }
  }
  sol.support_size = positive.size();
  sol.nondegenerate = positive.size() == static_cast<std::size_t>(m + n - 1);
  sol.u = std::move(u);
  sol.v = std::move(v);
  sol.is_vertex = BipartiteGraph(m, n, std::move(positive)).IsAcyclic();
  return sol;
}

ReferenceSolution ReferenceSolve(const OTInstance& inst) {
  const long long vars = inst.num_variables();
  if (vars > kOracleMaxVariables) {
    throw ResourceError(fmt::format("oracle limited to {} variables, instance has {}",
                                    kOracleMaxVariables, vars));
  }
  std::vector<double> cost(static_cast<std::size_t>(vars));
  for (VarIndex j = 0; j < vars; ++j) cost[j] = inst.cost(j);
  return ReferenceSolve(inst.a(), inst.b(), cost);
}

RweValue ComputeRwe(double w_solver, double w_ref) {
  RweValue r;
  const double diff = std::abs(w_solver - w_ref);
  if (w_ref == 0.0) {
    r.value = diff;
    r.absolute = true;
  } else {
    r.value = diff / std::abs(w_ref);
  }
  return r;
}

RweValue ComputeRwe(const SolveReport& report, const ReferenceSolution& ref, int q) {
  const int exponent = q > 0 ? q : report.q;
  return ComputeRwe(report.wasserstein(exponent), ref.wasserstein(exponent));
}

}  // namespace otkit
