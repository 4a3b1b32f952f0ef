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

#ifndef OTKIT_ORACLE_HPP_
#define OTKIT_ORACLE_HPP_

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "otkit/instance.hpp"
#include "otkit/ipm.hpp"

namespace otkit {

// Exact optimum from the transportation simplex.
struct ReferenceSolution {
  int m = 0;
  int n = 0;
  std::vector<double> plan;  // column-major m x n
  double objective = 0.0;
  // Basic cells of the final tree (m + n - 1 of them, zeros included).
  std::vector<std::pair<int, int>> basis;
  // The positive entries form an acyclic bipartite graph.
  bool is_vertex = false;
  std::size_t support_size = 0;  // strictly positive entries
  // Every nonbasic reduced cost exceeds 1e-9 * max(1, max c), so the
  // optimal plan is unique.
  bool unique_optimum = false;
  // Every basic cell carries positive flow (m + n - 1 positive entries).
  bool nondegenerate = false;
  // Optimal potentials with u[0] = 0: c_ik - u_i - v_k >= 0.
  std::vector<double> u;
  std::vector<double> v;
  int pivots = 0;

  double wasserstein(int q = 1) const;
};

// Largest m * n the oracle accepts.
inline constexpr long long kOracleMaxVariables = 10'000;

// Northwest-corner start, MODI potentials, smallest-index entering and
// leaving cells. Throws ParameterError when sum(a) != sum(b) (relative
// 1e-12) or a cost is negative or non-finite, DimensionError on size
// mismatch, ResourceError above kOracleMaxVariables.
ReferenceSolution ReferenceSolve(std::span<const double> a, std::span<const double> b,
                                 std::span<const double> cost_column_major);
ReferenceSolution ReferenceSolve(const OTInstance& inst);

struct RweValue {
  double value = 0.0;
  // The reference is zero and `value` is the absolute difference.
  bool absolute = false;
};

// |w_solver - w_ref| / w_ref, or |w_solver - w_ref| when w_ref == 0.
RweValue ComputeRwe(double w_solver, double w_ref);
// Compares W_q values; q = 0 uses report.q.
RweValue ComputeRwe(const SolveReport& report, const ReferenceSolution& ref, int q = 0);

}  // namespace otkit

#endif  // OTKIT_ORACLE_HPP_
