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

#ifndef OTKIT_SCHUR_HPP_
#define OTKIT_SCHUR_HPP_

#include <functional>
#include <span>
#include <vector>

#include "otkit/instance.hpp"
#include "otkit/sparse.hpp"

namespace otkit {

// Which diagonal block is eliminated.
//   kEliminateM: S_M = N - V^T M^{-1} V, dimension n.
//   kEliminateN: S_N = M - V N^{-1} V^T, dimension m.
enum class SchurSide { kEliminateM, kEliminateN };

// Normal-equations matrix of the restricted problem,
//
//   A_red Theta A_red^T = [ M    V ]
//                         [ V^T  N ],
//
// where V (m x n) carries theta_j at (j % m, j / m) and M, N are its row and
// column sums. The active Schur complement is a weighted graph Laplacian:
// its rows sum to zero and it is weakly diagonally dominant, with e in its
// null space. Immutable after Assemble.
class SchurSystem {
 public:
  // Throws NumericError on a nonpositive or non-finite theta entry and
  // DimensionError on size mismatch. Side: eliminate M when n <= m.
  static SchurSystem Assemble(std::span<const VarIndex> support,
                              std::span<const double> theta, int m, int n);

  int m() const { return m_; }
  int n() const { return n_; }
  SchurSide side() const { return side_; }
  int dim() const { return side_ == SchurSide::kEliminateM ? n_ : m_; }

  std::span<const double> M() const { return row_sums_; }
  std::span<const double> N() const { return col_sums_; }
  // Number of empty rows/columns of V whose diagonal was floored.
  int guarded_diagonals() const { return guarded_; }

  // out = V x (x length n, out length m) and out = V^T x.
  void MultiplyV(std::span<const double> x, std::span<double> out) const;
  void MultiplyVt(std::span<const double> x, std::span<double> out) const;

  // out = S v for the active complement, O(|support|), never forming S.
  void Multiply(std::span<const double> v, std::span<double> out) const;

  // Explicit lower-triangular storage of S + lift * I. Off-diagonal pattern
  // is that of V^T V (resp. V V^T); the diagonal is the sum of off-diagonal
  // magnitudes, so row sums are zero before lifting. Throws ResourceError
  // when more than `max_nnz` entries would be stored.
  SparseSymmetric AssembleSparse(double lift, std::size_t max_nnz) const;

  // Block elimination. The block right-hand side is first projected onto
  // the range of the (singular) block matrix, i.e. orthogonal to
  // [e_m; -e_n]; `reduced` receives the Schur right-hand side (length dim),
  // deflated against e.
  void ReduceRhs(std::span<const double> beta1, std::span<const double> beta2,
                 std::span<double> reduced) const;
  // Recovers the eliminated block from the Schur solution `active` and
  // returns the minimum-norm representative (orthogonal to [e_m; -e_n]).
  void ExpandSolution(std::span<const double> beta1,
                      std::span<const double> beta2,
                      std::span<const double> active,
                      std::span<double> alpha1, std::span<double> alpha2) const;

  // Reduce, solve with `schur_solve(rhs, x)`, expand.
  using SchurSolve =
      std::function<void(std::span<const double>, std::span<double>)>;
  void SolveBlock(std::span<const double> beta1, std::span<const double> beta2,
                  const SchurSolve& schur_solve, std::span<double> alpha1,
                  std::span<double> alpha2) const;

  // out = [M V; V^T N] [x1; x2].
  void MultiplyBlock(std::span<const double> x1, std::span<const double> x2,
                     std::span<double> out1, std::span<double> out2) const;

 private:
  SchurSystem() = default;
  void ProjectRhs(std::span<const double> beta1, std::span<const double> beta2,
                  std::vector<double>& b1, std::vector<double>& b2) const;

  int m_ = 0;
  int n_ = 0;
  SchurSide side_ = SchurSide::kEliminateM;
  int guarded_ = 0;
  std::vector<double> row_sums_;  // M
  std::vector<double> col_sums_;  // N
  // V in compressed-column form (the support order) ...
  std::vector<int> v_col_ptr_;
  std::vector<int> v_row_;
  std::vector<double> v_val_;
  // ... and compressed-row form.
  std::vector<int> v_row_ptr_;
  std::vector<int> v_col_;
  std::vector<double> v_row_val_;
};

}  // namespace otkit

#endif  // OTKIT_SCHUR_HPP_
