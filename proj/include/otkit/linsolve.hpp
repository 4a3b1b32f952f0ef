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

#ifndef OTKIT_LINSOLVE_HPP_
#define OTKIT_LINSOLVE_HPP_

#include <cstddef>
#include <deque>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

#include "otkit/sparse.hpp"

namespace otkit {

// y = Op(x).
using LinearOperator =
    std::function<void(std::span<const double>, std::span<double>)>;

struct PcgResult {
  int iterations = 0;
  // ||b - A x|| / ||b|| for the (deflated) right-hand side.
  double relative_residual = 0.0;
  bool converged = false;
};

// Preconditioned conjugate gradient from x = 0. With `deflate_ones`, the
// right-hand side, residuals and search directions are kept orthogonal to
// the constant vector, which handles PSD operators whose null space is
// span(e). An empty `preconditioner` means identity. Hitting `max_iterations`
// is reported, not thrown; NaN/Inf throws NumericError.
PcgResult Pcg(const LinearOperator& matrix, std::span<const double> rhs,
              const LinearOperator& preconditioner, std::span<double> x,
              double tolerance, int max_iterations, bool deflate_ones);

// Threshold incomplete Cholesky S + lift I ~= L L^T in natural order.
// Off-diagonal entries with |value| < drop_tolerance * ||S(:, j)|| are
// discarded (drop_tolerance = +inf keeps only the diagonal, 0 keeps
// everything). A nonpositive pivot multiplies the lift by 10 and retries, at
// most three times, after which the factor degrades to Jacobi.
class IncompleteCholesky {
 public:
  static IncompleteCholesky Factorize(const SparseSymmetric& matrix,
                                      double drop_tolerance, double lift);

  // z = (L L^T)^{-1} r.
  void Apply(std::span<const double> r, std::span<double> z) const;

  int dim() const { return dim_; }
  // Stored entries of L including the diagonal.
  std::size_t nnz() const { return row_idx_.size(); }
  double lift() const { return lift_; }
  int retries() const { return retries_; }
  bool is_jacobi_fallback() const { return jacobi_fallback_; }

 private:
  bool TryFactorize(const SparseSymmetric& matrix, double drop_tolerance,
                    double lift);

  int dim_ = 0;
  std::vector<int> col_ptr_;
  std::vector<int> row_idx_;  // diagonal first in every column
  std::vector<double> values_;
  double lift_ = 0.0;
  int retries_ = 0;
  bool jacobi_fallback_ = false;
};

enum class OrderingPolicy {
  kNatural,
  kMinimumDegree,
  // Use LdltOptions::permutation as given.
  kGiven,
};

// Greedy minimum-degree elimination ordering on the graph of `matrix`
// (ties: smallest index). Returns perm with perm[new] = old.
std::vector<int> MinimumDegreeOrdering(const SparseSymmetric& matrix);

struct LdltOptions {
  OrderingPolicy ordering = OrderingPolicy::kMinimumDegree;
  std::vector<int> permutation;  // for kGiven, perm[new] = old
  // Pivots below pivot_floor_relative * max|diag(S)| are replaced by that
  // floor. More than one such pivot is a rank deficiency above one.
  double pivot_floor_relative = 1e-12;
};

// Exact P S P^T = L D L^T (up-looking, elimination-tree based).
class LdltFactorization {
 public:
  // Throws NumericError when more than one pivot falls below the floor.
  static LdltFactorization Factorize(const SparseSymmetric& matrix,
                                     const LdltOptions& options = {});

  // x = P^T L^{-T} D^{-1} L^{-1} P b.
  void Solve(std::span<const double> b, std::span<double> x) const;

  int dim() const { return dim_; }
  // Entries of L including the unit diagonal.
  std::size_t nnz() const { return row_idx_.size() + static_cast<std::size_t>(dim_); }
  // nnz(L) / nnz(lower(S)); 1.0 means no fill-in.
  double fill_ratio() const { return fill_ratio_; }
  // nnz(L) as a percentage of a dense lower triangle.
  double fill_percent() const;
  int replaced_pivots() const { return replaced_pivots_; }
  double pivot_floor() const { return pivot_floor_; }
  std::span<const int> permutation() const { return perm_; }
  std::span<const double> d() const { return d_; }

 private:
  int dim_ = 0;
  std::vector<int> perm_;  // perm[new] = old
  std::vector<int> col_ptr_;
  std::vector<int> row_idx_;  // strictly lower, column-wise
  std::vector<double> values_;
  std::vector<double> d_;
  double fill_ratio_ = 1.0;
  double pivot_floor_ = 0.0;
  int replaced_pivots_ = 0;
};

enum class SolverMode { kIterative, kDirect };
std::string_view SolverModeName(SolverMode mode);

// Iterative -> direct switching and the incomplete-factorization drop
// tolerance schedule.
class SolverPhase {
 public:
  struct Options {
    double switch_threshold = 0.05;
    int window = 5;
    double initial_drop_tolerance = 1e-2;
    double drop_tolerance_floor = 1e-6;
    int cg_iterations_trigger = 200;
    bool allow_switch_back = false;
  };

  SolverPhase() : SolverPhase(Options{}) {}
  explicit SolverPhase(Options options);

  SolverMode mode() const { return mode_; }
  double drop_tolerance() const { return drop_tolerance_; }
  const std::deque<std::size_t>& history() const { return history_; }
  int switches() const { return switches_; }
  int switch_backs() const { return switch_backs_; }

  // True iff at least `window` previous sizes are recorded and
  // (psi_{t-window} - psi_t) / psi_{t-window} >= switch_threshold.
  bool ShouldSwitch(std::size_t current_support_size) const;

  // Records psi_t and moves Iterative -> Direct when ShouldSwitch fires.
  // With allow_switch_back, a growing support in Direct mode returns to
  // Iterative. Returns true when the mode changed.
  bool Observe(std::size_t support_size);

  // Lowers the drop tolerance by 10x (down to the floor) after a PCG call
  // that needed more than cg_iterations_trigger iterations.
  void NoteCgIterations(int iterations);

 private:
  Options options_;
  SolverMode mode_ = SolverMode::kIterative;
  double drop_tolerance_;
  std::deque<std::size_t> history_;
  int switches_ = 0;
  int switch_backs_ = 0;
};

// One linear-solver call, appended to the solve log.
struct LinearSolveTelemetry {
  SolverMode mode = SolverMode::kIterative;
  int iterations = 0;
  double relative_residual = 0.0;
  std::size_t factor_nnz = 0;
  double fill_ratio = 0.0;
};

}  // namespace otkit

#endif  // OTKIT_LINSOLVE_HPP_
