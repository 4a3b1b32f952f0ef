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

#ifndef OTKIT_IPM_HPP_
#define OTKIT_IPM_HPP_

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "otkit/instance.hpp"
#include "otkit/linsolve.hpp"
#include "otkit/schur.hpp"
#include "otkit/support.hpp"

namespace otkit {

struct SolverConfig {
  double tol = 1e-6;
  int max_ipm_iters = 200;
  int max_cg_iters = 1000;
  int max_correctors = 3;
  double cg_tol_predictor = 1e-6;
  double cg_tol_corrector = 1e-3;
  double support_multiplier = 5.0;
  int refresh_period = 3;
  double switch_threshold = 0.05;
  bool allow_switch_back = false;
  std::uint64_t seed = 0;

  // Cost threshold for heuristic pricing; negative selects DefaultCMax.
  double c_max = -1.0;
  // Reduced costs must be below -pricing_tol to enter; negative means tol.
  double pricing_tol = -1.0;
  // Removal is active once mu (in rescaled units) < removal_mu. A variable
  // may leave when p_j < removal_relative * max(p) and, with
  // removal_indicator, p_j < s_j.
  double removal_mu = 1.0;
  double removal_relative = 1e-6;
  bool removal_indicator = false;

  // Centering: sigma_high while mu > sigma_switch_mu, then
  // clamp(max(sigma_min, (mu_t / mu_{t-1})^3), sigma_max).
  double sigma_high = 0.3;
  double sigma_switch_mu = 1e-2;
  double sigma_min = 0.1;
  double sigma_max = 0.5;
  // Symmetric neighbourhood width for corrector targets.
  double gamma = 0.1;
  double step_fraction = 0.995;
  int max_stalls = 3;

  // Direct phase: diagonal lift relative to max(diag S), nnz cap of the
  // assembled Schur complement.
  double direct_lift_relative = 1e-12;
  std::size_t max_schur_nnz = 50'000'000;
  OrderingPolicy ordering = OrderingPolicy::kMinimumDegree;

  // The IPM runs on masses rescaled so that the mean entry of [a; b] is
  // mass_mean; results are mapped back. Values <= 0 disable scaling.
  double mass_mean = 100.0;

  // Exponent q of the reported Wasserstein value; 0 picks 2 for L2 grids
  // and 1 otherwise.
  int q = 0;
  // Kernels are single-threaded; kept for interface stability.
  bool serial = false;

  // Test hook, called with the assembled system on every IPM iteration.
  std::function<void(int iteration, const SchurSystem&)> on_schur;
};

enum class SolveStatus { kOptimal, kIterationLimit, kNumericalFailure };
std::string_view SolveStatusName(SolveStatus status);

struct IterationLog {
  int iteration = 0;
  SolverMode mode = SolverMode::kIterative;
  double mu = 0.0;
  double sigma = 0.0;
  double primal_infeasibility = 0.0;  // ||r1|| / (1 + ||f||)
  double dual_infeasibility = 0.0;    // ||r2|| / (1 + ||c_red||)
  double alpha_primal = 0.0;
  double alpha_dual = 0.0;
  std::size_t support_size = 0;
  int cg_iterations = 0;
  int correctors_tried = 0;
  int correctors_accepted = 0;
  std::size_t entered = 0;
  std::size_t removed = 0;
  std::size_t vetoed = 0;
  bool full_pricing = false;
  double fill_percent = 0.0;  // direct solves only
  double drop_tolerance = 0.0;
};

struct SolveReport {
  SolveStatus status = SolveStatus::kNumericalFailure;
  std::string message;
  double objective = 0.0;
  int q = 1;
  int ipm_iters = 0;
  long long cg_iters_total = 0;
  int iterative_phase_iters = 0;
  int direct_phase_iters = 0;
  int phase_switches = 0;
  double max_fill_percent = 0.0;
  std::size_t final_support_size = 0;
  std::size_t peak_support_size = 0;
  // min_j (c - A^T y)_j over all m*n variables at termination.
  double min_reduced_cost = 0.0;
  double final_mu = 0.0;  // in the rescaled units
  double mass_scale = 1.0;
  std::optional<double> rwe_vs_reference;
  std::vector<IterationLog> iterations;
  std::vector<LinearSolveTelemetry> linear_solves;

  // (objective)^(1/q); clamps tiny negative objectives to 0.
  double wasserstein(int q_override = 0) const;
};

// Nonzero pattern of the returned plan (zero outside `index`).
struct TransportPlan {
  int m = 0;
  int n = 0;
  std::vector<VarIndex> index;  // ascending
  std::vector<double> value;

  std::vector<double> RowSums() const;
  std::vector<double> ColumnSums() const;
  // Column-major m x n.
  std::vector<double> Dense() const;
  // Entries strictly above `threshold`.
  std::size_t CountAbove(double threshold) const;
};

struct SolveResult {
  TransportPlan plan;
  std::vector<double> y;  // length m + n
  SolveReport report;
};

// Reduced Newton direction on the current support.
struct NewtonDirection {
  std::vector<double> dp;
  std::vector<double> dy;
  std::vector<double> ds;
};

// Solves A Theta A^T dy = r1 + A Theta (r2 - r3 / p) through the Schur
// complement with `schur_solve`, then ds = r2 - A^T dy and
// dp = r3 / s - theta ds.
NewtonDirection ComputeNewtonDirection(
    std::span<const VarIndex> support, std::span<const double> p,
    std::span<const double> s, std::span<const double> r1,
    std::span<const double> r2, std::span<const double> r3,
    const SchurSystem& system, const SchurSystem::SchurSolve& schur_solve,
    int m, int n);

// Largest alpha in [0, 1] with x + alpha dx >= 0, times `fraction` when the
// boundary is hit before 1.
double StepToBoundary(std::span<const double> x, std::span<const double> dx,
                      double fraction);

struct Iterate {
  std::vector<double> p;
  std::vector<double> y;
  std::vector<double> s;
  double mu = 0.0;
};

// p_j = max(scale * sum(a) / psi, 1e-8), s_j = c_j + 1, y = 0.
Iterate InitialIterate(const OTInstance& inst, const Support& support,
                       double mass_scale = 1.0);

// Runs the hybrid interior-point / column-generation solver.
SolveResult Solve(const OTInstance& inst, const SolverConfig& config = {});

}  // namespace otkit

#endif  // OTKIT_IPM_HPP_
