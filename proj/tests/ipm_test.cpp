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
#include <cmath>
#include <memory>
#include <numeric>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "otkit/errors.hpp"
#include "otkit/ipm.hpp"
#include "otkit/oracle.hpp"
#include "test_util.hpp"

namespace otkit {
namespace {

using testing::RandomCost;
using testing::RandomInstance;
using testing::ToEigen;
using testing::ToStd;

using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Schur solve through a dense pseudo-inverse of the explicit complement.
SchurSystem::SchurSolve DensePseudoInverse(const SchurSystem& sys) {
  const SparseSymmetric s = sys.AssembleSparse(0.0, 1u << 24);
  const std::vector<double> d = s.ToDense();
  const Eigen::MatrixXd dense = Eigen::Map<const RowMajor>(d.data(), s.dim, s.dim);
  auto cod = std::make_shared<Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd>>(dense);
  return [cod](std::span<const double> r, std::span<double> x) {
    const Eigen::VectorXd sol = cod->solve(
        Eigen::Map<const Eigen::VectorXd>(r.data(), static_cast<Eigen::Index>(r.size())));
    std::copy(sol.data(), sol.data() + sol.size(), x.begin());
  };
}

std::vector<double> Theta(const std::vector<double>& p, const std::vector<double>& s) {
  std::vector<double> theta(p.size());
  for (std::size_t t = 0; t < p.size(); ++t) theta[t] = p[t] / s[t];
  return theta;
}

TEST(Solve, SingleVariable) {
  const OTInstance inst({1.0}, {1.0}, ExplicitCost{{5.0}});
  const SolveResult r = Solve(inst);
  ASSERT_EQ(r.report.status, SolveStatus::kOptimal) << r.report.message;
  ASSERT_EQ(r.plan.index.size(), 1u);
  EXPECT_NEAR(r.plan.value[0], 1.0, 1e-6);
  EXPECT_NEAR(r.report.objective, 5.0, 1e-5);
}

TEST(Solve, ZeroCostMatching) {
  const OTInstance inst({0.5, 0.5}, {0.5, 0.5}, ExplicitCost{{0.0, 1.0, 1.0, 0.0}});
  const SolveResult r = Solve(inst);
  ASSERT_EQ(r.report.status, SolveStatus::kOptimal) << r.report.message;
  const std::vector<double> dense = r.plan.Dense();
  EXPECT_NEAR(dense[0], 0.5, 1e-6);
  EXPECT_NEAR(dense[3], 0.5, 1e-6);
  EXPECT_NEAR(dense[1], 0.0, 1e-6);
  EXPECT_NEAR(dense[2], 0.0, 1e-6);
  EXPECT_NEAR(r.report.objective, 0.0, 1e-6);
}

TEST(Solve, RandomFiveByFiveMatchesOracle) {
  std::mt19937_64 rng(2024);
  for (RandomCost kind :
       {RandomCost::kL1, RandomCost::kL2, RandomCost::kLinf, RandomCost::kExplicit}) {
    for (int trial = 0; trial < 5; ++trial) {
      const OTInstance inst = RandomInstance(5, 5, kind, rng);
      const SolveResult r = Solve(inst);
      ASSERT_EQ(r.report.status, SolveStatus::kOptimal) << r.report.message;
      const ReferenceSolution ref = ReferenceSolve(inst);
      EXPECT_LE(std::abs(r.report.objective - ref.objective), 1e-6 * ref.objective)
          << testing::RandomCostName(kind) << " trial " << trial;
    }
  }
}

TEST(Solve, IterationLimitReported) {
  const OTInstance inst = MakeSyntheticInstance(4, SyntheticClass::kGaussianBlob, 2);
  SolverConfig cfg;
  cfg.max_ipm_iters = 1;
  const SolveResult r = Solve(inst, cfg);
  EXPECT_EQ(r.report.status, SolveStatus::kIterationLimit);
  EXPECT_EQ(r.report.ipm_iters, 1);
  EXPECT_EQ(r.plan.m, 16);
}

// Termination invariants on random instances: marginals, approximate dual
// feasibility, complementarity, the mu trend and W_1 == objective.
TEST(Solve, TerminationInvariants) {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 40; ++trial) {
    const int m = 3 + trial % 6;
    const int n = 3 + (trial / 6) % 6;
    const auto kind = static_cast<RandomCost>(trial % 4);
    const OTInstance inst = RandomInstance(m, n, kind, rng);
    const SolverConfig cfg;
    const SolveResult r = Solve(inst, cfg);
    ASSERT_EQ(r.report.status, SolveStatus::kOptimal) << r.report.message;

    const auto a = inst.a();
    const auto b = inst.b();
    double f_norm = 0.0;
    for (double v : a) f_norm += v * v;
    for (double v : b) f_norm += v * v;
    f_norm = std::sqrt(f_norm);
    const auto rows = r.plan.RowSums();
    const auto cols = r.plan.ColumnSums();
    for (int i = 0; i < m; ++i) EXPECT_LE(std::abs(rows[i] - a[i]), cfg.tol * (1 + f_norm));
    for (int k = 0; k < n; ++k) EXPECT_LE(std::abs(cols[k] - b[k]), cfg.tol * (1 + f_norm));

    // Reduced costs recomputed from scratch.
    double c_inf = 0.0;
    for (VarIndex j = 0; j < inst.num_variables(); ++j) c_inf = std::max(c_inf, inst.cost(j));
    for (VarIndex j = 0; j < inst.num_variables(); ++j) {
      const double rc = inst.cost(j) - r.y[j % m] - r.y[m + j / m];
      EXPECT_GE(rc, -10 * cfg.tol) << "j=" << j;
    }
    for (std::size_t t = 0; t < r.plan.index.size(); ++t) {
      const VarIndex j = r.plan.index[t];
      const double rc = inst.cost(j) - r.y[j % m] - r.y[m + j / m];
      EXPECT_LE(std::abs(r.plan.value[t] * rc), 10 * cfg.tol * c_inf);
    }
    EXPECT_GE(r.report.min_reduced_cost, -10 * cfg.tol);

    const auto& log = r.report.iterations;
    for (std::size_t t = 10; t < log.size(); ++t) {
      EXPECT_LE(log[t].mu, 0.99 * log[t - 10].mu) << "window ending at " << t;
    }
    EXPECT_DOUBLE_EQ(r.report.wasserstein(1), r.report.objective);
    EXPECT_GE(r.report.ipm_iters, 0);
    EXPECT_GE(r.report.cg_iters_total, 0);
    EXPECT_EQ(r.report.iterative_phase_iters + r.report.direct_phase_iters, r.report.ipm_iters);
  }
}

TEST(Solve, CorrectorsAreSometimesRejected) {
  // Seeded run known to hit the rejection branch once.
  const OTInstance inst = MakeSyntheticInstance(16, SyntheticClass::kShiftedGaussian, 1);
  const SolveResult r = Solve(inst);
  ASSERT_EQ(r.report.status, SolveStatus::kOptimal) << r.report.message;
  int tried = 0;
  int accepted = 0;
  for (const auto& it : r.report.iterations) {
    EXPECT_LE(it.correctors_accepted, it.correctors_tried);
    EXPECT_LE(it.correctors_tried, 3);
    tried += it.correctors_tried;
    accepted += it.correctors_accepted;
  }
  EXPECT_GT(accepted, 0);
  EXPECT_GT(tried, accepted);
}

TEST(Solve, NoCorrectorsStillConverges) {
  const OTInstance inst = MakeSyntheticInstance(4, SyntheticClass::kGaussianBlob, 1);
  SolverConfig cfg;
  cfg.max_correctors = 0;
  const SolveResult r = Solve(inst, cfg);
  ASSERT_EQ(r.report.status, SolveStatus::kOptimal) << r.report.message;
  for (const auto& it : r.report.iterations) EXPECT_EQ(it.correctors_tried, 0);
  const ReferenceSolution ref = ReferenceSolve(inst);
  EXPECT_LE(ComputeRwe(r.report, ref).value, 1e-5);
}

TEST(Solve, WassersteinUsesQ) {
  const OTInstance inst({1.0}, {1.0}, ExplicitCost{{4.0}});
  SolverConfig cfg;
  cfg.q = 2;
  const SolveResult r = Solve(inst, cfg);
  EXPECT_EQ(r.report.q, 2);
  EXPECT_NEAR(r.report.wasserstein(), 2.0, 1e-5);
  EXPECT_NEAR(r.report.wasserstein(1), r.report.objective, 0.0);
}

TEST(NewtonDirection, ZeroAtCenteredFeasiblePoint) {
  const int m = 3;
  const int n = 3;
  std::mt19937_64 rng(12);
  const auto support = testing::RandomConnectedSupport(m, n, 3, rng);
  const std::size_t psi = support.size();
  std::uniform_real_distribution<double> unit(0.5, 2.0);
  std::vector<double> p(psi), s(psi);
  const double mu = 0.7;
  for (std::size_t t = 0; t < psi; ++t) {
    p[t] = unit(rng);
    s[t] = mu / p[t];
  }
  // Feasible means r1 = 0 and r2 = 0; sigma = 1 gives r3 = mu e - p s = 0.
  const std::vector<double> r1(m + n, 0.0), r2(psi, 0.0);
  std::vector<double> r3(psi);
  for (std::size_t t = 0; t < psi; ++t) r3[t] = 1.0 * mu - p[t] * s[t];
  const SchurSystem sys = SchurSystem::Assemble(support, Theta(p, s), m, n);
  const NewtonDirection d =
      ComputeNewtonDirection(support, p, s, r1, r2, r3, sys, DensePseudoInverse(sys), m, n);
  for (double v : d.dp) EXPECT_NEAR(v, 0.0, 1e-14);
  for (double v : d.dy) EXPECT_NEAR(v, 0.0, 1e-14);
  for (double v : d.ds) EXPECT_NEAR(v, 0.0, 1e-14);
}

// The reduced direction against a dense solve of the unreduced system
//   [A 0 0; 0 A^T I; S 0 P] [dp; dy; ds] = [r1; r2; r3].
TEST(NewtonDirection, MatchesDenseFullSystem) {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 50; ++trial) {
    const int m = 2 + trial % 4;
    const int n = 2 + (trial / 4) % 4;
    const auto support = trial == 0 ? std::vector<VarIndex>{0, 1, 2, 3}
                                    : testing::RandomConnectedSupport(m, n, m, rng);
    const int mm = trial == 0 ? 2 : m;
    const int nn = trial == 0 ? 2 : n;
    const auto psi = static_cast<Eigen::Index>(support.size());
    std::uniform_real_distribution<double> unit(0.1, 3.0);
    std::normal_distribution<double> gauss;
    std::vector<double> p(psi), s(psi), r2(psi), r3(psi);
    for (Eigen::Index t = 0; t < psi; ++t) {
      p[t] = unit(rng);
      s[t] = unit(rng);
      r2[t] = gauss(rng);
      r3[t] = gauss(rng);
    }
    const Eigen::MatrixXd A = testing::DenseRestrictedA(mm, nn, support);
    // r1 must lie in range(A).
    Eigen::VectorXd z(psi);
    for (Eigen::Index t = 0; t < psi; ++t) z[t] = gauss(rng);
    const std::vector<double> r1 = ToStd(A * z);

    const SchurSystem sys = SchurSystem::Assemble(support, Theta(p, s), mm, nn);
    const NewtonDirection d =
        ComputeNewtonDirection(support, p, s, r1, r2, r3, sys, DensePseudoInverse(sys), mm, nn);

    const Eigen::Index rows = mm + nn;
    Eigen::MatrixXd K = Eigen::MatrixXd::Zero(rows + 2 * psi, 2 * psi + rows);
    K.block(0, 0, rows, psi) = A;
    K.block(rows, psi, psi, rows) = A.transpose();
    K.block(rows, psi + rows, psi, psi) = Eigen::MatrixXd::Identity(psi, psi);
    K.block(rows + psi, 0, psi, psi) = ToEigen(s).asDiagonal();
    K.block(rows + psi, psi + rows, psi, psi) = ToEigen(p).asDiagonal();
    Eigen::VectorXd rhs(rows + 2 * psi);
    rhs << ToEigen(r1), ToEigen(r2), ToEigen(r3);
    const Eigen::VectorXd sol = K.completeOrthogonalDecomposition().solve(rhs);
    const Eigen::VectorXd dp = sol.head(psi);
    const Eigen::VectorXd dy = sol.segment(psi, rows);
    const Eigen::VectorXd ds = sol.tail(psi);

    const double tol = 1e-8;
    EXPECT_LE((ToEigen(d.dp) - dp).cwiseAbs().maxCoeff(), tol) << "trial " << trial;
    EXPECT_LE((ToEigen(d.ds) - ds).cwiseAbs().maxCoeff(), tol) << "trial " << trial;
    // dy is unique up to the left null direction of A.
    EXPECT_LE((A.transpose() * (ToEigen(d.dy) - dy)).cwiseAbs().maxCoeff(), tol);

    // Block residuals by substitution.
    EXPECT_LE((A * ToEigen(d.dp) - ToEigen(r1)).cwiseAbs().maxCoeff(), tol);
    EXPECT_LE((A.transpose() * ToEigen(d.dy) + ToEigen(d.ds) - ToEigen(r2)).cwiseAbs().maxCoeff(),
              tol);
    for (Eigen::Index t = 0; t < psi; ++t) {
      EXPECT_NEAR(s[t] * d.dp[t] + p[t] * d.ds[t], r3[t], tol);
    }
  }
}

TEST(StepToBoundary, RatioTest) {
  const std::vector<double> x{1.0, 2.0, 3.0};
  const std::vector<double> dx{-2.0, 1.0, 0.0};  // -x_0 / 0.5
  EXPECT_DOUBLE_EQ(StepToBoundary(x, dx, 0.995), 0.995 * 0.5);
}

TEST(StepToBoundary, ZeroDirectionTakesFullStep) {
  const std::vector<double> x{1.0, 2.0};
  const std::vector<double> dx{0.0, 0.0};
  EXPECT_DOUBLE_EQ(StepToBoundary(x, dx, 0.995), 1.0);
}

TEST(StepToBoundary, FarBoundaryIsCappedAtOne) {
  const std::vector<double> x{1.0};
  const std::vector<double> dx{-0.5};
  EXPECT_DOUBLE_EQ(StepToBoundary(x, dx, 0.995), 1.0);
}

TEST(StepToBoundary, KeepsIterateStrictlyPositive) {
  std::mt19937_64 rng(14);
  std::uniform_real_distribution<double> pos(1e-6, 10.0);
  std::normal_distribution<double> gauss(0.0, 5.0);
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<double> x(8), dx(8);
    for (double& v : x) v = pos(rng);
    for (double& v : dx) v = gauss(rng);
    const double alpha = StepToBoundary(x, dx, 0.995);
    EXPECT_GT(alpha, 0.0);
    EXPECT_LE(alpha, 1.0);
    for (int t = 0; t < 8; ++t) EXPECT_GT(x[t] + alpha * dx[t], 0.0);
  }
}

TEST(InitialIterate, UniformInstanceGivesUniformPrimal) {
  const int m = 4;
  std::vector<double> a(m, 0.25);
  const OTInstance inst(a, a, ExplicitCost{std::vector<double>(m * m, 2.0)});
  const Support support = InitialSupport(inst, 3.0);
  const Iterate it = InitialIterate(inst, support);
  ASSERT_EQ(it.p.size(), support.size());
  for (double v : it.p) EXPECT_DOUBLE_EQ(v, it.p.front());
  EXPECT_DOUBLE_EQ(it.p.front(), 1.0 / static_cast<double>(support.size()));
}

TEST(InitialIterate, PositiveAndConsistentMu) {
  std::mt19937_64 rng(15);
  for (int trial = 0; trial < 50; ++trial) {
    const int m = 2 + trial % 7;
    const int n = 2 + trial % 5;
    const OTInstance inst = RandomInstance(m, n, static_cast<RandomCost>(trial % 4), rng);
    const Support support = InitialSupport(inst, 5.0);
    const Iterate it = InitialIterate(inst, support, 37.0);
    ASSERT_EQ(it.s.size(), support.size());
    ASSERT_EQ(it.y.size(), static_cast<std::size_t>(m + n));
    double dot = 0.0;
    for (std::size_t t = 0; t < it.p.size(); ++t) {
      EXPECT_GT(it.p[t], 0.0);
      EXPECT_GE(it.s[t], 1.0);
      dot += it.p[t] * it.s[t];
    }
    EXPECT_NEAR(it.mu, dot / static_cast<double>(it.p.size()), 1e-14 * it.mu);
  }
}

TEST(SolveStatus, Names) {
  EXPECT_EQ(SolveStatusName(SolveStatus::kOptimal), "optimal");
  EXPECT_EQ(SolveStatusName(SolveStatus::kIterationLimit), "iteration_limit");
  EXPECT_EQ(SolveStatusName(SolveStatus::kNumericalFailure), "numerical_failure");
}

}  // namespace
}  // namespace otkit
