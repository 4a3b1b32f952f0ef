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

// Acceptance run: one PASS/FAIL line per criterion, nonzero exit when any
// criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "otkit/graphcheck.hpp"
#include "otkit/ipm.hpp"
#include "otkit/linsolve.hpp"
#include "otkit/oracle.hpp"
#include "otkit/schur.hpp"
#include "test_util.hpp"

namespace otkit {
namespace {

using Clock = std::chrono::steady_clock;
using testing::RandomCost;

double Seconds(Clock::time_point since) {
  return std::chrono::duration<double>(Clock::now() - since).count();
}

int failures = 0;

void Report(bool pass, const std::string& name, const std::string& detail) {
  fmt::print("{} {}: {}\n", pass ? "PASS" : "FAIL", name, detail);
  std::fflush(stdout);
  if (!pass) ++failures;
}

double FNorm(const OTInstance& inst) {
  double acc = 0.0;
  for (double v : inst.a()) acc += v * v;
  for (double v : inst.b()) acc += v * v;
  return std::sqrt(acc);
}

double MarginalViolation(const OTInstance& inst, const TransportPlan& plan) {
  const auto rows = plan.RowSums();
  const auto cols = plan.ColumnSums();
  double worst = 0.0;
  for (int i = 0; i < inst.m(); ++i) worst = std::max(worst, std::abs(rows[i] - inst.a()[i]));
  for (int k = 0; k < inst.n(); ++k) worst = std::max(worst, std::abs(cols[k] - inst.b()[k]));
  return worst;
}

// Shared by the oracle, marginal and sparsity criteria.
struct SmallRunStats {
  int solves = 0;
  int not_optimal = 0;
  double worst_rwe = 0.0;
  std::string worst_rwe_case;
  int marginal_checked = 0;
  double worst_marginal_ratio = 0.0;  // violation / (1 + ||f||)
  int sparsity_checked = 0;
  int sparsity_violations = 0;
  std::string sparsity_example;
  double seconds = 0.0;
};

void RecordPlan(const OTInstance& inst, const SolveResult& r, SmallRunStats& st) {
  if (r.report.status != SolveStatus::kOptimal) return;
  ++st.marginal_checked;
  st.worst_marginal_ratio =
      std::max(st.worst_marginal_ratio, MarginalViolation(inst, r.plan) / (1.0 + FNorm(inst)));
}

SmallRunStats OracleSweep() {
  SmallRunStats st;
  const auto start = Clock::now();
  std::mt19937_64 rng(20240601);
  for (RandomCost kind :
       {RandomCost::kL1, RandomCost::kL2, RandomCost::kLinf, RandomCost::kExplicit}) {
    for (int m = 2; m <= 8; ++m) {
      for (int n = 2; n <= 8; ++n) {
        for (int rep = 0; rep < 100; ++rep) {
          const OTInstance inst = testing::RandomInstance(m, n, kind, rng);
          const SolveResult r = Solve(inst);
          ++st.solves;
          if (r.report.status != SolveStatus::kOptimal) {
            ++st.not_optimal;
            continue;
          }
          const ReferenceSolution ref = ReferenceSolve(inst);
          const double rwe = ComputeRwe(r.report, ref).value;
          if (rwe > st.worst_rwe) {
            st.worst_rwe = rwe;
            st.worst_rwe_case = fmt::format("{} {}x{} #{}", testing::RandomCostName(kind), m, n, rep);
          }
          RecordPlan(inst, r, st);
          if (ref.nondegenerate && ref.unique_optimum) {
            ++st.sparsity_checked;
            const std::size_t nnz = r.plan.CountAbove(1e-8);
            if (nnz > static_cast<std::size_t>(m + n - 1)) {
              if (st.sparsity_violations == 0) {
                st.sparsity_example = fmt::format("{} {}x{} #{}: {} > {}",
                                                  testing::RandomCostName(kind), m, n, rep, nnz,
                                                  m + n - 1);
              }
              ++st.sparsity_violations;
            }
          }
        }
      }
    }
  }
  st.seconds = Seconds(start);
  return st;
}

// Larger nondegenerate instances for the sparsity bound.
void SparsitySweep(SmallRunStats& st) {
  std::mt19937_64 rng(77);
  for (int rep = 0; rep < 40; ++rep) {
    const int m = 10 + rep % 5 * 5;
    const int n = 10 + rep / 5 % 4 * 5;
    const OTInstance inst = testing::RandomInstance(m, n, RandomCost::kExplicit, rng);
    const ReferenceSolution ref = ReferenceSolve(inst);
    if (!(ref.nondegenerate && ref.unique_optimum)) continue;
    const SolveResult r = Solve(inst);
    RecordPlan(inst, r, st);
    if (r.report.status != SolveStatus::kOptimal) {
      ++st.not_optimal;
      continue;
    }
    ++st.sparsity_checked;
    const std::size_t nnz = r.plan.CountAbove(1e-8);
    if (nnz > static_cast<std::size_t>(m + n - 1)) {
      if (st.sparsity_violations == 0) {
        st.sparsity_example = fmt::format("explicit {}x{}: {} > {}", m, n, nnz, m + n - 1);
      }
      ++st.sparsity_violations;
    }
  }
}

void SchurIdentities() {
  const OTInstance inst = MakeSyntheticInstance(8, SyntheticClass::kGaussianBlob, 1);
  SolverConfig cfg;
  int systems = 0;
  double worst_row = 0.0;
  double worst_null = 0.0;
  cfg.on_schur = [&](int, const SchurSystem& sys) {
    ++systems;
    std::vector<double> ones_m(sys.m(), 1.0), ones_n(sys.n(), 1.0), ve(sys.m()), vte(sys.n());
    sys.MultiplyV(ones_n, ve);
    sys.MultiplyVt(ones_m, vte);
    for (int i = 0; i < sys.m(); ++i) {
      worst_row = std::max(worst_row, std::abs(ve[i] - sys.M()[i]) / sys.M()[i]);
    }
    for (int k = 0; k < sys.n(); ++k) {
      worst_row = std::max(worst_row, std::abs(vte[k] - sys.N()[k]) / sys.N()[k]);
    }
    std::vector<double> e(sys.dim(), 1.0), se(sys.dim());
    sys.Multiply(e, se);
    for (double v : se) worst_null = std::max(worst_null, std::abs(v));
  };
  const SolveResult r = Solve(inst, cfg);
  const bool pass = r.report.status == SolveStatus::kOptimal && systems > 0 &&
                    worst_row <= 1e-12 && worst_null <= 1e-10;
  Report(pass, "schur-identities",
         fmt::format("{} systems, max rel |Ve-Me|,|V^Te-Ne| = {:.2e} (<= 1e-12), max |S e| = "
                     "{:.2e} (<= 1e-10), status {}",
                     systems, worst_row, worst_null, SolveStatusName(r.report.status)));
}

void SecondaryGraphTheorem() {
  const auto start = Clock::now();
  std::mt19937_64 rng(4242);
  long long sampled = 0;
  long long hypothesis = 0;
  long long violations = 0;
  while (hypothesis < 10000) {
    const int m = 1 + static_cast<int>(rng() % 12);
    const int n = 1 + static_cast<int>(rng() % 12);
    const double density = 0.05 + 0.35 * std::uniform_real_distribution<double>()(rng);
    std::bernoulli_distribution keep(density);
    std::vector<std::pair<int, int>> edges;
    for (int i = 0; i < m; ++i) {
      for (int k = 0; k < n; ++k) {
        if (keep(rng)) edges.emplace_back(i, k);
      }
    }
    const BipartiteGraph g(m, n, std::move(edges));
    ++sampled;
    if (FindChordlessCycle(g).found) continue;
    ++hypothesis;
    if (!IsChordal(SecondaryGraph(g, BipartiteSide::kLeft)).chordal) ++violations;
  }
  const BipartiteGraph cycle(
      4, 4, {{0, 0}, {1, 0}, {1, 1}, {2, 1}, {2, 2}, {3, 2}, {3, 3}, {0, 3}});
  const bool witness = FindChordlessCycle(cycle).found &&
                       !IsChordal(SecondaryGraph(cycle, BipartiteSide::kLeft)).chordal;
  const double secs = Seconds(start);
  Report(violations == 0 && witness && secs <= 60.0, "secondary-graph-chordality",
         fmt::format("{} graphs without chordless >=8-cycles ({} sampled), {} non-chordal "
                     "secondary graphs, 8-cycle witness non-chordal: {}, {:.1f} s (<= 60 s)",
                     hypothesis, sampled, violations, witness ? "yes" : "no", secs));
}

void ZeroFill() {
  std::mt19937_64 rng(5150);
  int plans = 0;
  int chordal = 0;
  int zero_fill = 0;
  for (int rep = 0; rep < 50; ++rep) {
    const int m = 5 + static_cast<int>(rng() % 26);
    const int n = 5 + static_cast<int>(rng() % 26);
    const OTInstance inst = testing::RandomInstance(m, n, static_cast<RandomCost>(rep % 4), rng);
    const ReferenceSolution ref = ReferenceSolve(inst);
    ++plans;
    // V^T V + I over the plan's pattern.
    Eigen::MatrixXd v = Eigen::Map<const Eigen::MatrixXd>(ref.plan.data(), m, n);
    std::vector<VarIndex> index;
    for (VarIndex j = 0; j < static_cast<VarIndex>(m) * n; ++j) {
      if (ref.plan[j] > 0.0) index.push_back(j);
    }
    const Graph sg = SecondaryGraph(BipartiteGraph::FromSupport(m, n, index), BipartiteSide::kRight);
    if (IsChordal(sg).chordal) ++chordal;
    const Eigen::MatrixXd s = v.transpose() * v + Eigen::MatrixXd::Identity(n, n);
    const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rm = s;
    const SparseSymmetric sparse =
        SparseSymmetric::FromDense(n, std::span<const double>(rm.data(), rm.size()));
    const std::vector<int> order = MaximumCardinalitySearch(Graph::FromPattern(sparse));
    LdltOptions options;
    options.ordering = OrderingPolicy::kGiven;
    options.permutation = order;
    const LdltFactorization f = LdltFactorization::Factorize(sparse, options);
    if (ZeroFillVerify(Graph::FromPattern(sparse), order) && f.fill_ratio() == 1.0) ++zero_fill;
  }
  Report(chordal == plans && zero_fill == plans, "zero-fill",
         fmt::format("{} oracle plans: {} chordal V^T V patterns, {} zero-fill LDL^T under MCS",
                     plans, chordal, zero_fill));
}

void PhaseSwitching() {
  bool pass = true;
  std::string detail;
  for (int res : {8, 16}) {
    const OTInstance inst = MakeSyntheticInstance(res, SyntheticClass::kGaussianBlob, 1);
    const SolveResult r = Solve(inst);
    const auto& rep = r.report;
    const double share =
        rep.ipm_iters > 0 ? static_cast<double>(rep.direct_phase_iters) / rep.ipm_iters : 1.0;
    const bool ok =
        rep.status == SolveStatus::kOptimal && rep.phase_switches == 1 && share <= 0.25;
    pass = pass && ok;
    detail += fmt::format("{}res {}: {} switch(es), {}/{} direct ({:.0f}%)", detail.empty() ? "" : "; ",
                          res, rep.phase_switches, rep.direct_phase_iters, rep.ipm_iters,
                          100.0 * share);
  }
  Report(pass, "phase-switching", detail + " (exactly 1 switch, <= 25% direct)");
}

void Scaling() {
  bool pass = true;
  double previous_fill = 101.0;
  std::string detail;
  for (int res : {8, 16, 32}) {
    const OTInstance inst = MakeSyntheticInstance(res, SyntheticClass::kUniformRandom, 1);
    const auto start = Clock::now();
    const SolveResult r = Solve(inst);
    const double secs = Seconds(start);
    const auto& rep = r.report;
    bool ok = rep.status == SolveStatus::kOptimal && rep.ipm_iters <= 200 &&
              rep.max_fill_percent <= previous_fill;
    if (res == 32) ok = ok && secs <= 300.0;
    pass = pass && ok;
    previous_fill = rep.max_fill_percent;
    detail += fmt::format("{}res {}: {} in {} iters, fill {:.2f}%, {:.2f} s",
                          detail.empty() ? "" : "; ", res, SolveStatusName(rep.status),
                          rep.ipm_iters, rep.max_fill_percent, secs);
  }
  Report(pass, "scaling", detail + " (<= 200 iters, fill non-increasing, res 32 <= 300 s)");
}

void DeflatedPcg() {
  std::mt19937_64 rng(8080);
  int systems = 0;
  double worst_residual = 0.0;
  double worst_gap = 0.0;
  for (int rep = 0; rep < 50; ++rep) {
    const int m = 2 + static_cast<int>(rng() % 7);
    const int n = 2 + static_cast<int>(rng() % 7);
    const auto support = testing::RandomConnectedSupport(m, n, static_cast<std::size_t>(m), rng);
    std::uniform_real_distribution<double> exponent(-2.0, 2.0);
    std::vector<double> theta(support.size());
    for (double& t : theta) t = std::pow(10.0, exponent(rng));
    const SchurSystem sys = SchurSystem::Assemble(support, theta, m, n);
    ++systems;

    std::normal_distribution<double> gauss;
    std::vector<double> beta1(m), beta2(n);
    for (double& b : beta1) b = gauss(rng);
    for (double& b : beta2) b = gauss(rng);

    const LinearOperator op = [&](std::span<const double> x, std::span<double> y) {
      sys.Multiply(x, y);
    };
    const IncompleteCholesky ic =
        IncompleteCholesky::Factorize(sys.AssembleSparse(0.0, 1u << 20), 1e-2, 0.0);
    const LinearOperator pre = [&](std::span<const double> r, std::span<double> z) {
      ic.Apply(r, z);
    };
    std::vector<double> a1(m), a2(n);
    sys.SolveBlock(
        beta1, beta2,
        [&](std::span<const double> r, std::span<double> x) {
          std::fill(x.begin(), x.end(), 0.0);
          Pcg(op, r, pre, x, 1e-13, 1000, true);
        },
        a1, a2);

    // Dense least-squares oracle on the full block matrix.
    const Eigen::MatrixXd R = testing::DenseRestrictedA(m, n, support);
    const Eigen::MatrixXd K = R * testing::ToEigen(theta).asDiagonal() * R.transpose();
    Eigen::VectorXd beta(m + n);
    beta << testing::ToEigen(beta1), testing::ToEigen(beta2);
    const Eigen::VectorXd ls = K.completeOrthogonalDecomposition().solve(beta);
    Eigen::VectorXd got(m + n);
    got << testing::ToEigen(a1), testing::ToEigen(a2);
    // Residuals against the least-squares solution's own residual.
    worst_residual = std::max(worst_residual, (K * got - K * ls).cwiseAbs().maxCoeff() /
                                                  std::max(1.0, beta.cwiseAbs().maxCoeff()));
    worst_gap = std::max(worst_gap, (got - ls).cwiseAbs().maxCoeff() /
                                        std::max(1.0, ls.cwiseAbs().maxCoeff()));
  }
  Report(worst_residual <= 1e-8 && worst_gap <= 1e-8, "deflated-pcg",
         fmt::format("{} singular systems: max block residual vs least squares {:.2e}, max "
                     "solution gap {:.2e} (<= 1e-8)",
                     systems, worst_residual, worst_gap));
}

}  // namespace
}  // namespace otkit

int main() {
  using namespace otkit;
  SmallRunStats st = OracleSweep();
  Report(st.not_optimal == 0 && st.worst_rwe <= 1e-5 && st.seconds <= 120.0, "oracle-equivalence",
         fmt::format("{} solves, {} not optimal, max RWE {:.2e} ({}) (<= 1e-5), {:.1f} s (<= 120 s)",
                     st.solves, st.not_optimal, st.worst_rwe, st.worst_rwe_case, st.seconds));
  SparsitySweep(st);
  Report(st.worst_marginal_ratio <= 1e-6, "marginal-feasibility",
         fmt::format("{} plans, max ||Pe-a||,||P^Te-b|| / (1+||f||) = {:.2e} (<= 1e-6)",
                     st.marginal_checked, st.worst_marginal_ratio));
  Report(st.sparsity_checked > 0 && st.sparsity_violations == 0, "sparsity-bound",
         fmt::format("{} nondegenerate unique instances, {} with more than m+n-1 entries above "
                     "1e-8{}",
                     st.sparsity_checked, st.sparsity_violations,
                     st.sparsity_example.empty() ? "" : " (first: " + st.sparsity_example + ")"));
  SchurIdentities();
  SecondaryGraphTheorem();
  ZeroFill();
  PhaseSwitching();
  Scaling();
  DeflatedPcg();
  fmt::print("{} of 9 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
