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

#include "otkit/ipm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "otkit/errors.hpp"
#include "otkit/kron_ops.hpp"

namespace otkit {
namespace {

double Norm2(std::span<const double> v) {
  double acc = 0.0;
  for (double x : v) acc += x * x;
  return std::sqrt(acc);
}

double Dot(std::span<const double> x, std::span<const double> y) {
  double acc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) acc += x[i] * y[i];
  return acc;
}

bool AllFinite(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

void Validate(const SolverConfig& cfg) {
  const auto require = [](bool ok, std::string_view what) {
    if (!ok) throw ParameterError(fmt::format("invalid solver configuration: {}", what));
  };
  require(cfg.tol > 0.0, "tol must be > 0");
  require(cfg.max_ipm_iters >= 0, "max_ipm_iters must be >= 0");
  require(cfg.max_cg_iters >= 1, "max_cg_iters must be >= 1");
  require(cfg.max_correctors >= 0, "max_correctors must be >= 0");
  require(cfg.cg_tol_predictor > 0.0 && cfg.cg_tol_corrector > 0.0,
          "CG tolerances must be > 0");
  require(cfg.support_multiplier >= 1.0, "support multiplier must be >= 1");
  require(cfg.refresh_period >= 1, "refresh period must be >= 1");
  require(cfg.switch_threshold > 0.0, "switch threshold must be > 0");
  require(cfg.gamma > 0.0 && cfg.gamma < 1.0, "gamma must lie in (0, 1)");
  require(cfg.step_fraction > 0.0 && cfg.step_fraction < 1.0,
          "step fraction must lie in (0, 1)");
  require(cfg.q >= 0, "q must be >= 0");
}

// Linear solver for one IPM iteration: a preconditioned CG or an exact
// factorization of the current Schur complement.
class IterationSolver {
 public:
  IterationSolver(const SchurSystem& system, SolverMode mode, const SolverPhase& phase,
                  const SolverConfig& cfg, SolveReport& report)
      : system_(system), cfg_(cfg), report_(report), mode_(mode) {
    if (mode_ == SolverMode::kDirect) {
      try {
        const SparseSymmetric plain = system.AssembleSparse(0.0, cfg.max_schur_nnz);
        const double lift = cfg.direct_lift_relative * plain.MaxDiagonal();
        SparseSymmetric lifted = plain;
        for (int j = 0; j < lifted.dim; ++j) {
          if (lifted.col_ptr[j] < lifted.col_ptr[j + 1] &&
              lifted.row_idx[lifted.col_ptr[j]] == j) {
            lifted.values[lifted.col_ptr[j]] += lift;
          }
        }
        LdltOptions options;
        options.ordering = cfg.ordering;
        ldlt_ = LdltFactorization::Factorize(lifted, options);
        return;
      } catch (const ResourceError& e) {
        spdlog::warn("direct solve unavailable ({}); using CG for this iteration", e.what());
        mode_ = SolverMode::kIterative;
      }
    }
    try {
      const SparseSymmetric plain = system.AssembleSparse(0.0, cfg.max_schur_nnz);
      ic_ = IncompleteCholesky::Factorize(plain, phase.drop_tolerance(), 0.0);
    } catch (const ResourceError& e) {
      spdlog::warn("incomplete factorization skipped ({})", e.what());
    }
  }

  SolverMode mode() const { return mode_; }
  double fill_percent() const { return ldlt_ ? ldlt_->fill_percent() : 0.0; }

  // Returns the CG iteration count (0 for direct solves).
  int Solve(std::span<const double> rhs, std::span<double> x, double tolerance) {
    LinearSolveTelemetry t;
    t.mode = mode_;
    if (ldlt_) {
      ldlt_->Solve(rhs, x);
      const double mean = std::accumulate(x.begin(), x.end(), 0.0) /
                          static_cast<double>(std::max<std::size_t>(x.size(), 1));
      for (double& v : x) v -= mean;
      t.factor_nnz = ldlt_->nnz();
      t.fill_ratio = ldlt_->fill_ratio();
      report_.linear_solves.push_back(t);
      return 0;
    }
    const LinearOperator op = [this](std::span<const double> v, std::span<double> out) {
      system_.Multiply(v, out);
    };
    LinearOperator precond;
    if (ic_) {
      precond = [this](std::span<const double> r, std::span<double> z) { ic_->Apply(r, z); };
      t.factor_nnz = ic_->nnz();
    }
    const PcgResult result = Pcg(op, rhs, precond, x, tolerance, cfg_.max_cg_iters, true);
    t.iterations = result.iterations;
    t.relative_residual = result.relative_residual;
    report_.linear_solves.push_back(t);
    report_.cg_iters_total += result.iterations;
    return result.iterations;
  }

 private:
  const SchurSystem& system_;
  const SolverConfig& cfg_;
  SolveReport& report_;
  SolverMode mode_;
  std::optional<LdltFactorization> ldlt_;
  std::optional<IncompleteCholesky> ic_;
};

struct Residuals {
  std::vector<double> r1;
  std::vector<double> r2;
  double primal = 0.0;
  double dual = 0.0;
};

Residuals ComputeResiduals(const ConstraintOperator& op, std::span<const VarIndex> index,
                           std::span<const double> f, std::span<const double> c_red,
                           const Iterate& it) {
  Residuals r;
  r.r1.assign(f.size(), 0.0);
  op.ApplyRestricted(it.p, index, r.r1);
  for (std::size_t i = 0; i < f.size(); ++i) r.r1[i] = f[i] - r.r1[i];
  r.r2.assign(index.size(), 0.0);
  op.ApplyTransposeRestricted(it.y, index, r.r2);
  for (std::size_t t = 0; t < index.size(); ++t) r.r2[t] = c_red[t] - r.r2[t] - it.s[t];
  r.primal = Norm2(r.r1) / (1.0 + Norm2(f));
  r.dual = Norm2(r.r2) / (1.0 + Norm2(c_red));
  return r;
}

double ComplementarityMu(std::span<const double> p, std::span<const double> s) {
  if (p.empty()) return 0.0;
  return Dot(p, s) / static_cast<double>(p.size());
}

}  // namespace

std::string_view SolveStatusName(SolveStatus status) {
  switch (status) {
    case SolveStatus::kOptimal:
      return "optimal";
    case SolveStatus::kIterationLimit:
      return "iteration_limit";
    case SolveStatus::kNumericalFailure:
      return "numerical_failure";
  }
  return "unknown";
}

double SolveReport::wasserstein(int q_override) const {
  const int exponent = q_override > 0 ? q_override : q;
  const double value = std::max(objective, 0.0);
  return exponent == 1 ? value : std::pow(value, 1.0 / exponent);
}

std::vector<double> TransportPlan::RowSums() const {
  std::vector<double> out(m, 0.0);
  for (std::size_t t = 0; t < index.size(); ++t) out[index[t] % m] += value[t];
  return out;
}

std::vector<double> TransportPlan::ColumnSums() const {
  std::vector<double> out(n, 0.0);
  for (std::size_t t = 0; t < index.size(); ++t) out[index[t] / m] += value[t];
  return out;
}

std::vector<double> TransportPlan::Dense() const {
  std::vector<double> out(static_cast<std::size_t>(m) * n, 0.0);
  for (std::size_t t = 0; t < index.size(); ++t) out[index[t]] = value[t];
  return out;
}

std::size_t TransportPlan::CountAbove(double threshold) const {
  return static_cast<std::size_t>(
      std::count_if(value.begin(), value.end(), [&](double v) { return v > threshold; }));
}

NewtonDirection ComputeNewtonDirection(
    std::span<const VarIndex> support, std::span<const double> p,
    std::span<const double> s, std::span<const double> r1, std::span<const double> r2,
    std::span<const double> r3, const SchurSystem& system,
    const SchurSystem::SchurSolve& schur_solve, int m, int n) {
  const std::size_t psi = support.size();
  if (p.size() != psi || s.size() != psi || r2.size() != psi || r3.size() != psi ||
      r1.size() != static_cast<std::size_t>(m + n)) {
    throw DimensionError("Newton direction: inputs not aligned with the support");
  }
  const ConstraintOperator op(m, n);
  // w = Theta (r2 - r3 / p) = (p r2 - r3) / s.
  std::vector<double> w(psi);
  for (std::size_t t = 0; t < psi; ++t) w[t] = (p[t] * r2[t] - r3[t]) / s[t];
  std::vector<double> rhs(m + n);
  op.ApplyRestricted(w, support, rhs);
  for (int i = 0; i < m + n; ++i) rhs[i] += r1[i];

  NewtonDirection d;
  d.dy.assign(m + n, 0.0);
  system.SolveBlock(std::span<const double>(rhs).first(m),
                    std::span<const double>(rhs).subspan(m), schur_solve,
                    std::span<double>(d.dy).first(m), std::span<double>(d.dy).subspan(m));
  d.ds.assign(psi, 0.0);
  op.ApplyTransposeRestricted(d.dy, support, d.ds);
  d.dp.resize(psi);
  for (std::size_t t = 0; t < psi; ++t) {
    d.ds[t] = r2[t] - d.ds[t];
    d.dp[t] = (r3[t] - p[t] * d.ds[t]) / s[t];
  }
  return d;
}

double StepToBoundary(std::span<const double> x, std::span<const double> dx,
                      double fraction) {
  if (x.size() != dx.size()) throw DimensionError("step to boundary: size mismatch");
  double alpha = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (dx[i] < 0.0) alpha = std::min(alpha, -x[i] / dx[i]);
  }
  return std::min(1.0, fraction * alpha);
}

Iterate InitialIterate(const OTInstance& inst, const Support& support,
                       double mass_scale) {
  const auto index = support.index();
  const std::size_t psi = index.size();
  Iterate it;
  const double p0 =
      psi == 0 ? 1e-8 : std::max(mass_scale * inst.total_mass() / static_cast<double>(psi), 1e-8);
  it.p.assign(psi, p0);
  it.s.resize(psi);
  for (std::size_t t = 0; t < psi; ++t) it.s[t] = inst.cost(index[t]) + 1.0;
  const double smallest =
      psi == 0 ? 1.0 : *std::min_element(it.s.begin(), it.s.end());
  if (smallest < 1.0) {
    for (double& v : it.s) v /= smallest;
  }
  it.y.assign(inst.num_constraints(), 0.0);
  it.mu = ComplementarityMu(it.p, it.s);
  return it;
}

SolveResult Solve(const OTInstance& inst, const SolverConfig& cfg) {
  Validate(cfg);
  const int m = inst.m();
  const int n = inst.n();
  const ConstraintOperator op(m, n);
  std::vector<double> f(inst.a().begin(), inst.a().end());
  f.insert(f.end(), inst.b().begin(), inst.b().end());
  const double total = std::accumulate(f.begin(), f.end(), 0.0);
  const double scale = cfg.mass_mean > 0.0 && total > 0.0
                           ? cfg.mass_mean * static_cast<double>(m + n) / total
                           : 1.0;
  for (double& v : f) v *= scale;

  SolveResult result;
  SolveReport& report = result.report;
  report.q = cfg.q > 0 ? cfg.q
                       : (inst.is_grid() &&
                                  std::get<GridMetric>(inst.cost_spec()).metric == Metric::kL2
                              ? 2
                              : 1);

  Support support = InitialSupport(inst, cfg.support_multiplier);
  const double c_max = cfg.c_max >= 0.0 ? cfg.c_max : DefaultCMax(inst.cost_spec());
  support.set_candidates(BuildCandidateSet(inst, c_max));
  support.set_refresh_period(cfg.refresh_period);
  const double pricing_tol = cfg.pricing_tol >= 0.0 ? cfg.pricing_tol : cfg.tol;

  Iterate it = InitialIterate(inst, support, scale);
  SolverPhase::Options phase_options;
  phase_options.switch_threshold = cfg.switch_threshold;
  phase_options.allow_switch_back = cfg.allow_switch_back;
  SolverPhase phase(phase_options);

  double sigma = cfg.sigma_high;
  double previous_mu = it.mu;
  int stalls = 0;
  bool finished = false;
  report.status = SolveStatus::kIterationLimit;
  report.peak_support_size = support.size();

  try {
    while (true) {
      const auto index = support.index();
      std::vector<double> c_red(index.size());
      for (std::size_t t = 0; t < index.size(); ++t) c_red[t] = inst.cost(index[t]);
      Residuals res = ComputeResiduals(op, index, f, c_red, it);
      it.mu = ComplementarityMu(it.p, it.s);
      if (!std::isfinite(it.mu) || !AllFinite(res.r1) || !AllFinite(res.r2)) {
        throw NumericError("non-finite iterate");
      }
      if (std::max({res.primal, res.dual, it.mu}) < cfg.tol) {
        // One extra full reduced-cost scan guards against a support that
        // misses improving variables.
        const auto entering = FullReducedCosts(it.y, inst, support,
                                               static_cast<std::size_t>(m), pricing_tol);
        if (entering.empty()) {
          report.status = SolveStatus::kOptimal;
          finished = true;
          break;
        }
        std::vector<VarIndex> ids;
        for (const auto& v : entering) ids.push_back(v.index);
        UpdateSupport(support, ids, it.p, it.s, it.mu, RemovalPolicy{}, m, n);
        report.peak_support_size = std::max(report.peak_support_size, support.size());
        continue;
      }
      if (report.ipm_iters >= cfg.max_ipm_iters) break;

      IterationLog log;
      log.iteration = report.ipm_iters + 1;
      log.mu = it.mu;
      log.primal_infeasibility = res.primal;
      log.dual_infeasibility = res.dual;
      log.support_size = support.size();
      if (phase.Observe(support.size())) report.phase_switches = phase.switches();
      log.drop_tolerance = phase.drop_tolerance();
      log.sigma = sigma;

      const std::size_t psi = index.size();
      std::vector<double> theta(psi);
      for (std::size_t t = 0; t < psi; ++t) theta[t] = it.p[t] / it.s[t];
      const SchurSystem system = SchurSystem::Assemble(index, theta, m, n);
      if (cfg.on_schur) cfg.on_schur(log.iteration, system);

      IterationSolver solver(system, phase.mode(), phase, cfg, report);
      log.mode = solver.mode();
      log.fill_percent = solver.fill_percent();
      report.max_fill_percent = std::max(report.max_fill_percent, log.fill_percent);

      double tolerance = cfg.cg_tol_predictor;
      const SchurSystem::SchurSolve schur_solve = [&](std::span<const double> rhs,
                                                      std::span<double> x) {
        const int iters = solver.Solve(rhs, x, tolerance);
        log.cg_iterations += iters;
        phase.NoteCgIterations(iters);
      };

      const double target = sigma * it.mu;
      std::vector<double> r3(psi);
      for (std::size_t t = 0; t < psi; ++t) r3[t] = target - it.p[t] * it.s[t];
      NewtonDirection dir = ComputeNewtonDirection(index, it.p, it.s, res.r1, res.r2, r3,
                                                   system, schur_solve, m, n);
      double alpha_p = StepToBoundary(it.p, dir.dp, cfg.step_fraction);
      double alpha_d = StepToBoundary(it.s, dir.ds, cfg.step_fraction);

      tolerance = cfg.cg_tol_corrector;
      const std::vector<double> zero_r1(m + n, 0.0);
      const std::vector<double> zero_r2(psi, 0.0);
      for (int k = 0; k < cfg.max_correctors; ++k) {
        if (alpha_p >= 1.0 && alpha_d >= 1.0) break;
        const double trial_p = std::min(1.0, alpha_p + 0.1);
        const double trial_d = std::min(1.0, alpha_d + 0.1);
        const double lo = cfg.gamma * target;
        const double hi = target / cfg.gamma;
        std::vector<double> corr_r3(psi, 0.0);
        for (std::size_t t = 0; t < psi; ++t) {
          const double v = (it.p[t] + trial_p * dir.dp[t]) * (it.s[t] + trial_d * dir.ds[t]);
          if (v < lo) {
            corr_r3[t] = lo - v;
          } else if (v > hi) {
            corr_r3[t] = std::max(hi - v, -hi);
          }
        }
        ++log.correctors_tried;
        const NewtonDirection corr = ComputeNewtonDirection(
            index, it.p, it.s, zero_r1, zero_r2, corr_r3, system, schur_solve, m, n);
        NewtonDirection candidate = dir;
        for (std::size_t t = 0; t < psi; ++t) {
          candidate.dp[t] += corr.dp[t];
          candidate.ds[t] += corr.ds[t];
        }
        for (int i = 0; i < m + n; ++i) candidate.dy[i] += corr.dy[i];
        const double cand_p = StepToBoundary(it.p, candidate.dp, cfg.step_fraction);
        const double cand_d = StepToBoundary(it.s, candidate.ds, cfg.step_fraction);
        if (cand_p * cand_d > alpha_p * alpha_d) {
          dir = std::move(candidate);
          alpha_p = cand_p;
          alpha_d = cand_d;
          ++log.correctors_accepted;
        } else {
          break;
        }
      }
      if (!AllFinite(dir.dp) || !AllFinite(dir.ds) || !AllFinite(dir.dy)) {
        throw NumericError("non-finite Newton direction");
      }

      if (alpha_p < 1e-12 && alpha_d < 1e-12) {
        if (++stalls >= cfg.max_stalls) {
          throw NumericError(fmt::format("{} consecutive zero steps", stalls));
        }
      } else {
        stalls = 0;
      }
      for (std::size_t t = 0; t < psi; ++t) {
        it.p[t] += alpha_p * dir.dp[t];
        it.s[t] += alpha_d * dir.ds[t];
      }
      for (int i = 0; i < m + n; ++i) it.y[i] += alpha_d * dir.dy[i];
      it.mu = ComplementarityMu(it.p, it.s);
      log.alpha_primal = alpha_p;
      log.alpha_dual = alpha_d;

      if (it.mu > cfg.sigma_switch_mu) {
        sigma = cfg.sigma_high;
      } else {
        const double ratio = previous_mu > 0.0 ? it.mu / previous_mu : 0.0;
        sigma = std::min(cfg.sigma_max, std::max(cfg.sigma_min, ratio * ratio * ratio));
      }
      previous_mu = it.mu;

      // Support update: price, then drop small primal entries.
      const bool full = report.ipm_iters % support.refresh_period() == 0;
      const auto priced =
          full ? FullReducedCosts(it.y, inst, support, static_cast<std::size_t>(m), pricing_tol)
               : HeuristicReducedCosts(it.y, inst, support, static_cast<std::size_t>(m),
                                       pricing_tol);
      std::vector<VarIndex> entering;
      entering.reserve(priced.size());
      for (const auto& v : priced) entering.push_back(v.index);
      RemovalPolicy policy;
      policy.near_convergence = it.mu < cfg.removal_mu;
      policy.threshold =
          cfg.removal_relative * *std::max_element(it.p.begin(), it.p.end());
      policy.require_p_below_s = cfg.removal_indicator;
      policy.max_removed = static_cast<std::size_t>(m);
      const SupportUpdate update =
          UpdateSupport(support, entering, it.p, it.s, it.mu, policy, m, n);
      it.mu = ComplementarityMu(it.p, it.s);
      log.full_pricing = full;
      log.entered = update.entered.size();
      log.removed = update.removed.size();
      log.vetoed = update.vetoed.size();
      report.peak_support_size = std::max(report.peak_support_size, support.size());

      if (log.mode == SolverMode::kDirect) {
        ++report.direct_phase_iters;
      } else {
        ++report.iterative_phase_iters;
      }
      ++report.ipm_iters;
      report.iterations.push_back(log);
    }
    if (!finished) {
      report.message = fmt::format("iteration limit {} reached", cfg.max_ipm_iters);
    }
  } catch (const NumericError& e) {
    report.status = SolveStatus::kNumericalFailure;
    report.message = e.what();
    spdlog::warn("solve stopped: {}", e.what());
  }
  report.phase_switches = phase.switches();

  const auto index = support.index();
  result.plan.m = m;
  result.plan.n = n;
  result.plan.index.assign(index.begin(), index.end());
  result.plan.value = it.p;
  for (double& v : result.plan.value) v /= scale;
  report.mass_scale = scale;
  result.y = it.y;
  double objective = 0.0;
  double min_rc = MinReducedCost(it.y, inst, support);
  for (std::size_t t = 0; t < index.size(); ++t) {
    const VarIndex j = index[t];
    const double c = inst.cost(j);
    objective += c * result.plan.value[t];
    min_rc = std::min(min_rc, c - it.y[j % m] - it.y[m + j / m]);
  }
  report.objective = objective;
  report.min_reduced_cost = min_rc;
  report.final_mu = ComplementarityMu(it.p, it.s);
  report.final_support_size = index.size();
  return result;
}

}  // namespace otkit
