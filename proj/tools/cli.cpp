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

#include "cli.hpp"

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include "otkit/errors.hpp"
#include "otkit/instance.hpp"
#include "otkit/oracle.hpp"

namespace otkit::cli {
namespace {

// A failure that maps to the usage exit code.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void AddSolverOptions(CLI::App* cmd, SolverConfig& cfg) {
  cmd->add_option("--tol", cfg.tol, "Feasibility and optimality tolerance")
      ->capture_default_str();
  cmd->add_option("--max-ipm-iters", cfg.max_ipm_iters, "IPM iteration limit")
      ->capture_default_str();
  cmd->add_option("--max-cg-iters", cfg.max_cg_iters, "CG iterations per call")
      ->capture_default_str();
  cmd->add_option("--max-correctors", cfg.max_correctors, "Centrality correctors per step")
      ->capture_default_str();
  cmd->add_option("--cg-tol-predictor", cfg.cg_tol_predictor)->capture_default_str();
  cmd->add_option("--cg-tol-corrector", cfg.cg_tol_corrector)->capture_default_str();
  cmd->add_option("--support-multiplier", cfg.support_multiplier,
                  "Initial support size over m+n-1")
      ->capture_default_str();
  cmd->add_option("--refresh-period", cfg.refresh_period,
                  "Iterations between full pricing scans")
      ->capture_default_str();
  cmd->add_option("--switch-threshold", cfg.switch_threshold,
                  "Relative support decrease over 5 iterations that selects direct solves")
      ->capture_default_str();
  cmd->add_flag("--allow-switch-back", cfg.allow_switch_back,
                "Return to CG when the support grows in the direct phase");
  cmd->add_option("--removal-relative", cfg.removal_relative,
                  "Removal threshold relative to max(p)")
      ->capture_default_str();
  cmd->add_option("--removal-mu", cfg.removal_mu, "Removal starts once mu falls below this")
      ->capture_default_str();
  cmd->add_flag("--removal-indicator", cfg.removal_indicator,
                "Only remove variables with p_j < s_j");
  cmd->add_option("--mass-mean", cfg.mass_mean,
                  "Mean entry of the rescaled marginals inside the IPM (<= 0: no scaling)")
      ->capture_default_str();
  cmd->add_option("--q", cfg.q, "Wasserstein exponent (0: 2 for L2 grids, else 1)")
      ->capture_default_str();
  cmd->add_option("--seed", cfg.seed)->capture_default_str();
  cmd->add_flag("--serial", cfg.serial, "Deterministic single-threaded kernels");
}

OTInstance WithMetric(const OTInstance& inst, const std::string& metric) {
  if (metric.empty()) return inst;
  const auto* grid = std::get_if<GridMetric>(&inst.cost_spec());
  if (grid == nullptr) throw UsageError("--metric applies to image instances only");
  GridMetric g = *grid;
  g.metric = ParseMetric(metric);
  return OTInstance(std::vector<double>(inst.a().begin(), inst.a().end()),
                    std::vector<double>(inst.b().begin(), inst.b().end()), g);
}

std::string MetricLabel(const OTInstance& inst) {
  if (const auto* grid = std::get_if<GridMetric>(&inst.cost_spec())) {
    return std::string(MetricName(grid->metric));
  }
  return "explicit";
}

RunRecord Record(std::string id, const OTInstance& inst, const SolveReport& report,
                 double wall_ms) {
  RunRecord r;
  r.id = std::move(id);
  r.m = inst.m();
  r.n = inst.n();
  r.metric = MetricLabel(inst);
  r.report = report;
  r.wall_ms = wall_ms;
  r.rwe = report.rwe_vs_reference;
  return r;
}

struct TimedSolve {
  SolveResult result;
  double wall_ms;
};

TimedSolve TimeSolve(const OTInstance& inst, const SolverConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  SolveResult result = Solve(inst, cfg);
  const auto stop = std::chrono::steady_clock::now();
  return {std::move(result),
          std::chrono::duration<double, std::milli>(stop - start).count()};
}

void PrintTelemetry(const SolveReport& report, std::ostream& out) {
  fmt::print(out, "iter  mode       mu          sigma  alpha_p   alpha_d   support  cg    corr  +in  -out  fill%\n");
  for (const auto& it : report.iterations) {
    fmt::print(out, "{:<5} {:<10} {:<11.3e} {:<6.3f} {:<9.3e} {:<9.3e} {:<8} {:<5} {}/{}   {:<4} {:<5} {:.3f}\n",
               it.iteration, SolverModeName(it.mode), it.mu, it.sigma, it.alpha_primal,
               it.alpha_dual, it.support_size, it.cg_iterations, it.correctors_accepted,
               it.correctors_tried, it.entered, it.removed, it.fill_percent);
  }
  fmt::print(out, "iterative iterations: {}\ndirect iterations: {}\nswitches: {}\n",
             report.iterative_phase_iters, report.direct_phase_iters, report.phase_switches);
}

void PrintSummary(const SolveReport& report, double wall_ms, std::ostream& out) {
  fmt::print(out, "status: {}\n", SolveStatusName(report.status));
  if (!report.message.empty()) fmt::print(out, "message: {}\n", report.message);
  fmt::print(out, "objective: {:.12g}\n", report.objective);
  fmt::print(out, "wasserstein(q={}): {:.12g}\n", report.q, report.wasserstein());
  fmt::print(out, "ipm iterations: {}\ncg iterations: {}\n", report.ipm_iters,
             report.cg_iters_total);
  fmt::print(out, "final support: {}\nmax fill %: {:.4f}\nwall ms: {:.1f}\n",
             report.final_support_size, report.max_fill_percent, wall_ms);
}

void WritePlanMatrixMarket(const TransportPlan& plan, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(fmt::format("cannot write '{}'", path.string()));
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << fmt::format("{} {} {}\n", plan.m, plan.n, plan.index.size());
  for (std::size_t t = 0; t < plan.index.size(); ++t) {
    const VarIndex j = plan.index[t];
    out << fmt::format("{} {} {:.17g}\n", j % plan.m + 1, j / plan.m + 1, plan.value[t]);
  }
}

std::vector<std::string> SplitList(const std::string& text) {
  std::vector<std::string> items;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) items.push_back(item);
  }
  return items;
}

}  // namespace

std::string FormatCsvRow(const RunRecord& r) {
  const auto& rep = r.report;
  return fmt::format("{},{},{},{},{},{:.17g},{},{},{},{},{:.6f},{},{:.3f},{}", r.id, r.m, r.n,
                     r.metric, SolveStatusName(rep.status), rep.objective, rep.ipm_iters,
                     rep.cg_iters_total, rep.iterative_phase_iters, rep.direct_phase_iters,
                     rep.max_fill_percent, rep.final_support_size, r.wall_ms,
                     r.rwe ? fmt::format("{:.6e}", *r.rwe) : std::string());
}

void AppendCsv(const std::filesystem::path& path, const RunRecord& record) {
  std::error_code ec;
  const bool fresh = !std::filesystem::exists(path, ec) ||
                     std::filesystem::file_size(path, ec) == 0;
  std::ofstream out(path, std::ios::app);
  if (!out) throw Error(fmt::format("cannot append to '{}'", path.string()));
  if (fresh) out << kCsvVersionLine << "\n" << kCsvHeader << "\n";
  out << FormatCsvRow(record) << "\n";
  if (!out) throw Error(fmt::format("write to '{}' failed", path.string()));
}

int ExitCodeFor(SolveStatus status) {
  switch (status) {
    case SolveStatus::kOptimal:
      return 0;
    case SolveStatus::kIterationLimit:
      return 2;
    case SolveStatus::kNumericalFailure:
      return 3;
  }
  return kExitFailure;
}

int ThreadsFromEnvironment() {
  if (const char* env = std::getenv("OTKIT_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<int>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

int Run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Discrete optimal transport solver", "otkit"};
  app.require_subcommand(1);

  // generate
  std::string gen_kind = "gaussian-blob";
  int gen_res = 16;
  std::uint64_t gen_seed = 1;
  std::string gen_metric = "L1";
  std::string gen_format = "auto";
  std::string gen_out = "-";
  auto* generate = app.add_subcommand("generate", "Write a synthetic image-pair instance");
  generate->add_option("--kind", gen_kind,
                       "uniform-random, gaussian-blob, shifted-gaussian, two-blobs, checkerboard")
      ->capture_default_str();
  generate->add_option("--res", gen_res, "Image side length (>= 2)")->capture_default_str();
  generate->add_option("--seed", gen_seed)->capture_default_str();
  generate->add_option("--metric", gen_metric, "L1, L2 or LINF")->capture_default_str();
  generate->add_option("--format", gen_format, "auto, otimg or otlp")->capture_default_str();
  generate->add_option("--out,-o", gen_out, "Output path, - for stdout")->capture_default_str();

  // solve
  SolverConfig solve_cfg;
  std::string solve_path;
  std::string solve_metric;
  std::string solve_csv;
  std::string solve_id;
  std::string solve_plan;
  bool solve_telemetry = false;
  auto* solve = app.add_subcommand("solve", "Solve an instance file");
  solve->add_option("instance", solve_path, "OTIMG or OTLP file")->required();
  solve->add_option("--metric", solve_metric, "Override the metric of an image instance");
  solve->add_option("--csv", solve_csv, "Append a run record to this CSV file");
  solve->add_option("--id", solve_id, "Run id for the CSV (default: file stem)");
  solve->add_option("--plan-mtx", solve_plan, "Write the plan as Matrix Market");
  solve->add_flag("--telemetry", solve_telemetry, "Print the per-iteration phase log");
  AddSolverOptions(solve, solve_cfg);

  // verify
  SolverConfig verify_cfg;
  std::string verify_path;
  std::string verify_metric;
  double verify_threshold = 1e-5;
  auto* verify = app.add_subcommand("verify", "Compare the solver with the exact oracle");
  verify->add_option("instance", verify_path, "OTIMG or OTLP file")->required();
  verify->add_option("--metric", verify_metric, "Override the metric of an image instance");
  verify->add_option("--max-rwe", verify_threshold, "Pass threshold")->capture_default_str();
  AddSolverOptions(verify, verify_cfg);

  // bench
  SolverConfig bench_cfg;
  std::string bench_kinds = "uniform-random,gaussian-blob";
  std::string bench_res = "8,16";
  std::string bench_metric = "L1";
  int bench_seeds = 1;
  std::string bench_csv = "bench.csv";
  bool bench_verify = false;
  auto* bench = app.add_subcommand("bench", "Solve a sweep of synthetic instances");
  bench->add_option("--kinds", bench_kinds, "Comma-separated classes")->capture_default_str();
  bench->add_option("--res", bench_res, "Comma-separated resolutions")->capture_default_str();
  bench->add_option("--metric", bench_metric)->capture_default_str();
  bench->add_option("--seeds", bench_seeds, "Seeds 1..N per class and resolution")
      ->capture_default_str();
  bench->add_option("--csv", bench_csv)->capture_default_str();
  bench->add_flag("--verify", bench_verify, "Fill the rwe column when the oracle fits");
  AddSolverOptions(bench, bench_cfg);

  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*generate) {
      if (gen_res < 2) throw UsageError(fmt::format("--res must be >= 2, got {}", gen_res));
      const OTInstance inst = MakeSyntheticInstance(gen_res, ParseSyntheticClass(gen_kind),
                                                    gen_seed, ParseMetric(gen_metric));
      FileFormat format = NaturalFormat(inst);
      if (gen_format == "otlp") {
        format = FileFormat::kOtlp;
      } else if (gen_format == "otimg") {
        format = FileFormat::kOtimg;
      } else if (gen_format != "auto") {
        throw UsageError(fmt::format("unknown format '{}'", gen_format));
      }
      if (gen_out == "-") {
        WriteInstance(inst, out, format);
      } else {
        WriteInstance(inst, std::filesystem::path(gen_out), format);
      }
      return 0;
    }

    if (*solve) {
      const OTInstance inst =
          WithMetric(ReadInstance(std::filesystem::path(solve_path)), solve_metric);
      const TimedSolve run = TimeSolve(inst, solve_cfg);
      PrintSummary(run.result.report, run.wall_ms, out);
      if (solve_telemetry) PrintTelemetry(run.result.report, out);
      if (!solve_plan.empty()) WritePlanMatrixMarket(run.result.plan, solve_plan);
      if (!solve_csv.empty()) {
        const std::string id = solve_id.empty()
                                   ? std::filesystem::path(solve_path).stem().string()
                                   : solve_id;
        AppendCsv(solve_csv, Record(id, inst, run.result.report, run.wall_ms));
      }
      return ExitCodeFor(run.result.report.status);
    }

    if (*verify) {
      const OTInstance inst =
          WithMetric(ReadInstance(std::filesystem::path(verify_path)), verify_metric);
      if (inst.num_variables() > kOracleMaxVariables) {
        throw UsageError(fmt::format(
            "instance has {} variables; the oracle accepts at most {} (try a smaller "
            "resolution)",
            inst.num_variables(), kOracleMaxVariables));
      }
      const TimedSolve run = TimeSolve(inst, verify_cfg);
      const ReferenceSolution ref = ReferenceSolve(inst);
      const RweValue rwe = ComputeRwe(run.result.report, ref);
      fmt::print(out, "status: {}\n", SolveStatusName(run.result.report.status));
      fmt::print(out, "solver objective: {:.15g}\n", run.result.report.objective);
      fmt::print(out, "oracle objective: {:.15g}\n", ref.objective);
      fmt::print(out, "rwe(q={}): {:.6e}{}\n", run.result.report.q, rwe.value,
                 rwe.absolute ? " (absolute, reference is zero)" : "");
      const bool pass =
          run.result.report.status == SolveStatus::kOptimal && rwe.value <= verify_threshold;
      fmt::print(out, "{}\n", pass ? "PASS" : "FAIL");
      return pass ? 0 : kExitFailure;
    }

    if (*bench) {
      struct Job {
        SyntheticClass kind;
        int res;
        std::uint64_t seed;
      };
      std::vector<Job> jobs;
      const Metric metric = ParseMetric(bench_metric);
      for (const auto& kind : SplitList(bench_kinds)) {
        for (const auto& res : SplitList(bench_res)) {
          int r = 0;
          try {
            r = std::stoi(res);
          } catch (const std::exception&) {
            throw UsageError(fmt::format("bad resolution '{}'", res));
          }
          if (r < 2) throw UsageError(fmt::format("resolution must be >= 2, got {}", r));
          for (int s = 1; s <= bench_seeds; ++s) {
            jobs.push_back({ParseSyntheticClass(kind), r, static_cast<std::uint64_t>(s)});
          }
        }
      }
      const int workers = std::min<int>(ThreadsFromEnvironment(),
                                        std::max<int>(1, static_cast<int>(jobs.size())));
      std::atomic<std::size_t> next{0};
      std::mutex io;
      int worst = 0;
      const auto work = [&] {
        for (std::size_t t = next++; t < jobs.size(); t = next++) {
          const Job& job = jobs[t];
          const std::string id = fmt::format("{}-r{}-s{}", SyntheticClassName(job.kind),
                                             job.res, job.seed);
          int code = kExitFailure;
          std::string line;
          try {
            const OTInstance inst = MakeSyntheticInstance(job.res, job.kind, job.seed, metric);
            TimedSolve run = TimeSolve(inst, bench_cfg);
            if (bench_verify && inst.num_variables() <= kOracleMaxVariables) {
              run.result.report.rwe_vs_reference =
                  ComputeRwe(run.result.report, ReferenceSolve(inst)).value;
            }
            const RunRecord record = Record(id, inst, run.result.report, run.wall_ms);
            code = ExitCodeFor(run.result.report.status);
            std::lock_guard<std::mutex> lock(io);
            AppendCsv(bench_csv, record);
            fmt::print(out, "{}\n", FormatCsvRow(record));
            worst = std::max(worst, code);
          } catch (const std::exception& e) {
            std::lock_guard<std::mutex> lock(io);
            fmt::print(err, "{}: {}\n", id, e.what());
            worst = std::max(worst, code);
          }
        }
      };
      std::vector<std::thread> pool;
      for (int w = 1; w < workers; ++w) pool.emplace_back(work);
      work();
      for (auto& t : pool) t.join();
      return worst;
    }
  } catch (const UsageError& e) {
    fmt::print(err, "usage error: {}\n", e.what());
    return kExitUsage;
  } catch (const ParameterError& e) {
    fmt::print(err, "usage error: {}\n", e.what());
    return kExitUsage;
  } catch (const std::exception& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace otkit::cli
