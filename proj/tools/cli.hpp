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

#ifndef OTKIT_TOOLS_CLI_HPP_
#define OTKIT_TOOLS_CLI_HPP_

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "otkit/ipm.hpp"

namespace otkit::cli {

// Exit codes besides the solve statuses (0 optimal, 2 iteration limit,
// 3 numerical failure).
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 64;

inline constexpr std::string_view kCsvVersionLine = "# otkit runs v1";
inline constexpr std::string_view kCsvHeader =
    "id,m,n,metric,status,objective,ipm_iters,cg_iters,iter_phase,dir_phase,"
    "max_fill_pct,final_support,wall_ms,rwe";

struct RunRecord {
  std::string id;
  int m = 0;
  int n = 0;
  std::string metric;  // L1, L2, LINF or explicit
  SolveReport report;
  double wall_ms = 0.0;
  std::optional<double> rwe;
};

std::string FormatCsvRow(const RunRecord& record);
// Appends one row, writing the version line and header first when the file
// is new or empty.
void AppendCsv(const std::filesystem::path& path, const RunRecord& record);

int ExitCodeFor(SolveStatus status);

// Worker count for `bench`: OTKIT_THREADS when set to a positive integer,
// otherwise the hardware concurrency (at least 1).
int ThreadsFromEnvironment();

// Entry point; never throws.
int Run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace otkit::cli

#endif  // OTKIT_TOOLS_CLI_HPP_
