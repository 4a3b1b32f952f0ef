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

#ifndef OTKIT_INSTANCE_HPP_
#define OTKIT_INSTANCE_HPP_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace otkit {

// Variable index into vec(P); P is m x n and vec stacks columns, so variable
// j couples source j % m with sink j / m.
using VarIndex = std::int64_t;

enum class Metric { kL1, kL2, kLinf };

std::string_view MetricName(Metric metric);  // "L1", "L2", "LINF"
Metric ParseMetric(std::string_view name);   // case-insensitive

// Dense m x n cost matrix, stored column-major (values[i + k*m] = C(i, k)).
struct ExplicitCost {
  std::vector<double> values;
};

// Pixel-distance cost between two rows x cols images. Pixel p sits at grid
// coordinates (p % rows, p / rows).
struct GridMetric {
  int rows = 0;
  int cols = 0;
  Metric metric = Metric::kL1;
};

using CostSpec = std::variant<ExplicitCost, GridMetric>;

// Distance between grid positions i and k (0-based). Throws IndexError when
// either position is outside the grid.
double GridCost(const GridMetric& grid, std::int64_t i, std::int64_t k);

class OTInstance;

// Cheap, copyable accessor for c_j that never materializes the cost vector
// for grid metrics. Holds a reference to the instance it came from.
class CostView {
 public:
  double operator()(VarIndex j) const;
  // Threshold below which variables enter the heuristic pricing set.
  double c_max() const { return c_max_; }
  int m() const { return m_; }

 private:
  friend class OTInstance;
  CostView() = default;

  int m_ = 0;
  const double* explicit_ = nullptr;  // set for ExplicitCost
  // Grid metric: distance table indexed by |d_row| + rows * |d_col|.
  const double* table_ = nullptr;
  int rows_ = 0;
  double c_max_ = 0.0;
};

// A balanced discrete optimal transport problem. Immutable once built.
class OTInstance {
 public:
  // Validates sizes, nonnegativity and balance (relative 1e-12). Throws
  // ParameterError / DimensionError on violation.
  OTInstance(std::vector<double> a, std::vector<double> b, CostSpec cost);

  int m() const { return static_cast<int>(a_.size()); }
  int n() const { return static_cast<int>(b_.size()); }
  VarIndex num_variables() const { return static_cast<VarIndex>(m()) * n(); }
  int num_constraints() const { return m() + n(); }

  std::span<const double> a() const { return a_; }
  std::span<const double> b() const { return b_; }
  const CostSpec& cost_spec() const { return cost_; }
  bool is_grid() const { return std::holds_alternative<GridMetric>(cost_); }

  double total_mass() const;
  double cost(VarIndex j) const { return view_(j); }
  const CostView& cost_view() const { return view_; }

  // Largest entry of c (computed once at construction).
  double max_cost() const { return max_cost_; }

  OTInstance(const OTInstance& other);
  OTInstance& operator=(const OTInstance& other);
  OTInstance(OTInstance&&) noexcept;
  OTInstance& operator=(OTInstance&&) noexcept;
  ~OTInstance() = default;

 private:
  void BuildView();

  std::vector<double> a_;
  std::vector<double> b_;
  CostSpec cost_;
  std::vector<double> grid_table_;
  CostView view_;
  double max_cost_ = 0.0;
};

// Default C_max: 0.4 * max(rows, cols) for grid metrics, the 10th
// percentile of the entries for explicit costs.
double DefaultCMax(const CostSpec& cost);

enum class SyntheticClass {
  kUniformRandom,
  kGaussianBlob,
  kShiftedGaussian,
  kTwoBlobs,
  kCheckerboard,
};

std::string_view SyntheticClassName(SyntheticClass kind);
SyntheticClass ParseSyntheticClass(std::string_view name);

// Pair of res x res images of the given class with unit total mass each.
// Deterministic for fixed (res, kind, seed, metric). Throws ParameterError
// for res < 2.
OTInstance MakeSyntheticInstance(int res, SyntheticClass kind,
                                 std::uint64_t seed,
                                 Metric metric = Metric::kL1);

// Text formats. OTIMG requires a square grid metric; OTLP stores an explicit
// cost (grid instances are expanded when written as OTLP).
enum class FileFormat { kOtimg, kOtlp };

OTInstance ReadInstance(std::istream& in);
OTInstance ReadInstance(const std::filesystem::path& path);
void WriteInstance(const OTInstance& inst, std::ostream& out,
                   FileFormat format);
void WriteInstance(const OTInstance& inst, const std::filesystem::path& path,
                   FileFormat format);
// OTIMG for square grid instances, OTLP otherwise.
FileFormat NaturalFormat(const OTInstance& inst);

}  // namespace otkit

#endif  // OTKIT_INSTANCE_HPP_
