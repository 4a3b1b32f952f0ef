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

#include "otkit/instance.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>

#include <fmt/format.h>

#include "otkit/errors.hpp"

namespace otkit {
namespace {

constexpr double kBalanceRelTol = 1e-12;
constexpr double kGridCMaxFactor = 0.4;
constexpr double kExplicitCMaxQuantile = 0.1;

double MetricDistance(Metric metric, double dr, double dc) {
  switch (metric) {
    case Metric::kL1:
      return dr + dc;
    case Metric::kL2:
      return std::sqrt(dr * dr + dc * dc);
    case Metric::kLinf:
      return std::max(dr, dc);
  }
  return 0.0;
}

std::string ToUpper(std::string_view s) {
  std::string out(s);
  for (char& ch : out) {
    ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
  }
  return out;
}

void CheckBalanced(double sum_a, double sum_b) {
  const double scale = std::max({std::abs(sum_a), std::abs(sum_b), 1e-300});
  if (std::abs(sum_a - sum_b) > kBalanceRelTol * scale) {
    throw ParameterError(fmt::format(
        "unbalanced marginals: sum(a) = {:.17g}, sum(b) = {:.17g}", sum_a,
        sum_b));
  }
}

}  // namespace

std::string_view MetricName(Metric metric) {
  switch (metric) {
    case Metric::kL1:
      return "L1";
    case Metric::kL2:
      return "L2";
    case Metric::kLinf:
      return "LINF";
  }
  return "?";
}

Metric ParseMetric(std::string_view name) {
  const std::string upper = ToUpper(name);
  if (upper == "L1") return Metric::kL1;
  if (upper == "L2") return Metric::kL2;
  if (upper == "LINF") return Metric::kLinf;
  throw ParameterError(fmt::format("unknown metric '{}'", name));
}

double GridCost(const GridMetric& grid, std::int64_t i, std::int64_t k) {
  const std::int64_t size = static_cast<std::int64_t>(grid.rows) * grid.cols;
  if (i < 0 || i >= size || k < 0 || k >= size) {
    throw IndexError(fmt::format(
        "grid position ({}, {}) outside 1..{}", i + 1, k + 1, size));
  }
  const double dr = static_cast<double>(std::llabs(i % grid.rows - k % grid.rows));
  const double dc = static_cast<double>(std::llabs(i / grid.rows - k / grid.rows));
  return MetricDistance(grid.metric, dr, dc);
}

double CostView::operator()(VarIndex j) const {
  if (explicit_ != nullptr) return explicit_[j];
  const VarIndex src = j % m_;
  const VarIndex dst = j / m_;
  const VarIndex dr = std::abs(src % rows_ - dst % rows_);
  const VarIndex dc = std::abs(src / rows_ - dst / rows_);
  return table_[dr + rows_ * dc];
}

OTInstance::OTInstance(std::vector<double> a, std::vector<double> b,
                       CostSpec cost)
    : a_(std::move(a)), b_(std::move(b)), cost_(std::move(cost)) {
  if (a_.empty() || b_.empty()) {
    throw ParameterError("instance needs m >= 1 and n >= 1");
  }
  for (std::size_t i = 0; i < a_.size(); ++i) {
    if (!(a_[i] >= 0.0) || !std::isfinite(a_[i])) {
      throw ParameterError(fmt::format("negative or non-finite mass a[{}]", i + 1));
    }
  }
  for (std::size_t k = 0; k < b_.size(); ++k) {
    if (!(b_[k] >= 0.0) || !std::isfinite(b_[k])) {
      throw ParameterError(fmt::format("negative or non-finite mass b[{}]", k + 1));
    }
  }
  CheckBalanced(std::accumulate(a_.begin(), a_.end(), 0.0),
                std::accumulate(b_.begin(), b_.end(), 0.0));

  if (const auto* grid = std::get_if<GridMetric>(&cost_)) {
    if (grid->rows < 1 || grid->cols < 1) {
      throw ParameterError("grid metric needs positive rows and cols");
    }
    const std::int64_t size = static_cast<std::int64_t>(grid->rows) * grid->cols;
    if (size != m() || size != n()) {
      throw DimensionError(fmt::format(
          "grid {}x{} requires m = n = {}, got m = {}, n = {}", grid->rows,
          grid->cols, size, m(), n()));
    }
  } else {
    const auto& values = std::get<ExplicitCost>(cost_).values;
    if (static_cast<VarIndex>(values.size()) != num_variables()) {
      throw DimensionError(fmt::format("cost matrix has {} entries, expected {}",
                                       values.size(), num_variables()));
    }
    for (std::size_t j = 0; j < values.size(); ++j) {
      if (!(values[j] >= 0.0) || !std::isfinite(values[j])) {
        throw ParameterError(fmt::format(
            "negative or non-finite cost at ({}, {})", j % a_.size() + 1,
            j / a_.size() + 1));
      }
    }
  }
  BuildView();
}

OTInstance::OTInstance(const OTInstance& other)
    : a_(other.a_), b_(other.b_), cost_(other.cost_) {
  BuildView();
}

OTInstance& OTInstance::operator=(const OTInstance& other) {
  if (this != &other) {
    a_ = other.a_;
    b_ = other.b_;
    cost_ = other.cost_;
    BuildView();
  }
  return *this;
}

OTInstance::OTInstance(OTInstance&& other) noexcept
    : a_(std::move(other.a_)),
      b_(std::move(other.b_)),
      cost_(std::move(other.cost_)) {
  BuildView();
}

OTInstance& OTInstance::operator=(OTInstance&& other) noexcept {
  a_ = std::move(other.a_);
  b_ = std::move(other.b_);
  cost_ = std::move(other.cost_);
  BuildView();
  return *this;
}

void OTInstance::BuildView() {
  view_ = CostView();
  view_.m_ = m();
  view_.c_max_ = DefaultCMax(cost_);
  if (const auto* grid = std::get_if<GridMetric>(&cost_)) {
    grid_table_.assign(static_cast<std::size_t>(grid->rows) * grid->cols, 0.0);
    max_cost_ = 0.0;
    for (int dc = 0; dc < grid->cols; ++dc) {
      for (int dr = 0; dr < grid->rows; ++dr) {
        const double d = MetricDistance(grid->metric, dr, dc);
        grid_table_[dr + static_cast<std::size_t>(grid->rows) * dc] = d;
        max_cost_ = std::max(max_cost_, d);
      }
    }
    view_.table_ = grid_table_.data();
    view_.rows_ = grid->rows;
  } else {
    grid_table_.clear();
    const auto& values = std::get<ExplicitCost>(cost_).values;
    view_.explicit_ = values.data();
    max_cost_ = values.empty() ? 0.0 : *std::max_element(values.begin(), values.end());
  }
}

double OTInstance::total_mass() const {
  return std::accumulate(a_.begin(), a_.end(), 0.0);
}

double DefaultCMax(const CostSpec& cost) {
  if (const auto* grid = std::get_if<GridMetric>(&cost)) {
    return kGridCMaxFactor * std::max(grid->rows, grid->cols);
  }
  std::vector<double> values = std::get<ExplicitCost>(cost).values;
  if (values.empty()) return 0.0;
  const auto rank = static_cast<std::size_t>(
      std::floor(kExplicitCMaxQuantile * static_cast<double>(values.size() - 1)));
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(rank),
                   values.end());
  return values[rank];
}

// ---------------------------------------------------------------------------
// Synthetic generators.

std::string_view SyntheticClassName(SyntheticClass kind) {
  switch (kind) {
    case SyntheticClass::kUniformRandom:
      return "uniform-random";
    case SyntheticClass::kGaussianBlob:
      return "gaussian-blob";
    case SyntheticClass::kShiftedGaussian:
      return "shifted-gaussian";
    case SyntheticClass::kTwoBlobs:
      return "two-blobs";
    case SyntheticClass::kCheckerboard:
      return "checkerboard";
  }
  return "?";
}

SyntheticClass ParseSyntheticClass(std::string_view name) {
  for (auto kind : {SyntheticClass::kUniformRandom, SyntheticClass::kGaussianBlob,
                    SyntheticClass::kShiftedGaussian, SyntheticClass::kTwoBlobs,
                    SyntheticClass::kCheckerboard}) {
    if (SyntheticClassName(kind) == name) return kind;
  }
  throw ParameterError(fmt::format("unknown instance class '{}'", name));
}

namespace {

struct Blob {
  double row, col, width, weight;
};

// Image in column-major order (pixel p at row p % res, col p / res).
std::vector<double> RenderBlobs(int res, const std::vector<Blob>& blobs) {
  std::vector<double> img(static_cast<std::size_t>(res) * res, 0.0);
  for (int c = 0; c < res; ++c) {
    for (int r = 0; r < res; ++r) {
      double v = 0.0;
      for (const Blob& blob : blobs) {
        const double dr = r - blob.row;
        const double dc = c - blob.col;
        v += blob.weight *
             std::exp(-(dr * dr + dc * dc) / (2.0 * blob.width * blob.width));
      }
      img[r + static_cast<std::size_t>(res) * c] = v;
    }
  }
  return img;
}

Blob RandomBlob(int res, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> center(0.25 * res, 0.75 * (res - 1));
  std::uniform_real_distribution<double> width(0.15 * res, 0.3 * res);
  Blob blob;
  blob.row = center(rng);
  blob.col = center(rng);
  blob.width = width(rng);
  blob.weight = 1.0;
  return blob;
}

std::vector<double> MakeImage(int res, SyntheticClass kind, int which,
                              std::mt19937_64& rng, const Blob& shared) {
  const std::size_t pixels = static_cast<std::size_t>(res) * res;
  switch (kind) {
    case SyntheticClass::kUniformRandom: {
      std::uniform_real_distribution<double> u(0.0, 1.0);
      std::vector<double> img(pixels);
      for (double& v : img) v = u(rng);
      return img;
    }
    case SyntheticClass::kGaussianBlob:
      return RenderBlobs(res, {RandomBlob(res, rng)});
    case SyntheticClass::kShiftedGaussian: {
      Blob blob = shared;
      if (which == 1) {
        blob.row = std::clamp(blob.row + 0.25 * res, 0.0, res - 1.0);
        blob.col = std::clamp(blob.col - 0.2 * res, 0.0, res - 1.0);
      }
      return RenderBlobs(res, {blob});
    }
    case SyntheticClass::kTwoBlobs: {
      Blob first = RandomBlob(res, rng);
      Blob second = RandomBlob(res, rng);
      first.width *= 0.6;
      second.width *= 0.6;
      second.weight = std::uniform_real_distribution<double>(0.3, 1.0)(rng);
      return RenderBlobs(res, {first, second});
    }
    case SyntheticClass::kCheckerboard: {
      const int tile = std::max(1, res / 4);
      std::uniform_real_distribution<double> noise(0.8, 1.2);
      std::vector<double> img(pixels);
      for (int c = 0; c < res; ++c) {
        for (int r = 0; r < res; ++r) {
          const bool dark = ((r / tile + c / tile + which) % 2) == 0;
          img[r + static_cast<std::size_t>(res) * c] = (dark ? 1.0 : 0.2) * noise(rng);
        }
      }
      return img;
    }
  }
  return {};
}

void Normalize(std::vector<double>& v) {
  const double total = std::accumulate(v.begin(), v.end(), 0.0);
  for (double& x : v) x /= total;
}

}  // namespace

OTInstance MakeSyntheticInstance(int res, SyntheticClass kind,
                                 std::uint64_t seed, Metric metric) {
  if (res < 2) {
    throw ParameterError(fmt::format("resolution must be at least 2, got {}", res));
  }
  std::mt19937_64 rng(seed);
  const Blob shared = RandomBlob(res, rng);
  std::vector<double> a = MakeImage(res, kind, 0, rng, shared);
  std::vector<double> b = MakeImage(res, kind, 1, rng, shared);
  Normalize(a);
  Normalize(b);
  // Normalization leaves a few ulps of imbalance; push it into the largest
  // entry of b so the instance is balanced to rounding.
  const double diff = std::accumulate(a.begin(), a.end(), 0.0) -
                      std::accumulate(b.begin(), b.end(), 0.0);
  *std::max_element(b.begin(), b.end()) += diff;
  return OTInstance(std::move(a), std::move(b), GridMetric{res, res, metric});
}

// ---------------------------------------------------------------------------
// Text I/O.

namespace {

struct Token {
  std::string text;
  int line;
};

class TokenStream {
 public:
  explicit TokenStream(std::istream& in) {
    std::string line;
    int number = 0;
    while (std::getline(in, line)) {
      ++number;
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      std::istringstream words(line);
      std::string word;
      while (words >> word) tokens_.push_back({word, number});
      last_line_ = number;
    }
  }

  bool done() const { return pos_ >= tokens_.size(); }
  int line() const { return done() ? last_line_ : tokens_[pos_].line; }
  int previous_line() const { return pos_ == 0 ? 1 : tokens_[pos_ - 1].line; }

  const Token& Next(std::string_view what) {
    if (done()) {
      throw ParseError(fmt::format("unexpected end of file, expected {}", what),
                       last_line_);
    }
    return tokens_[pos_++];
  }

  double NextDouble(std::string_view what) {
    const Token& tok = Next(what);
    char* end = nullptr;
    const double value = std::strtod(tok.text.c_str(), &end);
    if (end == tok.text.c_str() || *end != '\0' || !std::isfinite(value)) {
      throw ParseError(fmt::format("expected {}, got '{}'", what, tok.text), tok.line);
    }
    return value;
  }

  long NextInt(std::string_view what) {
    const Token& tok = Next(what);
    char* end = nullptr;
    const long value = std::strtol(tok.text.c_str(), &end, 10);
    if (end == tok.text.c_str() || *end != '\0') {
      throw ParseError(fmt::format("expected {}, got '{}'", what, tok.text), tok.line);
    }
    return value;
  }

 private:
  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  int last_line_ = 1;
};

std::vector<double> ReadMasses(TokenStream& ts, std::size_t count,
                               std::string_view label) {
  std::vector<double> out(count);
  for (std::size_t i = 0; i < count; ++i) {
    const int line = ts.line();
    out[i] = ts.NextDouble(fmt::format("{}[{}]", label, i + 1));
    if (out[i] < 0.0) {
      throw ParseError(fmt::format("negative mass {}[{}]", label, i + 1), line);
    }
  }
  return out;
}

// Row-major res x res block into column-major vector.
std::vector<double> ReadImage(TokenStream& ts, int res, std::string_view label) {
  const std::vector<double> row_major =
      ReadMasses(ts, static_cast<std::size_t>(res) * res, label);
  std::vector<double> out(row_major.size());
  for (int r = 0; r < res; ++r) {
    for (int c = 0; c < res; ++c) {
      out[r + static_cast<std::size_t>(res) * c] =
          row_major[static_cast<std::size_t>(r) * res + c];
    }
  }
  return out;
}

void RequireBalanced(const std::vector<double>& a, const std::vector<double>& b,
                     int line) {
  try {
    CheckBalanced(std::accumulate(a.begin(), a.end(), 0.0),
                  std::accumulate(b.begin(), b.end(), 0.0));
  } catch (const ParameterError& e) {
    throw ParseError(e.what(), line);
  }
}

}  // namespace

OTInstance ReadInstance(std::istream& in) {
  TokenStream ts(in);
  const Token& magic = ts.Next("OTIMG or OTLP header");
  if (magic.text == "OTIMG") {
    const int header_line = magic.line;
    const long res = ts.NextInt("resolution");
    if (res < 1 || res > 4096) {
      throw ParseError(fmt::format("bad resolution {}", res), header_line);
    }
    std::vector<double> a = ReadImage(ts, static_cast<int>(res), "A");
    std::vector<double> b = ReadImage(ts, static_cast<int>(res), "B");
    RequireBalanced(a, b, ts.previous_line());
    const Token& keyword = ts.Next("'metric' line");
    if (keyword.text != "metric") {
      throw ParseError(fmt::format("expected 'metric', got '{}'", keyword.text),
                       keyword.line);
    }
    const Token& name = ts.Next("metric name");
    Metric metric;
    try {
      metric = ParseMetric(name.text);
    } catch (const ParameterError& e) {
      throw ParseError(e.what(), name.line);
    }
    if (!ts.done()) throw ParseError("trailing data after metric", ts.line());
    return OTInstance(std::move(a), std::move(b),
                      GridMetric{static_cast<int>(res), static_cast<int>(res), metric});
  }
  if (magic.text == "OTLP") {
    const int header_line = magic.line;
    const long m = ts.NextInt("m");
    const long n = ts.NextInt("n");
    if (m < 1 || n < 1) {
      throw ParseError(fmt::format("bad dimensions {} x {}", m, n), header_line);
    }
    std::vector<double> a = ReadMasses(ts, static_cast<std::size_t>(m), "a");
    std::vector<double> b = ReadMasses(ts, static_cast<std::size_t>(n), "b");
    RequireBalanced(a, b, ts.previous_line());
    ExplicitCost cost;
    cost.values.resize(static_cast<std::size_t>(m) * static_cast<std::size_t>(n));
    for (long i = 0; i < m; ++i) {
      for (long k = 0; k < n; ++k) {
        const int line = ts.line();
        const double v = ts.NextDouble(fmt::format("C[{},{}]", i + 1, k + 1));
        if (v < 0.0) {
          throw ParseError(fmt::format("negative cost C[{},{}]", i + 1, k + 1), line);
        }
        cost.values[static_cast<std::size_t>(i + k * m)] = v;
      }
    }
    if (!ts.done()) throw ParseError("trailing data after cost matrix", ts.line());
    return OTInstance(std::move(a), std::move(b), std::move(cost));
  }
  throw ParseError(fmt::format("malformed header '{}'", magic.text), magic.line);
}

OTInstance ReadInstance(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(fmt::format("cannot open '{}'", path.string()));
  return ReadInstance(in);
}

FileFormat NaturalFormat(const OTInstance& inst) {
  if (const auto* grid = std::get_if<GridMetric>(&inst.cost_spec())) {
    if (grid->rows == grid->cols) return FileFormat::kOtimg;
  }
  return FileFormat::kOtlp;
}

void WriteInstance(const OTInstance& inst, std::ostream& out, FileFormat format) {
  const auto write_value = [&out](double v) { out << fmt::format("{:.17g}", v); };
  if (format == FileFormat::kOtimg) {
    const auto* grid = std::get_if<GridMetric>(&inst.cost_spec());
    if (grid == nullptr || grid->rows != grid->cols) {
      throw ParameterError("OTIMG needs a square grid metric instance");
    }
    const int res = grid->rows;
    out << "OTIMG " << res << "\n";
    for (auto image : {inst.a(), inst.b()}) {
      for (int r = 0; r < res; ++r) {
        for (int c = 0; c < res; ++c) {
          if (c > 0) out << ' ';
          write_value(image[r + static_cast<std::size_t>(res) * c]);
        }
        out << "\n";
      }
    }
    out << "metric " << MetricName(grid->metric) << "\n";
    return;
  }
  const int m = inst.m();
  const int n = inst.n();
  out << "OTLP " << m << " " << n << "\n";
  for (auto masses : {inst.a(), inst.b()}) {
    for (std::size_t i = 0; i < masses.size(); ++i) {
      if (i > 0) out << ' ';
      write_value(masses[i]);
    }
    out << "\n";
  }
  for (int i = 0; i < m; ++i) {
    for (int k = 0; k < n; ++k) {
      if (k > 0) out << ' ';
      write_value(inst.cost(i + static_cast<VarIndex>(k) * m));
    }
    out << "\n";
  }
}

void WriteInstance(const OTInstance& inst, const std::filesystem::path& path,
                   FileFormat format) {
  std::ofstream out(path);
  if (!out) throw Error(fmt::format("cannot write '{}'", path.string()));
  WriteInstance(inst, out, format);
  if (!out) throw Error(fmt::format("write to '{}' failed", path.string()));
}

}  // namespace otkit
