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
#include <limits>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "otkit/errors.hpp"
#include "otkit/linsolve.hpp"

namespace otkit {

IncompleteCholesky IncompleteCholesky::Factorize(const SparseSymmetric& matrix,
                                                 double drop_tolerance, double lift) {
  if (drop_tolerance < 0.0 || std::isnan(drop_tolerance)) {
    throw ParameterError(fmt::format("drop tolerance must be >= 0, got {}", drop_tolerance));
  }
  IncompleteCholesky ic;
  double current = std::max(lift, 0.0);
  const double base = 1e-10 * std::max(matrix.MaxDiagonal(), 1e-300);
  for (int attempt = 0; attempt <= 3; ++attempt) {
    if (ic.TryFactorize(matrix, drop_tolerance, current)) {
      ic.retries_ = attempt;
      return ic;
    }
    current = std::max(10.0 * current, base);
  }
  spdlog::warn("incomplete Cholesky broke down after 3 lifts; using Jacobi");
  ic.dim_ = matrix.dim;
  ic.col_ptr_.resize(matrix.dim + 1);
  ic.row_idx_.resize(matrix.dim);
  ic.values_.resize(matrix.dim);
  for (int j = 0; j < matrix.dim; ++j) {
    const double d = matrix.Diagonal(j) + current;
    ic.col_ptr_[j] = j;
    ic.row_idx_[j] = j;
    ic.values_[j] = d > 0.0 ? std::sqrt(d) : 1.0;
  }
  ic.col_ptr_[matrix.dim] = matrix.dim;
  ic.lift_ = current;
  ic.retries_ = 3;
  ic.jacobi_fallback_ = true;
  return ic;
}

bool IncompleteCholesky::TryFactorize(const SparseSymmetric& matrix,
                                      double drop_tolerance, double lift) {
  const int n = matrix.dim;
  dim_ = n;
  lift_ = lift;
  col_ptr_.assign(n + 1, 0);
  row_idx_.clear();
  values_.clear();

  std::vector<double> column_norm(n, 0.0);
  for (int j = 0; j < n; ++j) {
    for (int p = matrix.col_ptr[j]; p < matrix.col_ptr[j + 1]; ++p) {
      const int i = matrix.row_idx[p];
      const double v2 = matrix.values[p] * matrix.values[p];
      column_norm[j] += v2;
      if (i != j) column_norm[i] += v2;
    }
  }
  for (double& v : column_norm) v = std::sqrt(v);

  std::vector<double> work(n, 0.0);
  std::vector<int> mark(n, -1);
  std::vector<int> pattern;
  // Columns of L whose next unused entry lies in a given row.
  std::vector<int> head(n, -1);
  std::vector<int> next_in_list(n, -1);
  std::vector<int> cursor(n, 0);

  const auto link = [&](int column) {
    const int end = col_ptr_[column + 1];
    if (cursor[column] < end) {
      const int row = row_idx_[cursor[column]];
      next_in_list[column] = head[row];
      head[row] = column;
    }
  };

  for (int j = 0; j < n; ++j) {
    pattern.clear();
    mark[j] = j;
    work[j] = lift;
    for (int p = matrix.col_ptr[j]; p < matrix.col_ptr[j + 1]; ++p) {
      const int i = matrix.row_idx[p];
      if (mark[i] != j) {
        mark[i] = j;
        work[i] = 0.0;
        if (i != j) pattern.push_back(i);
      }
      work[i] += matrix.values[p];
    }
    int k = head[j];
    head[j] = -1;
    while (k != -1) {
      const int following = next_in_list[k];
      const int pos = cursor[k];
      const double l_jk = values_[pos];
      for (int q = pos; q < col_ptr_[k + 1]; ++q) {
        const int i = row_idx_[q];
        if (mark[i] != j) {
          mark[i] = j;
          work[i] = 0.0;
          pattern.push_back(i);
        }
        work[i] -= values_[q] * l_jk;
      }
      cursor[k] = pos + 1;
      link(k);
      k = following;
    }
    const double pivot = work[j];
    if (!(pivot > 0.0) || !std::isfinite(pivot)) return false;
    const double root = std::sqrt(pivot);
    row_idx_.push_back(j);
    values_.push_back(root);
    std::sort(pattern.begin(), pattern.end());
    const double threshold = drop_tolerance * column_norm[j];
    for (int i : pattern) {
      const double v = work[i];
      if (v != 0.0 && std::abs(v) >= threshold) {
        row_idx_.push_back(i);
        values_.push_back(v / root);
      }
    }
    col_ptr_[j + 1] = static_cast<int>(row_idx_.size());
    cursor[j] = col_ptr_[j] + 1;
    link(j);
  }
  return true;
}

void IncompleteCholesky::Apply(std::span<const double> r, std::span<double> z) const {
  if (static_cast<int>(r.size()) != dim_ || static_cast<int>(z.size()) != dim_) {
    throw DimensionError("incomplete Cholesky apply: size mismatch");
  }
  std::copy(r.begin(), r.end(), z.begin());
  for (int j = 0; j < dim_; ++j) {
    const int begin = col_ptr_[j];
    z[j] /= values_[begin];
    const double zj = z[j];
    for (int p = begin + 1; p < col_ptr_[j + 1]; ++p) z[row_idx_[p]] -= values_[p] * zj;
  }
  for (int j = dim_ - 1; j >= 0; --j) {
    const int begin = col_ptr_[j];
    double acc = z[j];
    for (int p = begin + 1; p < col_ptr_[j + 1]; ++p) acc -= values_[p] * z[row_idx_[p]];
    z[j] = acc / values_[begin];
  }
}

}  // namespace otkit
