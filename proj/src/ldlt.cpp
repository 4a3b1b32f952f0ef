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
#include <numeric>

#include <fmt/format.h>

#include "otkit/errors.hpp"
#include "otkit/linsolve.hpp"

namespace otkit {

LdltFactorization LdltFactorization::Factorize(const SparseSymmetric& matrix,
                                               const LdltOptions& options) {
  const int n = matrix.dim;
  LdltFactorization f;
  f.dim_ = n;
  switch (options.ordering) {
    case OrderingPolicy::kNatural:
      f.perm_.resize(n);
      std::iota(f.perm_.begin(), f.perm_.end(), 0);
      break;
    case OrderingPolicy::kMinimumDegree:
      f.perm_ = MinimumDegreeOrdering(matrix);
      break;
    case OrderingPolicy::kGiven: {
      f.perm_ = options.permutation;
      std::vector<char> seen(n, 0);
      bool ok = static_cast<int>(f.perm_.size()) == n;
      for (int i = 0; ok && i < n; ++i) {
        const int v = f.perm_[i];
        ok = v >= 0 && v < n && !seen[v];
        if (ok) seen[v] = 1;
      }
      if (!ok) throw ParameterError("given ordering is not a permutation");
      break;
    }
  }
  std::vector<int> pinv(n);
  for (int i = 0; i < n; ++i) pinv[f.perm_[i]] = i;

  // Upper triangle of P S P^T in compressed-column form.
  std::vector<int> up_ptr(n + 1, 0);
  for (int c = 0; c < n; ++c) {
    for (int p = matrix.col_ptr[c]; p < matrix.col_ptr[c + 1]; ++p) {
      const int i = pinv[matrix.row_idx[p]];
      const int j = pinv[c];
      ++up_ptr[std::max(i, j) + 1];
    }
  }
  std::partial_sum(up_ptr.begin(), up_ptr.end(), up_ptr.begin());
  std::vector<int> up_row(up_ptr[n]);
  std::vector<double> up_val(up_ptr[n]);
  {
    std::vector<int> next(up_ptr.begin(), up_ptr.end() - 1);
    for (int c = 0; c < n; ++c) {
      for (int p = matrix.col_ptr[c]; p < matrix.col_ptr[c + 1]; ++p) {
        const int i = pinv[matrix.row_idx[p]];
        const int j = pinv[c];
        const int q = next[std::max(i, j)]++;
        up_row[q] = std::min(i, j);
        up_val[q] = matrix.values[p];
      }
    }
  }

  // Elimination tree and column counts.
  std::vector<int> parent(n, -1), flag(n), lnz(n, 0);
  for (int k = 0; k < n; ++k) {
    flag[k] = k;
    for (int p = up_ptr[k]; p < up_ptr[k + 1]; ++p) {
      for (int i = up_row[p]; i < k && flag[i] != k; i = parent[i]) {
        if (parent[i] == -1) parent[i] = k;
        ++lnz[i];
        flag[i] = k;
      }
    }
  }
  f.col_ptr_.assign(n + 1, 0);
  for (int k = 0; k < n; ++k) f.col_ptr_[k + 1] = f.col_ptr_[k] + lnz[k];
  f.row_idx_.resize(f.col_ptr_[n]);
  f.values_.resize(f.col_ptr_[n]);
  f.d_.assign(n, 0.0);

  double max_diag = 0.0;
  for (int j = 0; j < n; ++j) max_diag = std::max(max_diag, std::abs(matrix.Diagonal(j)));
  f.pivot_floor_ = options.pivot_floor_relative * max_diag;
  if (f.pivot_floor_ <= 0.0) f.pivot_floor_ = options.pivot_floor_relative;

  std::vector<double> y(n, 0.0);
  std::vector<int> pattern(n);
  std::fill(lnz.begin(), lnz.end(), 0);
  for (int k = 0; k < n; ++k) {
    int top = n;
    flag[k] = k;
    for (int p = up_ptr[k]; p < up_ptr[k + 1]; ++p) {
      int i = up_row[p];
      y[i] += up_val[p];
      int len = 0;
      for (; flag[i] != k; i = parent[i]) {
        pattern[len++] = i;
        flag[i] = k;
      }
      while (len > 0) pattern[--top] = pattern[--len];
    }
    double dk = y[k];
    y[k] = 0.0;
    for (; top < n; ++top) {
      const int i = pattern[top];
      const double yi = y[i];
      y[i] = 0.0;
      const int end = f.col_ptr_[i] + lnz[i];
      for (int p = f.col_ptr_[i]; p < end; ++p) y[f.row_idx_[p]] -= f.values_[p] * yi;
      const double l_ki = yi / f.d_[i];
      dk -= l_ki * yi;
      f.row_idx_[end] = k;
      f.values_[end] = l_ki;
      ++lnz[i];
    }
    if (!std::isfinite(dk)) throw NumericError(fmt::format("LDL^T: non-finite pivot at step {}", k + 1));
    if (dk < f.pivot_floor_) {
      ++f.replaced_pivots_;
      if (f.replaced_pivots_ > 1) {
        throw NumericError(fmt::format(
            "LDL^T: {} pivots below floor {:.3g}; rank deficiency exceeds one",
            f.replaced_pivots_, f.pivot_floor_));
      }
      dk = f.pivot_floor_;
    }
    f.d_[k] = dk;
  }
  const std::size_t lower = std::max<std::size_t>(matrix.nnz(), 1);
  f.fill_ratio_ = static_cast<double>(f.nnz()) / static_cast<double>(lower);
  return f;
}

double LdltFactorization::fill_percent() const {
  if (dim_ == 0) return 0.0;
  const double dense = 0.5 * static_cast<double>(dim_) * (dim_ + 1.0);
  return 100.0 * static_cast<double>(nnz()) / dense;
}

void LdltFactorization::Solve(std::span<const double> b, std::span<double> x) const {
  if (static_cast<int>(b.size()) != dim_ || static_cast<int>(x.size()) != dim_) {
    throw DimensionError("LDL^T solve: size mismatch");
  }
  std::vector<double> y(dim_);
  for (int i = 0; i < dim_; ++i) y[i] = b[perm_[i]];
  for (int j = 0; j < dim_; ++j) {
    const double yj = y[j];
    for (int p = col_ptr_[j]; p < col_ptr_[j + 1]; ++p) y[row_idx_[p]] -= values_[p] * yj;
  }
  for (int j = 0; j < dim_; ++j) y[j] /= d_[j];
  for (int j = dim_ - 1; j >= 0; --j) {
    double acc = y[j];
    for (int p = col_ptr_[j]; p < col_ptr_[j + 1]; ++p) acc -= values_[p] * y[row_idx_[p]];
    y[j] = acc;
  }
  for (int i = 0; i < dim_; ++i) x[perm_[i]] = y[i];
}

}  // namespace otkit
