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

#include "otkit/schur.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "otkit/errors.hpp"

namespace otkit {
namespace {

// Floor applied to an empty row/column sum before it is inverted.
constexpr double kDiagonalFloor = 1e-30;

void RequireSize(std::size_t got, int expected, const char* what) {
  if (static_cast<int>(got) != expected) {
    throw DimensionError(fmt::format("{}: length {}, expected {}", what, got, expected));
  }
}

double Mean(std::span<const double> v) {
  if (v.empty()) return 0.0;
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

}  // namespace

SchurSystem SchurSystem::Assemble(std::span<const VarIndex> support,
                                  std::span<const double> theta, int m, int n) {
  if (support.size() != theta.size()) {
    throw DimensionError(fmt::format("theta has {} entries for a support of {}",
                                     theta.size(), support.size()));
  }
  if (support.empty()) throw DimensionError("empty support");
  SchurSystem sys;
  sys.m_ = m;
  sys.n_ = n;
  sys.side_ = n <= m ? SchurSide::kEliminateM : SchurSide::kEliminateN;
  const VarIndex total = static_cast<VarIndex>(m) * n;

  sys.v_col_ptr_.assign(n + 1, 0);
  sys.v_row_.resize(support.size());
  sys.v_val_.resize(support.size());
  std::vector<int> row_counts(m, 0);
  for (std::size_t t = 0; t < support.size(); ++t) {
    const VarIndex j = support[t];
    if (j < 0 || j >= total) {
      throw IndexError(fmt::format("support index {} outside 1..{}", j + 1, total));
    }
    if (t > 0 && j <= support[t - 1]) throw ParameterError("support not sorted");
    if (!(theta[t] > 0.0) || !std::isfinite(theta[t])) {
      throw NumericError(fmt::format("theta[{}] = {} is not positive", j + 1, theta[t]));
    }
    const int i = static_cast<int>(j % m);
    const int k = static_cast<int>(j / m);
    sys.v_row_[t] = i;
    sys.v_val_[t] = theta[t];
    ++sys.v_col_ptr_[k + 1];
    ++row_counts[i];
  }
  std::partial_sum(sys.v_col_ptr_.begin(), sys.v_col_ptr_.end(), sys.v_col_ptr_.begin());

  sys.v_row_ptr_.assign(m + 1, 0);
  for (int i = 0; i < m; ++i) sys.v_row_ptr_[i + 1] = sys.v_row_ptr_[i] + row_counts[i];
  sys.v_col_.resize(support.size());
  sys.v_row_val_.resize(support.size());
  std::vector<int> cursor(sys.v_row_ptr_.begin(), sys.v_row_ptr_.end() - 1);
  for (int k = 0; k < n; ++k) {
    for (int p = sys.v_col_ptr_[k]; p < sys.v_col_ptr_[k + 1]; ++p) {
      const int slot = cursor[sys.v_row_[p]]++;
      sys.v_col_[slot] = k;
      sys.v_row_val_[slot] = sys.v_val_[p];
    }
  }

  // Row and column sums, accumulated in the same order the Laplacian
  // multiply uses so that S e is exactly zero.
  sys.row_sums_.assign(m, 0.0);
  sys.col_sums_.assign(n, 0.0);
  for (int i = 0; i < m; ++i) {
    for (int p = sys.v_row_ptr_[i]; p < sys.v_row_ptr_[i + 1]; ++p) {
      sys.row_sums_[i] += sys.v_row_val_[p];
    }
  }
  for (int k = 0; k < n; ++k) {
    for (int p = sys.v_col_ptr_[k]; p < sys.v_col_ptr_[k + 1]; ++p) {
      sys.col_sums_[k] += sys.v_val_[p];
    }
  }
  for (double* sums : {sys.row_sums_.data(), sys.col_sums_.data()}) {
    const int count = sums == sys.row_sums_.data() ? m : n;
    for (int r = 0; r < count; ++r) {
      if (sums[r] <= 0.0) {
        sums[r] = kDiagonalFloor;
        ++sys.guarded_;
      }
    }
  }
  if (sys.guarded_ > 0) {
    spdlog::warn("schur assembly: {} empty rows/columns in V, diagonal floored to {}",
                 sys.guarded_, kDiagonalFloor);
  }
  return sys;
}

void SchurSystem::MultiplyV(std::span<const double> x, std::span<double> out) const {
  RequireSize(x.size(), n_, "V x input");
  RequireSize(out.size(), m_, "V x output");
  std::fill(out.begin(), out.end(), 0.0);
  for (int k = 0; k < n_; ++k) {
    for (int p = v_col_ptr_[k]; p < v_col_ptr_[k + 1]; ++p) out[v_row_[p]] += v_val_[p] * x[k];
  }
}

void SchurSystem::MultiplyVt(std::span<const double> x, std::span<double> out) const {
  RequireSize(x.size(), m_, "V^T x input");
  RequireSize(out.size(), n_, "V^T x output");
  for (int k = 0; k < n_; ++k) {
    double acc = 0.0;
    for (int p = v_col_ptr_[k]; p < v_col_ptr_[k + 1]; ++p) acc += v_val_[p] * x[v_row_[p]];
    out[k] = acc;
  }
}

void SchurSystem::Multiply(std::span<const double> v, std::span<double> out) const {
  RequireSize(v.size(), dim(), "Schur multiply input");
  RequireSize(out.size(), dim(), "Schur multiply output");
  std::fill(out.begin(), out.end(), 0.0);
  // (S v)_c = sum_r W_rc (v_c - t_r), t_r the W-weighted mean of v over the
  // eliminated node r.
  const bool by_row = side_ == SchurSide::kEliminateM;
  const int eliminated = by_row ? m_ : n_;
  const int* ptr = by_row ? v_row_ptr_.data() : v_col_ptr_.data();
  const int* idx = by_row ? v_col_.data() : v_row_.data();
  const double* val = by_row ? v_row_val_.data() : v_val_.data();
  const double* diag = by_row ? row_sums_.data() : col_sums_.data();
  for (int r = 0; r < eliminated; ++r) {
    double weighted = 0.0;
    for (int p = ptr[r]; p < ptr[r + 1]; ++p) weighted += val[p] * v[idx[p]];
    const double mean = weighted / diag[r];
    for (int p = ptr[r]; p < ptr[r + 1]; ++p) out[idx[p]] += val[p] * (v[idx[p]] - mean);
  }
}

SparseSymmetric SchurSystem::AssembleSparse(double lift, std::size_t max_nnz) const {
  const bool by_row = side_ == SchurSide::kEliminateM;
  // Eliminated-node lists (node -> kept neighbours) and kept-node lists.
  const int* e_ptr = by_row ? v_row_ptr_.data() : v_col_ptr_.data();
  const int* e_idx = by_row ? v_col_.data() : v_row_.data();
  const double* e_val = by_row ? v_row_val_.data() : v_val_.data();
  const int* k_ptr = by_row ? v_col_ptr_.data() : v_row_ptr_.data();
  const int* k_idx = by_row ? v_row_.data() : v_col_.data();
  const double* k_val = by_row ? v_val_.data() : v_row_val_.data();
  const double* diag = by_row ? row_sums_.data() : col_sums_.data();

  const int size = dim();
  SparseSymmetric s;
  s.dim = size;
  s.col_ptr.assign(size + 1, 0);
  std::vector<double> acc(size, 0.0);
  std::vector<int> mark(size, -1);
  std::vector<int> pattern;
  for (int c = 0; c < size; ++c) {
    pattern.clear();
    for (int q = k_ptr[c]; q < k_ptr[c + 1]; ++q) {
      const int r = k_idx[q];
      const double coef = k_val[q] / diag[r];
      for (int p = e_ptr[r]; p < e_ptr[r + 1]; ++p) {
        const int other = e_idx[p];
        if (other == c) continue;
        if (mark[other] != c) {
          mark[other] = c;
          acc[other] = 0.0;
          pattern.push_back(other);
        }
        acc[other] += coef * e_val[p];
      }
    }
    std::sort(pattern.begin(), pattern.end());
    double off_sum = 0.0;
    for (int other : pattern) off_sum += acc[other];
    s.row_idx.push_back(c);
    s.values.push_back(off_sum + lift);
    for (int other : pattern) {
      if (other > c) {
        s.row_idx.push_back(other);
        s.values.push_back(-acc[other]);
      }
    }
    if (s.row_idx.size() > max_nnz) {
      throw ResourceError(fmt::format(
          "explicit Schur complement exceeds {} stored entries", max_nnz));
    }
    s.col_ptr[c + 1] = static_cast<int>(s.row_idx.size());
  }
  return s;
}

void SchurSystem::ProjectRhs(std::span<const double> beta1,
                             std::span<const double> beta2, std::vector<double>& b1,
                             std::vector<double>& b2) const {
  RequireSize(beta1.size(), m_, "beta1");
  RequireSize(beta2.size(), n_, "beta2");
  const double shift =
      (std::accumulate(beta1.begin(), beta1.end(), 0.0) -
       std::accumulate(beta2.begin(), beta2.end(), 0.0)) /
      static_cast<double>(m_ + n_);
  b1.assign(beta1.begin(), beta1.end());
  b2.assign(beta2.begin(), beta2.end());
  for (double& v : b1) v -= shift;
  for (double& v : b2) v += shift;
}

void SchurSystem::ReduceRhs(std::span<const double> beta1, std::span<const double> beta2,
                            std::span<double> reduced) const {
  RequireSize(reduced.size(), dim(), "reduced rhs");
  std::vector<double> b1, b2;
  ProjectRhs(beta1, beta2, b1, b2);
  if (side_ == SchurSide::kEliminateM) {
    for (int i = 0; i < m_; ++i) b1[i] /= row_sums_[i];
    MultiplyVt(b1, reduced);
    for (int k = 0; k < n_; ++k) reduced[k] = b2[k] - reduced[k];
  } else {
    for (int k = 0; k < n_; ++k) b2[k] /= col_sums_[k];
    MultiplyV(b2, reduced);
    for (int i = 0; i < m_; ++i) reduced[i] = b1[i] - reduced[i];
  }
  const double mean = Mean(reduced);
  for (double& v : reduced) v -= mean;
}

void SchurSystem::ExpandSolution(std::span<const double> beta1,
                                 std::span<const double> beta2,
                                 std::span<const double> active,
                                 std::span<double> alpha1,
                                 std::span<double> alpha2) const {
  RequireSize(active.size(), dim(), "Schur solution");
  RequireSize(alpha1.size(), m_, "alpha1");
  RequireSize(alpha2.size(), n_, "alpha2");
  std::vector<double> b1, b2;
  ProjectRhs(beta1, beta2, b1, b2);
  if (side_ == SchurSide::kEliminateM) {
    std::copy(active.begin(), active.end(), alpha2.begin());
    MultiplyV(alpha2, alpha1);
    for (int i = 0; i < m_; ++i) alpha1[i] = (b1[i] - alpha1[i]) / row_sums_[i];
  } else {
    std::copy(active.begin(), active.end(), alpha1.begin());
    MultiplyVt(alpha1, alpha2);
    for (int k = 0; k < n_; ++k) alpha2[k] = (b2[k] - alpha2[k]) / col_sums_[k];
  }
  const double shift =
      (std::accumulate(alpha1.begin(), alpha1.end(), 0.0) -
       std::accumulate(alpha2.begin(), alpha2.end(), 0.0)) /
      static_cast<double>(m_ + n_);
  for (double& v : alpha1) v -= shift;
  for (double& v : alpha2) v += shift;
}

void SchurSystem::SolveBlock(std::span<const double> beta1, std::span<const double> beta2,
                             const SchurSolve& schur_solve, std::span<double> alpha1,
                             std::span<double> alpha2) const {
  std::vector<double> reduced(dim());
  std::vector<double> active(dim(), 0.0);
  ReduceRhs(beta1, beta2, reduced);
  schur_solve(reduced, active);
  ExpandSolution(beta1, beta2, active, alpha1, alpha2);
}

void SchurSystem::MultiplyBlock(std::span<const double> x1, std::span<const double> x2,
                                std::span<double> out1, std::span<double> out2) const {
  MultiplyV(x2, out1);
  for (int i = 0; i < m_; ++i) out1[i] += row_sums_[i] * x1[i];
  MultiplyVt(x1, out2);
  for (int k = 0; k < n_; ++k) out2[k] += col_sums_[k] * x2[k];
}

}  // namespace otkit
