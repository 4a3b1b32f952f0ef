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

#include "otkit/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include <fmt/format.h>

#include "otkit/errors.hpp"

namespace otkit {

double SparseSymmetric::Diagonal(int j) const {
  const int begin = col_ptr[j];
  if (begin < col_ptr[j + 1] && row_idx[begin] == j) return values[begin];
  return 0.0;
}

double SparseSymmetric::MaxDiagonal() const {
  double best = 0.0;
  for (int j = 0; j < dim; ++j) best = std::max(best, std::abs(Diagonal(j)));
  return best;
}

void SparseSymmetric::Multiply(std::span<const double> x, std::span<double> y) const {
  if (static_cast<int>(x.size()) != dim || static_cast<int>(y.size()) != dim) {
    throw DimensionError(fmt::format("sparse multiply: sizes {} / {} for dim {}",
                                     x.size(), y.size(), dim));
  }
  std::fill(y.begin(), y.end(), 0.0);
  for (int j = 0; j < dim; ++j) {
    for (int p = col_ptr[j]; p < col_ptr[j + 1]; ++p) {
      const int i = row_idx[p];
      y[i] += values[p] * x[j];
      if (i != j) y[j] += values[p] * x[i];
    }
  }
}

std::vector<std::vector<int>> SparseSymmetric::Adjacency() const {
  std::vector<std::vector<int>> adj(dim);
  for (int j = 0; j < dim; ++j) {
    for (int p = col_ptr[j]; p < col_ptr[j + 1]; ++p) {
      const int i = row_idx[p];
      if (i == j) continue;
      adj[i].push_back(j);
      adj[j].push_back(i);
    }
  }
  for (auto& list : adj) std::sort(list.begin(), list.end());
  return adj;
}

SparseSymmetric SparseSymmetric::FromDense(int dim, std::span<const double> dense) {
  if (static_cast<long>(dense.size()) != static_cast<long>(dim) * dim) {
    throw DimensionError("dense matrix size mismatch");
  }
  SparseSymmetric s;
  s.dim = dim;
  s.col_ptr.assign(dim + 1, 0);
  for (int j = 0; j < dim; ++j) {
    for (int i = j; i < dim; ++i) {
      const double v = dense[static_cast<std::size_t>(i) * dim + j];
      if (v != 0.0 || i == j) {
        s.row_idx.push_back(i);
        s.values.push_back(v);
      }
    }
    s.col_ptr[j + 1] = static_cast<int>(s.row_idx.size());
  }
  return s;
}

std::vector<double> SparseSymmetric::ToDense() const {
  std::vector<double> dense(static_cast<std::size_t>(dim) * dim, 0.0);
  for (int j = 0; j < dim; ++j) {
    for (int p = col_ptr[j]; p < col_ptr[j + 1]; ++p) {
      const int i = row_idx[p];
      dense[static_cast<std::size_t>(i) * dim + j] = values[p];
      dense[static_cast<std::size_t>(j) * dim + i] = values[p];
    }
  }
  return dense;
}

void WriteMatrixMarket(const SparseSymmetric& matrix, std::ostream& out,
                       bool pattern_only) {
  out << "%%MatrixMarket matrix coordinate " << (pattern_only ? "pattern" : "real")
      << " symmetric\n";
  out << matrix.dim << " " << matrix.dim << " " << matrix.nnz() << "\n";
  for (int j = 0; j < matrix.dim; ++j) {
    for (int p = matrix.col_ptr[j]; p < matrix.col_ptr[j + 1]; ++p) {
      out << matrix.row_idx[p] + 1 << " " << j + 1;
      if (!pattern_only) out << fmt::format(" {:.17g}", matrix.values[p]);
      out << "\n";
    }
  }
}

}  // namespace otkit
