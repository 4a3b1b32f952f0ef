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

#ifndef OTKIT_SPARSE_HPP_
#define OTKIT_SPARSE_HPP_

#include <iosfwd>
#include <span>
#include <vector>

namespace otkit {

// Symmetric matrix in compressed-column form holding the lower triangle.
// Row indices are sorted within each column, so the diagonal (when stored)
// is the first entry of its column.
struct SparseSymmetric {
  int dim = 0;
  std::vector<int> col_ptr;  // dim + 1 entries
  std::vector<int> row_idx;
  std::vector<double> values;

  std::size_t nnz() const { return row_idx.size(); }
  double Diagonal(int j) const;
  double MaxDiagonal() const;

  // y = S x using both triangles.
  void Multiply(std::span<const double> x, std::span<double> y) const;

  // Off-diagonal neighbours of every node, sorted ascending.
  std::vector<std::vector<int>> Adjacency() const;

  // Builds from a dense row-major dim x dim matrix (lower triangle read,
  // exact zeros skipped except on the diagonal).
  static SparseSymmetric FromDense(int dim, std::span<const double> dense);
  // Dense row-major copy with both triangles.
  std::vector<double> ToDense() const;
};

// Matrix Market coordinate dump ("symmetric", lower triangle, 1-based).
void WriteMatrixMarket(const SparseSymmetric& matrix, std::ostream& out,
                       bool pattern_only = false);

}  // namespace otkit

#endif  // OTKIT_SPARSE_HPP_
