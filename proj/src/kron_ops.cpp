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

#include "otkit/kron_ops.hpp"

#include <algorithm>

#include <fmt/format.h>

#include "otkit/errors.hpp"

namespace otkit {
namespace {

void CheckSize(std::size_t got, VarIndex expected, const char* what) {
  if (static_cast<VarIndex>(got) != expected) {
    throw DimensionError(
        fmt::format("{}: length {} does not match expected {}", what, got, expected));
  }
}

}  // namespace

ConstraintOperator::ConstraintOperator(int m, int n) : m_(m), n_(n) {
  if (m < 1 || n < 1) {
    throw DimensionError(fmt::format("constraint operator needs m, n >= 1 ({} x {})", m, n));
  }
}

void ConstraintOperator::CheckIndex(VarIndex j) const {
  if (j < 0 || j >= cols()) {
    throw IndexError(fmt::format("variable index {} outside 1..{}", j + 1, cols()));
  }
}

Endpoints ConstraintOperator::ColumnEndpoints(VarIndex j) const {
  CheckIndex(j);
  return {static_cast<int>(j % m_), static_cast<int>(j / m_)};
}

void ConstraintOperator::Apply(std::span<const double> x,
                               std::span<double> out) const {
  CheckSize(x.size(), cols(), "apply A input");
  CheckSize(out.size(), rows(), "apply A output");
  std::fill(out.begin(), out.end(), 0.0);
  double* row_sums = out.data();
  double* col_sums = out.data() + m_;
  for (int k = 0; k < n_; ++k) {
    const double* column = x.data() + static_cast<VarIndex>(k) * m_;
    double total = 0.0;
    for (int i = 0; i < m_; ++i) {
      row_sums[i] += column[i];
      total += column[i];
    }
    col_sums[k] = total;
  }
}

void ConstraintOperator::ApplyTranspose(std::span<const double> u,
                                        std::span<const double> w,
                                        std::span<double> out) const {
  CheckSize(u.size(), m_, "apply A^T u");
  CheckSize(w.size(), n_, "apply A^T w");
  CheckSize(out.size(), cols(), "apply A^T output");
  for (int k = 0; k < n_; ++k) {
    double* column = out.data() + static_cast<VarIndex>(k) * m_;
    for (int i = 0; i < m_; ++i) column[i] = u[i] + w[k];
  }
}

void ConstraintOperator::ApplyTranspose(std::span<const double> y,
                                        std::span<double> out) const {
  CheckSize(y.size(), rows(), "apply A^T y");
  ApplyTranspose(y.first(m_), y.subspan(m_), out);
}

void ConstraintOperator::ApplyRestricted(std::span<const double> x_red,
                                         std::span<const VarIndex> support,
                                         std::span<double> out) const {
  CheckSize(x_red.size(), static_cast<VarIndex>(support.size()), "restricted A input");
  CheckSize(out.size(), rows(), "restricted A output");
  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t t = 0; t < support.size(); ++t) {
    const VarIndex j = support[t];
    CheckIndex(j);
    out[j % m_] += x_red[t];
    out[m_ + j / m_] += x_red[t];
  }
}

void ConstraintOperator::ApplyTransposeRestricted(
    std::span<const double> y, std::span<const VarIndex> support,
    std::span<double> out) const {
  CheckSize(y.size(), rows(), "restricted A^T input");
  CheckSize(out.size(), static_cast<VarIndex>(support.size()), "restricted A^T output");
  for (std::size_t t = 0; t < support.size(); ++t) {
    const VarIndex j = support[t];
    CheckIndex(j);
    out[t] = y[j % m_] + y[m_ + j / m_];
  }
}

}  // namespace otkit
