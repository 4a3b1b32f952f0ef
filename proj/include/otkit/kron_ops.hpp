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

#ifndef OTKIT_KRON_OPS_HPP_
#define OTKIT_KRON_OPS_HPP_

#include <span>

#include "otkit/instance.hpp"

namespace otkit {

// Source and sink touched by variable j (0-based).
struct Endpoints {
  int source;
  int sink;
  friend bool operator==(const Endpoints&, const Endpoints&) = default;
};

// Matrix-free view of the transport constraint matrix
//
//   A = [ e_n^T (x) I_m ]   (row sums of P = unvec(p))
//       [ I_n (x) e_m^T ]   (column sums of P)
//
// with m + n rows and m * n columns, two unit entries per column. A has rank
// m + n - 1; [e_m; -e_n] spans its left null space.
//
// Every method writes into a caller-provided buffer and checks sizes.
class ConstraintOperator {
 public:
  ConstraintOperator(int m, int n);

  int m() const { return m_; }
  int n() const { return n_; }
  int rows() const { return m_ + n_; }
  VarIndex cols() const { return static_cast<VarIndex>(m_) * n_; }

  Endpoints ColumnEndpoints(VarIndex j) const;

  // out = A x, with x of length m*n and out of length m+n.
  void Apply(std::span<const double> x, std::span<double> out) const;

  // out = A^T [u; w] = vec(u e_n^T + e_m w^T).
  void ApplyTranspose(std::span<const double> u, std::span<const double> w,
                      std::span<double> out) const;
  // Same with y = [u; w] packed in a single vector.
  void ApplyTranspose(std::span<const double> y, std::span<double> out) const;

  // out = A_red x_red where A_red keeps the columns listed in `support`.
  // O(|support|); never touches an m*n buffer.
  void ApplyRestricted(std::span<const double> x_red,
                       std::span<const VarIndex> support,
                       std::span<double> out) const;

  // out = A_red^T y, one entry per support index.
  void ApplyTransposeRestricted(std::span<const double> y,
                                std::span<const VarIndex> support,
                                std::span<double> out) const;

 private:
  void CheckIndex(VarIndex j) const;

  int m_;
  int n_;
};

}  // namespace otkit

#endif  // OTKIT_KRON_OPS_HPP_
