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
#include <vector>

#include <fmt/format.h>

#include "otkit/errors.hpp"
#include "otkit/linsolve.hpp"

namespace otkit {
namespace {

double Dot(std::span<const double> x, std::span<const double> y) {
  return std::inner_product(x.begin(), x.end(), y.begin(), 0.0);
}

void RemoveMean(std::span<double> v) {
  if (v.empty()) return;
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  for (double& x : v) x -= mean;
}

}  // namespace

PcgResult Pcg(const LinearOperator& matrix, std::span<const double> rhs,
              const LinearOperator& preconditioner, std::span<double> x,
              double tolerance, int max_iterations, bool deflate_ones) {
  const std::size_t size = rhs.size();
  if (x.size() != size) {
    throw DimensionError(fmt::format("pcg: solution length {} vs rhs {}", x.size(), size));
  }
  std::fill(x.begin(), x.end(), 0.0);
  std::vector<double> r(rhs.begin(), rhs.end());
  if (deflate_ones) RemoveMean(r);
  const double rhs_norm = std::sqrt(Dot(r, r));
  PcgResult result;
  if (!std::isfinite(rhs_norm)) throw NumericError("pcg: non-finite right-hand side");
  if (rhs_norm == 0.0) {
    result.converged = true;
    return result;
  }

  std::vector<double> z(size);
  std::vector<double> p(size);
  std::vector<double> ap(size);
  const auto precondition = [&] {
    if (preconditioner) {
      preconditioner(r, z);
    } else {
      std::copy(r.begin(), r.end(), z.begin());
    }
    if (deflate_ones) RemoveMean(z);
  };

  precondition();
  p = z;
  double rz = Dot(r, z);
  result.relative_residual = 1.0;
  for (int it = 1; it <= max_iterations; ++it) {
    matrix(p, ap);
    const double curvature = Dot(p, ap);
    if (!std::isfinite(curvature)) throw NumericError("pcg: non-finite curvature");
    if (curvature <= 0.0) break;  // p in the null space: nothing left to gain
    const double alpha = rz / curvature;
    for (std::size_t i = 0; i < size; ++i) {
      x[i] += alpha * p[i];
      r[i] -= alpha * ap[i];
    }
    if (deflate_ones) RemoveMean(r);
    result.iterations = it;
    result.relative_residual = std::sqrt(Dot(r, r)) / rhs_norm;
    if (!std::isfinite(result.relative_residual)) {
      throw NumericError("pcg: non-finite residual");
    }
    if (result.relative_residual <= tolerance) {
      result.converged = true;
      break;
    }
    precondition();
    const double rz_next = Dot(r, z);
    const double beta = rz_next / rz;
    rz = rz_next;
    for (std::size_t i = 0; i < size; ++i) p[i] = z[i] + beta * p[i];
  }
  if (deflate_ones) RemoveMean(x);
  return result;
}

}  // namespace otkit
