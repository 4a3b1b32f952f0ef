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

#ifndef OTKIT_TESTS_TEST_UTIL_HPP_
#define OTKIT_TESTS_TEST_UTIL_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "otkit/instance.hpp"
#include "otkit/schur.hpp"

namespace otkit::testing {

// Cost families for small random instances.
enum class RandomCost { kL1, kL2, kLinf, kExplicit };

inline const char* RandomCostName(RandomCost kind) {
  switch (kind) {
    case RandomCost::kL1:
      return "L1";
    case RandomCost::kL2:
      return "L2";
    case RandomCost::kLinf:
      return "LINF";
    case RandomCost::kExplicit:
      return "explicit";
  }
  return "?";
}

inline std::vector<double> RandomMasses(int count, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> mass(0.05, 1.0);
  std::vector<double> v(count);
  for (double& x : v) x = mass(rng);
  const double total = std::accumulate(v.begin(), v.end(), 0.0);
  for (double& x : v) x /= total;
  return v;
}

// Unit-mass marginals; metric costs are distances between random points in
// the unit square, explicit costs are uniform on [0, 1].
inline OTInstance RandomInstance(int m, int n, RandomCost kind, std::mt19937_64& rng) {
  std::vector<double> a = RandomMasses(m, rng);
  std::vector<double> b = RandomMasses(n, rng);
  // Remove the rounding imbalance.
  const double sa = std::accumulate(a.begin(), a.end(), 0.0);
  const double sb = std::accumulate(b.begin(), b.end(), 0.0);
  b[std::max_element(b.begin(), b.end()) - b.begin()] += sa - sb;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  ExplicitCost cost;
  cost.values.resize(static_cast<std::size_t>(m) * n);
  if (kind == RandomCost::kExplicit) {
    for (double& c : cost.values) c = unit(rng);
  } else {
    std::vector<double> px(m), py(m), qx(n), qy(n);
    for (int i = 0; i < m; ++i) {
      px[i] = unit(rng);
      py[i] = unit(rng);
    }
    for (int k = 0; k < n; ++k) {
      qx[k] = unit(rng);
      qy[k] = unit(rng);
    }
    for (int k = 0; k < n; ++k) {
      for (int i = 0; i < m; ++i) {
        const double dx = std::abs(px[i] - qx[k]);
        const double dy = std::abs(py[i] - qy[k]);
        double c = 0.0;
        if (kind == RandomCost::kL1) c = dx + dy;
        if (kind == RandomCost::kL2) c = std::sqrt(dx * dx + dy * dy);
        if (kind == RandomCost::kLinf) c = std::max(dx, dy);
        cost.values[static_cast<std::size_t>(i) + static_cast<std::size_t>(k) * m] = c;
      }
    }
  }
  return OTInstance(std::move(a), std::move(b), std::move(cost));
}

// Dense constraint matrix: row i of the first block sums source i, row m+k
// sums sink k; column j couples j % m and j / m.
inline Eigen::MatrixXd DenseA(int m, int n) {
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(m + n, static_cast<Eigen::Index>(m) * n);
  for (int j = 0; j < m * n; ++j) {
    A(j % m, j) = 1.0;
    A(m + j / m, j) = 1.0;
  }
  return A;
}

inline Eigen::MatrixXd DenseRestrictedA(int m, int n, const std::vector<VarIndex>& support) {
  const Eigen::MatrixXd A = DenseA(m, n);
  Eigen::MatrixXd R(m + n, static_cast<Eigen::Index>(support.size()));
  for (std::size_t t = 0; t < support.size(); ++t) R.col(t) = A.col(support[t]);
  return R;
}

inline Eigen::VectorXd ToEigen(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

inline std::vector<double> ToStd(const Eigen::VectorXd& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

// Random sorted support of the given size.
inline std::vector<VarIndex> RandomSupport(int m, int n, std::size_t size,
                                           std::mt19937_64& rng) {
  std::vector<VarIndex> all(static_cast<std::size_t>(m) * n);
  std::iota(all.begin(), all.end(), VarIndex{0});
  std::shuffle(all.begin(), all.end(), rng);
  all.resize(std::min(size, all.size()));
  std::sort(all.begin(), all.end());
  return all;
}

// Random support whose bipartite graph is connected (a random spanning
// tree plus extra edges).
inline std::vector<VarIndex> RandomConnectedSupport(int m, int n, std::size_t extra,
                                                    std::mt19937_64& rng) {
  std::vector<int> pending(m + n);
  std::iota(pending.begin(), pending.end(), 0);
  std::shuffle(pending.begin(), pending.end(), rng);
  std::vector<int> tree_sources, tree_sinks;
  const int root = pending.back();
  pending.pop_back();
  (root < m ? tree_sources : tree_sinks).push_back(root);
  std::vector<VarIndex> chosen;
  while (!pending.empty()) {
    // First pending node with a tree node on the other side.
    auto it = std::find_if(pending.begin(), pending.end(), [&](int x) {
      return x < m ? !tree_sinks.empty() : !tree_sources.empty();
    });
    const int x = *it;
    pending.erase(it);
    const auto& other = x < m ? tree_sinks : tree_sources;
    const int y = other[std::uniform_int_distribution<std::size_t>(0, other.size() - 1)(rng)];
    const int i = x < m ? x : y;
    const int k = (x < m ? y : x) - m;
    chosen.push_back(i + static_cast<VarIndex>(k) * m);
    (x < m ? tree_sources : tree_sinks).push_back(x);
  }
  std::uniform_int_distribution<VarIndex> any(0, static_cast<VarIndex>(m) * n - 1);
  for (std::size_t t = 0; t < extra; ++t) chosen.push_back(any(rng));
  std::sort(chosen.begin(), chosen.end());
  chosen.erase(std::unique(chosen.begin(), chosen.end()), chosen.end());
  return chosen;
}

}  // namespace otkit::testing

#endif  // OTKIT_TESTS_TEST_UTIL_HPP_
