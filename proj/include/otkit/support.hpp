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

#ifndef OTKIT_SUPPORT_HPP_
#define OTKIT_SUPPORT_HPP_

#include <span>
#include <vector>

#include "otkit/instance.hpp"

namespace otkit {

// Variables with c_j < C_max, fixed for the whole solve. Heuristic pricing
// scans only this list. Endpoints are cached next to each index.
struct CandidateSet {
  double c_max = 0.0;
  std::vector<VarIndex> index;  // ascending
  std::vector<int> source;
  std::vector<int> sink;
  std::vector<double> cost;

  std::size_t size() const { return index.size(); }
};

CandidateSet BuildCandidateSet(const OTInstance& inst, double c_max);

// Sorted set of variables allowed to be nonzero. Owned by one solve.
class Support {
 public:
  Support() = default;
  explicit Support(std::vector<VarIndex> sorted_index);

  std::span<const VarIndex> index() const { return index_; }
  std::size_t size() const { return index_.size(); }
  bool empty() const { return index_.empty(); }
  bool Contains(VarIndex j) const;
  // Position of j in index(), or -1.
  std::ptrdiff_t Find(VarIndex j) const;

  const CandidateSet& candidates() const { return candidates_; }
  void set_candidates(CandidateSet set) { candidates_ = std::move(set); }

  // Iterations between full reduced-cost scans.
  int refresh_period() const { return refresh_period_; }
  void set_refresh_period(int period) { refresh_period_ = period; }

  // Replaces the index set; `sorted_index` must be strictly increasing.
  void Assign(std::vector<VarIndex> sorted_index);

 private:
  std::vector<VarIndex> index_;
  CandidateSet candidates_;
  int refresh_period_ = 3;
};

// Lowest-cost ~multiplier*(m+n-1) variables (ties by index), capped at m*n,
// then extended with cheapest connecting edges until the bipartite support
// graph is connected. Connectivity implies every source and sink has an
// incident variable. Throws ParameterError unless 1 <= multiplier.
Support InitialSupport(const OTInstance& inst, double multiplier);

struct PricedVariable {
  VarIndex index;
  double reduced_cost;
};

// Up to `max_count` variables outside the support with
// c_j - y[source] - y[m + sink] < -threshold, most negative first (ties by
// index). Scans all m*n variables.
std::vector<PricedVariable> FullReducedCosts(std::span<const double> y,
                                             const OTInstance& inst,
                                             const Support& support,
                                             std::size_t max_count,
                                             double threshold = 0.0);

// Same contract restricted to support.candidates().
std::vector<PricedVariable> HeuristicReducedCosts(std::span<const double> y,
                                                  const OTInstance& inst,
                                                  const Support& support,
                                                  std::size_t max_count,
                                                  double threshold = 0.0);

// Most negative reduced cost over every variable outside the support
// (+inf when the support is everything).
double MinReducedCost(std::span<const double> y, const OTInstance& inst,
                      const Support& support);

struct RemovalPolicy {
  bool near_convergence = false;
  // A variable may leave when p_j < threshold.
  double threshold = 0.0;
  // Additionally require p_j < s_j (the variable looks nonbasic).
  bool require_p_below_s = false;
  std::size_t max_removed = 0;
};

struct SupportUpdate {
  std::vector<VarIndex> entered;
  std::vector<VarIndex> removed;
  // Removal candidates kept because dropping them would disconnect the
  // support graph (and possibly leave a constraint row empty).
  std::vector<VarIndex> vetoed;
};

// Adds `entering` (not already in the support) with p_j = s_j = sqrt(mu) and,
// when policy.near_convergence, removes up to policy.max_removed variables
// with p_j < policy.threshold, smallest p first. `p` and `s` are the reduced
// primal and slack vectors aligned with support.index(); they are rewritten
// to stay aligned. Throws ParameterError when more than m variables enter.
SupportUpdate UpdateSupport(Support& support,
                            std::span<const VarIndex> entering,
                            std::vector<double>& p, std::vector<double>& s,
                            double mu, const RemovalPolicy& policy, int m,
                            int n);

}  // namespace otkit

#endif  // OTKIT_SUPPORT_HPP_
