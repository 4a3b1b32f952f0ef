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

#include "otkit/support.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <utility>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "detail/disjoint_sets.hpp"
#include "otkit/errors.hpp"

namespace otkit {
namespace {

// Orders priced variables by (reduced cost, index); the heap top is the
// worst of the kept candidates.
struct WorseFirst {
  bool operator()(const PricedVariable& x, const PricedVariable& y) const {
    if (x.reduced_cost != y.reduced_cost) return x.reduced_cost < y.reduced_cost;
    return x.index < y.index;
  }
};

class TopK {
 public:
  explicit TopK(std::size_t k) : k_(k) {}

  void Offer(VarIndex j, double rc) {
    if (k_ == 0) return;
    const PricedVariable item{j, rc};
    if (heap_.size() < k_) {
      heap_.push(item);
    } else if (WorseFirst()(item, heap_.top())) {
      heap_.pop();
      heap_.push(item);
    }
  }

  std::vector<PricedVariable> Sorted() {
    std::vector<PricedVariable> out;
    out.reserve(heap_.size());
    while (!heap_.empty()) {
      out.push_back(heap_.top());
      heap_.pop();
    }
    std::reverse(out.begin(), out.end());
    return out;
  }

 private:
  std::size_t k_;
  std::priority_queue<PricedVariable, std::vector<PricedVariable>, WorseFirst> heap_;
};

void CheckDual(std::span<const double> y, const OTInstance& inst) {
  if (static_cast<int>(y.size()) != inst.num_constraints()) {
    throw DimensionError(fmt::format("multiplier has length {}, expected {}",
                                     y.size(), inst.num_constraints()));
  }
}

}  // namespace

CandidateSet BuildCandidateSet(const OTInstance& inst, double c_max) {
  CandidateSet set;
  set.c_max = c_max;
  const int m = inst.m();
  const CostView& cost = inst.cost_view();
  for (VarIndex j = 0; j < inst.num_variables(); ++j) {
    const double c = cost(j);
    if (c < c_max) {
      set.index.push_back(j);
      set.source.push_back(static_cast<int>(j % m));
      set.sink.push_back(static_cast<int>(j / m));
      set.cost.push_back(c);
    }
  }
  return set;
}

Support::Support(std::vector<VarIndex> sorted_index) { Assign(std::move(sorted_index)); }

void Support::Assign(std::vector<VarIndex> sorted_index) {
  for (std::size_t t = 1; t < sorted_index.size(); ++t) {
    if (sorted_index[t] <= sorted_index[t - 1]) {
      throw ParameterError("support index must be strictly increasing");
    }
  }
  index_ = std::move(sorted_index);
}

std::ptrdiff_t Support::Find(VarIndex j) const {
  const auto it = std::lower_bound(index_.begin(), index_.end(), j);
  if (it == index_.end() || *it != j) return -1;
  return it - index_.begin();
}

bool Support::Contains(VarIndex j) const { return Find(j) >= 0; }

Support InitialSupport(const OTInstance& inst, double multiplier) {
  if (!(multiplier >= 1.0)) {
    throw ParameterError(fmt::format("support multiplier must be >= 1, got {}", multiplier));
  }
  const int m = inst.m();
  const int n = inst.n();
  const VarIndex total = inst.num_variables();
  const auto wanted = static_cast<VarIndex>(std::llround(multiplier * (m + n - 1)));
  const auto target = static_cast<std::size_t>(std::clamp<VarIndex>(wanted, 1, total));
  const CostView& cost = inst.cost_view();

  // Keep the `target` smallest (cost, index) pairs.
  TopK cheapest(target);
  for (VarIndex j = 0; j < total; ++j) cheapest.Offer(j, cost(j));
  std::vector<VarIndex> chosen;
  chosen.reserve(target);
  for (const auto& item : cheapest.Sorted()) chosen.push_back(item.index);

  // Boruvka rounds: join components with their cheapest outgoing edge.
  detail::DisjointSets sets(m + n);
  for (VarIndex j : chosen) sets.Union(static_cast<int>(j % m), m + static_cast<int>(j / m));
  while (sets.sets() > 1) {
    constexpr VarIndex kNone = -1;
    std::vector<std::pair<double, VarIndex>> best(
        static_cast<std::size_t>(m + n), {std::numeric_limits<double>::infinity(), kNone});
    for (VarIndex j = 0; j < total; ++j) {
      const int ri = sets.Find(static_cast<int>(j % m));
      const int rk = sets.Find(m + static_cast<int>(j / m));
      if (ri == rk) continue;
      const std::pair<double, VarIndex> edge{cost(j), j};
      if (edge < best[ri]) best[ri] = edge;
      if (edge < best[rk]) best[rk] = edge;
    }
    bool joined = false;
    for (const auto& [c, j] : best) {
      if (j == kNone) continue;
      if (sets.Union(static_cast<int>(j % m), m + static_cast<int>(j / m))) {
        chosen.push_back(j);
        joined = true;
      }
    }
    if (!joined) throw Error("initial support: coverage repair failed");
  }
  std::sort(chosen.begin(), chosen.end());
  chosen.erase(std::unique(chosen.begin(), chosen.end()), chosen.end());
  return Support(std::move(chosen));
}

std::vector<PricedVariable> FullReducedCosts(std::span<const double> y,
                                             const OTInstance& inst,
                                             const Support& support,
                                             std::size_t max_count,
                                             double threshold) {
  CheckDual(y, inst);
  const int m = inst.m();
  const int n = inst.n();
  const CostView& cost = inst.cost_view();
  const auto index = support.index();
  std::size_t next = 0;
  TopK best(max_count);
  for (int k = 0; k < n; ++k) {
    const double yk = y[m + k];
    const VarIndex base = static_cast<VarIndex>(k) * m;
    for (int i = 0; i < m; ++i) {
      const VarIndex j = base + i;
      if (next < index.size() && index[next] == j) {
        ++next;
        continue;
      }
      const double rc = cost(j) - y[i] - yk;
      if (rc < -threshold) best.Offer(j, rc);
    }
  }
  return best.Sorted();
}

std::vector<PricedVariable> HeuristicReducedCosts(std::span<const double> y,
                                                  const OTInstance& inst,
                                                  const Support& support,
                                                  std::size_t max_count,
                                                  double threshold) {
  CheckDual(y, inst);
  const int m = inst.m();
  const CandidateSet& cand = support.candidates();
  const auto index = support.index();
  std::size_t next = 0;
  TopK best(max_count);
  for (std::size_t t = 0; t < cand.size(); ++t) {
    const VarIndex j = cand.index[t];
    while (next < index.size() && index[next] < j) ++next;
    if (next < index.size() && index[next] == j) continue;
    const double rc = cand.cost[t] - y[cand.source[t]] - y[m + cand.sink[t]];
    if (rc < -threshold) best.Offer(j, rc);
  }
  return best.Sorted();
}

double MinReducedCost(std::span<const double> y, const OTInstance& inst,
                      const Support& support) {
  CheckDual(y, inst);
  const int m = inst.m();
  const CostView& cost = inst.cost_view();
  const auto index = support.index();
  std::size_t next = 0;
  double lowest = std::numeric_limits<double>::infinity();
  for (VarIndex j = 0; j < inst.num_variables(); ++j) {
    if (next < index.size() && index[next] == j) {
      ++next;
      continue;
    }
    lowest = std::min(lowest, cost(j) - y[j % m] - y[m + j / m]);
  }
  return lowest;
}

SupportUpdate UpdateSupport(Support& support, std::span<const VarIndex> entering,
                            std::vector<double>& p, std::vector<double>& s,
                            double mu, const RemovalPolicy& policy, int m, int n) {
  const auto index = support.index();
  if (p.size() != index.size() || s.size() != index.size()) {
    throw DimensionError("primal/slack vectors not aligned with the support");
  }
  if (static_cast<int>(entering.size()) > m) {
    throw ParameterError(fmt::format("{} variables entering, at most m = {} allowed",
                                     entering.size(), m));
  }
  const VarIndex total = static_cast<VarIndex>(m) * n;
  SupportUpdate update;
  for (VarIndex j : entering) {
    if (j < 0 || j >= total) {
      throw IndexError(fmt::format("entering index {} outside 1..{}", j + 1, total));
    }
    if (!support.Contains(j)) update.entered.push_back(j);
  }
  std::sort(update.entered.begin(), update.entered.end());
  update.entered.erase(std::unique(update.entered.begin(), update.entered.end()),
                       update.entered.end());

  std::vector<char> drop(index.size(), 0);
  if (policy.near_convergence && policy.max_removed > 0) {
    std::vector<std::size_t> candidates;
    for (std::size_t t = 0; t < index.size(); ++t) {
      if (p[t] < policy.threshold && (!policy.require_p_below_s || p[t] < s[t])) {
        candidates.push_back(t);
      }
    }
    if (!candidates.empty()) {
      // Everything that stays (plus the entering edges) forms the base
      // graph; candidates are then added largest-p first and kept only when
      // they join two components.
      std::vector<char> is_candidate(index.size(), 0);
      for (std::size_t t : candidates) is_candidate[t] = 1;
      detail::DisjointSets sets(m + n);
      for (std::size_t t = 0; t < index.size(); ++t) {
        if (!is_candidate[t]) {
          sets.Union(static_cast<int>(index[t] % m), m + static_cast<int>(index[t] / m));
        }
      }
      for (VarIndex j : update.entered) {
        sets.Union(static_cast<int>(j % m), m + static_cast<int>(j / m));
      }
      std::sort(candidates.begin(), candidates.end(), [&](std::size_t x, std::size_t y) {
        if (p[x] != p[y]) return p[x] > p[y];
        return index[x] < index[y];
      });
      std::vector<std::size_t> removable;
      for (std::size_t t : candidates) {
        if (sets.Union(static_cast<int>(index[t] % m), m + static_cast<int>(index[t] / m))) {
          update.vetoed.push_back(index[t]);
        } else {
          removable.push_back(t);
        }
      }
      // Smallest p leaves first.
      std::reverse(removable.begin(), removable.end());
      if (removable.size() > policy.max_removed) removable.resize(policy.max_removed);
      for (std::size_t t : removable) drop[t] = 1;
      if (!update.vetoed.empty()) {
        spdlog::debug("support update: {} removals vetoed to keep the support connected",
                      update.vetoed.size());
      }
    }
  }

  const double warm = std::sqrt(std::max(mu, 0.0));
  std::vector<VarIndex> next_index;
  std::vector<double> next_p;
  std::vector<double> next_s;
  const std::size_t capacity = index.size() + update.entered.size();
  next_index.reserve(capacity);
  next_p.reserve(capacity);
  next_s.reserve(capacity);
  std::size_t e = 0;
  for (std::size_t t = 0; t <= index.size(); ++t) {
    const VarIndex bound = t < index.size() ? index[t] : total;
    while (e < update.entered.size() && update.entered[e] < bound) {
      next_index.push_back(update.entered[e++]);
      next_p.push_back(warm);
      next_s.push_back(warm);
    }
    if (t == index.size()) break;
    if (drop[t]) {
      update.removed.push_back(index[t]);
      continue;
    }
    next_index.push_back(index[t]);
    next_p.push_back(p[t]);
    next_s.push_back(s[t]);
  }
  support.Assign(std::move(next_index));
  p = std::move(next_p);
  s = std::move(next_s);
  return update;
}

}  // namespace otkit
