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

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "otkit/errors.hpp"
#include "otkit/linsolve.hpp"

namespace otkit {

std::string_view SolverModeName(SolverMode mode) {
  return mode == SolverMode::kIterative ? "iterative" : "direct";
}

SolverPhase::SolverPhase(Options options)
    : options_(options), drop_tolerance_(options.initial_drop_tolerance) {
  if (options_.window < 1) throw ParameterError("phase window must be >= 1");
  if (options_.drop_tolerance_floor <= 0.0 ||
      options_.initial_drop_tolerance < options_.drop_tolerance_floor) {
    throw ParameterError("drop tolerance schedule is inconsistent");
  }
}

bool SolverPhase::ShouldSwitch(std::size_t current_support_size) const {
  if (static_cast<int>(history_.size()) < options_.window) return false;
  const double past = static_cast<double>(history_.front());
  if (past <= 0.0) return false;
  const double drop = (past - static_cast<double>(current_support_size)) / past;
  return drop >= options_.switch_threshold;
}

bool SolverPhase::Observe(std::size_t support_size) {
  bool changed = false;
  if (mode_ == SolverMode::kIterative && ShouldSwitch(support_size)) {
    mode_ = SolverMode::kDirect;
    ++switches_;
    changed = true;
    spdlog::debug("switching to direct solves at support size {}", support_size);
  } else if (mode_ == SolverMode::kDirect && options_.allow_switch_back &&
             !history_.empty() && support_size > history_.back()) {
    mode_ = SolverMode::kIterative;
    ++switch_backs_;
    changed = true;
  }
  history_.push_back(support_size);
  while (static_cast<int>(history_.size()) > options_.window) history_.pop_front();
  return changed;
}

void SolverPhase::NoteCgIterations(int iterations) {
  if (iterations > options_.cg_iterations_trigger) {
    drop_tolerance_ = std::max(drop_tolerance_ / 10.0, options_.drop_tolerance_floor);
  }
}

}  // namespace otkit
