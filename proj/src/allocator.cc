// Copyright 2026 The cascade-alloc Authors
//
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

#include "cascade/allocator.h"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <string>

#include "cascade/error.h"

namespace cascade {

void AllocationProblem::validate() const {
  if (costs.empty()) throw ConfigError("allocation: no chains");
  if (num_requests < 0 ||
      rewards.size() != static_cast<size_t>(num_requests) * costs.size()) {
    throw ConfigError("allocation: reward matrix is not requests x chains");
  }
  for (double c : costs) {
    if (!(c > 0.0) || !std::isfinite(c)) {
      throw ConfigError("allocation: chain costs must be positive");
    }
  }
  for (double r : rewards) {
    if (!std::isfinite(r)) throw ConfigError("allocation: non-finite reward");
  }
  if (!(budget > 0.0)) throw ConfigError("allocation: budget must be positive");
}

int decide(std::span<const double> rewards, std::span<const double> costs,
           double lambda) {
  assert(rewards.size() == costs.size() && !rewards.empty());
  int best = 0;
  double best_score = rewards[0] - lambda * costs[0];
  for (size_t j = 1; j < rewards.size(); ++j) {
    const double score = rewards[j] - lambda * costs[j];
    if (score > best_score ||
        (score == best_score && costs[j] < costs[best])) {
      best = static_cast<int>(j);
      best_score = score;
    }
  }
  return best;
}

Assignment assign_all(const AllocationProblem& problem, double lambda) {
  Assignment out;
  out.chain.resize(problem.num_requests);
  for (int i = 0; i < problem.num_requests; ++i) {
    const std::span<const double> row = problem.row(i);
    const int j = decide(row, problem.costs, lambda);
    out.chain[i] = j;
    out.total_revenue += row[j];
    out.total_cost += problem.costs[j];
  }
  return out;
}

double auto_step_size(const AllocationProblem& problem, double eta0) {
  const auto [lo, hi] =
      std::minmax_element(problem.costs.begin(), problem.costs.end());
  const double cost_spread = *hi - *lo;
  double reward_spread = 0.0;
  for (int i = 0; i < problem.num_requests; ++i) {
    const auto [rlo, rhi] =
        std::minmax_element(problem.row(i).begin(), problem.row(i).end());
    reward_spread += *rhi - *rlo;
  }
  if (problem.num_requests > 0) reward_spread /= problem.num_requests;

  double lambda_ref;
  if (cost_spread > 0.0 && reward_spread > 0.0) {
    lambda_ref = reward_spread / cost_spread;
  } else {
    // Prices do not matter when no trade-off exists; any finite scale works.
    lambda_ref = 1.0 / *hi;
  }
  const double floor_budget =
      std::max(problem.budget, problem.num_requests * *lo);
  return eta0 * lambda_ref / floor_budget;
}

DualState dual_descent(const AllocationProblem& problem, double lambda_init,
                       int iterations, double eta) {
  if (iterations < 1) throw ConfigError("dual descent: iterations must be >= 1");
  if (!(eta > 0.0)) throw ConfigError("dual descent: step size must be > 0");
  if (!(lambda_init >= 0.0)) {
    throw ConfigError("dual descent: initial dual price must be >= 0");
  }
  DualState state;
  state.lambda = lambda_init;
  for (int l = 0; l < iterations; ++l) {
    const double consumed = assign_all(problem, state.lambda).total_cost;
    const double gradient = problem.budget - consumed;
    state.lambda = std::max(0.0, state.lambda - eta * gradient);
    ++state.iterations;
  }
  state.last_gradient =
      problem.budget - assign_all(problem, state.lambda).total_cost;
  return state;
}

}  // namespace cascade
