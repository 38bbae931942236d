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

#include "cascade/oracle.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "cascade/error.h"

namespace cascade {

Assignment exact_oracle(const AllocationProblem& problem, double cost_unit) {
  problem.validate();
  if (!(cost_unit > 0.0)) throw ConfigError("oracle: cost unit must be > 0");
  const int n = problem.num_requests;
  const int num_chains = problem.num_chains();
  if (num_chains > std::numeric_limits<int16_t>::max()) {
    throw OracleInfeasibleError("oracle: too many chains");
  }

  const double max_cost =
      *std::max_element(problem.costs.begin(), problem.costs.end());
  if (static_cast<double>(n) * max_cost / cost_unit > kOracleMaxUnits) {
    throw OracleInfeasibleError(
        "oracle: DP table too large; shrink the instance or coarsen the unit");
  }

  std::vector<int64_t> units(num_chains);
  for (int j = 0; j < num_chains; ++j) {
    units[j] = std::llround(problem.costs[j] / cost_unit);
  }
  const int64_t min_units = *std::min_element(units.begin(), units.end());
  const auto budget_units =
      static_cast<int64_t>(std::floor(problem.budget / cost_unit + 1e-9));

  // Everyone pays at least min_units; the DP only tracks the extra.
  const int64_t slack = budget_units - static_cast<int64_t>(n) * min_units;
  if (slack < 0) {
    throw OracleInfeasibleError(
        "oracle: budget cannot cover the cheapest chain for every request");
  }
  int64_t max_extra = 0;
  for (int64_t u : units) max_extra = std::max(max_extra, u - min_units);
  const int64_t cap = std::min(slack, static_cast<int64_t>(n) * max_extra);
  const size_t width = static_cast<size_t>(cap) + 1;

  constexpr double kNone = -std::numeric_limits<double>::infinity();
  std::vector<double> best(width, kNone);
  std::vector<double> next(width);
  std::vector<int16_t> choice(static_cast<size_t>(n) * width, -1);
  best[0] = 0.0;

  // best[b]: max revenue of the first i requests using exactly b extra units.
  for (int i = 0; i < n; ++i) {
    std::fill(next.begin(), next.end(), kNone);
    int16_t* pick = choice.data() + static_cast<size_t>(i) * width;
    const std::span<const double> row = problem.row(i);
    const int64_t reach = std::min<int64_t>(cap, static_cast<int64_t>(i) * max_extra);
    for (int64_t b = 0; b <= reach; ++b) {
      const double base = best[b];
      if (base == kNone) continue;
      for (int j = 0; j < num_chains; ++j) {
        const int64_t nb = b + units[j] - min_units;
        if (nb > cap) continue;
        const double value = base + row[j];
        if (value > next[nb]) {
          next[nb] = value;
          pick[nb] = static_cast<int16_t>(j);
        }
      }
    }
    best.swap(next);
  }

  int64_t end = -1;
  double top = kNone;
  for (int64_t b = 0; b <= cap; ++b) {
    if (best[b] > top) {
      top = best[b];
      end = b;
    }
  }
  if (end < 0) throw OracleInfeasibleError("oracle: no feasible assignment");

  Assignment out;
  out.chain.assign(n, 0);
  int64_t b = end;
  for (int i = n - 1; i >= 0; --i) {
    const int j = choice[static_cast<size_t>(i) * width + b];
    out.chain[i] = j;
    b -= units[j] - min_units;
  }
  for (int i = 0; i < n; ++i) {
    out.total_revenue += problem.row(i)[out.chain[i]];
    out.total_cost += problem.costs[out.chain[i]];
  }
  return out;
}

}  // namespace cascade
