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

#ifndef CASCADE_ORACLE_H_
#define CASCADE_ORACLE_H_

#include "cascade/allocator.h"

namespace cascade {

// Largest DP table (in cost units summed over requests) the oracle accepts.
inline constexpr double kOracleMaxUnits = 1e7;

// Exact multiple-choice knapsack optimum by dynamic programming over the
// budget, with costs rounded to multiples of `cost_unit`. The result is
// optimal for the discretized problem; it is exact for the original problem
// when every cost and the budget are multiples of the unit.
//
// Throws OracleInfeasibleError when the table would exceed kOracleMaxUnits
// or when even the cheapest chain for everyone exceeds the budget.
Assignment exact_oracle(const AllocationProblem& problem, double cost_unit);

}  // namespace cascade

#endif  // CASCADE_ORACLE_H_
