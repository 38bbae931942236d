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

// Budgeted chain assignment.
//
// Every request i picks exactly one chain j; total cost sum c_j must stay
// within the budget C while sum R_ij is maximized. The Lagrangian relaxation
// prices computation at lambda >= 0 and decomposes into independent
// per-request decisions argmax_j R_ij - lambda c_j; lambda itself is found by
// projected gradient descent on the dual, whose gradient is C - consumed.

#ifndef CASCADE_ALLOCATOR_H_
#define CASCADE_ALLOCATOR_H_

#include <cstdint>
#include <span>
#include <vector>

namespace cascade {

struct AllocationProblem {
  int num_requests = 0;
  std::vector<double> rewards;  // row-major [num_requests][num_chains]
  std::vector<double> costs;    // [num_chains]
  double budget = 0.0;

  int num_chains() const { return static_cast<int>(costs.size()); }
  std::span<const double> row(int i) const {
    return std::span<const double>(rewards).subspan(
        static_cast<size_t>(i) * costs.size(), costs.size());
  }
  // Throws ConfigError when sizes disagree, a cost is not positive, a reward
  // is not finite or the budget is not positive.
  void validate() const;
};

struct DualState {
  double lambda = 0.0;
  int64_t period = 0;
  double last_gradient = 0.0;  // C - consumed at the returned lambda
  int iterations = 0;
};

struct Assignment {
  std::vector<int> chain;  // chosen chain per request
  double total_revenue = 0.0;
  double total_cost = 0.0;
};

// argmax_j R_j - lambda c_j. Ties go to the cheaper chain, then to the lower
// index. Requires equal, non-zero lengths.
int decide(std::span<const double> rewards, std::span<const double> costs,
           double lambda);

// Decision rule applied to every request of the problem.
Assignment assign_all(const AllocationProblem& problem, double lambda);

// Default step size for dual_descent: eta0 * lambda_ref / C, where lambda_ref
// is the mean per-request reward spread divided by the cost spread. Keeps
// the update dimensionless in both reward and FLOP units.
double auto_step_size(const AllocationProblem& problem, double eta0);

// Runs `iterations` rounds of: decide for all requests at lambda, gradient
// C - consumed, lambda <- max(0, lambda - eta * gradient). The returned
// state carries the final lambda and the gradient evaluated there.
DualState dual_descent(const AllocationProblem& problem, double lambda_init,
                       int iterations, double eta);

}  // namespace cascade

#endif  // CASCADE_ALLOCATOR_H_
