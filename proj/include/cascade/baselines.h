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

// Comparison strategies.
//
// EQUAL serves every request with one fixed chain and ignores the budget.
// CRAS treats stages independently: each non-fixed stage gets a single-stage
// reward model (trained with the other stages pinned at their median action),
// a share of the budget proportional to its median-chain cost, and its own
// dual-descent allocator over that stage's item scales. The per-stage picks
// are then composed into one chain per request.

#ifndef CASCADE_BASELINES_H_
#define CASCADE_BASELINES_H_

#include <span>
#include <vector>

#include "cascade/chain.h"
#include "cascade/period_runner.h"

namespace cascade {

// Every request of every period gets `fixed_chain`. Consumption is
// arrivals * cost, whatever the budget; the budget is only recorded.
Timeline run_baseline_equal(std::span<const int> arrivals, int fixed_chain,
                            std::span<const double> costs,
                            double budget_per_period);

// Budget share of each stage, proportional to its cost under the median
// chain.
std::vector<double> cras_budget_shares(std::span<const double> stage_costs);

// Lower median of a sorted scale set.
int64_t median_scale(const StageConfig& stage);

struct CrasStagePlan {
  int stage = 0;            // non-fixed stage index in the full cascade
  int model = 0;            // the single model CRAS uses at this stage
  CascadeConfig cascade;    // this stage free, the others pinned
  std::vector<ActionChain> options;  // one chain per item scale
  std::vector<double> option_costs;  // stage cost only
  double median_cost = 0.0;
  double share = 0.0;
};

struct CrasPlan {
  std::vector<CrasStagePlan> stages;
  double fixed_cost = 0.0;  // per request, all fixed stages
};

// `models[k]` is the model CRAS uses at non-fixed stage k.
CrasPlan make_cras_plan(const CascadeConfig& cascade,
                        std::span<const int> models);

// Composes per-stage scale picks into an index of `chains`. A stage whose
// pick exceeds the previous stage's scale is lowered to the largest scale
// that keeps the cascade order.
int compose_chain(const CrasPlan& plan, const CascadeConfig& cascade,
                  std::span<const ActionChain> chains,
                  std::span<const int> option_per_stage);

// Stage k's per-period budget: share_k * (budget - requests * fixed_cost).
// Throws ConfigError when the budget does not cover the fixed stages.
double cras_stage_budget(const CrasPlan& plan, int k, double budget,
                         double expected_requests_per_period);

// Runs every stage's allocator on its own batches (stage_batches[k][t]
// holds the stage-k rewards of period t) with its stage budget, and composes
// the decisions. `stage_lambda_init` gives each stage's starting price (empty
// means config.lambda_init for all). The returned timeline refers to indices
// of `chains`; consumption uses the composed chain costs.
Timeline run_baseline_cras(const CrasPlan& plan, const CascadeConfig& cascade,
                           std::span<const ActionChain> chains,
                           std::span<const std::vector<PeriodBatch>> stage_batches,
                           double expected_requests_per_period,
                           const RunConfig& config,
                           std::span<const double> stage_lambda_init = {});

}  // namespace cascade

#endif  // CASCADE_BASELINES_H_
