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

#include "cascade/baselines.h"

#include <gtest/gtest.h>

#include "cascade/error.h"
#include "test_util.h"

namespace cascade {
namespace {

using testing::make_chain;
using testing::reference_cascade;

TEST(Equal, ConsumptionIsArrivalsTimesCost) {
  const std::vector<double> costs = {9.55e8, 1e9};
  const std::vector<int> arrivals = {100};
  const Timeline t = run_baseline_equal(arrivals, 0, costs, 1e12);
  ASSERT_EQ(t.periods.size(), 1u);
  EXPECT_EQ(t.periods[0].consumed_flops, 9.55e10);
  EXPECT_EQ(t.decisions[0], std::vector<int>(100, 0));
  EXPECT_TRUE(t.log.empty());
}

TEST(Equal, ZeroArrivalsCostNothing) {
  const std::vector<double> costs = {9.55e8};
  const std::vector<int> arrivals = {0, 0};
  const Timeline t = run_baseline_equal(arrivals, 0, costs, 1e10);
  for (const PeriodRecord& r : t.periods) {
    EXPECT_EQ(r.consumed_flops, 0.0);
    EXPECT_EQ(r.requests, 0);
  }
}

TEST(Equal, IgnoresTheBudgetAndLogsOvershoot) {
  const std::vector<double> costs = {1e9};
  const std::vector<int> arrivals = {100, 300, 100};
  const Timeline t = run_baseline_equal(arrivals, 0, costs, 1e11);
  EXPECT_EQ(t.periods[1].consumed_flops, 3e11);
  ASSERT_EQ(t.log.size(), 1u);
  EXPECT_NE(t.log[0].find("period 2"), std::string::npos);
  EXPECT_THROW(run_baseline_equal(arrivals, 3, costs, 1e11), ConfigError);
}

TEST(Cras, BudgetSharesFollowMedianCosts) {
  const std::vector<double> costs = {1.23e8, 7.02e8};
  const std::vector<double> shares = cras_budget_shares(costs);
  EXPECT_NEAR(shares[0], 0.14909090909090908, 1e-15);
  EXPECT_NEAR(shares[1], 0.850909090909091, 1e-15);
  EXPECT_THROW(cras_budget_shares(std::vector<double>{0.0}), ConfigError);
}

TEST(Cras, PlanPinsTheOtherStagesAtTheirLowerMedian) {
  const CascadeConfig cascade = reference_cascade();
  EXPECT_EQ(median_scale(cascade.action_stage(0)), 1100);
  EXPECT_EQ(median_scale(cascade.action_stage(1)), 120);
  const std::vector<int> models = {0, cascade.find_model(1, "DIN")};
  const CrasPlan plan = make_cras_plan(cascade, models);
  ASSERT_EQ(plan.stages.size(), 2u);
  EXPECT_EQ(plan.fixed_cost, 13e3 * 1e4);
  EXPECT_EQ(plan.stages[0].options.size(), 8u);
  EXPECT_EQ(plan.stages[0].median_cost, 123e3 * 1100);
  EXPECT_EQ(plan.stages[1].median_cost, 7020e3 * 120);
  EXPECT_NEAR(plan.stages[0].share + plan.stages[1].share, 1.0, 1e-15);
  EXPECT_EQ(plan.stages[1].option_costs.front(), 7020e3 * 60);
  EXPECT_THROW(cras_stage_budget(plan, 0, 1e6, 100), ConfigError);
  EXPECT_DOUBLE_EQ(cras_stage_budget(plan, 1, 1e12, 100),
                   plan.stages[1].share * (1e12 - 100 * 1.3e8));
}

TEST(Cras, ComposesStagePicksIntoAChain) {
  const CascadeConfig cascade = reference_cascade();
  const std::vector<ActionChain> chains = generate_chains(cascade);
  const std::vector<int> models = {0, cascade.find_model(1, "DIEN")};
  const CrasPlan plan = make_cras_plan(cascade, models);
  const std::vector<int> picks = {2, 5};
  const int j = compose_chain(plan, cascade, chains, picks);
  EXPECT_EQ(describe_chain(chains[j], cascade), "YDNN@1000>DIEN@160");
}

TEST(Cras, LowersPicksThatBreakTheCascadeOrder) {
  // Stage 1 options (stage 2 pinned at 15): 16, 20, 25.
  // Stage 2 options (stage 1 pinned at 20): 5, 15, 18.
  const CascadeConfig cascade({
      StageConfig{1, false, {{"A", 1, 1.0, 0.5}}, {16, 20, 25}},
      StageConfig{2, false, {{"B", 2, 5.0, 0.5}}, {5, 15, 18}},
  });
  const std::vector<ActionChain> chains = generate_chains(cascade);
  const std::vector<int> models = {0, 0};
  const CrasPlan plan = make_cras_plan(cascade, models);
  ASSERT_EQ(plan.stages[0].options.size(), 3u);
  ASSERT_EQ(plan.stages[1].options.size(), 3u);
  const std::vector<int> picks = {0, 2};  // A@16 with B@18
  const int j = compose_chain(plan, cascade, chains, picks);
  EXPECT_EQ(describe_chain(chains[j], cascade), "A@16>B@15");
  const std::vector<int> out_of_range = {0, 3};
  EXPECT_THROW(compose_chain(plan, cascade, chains, out_of_range),
               ConfigError);
}

}  // namespace
}  // namespace cascade
