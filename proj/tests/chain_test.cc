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

#include "cascade/chain.h"

#include <algorithm>

#include <gtest/gtest.h>

#include "cascade/error.h"
#include "test_util.h"

namespace cascade {
namespace {

using testing::make_chain;
using testing::reference_cascade;
using testing::reference_stages;

TEST(GenerateChains, ReferenceRangesGive128Chains) {
  const std::vector<ActionChain> chains = generate_chains(reference_cascade());
  EXPECT_EQ(chains.size(), 128u);
  for (size_t j = 0; j < chains.size(); ++j) {
    EXPECT_EQ(chains[j].index, static_cast<int>(j));
  }
}

TEST(GenerateChains, SingletonProductGivesOneChain) {
  const CascadeConfig cascade(
      {StageConfig{1, false, {{"A", 0, 10.0, 0.5}}, {7}}});
  const std::vector<ActionChain> chains = generate_chains(cascade);
  ASSERT_EQ(chains.size(), 1u);
  EXPECT_DOUBLE_EQ(chains[0].cost_flops, 70.0);
}

TEST(GenerateChains, CascadeOrderFiltersLargerLaterScales) {
  // Stage 2 scale 20 exceeds stage 1's only scale 10, so both scale-20
  // variants are dropped; each model of {B, C} keeps its scale-5 chain.
  const CascadeConfig cascade(
      {StageConfig{1, false, {{"A", 0, 1.0, 0.5}}, {10}},
       StageConfig{2, false, {{"B", 0, 1.0, 0.5}, {"C", 0, 2.0, 0.5}},
                   {5, 20}}});
  const std::vector<ActionChain> chains = generate_chains(cascade);
  ASSERT_EQ(chains.size(), 2u);
  for (const ActionChain& c : chains) EXPECT_EQ(c.actions[1].item_scale, 5);
  EXPECT_NE(chains[0].actions[1].model, chains[1].actions[1].model);
}

TEST(GenerateChains, FilteringCountsMatchEnumeration) {
  std::vector<StageConfig> stages = reference_stages();
  stages[1].scales = {100, 300, 500, 700, 900, 1100, 1300, 1500};
  stages[2].scales = {25, 50, 75, 100, 125, 150, 175, 200};
  EXPECT_EQ(generate_chains(CascadeConfig(stages)).size(), 120u);
}

TEST(GenerateChains, DeterministicLexicographicOrder) {
  const std::vector<ActionChain> a = generate_chains(reference_cascade());
  const std::vector<ActionChain> b = generate_chains(reference_cascade());
  ASSERT_EQ(a.size(), b.size());
  for (size_t j = 0; j < a.size(); ++j) {
    EXPECT_EQ(a[j].actions, b[j].actions);
    EXPECT_EQ(a[j].cost_flops, b[j].cost_flops);
  }
  for (size_t j = 1; j < a.size(); ++j) {
    std::vector<std::pair<int, int64_t>> prev, cur;
    for (const StageAction& s : a[j - 1].actions) {
      prev.push_back({s.model, s.item_scale});
    }
    for (const StageAction& s : a[j].actions) {
      cur.push_back({s.model, s.item_scale});
    }
    EXPECT_LT(prev, cur);
  }
}

TEST(GenerateChains, EmptyPoolOrScaleSetNamesTheStage) {
  std::vector<StageConfig> stages = reference_stages();
  stages[2].models.clear();
  try {
    CascadeConfig c(stages);
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("stage 3"), std::string::npos);
  }
  stages = reference_stages();
  stages[1].scales.clear();
  try {
    CascadeConfig c(stages);
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("stage 2"), std::string::npos);
  }
}

TEST(GenerateChains, RejectsMalformedStages) {
  std::vector<StageConfig> stages = reference_stages();
  stages[1].scales = {900, 800};
  EXPECT_THROW(CascadeConfig{stages}, ConfigError);
  stages = reference_stages();
  stages[0].scales = {10000, 20000};
  EXPECT_THROW(CascadeConfig{stages}, ConfigError);
  stages = reference_stages();
  stages[2].scales = {2000, 3000};
  EXPECT_THROW(CascadeConfig{stages}, ConfigError);
  stages = reference_stages();
  stages[2].models[1].id = "YDNN";
  EXPECT_THROW(CascadeConfig{stages}, ConfigError);
}

TEST(ChainCost, ReferenceExample) {
  const CascadeConfig cascade = reference_cascade();
  const ActionChain din = make_chain(cascade, {"YDNN", "DIN"}, {1000, 100});
  EXPECT_DOUBLE_EQ(din.cost_flops, 955000000.0);
  const ActionChain dien = make_chain(cascade, {"YDNN", "DIEN"}, {1000, 100});
  EXPECT_DOUBLE_EQ(dien.cost_flops - din.cost_flops, 7800000.0);
}

TEST(ChainCost, StrictlyIncreasingInEveryScale) {
  const CascadeConfig cascade = reference_cascade();
  for (const ActionChain& a : generate_chains(cascade)) {
    for (const ActionChain& b : generate_chains(cascade)) {
      bool one_step = false;
      int differing = 0;
      for (size_t k = 0; k < a.actions.size(); ++k) {
        if (a.actions[k] == b.actions[k]) continue;
        ++differing;
        one_step = a.actions[k].model == b.actions[k].model &&
                   a.actions[k].item_scale < b.actions[k].item_scale;
      }
      if (differing == 1 && one_step) EXPECT_LT(a.cost_flops, b.cost_flops);
    }
  }
}

TEST(ChainCost, AdditiveOverStages) {
  const CascadeConfig cascade = reference_cascade();
  for (const ActionChain& c : generate_chains(cascade)) {
    double sum = cascade.fixed_cost();
    for (int k = 0; k < cascade.num_action_stages(); ++k) {
      sum += cascade.stage_cost(k, c.actions[k]);
    }
    EXPECT_DOUBLE_EQ(c.cost_flops, sum);
  }
}

TEST(ChainCost, PoolOrderDoesNotChangeCosts) {
  std::vector<StageConfig> stages = reference_stages();
  std::reverse(stages[2].models.begin(), stages[2].models.end());
  const CascadeConfig reordered(stages);
  const CascadeConfig original = reference_cascade();
  for (const std::string& id : {"DIN", "DIEN"}) {
    EXPECT_EQ(make_chain(reordered, {"YDNN", id}, {1200, 140}).cost_flops,
              make_chain(original, {"YDNN", id}, {1200, 140}).cost_flops);
  }
}

TEST(ChainValidity, DetectsOrderViolationsAndBadReferences) {
  const CascadeConfig cascade = reference_cascade();
  ActionChain ok = make_chain(cascade, {"YDNN", "DIN"}, {800, 200});
  EXPECT_TRUE(is_valid_chain(ok, cascade));
  ActionChain bad_scale = ok;
  bad_scale.actions[1].item_scale = 70;
  EXPECT_FALSE(is_valid_chain(bad_scale, cascade));
  ActionChain bad_model = ok;
  bad_model.actions[1].model = 5;
  EXPECT_FALSE(is_valid_chain(bad_model, cascade));
}

TEST(DescribeChain, UsesModelIdsAndScales) {
  const CascadeConfig cascade = reference_cascade();
  EXPECT_EQ(describe_chain(make_chain(cascade, {"YDNN", "DIEN"}, {1100, 120}),
                           cascade),
            "YDNN@1100>DIEN@120");
}

}  // namespace
}  // namespace cascade
