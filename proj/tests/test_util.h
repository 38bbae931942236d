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

// Fixtures shared by the unit tests.

#ifndef CASCADE_TESTS_TEST_UTIL_H_
#define CASCADE_TESTS_TEST_UTIL_H_

#include <string>
#include <vector>

#include "cascade/chain.h"

namespace cascade::testing {

// The four-stage cascade used throughout: a fixed DSSM retrieval stage,
// YDNN pre-ranking over 800..1500 and DIN/DIEN ranking over 60..200.
inline std::vector<StageConfig> reference_stages() {
  StageConfig retrieval{1, true, {{"DSSM", 0, 13e3, 0.6}}, {10000}};
  StageConfig pre{2, false, {{"YDNN", 0, 123e3, 0.7}}, {}};
  for (int n = 800; n <= 1500; n += 100) pre.scales.push_back(n);
  StageConfig rank{3, false,
                   {{"DIN", 0, 7020e3, 0.75}, {"DIEN", 0, 7098e3, 0.76}},
                   {}};
  for (int n = 60; n <= 200; n += 20) rank.scales.push_back(n);
  return {retrieval, pre, rank};
}

inline CascadeConfig reference_cascade() { return CascadeConfig(reference_stages()); }

// The chain with the given per-stage (model id, scale) picks.
inline ActionChain make_chain(const CascadeConfig& cascade,
                              const std::vector<std::string>& models,
                              const std::vector<int64_t>& scales) {
  ActionChain chain;
  for (size_t k = 0; k < models.size(); ++k) {
    chain.actions.push_back(
        {cascade.find_model(static_cast<int>(k), models[k]), scales[k]});
  }
  chain.cost_flops = chain_cost(chain, cascade);
  return chain;
}

}  // namespace cascade::testing

#endif  // CASCADE_TESTS_TEST_UTIL_H_
