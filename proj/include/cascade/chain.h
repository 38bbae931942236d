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

// Cascade stages, model pools and action chains.
//
// A cascade is an ordered list of stages. Every stage scores `item_scale`
// candidates with one model from its pool. Fixed stages (e.g. recall) have a
// single model and a single scale and only contribute a constant cost. The
// non-fixed stages span the action space: an ActionChain picks one
// (model, item_scale) pair per non-fixed stage, in stage order.

#ifndef CASCADE_CHAIN_H_
#define CASCADE_CHAIN_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace cascade {

struct ModelInstance {
  std::string id;
  int stage_index = 0;
  double flops_per_item = 0.0;  // FLOPs to score one candidate item
  double quality = 0.0;         // AUC-like; used by the simulator only
};

struct StageConfig {
  int stage_index = 0;  // 1-based position in the cascade
  bool fixed = false;
  std::vector<ModelInstance> models;  // the stage's model pool
  std::vector<int64_t> scales;        // strictly increasing item scales
};

// One non-fixed stage's choice. `model` indexes the stage's model pool after
// canonical ordering (see CascadeConfig).
struct StageAction {
  int model = 0;
  int64_t item_scale = 0;

  friend bool operator==(const StageAction&, const StageAction&) = default;
};

struct ActionChain {
  std::vector<StageAction> actions;  // one per non-fixed stage
  double cost_flops = 0.0;
  int index = 0;  // 0-based, dense within a generated set
};

// Validated cascade description. Construction sorts stages by index and each
// pool by model id, so that model indices in StageAction are canonical.
class CascadeConfig {
 public:
  CascadeConfig() = default;
  // Throws ConfigError on any structural violation, naming the stage.
  explicit CascadeConfig(std::vector<StageConfig> stages);

  const std::vector<StageConfig>& stages() const { return stages_; }
  // Positions into stages() of the non-fixed stages, in cascade order.
  const std::vector<int>& action_stages() const { return action_stages_; }
  int num_action_stages() const {
    return static_cast<int>(action_stages_.size());
  }
  const StageConfig& action_stage(int k) const {
    return stages_[action_stages_[k]];
  }

  // Cost of all fixed stages together.
  double fixed_cost() const;
  // Cost of one non-fixed stage's action.
  double stage_cost(int k, const StageAction& action) const;

  // Finds a model by id within non-fixed stage k; -1 if absent.
  int find_model(int k, const std::string& id) const;

 private:
  std::vector<StageConfig> stages_;
  std::vector<int> action_stages_;
};

// All chains in the cartesian product of (model x scale) over non-fixed
// stages, minus those where a stage scores more items than the previous
// stage (fixed or not) hands it. Order is lexicographic by stage, then model
// id, then scale.
std::vector<ActionChain> generate_chains(const CascadeConfig& config);

// Sum over every stage, fixed ones included, of flops_per_item * item_scale.
double chain_cost(const ActionChain& chain, const CascadeConfig& config);

// True when every action is in range and obeys the cascade order.
bool is_valid_chain(const ActionChain& chain, const CascadeConfig& config);

// Costs of a chain list, in order.
std::vector<double> chain_costs(std::span<const ActionChain> chains);

// Human-readable form, e.g. "YDNN@1000>DIN@100".
std::string describe_chain(const ActionChain& chain,
                           const CascadeConfig& config);

}  // namespace cascade

#endif  // CASCADE_CHAIN_H_
