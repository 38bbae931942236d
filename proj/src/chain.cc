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
#include <set>

#include "cascade/error.h"

namespace cascade {

namespace {

std::string stage_name(const StageConfig& s) {
  std::string name = "stage " + std::to_string(s.stage_index);
  if (s.models.size() == 1) name += " (" + s.models.front().id + ")";
  return name;
}

}  // namespace

CascadeConfig::CascadeConfig(std::vector<StageConfig> stages)
    : stages_(std::move(stages)) {
  if (stages_.empty()) throw ConfigError("stages: at least one stage required");
  std::sort(stages_.begin(), stages_.end(),
            [](const StageConfig& a, const StageConfig& b) {
              return a.stage_index < b.stage_index;
            });

  std::set<std::string> ids;
  for (size_t pos = 0; pos < stages_.size(); ++pos) {
    StageConfig& s = stages_[pos];
    if (s.stage_index != static_cast<int>(pos) + 1) {
      throw ConfigError("stages: stage indices must be 1..K without gaps, got " +
                        std::to_string(s.stage_index) + " at position " +
                        std::to_string(pos + 1));
    }
    if (s.models.empty()) {
      throw ConfigError(stage_name(s) + ": empty model pool");
    }
    if (s.scales.empty()) {
      throw ConfigError(stage_name(s) + ": empty scale set");
    }
    if (s.fixed && (s.models.size() != 1 || s.scales.size() != 1)) {
      throw ConfigError(stage_name(s) +
                        ": a fixed stage needs exactly one model and one scale");
    }
    for (size_t i = 0; i < s.scales.size(); ++i) {
      if (s.scales[i] <= 0) {
        throw ConfigError(stage_name(s) + ": item scales must be positive");
      }
      if (i > 0 && s.scales[i] <= s.scales[i - 1]) {
        throw ConfigError(stage_name(s) +
                          ": scale set must be strictly increasing");
      }
    }
    for (ModelInstance& m : s.models) {
      if (!(m.flops_per_item > 0.0)) {
        throw ConfigError(stage_name(s) + ": model '" + m.id +
                          "' needs flops_per_item > 0");
      }
      if (!ids.insert(m.id).second) {
        throw ConfigError("stages: duplicate model id '" + m.id + "'");
      }
      m.stage_index = s.stage_index;
    }
    std::sort(s.models.begin(), s.models.end(),
              [](const ModelInstance& a, const ModelInstance& b) {
                return a.id < b.id;
              });
    if (pos > 0 && s.scales.front() > stages_[pos - 1].scales.back()) {
      throw ConfigError(stage_name(s) +
                        ": smallest scale exceeds every scale of the previous "
                        "stage; no chain can satisfy the cascade order");
    }
    if (!s.fixed) action_stages_.push_back(static_cast<int>(pos));
  }
  if (action_stages_.empty()) {
    throw ConfigError("stages: at least one non-fixed stage required");
  }
}

double CascadeConfig::fixed_cost() const {
  double total = 0.0;
  for (const StageConfig& s : stages_) {
    if (s.fixed) {
      total += s.models.front().flops_per_item *
               static_cast<double>(s.scales.front());
    }
  }
  return total;
}

double CascadeConfig::stage_cost(int k, const StageAction& action) const {
  const StageConfig& s = action_stage(k);
  return s.models.at(action.model).flops_per_item *
         static_cast<double>(action.item_scale);
}

int CascadeConfig::find_model(int k, const std::string& id) const {
  const StageConfig& s = action_stage(k);
  for (size_t m = 0; m < s.models.size(); ++m) {
    if (s.models[m].id == id) return static_cast<int>(m);
  }
  return -1;
}

std::vector<ActionChain> generate_chains(const CascadeConfig& config) {
  const int num_stages = config.num_action_stages();
  std::vector<ActionChain> out;

  // Odometer over (model, scale) per non-fixed stage; stage 0 is the most
  // significant digit so the output is lexicographic.
  std::vector<size_t> digit(num_stages, 0);
  std::vector<size_t> radix(num_stages);
  for (int k = 0; k < num_stages; ++k) {
    const StageConfig& s = config.action_stage(k);
    radix[k] = s.models.size() * s.scales.size();
  }

  while (true) {
    ActionChain chain;
    chain.actions.reserve(num_stages);
    for (int k = 0; k < num_stages; ++k) {
      const StageConfig& s = config.action_stage(k);
      StageAction a;
      a.model = static_cast<int>(digit[k] / s.scales.size());
      a.item_scale = s.scales[digit[k] % s.scales.size()];
      chain.actions.push_back(a);
    }
    if (is_valid_chain(chain, config)) {
      chain.index = static_cast<int>(out.size());
      chain.cost_flops = chain_cost(chain, config);
      out.push_back(std::move(chain));
    }

    int k = num_stages - 1;
    while (k >= 0 && ++digit[k] == radix[k]) {
      digit[k] = 0;
      --k;
    }
    if (k < 0) break;
  }
  return out;
}

double chain_cost(const ActionChain& chain, const CascadeConfig& config) {
  if (static_cast<int>(chain.actions.size()) != config.num_action_stages()) {
    throw ConfigError("chain has " + std::to_string(chain.actions.size()) +
                      " actions, cascade has " +
                      std::to_string(config.num_action_stages()) +
                      " non-fixed stages");
  }
  // Summed in cascade order so the result does not depend on how the caller
  // groups fixed and non-fixed stages.
  double total = 0.0;
  int k = 0;
  for (const StageConfig& s : config.stages()) {
    if (s.fixed) {
      total += s.models.front().flops_per_item *
               static_cast<double>(s.scales.front());
    } else {
      const StageAction& a = chain.actions[k];
      if (a.model < 0 || a.model >= static_cast<int>(s.models.size())) {
        throw ConfigError("chain references model " + std::to_string(a.model) +
                          " outside the pool of " + stage_name(s));
      }
      total += config.stage_cost(k, a);
      ++k;
    }
  }
  return total;
}

bool is_valid_chain(const ActionChain& chain, const CascadeConfig& config) {
  if (static_cast<int>(chain.actions.size()) != config.num_action_stages()) {
    return false;
  }
  int64_t prev_scale = -1;
  int k = 0;
  for (const StageConfig& s : config.stages()) {
    int64_t scale;
    if (s.fixed) {
      scale = s.scales.front();
    } else {
      const StageAction& a = chain.actions[k++];
      if (a.model < 0 || a.model >= static_cast<int>(s.models.size())) {
        return false;
      }
      if (!std::binary_search(s.scales.begin(), s.scales.end(), a.item_scale)) {
        return false;
      }
      scale = a.item_scale;
    }
    if (prev_scale >= 0 && scale > prev_scale) return false;
    prev_scale = scale;
  }
  return true;
}

std::vector<double> chain_costs(std::span<const ActionChain> chains) {
  std::vector<double> costs;
  costs.reserve(chains.size());
  for (const ActionChain& c : chains) costs.push_back(c.cost_flops);
  return costs;
}

std::string describe_chain(const ActionChain& chain,
                           const CascadeConfig& config) {
  std::string out;
  for (int k = 0; k < static_cast<int>(chain.actions.size()); ++k) {
    if (k > 0) out += '>';
    const StageAction& a = chain.actions[k];
    out += config.action_stage(k).models.at(a.model).id;
    out += '@';
    out += std::to_string(a.item_scale);
  }
  return out;
}

}  // namespace cascade
