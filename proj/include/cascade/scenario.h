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

// Scenario files: one JSON document that fully determines an experiment.
//
//   {
//     "seed": 7, "output": "out/default", "top_e": 20,
//     "stages": [{"index": 1, "fixed": true, "scales": [10000],
//                 "models": [{"id": "DSSM", "flops_per_item": 13000}]}, ...],
//     "workload": {"periods": 10, "arrivals": 1000 | [..], ...,
//                  "population": {...}},
//     "reward": {...}, "train": {...},
//     "allocator": {"budget": 1.5e12, "iterations": 50, "eta0": 0.5,
//                   "lambda_init": 0 | "auto", "ticks_per_period": 1},
//     "baselines": {"equal_chain": "YDNN@1100>DIEN@120",
//                   "cras_models": ["YDNN", "DIEN"]},
//     "sweep": {"equal_chains": ["...", ...]},
//     "hardware": {"pue": 1.67, "carbon_intensity_g_per_kwh": 615,
//                  "devices": [{"name", "rated_power_watts",
//                               "throughput_flops_per_second", "share",
//                               "follows"}]}
//   }
//
// Only "stages" is required. Unknown keys are rejected, and every schema
// error names the offending field path.

#ifndef CASCADE_SCENARIO_H_
#define CASCADE_SCENARIO_H_

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "cascade/chain.h"
#include "cascade/pfec.h"
#include "cascade/reward_model.h"
#include "cascade/simulator.h"
#include "cascade/trainer.h"

namespace cascade {

struct WorkloadConfig {
  int periods = 10;
  std::vector<int> arrivals = {1000};  // one value, or one per period
  int population_size = 2000;          // users requests are drawn from
  int train_population_size = 1500;    // disjoint users for training data
  int samples_per_user = 8;
  double label_noise = 0.3;
  int eval_samples_per_user = 8;       // held-out calibration labels
  PopulationConfig population;
};

struct AllocatorConfig {
  double budget = 0.0;  // FLOPs per period
  int iterations = 50;
  double eta0 = 0.5;
  bool lambda_auto = false;  // warm-up solve on a training-user batch
  double lambda_init = 0.0;
  int warmup_iterations = 200;
  int ticks_per_period = 1;
  int threads = 1;
};

struct BaselineConfig {
  std::string equal_chain;               // chain description; "" = median
  std::vector<std::string> cras_models;  // per non-fixed stage; "" = first
};

struct SweepConfig {
  // Each point's per-period budget is mean arrivals * cost of the chain.
  std::vector<std::string> equal_chains;
};

struct Scenario {
  uint64_t seed = 1;
  std::string output = "out";
  double top_e = 20.0;
  std::vector<StageConfig> stages;
  WorkloadConfig workload;
  RewardConfig reward;
  TrainConfig train;
  AllocatorConfig allocator;
  BaselineConfig baselines;
  SweepConfig sweep;
  HardwareProfile hardware = HardwareProfile::default_profile();
};

// Throws ConfigError naming the field path on any schema violation.
Scenario parse_scenario(const nlohmann::json& document);

// Reads a file, applies "a.b.c=value" overrides in order, then parses.
// Values are parsed as JSON when possible and taken as strings otherwise.
Scenario load_scenario(const std::string& path,
                       const std::vector<std::string>& overrides = {});

// Sets `dotted_path` (object keys, or decimal indices into arrays) to
// `raw_value`, creating intermediate objects. Throws ConfigError on a path
// that walks through a non-container.
void apply_override(nlohmann::json& document, const std::string& dotted_path,
                    const std::string& raw_value);

// Reads a JSON file. Throws IoError / ConfigError.
nlohmann::json read_json_file(const std::string& path);

}  // namespace cascade

#endif  // CASCADE_SCENARIO_H_
