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

// End-to-end experiment plumbing shared by the CLI and the acceptance suite.
//
// A Bench is everything a scenario determines before any model is trained:
// the cascade and its chains, a training population, a disjoint evaluation
// population that requests are drawn from, and the request workload. Every
// random stream is derived from the scenario seed with a fixed salt, so the
// same scenario always yields the same bytes.

#ifndef CASCADE_PIPELINE_H_
#define CASCADE_PIPELINE_H_

#include <span>
#include <string>
#include <vector>

#include "cascade/baselines.h"
#include "cascade/calibration.h"
#include "cascade/pfec.h"
#include "cascade/reward_model.h"
#include "cascade/scenario.h"
#include "cascade/simulator.h"
#include "cascade/trainer.h"

namespace cascade {

enum class Stream : uint64_t {
  kTrainUsers = 1,
  kEvalUsers = 2,
  kTrainLabels = 3,
  kEvalLabels = 4,
  kWorkload = 5,
  kModelInit = 6,
  kShuffle = 7,
  kWarmup = 8,
};

uint64_t stream_seed(const Scenario& scenario, Stream stream);

struct Bench {
  Scenario scenario;
  CascadeConfig cascade;
  std::vector<ActionChain> chains;
  std::vector<double> costs;
  GroundTruth truth;
  std::vector<SyntheticUser> train_users;
  std::vector<SyntheticUser> eval_users;
  Workload workload;

  double mean_arrivals() const;
};

Bench make_bench(const Scenario& scenario);

// Labels for the training population over the full chain set.
std::vector<LabeledExample> training_data(const Bench& bench);
// Held-out labels for the evaluation population (calibration metrics).
std::vector<LabeledExample> evaluation_data(const Bench& bench);

// Scenario reward/train configs with seeds derived from the scenario seed.
RewardConfig reward_config(const Bench& bench);
TrainConfig train_config(const Bench& bench);

RewardModel train_reward_model(const Bench& bench, const RewardConfig& config,
                               TrainResult* trace = nullptr);

// Predicted reward of every (user, chain) pair, row-major per user.
struct PredictionTable {
  int num_chains = 0;
  std::vector<double> values;
  std::span<const double> row(int user) const {
    return std::span<const double>(values).subspan(
        static_cast<size_t>(user) * num_chains, num_chains);
  }
};

PredictionTable predict_users(const RewardModel& model,
                              std::span<const SyntheticUser> users,
                              std::span<const ActionChain> chains);

// CRAS: one single-stage reward model per non-fixed stage.
struct CrasModels {
  CrasPlan plan;
  // Full-cascade equivalent of each stage option (other stages at their
  // median), used to label the stage's training data.
  std::vector<std::vector<ActionChain>> full_options;
  std::vector<RewardModel> models;
};

CrasPlan cras_plan(const Bench& bench);
// Trains (or, with epochs = 0, just initialises) every stage model.
CrasModels train_cras_models(const Bench& bench,
                             std::vector<TrainResult>* traces = nullptr);
// Rebuilds the plan around already trained stage models.
CrasModels attach_cras_models(const Bench& bench,
                              std::vector<RewardModel> models);

struct MethodResult {
  Timeline timeline;
  RunSummary summary;
};

// Chain lookup by description ("YDNN@1100>DIEN@120"). ConfigError if absent.
int find_chain(const Bench& bench, const std::string& description);
// baselines.equal_chain, or the chain at the lower-median scale of every
// stage with each stage's first model.
int equal_chain(const Bench& bench);

// Sweep points: (EQUAL chain, per-period budget = mean arrivals * cost).
struct SweepPoint {
  int chain = 0;
  double budget = 0.0;
};
std::vector<SweepPoint> sweep_points(const Bench& bench);

// Initial dual price: the scenario's lambda_init, or with "auto" a
// warm-up solve on one period's worth of training users, scored by `model`
// over `chains` (whose costs are `costs`).
double initial_lambda(const Bench& bench, const RewardModel& model,
                      std::span<const ActionChain> chains,
                      std::span<const double> costs, double budget);

// GreenFlow over the chains in `allowed` (all chains when empty).
MethodResult run_greenflow(const Bench& bench, const RewardModel& model,
                           const PredictionTable& predictions, double budget,
                           std::span<const int> allowed = {},
                           const std::string& name = "greenflow");
MethodResult run_equal(const Bench& bench, int chain, double budget);
MethodResult run_cras(const Bench& bench, const CrasModels& cras,
                      double budget);

// Indices of chains whose last non-fixed stage uses `model_id`.
std::vector<int> chains_with_last_model(const Bench& bench,
                                        const std::string& model_id);

// {method, budget, revenue_at_e, consumed_flops, overhead_flops, requests,
// periods} with shortest round-trip numbers; byte-stable.
std::string summary_json(const RunSummary& summary);

// CSV writers for `generate`.
void write_chains_csv(std::ostream& out, const Bench& bench);
void write_workload_csv(std::ostream& out, const Workload& workload);

}  // namespace cascade

#endif  // CASCADE_PIPELINE_H_
