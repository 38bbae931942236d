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

#ifndef CASCADE_TRAINER_H_
#define CASCADE_TRAINER_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "cascade/chain.h"
#include "cascade/reward_model.h"

namespace cascade {

// One supervised sample: the reward observed when `chain` served a request
// with these features. `chain` indexes the chain list passed alongside.
struct LabeledExample {
  std::vector<double> features;
  int chain = 0;
  double reward = 0.0;
  int field = 0;  // calibration field (activity bucket)
};

struct TrainConfig {
  int epochs = 30;
  int batch_size = 64;
  double learning_rate = 0.01;
  // The step size decays linearly per epoch from learning_rate to
  // learning_rate * final_lr_ratio; 1 keeps it constant.
  double final_lr_ratio = 1.0;
  // "sgd": plain gradient steps. "adam": per-parameter steps scaled by
  // running first/second moment estimates (beta1 0.9, beta2 0.999).
  std::string optimizer = "sgd";
  uint64_t seed = 1;
};

struct TrainResult {
  // Full-dataset MSE before training, then after each epoch.
  std::vector<double> loss_trace;
  long steps = 0;
};

// Mini-batch gradient descent on mean squared error. Gradients come from
// RewardModel::backward. Throws TrainingError when the loss turns
// non-finite, ConfigError on an empty dataset or a negative label.
TrainResult train(RewardModel& model, std::span<const ActionChain> chains,
                  std::span<const LabeledExample> data,
                  const TrainConfig& config);

// Runs `steps` gradient steps on the examples in order, batch by batch
// (wrapping around). Used for fixed-step overfit checks.
TrainResult train_steps(RewardModel& model, std::span<const ActionChain> chains,
                        std::span<const LabeledExample> data, long steps,
                        int batch_size, double learning_rate);

double mean_squared_error(const RewardModel& model,
                          std::span<const ActionChain> chains,
                          std::span<const LabeledExample> data);

// Gradient of the mean squared error over `batch` w.r.t. every parameter.
std::vector<double> loss_gradient(const RewardModel& model,
                                  std::span<const ActionChain> chains,
                                  std::span<const LabeledExample> batch);

}  // namespace cascade

#endif  // CASCADE_TRAINER_H_
