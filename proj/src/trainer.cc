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

#include "cascade/trainer.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "cascade/error.h"

namespace cascade {

namespace {

void validate(std::span<const ActionChain> chains,
              std::span<const LabeledExample> data) {
  if (data.empty()) throw ConfigError("train: dataset is empty");
  for (const LabeledExample& ex : data) {
    if (ex.chain < 0 || ex.chain >= static_cast<int>(chains.size())) {
      throw ConfigError("train: example references chain " +
                        std::to_string(ex.chain) + " out of range");
    }
    if (!(ex.reward >= 0.0)) {
      throw ConfigError("train: observed rewards must be >= 0");
    }
  }
}

// Accumulates sum over the batch of 2 (R - y) dR/dtheta into grad and
// returns the summed squared error.
double accumulate_gradient(const RewardModel& model,
                           std::span<const ActionChain> chains,
                           std::span<const LabeledExample> data,
                           std::span<const size_t> batch,
                           std::span<double> grad, ForwardTrace& trace) {
  const PositiveWeights pw = model.positive_weights();
  double sse = 0.0;
  for (size_t idx : batch) {
    const LabeledExample& ex = data[idx];
    const double pred =
        model.forward(ex.features, chains[ex.chain], trace, pw);
    const double residual = pred - ex.reward;
    sse += residual * residual;
    model.backward(trace, 2.0 * residual, grad, pw);
  }
  return sse;
}

void apply_step(RewardModel& model, std::span<const double> grad,
                double scale) {
  std::span<double> params = model.params();
  for (size_t i = 0; i < params.size(); ++i) params[i] -= scale * grad[i];
}

// Adam moment estimates with bias correction.
class AdamState {
 public:
  explicit AdamState(size_t n) : m_(n, 0.0), v_(n, 0.0) {}

  // `grad` is a summed batch gradient; `grad_scale` turns it into a mean.
  void step(std::span<double> params, std::span<const double> grad,
            double grad_scale, double lr) {
    constexpr double kBeta1 = 0.9, kBeta2 = 0.999, kEps = 1e-8;
    ++t_;
    const double c1 = 1.0 - std::pow(kBeta1, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(kBeta2, static_cast<double>(t_));
    for (size_t i = 0; i < params.size(); ++i) {
      const double g = grad[i] * grad_scale;
      m_[i] = kBeta1 * m_[i] + (1.0 - kBeta1) * g;
      v_[i] = kBeta2 * v_[i] + (1.0 - kBeta2) * g * g;
      params[i] -= lr * (m_[i] / c1) / (std::sqrt(v_[i] / c2) + kEps);
    }
  }

 private:
  std::vector<double> m_, v_;
  long t_ = 0;
};

void check_loss(double loss, long step) {
  if (!std::isfinite(loss)) {
    throw TrainingError("train: loss became non-finite at step " +
                            std::to_string(step),
                        step);
  }
}

}  // namespace

double mean_squared_error(const RewardModel& model,
                          std::span<const ActionChain> chains,
                          std::span<const LabeledExample> data) {
  if (data.empty()) return 0.0;
  const PositiveWeights pw = model.positive_weights();
  ForwardTrace trace;
  double sse = 0.0;
  for (const LabeledExample& ex : data) {
    const double r =
        model.forward(ex.features, chains[ex.chain], trace, pw) - ex.reward;
    sse += r * r;
  }
  return sse / static_cast<double>(data.size());
}

std::vector<double> loss_gradient(const RewardModel& model,
                                  std::span<const ActionChain> chains,
                                  std::span<const LabeledExample> batch) {
  std::vector<double> grad(model.num_params(), 0.0);
  if (batch.empty()) return grad;
  std::vector<size_t> order(batch.size());
  std::iota(order.begin(), order.end(), 0);
  ForwardTrace trace;
  accumulate_gradient(model, chains, batch, order, grad, trace);
  const double inv = 1.0 / static_cast<double>(batch.size());
  for (double& g : grad) g *= inv;
  return grad;
}

TrainResult train(RewardModel& model, std::span<const ActionChain> chains,
                  std::span<const LabeledExample> data,
                  const TrainConfig& config) {
  validate(chains, data);
  if (config.batch_size < 1 || !(config.learning_rate > 0.0) ||
      config.epochs < 0 || !(config.final_lr_ratio > 0.0) ||
      config.final_lr_ratio > 1.0) {
    throw ConfigError("train: need batch_size >= 1, learning_rate > 0, "
                      "epochs >= 0, 0 < final_lr_ratio <= 1");
  }
  const bool adam = config.optimizer == "adam";
  if (!adam && config.optimizer != "sgd") {
    throw ConfigError("train: optimizer must be 'sgd' or 'adam', got '" +
                      config.optimizer + "'");
  }
  TrainResult result;
  result.loss_trace.push_back(mean_squared_error(model, chains, data));
  check_loss(result.loss_trace.back(), 0);

  std::mt19937_64 rng(config.seed);
  std::vector<size_t> order(data.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> grad(model.num_params());
  AdamState moments(model.num_params());
  ForwardTrace trace;

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    const double progress =
        config.epochs > 1 ? static_cast<double>(epoch) / (config.epochs - 1)
                          : 0.0;
    const double lr = config.learning_rate *
                      (1.0 - progress * (1.0 - config.final_lr_ratio));
    // Fisher-Yates with a raw 64-bit draw so the order does not depend on
    // the standard library's distribution code.
    for (size_t i = order.size(); i > 1; --i) {
      const size_t j = static_cast<size_t>(rng() % i);
      std::swap(order[i - 1], order[j]);
    }
    for (size_t start = 0; start < order.size(); start += config.batch_size) {
      const size_t end = std::min(order.size(), start + config.batch_size);
      std::fill(grad.begin(), grad.end(), 0.0);
      const double sse = accumulate_gradient(
          model, chains, data,
          std::span<const size_t>(order).subspan(start, end - start), grad,
          trace);
      ++result.steps;
      check_loss(sse, result.steps);
      const double inv = 1.0 / static_cast<double>(end - start);
      if (adam) {
        moments.step(model.params(), grad, inv, lr);
      } else {
        apply_step(model, grad, lr * inv);
      }
    }
    result.loss_trace.push_back(mean_squared_error(model, chains, data));
    check_loss(result.loss_trace.back(), result.steps);
  }
  return result;
}

TrainResult train_steps(RewardModel& model, std::span<const ActionChain> chains,
                        std::span<const LabeledExample> data, long steps,
                        int batch_size, double learning_rate) {
  validate(chains, data);
  TrainResult result;
  result.loss_trace.push_back(mean_squared_error(model, chains, data));
  std::vector<size_t> order(data.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> grad(model.num_params());
  ForwardTrace trace;
  size_t cursor = 0;
  std::vector<size_t> batch;
  for (long s = 0; s < steps; ++s) {
    batch.clear();
    for (int b = 0; b < batch_size && b < static_cast<int>(data.size()); ++b) {
      batch.push_back(order[cursor]);
      cursor = (cursor + 1) % order.size();
    }
    std::fill(grad.begin(), grad.end(), 0.0);
    const double sse =
        accumulate_gradient(model, chains, data, batch, grad, trace);
    ++result.steps;
    check_loss(sse, result.steps);
    apply_step(model, grad, learning_rate / static_cast<double>(batch.size()));
  }
  result.loss_trace.push_back(mean_squared_error(model, chains, data));
  return result;
}

}  // namespace cascade
