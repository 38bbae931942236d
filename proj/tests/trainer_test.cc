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

#include <cmath>

#include <gtest/gtest.h>

#include "cascade/error.h"
#include "cascade/random.h"
#include "test_util.h"

namespace cascade {
namespace {

using testing::reference_cascade;

struct Fixture {
  CascadeConfig cascade = reference_cascade();
  std::vector<ActionChain> chains = generate_chains(cascade);
};

std::vector<LabeledExample> random_data(int n, int num_chains, uint64_t seed) {
  Rng rng(seed);
  std::vector<LabeledExample> data(n);
  for (LabeledExample& e : data) {
    e.features.resize(12);
    for (double& x : e.features) x = rng.uniform(-1.0, 1.0);
    e.chain = static_cast<int>(rng.below(num_chains));
    e.reward = rng.uniform(0.0, 3.0);
  }
  return data;
}

TEST(Trainer, OverfitsASingleExample) {
  Fixture fx;
  RewardModel model(fx.cascade, RewardConfig{});
  const std::vector<LabeledExample> data = random_data(1, 128, 1);
  const TrainResult r = train_steps(model, fx.chains, data, 500, 1, 0.05);
  EXPECT_EQ(r.steps, 500);
  EXPECT_LE(mean_squared_error(model, fx.chains, data), 1e-4);
}

TEST(Trainer, GradientMatchesFiniteDifferences) {
  Fixture fx;
  RewardConfig config;
  config.init_range = 0.5;
  RewardModel model(fx.cascade, config);
  const std::vector<LabeledExample> batch = random_data(8, 128, 2);
  const std::vector<double> grad = loss_gradient(model, fx.chains, batch);
  ASSERT_EQ(grad.size(), model.num_params());
  Rng rng(3);
  for (int probe = 0; probe < 60; ++probe) {
    const size_t i = rng.below(model.num_params());
    const double saved = model.params()[i];
    const double h = 1e-5;
    model.params()[i] = saved + h;
    const double up = mean_squared_error(model, fx.chains, batch);
    model.params()[i] = saved - h;
    const double down = mean_squared_error(model, fx.chains, batch);
    model.params()[i] = saved;
    const double numeric = (up - down) / (2 * h);
    EXPECT_NEAR(grad[i], numeric, 1e-6 + 1e-4 * std::abs(numeric))
        << "parameter " << i;
  }
}

TEST(Trainer, ZeroResidualIsAFixedPoint) {
  Fixture fx;
  RewardModel model(fx.cascade, RewardConfig{});
  std::vector<LabeledExample> data = random_data(16, 128, 4);
  for (LabeledExample& e : data) {
    e.reward = model.predict(e.features, fx.chains[e.chain]);
  }
  const std::vector<double> before(model.params().begin(),
                                   model.params().end());
  train_steps(model, fx.chains, data, 10, 4, 0.1);
  EXPECT_TRUE(std::equal(before.begin(), before.end(), model.params().begin(),
                         model.params().end()));
}

TEST(Trainer, LossDecreasesWithEitherOptimizer) {
  Fixture fx;
  const std::vector<LabeledExample> data = random_data(256, 128, 5);
  for (const char* optimizer : {"sgd", "adam"}) {
    RewardModel model(fx.cascade, RewardConfig{});
    TrainConfig config;
    config.epochs = 5;
    config.optimizer = optimizer;
    config.learning_rate = std::string(optimizer) == "adam" ? 0.003 : 0.01;
    config.final_lr_ratio = 0.2;
    const TrainResult r = train(model, fx.chains, data, config);
    ASSERT_EQ(r.loss_trace.size(), 6u);
    EXPECT_LT(r.loss_trace.back(), r.loss_trace.front()) << optimizer;
    EXPECT_EQ(r.steps, 5 * 4);
  }
}

TEST(Trainer, TrainingIsDeterministic) {
  Fixture fx;
  const std::vector<LabeledExample> data = random_data(100, 128, 6);
  TrainConfig config;
  config.epochs = 2;
  config.batch_size = 16;
  RewardModel a(fx.cascade, RewardConfig{});
  RewardModel b(fx.cascade, RewardConfig{});
  EXPECT_EQ(train(a, fx.chains, data, config).loss_trace,
            train(b, fx.chains, data, config).loss_trace);
  EXPECT_TRUE(std::equal(a.params().begin(), a.params().end(),
                         b.params().begin(), b.params().end()));
}

TEST(Trainer, DivergenceRaisesTrainingError) {
  Fixture fx;
  RewardModel model(fx.cascade, RewardConfig{});
  std::vector<LabeledExample> data = random_data(32, 128, 7);
  for (LabeledExample& e : data) e.reward = 1e200;
  try {
    train_steps(model, fx.chains, data, 50, 8, 1e10);
    FAIL() << "expected TrainingError";
  } catch (const TrainingError& e) {
    EXPECT_GE(e.step(), 0);
  }
}

TEST(Trainer, RejectsBadInputs) {
  Fixture fx;
  RewardModel model(fx.cascade, RewardConfig{});
  std::vector<LabeledExample> data = random_data(4, 128, 8);
  TrainConfig config;
  EXPECT_THROW(train(model, fx.chains, {}, config), ConfigError);
  config.optimizer = "rmsprop";
  EXPECT_THROW(train(model, fx.chains, data, config), ConfigError);
  config = TrainConfig{};
  config.final_lr_ratio = 0.0;
  EXPECT_THROW(train(model, fx.chains, data, config), ConfigError);
  config = TrainConfig{};
  data[0].reward = -1.0;
  EXPECT_THROW(train(model, fx.chains, data, config), ConfigError);
  data[0].reward = 1.0;
  data[1].chain = 500;
  EXPECT_THROW(train(model, fx.chains, data, config), ConfigError);
}

}  // namespace
}  // namespace cascade
