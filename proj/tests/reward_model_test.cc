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

#include "cascade/reward_model.h"

#include <cmath>
#include <numeric>

#include <gtest/gtest.h>

#include "cascade/basis.h"
#include "cascade/error.h"
#include "cascade/random.h"
#include "test_util.h"

namespace cascade {
namespace {

using testing::make_chain;
using testing::reference_cascade;
using Bits = std::vector<double>;

const RewardModel::Tensor& tensor(const RewardModel& model,
                                  const std::string& name) {
  static std::vector<RewardModel::Tensor> cache;
  cache = model.tensors();
  for (const RewardModel::Tensor& t : cache) {
    if (t.name == name) return t;
  }
  throw std::runtime_error("no tensor " + name);
}

void fill(RewardModel& model, const std::string& name, double value) {
  const RewardModel::Tensor t = tensor(model, name);
  std::fill_n(model.params().begin() + t.offset, t.size, value);
}

std::vector<double> features(uint64_t seed, int dim = 12) {
  Rng rng(seed);
  std::vector<double> f(dim);
  for (double& x : f) x = rng.uniform(-1.0, 1.0);
  return f;
}

TEST(Basis, MonotoneAndConcaveOnNonNegativeAxis) {
  for (Basis b : kDefaultBasisSet) {
    double prev = basis_value(b, 0.0);
    double prev_slope = basis_derivative(b, 0.0);
    for (int i = 1; i <= 2000; ++i) {
      const double x = 0.01 * i;
      const double v = basis_value(b, x);
      const double s = basis_derivative(b, x);
      EXPECT_GE(v, prev) << basis_name(b) << " at " << x;
      EXPECT_GE(s, 0.0) << basis_name(b);
      EXPECT_LE(s, prev_slope + 1e-15) << basis_name(b) << " at " << x;
      prev = v;
      prev_slope = s;
    }
  }
}

TEST(Basis, ValuesAtZeroAndDerivatives) {
  EXPECT_EQ(basis_value(Basis::kTanh, 0.0), 0.0);
  EXPECT_EQ(basis_value(Basis::kLog1p, 0.0), 0.0);
  EXPECT_EQ(basis_value(Basis::kSoftSign, 0.0), 0.0);
  EXPECT_EQ(basis_value(Basis::kSigmoid, 0.0), 0.5);
  EXPECT_EQ(basis_value(Basis::kIdentity, 3.0), 3.0);
  for (Basis b : kDefaultBasisSet) {
    for (double x : {0.0, 0.3, 1.7, 6.0}) {
      const double numeric =
          (basis_value(b, x + 1e-6) - basis_value(b, x - 1e-6)) / 2e-6;
      EXPECT_NEAR(basis_derivative(b, x), numeric, 1e-7) << basis_name(b);
    }
  }
  EXPECT_DOUBLE_EQ(softplus(0.0), 0.6931471805599453);
  EXPECT_EQ(softplus(800.0), 800.0);
  EXPECT_EQ(sigmoid(0.0), 0.5);
}

TEST(RewardModel, ZeroHeadsGiveLn2PerActiveGroup) {
  const CascadeConfig cascade = reference_cascade();
  RewardModel model(cascade, RewardConfig{});
  for (int p = 1; p <= 5; ++p) fill(model, "stage2.fnn" + std::to_string(p), 0);
  const std::vector<double> h_prev(16, 0.0);
  const StageResult r =
      model.stage_forward(1, h_prev, features(1), 0, Bits{1.0, 0.0, 0.0, 0.0});
  ASSERT_EQ(r.v.size(), 5u);
  for (double v : r.v) EXPECT_DOUBLE_EQ(v, 0.6931471805599453);
}

TEST(RewardModel, IdentityBasisPassesThrough) {
  const CascadeConfig cascade = reference_cascade();
  RewardConfig config;
  config.multi_basis = false;
  RewardModel model(cascade, config);
  ASSERT_EQ(model.num_bases(), 1);
  const RewardModel::Tensor head = tensor(model, "stage2.fnn1");
  fill(model, "stage2.fnn1", 0.0);
  // The output bias is the last entry; softplus(log(e^3 - 1)) = 3.
  model.params()[head.offset + head.size - 1] = std::log(std::expm1(3.0));
  const std::vector<double> h_prev(16, 0.0);
  const StageResult r =
      model.stage_forward(1, h_prev, features(2), 1, Bits{1.0, 0.0, 0.0, 0.0});
  EXPECT_NEAR(r.v[0], 3.0, 1e-12);
  EXPECT_NEAR(r.delta_r, 3.0, 1e-12);
  EXPECT_EQ(r.w, std::vector<double>{1.0});
}

TEST(RewardModel, MixtureIsAProbabilityVector) {
  const CascadeConfig cascade = reference_cascade();
  Rng rng(5);
  for (int draw = 0; draw < 50; ++draw) {
    RewardConfig config;
    config.init_range = 1.0;
    config.seed = rng.next();
    const RewardModel model(cascade, config);
    const StageResult r = model.stage_forward(
        draw % 2, model.initial_hidden(), features(draw), 0, Bits{1, 1, 0, 0});
    double sum = 0.0;
    for (double w : r.w) {
      EXPECT_GE(w, 0.0);
      sum += w;
    }
    EXPECT_NEAR(sum, 1.0, 1e-12);
    for (double v : r.v) EXPECT_GE(v, 0.0);
    EXPECT_GE(r.delta_r, 0.0);
  }
}

TEST(RewardModel, MoreActiveGroupsNeverLowerTheUplift) {
  const CascadeConfig cascade = reference_cascade();
  Rng rng(6);
  for (int draw = 0; draw < 100; ++draw) {
    RewardConfig config;
    config.init_range = 1.5;
    config.seed = rng.next();
    RewardModel model(cascade, config);
    for (double& p : model.params()) p += 0.5 * rng.normal();
    const std::vector<double> f = features(rng.next());
    std::vector<double> h(16);
    for (double& x : h) x = rng.uniform(-1.0, 2.0);
    const double prefix =
        model.stage_forward(1, h, f, 1, Bits{1, 0, 0, 0}).delta_r;
    const double all = model.stage_forward(1, h, f, 1, Bits{1, 1, 1, 1}).delta_r;
    EXPECT_GE(all, prefix);
  }
}

TEST(RewardModel, PredictionIsMonotoneOverTheScaleGrid) {
  const CascadeConfig cascade = reference_cascade();
  const std::vector<ActionChain> chains = generate_chains(cascade);
  Rng rng(7);
  for (int draw = 0; draw < 40; ++draw) {
    RewardConfig config;
    config.init_range = rng.uniform(0.05, 2.0);
    config.seed = rng.next();
    RewardModel model(cascade, config);
    for (double& p : model.params()) p += 0.5 * rng.normal();
    const std::vector<double> f = features(rng.next());
    for (const ActionChain& a : chains) {
      for (const ActionChain& b : chains) {
        if (a.actions[1].model != b.actions[1].model) continue;
        if (a.actions[0].item_scale <= b.actions[0].item_scale &&
            a.actions[1].item_scale <= b.actions[1].item_scale) {
          EXPECT_LE(model.predict(f, a), model.predict(f, b));
        }
      }
    }
  }
}

TEST(RewardModel, UpliftIsDiscretelyConcaveInGroupCount) {
  const CascadeConfig cascade = reference_cascade();
  Rng rng(8);
  for (int draw = 0; draw < 100; ++draw) {
    RewardConfig config;
    config.init_range = 1.0;
    config.seed = rng.next();
    RewardModel model(cascade, config);
    for (double& p : model.params()) p += 0.5 * rng.normal();
    const std::vector<double> f = features(rng.next());
    std::vector<double> dr;
    for (int g = 0; g <= 4; ++g) {
      std::vector<double> bits(4, 0.0);
      std::fill_n(bits.begin(), g, 1.0);
      dr.push_back(
          model.stage_forward(1, model.initial_hidden(), f, 0, bits).delta_r);
    }
    for (int g = 1; g < 4; ++g) {
      EXPECT_LE(dr[g + 1] - 2 * dr[g] + dr[g - 1], 1e-9);
    }
  }
}

TEST(RewardModel, SingleStageRewardEqualsItsUplift) {
  const CascadeConfig cascade(
      {StageConfig{1, false, {{"A", 0, 5.0, 0.5}}, {10, 20, 30, 40}}});
  RewardConfig config;
  config.init_range = 0.5;
  const RewardModel model(cascade, config);
  const std::vector<double> f = features(9);
  for (const ActionChain& c : generate_chains(cascade)) {
    const MultiHotScaleEncoding enc =
        model.encoder(0).encode(c.actions[0].item_scale);
    EXPECT_EQ(model.predict(f, c),
              model.stage_forward(0, model.initial_hidden(), f, 0, enc.bits)
                  .delta_r);
  }
}

TEST(RewardModel, PredictAllMatchesPredictBitForBit) {
  const CascadeConfig cascade = reference_cascade();
  const std::vector<ActionChain> chains = generate_chains(cascade);
  RewardConfig config;
  config.init_range = 0.7;
  const RewardModel model(cascade, config);
  const std::vector<double> f = features(10);
  const std::vector<double> all = model.predict_all(f, chains);
  ASSERT_EQ(all.size(), chains.size());
  for (size_t j = 0; j < chains.size(); ++j) {
    EXPECT_EQ(all[j], model.predict(f, chains[j]));
    ForwardTrace trace;
    EXPECT_EQ(all[j], model.forward(f, chains[j], trace));
  }
}

TEST(RewardModel, DeterministicForEqualInputsAndSeeds) {
  const CascadeConfig cascade = reference_cascade();
  const RewardModel a(cascade, RewardConfig{});
  const RewardModel b(cascade, RewardConfig{});
  ASSERT_TRUE(std::equal(a.params().begin(), a.params().end(),
                         b.params().begin(), b.params().end()));
  const ActionChain c = make_chain(cascade, {"YDNN", "DIN"}, {1000, 100});
  EXPECT_EQ(a.predict(features(11), c), b.predict(features(11), c));
}

TEST(RewardModel, WithoutRecursionStagesAreIndependent) {
  const CascadeConfig cascade = reference_cascade();
  RewardConfig config;
  config.recursive = false;
  config.init_range = 0.8;
  const RewardModel model(cascade, config);
  const std::vector<double> f = features(12);
  // R(n2', n3) - R(n2, n3) must not depend on n3.
  const double d60 =
      model.predict(f, make_chain(cascade, {"YDNN", "DIN"}, {1500, 60})) -
      model.predict(f, make_chain(cascade, {"YDNN", "DIN"}, {800, 60}));
  const double d200 =
      model.predict(f, make_chain(cascade, {"YDNN", "DIN"}, {1500, 200})) -
      model.predict(f, make_chain(cascade, {"YDNN", "DIN"}, {800, 200}));
  EXPECT_NEAR(d60, d200, 1e-12);
}

TEST(RewardModel, TensorsTileTheParameterBuffer) {
  const RewardModel model(reference_cascade(), RewardConfig{});
  size_t next = 0;
  for (const RewardModel::Tensor& t : model.tensors()) {
    EXPECT_EQ(t.offset, next) << t.name;
    next = t.offset + t.size;
  }
  EXPECT_EQ(next, model.num_params());
  EXPECT_GT(model.inference_flops_per_chain(), 0.0);
}

TEST(RewardModel, RejectsMismatchedChains) {
  const CascadeConfig cascade = reference_cascade();
  const RewardModel model(cascade, RewardConfig{});
  ActionChain short_chain;
  short_chain.actions = {{0, 1000}};
  EXPECT_THROW(model.predict(features(13), short_chain), ConfigError);
  ActionChain bad_model = make_chain(cascade, {"YDNN", "DIN"}, {1000, 100});
  bad_model.actions[1].model = 7;
  EXPECT_THROW(model.predict(features(13), bad_model), ConfigError);
  ActionChain bad_scale = make_chain(cascade, {"YDNN", "DIN"}, {1000, 100});
  bad_scale.actions[1].item_scale = 110;
  EXPECT_THROW(model.predict(features(13), bad_scale), DomainError);
  EXPECT_THROW(model.predict(std::vector<double>(3, 0.0),
                             make_chain(cascade, {"YDNN", "DIN"}, {1000, 100})),
               ConfigError);
}

}  // namespace
}  // namespace cascade
