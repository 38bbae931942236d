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

// Recursive multi-stage reward estimator.
//
// Each non-fixed stage k has a block g_k that maps the previous hidden state,
// the request features, the chosen model's embedding and the multi-hot item
// scale code to a reward uplift and the next hidden state. With the context
// c = [f, embed(model)] and the group count g = sum(bits):
//
//   w      = softmax(FNN_0(c))                        mixture over P bases
//   u_p    = FNN_p(c) + sum_j U+_pj h_prev_j          p = 1..P, scalar heads
//   v_p    = softplus(u_p) * g
//   dr     = sum_p w_p * basis_p(v_p)
//   h      = leaky(FNN_h(c) + B+ bits + A+ h_prev)
//
// and the chain reward is the sum of dr over stages. U+, B+ and A+ are
// element-wise positive: each is softplus(theta) / fan_in of an unconstrained
// parameter theta.
//
// Monotonicity holds for any parameter values. Within a stage, every basis
// is non-decreasing and concave on [0, inf), w is a probability vector and
// v_p is a non-negative multiple of g, so dr is non-decreasing and concave
// in g. Across stages, h is non-decreasing in the stage's bits and in h_prev
// (positive weights under a monotone activation), and the next stage's u_p
// is non-decreasing in h_prev, so a larger scale at an earlier stage never
// lowers a later uplift. The mixture weights deliberately ignore h_prev: a
// softmax over h-dependent logits could move weight to a smaller basis.
//
// Two switches produce the ablation variants: `recursive = false` feeds the
// learned initial state h_0 to every stage (stages become independent), and
// `multi_basis = false` replaces the mixture with a single identity basis.

#ifndef CASCADE_REWARD_MODEL_H_
#define CASCADE_REWARD_MODEL_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "cascade/basis.h"
#include "cascade/chain.h"
#include "cascade/fnn.h"
#include "cascade/scale_encoding.h"

namespace cascade {

struct RewardConfig {
  int feature_dim = 12;  // F
  int hidden_dim = 16;   // H
  int fnn_width = 32;
  int embed_dim = 8;
  int groups = 4;  // Q
  bool recursive = true;
  bool multi_basis = true;
  double init_range = 0.05;
  uint64_t seed = 1;
};

struct StageResult {
  double delta_r = 0.0;
  std::vector<double> h;  // empty when the stage has no hidden head
  std::vector<double> w;  // mixture weights, size P
  std::vector<double> v;  // basis pre-activations, size P
};

// Per-example activations kept for backpropagation.
struct ForwardTrace {
  struct Stage {
    std::vector<double> context;  // [f, embed(model)]
    std::vector<double> h_prev;
    std::vector<double> bits;
    FnnTrace mix;
    std::vector<FnnTrace> heads;
    FnnTrace hidden;
    std::vector<double> hidden_pre;  // argument of the leaky activation
    std::vector<double> w;
    std::vector<double> u;  // scalar head pre-activations
    std::vector<double> v;
    double group = 0.0;
    int model = 0;
  };
  std::vector<Stage> stages;
  double output = 0.0;
};

class RewardModel;

// The element-wise positive weights (and their derivatives w.r.t. the
// underlying parameters) of one parameter snapshot. Computing them once per
// batch or per request keeps the softplus transforms out of the inner loops.
// Valid until the model's parameters change.
class PositiveWeights {
 private:
  friend class RewardModel;
  std::vector<double> value;  // softplus(theta) / fan_in, params layout
  std::vector<double> slope;  // sigmoid(theta) / fan_in
};

class RewardModel {
 public:
  RewardModel() = default;
  // Builds the parameter layout for `cascade` and initializes it from
  // config.seed. Throws ConfigError / DomainError on inconsistent sizes.
  RewardModel(const CascadeConfig& cascade, RewardConfig config);

  const RewardConfig& config() const { return config_; }
  int num_stages() const { return static_cast<int>(blocks_.size()); }
  int num_bases() const { return static_cast<int>(bases_.size()); }
  std::span<const Basis> bases() const { return bases_; }
  const ScaleEncoder& encoder(int k) const { return blocks_[k].encoder; }
  int num_models(int k) const { return blocks_[k].num_models; }
  bool has_hidden_head(int k) const { return blocks_[k].has_hidden; }

  std::span<double> params() { return params_; }
  std::span<const double> params() const { return params_; }
  size_t num_params() const { return params_.size(); }

  // Named slices of the flat buffer, in storage order. Used by the
  // checkpoint writer and by tests that poke single tensors.
  struct Tensor {
    std::string name;
    size_t offset;
    size_t size;
  };
  std::vector<Tensor> tensors() const;

  // One block evaluation. `bits` must have Q entries.
  StageResult stage_forward(int k, std::span<const double> h_prev,
                            std::span<const double> features, int model,
                            std::span<const double> bits) const;

  std::span<const double> initial_hidden() const;

  // Throws ConfigError when the chain does not fit the model's stages.
  double predict(std::span<const double> features,
                 const ActionChain& chain) const;

  // Rewards of every chain for one request. Shares block evaluations across
  // chains with a common prefix; results are bit-identical to predict().
  std::vector<double> predict_all(std::span<const double> features,
                                  std::span<const ActionChain> chains) const;

  double forward(std::span<const double> features, const ActionChain& chain,
                 ForwardTrace& trace) const;
  // Adds d_output * dR/dparams to grad (same layout as params()).
  void backward(const ForwardTrace& trace, double d_output,
                std::span<double> grad) const;

  // Same as above with a precomputed snapshot from positive_weights().
  PositiveWeights positive_weights() const;
  double forward(std::span<const double> features, const ActionChain& chain,
                 ForwardTrace& trace, const PositiveWeights& pw) const;
  void backward(const ForwardTrace& trace, double d_output,
                std::span<double> grad, const PositiveWeights& pw) const;

  // FLOPs of one full chain evaluation (two per weight of every evaluated
  // network), as if no prefix sharing were done.
  double inference_flops_per_chain() const;

 private:
  struct Block {
    size_t embed_offset = 0;
    int num_models = 0;
    Fnn mix;
    std::vector<Fnn> heads;
    size_t link_offset = 0;  // theta of U+, [P][H]
    Fnn hidden;              // context part of the hidden head
    size_t hidden_bits_offset = 0;  // theta of B+, [H][Q]
    size_t hidden_prev_offset = 0;  // theta of A+, [H][H]
    bool has_hidden = false;
    ScaleEncoder encoder;
  };

  struct Heads {
    std::vector<double> context;
    std::vector<double> h_prev;
    std::vector<double> w;
    std::vector<double> u;  // head pre-activations
  };

  void check_chain(const ActionChain& chain) const;
  void build_context(int k, std::span<const double> h_prev,
                     std::span<const double> features, int model,
                     std::vector<double>& context) const;
  // Fills the FNN traces too when `trace` is non-null.
  Heads eval_heads(int k, std::span<const double> h_prev,
                   std::span<const double> features, int model,
                   const PositiveWeights& pw,
                   ForwardTrace::Stage* trace) const;
  double mixture(const Heads& heads, double group) const;
  std::vector<double> eval_hidden(int k, const Heads& heads,
                                  std::span<const double> bits,
                                  const PositiveWeights& pw,
                                  ForwardTrace::Stage* trace) const;

  RewardConfig config_;
  std::vector<Basis> bases_;
  std::vector<Block> blocks_;
  size_t h0_offset_ = 0;
  std::vector<double> params_;
};

}  // namespace cascade

#endif  // CASCADE_REWARD_MODEL_H_
