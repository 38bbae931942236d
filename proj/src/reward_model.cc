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

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <string>
#include <tuple>

#include "cascade/error.h"

namespace cascade {

namespace {

void softmax_inplace(std::vector<double>& z) {
  const double top = *std::max_element(z.begin(), z.end());
  double sum = 0.0;
  for (double& e : z) {
    e = std::exp(e - top);
    sum += e;
  }
  for (double& e : z) e /= sum;
}

void check_finite(double value, int stage, const char* what) {
  if (!std::isfinite(value)) {
    throw NumericError("reward model: non-finite " + std::string(what) +
                       " at stage " + std::to_string(stage + 1));
  }
}

}  // namespace

RewardModel::RewardModel(const CascadeConfig& cascade, RewardConfig config)
    : config_(config) {
  if (config_.feature_dim < 1 || config_.hidden_dim < 1 ||
      config_.fnn_width < 1 || config_.fnn_width > 256 ||
      config_.embed_dim < 1) {
    throw ConfigError("reward: dimensions must be positive (width <= 256)");
  }
  if (config_.multi_basis) {
    bases_.assign(kDefaultBasisSet.begin(), kDefaultBasisSet.end());
  } else {
    bases_ = {Basis::kIdentity};
  }
  const int num_stages = cascade.num_action_stages();
  const int H = config_.hidden_dim;
  const int C = config_.feature_dim + config_.embed_dim;
  const int Q = config_.groups;
  const int P = num_bases();

  size_t offset = 0;
  h0_offset_ = offset;
  offset += H;
  blocks_.resize(num_stages);
  for (int k = 0; k < num_stages; ++k) {
    Block& b = blocks_[k];
    const StageConfig& stage = cascade.action_stage(k);
    b.encoder = ScaleEncoder(stage.scales, Q);
    b.num_models = static_cast<int>(stage.models.size());
    b.embed_offset = offset;
    offset += static_cast<size_t>(b.num_models) * config_.embed_dim;
    if (P > 1) {
      b.mix = Fnn(C, config_.fnn_width, P, offset);
      offset += b.mix.num_params();
    }
    for (int p = 0; p < P; ++p) {
      b.heads.emplace_back(C, config_.fnn_width, 1, offset);
      offset += b.heads.back().num_params();
    }
    b.link_offset = offset;
    offset += static_cast<size_t>(P) * H;
    b.has_hidden = config_.recursive && k + 1 < num_stages;
    if (b.has_hidden) {
      b.hidden = Fnn(C, config_.fnn_width, H, offset);
      offset += b.hidden.num_params();
      b.hidden_bits_offset = offset;
      offset += static_cast<size_t>(H) * Q;
      b.hidden_prev_offset = offset;
      offset += static_cast<size_t>(H) * H;
    }
  }
  params_.assign(offset, 0.0);

  std::mt19937_64 rng(config_.seed);
  auto uniform = [&] {
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    return (2.0 * u - 1.0) * config_.init_range;
  };
  auto fill = [&](size_t from, size_t count) {
    for (size_t i = 0; i < count; ++i) params_[from + i] = uniform();
  };
  for (Block& b : blocks_) {
    fill(b.embed_offset, static_cast<size_t>(b.num_models) * config_.embed_dim);
    if (P > 1) b.mix.initialize(params_, rng, config_.init_range);
    for (const Fnn& head : b.heads) {
      head.initialize(params_, rng, config_.init_range);
    }
    fill(b.link_offset, static_cast<size_t>(P) * H);
    if (b.has_hidden) {
      b.hidden.initialize(params_, rng, config_.init_range);
      fill(b.hidden_bits_offset, static_cast<size_t>(H) * Q);
      fill(b.hidden_prev_offset, static_cast<size_t>(H) * H);
    }
  }
}

std::vector<RewardModel::Tensor> RewardModel::tensors() const {
  const size_t H = config_.hidden_dim;
  const size_t Q = config_.groups;
  std::vector<Tensor> out;
  out.push_back({"h0", h0_offset_, H});
  for (int k = 0; k < num_stages(); ++k) {
    const Block& b = blocks_[k];
    const std::string prefix = "stage" + std::to_string(k + 1) + ".";
    out.push_back({prefix + "embedding", b.embed_offset,
                   static_cast<size_t>(b.num_models) * config_.embed_dim});
    if (num_bases() > 1) {
      out.push_back({prefix + "fnn0", b.mix.offset(), b.mix.num_params()});
    }
    for (int p = 0; p < num_bases(); ++p) {
      out.push_back({prefix + "fnn" + std::to_string(p + 1),
                     b.heads[p].offset(), b.heads[p].num_params()});
    }
    out.push_back({prefix + "link", b.link_offset, num_bases() * H});
    if (b.has_hidden) {
      out.push_back({prefix + "fnn_h", b.hidden.offset(),
                     b.hidden.num_params()});
      out.push_back({prefix + "hidden_bits", b.hidden_bits_offset, H * Q});
      out.push_back({prefix + "hidden_prev", b.hidden_prev_offset, H * H});
    }
  }
  return out;
}

std::span<const double> RewardModel::initial_hidden() const {
  return std::span<const double>(params_).subspan(h0_offset_,
                                                  config_.hidden_dim);
}

PositiveWeights RewardModel::positive_weights() const {
  PositiveWeights pw;
  pw.value.assign(params_.size(), 0.0);
  pw.slope.assign(params_.size(), 0.0);
  auto fill = [&](size_t from, size_t count, int fan_in) {
    for (size_t i = from; i < from + count; ++i) {
      pw.value[i] = softplus(params_[i]) / fan_in;
      pw.slope[i] = sigmoid(params_[i]) / fan_in;
    }
  };
  const size_t H = config_.hidden_dim;
  const size_t Q = config_.groups;
  for (const Block& b : blocks_) {
    fill(b.link_offset, num_bases() * H, config_.hidden_dim);
    if (b.has_hidden) {
      fill(b.hidden_bits_offset, H * Q, config_.groups);
      fill(b.hidden_prev_offset, H * H, config_.hidden_dim);
    }
  }
  return pw;
}

void RewardModel::build_context(int k, std::span<const double> h_prev,
                                std::span<const double> features, int model,
                                std::vector<double>& context) const {
  const Block& b = blocks_[k];
  if (static_cast<int>(h_prev.size()) != config_.hidden_dim ||
      static_cast<int>(features.size()) != config_.feature_dim) {
    throw ConfigError("reward model: input dimension mismatch at stage " +
                      std::to_string(k + 1));
  }
  if (model < 0 || model >= b.num_models) {
    throw ConfigError("reward model: model index " + std::to_string(model) +
                      " outside the pool of stage " + std::to_string(k + 1));
  }
  context.assign(features.begin(), features.end());
  const double* e =
      params_.data() + b.embed_offset +
      static_cast<size_t>(model) * config_.embed_dim;
  context.insert(context.end(), e, e + config_.embed_dim);
}

RewardModel::Heads RewardModel::eval_heads(int k,
                                           std::span<const double> h_prev,
                                           std::span<const double> features,
                                           int model,
                                           const PositiveWeights& pw,
                                           ForwardTrace::Stage* trace) const {
  const Block& b = blocks_[k];
  const int P = num_bases();
  const int H = config_.hidden_dim;
  Heads out;
  build_context(k, h_prev, features, model, out.context);
  out.h_prev.assign(h_prev.begin(), h_prev.end());
  out.w.assign(P, 1.0);
  if (P > 1) {
    b.mix.forward(params_, out.context, out.w,
                  trace != nullptr ? &trace->mix : nullptr);
    softmax_inplace(out.w);
  }
  out.u.resize(P);
  if (trace != nullptr) trace->heads.resize(P);
  for (int p = 0; p < P; ++p) {
    double u;
    b.heads[p].forward(params_, out.context, std::span<double>(&u, 1),
                       trace != nullptr ? &trace->heads[p] : nullptr);
    const size_t row = b.link_offset + static_cast<size_t>(p) * H;
    for (int j = 0; j < H; ++j) u += pw.value[row + j] * h_prev[j];
    out.u[p] = u;
  }
  return out;
}

double RewardModel::mixture(const Heads& heads, double group) const {
  double dr = 0.0;
  for (int p = 0; p < num_bases(); ++p) {
    dr += heads.w[p] * basis_value(bases_[p], softplus(heads.u[p]) * group);
  }
  return dr;
}

std::vector<double> RewardModel::eval_hidden(
    int k, const Heads& heads, std::span<const double> bits,
    const PositiveWeights& pw, ForwardTrace::Stage* trace) const {
  const Block& b = blocks_[k];
  const int H = config_.hidden_dim;
  const int Q = config_.groups;
  std::vector<double> pre(H);
  b.hidden.forward(params_, heads.context, pre,
                   trace != nullptr ? &trace->hidden : nullptr);
  for (int i = 0; i < H; ++i) {
    const size_t brow = b.hidden_bits_offset + static_cast<size_t>(i) * Q;
    for (int q = 0; q < Q; ++q) pre[i] += pw.value[brow + q] * bits[q];
    const size_t hrow = b.hidden_prev_offset + static_cast<size_t>(i) * H;
    for (int j = 0; j < H; ++j) {
      pre[i] += pw.value[hrow + j] * heads.h_prev[j];
    }
  }
  std::vector<double> h(H);
  for (int i = 0; i < H; ++i) {
    h[i] = pre[i] > 0.0 ? pre[i] : kLeakySlope * pre[i];
    check_finite(h[i], k, "hidden state");
  }
  if (trace != nullptr) trace->hidden_pre = std::move(pre);
  return h;
}

StageResult RewardModel::stage_forward(int k, std::span<const double> h_prev,
                                       std::span<const double> features,
                                       int model,
                                       std::span<const double> bits) const {
  if (k < 0 || k >= num_stages()) {
    throw ConfigError("reward model: stage " + std::to_string(k + 1) +
                      " does not exist");
  }
  if (static_cast<int>(bits.size()) != config_.groups) {
    throw ConfigError("reward model: scale code must have Q entries");
  }
  double group = 0.0;
  for (double bit : bits) group += bit;

  const PositiveWeights pw = positive_weights();
  const Heads heads = eval_heads(k, h_prev, features, model, pw, nullptr);
  StageResult r;
  r.delta_r = mixture(heads, group);
  check_finite(r.delta_r, k, "reward uplift");
  r.w = heads.w;
  r.v.resize(num_bases());
  for (int p = 0; p < num_bases(); ++p) r.v[p] = softplus(heads.u[p]) * group;
  if (blocks_[k].has_hidden) r.h = eval_hidden(k, heads, bits, pw, nullptr);
  return r;
}

void RewardModel::check_chain(const ActionChain& chain) const {
  if (static_cast<int>(chain.actions.size()) != num_stages()) {
    throw ConfigError("reward model: chain has " +
                      std::to_string(chain.actions.size()) +
                      " stages, model has " + std::to_string(num_stages()));
  }
}

double RewardModel::predict(std::span<const double> features,
                            const ActionChain& chain) const {
  check_chain(chain);
  const PositiveWeights pw = positive_weights();
  const std::span<const double> h0 = initial_hidden();
  std::vector<double> h(h0.begin(), h0.end());
  double total = 0.0;
  for (int k = 0; k < num_stages(); ++k) {
    const StageAction& a = chain.actions[k];
    const MultiHotScaleEncoding enc = blocks_[k].encoder.encode(a.item_scale);
    const std::span<const double> h_prev =
        config_.recursive ? std::span<const double>(h) : h0;
    const Heads heads = eval_heads(k, h_prev, features, a.model, pw, nullptr);
    const double dr = mixture(heads, enc.group);
    check_finite(dr, k, "reward uplift");
    total += dr;
    if (blocks_[k].has_hidden) h = eval_hidden(k, heads, enc.bits, pw, nullptr);
  }
  return total;
}

std::vector<double> RewardModel::predict_all(
    std::span<const double> features,
    std::span<const ActionChain> chains) const {
  // Trie over (parent node, model, group). Heads depend on (node, model)
  // only; the group enters through the mixture and the hidden head.
  struct Node {
    std::vector<double> h;
    double cumulative;
  };
  std::vector<Node> nodes;
  const PositiveWeights pw = positive_weights();
  const std::span<const double> h0 = initial_hidden();
  nodes.push_back({std::vector<double>(h0.begin(), h0.end()), 0.0});
  std::map<std::pair<int, int>, Heads> heads_cache;
  std::map<std::tuple<int, int, int>, int> children;

  std::vector<double> out;
  out.reserve(chains.size());
  for (const ActionChain& chain : chains) {
    check_chain(chain);
    int node = 0;
    double result = 0.0;
    for (int k = 0; k < num_stages(); ++k) {
      const StageAction& a = chain.actions[k];
      const int group = blocks_[k].encoder.group_of(a.item_scale);
      auto hit = heads_cache.find({node, a.model});
      if (hit == heads_cache.end()) {
        const std::span<const double> h_prev =
            config_.recursive ? std::span<const double>(nodes[node].h) : h0;
        hit = heads_cache
                  .emplace(std::make_pair(node, a.model),
                           eval_heads(k, h_prev, features, a.model, pw, nullptr))
                  .first;
      }
      const double dr = mixture(hit->second, group);
      check_finite(dr, k, "reward uplift");
      const double cumulative = nodes[node].cumulative + dr;
      if (k + 1 == num_stages()) {
        result = cumulative;
        break;
      }
      auto key = std::make_tuple(node, a.model, group);
      auto child = children.find(key);
      if (child == children.end()) {
        Node next;
        next.cumulative = cumulative;
        if (blocks_[k].has_hidden) {
          next.h = eval_hidden(k, hit->second,
                               blocks_[k].encoder.encode_group(group).bits,
                               pw, nullptr);
        }
        nodes.push_back(std::move(next));
        child = children.emplace(key, static_cast<int>(nodes.size()) - 1).first;
      }
      node = child->second;
    }
    out.push_back(result);
  }
  return out;
}

double RewardModel::forward(std::span<const double> features,
                            const ActionChain& chain,
                            ForwardTrace& trace) const {
  return forward(features, chain, trace, positive_weights());
}

void RewardModel::backward(const ForwardTrace& trace, double d_output,
                           std::span<double> grad) const {
  backward(trace, d_output, grad, positive_weights());
}

double RewardModel::forward(std::span<const double> features,
                            const ActionChain& chain, ForwardTrace& trace,
                            const PositiveWeights& pw) const {
  check_chain(chain);
  const int P = num_bases();
  trace.stages.resize(num_stages());
  const std::span<const double> h0 = initial_hidden();
  std::vector<double> h(h0.begin(), h0.end());
  double total = 0.0;
  for (int k = 0; k < num_stages(); ++k) {
    const Block& b = blocks_[k];
    ForwardTrace::Stage& st = trace.stages[k];
    const StageAction& a = chain.actions[k];
    MultiHotScaleEncoding enc = b.encoder.encode(a.item_scale);
    st.model = a.model;
    st.group = enc.group;
    const std::span<const double> h_prev =
        config_.recursive ? std::span<const double>(h) : h0;
    Heads heads = eval_heads(k, h_prev, features, a.model, pw, &st);
    st.v.resize(P);
    double dr = 0.0;
    for (int p = 0; p < P; ++p) {
      st.v[p] = softplus(heads.u[p]) * st.group;
      dr += heads.w[p] * basis_value(bases_[p], st.v[p]);
    }
    check_finite(dr, k, "reward uplift");
    total += dr;
    if (b.has_hidden) h = eval_hidden(k, heads, enc.bits, pw, &st);
    st.context = std::move(heads.context);
    st.h_prev = std::move(heads.h_prev);
    st.w = std::move(heads.w);
    st.u = std::move(heads.u);
    st.bits = std::move(enc.bits);
  }
  trace.output = total;
  return total;
}

void RewardModel::backward(const ForwardTrace& trace, double d_output,
                           std::span<double> grad,
                           const PositiveWeights& pw) const {
  const int P = num_bases();
  const int H = config_.hidden_dim;
  const int Q = config_.groups;
  const int F = config_.feature_dim;
  const int E = config_.embed_dim;
  const int C = F + E;

  std::vector<double> dh;  // upstream gradient w.r.t. this stage's h output
  std::vector<double> dc(C);
  std::vector<double> dc_part(C);
  std::vector<double> dh_prev(H);
  for (int k = num_stages() - 1; k >= 0; --k) {
    const Block& b = blocks_[k];
    const ForwardTrace::Stage& st = trace.stages[k];
    std::fill(dc.begin(), dc.end(), 0.0);
    std::fill(dh_prev.begin(), dh_prev.end(), 0.0);

    // d dr / d w_p = basis_p(v_p); d dr / d v_p = w_p basis_p'(v_p).
    std::vector<double> dw(P);
    for (int p = 0; p < P; ++p) {
      dw[p] = d_output * basis_value(bases_[p], st.v[p]);
      const double dv =
          d_output * st.w[p] * basis_derivative(bases_[p], st.v[p]);
      const double du = dv * st.group * sigmoid(st.u[p]);
      b.heads[p].backward(params_, st.heads[p],
                          std::span<const double>(&du, 1), grad, dc_part);
      for (int i = 0; i < C; ++i) dc[i] += dc_part[i];
      const size_t row = b.link_offset + static_cast<size_t>(p) * H;
      for (int j = 0; j < H; ++j) {
        grad[row + j] += du * st.h_prev[j] * pw.slope[row + j];
        dh_prev[j] += du * pw.value[row + j];
      }
    }
    if (P > 1) {
      double dot = 0.0;
      for (int p = 0; p < P; ++p) dot += st.w[p] * dw[p];
      std::vector<double> dz(P);
      for (int p = 0; p < P; ++p) dz[p] = st.w[p] * (dw[p] - dot);
      b.mix.backward(params_, st.mix, dz, grad, dc_part);
      for (int i = 0; i < C; ++i) dc[i] += dc_part[i];
    }
    if (b.has_hidden && !dh.empty()) {
      std::vector<double> ds(H);
      for (int i = 0; i < H; ++i) {
        ds[i] = dh[i] * (st.hidden_pre[i] > 0.0 ? 1.0 : kLeakySlope);
      }
      b.hidden.backward(params_, st.hidden, ds, grad, dc_part);
      for (int i = 0; i < C; ++i) dc[i] += dc_part[i];
      for (int i = 0; i < H; ++i) {
        const size_t brow = b.hidden_bits_offset + static_cast<size_t>(i) * Q;
        for (int q = 0; q < Q; ++q) {
          grad[brow + q] += ds[i] * st.bits[q] * pw.slope[brow + q];
        }
        const size_t hrow = b.hidden_prev_offset + static_cast<size_t>(i) * H;
        for (int j = 0; j < H; ++j) {
          grad[hrow + j] += ds[i] * st.h_prev[j] * pw.slope[hrow + j];
          dh_prev[j] += ds[i] * pw.value[hrow + j];
        }
      }
    }

    double* g_embed =
        grad.data() + b.embed_offset + static_cast<size_t>(st.model) * E;
    for (int i = 0; i < E; ++i) g_embed[i] += dc[F + i];

    if (config_.recursive && k > 0) {
      dh = dh_prev;
    } else {
      for (int i = 0; i < H; ++i) grad[h0_offset_ + i] += dh_prev[i];
    }
  }
}

double RewardModel::inference_flops_per_chain() const {
  const double H = config_.hidden_dim;
  const double Q = config_.groups;
  double flops = 0.0;
  for (const Block& b : blocks_) {
    if (num_bases() > 1) flops += b.mix.inference_flops();
    for (const Fnn& head : b.heads) flops += head.inference_flops();
    flops += 2.0 * num_bases() * H;
    if (b.has_hidden) {
      flops += b.hidden.inference_flops() + 2.0 * H * (Q + H);
    }
  }
  return flops;
}

}  // namespace cascade
