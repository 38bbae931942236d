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

#include "cascade/fnn.h"

#include <algorithm>
#include <cassert>

namespace cascade {

namespace {

inline double leaky(double x) { return x > 0.0 ? x : kLeakySlope * x; }
inline double leaky_grad(double x) { return x > 0.0 ? 1.0 : kLeakySlope; }

}  // namespace

void Fnn::forward(std::span<const double> params, std::span<const double> x,
                  std::span<double> y, FnnTrace* trace) const {
  assert(static_cast<int>(x.size()) == in_);
  assert(static_cast<int>(y.size()) == out_);
  double hidden[256];
  double pre[256];
  assert(width_ <= 256);

  const double* w1p = params.data() + w1();
  const double* b1p = params.data() + b1();
  for (int j = 0; j < width_; ++j) {
    const double* row = w1p + static_cast<size_t>(j) * in_;
    double acc = b1p[j];
    for (int i = 0; i < in_; ++i) acc += row[i] * x[i];
    pre[j] = acc;
    hidden[j] = leaky(acc);
  }
  const double* w2p = params.data() + w2();
  const double* b2p = params.data() + b2();
  for (int o = 0; o < out_; ++o) {
    const double* row = w2p + static_cast<size_t>(o) * width_;
    double acc = b2p[o];
    for (int j = 0; j < width_; ++j) acc += row[j] * hidden[j];
    y[o] = acc;
  }
  if (trace != nullptr) {
    trace->input.assign(x.begin(), x.end());
    trace->pre.assign(pre, pre + width_);
  }
}

void Fnn::backward(std::span<const double> params, const FnnTrace& trace,
                   std::span<const double> dy, std::span<double> grad,
                   std::span<double> dx) const {
  assert(static_cast<int>(dy.size()) == out_);
  double dhidden[256];
  double hidden[256];
  for (int j = 0; j < width_; ++j) {
    hidden[j] = leaky(trace.pre[j]);
    dhidden[j] = 0.0;
  }

  const double* w2p = params.data() + w2();
  double* gw2 = grad.data() + w2();
  double* gb2 = grad.data() + b2();
  for (int o = 0; o < out_; ++o) {
    const double g = dy[o];
    if (g == 0.0) continue;
    gb2[o] += g;
    const double* row = w2p + static_cast<size_t>(o) * width_;
    double* grow = gw2 + static_cast<size_t>(o) * width_;
    for (int j = 0; j < width_; ++j) {
      grow[j] += g * hidden[j];
      dhidden[j] += g * row[j];
    }
  }

  const double* w1p = params.data() + w1();
  double* gw1 = grad.data() + w1();
  double* gb1 = grad.data() + b1();
  if (!dx.empty()) std::fill(dx.begin(), dx.end(), 0.0);
  for (int j = 0; j < width_; ++j) {
    const double dpre = dhidden[j] * leaky_grad(trace.pre[j]);
    if (dpre == 0.0) continue;
    gb1[j] += dpre;
    const double* row = w1p + static_cast<size_t>(j) * in_;
    double* grow = gw1 + static_cast<size_t>(j) * in_;
    for (int i = 0; i < in_; ++i) grow[i] += dpre * trace.input[i];
    if (!dx.empty()) {
      for (int i = 0; i < in_; ++i) dx[i] += dpre * row[i];
    }
  }
}

}  // namespace cascade
