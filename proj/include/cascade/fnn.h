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

#ifndef CASCADE_FNN_H_
#define CASCADE_FNN_H_

#include <cstddef>
#include <span>
#include <vector>

namespace cascade {

inline constexpr double kLeakySlope = 0.01;

// Activations kept by Fnn::forward for the backward pass.
struct FnnTrace {
  std::vector<double> input;
  std::vector<double> pre;  // hidden pre-activations
};

// Two-layer feedforward net: in -> width (leaky linear) -> out (linear).
// The net owns no storage; its tensors live at `offset` inside a flat
// parameter buffer, laid out as W1[width][in], b1[width], W2[out][width],
// b2[out].
class Fnn {
 public:
  Fnn() = default;
  Fnn(int in, int width, int out, size_t offset)
      : in_(in), width_(width), out_(out), offset_(offset) {}

  int in() const { return in_; }
  int width() const { return width_; }
  int out() const { return out_; }
  size_t offset() const { return offset_; }
  size_t num_params() const {
    return static_cast<size_t>(width_) * (in_ + 1) +
           static_cast<size_t>(out_) * (width_ + 1);
  }
  // Two FLOPs per weight (multiply + add) for one forward evaluation.
  double inference_flops() const {
    return 2.0 * static_cast<double>(width_ * in_ + out_ * width_);
  }

  // Writes out() values to y. When trace is non-null it is filled for
  // backward().
  void forward(std::span<const double> params, std::span<const double> x,
               std::span<double> y, FnnTrace* trace) const;

  // Accumulates dL/dparams into grad and, when dx is non-empty, writes
  // dL/dx (overwriting).
  void backward(std::span<const double> params, const FnnTrace& trace,
                std::span<const double> dy, std::span<double> grad,
                std::span<double> dx) const;

  // Weights ~ U(-init_range, init_range), biases zero.
  template <class Rng>
  void initialize(std::span<double> params, Rng& rng, double init_range) const;

 private:
  size_t w1() const { return offset_; }
  size_t b1() const { return w1() + static_cast<size_t>(width_) * in_; }
  size_t w2() const { return b1() + width_; }
  size_t b2() const { return w2() + static_cast<size_t>(out_) * width_; }

  int in_ = 0;
  int width_ = 0;
  int out_ = 0;
  size_t offset_ = 0;
};

template <class Rng>
void Fnn::initialize(std::span<double> params, Rng& rng,
                     double init_range) const {
  auto uniform = [&] {
    // 53-bit mantissa from the generator; independent of libstdc++'s
    // distribution implementation.
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    return (2.0 * u - 1.0) * init_range;
  };
  for (size_t i = w1(); i < b1(); ++i) params[i] = uniform();
  for (size_t i = b1(); i < w2(); ++i) params[i] = 0.0;
  for (size_t i = w2(); i < b2(); ++i) params[i] = uniform();
  for (size_t i = b2(); i < b2() + out_; ++i) params[i] = 0.0;
}

}  // namespace cascade

#endif  // CASCADE_FNN_H_
