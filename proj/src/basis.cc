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

#include "cascade/basis.h"

#include <cmath>

namespace cascade {

double softplus(double x) {
  // log(1 + e^x) without overflow for large |x|.
  return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double basis_value(Basis b, double x) {
  switch (b) {
    case Basis::kTanh:
      return std::tanh(x);
    case Basis::kLog1p:
      return std::log1p(x);
    case Basis::kSoftSign:
      return x / std::sqrt(1.0 + x * x);
    case Basis::kSigmoid:
      return sigmoid(x);
    case Basis::kIdentity:
      return x;
  }
  return 0.0;
}

double basis_derivative(Basis b, double x) {
  switch (b) {
    case Basis::kTanh: {
      const double t = std::tanh(x);
      return 1.0 - t * t;
    }
    case Basis::kLog1p:
      return 1.0 / (1.0 + x);
    case Basis::kSoftSign: {
      const double r = 1.0 / std::sqrt(1.0 + x * x);
      return r * r * r;
    }
    case Basis::kSigmoid: {
      const double s = sigmoid(x);
      return s * (1.0 - s);
    }
    case Basis::kIdentity:
      return 1.0;
  }
  return 0.0;
}

std::string_view basis_name(Basis b) {
  switch (b) {
    case Basis::kTanh:
      return "tanh";
    case Basis::kLog1p:
      return "log1p";
    case Basis::kSoftSign:
      return "softsign";
    case Basis::kSigmoid:
      return "sigmoid";
    case Basis::kIdentity:
      return "identity";
  }
  return "?";
}

}  // namespace cascade
