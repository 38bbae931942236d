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

#ifndef CASCADE_BASIS_H_
#define CASCADE_BASIS_H_

#include <array>
#include <string_view>

namespace cascade {

// Scalar basis functions applied to the non-negative pre-activations v_p.
// Every member is non-decreasing and concave on [0, inf). ln is shifted to
// ln(1 + x) so it is defined at 0.
enum class Basis { kTanh, kLog1p, kSoftSign, kSigmoid, kIdentity };

inline constexpr std::array<Basis, 5> kDefaultBasisSet = {
    Basis::kTanh, Basis::kLog1p, Basis::kSoftSign, Basis::kSigmoid,
    Basis::kIdentity};

double basis_value(Basis b, double x);
double basis_derivative(Basis b, double x);
std::string_view basis_name(Basis b);

// Numerically stable helpers shared by the networks.
double softplus(double x);
double sigmoid(double x);

}  // namespace cascade

#endif  // CASCADE_BASIS_H_
