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

#ifndef CASCADE_SCALE_ENCODING_H_
#define CASCADE_SCALE_ENCODING_H_

#include <cstdint>
#include <span>
#include <vector>

#include "cascade/chain.h"

namespace cascade {

// Prefix-pattern multi-hot code of an item scale: the first `group` bits are
// 1, the rest 0. Bits are stored as doubles so they feed networks directly.
struct MultiHotScaleEncoding {
  std::vector<double> bits;
  int group = 0;  // 1-based group index == number of leading ones
};

// Splits a sorted scale set into Q contiguous groups of equal count. When the
// count does not divide evenly the lower groups take one extra value each.
class ScaleEncoder {
 public:
  ScaleEncoder() = default;
  // Throws DomainError when groups < 1 or groups > scales.size().
  ScaleEncoder(std::vector<int64_t> scales, int groups);

  int groups() const { return groups_; }
  const std::vector<int64_t>& scales() const { return scales_; }
  // First scale of each group, ascending.
  std::vector<int64_t> group_boundaries() const;

  // Throws DomainError when n is not in the scale set.
  int group_of(int64_t n) const;
  MultiHotScaleEncoding encode(int64_t n) const;
  MultiHotScaleEncoding encode_group(int group) const;

 private:
  std::vector<int64_t> scales_;
  std::vector<int> group_of_index_;
  int groups_ = 0;
};

MultiHotScaleEncoding encode_scale(int64_t n, const StageConfig& stage, int q);

}  // namespace cascade

#endif  // CASCADE_SCALE_ENCODING_H_
