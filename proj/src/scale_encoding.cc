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

#include "cascade/scale_encoding.h"

#include <algorithm>
#include <string>

#include "cascade/error.h"

namespace cascade {

ScaleEncoder::ScaleEncoder(std::vector<int64_t> scales, int groups)
    : scales_(std::move(scales)), groups_(groups) {
  const int n = static_cast<int>(scales_.size());
  if (groups_ < 1 || groups_ > n) {
    throw DomainError("scale encoding: need 1 <= Q <= |scale set| (Q=" +
                      std::to_string(groups_) + ", |N|=" + std::to_string(n) +
                      ")");
  }
  const int base = n / groups_;
  const int extra = n % groups_;
  group_of_index_.reserve(n);
  for (int g = 0; g < groups_; ++g) {
    const int size = base + (g < extra ? 1 : 0);
    for (int i = 0; i < size; ++i) group_of_index_.push_back(g + 1);
  }
}

std::vector<int64_t> ScaleEncoder::group_boundaries() const {
  std::vector<int64_t> out;
  for (size_t i = 0; i < scales_.size(); ++i) {
    if (i == 0 || group_of_index_[i] != group_of_index_[i - 1]) {
      out.push_back(scales_[i]);
    }
  }
  return out;
}

int ScaleEncoder::group_of(int64_t n) const {
  auto it = std::lower_bound(scales_.begin(), scales_.end(), n);
  if (it == scales_.end() || *it != n) {
    throw DomainError("scale encoding: item scale " + std::to_string(n) +
                      " is not in the scale set");
  }
  return group_of_index_[it - scales_.begin()];
}

MultiHotScaleEncoding ScaleEncoder::encode(int64_t n) const {
  return encode_group(group_of(n));
}

MultiHotScaleEncoding ScaleEncoder::encode_group(int group) const {
  MultiHotScaleEncoding enc;
  enc.group = group;
  enc.bits.assign(groups_, 0.0);
  std::fill(enc.bits.begin(), enc.bits.begin() + group, 1.0);
  return enc;
}

MultiHotScaleEncoding encode_scale(int64_t n, const StageConfig& stage, int q) {
  return ScaleEncoder(stage.scales, q).encode(n);
}

}  // namespace cascade
