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

// Reward model checkpoint format (all integers u64, all reals f64, both
// little-endian):
//
//   magic    "CASCRWD1" (8 bytes)
//   F H Q P K seed width embed_dim flags      flags: bit0 recursive,
//                                                    bit1 multi_basis
//   pool_size[K]                              models per non-fixed stage
//   tensor_count
//   tensor_count x { name_len, name bytes, size, f64[size] }
//
// Tensors appear in RewardModel::tensors() order: h0, then per stage the
// model embedding table, fnn0 (mixture, only when P > 1), fnn1..fnnP, the
// link from the previous hidden state to every head (P x H) and, on stages
// that feed a next stage, fnn_h, hidden_bits (H x Q) and hidden_prev (H x H).
// Each FNN is stored as W1[width][in], b1[width], W2[out][width], b2[out].

#ifndef CASCADE_CHECKPOINT_H_
#define CASCADE_CHECKPOINT_H_

#include <string>

#include "cascade/chain.h"
#include "cascade/reward_model.h"

namespace cascade {

void save_checkpoint(const RewardModel& model, const std::string& path);

// Rebuilds the layout from the header and `cascade` (for the scale sets) and
// fills the parameters. Throws IoError / ConfigError on any mismatch.
RewardModel load_checkpoint(const std::string& path,
                            const CascadeConfig& cascade);

}  // namespace cascade

#endif  // CASCADE_CHECKPOINT_H_
