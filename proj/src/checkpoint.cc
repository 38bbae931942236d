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

#include "cascade/checkpoint.h"

#include <bit>
#include <cstring>
#include <fstream>

#include "cascade/error.h"

namespace cascade {

static_assert(std::endian::native == std::endian::little,
              "checkpoint I/O assumes a little-endian host");

namespace {

constexpr char kMagic[8] = {'C', 'A', 'S', 'C', 'R', 'W', 'D', '1'};

void put_u64(std::ofstream& out, uint64_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

uint64_t get_u64(std::ifstream& in, const std::string& path) {
  uint64_t v = 0;
  if (!in.read(reinterpret_cast<char*>(&v), sizeof v)) {
    throw IoError("checkpoint " + path + ": truncated header");
  }
  return v;
}

}  // namespace

void save_checkpoint(const RewardModel& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("checkpoint: cannot open " + path + " for writing");
  const RewardConfig& c = model.config();
  out.write(kMagic, sizeof kMagic);
  put_u64(out, c.feature_dim);
  put_u64(out, c.hidden_dim);
  put_u64(out, c.groups);
  put_u64(out, model.num_bases());
  put_u64(out, model.num_stages());
  put_u64(out, c.seed);
  put_u64(out, c.fnn_width);
  put_u64(out, c.embed_dim);
  put_u64(out, (c.recursive ? 1u : 0u) | (c.multi_basis ? 2u : 0u));
  for (int k = 0; k < model.num_stages(); ++k) put_u64(out, model.num_models(k));

  const auto tensors = model.tensors();
  put_u64(out, tensors.size());
  const std::span<const double> params = model.params();
  for (const auto& t : tensors) {
    put_u64(out, t.name.size());
    out.write(t.name.data(), static_cast<std::streamsize>(t.name.size()));
    put_u64(out, t.size);
    out.write(reinterpret_cast<const char*>(params.data() + t.offset),
              static_cast<std::streamsize>(t.size * sizeof(double)));
  }
  if (!out) throw IoError("checkpoint: write failed for " + path);
}

RewardModel load_checkpoint(const std::string& path,
                            const CascadeConfig& cascade) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("checkpoint: cannot open " + path);
  char magic[8];
  if (!in.read(magic, sizeof magic) ||
      std::memcmp(magic, kMagic, sizeof magic) != 0) {
    throw IoError("checkpoint " + path + ": bad magic");
  }
  RewardConfig c;
  c.feature_dim = static_cast<int>(get_u64(in, path));
  c.hidden_dim = static_cast<int>(get_u64(in, path));
  c.groups = static_cast<int>(get_u64(in, path));
  const uint64_t num_bases = get_u64(in, path);
  const uint64_t num_stages = get_u64(in, path);
  c.seed = get_u64(in, path);
  c.fnn_width = static_cast<int>(get_u64(in, path));
  c.embed_dim = static_cast<int>(get_u64(in, path));
  const uint64_t flags = get_u64(in, path);
  c.recursive = (flags & 1u) != 0;
  c.multi_basis = (flags & 2u) != 0;

  if (num_stages != static_cast<uint64_t>(cascade.num_action_stages())) {
    throw ConfigError("checkpoint " + path + ": has " +
                      std::to_string(num_stages) +
                      " stages, scenario has " +
                      std::to_string(cascade.num_action_stages()));
  }
  for (uint64_t k = 0; k < num_stages; ++k) {
    const uint64_t pool = get_u64(in, path);
    if (pool != cascade.action_stage(static_cast<int>(k)).models.size()) {
      throw ConfigError("checkpoint " + path + ": model pool of stage " +
                        std::to_string(k + 1) + " does not match scenario");
    }
  }

  RewardModel model(cascade, c);
  if (static_cast<uint64_t>(model.num_bases()) != num_bases) {
    throw ConfigError("checkpoint " + path + ": basis count mismatch");
  }
  const auto tensors = model.tensors();
  if (get_u64(in, path) != tensors.size()) {
    throw ConfigError("checkpoint " + path + ": tensor count mismatch");
  }
  std::span<double> params = model.params();
  for (const auto& t : tensors) {
    const uint64_t name_len = get_u64(in, path);
    std::string name(name_len, '\0');
    in.read(name.data(), static_cast<std::streamsize>(name_len));
    const uint64_t size = get_u64(in, path);
    if (name != t.name || size != t.size) {
      throw ConfigError("checkpoint " + path + ": expected tensor " + t.name +
                        "[" + std::to_string(t.size) + "], found " + name +
                        "[" + std::to_string(size) + "]");
    }
    if (!in.read(reinterpret_cast<char*>(params.data() + t.offset),
                 static_cast<std::streamsize>(size * sizeof(double)))) {
      throw IoError("checkpoint " + path + ": truncated tensor " + name);
    }
  }
  return model;
}

}  // namespace cascade
