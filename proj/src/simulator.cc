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

#include "cascade/simulator.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cascade/error.h"
#include "cascade/random.h"

namespace cascade {

namespace {

void check_ratios(std::span<const double> ratios, const char* what) {
  double sum = 0.0;
  for (double r : ratios) {
    if (!(r >= 0.0)) {
      throw ConfigError(std::string(what) + ": ratios must be >= 0");
    }
    sum += r;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw ConfigError(std::string(what) + ": ratios must sum to 1");
  }
}

// Fills a vector with `counts[g]` copies of g and shuffles it.
std::vector<int> shuffled_labels(std::span<const int> counts, Rng& rng) {
  std::vector<int> labels;
  for (size_t g = 0; g < counts.size(); ++g) {
    labels.insert(labels.end(), counts[g], static_cast<int>(g));
  }
  for (size_t i = labels.size(); i > 1; --i) {
    std::swap(labels[i - 1], labels[rng.below(i)]);
  }
  return labels;
}

}  // namespace

std::vector<int> apportion(int total, std::span<const double> ratios) {
  std::vector<int> counts(ratios.size(), 0);
  std::vector<double> remainder(ratios.size());
  int assigned = 0;
  for (size_t g = 0; g < ratios.size(); ++g) {
    const double quota = ratios[g] * total;
    counts[g] = static_cast<int>(std::floor(quota + 1e-9));
    remainder[g] = quota - counts[g];
    assigned += counts[g];
  }
  std::vector<size_t> order(ratios.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    return remainder[a] > remainder[b];
  });
  for (size_t k = 0; assigned < total; k = (k + 1) % order.size()) {
    ++counts[order[k]];
    ++assigned;
  }
  return counts;
}

std::vector<SyntheticUser> generate_population(int size,
                                               const PopulationConfig& config,
                                               uint64_t seed, int first_id) {
  if (size < 1) throw ConfigError("population: size must be >= 1");
  const int num_models = static_cast<int>(config.affinity_models.size());
  if (static_cast<int>(config.affinity_ratios.size()) != num_models + 1) {
    throw ConfigError("population: affinity_ratios needs one entry per "
                      "affinity model plus one for indifferent users");
  }
  check_ratios(config.affinity_ratios, "population.affinity_ratios");
  check_ratios(config.activity_ratios, "population.activity_ratios");
  const int needed = 3 + 2 + num_models + num_models + 1;
  if (config.feature_dim < needed) {
    throw ConfigError("population: feature_dim must be >= " +
                      std::to_string(needed));
  }
  for (const ActivityProfile& p : config.activity) {
    if (!(p.alpha_lo > 0.0) || p.alpha_hi < p.alpha_lo || !(p.beta_lo > 0.0) ||
        p.beta_hi < p.beta_lo) {
      throw ConfigError("population: activity profiles need 0 < lo <= hi");
    }
  }

  Rng rng(seed);
  const std::vector<int> groups =
      shuffled_labels(apportion(size, config.affinity_ratios), rng);
  const std::vector<int> activities =
      shuffled_labels(apportion(size, config.activity_ratios), rng);

  double alpha_scale = 0.0, beta_scale = 0.0;
  for (const ActivityProfile& p : config.activity) {
    alpha_scale = std::max(alpha_scale, p.alpha_hi);
    beta_scale = std::max(beta_scale, p.beta_hi);
  }

  std::vector<SyntheticUser> users(size);
  for (int u = 0; u < size; ++u) {
    SyntheticUser& user = users[u];
    user.id = first_id + u;
    user.activity = static_cast<Activity>(activities[u]);
    const ActivityProfile& prof = config.activity[activities[u]];
    user.alpha = rng.uniform(prof.alpha_lo, prof.alpha_hi);
    user.beta = rng.uniform(prof.beta_lo, prof.beta_hi);
    user.affinity_group = groups[u];
    user.affinity.resize(num_models);
    for (int m = 0; m < num_models; ++m) {
      if (groups[u] == num_models) {
        user.affinity[m] = config.indifferent_affinity;
      } else {
        user.affinity[m] = groups[u] == m ? config.suited_affinity
                                          : config.unsuited_affinity;
      }
    }

    std::vector<double>& f = user.features;
    f.assign(config.feature_dim, 0.0);
    size_t pos = 0;
    f[pos + activities[u]] = 1.0;
    pos += 3;
    f[pos++] = user.alpha;
    f[pos++] = user.beta;
    for (int m = 0; m < num_models; ++m) f[pos++] = user.affinity[m];
    f[pos + groups[u]] = 1.0;
    for (double& e : f) e += config.feature_noise * rng.normal();
    // Noise is added to the latent values themselves; the fixed rescaling
    // afterwards only conditions the inputs and hides no information.
    f[3] /= alpha_scale;
    f[4] /= beta_scale;
  }
  return users;
}

double true_reward(const SyntheticUser& user, const ActionChain& chain,
                   const GroundTruth& truth) {
  const CascadeConfig& cascade = truth.cascade;
  const int num_stages = cascade.num_action_stages();
  double saturation = 1.0;
  for (int k = 0; k < num_stages; ++k) {
    const StageConfig& stage = cascade.action_stage(k);
    const double x = static_cast<double>(chain.actions[k].item_scale) /
                     static_cast<double>(stage.scales.back());
    saturation *= 1.0 - std::exp(-user.beta * x);
  }

  // Affinity of the ranking model: the last stage of the cascade, whether or
  // not it is part of the action space.
  const StageConfig& last = cascade.stages().back();
  const std::string& model_id =
      last.fixed ? last.models.front().id
                 : last.models[chain.actions.back().model].id;
  double gamma = truth.indifferent_affinity;
  for (size_t m = 0; m < truth.affinity_models.size(); ++m) {
    if (truth.affinity_models[m] == model_id && m < user.affinity.size()) {
      gamma = user.affinity[m];
    }
  }
  const double r = user.alpha * gamma * saturation;
  return std::clamp(r, 0.0, truth.top_e);
}

std::vector<LabeledExample> label_dataset(
    std::span<const SyntheticUser> population,
    std::span<const ActionChain> chains, const GroundTruth& truth,
    int samples_per_user, double noise, uint64_t seed) {
  if (samples_per_user < 1) {
    throw ConfigError("label_dataset: samples_per_user must be >= 1");
  }
  if (chains.empty()) throw ConfigError("label_dataset: no chains");
  const int per_user =
      std::min(samples_per_user, static_cast<int>(chains.size()));
  Rng rng(seed);
  std::vector<LabeledExample> out;
  out.reserve(population.size() * per_user);
  std::vector<int> pool(chains.size());
  for (const SyntheticUser& user : population) {
    std::iota(pool.begin(), pool.end(), 0);
    // Partial Fisher-Yates: the first per_user slots are the sample.
    for (int s = 0; s < per_user; ++s) {
      const size_t pick = s + rng.below(pool.size() - s);
      std::swap(pool[s], pool[pick]);
    }
    for (int s = 0; s < per_user; ++s) {
      LabeledExample ex;
      ex.features = user.features;
      ex.chain = pool[s];
      const double clean = true_reward(user, chains[pool[s]], truth);
      const double eps = noise > 0.0 ? noise * rng.normal() : 0.0;
      ex.reward = std::max(0.0, clean + eps);
      ex.field = static_cast<int>(user.activity);
      out.push_back(std::move(ex));
    }
  }
  return out;
}

int Workload::total_requests() const {
  int total = 0;
  for (const auto& p : periods) total += static_cast<int>(p.size());
  return total;
}

Workload make_workload(std::span<const int> arrivals, int num_periods,
                       int population_size, uint64_t seed) {
  if (num_periods < 1) throw ConfigError("workload: periods must be >= 1");
  if (population_size < 1) {
    throw ConfigError("workload: population size must be >= 1");
  }
  if (arrivals.empty() ||
      (arrivals.size() != 1 &&
       arrivals.size() != static_cast<size_t>(num_periods))) {
    throw ConfigError("workload: arrivals must be one value or one per period");
  }
  Workload w;
  w.seed = seed;
  Rng rng(seed);
  for (int t = 0; t < num_periods; ++t) {
    const int n = arrivals.size() == 1 ? arrivals[0] : arrivals[t];
    if (n < 0) throw ConfigError("workload: arrivals must be >= 0");
    std::vector<int> period(n);
    for (int& u : period) u = static_cast<int>(rng.below(population_size));
    w.periods.push_back(std::move(period));
  }
  return w;
}

double revenue_at_e(std::span<const std::vector<int>> decisions,
                    const Workload& workload,
                    std::span<const SyntheticUser> users,
                    std::span<const ActionChain> chains,
                    const GroundTruth& truth) {
  if (!(truth.top_e >= 1.0)) throw ConfigError("revenue@e: e must be >= 1");
  double total = 0.0;
  for (size_t t = 0; t < decisions.size(); ++t) {
    for (size_t i = 0; i < decisions[t].size(); ++i) {
      total += true_reward(users[workload.periods[t][i]],
                           chains[decisions[t][i]], truth);
    }
  }
  return total;
}

}  // namespace cascade
