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

// Synthetic users and ground truth for the cascade.
//
// Each user has an activity level, a saturation amplitude alpha and rate
// beta, and an affinity gamma per ranking model. The expected number of
// clicks among the top-e exposed items when the user is served by a chain is
//
//   r* = alpha * gamma[m_K] * prod_k (1 - exp(-beta * n_k / max N_k))
//
// clamped to [0, e], where the product runs over the non-fixed stages and
// m_K is the model of the last non-fixed stage. The reward model only ever
// sees the user's noisy feature vector.

#ifndef CASCADE_SIMULATOR_H_
#define CASCADE_SIMULATOR_H_

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "cascade/chain.h"
#include "cascade/trainer.h"

namespace cascade {

enum class Activity { kLow = 0, kMid = 1, kHigh = 2 };

struct SyntheticUser {
  int id = 0;
  Activity activity = Activity::kMid;
  double alpha = 1.0;
  double beta = 1.0;
  int affinity_group = 0;       // index into affinity_models, or == size
                                // for "indifferent"
  std::vector<double> affinity;  // gamma per affinity model
  std::vector<double> features;  // the only field the reward model sees
};

struct ActivityProfile {
  double alpha_lo = 1.0, alpha_hi = 1.0;
  double beta_lo = 1.0, beta_hi = 1.0;
};

struct PopulationConfig {
  // Models of the ranking stage users may be suited to, and the share of
  // users suited to each, followed by the share of indifferent users.
  std::vector<std::string> affinity_models = {"DIN", "DIEN"};
  std::vector<double> affinity_ratios = {0.1, 0.3, 0.6};
  std::array<double, 3> activity_ratios = {0.3, 0.5, 0.2};
  std::array<ActivityProfile, 3> activity = {
      ActivityProfile{1.0, 3.0, 3.0, 5.0},
      ActivityProfile{3.0, 6.0, 1.5, 3.0},
      ActivityProfile{8.0, 14.0, 0.5, 1.5}};
  double suited_affinity = 1.0;
  double unsuited_affinity = 0.8;
  double indifferent_affinity = 0.9;
  double feature_noise = 0.1;
  int feature_dim = 12;
};

struct GroundTruth {
  CascadeConfig cascade;
  std::vector<std::string> affinity_models;
  double indifferent_affinity = 0.9;
  double top_e = 20.0;
};

// Group sizes are apportioned by largest remainder, so size=1000 with ratios
// (0.1, 0.3, 0.6) gives exactly (100, 300, 600). Deterministic in the seed.
std::vector<SyntheticUser> generate_population(int size,
                                               const PopulationConfig& config,
                                               uint64_t seed,
                                               int first_id = 0);

// Largest-remainder apportionment of `total` items over `ratios`; ties go to
// the lower index.
std::vector<int> apportion(int total, std::span<const double> ratios);

double true_reward(const SyntheticUser& user, const ActionChain& chain,
                   const GroundTruth& truth);

// samples_per_user chains per user, drawn uniformly without replacement,
// labelled r* + N(0, noise^2) clamped at 0.
std::vector<LabeledExample> label_dataset(
    std::span<const SyntheticUser> population,
    std::span<const ActionChain> chains, const GroundTruth& truth,
    int samples_per_user, double noise, uint64_t seed);

// Requests arriving in each period; every request is a user index.
struct Workload {
  uint64_t seed = 0;
  std::vector<std::vector<int>> periods;
  int total_requests() const;
};

// arrivals[t] requests in period t (a single entry means constant), users
// drawn uniformly with replacement from a population of `population_size`.
Workload make_workload(std::span<const int> arrivals, int num_periods,
                       int population_size, uint64_t seed);

// Sum of r* over the assigned chains of a period timeline.
double revenue_at_e(std::span<const std::vector<int>> decisions,
                    const Workload& workload,
                    std::span<const SyntheticUser> users,
                    std::span<const ActionChain> chains,
                    const GroundTruth& truth);

}  // namespace cascade

#endif  // CASCADE_SIMULATOR_H_
