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

#include "cascade/pipeline.h"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "cascade/allocator.h"
#include "cascade/error.h"
#include "cascade/random.h"

namespace cascade {

namespace {

// Per-period true revenue, substituted into the timeline records.
double fill_true_revenue(const Bench& bench, Timeline& timeline) {
  double total = 0.0;
  for (size_t t = 0; t < timeline.decisions.size(); ++t) {
    double period_revenue = 0.0;
    const auto& decisions = timeline.decisions[t];
    for (size_t i = 0; i < decisions.size(); ++i) {
      period_revenue +=
          true_reward(bench.eval_users[bench.workload.periods[t][i]],
                      bench.chains[decisions[i]], bench.truth);
    }
    timeline.periods[t].revenue = period_revenue;
    total += period_revenue;
  }
  return total;
}

std::vector<int> all_chains(int n) {
  std::vector<int> idx(n);
  for (int j = 0; j < n; ++j) idx[j] = j;
  return idx;
}

// Reward-model inference over J chains plus two FLOPs per (request, chain)
// pair for every dual iteration and for the online decision pass.
double allocator_overhead(int requests, int num_chains, double per_chain_flops,
                          int iterations) {
  const double pairs = static_cast<double>(requests) * num_chains;
  return pairs * per_chain_flops + 2.0 * pairs * (iterations + 1);
}

}  // namespace

uint64_t stream_seed(const Scenario& scenario, Stream stream) {
  return Rng::derive(scenario.seed, static_cast<uint64_t>(stream));
}

double Bench::mean_arrivals() const {
  const int total = workload.total_requests();
  return static_cast<double>(total) /
         static_cast<double>(workload.periods.size());
}

Bench make_bench(const Scenario& scenario) {
  Bench b;
  b.scenario = scenario;
  b.cascade = CascadeConfig(scenario.stages);
  b.chains = generate_chains(b.cascade);
  if (b.chains.empty()) {
    throw ConfigError("stages: the cascade order admits no action chain");
  }
  b.costs = chain_costs(b.chains);
  b.truth.cascade = b.cascade;
  b.truth.affinity_models = scenario.workload.population.affinity_models;
  b.truth.indifferent_affinity =
      scenario.workload.population.indifferent_affinity;
  b.truth.top_e = scenario.top_e;
  const WorkloadConfig& w = scenario.workload;
  b.train_users =
      generate_population(w.train_population_size, w.population,
                          stream_seed(scenario, Stream::kTrainUsers), 0);
  b.eval_users = generate_population(
      w.population_size, w.population,
      stream_seed(scenario, Stream::kEvalUsers), w.train_population_size);
  b.workload = make_workload(w.arrivals, w.periods, w.population_size,
                             stream_seed(scenario, Stream::kWorkload));
  return b;
}

std::vector<LabeledExample> training_data(const Bench& bench) {
  const WorkloadConfig& w = bench.scenario.workload;
  return label_dataset(bench.train_users, bench.chains, bench.truth,
                       w.samples_per_user, w.label_noise,
                       stream_seed(bench.scenario, Stream::kTrainLabels));
}

std::vector<LabeledExample> evaluation_data(const Bench& bench) {
  const WorkloadConfig& w = bench.scenario.workload;
  return label_dataset(bench.eval_users, bench.chains, bench.truth,
                       w.eval_samples_per_user, w.label_noise,
                       stream_seed(bench.scenario, Stream::kEvalLabels));
}

RewardConfig reward_config(const Bench& bench) {
  RewardConfig c = bench.scenario.reward;
  c.seed = stream_seed(bench.scenario, Stream::kModelInit);
  return c;
}

TrainConfig train_config(const Bench& bench) {
  TrainConfig c = bench.scenario.train;
  c.seed = stream_seed(bench.scenario, Stream::kShuffle);
  return c;
}

RewardModel train_reward_model(const Bench& bench, const RewardConfig& config,
                               TrainResult* trace) {
  RewardModel model(bench.cascade, config);
  const std::vector<LabeledExample> data = training_data(bench);
  TrainResult result = train(model, bench.chains, data, train_config(bench));
  if (trace != nullptr) *trace = std::move(result);
  return model;
}

PredictionTable predict_users(const RewardModel& model,
                              std::span<const SyntheticUser> users,
                              std::span<const ActionChain> chains) {
  PredictionTable table;
  table.num_chains = static_cast<int>(chains.size());
  table.values.reserve(users.size() * chains.size());
  for (const SyntheticUser& u : users) {
    const std::vector<double> row = model.predict_all(u.features, chains);
    table.values.insert(table.values.end(), row.begin(), row.end());
  }
  return table;
}

CrasPlan cras_plan(const Bench& bench) {
  const CascadeConfig& cascade = bench.cascade;
  const std::vector<std::string>& names = bench.scenario.baselines.cras_models;
  if (!names.empty() &&
      static_cast<int>(names.size()) != cascade.num_action_stages()) {
    throw ConfigError("baselines.cras_models: need one model per non-fixed "
                      "stage");
  }
  std::vector<int> models;
  for (int k = 0; k < cascade.num_action_stages(); ++k) {
    int m = 0;
    if (!names.empty() && !names[k].empty()) {
      m = cascade.find_model(k, names[k]);
      if (m < 0) {
        throw ConfigError("baselines.cras_models." + std::to_string(k) +
                          ": unknown model '" + names[k] + "'");
      }
    }
    models.push_back(m);
  }
  return make_cras_plan(cascade, models);
}

namespace {

std::vector<std::vector<ActionChain>> full_options(const Bench& bench,
                                                   const CrasPlan& plan) {
  std::vector<std::vector<ActionChain>> out;
  const int num_stages = bench.cascade.num_action_stages();
  for (int k = 0; k < num_stages; ++k) {
    std::vector<ActionChain> options;
    for (const ActionChain& opt : plan.stages[k].options) {
      ActionChain full;
      for (int s = 0; s < num_stages; ++s) {
        const StageConfig& stage = bench.cascade.action_stage(s);
        StageAction a{plan.stages[s].model, median_scale(stage)};
        if (s == k) a.item_scale = opt.actions[0].item_scale;
        full.actions.push_back(a);
      }
      full.cost_flops = chain_cost(full, bench.cascade);
      full.index = static_cast<int>(options.size());
      options.push_back(std::move(full));
    }
    out.push_back(std::move(options));
  }
  return out;
}

}  // namespace

CrasModels train_cras_models(const Bench& bench,
                             std::vector<TrainResult>* traces) {
  CrasModels cras;
  cras.plan = cras_plan(bench);
  cras.full_options = full_options(bench, cras.plan);
  const WorkloadConfig& w = bench.scenario.workload;
  for (size_t k = 0; k < cras.plan.stages.size(); ++k) {
    RewardConfig rc = reward_config(bench);
    rc.seed = Rng::derive(rc.seed, 100 + k);
    RewardModel model(cras.plan.stages[k].cascade, rc);
    // Labels come from the full-cascade equivalents; the stage model sees
    // only its own single-stage chains (same indices).
    const std::vector<LabeledExample> data = label_dataset(
        bench.train_users, cras.full_options[k], bench.truth,
        w.samples_per_user, w.label_noise,
        Rng::derive(stream_seed(bench.scenario, Stream::kTrainLabels),
                    100 + k));
    TrainConfig tc = train_config(bench);
    tc.seed = Rng::derive(tc.seed, 100 + k);
    TrainResult result =
        train(model, cras.plan.stages[k].options, data, tc);
    if (traces != nullptr) traces->push_back(std::move(result));
    cras.models.push_back(std::move(model));
  }
  return cras;
}

CrasModels attach_cras_models(const Bench& bench,
                              std::vector<RewardModel> models) {
  CrasModels cras;
  cras.plan = cras_plan(bench);
  if (models.size() != cras.plan.stages.size()) {
    throw ConfigError("cras: expected " +
                      std::to_string(cras.plan.stages.size()) +
                      " stage models");
  }
  cras.full_options = full_options(bench, cras.plan);
  cras.models = std::move(models);
  return cras;
}

int find_chain(const Bench& bench, const std::string& description) {
  for (const ActionChain& c : bench.chains) {
    if (describe_chain(c, bench.cascade) == description) return c.index;
  }
  throw ConfigError("unknown chain '" + description + "'");
}

int equal_chain(const Bench& bench) {
  if (!bench.scenario.baselines.equal_chain.empty()) {
    return find_chain(bench, bench.scenario.baselines.equal_chain);
  }
  ActionChain want;
  for (int k = 0; k < bench.cascade.num_action_stages(); ++k) {
    want.actions.push_back({0, median_scale(bench.cascade.action_stage(k))});
  }
  for (const ActionChain& c : bench.chains) {
    if (c.actions == want.actions) return c.index;
  }
  throw ConfigError("baselines.equal_chain: the median chain is not valid; "
                    "set it explicitly");
}

std::vector<SweepPoint> sweep_points(const Bench& bench) {
  std::vector<SweepPoint> points;
  const double arrivals = bench.mean_arrivals();
  std::vector<int> chains;
  if (bench.scenario.sweep.equal_chains.empty()) {
    chains.push_back(equal_chain(bench));
  } else {
    for (const std::string& d : bench.scenario.sweep.equal_chains) {
      chains.push_back(find_chain(bench, d));
    }
  }
  for (int c : chains) points.push_back({c, arrivals * bench.costs[c]});
  return points;
}

double initial_lambda(const Bench& bench, const RewardModel& model,
                      std::span<const ActionChain> chains,
                      std::span<const double> costs, double budget) {
  const AllocatorConfig& a = bench.scenario.allocator;
  if (!a.lambda_auto) return a.lambda_init;
  const int n =
      std::max(1, static_cast<int>(std::lround(bench.mean_arrivals())));
  Rng rng(stream_seed(bench.scenario, Stream::kWarmup));
  AllocationProblem problem;
  problem.costs.assign(costs.begin(), costs.end());
  problem.num_requests = n;
  problem.budget = budget;
  for (int i = 0; i < n; ++i) {
    const SyntheticUser& u =
        bench.train_users[rng.below(bench.train_users.size())];
    const std::vector<double> row = model.predict_all(u.features, chains);
    problem.rewards.insert(problem.rewards.end(), row.begin(), row.end());
  }
  const double eta = auto_step_size(problem, a.eta0);
  return dual_descent(problem, 0.0, a.warmup_iterations, eta).lambda;
}

MethodResult run_greenflow(const Bench& bench, const RewardModel& model,
                           const PredictionTable& predictions, double budget,
                           std::span<const int> allowed_in,
                           const std::string& name) {
  const std::vector<int> allowed =
      allowed_in.empty()
          ? all_chains(static_cast<int>(bench.chains.size()))
          : std::vector<int>(allowed_in.begin(), allowed_in.end());
  const int num = static_cast<int>(allowed.size());
  std::vector<double> costs;
  std::vector<ActionChain> chains;
  for (int j : allowed) {
    costs.push_back(bench.costs[j]);
    chains.push_back(bench.chains[j]);
  }

  std::vector<PeriodBatch> batches;
  for (const std::vector<int>& period : bench.workload.periods) {
    PeriodBatch batch;
    batch.num_requests = static_cast<int>(period.size());
    batch.rewards.reserve(period.size() * allowed.size());
    for (int user : period) {
      const std::span<const double> row = predictions.row(user);
      for (int j : allowed) batch.rewards.push_back(row[j]);
    }
    batches.push_back(std::move(batch));
  }

  const AllocatorConfig& a = bench.scenario.allocator;
  RunConfig rc;
  rc.budget_per_period = budget;
  rc.iterations = a.iterations;
  rc.eta0 = a.eta0;
  rc.lambda_init = initial_lambda(bench, model, chains, costs, budget);
  rc.ticks_per_period = a.ticks_per_period;
  rc.threads = a.threads;

  MethodResult out;
  out.timeline = run_periods(batches, costs, rc);
  for (auto& decisions : out.timeline.decisions) {
    for (int& d : decisions) d = allowed[d];
  }
  const double revenue = fill_true_revenue(bench, out.timeline);
  const int requests = bench.workload.total_requests();
  const double overhead = allocator_overhead(
      requests, num, model.inference_flops_per_chain(), a.iterations);
  out.summary = summarize(name, budget, out.timeline, revenue, overhead);
  return out;
}

MethodResult run_equal(const Bench& bench, int chain, double budget) {
  std::vector<int> arrivals;
  for (const auto& p : bench.workload.periods) {
    arrivals.push_back(static_cast<int>(p.size()));
  }
  MethodResult out;
  out.timeline = run_baseline_equal(arrivals, chain, bench.costs, budget);
  const double revenue = fill_true_revenue(bench, out.timeline);
  out.summary = summarize("equal", budget, out.timeline, revenue, 0.0);
  return out;
}

MethodResult run_cras(const Bench& bench, const CrasModels& cras,
                      double budget) {
  const AllocatorConfig& a = bench.scenario.allocator;
  const int num_stages = static_cast<int>(cras.plan.stages.size());
  std::vector<std::vector<PeriodBatch>> stage_batches(num_stages);
  double overhead = 0.0;
  const int requests = bench.workload.total_requests();
  std::vector<double> lambda_init;
  for (int k = 0; k < num_stages; ++k) {
    const std::vector<ActionChain>& options = cras.plan.stages[k].options;
    lambda_init.push_back(initial_lambda(
        bench, cras.models[k], options, cras.plan.stages[k].option_costs,
        cras_stage_budget(cras.plan, k, budget, bench.mean_arrivals())));
    const PredictionTable table =
        predict_users(cras.models[k], bench.eval_users, options);
    for (const std::vector<int>& period : bench.workload.periods) {
      PeriodBatch batch;
      batch.num_requests = static_cast<int>(period.size());
      for (int user : period) {
        const std::span<const double> row = table.row(user);
        batch.rewards.insert(batch.rewards.end(), row.begin(), row.end());
      }
      stage_batches[k].push_back(std::move(batch));
    }
    overhead += allocator_overhead(requests, static_cast<int>(options.size()),
                                   cras.models[k].inference_flops_per_chain(),
                                   a.iterations);
  }

  RunConfig rc;
  rc.budget_per_period = budget;
  rc.iterations = a.iterations;
  rc.eta0 = a.eta0;
  rc.lambda_init = a.lambda_init;
  rc.ticks_per_period = a.ticks_per_period;
  rc.threads = a.threads;

  MethodResult out;
  out.timeline = run_baseline_cras(cras.plan, bench.cascade, bench.chains,
                                   stage_batches, bench.mean_arrivals(), rc,
                                   lambda_init);
  const double revenue = fill_true_revenue(bench, out.timeline);
  out.summary = summarize("cras", budget, out.timeline, revenue, overhead);
  return out;
}

std::vector<int> chains_with_last_model(const Bench& bench,
                                        const std::string& model_id) {
  const int last = bench.cascade.num_action_stages() - 1;
  const int m = bench.cascade.find_model(last, model_id);
  if (m < 0) throw ConfigError("unknown model '" + model_id + "'");
  std::vector<int> out;
  for (const ActionChain& c : bench.chains) {
    if (c.actions.back().model == m) out.push_back(c.index);
  }
  return out;
}

std::string summary_json(const RunSummary& s) {
  // Hand-assembled so the number formatting is the shortest round-trip form
  // and the bytes never depend on the JSON library's float printer.
  std::string out = "{\"method\": " + nlohmann::json(s.method).dump() +
                    ", \"budget\": " + format_double(s.budget) +
                    ", \"revenue_at_e\": " + format_double(s.revenue) +
                    ", \"consumed_flops\": " + format_double(s.rs_flops) +
                    ", \"overhead_flops\": " + format_double(s.overhead_flops) +
                    ", \"requests\": " + std::to_string(s.requests) +
                    ", \"periods\": " + std::to_string(s.periods) + "}";
  return out;
}

void write_chains_csv(std::ostream& out, const Bench& bench) {
  out << "index,chain,cost_flops\n";
  for (const ActionChain& c : bench.chains) {
    out << c.index << ',' << describe_chain(c, bench.cascade) << ','
        << format_double(c.cost_flops) << '\n';
  }
}

void write_workload_csv(std::ostream& out, const Workload& workload) {
  out << "period,request,user\n";
  for (size_t t = 0; t < workload.periods.size(); ++t) {
    for (size_t i = 0; i < workload.periods[t].size(); ++i) {
      out << t + 1 << ',' << i << ',' << workload.periods[t][i] << '\n';
    }
  }
}

}  // namespace cascade
