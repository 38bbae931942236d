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

#include "cascade/baselines.h"

#include <algorithm>
#include <map>
#include <numeric>

#include "cascade/error.h"

namespace cascade {

Timeline run_baseline_equal(std::span<const int> arrivals, int fixed_chain,
                            std::span<const double> costs,
                            double budget_per_period) {
  if (fixed_chain < 0 || fixed_chain >= static_cast<int>(costs.size())) {
    throw ConfigError("equal: fixed chain " + std::to_string(fixed_chain) +
                      " is not in the chain set");
  }
  Timeline timeline;
  for (size_t t = 0; t < arrivals.size(); ++t) {
    PeriodRecord rec;
    rec.period = static_cast<int>(t) + 1;
    rec.requests = arrivals[t];
    rec.budget_flops = budget_per_period;
    rec.consumed_flops = arrivals[t] * costs[fixed_chain];
    timeline.periods.push_back(rec);
    timeline.decisions.emplace_back(arrivals[t], fixed_chain);
    timeline.decision_lambda.emplace_back(arrivals[t], 0.0);
    if (rec.consumed_flops > budget_per_period) {
      timeline.log.push_back("period " + std::to_string(rec.period) +
                             ": equal overshoots budget by " +
                             format_double(rec.consumed_flops -
                                           budget_per_period) +
                             " FLOPs");
    }
  }
  return timeline;
}

std::vector<double> cras_budget_shares(std::span<const double> stage_costs) {
  const double total =
      std::accumulate(stage_costs.begin(), stage_costs.end(), 0.0);
  if (!(total > 0.0)) throw ConfigError("cras: stage costs must be positive");
  std::vector<double> shares;
  for (double c : stage_costs) shares.push_back(c / total);
  return shares;
}

int64_t median_scale(const StageConfig& stage) {
  return stage.scales[(stage.scales.size() - 1) / 2];
}

CrasPlan make_cras_plan(const CascadeConfig& cascade,
                        std::span<const int> models) {
  const int num_stages = cascade.num_action_stages();
  if (static_cast<int>(models.size()) != num_stages) {
    throw ConfigError("cras: need one model per non-fixed stage");
  }
  CrasPlan plan;
  plan.fixed_cost = cascade.fixed_cost();
  std::vector<double> medians;
  for (int k = 0; k < num_stages; ++k) {
    const StageConfig& s = cascade.action_stage(k);
    if (models[k] < 0 || models[k] >= static_cast<int>(s.models.size())) {
      throw ConfigError("cras: model index out of range at stage " +
                        std::to_string(s.stage_index));
    }
    medians.push_back(s.models[models[k]].flops_per_item *
                      static_cast<double>(median_scale(s)));
  }
  const std::vector<double> shares = cras_budget_shares(medians);

  for (int k = 0; k < num_stages; ++k) {
    CrasStagePlan sp;
    sp.stage = k;
    sp.model = models[k];
    sp.median_cost = medians[k];
    sp.share = shares[k];
    std::vector<StageConfig> stages = cascade.stages();
    for (int other = 0; other < num_stages; ++other) {
      StageConfig& s = stages[cascade.action_stages()[other]];
      s.models = {s.models[models[other]]};
      if (other != k) {
        s.scales = {median_scale(s)};
        s.fixed = true;
      }
    }
    sp.cascade = CascadeConfig(std::move(stages));
    sp.options = generate_chains(sp.cascade);
    for (const ActionChain& c : sp.options) {
      sp.option_costs.push_back(sp.cascade.stage_cost(0, c.actions[0]));
    }
    plan.stages.push_back(std::move(sp));
  }
  return plan;
}

int compose_chain(const CrasPlan& plan, const CascadeConfig& cascade,
                  std::span<const ActionChain> chains,
                  std::span<const int> option_per_stage) {
  if (option_per_stage.size() != plan.stages.size()) {
    throw ConfigError("cras: need one option per stage");
  }
  ActionChain composed;
  int64_t prev_scale = -1;
  int k = 0;
  for (const StageConfig& s : cascade.stages()) {
    if (s.fixed) {
      prev_scale = s.scales.front();
      continue;
    }
    const CrasStagePlan& sp = plan.stages[k];
    if (option_per_stage[k] < 0 ||
        option_per_stage[k] >= static_cast<int>(sp.options.size())) {
      throw ConfigError("cras: stage " + std::to_string(k + 1) +
                        " option index out of range");
    }
    StageAction a;
    a.model = sp.model;
    a.item_scale = sp.options[option_per_stage[k]].actions[0].item_scale;
    if (prev_scale >= 0 && a.item_scale > prev_scale) {
      auto it = std::upper_bound(s.scales.begin(), s.scales.end(), prev_scale);
      a.item_scale = *std::prev(it);
    }
    prev_scale = a.item_scale;
    composed.actions.push_back(a);
    ++k;
  }
  for (const ActionChain& c : chains) {
    if (c.actions == composed.actions) return c.index;
  }
  throw ConfigError("cras: composed chain " +
                    describe_chain(composed, cascade) +
                    " is not in the chain set");
}

double cras_stage_budget(const CrasPlan& plan, int k, double budget,
                         double expected_requests_per_period) {
  const double variable_budget =
      budget - expected_requests_per_period * plan.fixed_cost;
  if (!(variable_budget > 0.0)) {
    throw ConfigError("cras: budget does not cover the fixed stages");
  }
  return plan.stages[k].share * variable_budget;
}

Timeline run_baseline_cras(const CrasPlan& plan, const CascadeConfig& cascade,
                           std::span<const ActionChain> chains,
                           std::span<const std::vector<PeriodBatch>> stage_batches,
                           double expected_requests_per_period,
                           const RunConfig& config,
                           std::span<const double> stage_lambda_init) {
  const int num_stages = static_cast<int>(plan.stages.size());
  if (static_cast<int>(stage_batches.size()) != num_stages) {
    throw ConfigError("cras: need batches for every stage");
  }
  if (!stage_lambda_init.empty() &&
      static_cast<int>(stage_lambda_init.size()) != num_stages) {
    throw ConfigError("cras: need one initial price per stage");
  }

  std::vector<Timeline> per_stage;
  for (int k = 0; k < num_stages; ++k) {
    RunConfig rc = config;
    rc.budget_per_period = cras_stage_budget(
        plan, k, config.budget_per_period, expected_requests_per_period);
    if (!stage_lambda_init.empty()) rc.lambda_init = stage_lambda_init[k];
    per_stage.push_back(
        run_periods(stage_batches[k], plan.stages[k].option_costs, rc));
  }

  // Compose; cache by the tuple of per-stage picks.
  std::map<std::vector<int>, int> memo;
  Timeline out;
  const size_t num_periods = stage_batches[0].size();
  for (size_t t = 0; t < num_periods; ++t) {
    PeriodRecord rec;
    rec.period = static_cast<int>(t) + 1;
    rec.budget_flops = config.budget_per_period;
    const int n = stage_batches[0][t].num_requests;
    rec.requests = n;
    std::vector<int> decisions(n);
    std::vector<int> picks(num_stages);
    for (int i = 0; i < n; ++i) {
      for (int k = 0; k < num_stages; ++k) {
        picks[k] = per_stage[k].decisions[t][i];
      }
      auto it = memo.find(picks);
      if (it == memo.end()) {
        it = memo.emplace(picks, compose_chain(plan, cascade, chains, picks))
                 .first;
      }
      decisions[i] = it->second;
      rec.consumed_flops += chains[it->second].cost_flops;
    }
    for (int k = 0; k < num_stages; ++k) {
      rec.solver_iterations += per_stage[k].periods[t].solver_iterations;
    }
    rec.lambda = per_stage.back().periods[t].lambda;
    rec.final_gradient = per_stage.back().periods[t].final_gradient;
    out.periods.push_back(rec);
    out.decisions.push_back(std::move(decisions));
    out.decision_lambda.push_back(per_stage.back().decision_lambda[t]);
  }
  out.final_state = per_stage.back().final_state;
  return out;
}

}  // namespace cascade
