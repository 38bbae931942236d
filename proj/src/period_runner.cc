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

#include "cascade/period_runner.h"

#include <algorithm>
#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>
#include <thread>

#include "cascade/error.h"

namespace cascade {

namespace {

// Decides requests [begin, end) of `batch` with one snapshot of the price.
// Rows are independent, so workers write disjoint slices.
void decide_range(const PeriodBatch& batch, std::span<const double> costs,
                  int begin, int end, int threads, double lambda,
                  std::vector<int>& out) {
  const size_t num_chains = costs.size();
  auto work = [&](int lo, int hi) {
    for (int i = lo; i < hi; ++i) {
      const std::span<const double> row(
          batch.rewards.data() + static_cast<size_t>(i) * num_chains,
          num_chains);
      out[i] = decide(row, costs, lambda);
    }
  };
  const int count = end - begin;
  if (threads <= 1 || count < 2048) {
    work(begin, end);
    return;
  }
  std::vector<std::jthread> pool;
  const int chunk = (count + threads - 1) / threads;
  for (int lo = begin; lo < end; lo += chunk) {
    pool.emplace_back(work, lo, std::min(end, lo + chunk));
  }
}

}  // namespace

Timeline run_periods(std::span<const PeriodBatch> periods,
                     std::span<const double> costs, const RunConfig& config) {
  if (costs.empty()) throw ConfigError("run_periods: no chains");
  if (!(config.budget_per_period > 0.0)) {
    throw ConfigError("run_periods: budget per period must be > 0");
  }
  if (config.ticks_per_period < 1) {
    throw ConfigError("run_periods: ticks_per_period must be >= 1");
  }
  const size_t num_chains = costs.size();
  const int ticks = config.ticks_per_period;
  const double budget = config.budget_per_period;

  Timeline timeline;
  DualPriceStore store(config.lambda_init);
  DualState state;
  state.lambda = config.lambda_init;

  for (size_t t = 0; t < periods.size(); ++t) {
    const PeriodBatch& batch = periods[t];
    if (batch.rewards.size() !=
        static_cast<size_t>(batch.num_requests) * num_chains) {
      throw ConfigError("run_periods: period " + std::to_string(t + 1) +
                        " reward matrix is not requests x chains");
    }
    PeriodRecord rec;
    rec.period = static_cast<int>(t) + 1;
    rec.requests = batch.num_requests;
    rec.budget_flops = budget;
    std::vector<int> decisions(batch.num_requests, 0);
    std::vector<double> prices(batch.num_requests, 0.0);

    for (int tick = 0; tick < ticks; ++tick) {
      const int begin = static_cast<int>(
          static_cast<int64_t>(batch.num_requests) * tick / ticks);
      const int end = static_cast<int>(
          static_cast<int64_t>(batch.num_requests) * (tick + 1) / ticks);

      // Online: serve this tick with the last published price.
      const DualSnapshot snapshot = store.load();
      decide_range(batch, costs, begin, end, config.threads, snapshot.lambda,
                   decisions);
      for (int i = begin; i < end; ++i) {
        const int j = decisions[i];
        prices[i] = snapshot.lambda;
        rec.consumed_flops += costs[j];
        rec.revenue += batch.rewards[static_cast<size_t>(i) * num_chains + j];
      }

      // Nearline: solve on this tick's requests for the next tick's budget.
      double target;
      if (tick + 1 < ticks) {
        target = std::max(0.0, budget - rec.consumed_flops) /
                 static_cast<double>(ticks - tick - 1);
      } else {
        target = budget / static_cast<double>(ticks);
      }
      if (end == begin) {
        timeline.log.push_back("period " + std::to_string(t + 1) + " tick " +
                               std::to_string(tick + 1) +
                               ": no requests, keeping lambda=" +
                               format_double(state.lambda));
        continue;
      }
      AllocationProblem problem;
      problem.num_requests = end - begin;
      problem.costs.assign(costs.begin(), costs.end());
      problem.rewards.assign(
          batch.rewards.begin() + static_cast<size_t>(begin) * num_chains,
          batch.rewards.begin() + static_cast<size_t>(end) * num_chains);
      // A zero target would make the auto step infinite; the cheapest-chain
      // floor inside auto_step_size keeps it finite, the budget itself only
      // needs to be positive for validation.
      problem.budget = std::max(target, 1.0);
      const double eta = auto_step_size(problem, config.eta0);
      const DualState solved =
          dual_descent(problem, state.lambda, config.iterations, eta);
      state.lambda = solved.lambda;
      state.last_gradient = solved.last_gradient;
      state.iterations += solved.iterations;
      rec.solver_iterations += solved.iterations;
      rec.final_gradient = solved.last_gradient;
      store.publish(state.lambda);
    }
    state.period = rec.period;
    rec.lambda = state.lambda;
    timeline.periods.push_back(rec);
    timeline.decisions.push_back(std::move(decisions));
    timeline.decision_lambda.push_back(std::move(prices));
  }
  timeline.final_state = state;
  return timeline;
}

std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

void write_period_csv(std::ostream& out,
                      std::span<const PeriodRecord> records) {
  out << "period,lambda,requests,consumed_flops,budget_flops,revenue,"
         "solver_iterations,final_gradient\n";
  for (const PeriodRecord& r : records) {
    out << r.period << ',' << format_double(r.lambda) << ',' << r.requests
        << ',' << format_double(r.consumed_flops) << ','
        << format_double(r.budget_flops) << ',' << format_double(r.revenue)
        << ',' << r.solver_iterations << ',' << format_double(r.final_gradient)
        << '\n';
  }
}

namespace {

double parse_double(const std::string& s) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw ConfigError("period csv: bad number '" + s + "'");
  }
  return v;
}

}  // namespace

std::vector<PeriodRecord> read_period_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("period csv: empty input");
  std::vector<PeriodRecord> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != 8) {
      throw ConfigError("period csv: expected 8 columns, got " +
                        std::to_string(cells.size()));
    }
    PeriodRecord r;
    r.period = static_cast<int>(parse_double(cells[0]));
    r.lambda = parse_double(cells[1]);
    r.requests = static_cast<int>(parse_double(cells[2]));
    r.consumed_flops = parse_double(cells[3]);
    r.budget_flops = parse_double(cells[4]);
    r.revenue = parse_double(cells[5]);
    r.solver_iterations = static_cast<int>(parse_double(cells[6]));
    r.final_gradient = parse_double(cells[7]);
    out.push_back(r);
  }
  return out;
}

}  // namespace cascade
