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

// Nearline/online split over a request stream.
//
// Online: each arriving request is decided with the most recently published
// dual price. Nearline: after a solver tick closes, the tick's requests are
// used to solve a fresh price by dual descent, which is then published for
// the following tick. A reporting period holds `ticks_per_period` solver
// ticks (1 by default, i.e. one solve per period); with several ticks the
// solver paces the remaining period budget over the remaining ticks.

#ifndef CASCADE_PERIOD_RUNNER_H_
#define CASCADE_PERIOD_RUNNER_H_

#include <atomic>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "cascade/allocator.h"

namespace cascade {

struct DualSnapshot {
  double lambda = 0.0;
  int64_t version = 0;
};

// Single-writer, many-reader holder of the published dual price. Readers get
// a consistent (lambda, version) pair and never block the writer.
class DualPriceStore {
 public:
  explicit DualPriceStore(double lambda = 0.0) : snapshot_({lambda, 0}) {}
  DualSnapshot load() const { return snapshot_.load(std::memory_order_acquire); }
  void publish(double lambda) {
    DualSnapshot s = snapshot_.load(std::memory_order_relaxed);
    snapshot_.store({lambda, s.version + 1}, std::memory_order_release);
  }

 private:
  std::atomic<DualSnapshot> snapshot_;
};

// Requests of one reporting period, each with its reward vector over chains.
struct PeriodBatch {
  int num_requests = 0;
  std::vector<double> rewards;  // row-major [num_requests][num_chains]
};

struct RunConfig {
  double budget_per_period = 0.0;
  int iterations = 50;     // L
  double eta0 = 0.5;       // see auto_step_size
  double lambda_init = 0.0;
  int ticks_per_period = 1;
  int threads = 1;         // online decision workers
};

struct PeriodRecord {
  int period = 0;
  double lambda = 0.0;  // price published at the end of the period
  int requests = 0;
  double consumed_flops = 0.0;
  double budget_flops = 0.0;
  double revenue = 0.0;  // predicted unless a caller substitutes true revenue
  int solver_iterations = 0;
  double final_gradient = 0.0;
};

struct Timeline {
  std::vector<PeriodRecord> periods;
  std::vector<std::vector<int>> decisions;  // [period][request] -> chain
  // Price each request was decided with, parallel to `decisions`.
  std::vector<std::vector<double>> decision_lambda;
  DualState final_state;
  std::vector<std::string> log;
};

Timeline run_periods(std::span<const PeriodBatch> periods,
                     std::span<const double> costs, const RunConfig& config);

// CSV with header period,lambda,requests,consumed_flops,budget_flops,revenue,
// solver_iterations,final_gradient. Numbers use shortest round-trip form.
void write_period_csv(std::ostream& out, std::span<const PeriodRecord> records);
std::vector<PeriodRecord> read_period_csv(std::istream& in);

// Locale-independent shortest round-trip decimal form of a double.
std::string format_double(double value);

}  // namespace cascade

#endif  // CASCADE_PERIOD_RUNNER_H_
