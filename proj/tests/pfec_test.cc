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

#include "cascade/pfec.h"

#include <sstream>

#include <gtest/gtest.h>

#include "cascade/error.h"

namespace cascade {
namespace {

HardwareProfile three_devices() {
  HardwareProfile p;
  p.devices = {Device{"ram", 500.0, 0.0, 0.0, "cpu"},
               Device{"cpu", 2000.0, 1e9, 0.5, ""},
               Device{"gpu", 1500.0, 1e9, 0.5, ""}};
  return p;
}

RunSummary run(const std::string& name, double revenue, double flops) {
  RunSummary s;
  s.method = name;
  s.budget = 1e12;
  s.revenue = revenue;
  s.rs_flops = flops;
  s.overhead_flops = 0.01 * flops;
  s.periods = 10;
  s.requests = 1000;
  return s;
}

TEST(Energy, WeightedByPue) {
  const UsageHours hours = {{"ram", 1.0}, {"cpu", 1.0}, {"gpu", 1.0}};
  EXPECT_NEAR(energy(three_devices(), hours), 6.68, 1e-12);
  EXPECT_EQ(energy(three_devices(), {}), 0.0);
}

TEST(Energy, LinearInUsage) {
  const UsageHours one = {{"cpu", 0.7}, {"gpu", 0.2}};
  const UsageHours two = {{"cpu", 1.4}, {"gpu", 0.4}};
  EXPECT_NEAR(energy(three_devices(), two), 2 * energy(three_devices(), one),
              1e-12);
}

TEST(Energy, RejectsUnknownDevicesAndNegativeHours) {
  EXPECT_THROW(energy(three_devices(), {{"tpu", 1.0}}), ConfigError);
  EXPECT_THROW(energy(three_devices(), {{"cpu", -1.0}}), ConfigError);
}

TEST(Carbon, IntensityTimesEnergy) {
  EXPECT_NEAR(carbon(6.68, 615.0), 4.1082, 1e-12);
  EXPECT_EQ(carbon(0.0, 615.0), 0.0);
  EXPECT_EQ(carbon(1.0, 1000.0), 1.0);
  EXPECT_THROW(carbon(-1.0, 615.0), DomainError);
  EXPECT_THROW(carbon(1.0, 0.0), DomainError);
}

TEST(FlopsToUsage, AnalyticThroughput) {
  HardwareProfile p;
  p.devices = {Device{"cpu", 100.0, 1e9, 1.0, ""},
               Device{"ram", 10.0, 0.0, 0.0, "cpu"}};
  const UsageHours u = flops_to_usage(3.6e12, p);
  EXPECT_DOUBLE_EQ(u.at("cpu"), 1.0);
  EXPECT_DOUBLE_EQ(u.at("ram"), 1.0);
  EXPECT_EQ(flops_to_usage(0.0, p).at("cpu"), 0.0);
  p.devices[0].throughput_flops_per_second = 0.0;
  EXPECT_THROW(flops_to_usage(1.0, p), ConfigError);
}

TEST(HardwareProfile, Validation) {
  EXPECT_NO_THROW(HardwareProfile::default_profile().validate());
  HardwareProfile p = three_devices();
  p.pue = 0.9;
  EXPECT_THROW(p.validate(), ConfigError);
  p = three_devices();
  p.devices[0].follows = "npu";
  EXPECT_THROW(p.validate(), ConfigError);
  p = three_devices();
  p.devices.push_back(p.devices[1]);
  EXPECT_THROW(p.validate(), ConfigError);
}

TEST(Report, SelfComparisonHasZeroDeltas) {
  const std::vector<RunSummary> runs = {run("equal", 100.0, 1e13),
                                        run("equal2", 100.0, 1e13)};
  const std::vector<PfecRow> rows =
      report(runs, "equal", three_devices(), 615.0);
  ASSERT_EQ(rows.size(), 2u);
  for (const PfecRow& r : rows) {
    EXPECT_EQ(r.revenue_delta_pct, 0.0);
    EXPECT_EQ(r.flops_delta_pct, 0.0);
    EXPECT_EQ(r.energy_delta_kwh, 0.0);
    EXPECT_EQ(r.co2_delta_kg, 0.0);
  }
}

TEST(Report, DeltasAgainstTheBaseline) {
  const std::vector<RunSummary> runs = {run("equal", 100.0, 1e13),
                                        run("greenflow", 110.0, 6e12)};
  const std::vector<PfecRow> rows =
      report(runs, "equal", three_devices(), 615.0);
  EXPECT_NEAR(rows[1].revenue_delta_pct, 10.0, 1e-9);
  EXPECT_NEAR(rows[1].flops_delta_pct, -40.0, 1e-9);
  EXPECT_NEAR(rows[1].total_flops, 6.06e12, 1e-3);
  EXPECT_LT(rows[1].energy_delta_kwh, 0.0);
  EXPECT_NEAR(rows[1].co2_kg, rows[1].energy_kwh * 0.615, 1e-12);
  EXPECT_GT(rows[1].overhead_energy_kwh, 0.0);

  std::ostringstream csv, table;
  write_report_csv(csv, rows);
  write_report_table(table, rows);
  EXPECT_NE(csv.str().find("overhead_flops"), std::string::npos);
  EXPECT_NE(table.str().find("add.cost"), std::string::npos);
  EXPECT_NE(table.str().find("greenflow"), std::string::npos);
}

TEST(Report, IncomparableRunsThrow) {
  std::vector<RunSummary> runs = {run("equal", 100.0, 1e13),
                                  run("greenflow", 110.0, 6e12)};
  EXPECT_THROW(report(runs, "cras", three_devices(), 615.0), ComparisonError);
  runs[1].periods = 9;
  EXPECT_THROW(report(runs, "equal", three_devices(), 615.0),
               ComparisonError);
}

TEST(Summarize, AddsUpPeriods) {
  Timeline t;
  t.periods.resize(2);
  t.periods[0].consumed_flops = 1e9;
  t.periods[0].requests = 3;
  t.periods[1].consumed_flops = 2e9;
  t.periods[1].requests = 4;
  const RunSummary s = summarize("x", 5e9, t, 12.5, 1e6);
  EXPECT_EQ(s.rs_flops, 3e9);
  EXPECT_EQ(s.requests, 7);
  EXPECT_EQ(s.periods, 2);
  EXPECT_EQ(s.revenue, 12.5);
  EXPECT_EQ(s.overhead_flops, 1e6);
}

}  // namespace
}  // namespace cascade
