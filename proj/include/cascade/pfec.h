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

// Performance / FLOPs / Energy / Carbon accounting.
//
//   EC [kWh]   = PUE * sum_d (rated_power_d [kW] * usage_d [h])
//   CE [kg]    = EC * CI [g/kWh] / 1000
//   usage_d    = flops * share_d / (throughput_d * 3600)
//
// Devices without their own throughput (RAM) follow another device's usage
// hours. Usage is derived analytically from FLOPs; nothing is measured.

#ifndef CASCADE_PFEC_H_
#define CASCADE_PFEC_H_

#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "cascade/period_runner.h"

namespace cascade {

inline constexpr double kDefaultPue = 1.67;
inline constexpr double kDefaultCarbonIntensity = 615.0;  // g CO2e / kWh

struct Device {
  std::string name;
  double rated_power_watts = 0.0;
  double throughput_flops_per_second = 0.0;
  double share = 0.0;   // fraction of FLOPs executed on this device
  std::string follows;  // if set, usage hours equal that device's
};

struct HardwareProfile {
  double pue = kDefaultPue;
  double carbon_intensity = kDefaultCarbonIntensity;
  std::vector<Device> devices;

  // 100% of FLOPs on one CPU; RAM powered for the same hours.
  static HardwareProfile default_profile();
  // Throws ConfigError when pue < 1, ci <= 0, a name repeats, a compute
  // device has zero throughput, or `follows` names an unknown device.
  void validate() const;
};

using UsageHours = std::map<std::string, double>;

// Throws ConfigError for an unknown device or negative hours.
double energy(const HardwareProfile& profile, const UsageHours& usage_hours);

// kg CO2e. Throws DomainError for ec < 0 or ci <= 0.
double carbon(double ec_kwh, double carbon_intensity_g_per_kwh);

UsageHours flops_to_usage(double flops_total, const HardwareProfile& profile);

// One method's aggregate over a run.
struct RunSummary {
  std::string method;
  double budget = 0.0;        // per period
  double revenue = 0.0;       // revenue@e
  double rs_flops = 0.0;      // cascade inference
  double overhead_flops = 0.0;  // reward-model inference + solver work
  int periods = 0;
  int requests = 0;
};

struct PfecRow {
  RunSummary run;
  double total_flops = 0.0;
  double energy_kwh = 0.0;
  double co2_kg = 0.0;
  double overhead_energy_kwh = 0.0;
  // Relative to the baseline, in percent for revenue and FLOPs and in
  // absolute units for energy and carbon.
  double revenue_delta_pct = 0.0;
  double flops_delta_pct = 0.0;
  double energy_delta_kwh = 0.0;
  double co2_delta_kg = 0.0;
};

// Energy and carbon are computed on total FLOPs (RS plus overhead); the
// overhead stays visible in its own columns. Throws ComparisonError when the
// baseline is absent or the runs cover different numbers of periods.
std::vector<PfecRow> report(std::span<const RunSummary> runs,
                            const std::string& baseline,
                            const HardwareProfile& profile,
                            double carbon_intensity);

void write_report_csv(std::ostream& out, std::span<const PfecRow> rows);
void write_report_table(std::ostream& out, std::span<const PfecRow> rows);

// Aggregates a timeline's periods.
RunSummary summarize(const std::string& method, double budget,
                     const Timeline& timeline, double revenue,
                     double overhead_flops);

}  // namespace cascade

#endif  // CASCADE_PFEC_H_
