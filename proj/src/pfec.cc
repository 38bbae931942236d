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

#include <algorithm>
#include <ostream>
#include <set>

#include <fmt/format.h>

#include "cascade/error.h"

namespace cascade {

namespace {

const Device* find_device(const HardwareProfile& profile,
                          const std::string& name) {
  for (const Device& d : profile.devices) {
    if (d.name == name) return &d;
  }
  return nullptr;
}

double pct_delta(double value, double base) {
  if (base == 0.0) return value == 0.0 ? 0.0 : 100.0;
  return 100.0 * (value - base) / base;
}

}  // namespace

HardwareProfile HardwareProfile::default_profile() {
  HardwareProfile p;
  p.devices = {
      Device{"cpu", 200.0, 1e11, 1.0, ""},
      Device{"ram", 30.0, 0.0, 0.0, "cpu"},
  };
  return p;
}

void HardwareProfile::validate() const {
  if (!(pue >= 1.0)) throw ConfigError("hardware.pue must be >= 1");
  if (!(carbon_intensity > 0.0)) {
    throw ConfigError("hardware.carbon_intensity_g_per_kwh must be > 0");
  }
  std::set<std::string> names;
  for (const Device& d : devices) {
    if (!names.insert(d.name).second) {
      throw ConfigError("hardware.devices: duplicate device '" + d.name + "'");
    }
    if (!(d.rated_power_watts >= 0.0)) {
      throw ConfigError("hardware.devices." + d.name +
                        ".rated_power_watts must be >= 0");
    }
  }
  for (const Device& d : devices) {
    if (!d.follows.empty()) {
      const Device* target = find_device(*this, d.follows);
      if (target == nullptr || !target->follows.empty()) {
        throw ConfigError("hardware.devices." + d.name + ".follows: '" +
                          d.follows + "' is not a compute device");
      }
    } else if (!(d.throughput_flops_per_second > 0.0)) {
      throw ConfigError("hardware.devices." + d.name +
                        ".throughput_flops_per_second must be > 0");
    }
  }
}

double energy(const HardwareProfile& profile, const UsageHours& usage_hours) {
  double kwh = 0.0;
  for (const auto& [name, hours] : usage_hours) {
    const Device* d = find_device(profile, name);
    if (d == nullptr) throw ConfigError("energy: unknown device '" + name + "'");
    if (!(hours >= 0.0)) {
      throw ConfigError("energy: usage hours of '" + name + "' must be >= 0");
    }
    kwh += d->rated_power_watts / 1000.0 * hours;
  }
  return profile.pue * kwh;
}

double carbon(double ec_kwh, double carbon_intensity_g_per_kwh) {
  if (!(ec_kwh >= 0.0)) throw DomainError("carbon: energy must be >= 0");
  if (!(carbon_intensity_g_per_kwh > 0.0)) {
    throw DomainError("carbon: carbon intensity must be > 0");
  }
  return ec_kwh * carbon_intensity_g_per_kwh / 1000.0;
}

UsageHours flops_to_usage(double flops_total, const HardwareProfile& profile) {
  if (!(flops_total >= 0.0)) {
    throw DomainError("flops_to_usage: FLOPs must be >= 0");
  }
  profile.validate();
  UsageHours hours;
  for (const Device& d : profile.devices) {
    if (d.follows.empty()) {
      hours[d.name] =
          flops_total * d.share / (d.throughput_flops_per_second * 3600.0);
    }
  }
  for (const Device& d : profile.devices) {
    if (!d.follows.empty()) hours[d.name] = hours.at(d.follows);
  }
  return hours;
}

std::vector<PfecRow> report(std::span<const RunSummary> runs,
                            const std::string& baseline,
                            const HardwareProfile& profile,
                            double carbon_intensity) {
  const auto base_it =
      std::find_if(runs.begin(), runs.end(),
                   [&](const RunSummary& r) { return r.method == baseline; });
  if (base_it == runs.end()) {
    throw ComparisonError("report: baseline '" + baseline +
                          "' is not among the runs");
  }
  for (const RunSummary& r : runs) {
    if (r.periods != base_it->periods) {
      throw ComparisonError("report: run '" + r.method + "' covers " +
                            std::to_string(r.periods) + " periods but '" +
                            baseline + "' covers " +
                            std::to_string(base_it->periods));
    }
  }

  auto fill = [&](const RunSummary& r) {
    PfecRow row;
    row.run = r;
    row.total_flops = r.rs_flops + r.overhead_flops;
    row.energy_kwh = energy(profile, flops_to_usage(row.total_flops, profile));
    row.co2_kg = carbon(row.energy_kwh, carbon_intensity);
    row.overhead_energy_kwh =
        energy(profile, flops_to_usage(r.overhead_flops, profile));
    return row;
  };
  const PfecRow base = fill(*base_it);
  std::vector<PfecRow> rows;
  for (const RunSummary& r : runs) {
    PfecRow row = fill(r);
    row.revenue_delta_pct = pct_delta(r.revenue, base.run.revenue);
    row.flops_delta_pct = pct_delta(row.total_flops, base.total_flops);
    row.energy_delta_kwh = row.energy_kwh - base.energy_kwh;
    row.co2_delta_kg = row.co2_kg - base.co2_kg;
    rows.push_back(row);
  }
  return rows;
}

void write_report_csv(std::ostream& out, std::span<const PfecRow> rows) {
  out << "method,budget,periods,requests,revenue_at_e,rs_flops,"
         "overhead_flops,total_flops,energy_kwh,co2_kg,overhead_energy_kwh,"
         "revenue_delta_pct,flops_delta_pct,energy_delta_kwh,co2_delta_kg\n";
  for (const PfecRow& r : rows) {
    out << r.run.method << ',' << format_double(r.run.budget) << ','
        << r.run.periods << ',' << r.run.requests << ','
        << format_double(r.run.revenue) << ',' << format_double(r.run.rs_flops)
        << ',' << format_double(r.run.overhead_flops) << ','
        << format_double(r.total_flops) << ',' << format_double(r.energy_kwh)
        << ',' << format_double(r.co2_kg) << ','
        << format_double(r.overhead_energy_kwh) << ','
        << format_double(r.revenue_delta_pct) << ','
        << format_double(r.flops_delta_pct) << ','
        << format_double(r.energy_delta_kwh) << ','
        << format_double(r.co2_delta_kg) << '\n';
  }
}

void write_report_table(std::ostream& out, std::span<const PfecRow> rows) {
  out << fmt::format("{:<10} {:>11} {:>11} {:>8} {:>11} {:>8} {:>9} {:>10} "
                     "{:>9} {:>10} {:>8}\n",
                     "method", "budget", "revenue", "P(%)", "FLOPs", "F(%)",
                     "add.cost", "EC(kWh)", "dEC", "CO2(kg)", "dCO2");
  for (const PfecRow& r : rows) {
    const double add_pct =
        r.run.rs_flops > 0.0 ? 100.0 * r.run.overhead_flops / r.run.rs_flops
                             : 0.0;
    out << fmt::format(
        "{:<10} {:>11.4g} {:>11.2f} {:>+8.2f} {:>11.4g} {:>+8.2f} {:>8.2f}% "
        "{:>10.4g} {:>+9.3g} {:>10.4g} {:>+8.3g}\n",
        r.run.method, r.run.budget, r.run.revenue, r.revenue_delta_pct,
        r.total_flops, r.flops_delta_pct, add_pct, r.energy_kwh,
        r.energy_delta_kwh, r.co2_kg, r.co2_delta_kg);
  }
}

RunSummary summarize(const std::string& method, double budget,
                     const Timeline& timeline, double revenue,
                     double overhead_flops) {
  RunSummary s;
  s.method = method;
  s.budget = budget;
  s.revenue = revenue;
  s.overhead_flops = overhead_flops;
  s.periods = static_cast<int>(timeline.periods.size());
  for (const PeriodRecord& p : timeline.periods) {
    s.rs_flops += p.consumed_flops;
    s.requests += p.requests;
  }
  return s;
}

}  // namespace cascade
