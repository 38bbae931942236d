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

// cascade_cli: generate / train / run / report over a scenario file.
//
//   cascade_cli generate --scenario scenarios/default.json
//   cascade_cli train    --scenario scenarios/default.json
//   cascade_cli run      --scenario scenarios/default.json --method greenflow
//   cascade_cli report   --scenario scenarios/default.json
//
// Every subcommand accepts --seed, --out and repeated --set a.b.c=value
// overrides. Exit codes: 0 ok, 1 usage, 2 configuration, 3 numeric,
// 4 oracle infeasible, 5 comparison, 6 I/O.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "cascade/checkpoint.h"
#include "cascade/error.h"
#include "cascade/pfec.h"
#include "cascade/pipeline.h"

namespace fs = std::filesystem;
using namespace cascade;

namespace {

struct CommonOptions {
  std::string scenario;
  std::optional<uint64_t> seed;
  std::string out;
  std::vector<std::string> overrides;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--scenario", o.scenario, "Scenario JSON file")->required();
  cmd->add_option("--seed", o.seed, "Override the scenario seed");
  cmd->add_option("--out", o.out, "Override the output directory");
  cmd->add_option("--set", o.overrides,
                  "Override any scenario field: dotted.path=value");
}

Scenario load(const CommonOptions& o) {
  std::vector<std::string> overrides = o.overrides;
  if (o.seed) overrides.push_back("seed=" + std::to_string(*o.seed));
  if (!o.out.empty()) {
    overrides.push_back("output=" + nlohmann::json(o.out).dump());
  }
  return load_scenario(o.scenario, overrides);
}

fs::path output_dir(const Scenario& s) {
  const fs::path dir(s.output);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    throw IoError("cannot create output directory '" + s.output +
                  "': " + ec.message());
  }
  return dir;
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  return out;
}

void require_file(const fs::path& path, const std::string& hint) {
  if (!fs::exists(path)) {
    throw IoError("missing '" + path.string() + "'; " + hint);
  }
}

fs::path cras_checkpoint(const fs::path& dir, size_t k) {
  return dir / ("cras_stage" + std::to_string(k + 1) + ".ckpt");
}

void write_loss_trace(const fs::path& path, const TrainResult& r) {
  std::ofstream out = open_out(path);
  out << "epoch,loss\n";
  for (size_t e = 0; e < r.loss_trace.size(); ++e) {
    out << e << ',' << format_double(r.loss_trace[e]) << '\n';
  }
}

int cmd_generate(const CommonOptions& o) {
  const Scenario s = load(o);
  const Bench bench = make_bench(s);
  const fs::path dir = output_dir(s);
  {
    std::ofstream out = open_out(dir / "chains.csv");
    write_chains_csv(out, bench);
  }
  {
    std::ofstream out = open_out(dir / "workload.csv");
    write_workload_csv(out, bench.workload);
  }
  std::cout << "chains: " << bench.chains.size() << " -> "
            << (dir / "chains.csv").string() << "\n"
            << "requests: " << bench.workload.total_requests() << " over "
            << bench.workload.periods.size() << " periods -> "
            << (dir / "workload.csv").string() << "\n";
  return 0;
}

int cmd_train(const CommonOptions& o) {
  const Scenario s = load(o);
  const Bench bench = make_bench(s);
  const fs::path dir = output_dir(s);
  require_file(dir / "workload.csv", "run 'generate' first");

  TrainResult trace;
  const RewardModel model =
      train_reward_model(bench, reward_config(bench), &trace);
  save_checkpoint(model, (dir / "model.ckpt").string());
  write_loss_trace(dir / "loss_trace.csv", trace);
  // The checkpoint must survive a round trip before we report success.
  const RewardModel reloaded =
      load_checkpoint((dir / "model.ckpt").string(), bench.cascade);
  if (!std::equal(model.params().begin(), model.params().end(),
                  reloaded.params().begin(), reloaded.params().end())) {
    throw IoError("checkpoint round trip changed the parameters");
  }
  std::cout << "reward model: " << model.num_params() << " parameters, loss "
            << format_double(trace.loss_trace.front()) << " -> "
            << format_double(trace.loss_trace.back()) << "\n";

  std::vector<TrainResult> cras_traces;
  const CrasModels cras = train_cras_models(bench, &cras_traces);
  for (size_t k = 0; k < cras.models.size(); ++k) {
    save_checkpoint(cras.models[k], cras_checkpoint(dir, k).string());
    write_loss_trace(dir / ("cras_stage" + std::to_string(k + 1) +
                            "_loss_trace.csv"),
                     cras_traces[k]);
  }
  std::cout << "cras stage models: " << cras.models.size() << "\n";
  return 0;
}

RewardModel load_main_model(const fs::path& dir, const Bench& bench) {
  require_file(dir / "model.ckpt", "run 'train' first");
  return load_checkpoint((dir / "model.ckpt").string(), bench.cascade);
}

CrasModels load_cras(const fs::path& dir, const Bench& bench) {
  const CrasPlan plan = cras_plan(bench);
  std::vector<RewardModel> models;
  for (size_t k = 0; k < plan.stages.size(); ++k) {
    require_file(cras_checkpoint(dir, k), "run 'train' first");
    models.push_back(load_checkpoint(cras_checkpoint(dir, k).string(),
                                     plan.stages[k].cascade));
  }
  return attach_cras_models(bench, std::move(models));
}

double default_budget(const Bench& bench) {
  if (bench.scenario.allocator.budget > 0.0) {
    return bench.scenario.allocator.budget;
  }
  return bench.mean_arrivals() * bench.costs[equal_chain(bench)];
}

int cmd_run(const CommonOptions& o, const std::string& method,
            std::optional<double> budget_flag) {
  const Scenario s = load(o);
  const Bench bench = make_bench(s);
  const fs::path dir = output_dir(s);
  const double budget = budget_flag ? *budget_flag : default_budget(bench);
  if (!(budget > 0.0)) throw ConfigError("--budget must be > 0");

  MethodResult result;
  if (method == "greenflow") {
    const RewardModel model = load_main_model(dir, bench);
    const PredictionTable table =
        predict_users(model, bench.eval_users, bench.chains);
    result = run_greenflow(bench, model, table, budget);
  } else if (method == "equal") {
    result = run_equal(bench, equal_chain(bench), budget);
  } else {
    result = run_cras(bench, load_cras(dir, bench), budget);
  }
  for (const std::string& line : result.timeline.log) {
    std::cerr << method << ": " << line << "\n";
  }
  {
    std::ofstream out = open_out(dir / (method + "_periods.csv"));
    write_period_csv(out, result.timeline.periods);
  }
  const std::string summary = summary_json(result.summary);
  {
    std::ofstream out = open_out(dir / (method + "_summary.json"));
    out << summary << "\n";
  }
  std::cout << summary << "\n";
  return 0;
}

std::vector<std::string> split_methods(const std::string& csv) {
  std::vector<std::string> out;
  std::stringstream in(csv);
  std::string m;
  while (std::getline(in, m, ',')) {
    if (m != "greenflow" && m != "equal" && m != "cras") {
      throw ConfigError("--methods: unknown method '" + m + "'");
    }
    out.push_back(m);
  }
  return out;
}

int cmd_report(const CommonOptions& o, const std::string& methods_csv) {
  const Scenario s = load(o);
  const Bench bench = make_bench(s);
  const fs::path dir = output_dir(s);
  const std::vector<std::string> methods = split_methods(methods_csv);
  if (methods.size() < 2) {
    throw ComparisonError("report needs at least two methods");
  }
  const std::string baseline =
      std::find(methods.begin(), methods.end(), "equal") != methods.end()
          ? "equal"
          : methods.front();

  std::optional<RewardModel> model;
  std::optional<PredictionTable> table;
  std::optional<CrasModels> cras;
  for (const std::string& m : methods) {
    if (m == "greenflow" && !model) {
      model = load_main_model(dir, bench);
      table = predict_users(*model, bench.eval_users, bench.chains);
    }
    if (m == "cras" && !cras) cras = load_cras(dir, bench);
  }

  std::vector<PfecRow> all_rows;
  for (const SweepPoint& point : sweep_points(bench)) {
    std::vector<RunSummary> runs;
    for (const std::string& m : methods) {
      if (m == "greenflow") {
        runs.push_back(
            run_greenflow(bench, *model, *table, point.budget).summary);
      } else if (m == "equal") {
        runs.push_back(run_equal(bench, point.chain, point.budget).summary);
      } else {
        runs.push_back(run_cras(bench, *cras, point.budget).summary);
      }
    }
    const std::vector<PfecRow> rows =
        report(runs, baseline, s.hardware, s.hardware.carbon_intensity);
    all_rows.insert(all_rows.end(), rows.begin(), rows.end());
  }
  {
    std::ofstream out = open_out(dir / "sweep.csv");
    write_report_csv(out, all_rows);
  }
  std::ostringstream table_text;
  write_report_table(table_text, all_rows);
  {
    std::ofstream out = open_out(dir / "pfec.txt");
    out << table_text.str();
  }
  std::cout << table_text.str();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Budget-constrained computation allocation for cascade "
               "recommenders"};
  app.require_subcommand(1);

  CommonOptions gen_opts, train_opts, run_opts, report_opts;
  CLI::App* gen = app.add_subcommand("generate", "Write chains and workload");
  add_common(gen, gen_opts);
  CLI::App* trn = app.add_subcommand("train", "Train the reward models");
  add_common(trn, train_opts);
  CLI::App* run = app.add_subcommand("run", "Run one allocation method");
  add_common(run, run_opts);
  std::string method = "greenflow";
  std::optional<double> budget;
  run->add_option("--method", method, "greenflow | equal | cras")
      ->check(CLI::IsMember({"greenflow", "equal", "cras"}));
  run->add_option("--budget", budget, "Per-period budget in FLOPs");
  CLI::App* rep = app.add_subcommand("report", "Budget sweep + PFEC report");
  add_common(rep, report_opts);
  std::string methods = "equal,greenflow,cras";
  rep->add_option("--methods", methods, "Comma-separated methods (>= 2)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : static_cast<int>(ExitCode::kUsage);
  }

  try {
    if (*gen) return cmd_generate(gen_opts);
    if (*trn) return cmd_train(train_opts);
    if (*run) return cmd_run(run_opts, method, budget);
    if (*rep) return cmd_report(report_opts, methods);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return static_cast<int>(e.exit_code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return static_cast<int>(ExitCode::kIo);
  }
  return 0;
}
