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

// Drives the cascade_cli binary end to end on a shrunken default scenario.

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "cascade/checkpoint.h"
#include "cascade/pipeline.h"

namespace cascade {
namespace {

namespace fs = std::filesystem;

const std::string kScenario = std::string(CASCADE_SCENARIO_DIR) + "/default.json";
// Small enough to keep every command under a few seconds.
const std::string kSmall =
    " --set train.epochs=1 --set workload.periods=2"
    " --set workload.train_population_size=200"
    " --set workload.samples_per_user=2";

struct Result {
  int code = 0;
  std::string err;
};

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("cascade_cli_" + std::to_string(::getpid()) + "_" +
            ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  Result run(const std::string& args) const {
    const fs::path err = dir_ / "stderr.txt";
    const std::string cmd = std::string(CASCADE_CLI_PATH) + " " + args +
                            " >" + (dir_ / "stdout.txt").string() + " 2>" +
                            err.string();
    const int status = std::system(cmd.c_str());
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, read(err)};
  }
  std::string common(const std::string& out = "out") const {
    return "--scenario " + kScenario + " --out " + (dir_ / out).string() +
           kSmall;
  }
  static std::string read(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
  }
  static int lines(const fs::path& p) {
    const std::string text = read(p);
    return static_cast<int>(std::count(text.begin(), text.end(), '\n'));
  }

  fs::path dir_;
};

TEST_F(Cli, UsageErrorsExitWithOne) {
  EXPECT_EQ(run("").code, 1);
  EXPECT_EQ(run("frobnicate").code, 1);
  EXPECT_EQ(run("generate").code, 1);  // --scenario is required
}

TEST_F(Cli, MissingStagesIsAConfigurationError) {
  const fs::path bad = dir_ / "bad.json";
  std::ofstream(bad) << R"({"seed": 1})";
  const Result r = run("generate --scenario " + bad.string());
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("stages"), std::string::npos) << r.err;
  EXPECT_EQ(run("generate " + common() + " --set train.nope=1").code, 2);
  EXPECT_EQ(run("generate --scenario " + (dir_ / "absent.json").string()).code,
            6);
}

TEST_F(Cli, GenerateIsByteStable) {
  ASSERT_EQ(run("generate " + common("a")).code, 0);
  ASSERT_EQ(run("generate " + common("b")).code, 0);
  EXPECT_EQ(lines(dir_ / "a" / "chains.csv"), 129);
  EXPECT_EQ(read(dir_ / "a" / "chains.csv"), read(dir_ / "b" / "chains.csv"));
  EXPECT_EQ(read(dir_ / "a" / "workload.csv"),
            read(dir_ / "b" / "workload.csv"));
}

TEST_F(Cli, TrainNeedsAWorkloadAndRunNeedsACheckpoint) {
  EXPECT_EQ(run("train " + common()).code, 6);
  ASSERT_EQ(run("generate " + common()).code, 0);
  EXPECT_EQ(run("run " + common() + " --method greenflow").code, 6);
}

TEST_F(Cli, ZeroEpochCheckpointIsTheInitialization) {
  ASSERT_EQ(run("generate " + common()).code, 0);
  ASSERT_EQ(run("train " + common() + " --set train.epochs=0").code, 0);
  const Scenario s = load_scenario(
      kScenario, {"train.epochs=0", "workload.periods=2",
                  "workload.train_population_size=200",
                  "workload.samples_per_user=2"});
  const Bench bench = make_bench(s);
  const RewardModel init(bench.cascade, reward_config(bench));
  const RewardModel loaded =
      load_checkpoint((dir_ / "out" / "model.ckpt").string(), bench.cascade);
  EXPECT_TRUE(std::equal(init.params().begin(), init.params().end(),
                         loaded.params().begin(), loaded.params().end()));
  EXPECT_EQ(lines(dir_ / "out" / "loss_trace.csv"), 2);
}

TEST_F(Cli, RunIsDeterministicForEveryMethod) {
  ASSERT_EQ(run("generate " + common()).code, 0);
  ASSERT_EQ(run("train " + common()).code, 0);
  for (const char* method : {"greenflow", "equal", "cras"}) {
    ASSERT_EQ(run("run " + common() + " --method " + method).code, 0)
        << method;
    const std::string first =
        read(dir_ / "out" / (std::string(method) + "_summary.json"));
    ASSERT_EQ(run("run " + common() + " --method " + method).code, 0);
    EXPECT_EQ(first,
              read(dir_ / "out" / (std::string(method) + "_summary.json")));
    EXPECT_EQ(lines(dir_ / "out" / (std::string(method) + "_periods.csv")), 3);
  }
  const Result equal = run("run " + common() + " --method equal --budget 1e9");
  EXPECT_EQ(equal.code, 0);
  EXPECT_NE(equal.err.find("overshoots"), std::string::npos) << equal.err;
  EXPECT_EQ(run("run " + common() + " --method magic").code, 1);
}

TEST_F(Cli, ReportHasOneRowPerMethodAndBudget) {
  ASSERT_EQ(run("generate " + common()).code, 0);
  ASSERT_EQ(run("train " + common()).code, 0);
  ASSERT_EQ(run("report " + common()).code, 0);
  EXPECT_EQ(lines(dir_ / "out" / "sweep.csv"), 16);
  EXPECT_EQ(lines(dir_ / "out" / "pfec.txt"), 16);
  EXPECT_NE(read(dir_ / "out" / "pfec.txt").find("add.cost"),
            std::string::npos);
  EXPECT_EQ(run("report " + common() + " --methods equal").code, 5);
  EXPECT_EQ(run("report " + common() + " --methods equal,nope").code, 2);
}

}  // namespace
}  // namespace cascade
