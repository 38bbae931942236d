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

#ifndef CASCADE_ERROR_H_
#define CASCADE_ERROR_H_

#include <stdexcept>
#include <string>

namespace cascade {

// Process exit codes used by the CLI. Each error class maps to one.
enum class ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kConfig = 2,
  kNumeric = 3,
  kOracleInfeasible = 4,
  kComparison = 5,
  kIo = 6,
};

class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
  virtual ExitCode exit_code() const { return ExitCode::kUsage; }
};

// Malformed scenario, stage config, profile or missing required input.
class ConfigError : public Error {
 public:
  using Error::Error;
  ExitCode exit_code() const override { return ExitCode::kConfig; }
};

// A value outside an operation's domain (e.g. scale not in the scale set).
class DomainError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

// Non-finite intermediates or diverging training.
class NumericError : public Error {
 public:
  using Error::Error;
  ExitCode exit_code() const override { return ExitCode::kNumeric; }
};

class TrainingError : public NumericError {
 public:
  TrainingError(const std::string& what, long step)
      : NumericError(what), step_(step) {}
  long step() const { return step_; }

 private:
  long step_;
};

class OracleInfeasibleError : public Error {
 public:
  using Error::Error;
  ExitCode exit_code() const override { return ExitCode::kOracleInfeasible; }
};

// Runs that cannot be compared (missing baseline, horizon mismatch).
class ComparisonError : public Error {
 public:
  using Error::Error;
  ExitCode exit_code() const override { return ExitCode::kComparison; }
};

class IoError : public Error {
 public:
  using Error::Error;
  ExitCode exit_code() const override { return ExitCode::kIo; }
};

}  // namespace cascade

#endif  // CASCADE_ERROR_H_
