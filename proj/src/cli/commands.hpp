// Copyright 2026 The biqap Authors
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

#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace biqap::cli {

enum ExitCode : int {
  kOk = 0,
  kConfigError = 2,
  kSolverFailure = 3,
  kPropertyFailure = 4,
};

struct RunConfig {
  std::string command;
  std::string input;
  std::string reps;
  std::string out;
  std::string format = "json";
  double tol = 1e-9;
  std::uint64_t seed = 1;
  int restarts = 4;
  int trials = 20;
  int d = 2;
  std::string q_grid = "0:1:0.1";
  /** Controlled-channel Choi dimension above which erasure-scan skips the SDP bound. */
  long bound_max_dim = 128;
  std::string dump_sdp;

  /** Throws ConfigError on out-of-range values. */
  void validate() const;
};

struct CommandResult {
  int exit_code = kOk;
  std::string output;
  std::vector<std::string> warnings;
};

/** Parses "a:b:step" into an inclusive grid; a > b gives an empty grid. */
std::vector<double> parse_grid(const std::string& spec);

/** Formats with 12 significant digits in the classic locale. */
std::string format_number(double x);

CommandResult cmd_bounds(const RunConfig& cfg);
CommandResult cmd_erasure_scan(const RunConfig& cfg);
CommandResult cmd_simulate_teleport(const RunConfig& cfg);
CommandResult cmd_property_suite(const RunConfig& cfg);

/** Dispatches on cfg.command; ConfigError propagates. */
CommandResult run(const RunConfig& cfg);

}  // namespace biqap::cli
