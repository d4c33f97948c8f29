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

// biqap: bounds, erasure scans, teleportation simulation and property suites.

#include <iostream>

#include <CLI11.hpp>

#include "cli/commands.hpp"
#include "cli/json_io.hpp"

namespace {

void add_common(CLI::App* sub, biqap::cli::RunConfig& cfg) {
  sub->add_option("--out", cfg.out, "Output path (stdout when omitted)");
  sub->add_option("--format", cfg.format, "json or csv");
  sub->add_option("--tol", cfg.tol, "Solver tolerance");
  sub->add_option("--seed", cfg.seed, "Seed, recorded in the report");
  sub->add_option("--dump-sdp", cfg.dump_sdp, "Write every conic program to this directory");
}

}  // namespace

int main(int argc, char** argv) {
  using namespace biqap::cli;
  RunConfig cfg;
  CLI::App app{"biqap: bidirectional channel bounds and private reading rates"};
  app.require_subcommand(1);

  auto* bounds = app.add_subcommand("bounds", "Γ²→² pair, E²→² lower estimate and resource-state bounds");
  bounds->add_option("--input", cfg.input, "Channel JSON")->required();
  bounds->add_option("--reps", cfg.reps, "Representation JSON");
  bounds->add_option("--restarts", cfg.restarts, "E_max restarts (0 skips)");
  add_common(bounds, cfg);

  auto* scan = app.add_subcommand("erasure-scan", "Erasure cell rate against the analytic capacity");
  scan->add_option("--d", cfg.d, "Erasure dimension (2 or 3)");
  scan->add_option("--q-grid", cfg.q_grid, "Grid a:b:step, inclusive");
  scan->add_option("--bound-max-dim", cfg.bound_max_dim,
                   "Largest controlled-channel Choi dimension for the SDP bound");
  add_common(scan, cfg);

  auto* tele = app.add_subcommand("simulate-teleport", "Teleportation simulation of a bicovariant channel");
  tele->add_option("--input", cfg.input, "Channel JSON")->required();
  tele->add_option("--reps", cfg.reps, "Representation JSON");
  add_common(tele, cfg);

  auto* props = app.add_subcommand("property-suite", "Seeded property checks");
  props->add_option("--trials", cfg.trials, "Trials per suite");
  add_common(props, cfg);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }
  cfg.command = app.get_subcommands().front()->get_name();

  try {
    const CommandResult res = run(cfg);
    for (const auto& w : res.warnings) std::cerr << "warning: " << w << "\n";
    if (cfg.out.empty()) {
      std::cout << res.output;
    } else {
      write_atomic(cfg.out, res.output);
    }
    return res.exit_code;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kSolverFailure;
  }
}
