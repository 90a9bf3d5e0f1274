//
// Copyright 2026 The dpfilter Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

// dpfilter command-line entry point.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "commands.h"

int main(int argc, char** argv) {
  CLI::App app{
      "Differentially private filtering: design and simulate "
      "privacy-preserving LTI mechanisms"};
  app.set_version_flag("--version", DPFILTER_VERSION);
  app.require_subcommand(1);

  dpfilter::cli::CommandOptions options;
  std::string config_path;
  std::string out_dir;
  uint64_t seed = 0;

  struct Spec {
    const char* name;
    const char* help;
  };
  constexpr Spec kCommands[] = {
      {"design", "Design a mechanism and write its frequency responses"},
      {"simulate", "Design a mechanism and run Monte Carlo replications"},
      {"evaluate", "Evaluate the closed-form error expressions"},
      {"example-paper",
       "Run the built-in first-order example with all four mechanisms"},
  };
  for (const Spec& spec : kCommands) {
    CLI::App* sub = app.add_subcommand(spec.name, spec.help);
    sub->add_option("--config", config_path, "Experiment config (JSON)");
    sub->add_option("--out", out_dir, "Output directory");
    sub->add_option("--seed", seed, "Override the base seed");
    sub->add_option("--jobs", options.jobs, "Worker threads")
        ->check(CLI::PositiveNumber);
    sub->callback([&options, name = spec.name] { options.command = name; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : dpfilter::cli::kExitConfigError;
  }

  for (CLI::App* sub : app.get_subcommands()) {
    if (sub->count("--config") > 0) options.config_path = config_path;
    if (sub->count("--out") > 0) options.out = out_dir;
    if (sub->count("--seed") > 0) options.seed = seed;
  }
  return dpfilter::cli::RunCommand(options, std::cout, std::cerr);
}
