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

#ifndef DPFILTER_TOOLS_COMMANDS_H_
#define DPFILTER_TOOLS_COMMANDS_H_

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>

#include "absl/status/statusor.h"
#include "config.h"
#include "dpfilter/design.h"

namespace dpfilter::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitIoError = 1,
  kExitConfigError = 2,
  kExitDesignError = 3,
};

inline constexpr char kOutputDirEnv[] = "DPFILTER_OUTPUT_DIR";
inline constexpr char kDefaultOutputDir[] = "dpfilter_out";

struct CommandOptions {
  // design | simulate | evaluate | example-paper
  std::string command;
  std::optional<std::string> config_path;
  std::optional<std::string> out;
  std::optional<uint64_t> seed;
  int jobs = 1;
};

int RunCommand(const CommandOptions& options, std::ostream& out,
               std::ostream& err);

absl::StatusOr<MechanismDesign> DesignMechanism(const Scenario& scenario,
                                                const ExperimentConfig& config,
                                                MechanismChoice choice);

}  // namespace dpfilter::cli

#endif  // DPFILTER_TOOLS_COMMANDS_H_
