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

// Experiment configuration: JSON schema, validation and the built-in worked
// example.

#ifndef DPFILTER_TOOLS_CONFIG_H_
#define DPFILTER_TOOLS_CONFIG_H_

#include <array>
#include <complex>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "dpfilter/design.h"
#include "dpfilter/lti.h"
#include "dpfilter/privacy.h"
#include "dpfilter/sources.h"
#include "dpfilter/spectral.h"
#include "json.hpp"

namespace dpfilter::cli {

enum class SourceKind { kMarkov, kAr, kIid };

struct SourceConfig {
  SourceKind kind = SourceKind::kMarkov;
  // markov
  std::array<std::array<double, 2>, 2> transition = {
      {{0.75, 0.25}, {0.25, 0.75}}};
  std::optional<int> initial_state;
  // markov, iid
  std::array<double, 2> values = {-1.0, 1.0};
  // iid
  double probability = 0.5;
  // ar
  std::vector<double> coefficients;
  double noise_std = 1.0;
  double mean = 0.0;

  uint64_t seed = 1;
};

struct PsdConfig {
  bool from_source = true;
  double gain = 1.0;
  std::vector<std::complex<double>> numerator_roots;
  std::vector<std::complex<double>> denominator_roots;
};

enum class MechanismChoice {
  kLzf,
  kLmmseNoncausal,
  kLmmseCausal,
  kDfLmmsePrefilter,
  kDfOptimizedPrefilter,
};

absl::string_view MechanismChoiceName(MechanismChoice choice);

struct DecisionConfig {
  bool is_default = true;
  DecisionDevice::Kind kind = DecisionDevice::Kind::kSign;
  double level = 1.0;
  double step = 1.0;
  double offset = 0.0;
};

struct MechanismConfig {
  MechanismChoice kind = MechanismChoice::kLzf;
  int fir_length = 512;
  int grid_n = 4096;
  int delay = 5;
  int n_forward = 16;
  int n_feedback = 8;
  DecisionConfig decision;
  OutputMode output_mode = OutputMode::kSoft;
  int wiener_half_length = 0;
  double profile_floor = 1e-8;
  ProfileRealization profile_realization = ProfileRealization::kClosedForm;
};

struct RunConfig {
  int64_t length = 100'000;
  int replications = 20;
  int64_t transient = 10'000;
  std::string output_dir;
  // Negative: every replication.
  int trace_replications = -1;
  // Rows per trace file, starting at the end of the transient; 0 keeps all.
  int64_t trace_samples = 2000;
};

struct ExperimentConfig {
  std::vector<double> numerator = {1.0};
  std::vector<double> denominator = {1.0};
  double epsilon = 1.0;
  double delta = 0.05;
  int adjacency = 1;
  SourceConfig source;
  PsdConfig psd;
  MechanismConfig mechanism;
  RunConfig run;
};

// Parses and validates a configuration object. Errors are InvalidArgument
// with the offending field path first ("mechanism.fir_length: ...").
absl::StatusOr<ExperimentConfig> ParseConfig(const nlohmann::json& json);

// Every field, defaults included. Round-trips through ParseConfig.
nlohmann::json ToJson(const ExperimentConfig& config);

// Reads a configuration file or a manifest written by a previous run.
absl::StatusOr<ExperimentConfig> LoadConfigFile(const std::string& path);

// The worked example: F = (1 + 0.995 z^-1) / (1 - 0.995 z^-1), eps = ln 3,
// delta = 0.05, d = 1, symmetric two-state chain with stay probability 3/4 on
// values +-1.
ExperimentConfig ExampleConfig();

// Objects built from a validated configuration.
struct Scenario {
  RationalTransferFunction f = RationalTransferFunction::Identity();
  PrivacyParams params;
  std::unique_ptr<SignalSource> source;
  RationalPsd psd = RationalPsd::White(1.0);
};

// Errors are InvalidArgument with field paths, like ParseConfig.
absl::StatusOr<Scenario> BuildScenario(const ExperimentConfig& config);

// The configured decision device, or the default derived from the source
// alphabet: sign(level) for symmetric values, a quantizer otherwise.
DecisionDevice ResolveDecision(const ExperimentConfig& config);

}  // namespace dpfilter::cli

#endif  // DPFILTER_TOOLS_CONFIG_H_
