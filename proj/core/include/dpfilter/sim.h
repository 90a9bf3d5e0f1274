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


// Monte Carlo evaluation of mechanisms and brute-force oracles.

#ifndef DPFILTER_SIM_H_
#define DPFILTER_SIM_H_

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "dpfilter/design.h"
#include "dpfilter/lti.h"
#include "dpfilter/runtime.h"
#include "dpfilter/sources.h"

namespace dpfilter {

struct MonteCarloOptions {
  int64_t length = 100'000;
  int replications = 20;
  uint64_t base_seed = 1;
  // Samples discarded before the error average.
  int64_t transient = 10'000;
  int jobs = 1;
  // Traces kept for the first `trace_replications` replications.
  int trace_replications = 0;
  bool disable_noise = false;
};

struct SimulationReport {
  std::string label;
  double theoretical_mse = 0.0;
  double empirical_mse = 0.0;
  // Sample standard deviation of the per-replication MSEs / sqrt(reps).
  double standard_error = 0.0;
  int64_t length = 0;
  int64_t transient = 0;
  int release_delay = 0;
  int replications = 0;
  uint64_t base_seed = 0;
  std::vector<uint64_t> source_seeds;
  std::vector<uint64_t> noise_seeds;
  std::vector<double> replication_mse;

  double theoretical_rmse() const;
  double empirical_rmse() const;
  // Normal 95% interval for the MSE and the corresponding RMSE interval.
  double mse_ci_low() const;
  double mse_ci_high() const;
  double rmse_ci_low() const;
  double rmse_ci_high() const;
};

struct MonteCarloResult {
  SimulationReport report;
  std::vector<StreamReport> traces;
};

// Seeds for replication k: source DeriveSeed(base, 2k), noise
// DeriveSeed(base, 2k + 1). Results do not depend on `jobs`.
absl::StatusOr<MonteCarloResult> MonteCarlo(const MechanismDesign& design,
                                            const SignalSource& source,
                                            const MonteCarloOptions& options,
                                            std::string label = "");

// Key: value lines.
void WriteReportText(const SimulationReport& report, std::ostream& out);
// Header plus one row per replication.
void WriteReportCsv(const SimulationReport& report, std::ostream& out);

struct AdjacencyOracleResult {
  double max_distance = 0.0;
  // Maximum over the trials with |k| = d.
  double max_distance_full_level = 0.0;
  double bound = 0.0;  // d ||g||_2
  int trials = 0;
};

// Brute-force ||G u - G u'||_2 over random pairs u' = u + k delta_{t0},
// 0 < |k| <= d, with the outputs run past the end of u until the impulse
// response has decayed. The first trial uses |k| = d.
absl::StatusOr<AdjacencyOracleResult> AdjacencyOracle(
    const RationalTransferFunction& g, int adjacency, int trials,
    int64_t length, uint64_t seed);

}  // namespace dpfilter

#endif  // DPFILTER_SIM_H_
