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


#include "dpfilter/sim.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <random>
#include <thread>
#include <utility>

#include "absl/status/status.h"
#include "absl/strings/str_format.h"
#include "dpfilter/privacy.h"
#include "dpfilter/random.h"
#include "status_macros.h"

namespace dpfilter {
namespace {

constexpr double kZ95 = 1.959963984540054;

double SafeSqrt(double x) { return std::sqrt(std::max(x, 0.0)); }

}  // namespace

double SimulationReport::theoretical_rmse() const {
  return SafeSqrt(theoretical_mse);
}
double SimulationReport::empirical_rmse() const {
  return SafeSqrt(empirical_mse);
}
double SimulationReport::mse_ci_low() const {
  return empirical_mse - kZ95 * standard_error;
}
double SimulationReport::mse_ci_high() const {
  return empirical_mse + kZ95 * standard_error;
}
double SimulationReport::rmse_ci_low() const { return SafeSqrt(mse_ci_low()); }
double SimulationReport::rmse_ci_high() const {
  return SafeSqrt(mse_ci_high());
}

absl::StatusOr<MonteCarloResult> MonteCarlo(const MechanismDesign& design,
                                            const SignalSource& source,
                                            const MonteCarloOptions& options,
                                            std::string label) {
  if (options.replications < 1 || options.length < 1 ||
      options.transient < 0 || options.jobs < 1) {
    return absl::InvalidArgumentError(
        "need replications >= 1, length >= 1, transient >= 0, jobs >= 1");
  }
  if (options.transient >= options.length) {
    return absl::InvalidArgumentError(
        absl::StrFormat("transient %d leaves no samples out of %d",
                        options.transient, options.length));
  }
  const int reps = options.replications;
  SimulationReport report;
  report.label = label.empty() ? std::string(MechanismKindName(design.kind))
                               : std::move(label);
  report.theoretical_mse = design.theoretical_mse;
  report.length = options.length;
  report.transient = options.transient;
  report.replications = reps;
  report.base_seed = options.base_seed;
  report.replication_mse.assign(reps, 0.0);
  for (int k = 0; k < reps; ++k) {
    report.source_seeds.push_back(DeriveSeed(options.base_seed, 2 * k));
    report.noise_seeds.push_back(DeriveSeed(options.base_seed, 2 * k + 1));
  }

  const int kept = std::clamp(options.trace_replications, 0, reps);
  std::vector<StreamReport> traces(static_cast<size_t>(kept));
  std::vector<absl::Status> statuses(reps, absl::OkStatus());
  std::vector<int> delays(reps, 0);
  const double mean = source.Mean();

  DPFILTER_ASSIGN_OR_RETURN(const MechanismInstance prototype,
                            MechanismInstance::Create(design, mean));

  auto run_one = [&](int k) {
    const std::vector<double> u =
        source.Sample(options.length, report.source_seeds[k]);
    FrontEndOptions front;
    front.seed = report.noise_seeds[k];
    front.disable_noise = options.disable_noise;
    MechanismInstance instance = prototype.Fork(front);
    RunOptions run;
    run.transient = options.transient;
    run.keep_trace = k < kept;
    absl::StatusOr<StreamReport> stream =
        instance.Run(u, std::nullopt, run);
    if (!stream.ok()) {
      statuses[k] = stream.status();
      return;
    }
    report.replication_mse[k] = stream->mse;
    delays[k] = stream->release_delay;
    if (k < kept) traces[k] = *std::move(stream);
  };

  const int workers = std::min(options.jobs, reps);
  if (workers == 1) {
    for (int k = 0; k < reps; ++k) run_one(k);
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (int k = next++; k < reps; k = next++) run_one(k);
      });
    }
    for (auto& t : pool) t.join();
  }
  for (const absl::Status& status : statuses) {
    if (!status.ok()) return status;
  }

  double sum = 0.0;
  for (double m : report.replication_mse) sum += m;
  report.empirical_mse = sum / reps;
  if (reps > 1) {
    double ss = 0.0;
    for (double m : report.replication_mse) {
      ss += (m - report.empirical_mse) * (m - report.empirical_mse);
    }
    report.standard_error = std::sqrt(ss / (reps - 1) / reps);
  }
  report.release_delay = delays[0];
  return MonteCarloResult{std::move(report), std::move(traces)};
}

void WriteReportText(const SimulationReport& report, std::ostream& out) {
  auto line = [&out](const char* key, const std::string& value) {
    out << key << ": " << value << '\n';
  };
  line("label", report.label);
  line("theoretical_mse", FormatDouble(report.theoretical_mse));
  line("theoretical_rmse", FormatDouble(report.theoretical_rmse()));
  line("empirical_mse", FormatDouble(report.empirical_mse));
  line("empirical_rmse", FormatDouble(report.empirical_rmse()));
  line("standard_error", FormatDouble(report.standard_error));
  line("mse_ci95_low", FormatDouble(report.mse_ci_low()));
  line("mse_ci95_high", FormatDouble(report.mse_ci_high()));
  line("rmse_ci95_low", FormatDouble(report.rmse_ci_low()));
  line("rmse_ci95_high", FormatDouble(report.rmse_ci_high()));
  line("length", absl::StrFormat("%d", report.length));
  line("transient", absl::StrFormat("%d", report.transient));
  line("release_delay", absl::StrFormat("%d", report.release_delay));
  line("replications", absl::StrFormat("%d", report.replications));
  line("base_seed", absl::StrFormat("%d", report.base_seed));
}

void WriteReportCsv(const SimulationReport& report, std::ostream& out) {
  out << "replication,source_seed,noise_seed,mse\n";
  for (int k = 0; k < report.replications; ++k) {
    out << k << ',' << report.source_seeds[k] << ',' << report.noise_seeds[k]
        << ',' << FormatDouble(report.replication_mse[k]) << '\n';
  }
}

absl::StatusOr<AdjacencyOracleResult> AdjacencyOracle(
    const RationalTransferFunction& g, int adjacency, int trials,
    int64_t length, uint64_t seed) {
  if (adjacency < 1 || trials < 1 || length < 1) {
    return absl::InvalidArgumentError(
        "need adjacency >= 1, trials >= 1 and length >= 1");
  }
  DPFILTER_ASSIGN_OR_RETURN(ImpulseResponse impulse, ComputeImpulseResponse(g));
  DPFILTER_ASSIGN_OR_RETURN(const double bound,
                            FilterSensitivity(impulse, 2.0, adjacency));
  const int64_t total = length + static_cast<int64_t>(impulse.values.size());

  std::mt19937_64 engine(seed);
  std::uniform_int_distribution<int> counts(0, 10);
  std::uniform_int_distribution<int64_t> position(0, length - 1);
  std::uniform_int_distribution<int> magnitude(1, adjacency);

  AdjacencyOracleResult result;
  result.bound = bound;
  result.trials = trials;
  std::vector<double> u(static_cast<size_t>(total), 0.0);
  for (int trial = 0; trial < trials; ++trial) {
    for (int64_t t = 0; t < length; ++t) u[t] = counts(engine);
    const int64_t t0 = position(engine);
    int k = trial == 0 ? adjacency : magnitude(engine);
    if (UniformDouble(engine) < 0.5) k = -k;
    RationalFilter a(g);
    RationalFilter b(g);
    double ss = 0.0;
    for (int64_t t = 0; t < total; ++t) {
      const double ya = a.StepUnchecked(u[t]);
      const double yb = b.StepUnchecked(t == t0 ? u[t] + k : u[t]);
      ss += (ya - yb) * (ya - yb);
    }
    const double distance = std::sqrt(ss);
    result.max_distance = std::max(result.max_distance, distance);
    if (std::abs(k) == adjacency) {
      result.max_distance_full_level =
          std::max(result.max_distance_full_level, distance);
    }
  }
  return result;
}

}  // namespace dpfilter
