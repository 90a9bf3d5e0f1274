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

#include "commands.h"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <locale>
#include <sstream>
#include <utility>
#include <variant>
#include <vector>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "absl/strings/string_view.h"
#include "dpfilter/lti.h"
#include "dpfilter/runtime.h"
#include "dpfilter/sim.h"
#include "json.hpp"

#ifndef DPFILTER_VERSION
#define DPFILTER_VERSION "unknown"
#endif

namespace dpfilter::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr int kResponseIntervals = 2048;

// Status codes used to pick the exit code.
absl::Status IoError(absl::string_view message) {
  return absl::UnavailableError(message);
}

int ExitCodeFor(const absl::Status& status) {
  if (status.ok()) return kExitOk;
  if (absl::IsUnavailable(status)) return kExitIoError;
  return kExitDesignError;
}

std::ostringstream NewStream() {
  std::ostringstream out;
  out.imbue(std::locale::classic());
  return out;
}

absl::Status WriteFile(const fs::path& path, const std::string& content) {
  std::error_code ec;
  fs::create_directories(path.parent_path(), ec);
  if (ec) {
    return IoError(
        absl::StrCat(path.parent_path().string(), ": ", ec.message()));
  }
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  file << content;
  file.close();
  if (!file) return IoError(absl::StrCat(path.string(), ": write failed"));
  return absl::OkStatus();
}

std::string Fnv1a64(absl::string_view data) {
  uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  return absl::StrFormat("%016x", hash);
}

json Manifest(const std::string& command, const ExperimentConfig& config,
              const std::vector<SimulationReport>& reports) {
  const json resolved = ToJson(config);
  json manifest = {
      {"manifest_version", 1},
      {"tool", "dpfilter"},
      {"tool_version", DPFILTER_VERSION},
      {"command", command},
      {"config", resolved},
      {"config_hash", Fnv1a64(resolved.dump())},
      {"base_seed", config.source.seed},
  };
  json runs = json::array();
  for (const SimulationReport& report : reports) {
    json seeds = json::array();
    for (int k = 0; k < report.replications; ++k) {
      seeds.push_back({{"source", report.source_seeds[k]},
                       {"noise", report.noise_seeds[k]}});
    }
    runs.push_back({{"label", report.label}, {"replication_seeds", seeds}});
  }
  if (!runs.empty()) manifest["runs"] = runs;
  return manifest;
}

absl::Status WriteManifest(const fs::path& dir, const std::string& command,
                           const ExperimentConfig& config,
                           const std::vector<SimulationReport>& reports) {
  return WriteFile(dir / "manifest.json",
                   Manifest(command, config, reports).dump(2) + "\n");
}

std::string DesignCsv(const MechanismDesign& design) {
  std::ostringstream out = NewStream();
  out << "omega,abs_G,abs_H,abs_B\n";
  const FrequencyGrid grid = *FrequencyGrid::Refined(kResponseIntervals);
  for (double w : grid.frequencies()) {
    out << FormatDouble(w) << ','
        << FormatDouble(std::abs(design.prefilter.Evaluate(w))) << ',';
    if (const auto* linear =
            std::get_if<LinearReconstruction>(&design.reconstruction)) {
      out << FormatDouble(std::abs(linear->Evaluate(w))) << ",\n";
    } else {
      const auto& df =
          std::get<DecisionFeedbackReconstruction>(design.reconstruction);
      out << FormatDouble(std::abs(df.forward.Evaluate(w))) << ','
          << FormatDouble(std::abs(1.0 + df.feedback.Evaluate(w))) << '\n';
    }
  }
  return out.str();
}

std::string DesignSummary(const MechanismDesign& design,
                          MechanismChoice choice) {
  std::ostringstream out = NewStream();
  auto line = [&out](absl::string_view key, const std::string& value) {
    out << key << ": " << value << '\n';
  };
  line("mechanism", std::string(MechanismChoiceName(choice)));
  line("epsilon", FormatDouble(design.params.epsilon()));
  line("delta", FormatDouble(design.params.delta()));
  line("d", absl::StrCat(design.params.adjacency()));
  line("kappa", FormatDouble(design.calibration.kappa));
  line("sensitivity", FormatDouble(design.calibration.sensitivity));
  line("sigma", FormatDouble(design.calibration.sigma));
  const absl::StatusOr<double> g_norm = H2Norm(design.prefilter);
  line("g_h2_norm", g_norm.ok() ? FormatDouble(*g_norm) : "nan");
  line("prefilter_taps", absl::StrCat(design.prefilter.numerator().size()));
  line("prefilter_fit_error", FormatDouble(design.prefilter_fit_error));
  line("theoretical_mse", FormatDouble(design.theoretical_mse));
  line("theoretical_rmse", FormatDouble(std::sqrt(design.theoretical_mse)));
  line("realized_mse", FormatDouble(design.realized_mse));
  line("realized_rmse", FormatDouble(std::sqrt(design.realized_mse)));
  line("release_delay", absl::StrCat(design.release_delay()));
  if (const auto* df =
          std::get_if<DecisionFeedbackReconstruction>(&design.reconstruction)) {
    line("detector_mse", FormatDouble(df->detector_mse));
    line("n_forward", absl::StrCat(df->forward.taps().size()));
    line("n_feedback",
         absl::StrCat(df->feedback.end_index() >= 1 ? df->feedback.end_index()
                                                    : 0));
    line("output_mode", df->output_mode == OutputMode::kSoft ? "soft" : "hard");
  }
  return out.str();
}

absl::Status WriteDesign(const fs::path& dir, const MechanismDesign& design,
                         MechanismChoice choice) {
  if (absl::Status s = WriteFile(dir / "design.csv", DesignCsv(design));
      !s.ok()) {
    return s;
  }
  return WriteFile(dir / "summary.txt", DesignSummary(design, choice));
}

MonteCarloOptions SimulationOptions(const ExperimentConfig& config, int jobs) {
  MonteCarloOptions options;
  options.length = config.run.length;
  options.replications = config.run.replications;
  options.base_seed = config.source.seed;
  options.transient = config.run.transient;
  options.jobs = jobs;
  options.trace_replications = config.run.trace_replications < 0
                                   ? config.run.replications
                                   : config.run.trace_replications;
  return options;
}

absl::Status WriteSimulation(const fs::path& dir,
                             const MonteCarloResult& result,
                             const ExperimentConfig& config) {
  std::ostringstream text = NewStream();
  WriteReportText(result.report, text);
  if (absl::Status s = WriteFile(dir / "report.txt", text.str()); !s.ok()) {
    return s;
  }
  std::ostringstream csv = NewStream();
  WriteReportCsv(result.report, csv);
  if (absl::Status s = WriteFile(dir / "report.csv", csv.str()); !s.ok()) {
    return s;
  }
  const size_t begin = static_cast<size_t>(config.run.transient);
  const size_t count = config.run.trace_samples == 0
                           ? SIZE_MAX
                           : static_cast<size_t>(config.run.trace_samples);
  for (size_t k = 0; k < result.traces.size(); ++k) {
    std::ostringstream trace = NewStream();
    WriteTraceCsv(result.traces[k], trace, begin, count);
    if (absl::Status s = WriteFile(
            dir / "traces" / absl::StrCat("rep_", k, ".csv"), trace.str());
        !s.ok()) {
      return s;
    }
  }
  return absl::OkStatus();
}

// ---------------------------------------------------------------------------

absl::Status CmdDesign(const ExperimentConfig& config, const Scenario& scenario,
                       const fs::path& dir, std::ostream& out) {
  absl::StatusOr<MechanismDesign> design =
      DesignMechanism(scenario, config, config.mechanism.kind);
  if (!design.ok()) return design.status();
  if (absl::Status s = WriteDesign(dir, *design, config.mechanism.kind);
      !s.ok()) {
    return s;
  }
  if (absl::Status s = WriteManifest(dir, "design", config, {}); !s.ok()) {
    return s;
  }
  out << DesignSummary(*design, config.mechanism.kind);
  return absl::OkStatus();
}

absl::Status CmdSimulate(const ExperimentConfig& config,
                         const Scenario& scenario, const fs::path& dir,
                         int jobs, std::ostream& out) {
  absl::StatusOr<MechanismDesign> design =
      DesignMechanism(scenario, config, config.mechanism.kind);
  if (!design.ok()) return design.status();
  absl::StatusOr<MonteCarloResult> result =
      MonteCarlo(*design, *scenario.source, SimulationOptions(config, jobs),
                 std::string(MechanismChoiceName(config.mechanism.kind)));
  if (!result.ok()) return result.status();
  if (absl::Status s = WriteDesign(dir, *design, config.mechanism.kind);
      !s.ok()) {
    return s;
  }
  if (absl::Status s = WriteSimulation(dir, *result, config); !s.ok()) return s;
  if (absl::Status s = WriteManifest(dir, "simulate", config, {result->report});
      !s.ok()) {
    return s;
  }
  WriteReportText(result->report, out);
  return absl::OkStatus();
}

absl::Status CmdEvaluate(const ExperimentConfig& config,
                         const Scenario& scenario, const fs::path& dir,
                         std::ostream& out) {
  const RationalTransferFunction& f = scenario.f;
  const PrivacyParams& params = scenario.params;
  PrefilterOptions prefilter;
  prefilter.grid_intervals = config.mechanism.grid_n;
  prefilter.fir_length = config.mechanism.fir_length;
  prefilter.profile_floor = config.mechanism.profile_floor;
  prefilter.realization = config.mechanism.profile_realization;
  QuadratureOptions quadrature;
  quadrature.initial_intervals = config.mechanism.grid_n;

  absl::StatusOr<double> lzf = LzfTheoreticalMse(f, params, quadrature);
  if (!lzf.ok()) return lzf.status();
  absl::StatusOr<double> lmmse =
      LmmseOptimalMse(f, scenario.psd, params, quadrature);
  if (!lmmse.ok()) return lmmse.status();
  absl::StatusOr<PrefilterVariants> variants =
      DesignDfPrefilterVariants(f, scenario.psd, params, prefilter);
  if (!variants.ok()) return variants.status();
  absl::StatusOr<double> lmmse_realized = LmmseTheoreticalMse(
      f, scenario.psd, variants->lmmse.g, params, quadrature);
  if (!lmmse_realized.ok()) return lmmse_realized.status();
  absl::StatusOr<double> df_lmmse =
      DfApproximateMse(f, scenario.psd, variants->lmmse.g, params, quadrature);
  if (!df_lmmse.ok()) return df_lmmse.status();
  absl::StatusOr<double> df_optimized =
      DfApproximateMse(f, scenario.psd, variants->df.g, params, quadrature);
  if (!df_optimized.ok()) return df_optimized.status();

  std::ostringstream text = NewStream();
  auto line = [&text](absl::string_view key, double value) {
    text << key << ": " << FormatDouble(value) << '\n';
  };
  line("kappa", Kappa(params));
  line("noise_scale", params.adjacency() * Kappa(params));
  line("lzf_theoretical_mse", *lzf);
  line("lzf_theoretical_rmse", std::sqrt(*lzf));
  line("lmmse_optimal_mse", *lmmse);
  line("lmmse_optimal_rmse", std::sqrt(*lmmse));
  line("lmmse_synthesized_prefilter_mse", *lmmse_realized);
  line("lmmse_synthesized_prefilter_rmse", std::sqrt(*lmmse_realized));
  line("df_approx_mse_lmmse_prefilter", *df_lmmse);
  line("df_approx_rmse_lmmse_prefilter", std::sqrt(*df_lmmse));
  line("df_approx_mse_optimized_prefilter", *df_optimized);
  line("df_approx_rmse_optimized_prefilter", std::sqrt(*df_optimized));
  line("half_power_lmmse_prefilter", HalfPowerFrequency(variants->lmmse.g));
  line("half_power_df_prefilter", HalfPowerFrequency(variants->df.g));
  if (absl::Status s = WriteFile(dir / "evaluate.txt", text.str()); !s.ok()) {
    return s;
  }
  if (absl::Status s = WriteManifest(dir, "evaluate", config, {}); !s.ok()) {
    return s;
  }
  out << text.str();
  return absl::OkStatus();
}

struct ComparisonRow {
  MechanismChoice choice;
  std::optional<double> theoretical_rmse;
  std::optional<double> correct_decision_rmse;
  SimulationReport report;
};

std::string OptionalDouble(const std::optional<double>& value) {
  return value.has_value() ? FormatDouble(*value) : "";
}

absl::Status CmdExamplePaper(const ExperimentConfig& config,
                             const Scenario& scenario, const fs::path& dir,
                             int jobs, std::ostream& out) {
  constexpr MechanismChoice kChoices[] = {
      MechanismChoice::kLzf, MechanismChoice::kLmmseNoncausal,
      MechanismChoice::kDfLmmsePrefilter,
      MechanismChoice::kDfOptimizedPrefilter};
  QuadratureOptions quadrature;
  quadrature.initial_intervals = config.mechanism.grid_n;

  std::vector<ComparisonRow> rows;
  std::vector<MechanismDesign> designs;
  for (MechanismChoice choice : kChoices) {
    absl::StatusOr<MechanismDesign> design =
        DesignMechanism(scenario, config, choice);
    if (!design.ok()) return design.status();
    const std::string name(MechanismChoiceName(choice));
    absl::StatusOr<MonteCarloResult> result = MonteCarlo(
        *design, *scenario.source, SimulationOptions(config, jobs), name);
    if (!result.ok()) return result.status();
    const fs::path sub = dir / name;
    if (absl::Status s = WriteDesign(sub, *design, choice); !s.ok()) return s;
    if (absl::Status s = WriteSimulation(sub, *result, config); !s.ok()) {
      return s;
    }
    ComparisonRow row{choice, std::nullopt, std::nullopt, result->report};
    if (choice == MechanismChoice::kLzf) {
      absl::StatusOr<double> mse =
          LzfTheoreticalMse(scenario.f, scenario.params, quadrature);
      if (!mse.ok()) return mse.status();
      row.theoretical_rmse = std::sqrt(*mse);
    } else if (choice == MechanismChoice::kLmmseNoncausal) {
      absl::StatusOr<double> mse = LmmseOptimalMse(scenario.f, scenario.psd,
                                                   scenario.params, quadrature);
      if (!mse.ok()) return mse.status();
      row.theoretical_rmse = std::sqrt(*mse);
    } else {
      row.correct_decision_rmse = std::sqrt(design->theoretical_mse);
    }
    rows.push_back(std::move(row));
    designs.push_back(*std::move(design));
  }

  std::ostringstream csv = NewStream();
  csv << "mechanism,theoretical_rmse,correct_decision_rmse,empirical_rmse,"
         "rmse_ci95_low,rmse_ci95_high,release_delay\n";
  std::ostringstream table = NewStream();
  table << absl::StrFormat("%-24s %12s %14s %12s %25s %6s\n", "mechanism",
                           "theory_rmse", "genie_df_rmse", "emp_rmse", "95% CI",
                           "delay");
  for (const ComparisonRow& row : rows) {
    const SimulationReport& r = row.report;
    csv << MechanismChoiceName(row.choice) << ','
        << OptionalDouble(row.theoretical_rmse) << ','
        << OptionalDouble(row.correct_decision_rmse) << ','
        << FormatDouble(r.empirical_rmse()) << ','
        << FormatDouble(r.rmse_ci_low()) << ','
        << FormatDouble(r.rmse_ci_high()) << ',' << r.release_delay << '\n';
    auto cell = [](const std::optional<double>& v) {
      return v.has_value() ? absl::StrFormat("%.4f", *v) : std::string("-");
    };
    table << absl::StrFormat(
        "%-24s %12s %14s %12.4f %25s %6d\n", MechanismChoiceName(row.choice),
        cell(row.theoretical_rmse), cell(row.correct_decision_rmse),
        r.empirical_rmse(),
        absl::StrFormat("[%.4f, %.4f]", r.rmse_ci_low(), r.rmse_ci_high()),
        r.release_delay);
  }
  if (absl::Status s = WriteFile(dir / "comparison.csv", csv.str()); !s.ok()) {
    return s;
  }
  if (absl::Status s = WriteFile(dir / "comparison.txt", table.str());
      !s.ok()) {
    return s;
  }

  // |G| of the three distinct prefilters (the DF-LMMSE mechanism reuses the
  // LMMSE one).
  std::ostringstream prefilters = NewStream();
  prefilters << "omega,abs_G_lzf,abs_G_lmmse,abs_G_df\n";
  const FrequencyGrid grid = *FrequencyGrid::Refined(kResponseIntervals);
  for (double w : grid.frequencies()) {
    prefilters << FormatDouble(w) << ','
               << FormatDouble(std::abs(designs[0].prefilter.Evaluate(w)))
               << ','
               << FormatDouble(std::abs(designs[1].prefilter.Evaluate(w)))
               << ','
               << FormatDouble(std::abs(designs[3].prefilter.Evaluate(w)))
               << '\n';
  }
  if (absl::Status s = WriteFile(dir / "prefilters.csv", prefilters.str());
      !s.ok()) {
    return s;
  }
  std::vector<SimulationReport> reports;
  for (const ComparisonRow& row : rows) reports.push_back(row.report);
  if (absl::Status s = WriteManifest(dir, "example-paper", config, reports);
      !s.ok()) {
    return s;
  }
  out << table.str();
  return absl::OkStatus();
}

}  // namespace

absl::StatusOr<MechanismDesign> DesignMechanism(const Scenario& scenario,
                                                const ExperimentConfig& config,
                                                MechanismChoice choice) {
  const MechanismConfig& m = config.mechanism;
  PrefilterOptions prefilter;
  prefilter.grid_intervals = m.grid_n;
  prefilter.fir_length = m.fir_length;
  prefilter.profile_floor = m.profile_floor;
  prefilter.realization = m.profile_realization;
  switch (choice) {
    case MechanismChoice::kLzf: {
      LzfOptions options;
      options.fir_length = m.fir_length;
      return DesignLzf(scenario.f, scenario.params, options);
    }
    case MechanismChoice::kLmmseNoncausal:
    case MechanismChoice::kLmmseCausal: {
      LmmseOptions options;
      options.prefilter = prefilter;
      options.causal = choice == MechanismChoice::kLmmseCausal;
      options.wiener.half_length = m.wiener_half_length;
      return DesignLmmse(scenario.f, scenario.psd, scenario.params, options);
    }
    case MechanismChoice::kDfLmmsePrefilter:
    case MechanismChoice::kDfOptimizedPrefilter: {
      absl::StatusOr<RealizedPrefilter> g =
          choice == MechanismChoice::kDfLmmsePrefilter
              ? DesignLmmsePrefilter(scenario.f, scenario.psd, scenario.params,
                                     prefilter)
              : DesignDfPrefilter(scenario.f, scenario.psd, scenario.params,
                                  prefilter);
      if (!g.ok()) return g.status();
      DfOptions options;
      options.delay = m.delay;
      options.n_forward = m.n_forward;
      options.n_feedback = m.n_feedback;
      options.decision = ResolveDecision(config);
      options.output_mode = m.output_mode;
      absl::StatusOr<MechanismDesign> design =
          DesignDf(scenario.f, scenario.psd, g->g, scenario.params, options);
      if (design.ok()) design->prefilter_fit_error = g->fit_error;
      return design;
    }
  }
  return absl::InvalidArgumentError("unknown mechanism");
}

int RunCommand(const CommandOptions& options, std::ostream& out,
               std::ostream& err) {
  absl::StatusOr<ExperimentConfig> config;
  if (options.config_path.has_value()) {
    config = LoadConfigFile(*options.config_path);
  } else if (options.command == "example-paper") {
    config = ExampleConfig();
  } else {
    err << "error: --config is required for " << options.command << '\n';
    return kExitConfigError;
  }
  if (!config.ok()) {
    err << "config error: " << config.status().message() << '\n';
    return kExitConfigError;
  }
  if (options.seed.has_value()) config->source.seed = *options.seed;
  if (options.jobs < 1) {
    err << "config error: --jobs must be >= 1\n";
    return kExitConfigError;
  }
  absl::StatusOr<Scenario> scenario = BuildScenario(*config);
  if (!scenario.ok()) {
    err << "config error: " << scenario.status().message() << '\n';
    return kExitConfigError;
  }

  fs::path dir = kDefaultOutputDir;
  if (options.out.has_value()) {
    dir = *options.out;
  } else if (const char* env = std::getenv(kOutputDirEnv);
             env != nullptr && *env != '\0') {
    dir = env;
  } else if (!config->run.output_dir.empty()) {
    dir = config->run.output_dir;
  }

  absl::Status status;
  if (options.command == "design") {
    status = CmdDesign(*config, *scenario, dir, out);
  } else if (options.command == "simulate") {
    status = CmdSimulate(*config, *scenario, dir, options.jobs, out);
  } else if (options.command == "evaluate") {
    status = CmdEvaluate(*config, *scenario, dir, out);
  } else if (options.command == "example-paper") {
    status = CmdExamplePaper(*config, *scenario, dir, options.jobs, out);
  } else {
    err << "error: unknown command " << options.command << '\n';
    return kExitConfigError;
  }
  if (!status.ok()) {
    err << (absl::IsUnavailable(status) ? "i/o error: " : "design error: ")
        << status.message() << '\n';
  }
  return ExitCodeFor(status);
}

}  // namespace dpfilter::cli
