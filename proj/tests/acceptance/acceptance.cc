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

// Acceptance suite: one PASS/FAIL line per criterion, using the contract
// tolerances. Exits nonzero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "absl/strings/str_format.h"
#include "dpfilter/design.h"
#include "dpfilter/lti.h"
#include "dpfilter/privacy.h"
#include "dpfilter/runtime.h"
#include "dpfilter/sim.h"
#include "dpfilter/sources.h"
#include "dpfilter/spectral.h"
#include "dpfilter/waterfill.h"
#include "waterfill_oracle.h"

#ifdef DPFILTER_ACCEPTANCE_HAS_CLI
#include "commands.h"
#endif

namespace dpfilter {
namespace {

namespace fs = std::filesystem;
constexpr double kPi = std::numbers::pi;

struct Verdict {
  bool pass = false;
  std::string detail;
};

Verdict Fail(const absl::Status& status) {
  return {false, absl::StrCat("error: ", status.message())};
}

#define ACCEPT_ASSIGN_OR_FAIL(lhs, expr)              \
  auto lhs##_or = (expr);                             \
  if (!lhs##_or.ok()) return Fail(lhs##_or.status()); \
  auto lhs = *std::move(lhs##_or)

// The worked example: first-order target, symmetric two-state input with
// stay probability 3/4 on +-1, eps = ln 3, delta = 0.05, d = 1.
struct Example {
  RationalTransferFunction f =
      *RationalTransferFunction::Create({1.0, 0.995}, {1.0, -0.995});
  RationalPsd psd = *RationalPsd::Create(0.75, {}, {0.5});
  PrivacyParams params = *PrivacyParams::Create(std::log(3.0), 0.05, 1);
  MarkovSource source = *MarkovSource::Symmetric(0.75, 1.0);
};

class Suite {
 public:
  absl::StatusOr<const MechanismDesign*> Lzf() {
    if (!lzf_.has_value()) {
      absl::StatusOr<MechanismDesign> d =
          DesignLzf(example_.f, example_.params);
      if (!d.ok()) return d.status();
      lzf_ = *std::move(d);
    }
    return &*lzf_;
  }

  absl::StatusOr<const MechanismDesign*> Lmmse() {
    if (!lmmse_.has_value()) {
      absl::StatusOr<MechanismDesign> d =
          DesignLmmse(example_.f, example_.psd, example_.params);
      if (!d.ok()) return d.status();
      lmmse_ = *std::move(d);
    }
    return &*lmmse_;
  }

  absl::StatusOr<SimulationReport> Simulate(const MechanismDesign& design,
                                            const std::string& label) {
    MonteCarloOptions options;
    options.length = 100'000;
    options.replications = 20;
    options.transient = 10'000;
    options.base_seed = 1;
    absl::StatusOr<MonteCarloResult> result =
        MonteCarlo(design, example_.source, options, label);
    if (!result.ok()) return result.status();
    return result->report;
  }

  const Example& example() const { return example_; }

  Verdict Kappa1();
  Verdict ExampleValues2();
  Verdict MonteCarlo3();
  Verdict Waterfill4();
  Verdict Spectral5();
  Verdict Sensitivity6();
  Verdict Calibration7();
  Verdict Cancellation8();
  Verdict DecisionFeedback9();
  Verdict Reproducibility10();

 private:
  Example example_;
  std::optional<MechanismDesign> lzf_;
  std::optional<MechanismDesign> lmmse_;
};

double Seconds(std::chrono::steady_clock::duration d) {
  return std::chrono::duration<double>(d).count();
}

Verdict Suite::Kappa1() {
  const auto start = std::chrono::steady_clock::now();
  absl::StatusOr<PrivacyParams> params =
      PrivacyParams::Create(std::log(2.0), 0.05, 1);
  if (!params.ok()) return Fail(params.status());
  const double kappa = Kappa(*params);
  const double elapsed = Seconds(std::chrono::steady_clock::now() - start);
  const bool pass = std::abs(kappa - 2.65) <= 0.01 && elapsed < 1e-3;
  return {pass, absl::StrFormat("kappa(ln 2, 0.05) = %.6f (target 2.65 +- "
                                "0.01), computed in %.3g ms (limit 1 ms)",
                                kappa, elapsed * 1e3)};
}

Verdict Suite::ExampleValues2() {
  const auto start = std::chrono::steady_clock::now();
  QuadratureOptions quadrature;
  quadrature.initial_intervals = 4096;
  ACCEPT_ASSIGN_OR_FAIL(
      lzf, LzfTheoreticalMse(example_.f, example_.params, quadrature));
  ACCEPT_ASSIGN_OR_FAIL(lmmse, LmmseOptimalMse(example_.f, example_.psd,
                                               example_.params, quadrature));
  const double elapsed = Seconds(std::chrono::steady_clock::now() - start);
  const double lzf_rmse = std::sqrt(lzf);
  const double lmmse_rmse = std::sqrt(lmmse);
  const bool pass = std::abs(lzf_rmse - 8.82) <= 0.05 &&
                    std::abs(lmmse_rmse - 7.43) <= 0.05 && elapsed < 10.0;
  return {pass,
          absl::StrFormat("LZF theoretical RMSE %.4f (target 8.82 +- 0.05), "
                          "LMMSE theoretical RMSE %.4f (target 7.43 +- 0.05), "
                          "%.2f s (limit 10 s)",
                          lzf_rmse, lmmse_rmse, elapsed)};
}

Verdict Suite::MonteCarlo3() {
  const auto start = std::chrono::steady_clock::now();
  ACCEPT_ASSIGN_OR_FAIL(lzf, Lzf());
  ACCEPT_ASSIGN_OR_FAIL(lmmse, Lmmse());
  ACCEPT_ASSIGN_OR_FAIL(lzf_report, Simulate(*lzf, "lzf"));
  ACCEPT_ASSIGN_OR_FAIL(lmmse_report, Simulate(*lmmse, "lmmse-noncausal"));
  const double elapsed = Seconds(std::chrono::steady_clock::now() - start);
  const double lzf_gap =
      std::abs(lzf_report.empirical_rmse() / lzf_report.theoretical_rmse() - 1);
  const double lmmse_gap = std::abs(
      lmmse_report.empirical_rmse() / lmmse_report.theoretical_rmse() - 1);
  const bool pass = lzf_gap <= 0.03 && lmmse_gap <= 0.05 && elapsed < 120.0;
  return {
      pass,
      absl::StrFormat(
          "LZF empirical RMSE %.4f vs theoretical %.4f (%.2f%%, limit 3%%); "
          "LMMSE empirical RMSE %.4f vs theoretical %.4f (%.2f%%, limit "
          "5%%); T = 1e5, 20 replications, %.1f s (limit 120 s)",
          lzf_report.empirical_rmse(), lzf_report.theoretical_rmse(),
          100 * lzf_gap, lmmse_report.empirical_rmse(),
          lmmse_report.theoretical_rmse(), 100 * lmmse_gap, elapsed)};
}

Verdict Suite::Waterfill4() {
  std::mt19937_64 rng(4);
  double worst_kkt = 0.0;
  double worst_constraint = 0.0;
  double worst_gap = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const WaterfillProblem p = oracle::RandomProblem(rng);
    const std::vector<double> lmmse_oracle = oracle::LmmseOracle(p);
    const std::vector<double> df_oracle = oracle::DfOracle(p);
    ACCEPT_ASSIGN_OR_FAIL(lmmse, SolveWaterfillLmmse(p));
    ACCEPT_ASSIGN_OR_FAIL(df, SolveWaterfillDf(p));
    for (const auto* s : {&lmmse, &df}) {
      worst_kkt = std::max(worst_kkt, s->kkt_residual);
      worst_constraint = std::max(worst_constraint, s->constraint_residual);
    }
    for (size_t i = 0; i < p.size(); ++i) {
      worst_gap = std::max(worst_gap, std::abs(lmmse.x[i] - lmmse_oracle[i]));
      worst_gap = std::max(worst_gap, std::abs(df.x[i] - df_oracle[i]));
    }
  }
  // Two points with equal weights and x0 + x1 = 2.
  ACCEPT_ASSIGN_OR_FAIL(lmmse_case,
                        WaterfillProblem::Create({4, 1}, {1, 1}, {0.5, 0.5}));
  ACCEPT_ASSIGN_OR_FAIL(df_case,
                        WaterfillProblem::Create({1, 1}, {3, 1}, {0.5, 0.5}));
  ACCEPT_ASSIGN_OR_FAIL(lmmse_two, SolveWaterfillLmmse(lmmse_case));
  ACCEPT_ASSIGN_OR_FAIL(df_two, SolveWaterfillDf(df_case));
  // (beta x + 1)^2 proportional to alpha: x0 + 1 = 2 (x1 + 1).
  const double lmmse_two_error = std::max(std::abs(lmmse_two.x[0] - 5.0 / 3.0),
                                          std::abs(lmmse_two.x[1] - 1.0 / 3.0));
  // Water level: x_i = mu - 1 / beta_i.
  const double df_two_error = std::max(
      {std::abs(df_two.x[0] - 4.0 / 3.0), std::abs(df_two.x[1] - 2.0 / 3.0),
       std::abs(df_two.multiplier - 5.0 / 3.0)});
  const bool pass = worst_kkt <= 1e-8 && worst_constraint <= 1e-9 &&
                    worst_gap <= 1e-6 && lmmse_two_error <= 1e-9 &&
                    df_two_error <= 1e-9;
  return {pass,
          absl::StrFormat(
              "100 random problems per solver: max KKT residual %.2e (limit "
              "1e-8), max constraint residual %.2e (limit 1e-9), max oracle "
              "gap %.2e (limit 1e-6); DF two-point (4/3, 2/3), mu = 5/3 error "
              "%.1e; LMMSE two-point alpha = (4, 1), beta = (1, 1) gives "
              "(%.9f, %.9f), hand KKT (5/3, 1/3) error %.1e (limit 1e-9)",
              worst_kkt, worst_constraint, worst_gap, df_two_error,
              lmmse_two.x[0], lmmse_two.x[1], lmmse_two_error)};
}

Verdict Suite::Spectral5() {
  ACCEPT_ASSIGN_OR_FAIL(grid, FrequencyGrid::Uniform(4096));
  std::vector<RationalPsd> cases = {example_.psd};
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> radius(0.05, 0.97);
  std::uniform_real_distribution<double> angle(0.0, kPi);
  for (int k = 0; k < 20; ++k) {
    std::vector<std::complex<double>> zeros;
    std::vector<std::complex<double>> poles;
    for (auto* roots : {&zeros, &poles}) {
      const double r = radius(rng);
      const double a = angle(rng);
      roots->push_back(std::polar(r, a));
      roots->push_back(std::polar(r, -a));
      roots->push_back({radius(rng) * (k % 2 == 0 ? 1.0 : -1.0), 0.0});
    }
    ACCEPT_ASSIGN_OR_FAIL(psd, RationalPsd::Create(0.5 + k, zeros, poles));
    cases.push_back(psd);
  }
  double worst_reconstruction = 0.0;
  double worst_root = 0.0;
  for (const RationalPsd& psd : cases) {
    ACCEPT_ASSIGN_OR_FAIL(factor, FactorRational(psd));
    for (double w : grid.frequencies()) {
      const double model = factor.gamma_sq * std::norm(factor.q.Evaluate(w));
      worst_reconstruction = std::max(worst_reconstruction,
                                      std::abs(model / psd.Evaluate(w) - 1.0));
    }
    for (const auto& roots : {factor.q.Poles(), factor.q.Zeros()}) {
      for (const auto& root : roots) {
        worst_root = std::max(worst_root, std::abs(root));
      }
    }
  }
  // Grid (cepstral) route against the rational route on the example input.
  ACCEPT_ASSIGN_OR_FAIL(rational, FactorRational(example_.psd));
  const int taps = 64;
  ACCEPT_ASSIGN_OR_FAIL(rational_impulse,
                        ComputeImpulseResponse(rational.q, taps));
  ACCEPT_ASSIGN_OR_FAIL(cepstral,
                        FactorGrid(GridPsd::Sample(example_.psd, grid), taps));
  double worst_tap = 0.0;
  for (int i = 0; i < taps; ++i) {
    worst_tap = std::max(worst_tap, std::abs(cepstral.q.numerator()[i] -
                                             rational_impulse.values[i]));
  }
  const double gain_gap = std::abs(cepstral.gamma_sq / rational.gamma_sq - 1.0);
  const bool pass = worst_reconstruction <= 1e-8 && worst_root < 1.0 - 1e-9 &&
                    worst_tap <= 1e-5;
  return {pass,
          absl::StrFormat(
              "rational route: max relative reconstruction error %.2e on 4097 "
              "points over %d PSDs (limit 1e-8), max |root| %.6f (limit "
              "1 - 1e-9); cepstral vs rational on the example input: max tap "
              "gap %.2e over %d taps (limit 1e-5), gain gap %.1e",
              worst_reconstruction, static_cast<int>(cases.size()), worst_root,
              worst_tap, taps, gain_gap)};
}

Verdict Suite::Sensitivity6() {
  ACCEPT_ASSIGN_OR_FAIL(lzf, Lzf());
  ACCEPT_ASSIGN_OR_FAIL(lmmse, Lmmse());
  struct Case {
    const char* name;
    RationalTransferFunction g;
    int adjacency;
  };
  const std::vector<Case> cases = {
      {"LZF prefilter", lzf->prefilter, 1},
      {"LMMSE prefilter", lmmse->prefilter, 1},
      {"target F", example_.f, 1},
      {"target F, d = 3", example_.f, 3},
  };
  bool pass = true;
  std::string detail;
  uint64_t seed = 6;
  for (const Case& c : cases) {
    ACCEPT_ASSIGN_OR_FAIL(r,
                          AdjacencyOracle(c.g, c.adjacency, 200, 256, ++seed));
    const double excess = r.max_distance - r.bound;
    const double attained = std::abs(r.max_distance_full_level - r.bound);
    pass = pass && excess <= 1e-9 && attained <= 1e-9;
    absl::StrAppendFormat(&detail,
                          "%s%s: bound %.6f, max excess %.1e, gap at |k| = d "
                          "%.1e",
                          detail.empty() ? "" : "; ", c.name, r.bound,
                          std::max(excess, 0.0), attained);
  }
  return {pass, detail + " (200 pairs each, limits 1e-9)"};
}

Verdict Suite::Calibration7() {
  ACCEPT_ASSIGN_OR_FAIL(lzf, Lzf());
  ACCEPT_ASSIGN_OR_FAIL(lmmse, Lmmse());
  bool pass = true;
  std::string detail;
  uint64_t seed = 70;
  for (const MechanismDesign* design : {lzf, lmmse}) {
    ++seed;
    ACCEPT_ASSIGN_OR_FAIL(norm, H2Norm(design->prefilter));
    const double expected =
        design->params.adjacency() * Kappa(design->params) * norm;
    const double calibration_gap =
        std::abs(design->calibration.sigma / expected - 1.0);
    FrontEndOptions options;
    options.seed = seed;
    options.record_noise = true;
    ACCEPT_ASSIGN_OR_FAIL(instance,
                          MechanismInstance::Create(*design, 0.0, options));
    const int n = 100'000;
    const std::vector<double> u = example_.source.Sample(n, seed);
    RunOptions run;
    run.keep_trace = false;
    absl::StatusOr<StreamReport> report = instance.Run(u, std::nullopt, run);
    if (!report.ok()) return Fail(report.status());
    const std::vector<double>& noise = instance.front_end().recorded_noise();
    double second_moment = 0.0;
    for (double x : noise) second_moment += x * x;
    second_moment /= noise.size();
    const double variance = expected * expected;
    const double se = variance * std::sqrt(2.0 / n);
    const double z = (second_moment - variance) / se;
    const bool draws_ok = instance.front_end().noise_draws() == n;
    pass = pass && calibration_gap <= 1e-12 && std::abs(z) <= 3.0 && draws_ok;
    absl::StrAppendFormat(
        &detail,
        "%s%s: sigma %.6f vs d kappa ||G||_2 %.6f (relative gap %.1e), noise "
        "variance %.4f vs %.4f (%.2f standard errors, limit 3), %lld draws",
        detail.empty() ? "" : "; ",
        std::string(MechanismKindName(design->kind)), design->calibration.sigma,
        expected, calibration_gap, second_moment, variance, z,
        static_cast<long long>(instance.front_end().noise_draws()));
  }
  return {pass, detail};
}

Verdict Suite::Cancellation8() {
  ACCEPT_ASSIGN_OR_FAIL(lzf, Lzf());
  FrontEndOptions options;
  options.disable_noise = true;
  std::mt19937_64 rng(8);
  std::normal_distribution<double> normal(0.0, 1.0);
  const int n = 20'000;
  std::vector<double> gaussian(n);
  for (double& x : gaussian) x = normal(rng);
  const std::vector<std::vector<double>> inputs = {
      example_.source.Sample(n, 80), gaussian};
  double worst = 0.0;
  double scale = 0.0;
  for (const std::vector<double>& u : inputs) {
    ACCEPT_ASSIGN_OR_FAIL(instance,
                          MechanismInstance::Create(*lzf, 0.0, options));
    RunOptions run;
    run.transient = 0;
    absl::StatusOr<StreamReport> report = instance.Run(u, std::nullopt, run);
    if (!report.ok()) return Fail(report.status());
    for (int64_t t = 10 * instance.total_order(); t < n; ++t) {
      const StreamSample& s = report->trace[t];
      if (!s.y_hat.has_value()) continue;
      worst = std::max(worst, std::abs(*s.y_hat - s.y_ref));
      scale = std::max(scale, std::abs(s.y_ref));
    }
  }
  return {worst <= 1e-9,
          absl::StrFormat("noiseless LZF pipeline: max |y_hat - F u| = %.2e "
                          "(limit 1e-9, max |F u| = %.1f) on two-state and "
                          "Gaussian inputs of length %d after the transient",
                          worst, scale, n)};
}

Verdict Suite::DecisionFeedback9() {
  ACCEPT_ASSIGN_OR_FAIL(lmmse, Lmmse());
  ACCEPT_ASSIGN_OR_FAIL(
      lmmse_g, DesignLmmsePrefilter(example_.f, example_.psd, example_.params));
  ACCEPT_ASSIGN_OR_FAIL(
      df_g, DesignDfPrefilter(example_.f, example_.psd, example_.params));
  DfOptions options;  // delay 5
  ACCEPT_ASSIGN_OR_FAIL(df_lmmse, DesignDf(example_.f, example_.psd, lmmse_g.g,
                                           example_.params, options));
  ACCEPT_ASSIGN_OR_FAIL(df_opt, DesignDf(example_.f, example_.psd, df_g.g,
                                         example_.params, options));
  ACCEPT_ASSIGN_OR_FAIL(lmmse_report, Simulate(*lmmse, "lmmse-noncausal"));
  ACCEPT_ASSIGN_OR_FAIL(df_lmmse_report, Simulate(df_lmmse, "df-lmmse"));
  ACCEPT_ASSIGN_OR_FAIL(df_opt_report, Simulate(df_opt, "df-optimized"));
  const bool beats_lmmse =
      df_lmmse_report.rmse_ci_high() < lmmse_report.rmse_ci_low();
  const bool beats_df_opt =
      df_lmmse_report.rmse_ci_high() < df_opt_report.rmse_ci_low();
  auto row = [](const SimulationReport& r) {
    return absl::StrFormat("%.4f [%.4f, %.4f]", r.empirical_rmse(),
                           r.rmse_ci_low(), r.rmse_ci_high());
  };
  return {
      beats_lmmse && beats_df_opt,
      absl::StrFormat("empirical RMSE with 95%% CI over 20 replications: "
                      "DF (LMMSE prefilter, delay %d) %s, LMMSE %s, DF "
                      "(optimized prefilter) %s; DF-LMMSE below LMMSE: %s, "
                      "below DF-optimized: %s",
                      options.delay, row(df_lmmse_report), row(lmmse_report),
                      row(df_opt_report), beats_lmmse ? "yes" : "no",
                      beats_df_opt ? "yes" : "no")};
}

std::string ReadFile(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

Verdict Suite::Reproducibility10() {
#ifdef DPFILTER_ACCEPTANCE_HAS_CLI
  const fs::path root =
      fs::temp_directory_path() /
      absl::StrFormat(
          "dpfilter_acceptance_%lld",
          static_cast<long long>(
              std::chrono::steady_clock::now().time_since_epoch().count()));
  const fs::path first = root / "first";
  const fs::path second = root / "second";
  std::ostringstream sink;
  cli::CommandOptions options;
  options.command = "example-paper";
  options.out = first.string();
  if (const int code = cli::RunCommand(options, sink, sink); code != 0) {
    return {false,
            absl::StrFormat("example-paper exited %d: %s", code, sink.str())};
  }
  options.config_path = (first / "manifest.json").string();
  options.out = second.string();
  if (const int code = cli::RunCommand(options, sink, sink); code != 0) {
    return {false, absl::StrFormat("rerun exited %d: %s", code, sink.str())};
  }
  int compared = 0;
  std::vector<std::string> mismatched;
  for (const auto& entry : fs::recursive_directory_iterator(first)) {
    if (!entry.is_regular_file()) continue;
    const fs::path relative = fs::relative(entry.path(), first);
    const std::string extension = relative.extension().string();
    if (extension != ".csv" && extension != ".json") continue;
    ++compared;
    if (!fs::exists(second / relative) ||
        ReadFile(entry.path()) != ReadFile(second / relative)) {
      mismatched.push_back(relative.string());
    }
  }
  fs::remove_all(root);
  std::string detail = absl::StrFormat(
      "example-paper rerun from its manifest: %d CSV/JSON files compared, %d "
      "differ",
      compared, static_cast<int>(mismatched.size()));
  if (!mismatched.empty()) absl::StrAppend(&detail, " (", mismatched[0], ")");
  return {compared > 0 && mismatched.empty(), detail};
#else
  return {false, "the command-line tool was not built"};
#endif
}

int Main() {
  Suite suite;
  struct Criterion {
    int id;
    const char* name;
    std::function<Verdict()> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "privacy constant", [&] { return suite.Kappa1(); }},
      {2, "worked-example theoretical RMSE",
       [&] { return suite.ExampleValues2(); }},
      {3, "Monte Carlo agrees with theory",
       [&] { return suite.MonteCarlo3(); }},
      {4, "water-filling solvers", [&] { return suite.Waterfill4(); }},
      {5, "spectral factorization", [&] { return suite.Spectral5(); }},
      {6, "sensitivity oracle", [&] { return suite.Sensitivity6(); }},
      {7, "noise calibration", [&] { return suite.Calibration7(); }},
      {8, "noiseless cancellation", [&] { return suite.Cancellation8(); }},
      {9, "decision feedback improvement",
       [&] { return suite.DecisionFeedback9(); }},
      {10, "reproducibility", [&] { return suite.Reproducibility10(); }},
  };
  int failures = 0;
  for (const Criterion& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    const Verdict v = c.run();
    const double elapsed = Seconds(std::chrono::steady_clock::now() - start);
    failures += v.pass ? 0 : 1;
    std::printf("%s %2d %s: %s [%.2f s]\n", v.pass ? "PASS" : "FAIL", c.id,
                c.name, v.detail.c_str(), elapsed);
    std::fflush(stdout);
  }
  std::printf("%d of %d criteria passed\n",
              static_cast<int>(criteria.size()) - failures,
              static_cast<int>(criteria.size()));
  return failures == 0 ? 0 : 1;
}

}  // namespace
}  // namespace dpfilter

int main() { return dpfilter::Main(); }
