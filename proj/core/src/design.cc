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


#include "dpfilter/design.h"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <utility>
#include <vector>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "design_internal.h"
#include "fft.h"
#include "status_macros.h"

namespace dpfilter {
namespace internal {

double NoiseScaleSquared(const PrivacyParams& params) {
  const double dk = params.adjacency() * Kappa(params);
  return dk * dk;
}

absl::StatusOr<std::vector<std::complex<double>>> FullResponse(
    const RationalTransferFunction& system, size_t m) {
  std::vector<std::complex<double>> num =
      RealForwardDft(system.numerator(), m);
  if (system.is_fir()) {
    if (system.denominator()[0] != 1.0) {
      for (auto& v : num) v /= system.denominator()[0];
    }
    return num;
  }
  if (!system.IsStable()) {
    return absl::FailedPreconditionError(absl::StrFormat(
        "system has a pole of modulus %.12g on or outside the unit circle",
        system.MaxPoleModulus()));
  }
  const std::vector<std::complex<double>> den =
      RealForwardDft(system.denominator(), m);
  for (size_t k = 0; k < m; ++k) num[k] /= den[k];
  return num;
}

absl::Status CheckFftSize(size_t m) {
  if (m < 16 || (m & (m - 1)) != 0) {
    return absl::InvalidArgumentError(
        absl::StrCat("fft_size must be a power of two >= 16, got ", m));
  }
  return absl::OkStatus();
}

}  // namespace internal

namespace {

constexpr double kPi = std::numbers::pi;

using internal::CheckFftSize;
using internal::FullResponse;
using internal::NoiseScaleSquared;

absl::Status CheckStableTarget(const RationalTransferFunction& f) {
  if (!f.IsStable()) {
    return absl::FailedPreconditionError(absl::StrFormat(
        "target filter is unstable (max pole modulus %.12g)",
        f.MaxPoleModulus()));
  }
  return absl::OkStatus();
}

// Length of the prefix of `energy_profile` (squared taps ordered by distance
// from the origin) whose complement holds at most `budget`.
int TruncationLength(const std::vector<double>& squares, double budget,
                     int cap) {
  double tail = 0.0;
  int length = static_cast<int>(squares.size());
  while (length > 0 && tail + squares[length - 1] <= budget) {
    tail += squares[length - 1];
    --length;
  }
  return std::min(std::max(length, 1), cap);
}

// Realizes a profile given by `profile` on an FFT grid as a unit-norm
// minimum-phase FIR.
absl::StatusOr<RealizedPrefilter> RealizeProfile(
    const FrequencyGrid& design_grid, WaterfillSolution solution,
    const std::function<double(double)>& closed_form,
    const PrefilterOptions& options) {
  if (options.fir_length < 1) {
    return absl::InvalidArgumentError("fir_length must be positive");
  }
  if (!(options.profile_floor >= 0.0 && options.profile_floor < 1.0)) {
    return absl::InvalidArgumentError("profile_floor must lie in [0, 1)");
  }
  const size_t m = std::max(
      options.factor.min_fft_size,
      internal::NextPowerOfTwo(8 * static_cast<size_t>(options.fir_length)));
  DPFILTER_ASSIGN_OR_RETURN(FrequencyGrid half,
                            FrequencyGrid::Uniform(static_cast<int>(m / 2)));
  std::vector<double> values(half.size());
  if (options.realization == ProfileRealization::kClosedForm) {
    for (size_t k = 0; k < half.size(); ++k) values[k] = closed_form(half[k]);
  } else {
    const auto freqs = design_grid.frequencies();
    size_t j = 0;
    for (size_t k = 0; k < half.size(); ++k) {
      const double w = half[k];
      while (j + 2 < freqs.size() && freqs[j + 1] < w) ++j;
      const double t = std::clamp((w - freqs[j]) / (freqs[j + 1] - freqs[j]),
                                  0.0, 1.0);
      values[k] = (1.0 - t) * solution.x[j] + t * solution.x[j + 1];
    }
  }
  const double peak = *std::max_element(values.begin(), values.end());
  if (!(peak > 0.0) || !std::isfinite(peak)) {
    return absl::InternalError("allocation profile is identically zero");
  }
  const double floor = options.profile_floor * peak;
  for (double& v : values) v = std::max(v, floor);

  DPFILTER_ASSIGN_OR_RETURN(GridPsd magnitude,
                            GridPsd::Create(std::move(half), std::move(values)));
  GridFactorOptions factor = options.factor;
  factor.min_fft_size = m;
  DPFILTER_ASSIGN_OR_RETURN(
      MinPhaseFir fir,
      MinPhaseFirFromMagnitude(magnitude, options.fir_length, factor));
  double energy = 0.0;
  for (double t : fir.taps) energy += t * t;
  const double scale = 1.0 / std::sqrt(energy);
  for (double& t : fir.taps) t *= scale;
  return RealizedPrefilter{RationalTransferFunction::Fir(std::move(fir.taps)),
                           std::move(solution), design_grid,
                           fir.reconstruction_error};
}

}  // namespace

std::string_view MechanismKindName(MechanismKind kind) {
  switch (kind) {
    case MechanismKind::kLzf:
      return "lzf";
    case MechanismKind::kLmmseNoncausal:
      return "lmmse";
    case MechanismKind::kLmmseCausal:
      return "lmmse_causal";
    case MechanismKind::kDecisionFeedback:
      return "df";
  }
  return "unknown";
}

DecisionDevice DecisionDevice::Sign(double level) {
  return DecisionDevice(Kind::kSign, std::abs(level), 0.0, 0.0);
}

absl::StatusOr<DecisionDevice> DecisionDevice::Quantizer(double step,
                                                         double offset) {
  if (!(step > 0.0) || !std::isfinite(step) || !std::isfinite(offset)) {
    return absl::InvalidArgumentError(
        "quantizer needs a positive finite step and a finite offset");
  }
  return DecisionDevice(Kind::kQuantizer, 0.0, step, offset);
}

double DecisionDevice::Decide(double x) const {
  if (kind_ == Kind::kSign) return x >= 0.0 ? level_ : -level_;
  return offset_ + step_ * std::round((x - offset_) / step_);
}

int MechanismDesign::release_delay() const {
  if (const auto* linear = std::get_if<LinearReconstruction>(&reconstruction)) {
    return linear->stage.anticausal_extent();
  }
  return std::get<DecisionFeedbackReconstruction>(reconstruction)
      .forward.anticausal_extent();
}

absl::StatusOr<double> RefinedIntegral(const std::function<double(double)>& f,
                                       const QuadratureOptions& options) {
  if (options.initial_intervals < 2 ||
      options.max_intervals < options.initial_intervals ||
      !(options.relative_tolerance > 0.0)) {
    return absl::InvalidArgumentError("invalid quadrature options");
  }
  double previous = std::numeric_limits<double>::quiet_NaN();
  for (int n = options.initial_intervals;; n *= 2) {
    DPFILTER_ASSIGN_OR_RETURN(FrequencyGrid grid,
                              FrequencyGrid::Refined(n, options.min_spacing));
    std::vector<double> values(grid.size());
    for (size_t i = 0; i < grid.size(); ++i) {
      values[i] = f(grid[i]);
      if (!std::isfinite(values[i])) {
        return absl::InvalidArgumentError(absl::StrFormat(
            "integrand is not finite at omega = %.17g", grid[i]));
      }
    }
    const double value = grid.Integrate(values);
    if (std::isfinite(previous) &&
        std::abs(value - previous) <=
            options.relative_tolerance *
                std::max(std::abs(value), std::numeric_limits<double>::min())) {
      return value;
    }
    // At the cap the finest value is the best available estimate.
    if (n > options.max_intervals / 2) return value;
    previous = value;
  }
}

// ---------------------------------------------------------------------------
// LZF

absl::StatusOr<double> LzfTheoreticalMse(const RationalTransferFunction& f,
                                         const PrivacyParams& params,
                                         const QuadratureOptions& options) {
  DPFILTER_RETURN_IF_ERROR(CheckStableTarget(f));
  DPFILTER_ASSIGN_OR_RETURN(
      const double mean_magnitude,
      RefinedIntegral([&f](double w) { return std::abs(f.Evaluate(w)); },
                      options));
  return NoiseScaleSquared(params) * mean_magnitude * mean_magnitude;
}

absl::StatusOr<double> LzfMse(const RationalTransferFunction& f,
                              const RationalTransferFunction& g,
                              const PrivacyParams& params) {
  DPFILTER_ASSIGN_OR_RETURN(
      RationalTransferFunction h,
      RationalTransferFunction::Create(
          PolynomialMultiply(f.numerator(), g.denominator()),
          PolynomialMultiply(f.denominator(), g.numerator())));
  DPFILTER_ASSIGN_OR_RETURN(const double g_norm, H2Norm(g));
  const absl::StatusOr<double> h_norm = H2Norm(h);
  if (!h_norm.ok()) {
    return absl::FailedPreconditionError(absl::StrCat(
        "F G^-1 is unstable: the prefilter is not minimum phase (",
        h_norm.status().message(), ")"));
  }
  return NoiseScaleSquared(params) * g_norm * g_norm * *h_norm * *h_norm;
}

absl::StatusOr<MechanismDesign> DesignLzf(const RationalTransferFunction& f,
                                          const PrivacyParams& params,
                                          const LzfOptions& options) {
  DPFILTER_RETURN_IF_ERROR(CheckStableTarget(f));
  if (options.fir_length < 1) {
    return absl::InvalidArgumentError("fir_length must be positive");
  }
  const size_t m = std::max(
      options.factor.min_fft_size,
      internal::NextPowerOfTwo(8 * static_cast<size_t>(options.fir_length)));
  DPFILTER_ASSIGN_OR_RETURN(FrequencyGrid half,
                            FrequencyGrid::Uniform(static_cast<int>(m / 2)));
  // |G|^2 proportional to |F|.
  std::vector<double> magnitude(half.size());
  for (size_t k = 0; k < half.size(); ++k) {
    magnitude[k] = std::abs(f.Evaluate(half[k]));
    if (!(magnitude[k] > 0.0)) {
      return absl::FailedPreconditionError(absl::StrFormat(
          "|F| vanishes at omega = %.17g; the zero-forcing inverse does not "
          "exist",
          half[k]));
    }
  }
  DPFILTER_ASSIGN_OR_RETURN(
      GridPsd target, GridPsd::Create(std::move(half), std::move(magnitude)));
  GridFactorOptions factor = options.factor;
  factor.min_fft_size = m;
  DPFILTER_ASSIGN_OR_RETURN(
      MinPhaseFir fir,
      MinPhaseFirFromMagnitude(target, options.fir_length, factor));
  double energy = 0.0;
  for (double t : fir.taps) energy += t * t;
  for (double& t : fir.taps) t /= std::sqrt(energy);

  double max_zero = 0.0;
  for (const auto& z : PolynomialRoots(fir.taps)) {
    max_zero = std::max(max_zero, std::abs(z));
  }
  if (!(max_zero < 1.0 - kUnitCircleTolerance)) {
    return absl::FailedPreconditionError(absl::StrFormat(
        "synthesized prefilter has a zero of modulus %.12g; increase "
        "fir_length",
        max_zero));
  }

  RationalTransferFunction g = RationalTransferFunction::Fir(fir.taps);
  DPFILTER_ASSIGN_OR_RETURN(
      RationalTransferFunction post,
      RationalTransferFunction::Create(
          f.numerator(), PolynomialMultiply(f.denominator(), fir.taps)));
  DPFILTER_ASSIGN_OR_RETURN(NoiseCalibration calibration, Calibrate(g, params));
  DPFILTER_ASSIGN_OR_RETURN(const double bound, LzfTheoreticalMse(f, params));
  DPFILTER_ASSIGN_OR_RETURN(const double realized, LzfMse(f, g, params));
  return MechanismDesign{
      .kind = MechanismKind::kLzf,
      .target = f,
      .prefilter = std::move(g),
      .params = params,
      .calibration = calibration,
      .reconstruction = LinearReconstruction{TwoSidedFir::Causal({1.0}),
                                             std::move(post)},
      .theoretical_mse = bound,
      .realized_mse = realized,
      .prefilter_fit_error = fir.reconstruction_error,
  };
}

// ---------------------------------------------------------------------------
// LMMSE

absl::StatusOr<WaterfillProblem> BuildWaterfillProblem(
    const RationalTransferFunction& f, const RationalPsd& input_psd,
    const PrivacyParams& params, const FrequencyGrid& grid) {
  DPFILTER_RETURN_IF_ERROR(CheckStableTarget(f));
  const double scale = NoiseScaleSquared(params);
  std::vector<double> alpha(grid.size());
  std::vector<double> beta(grid.size());
  for (size_t i = 0; i < grid.size(); ++i) {
    const double p = input_psd.Evaluate(grid[i]);
    alpha[i] = p * std::norm(f.Evaluate(grid[i]));
    beta[i] = p / scale;
  }
  return WaterfillProblem::Create(std::move(alpha), std::move(beta),
                                  grid.weights());
}

absl::StatusOr<double> LmmseOptimalMse(const RationalTransferFunction& f,
                                       const RationalPsd& input_psd,
                                       const PrivacyParams& params,
                                       const QuadratureOptions& options) {
  double previous = std::numeric_limits<double>::quiet_NaN();
  for (int n = options.initial_intervals;; n *= 2) {
    DPFILTER_ASSIGN_OR_RETURN(FrequencyGrid grid,
                              FrequencyGrid::Refined(n, options.min_spacing));
    DPFILTER_ASSIGN_OR_RETURN(
        WaterfillProblem problem,
        BuildWaterfillProblem(f, input_psd, params, grid));
    DPFILTER_ASSIGN_OR_RETURN(WaterfillSolution solution,
                              SolveWaterfillLmmse(problem));
    const double value = LmmseObjective(problem, solution.x);
    if (std::isfinite(previous) &&
        std::abs(value - previous) <=
            options.relative_tolerance * std::abs(value)) {
      return value;
    }
    if (n > options.max_intervals / 2) return value;
    previous = value;
  }
}

absl::StatusOr<double> LmmseTheoreticalMse(const RationalTransferFunction& f,
                                           const RationalPsd& input_psd,
                                           const FrequencyGrid& grid,
                                           const std::vector<double>& x,
                                           const PrivacyParams& params) {
  if (x.size() != grid.size()) {
    return absl::InvalidArgumentError("profile and grid sizes differ");
  }
  DPFILTER_ASSIGN_OR_RETURN(WaterfillProblem problem,
                            BuildWaterfillProblem(f, input_psd, params, grid));
  double total = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] >= 0.0)) {
      return absl::InvalidArgumentError("profile must be nonnegative");
    }
    total += grid.weights()[i] * x[i];
  }
  // A zero profile releases nothing: the error is the prior error.
  if (total == 0.0) return LmmseObjective(problem, x);
  std::vector<double> normalized(x.size());
  for (size_t i = 0; i < x.size(); ++i) normalized[i] = x[i] / total;
  return LmmseObjective(problem, normalized);
}

absl::StatusOr<double> LmmseTheoreticalMse(const RationalTransferFunction& f,
                                           const RationalPsd& input_psd,
                                           const RationalTransferFunction& g,
                                           const PrivacyParams& params,
                                           const QuadratureOptions& options) {
  DPFILTER_RETURN_IF_ERROR(CheckStableTarget(f));
  DPFILTER_ASSIGN_OR_RETURN(const double g_norm, H2Norm(g));
  if (g_norm == 0.0) {
    return RefinedIntegral(
        [&](double w) {
          return input_psd.Evaluate(w) * std::norm(f.Evaluate(w));
        },
        options);
  }
  const double noise = NoiseScaleSquared(params) * g_norm * g_norm;
  return RefinedIntegral(
      [&](double w) {
        const double p = input_psd.Evaluate(w);
        return p * std::norm(f.Evaluate(w)) /
               (1.0 + p * std::norm(g.Evaluate(w)) / noise);
      },
      options);
}

absl::StatusOr<double> ReconstructionMse(const RationalTransferFunction& f,
                                         const RationalPsd& input_psd,
                                         const RationalTransferFunction& g,
                                         double sigma,
                                         const LinearReconstruction& h,
                                         const QuadratureOptions& options) {
  DPFILTER_RETURN_IF_ERROR(CheckStableTarget(f));
  if (!h.post.IsStable()) {
    return absl::FailedPreconditionError("reconstruction filter is unstable");
  }
  const double noise = sigma * sigma;
  return RefinedIntegral(
      [&](double w) {
        const std::complex<double> hw = h.Evaluate(w);
        return std::norm(f.Evaluate(w) - hw * g.Evaluate(w)) *
                   input_psd.Evaluate(w) +
               std::norm(hw) * noise;
      },
      options);
}

absl::StatusOr<WienerFilter> NoncausalWiener(const RationalTransferFunction& f,
                                             const RationalPsd& input_psd,
                                             const RationalTransferFunction& g,
                                             double sigma,
                                             const WienerOptions& options) {
  const size_t m = options.fft_size;
  DPFILTER_RETURN_IF_ERROR(CheckFftSize(m));
  if (!(sigma >= 0.0) || options.half_length < 0) {
    return absl::InvalidArgumentError("invalid Wiener filter parameters");
  }
  DPFILTER_ASSIGN_OR_RETURN(auto f_response, FullResponse(f, m));
  DPFILTER_ASSIGN_OR_RETURN(auto g_response, FullResponse(g, m));
  std::vector<std::complex<double>> h_response(m);
  for (size_t k = 0; k < m; ++k) {
    const double p = input_psd.Evaluate(2.0 * kPi * k / m);
    const double den = p * std::norm(g_response[k]) + sigma * sigma;
    h_response[k] =
        den > 0.0 ? p * f_response[k] * std::conj(g_response[k]) / den : 0.0;
  }
  const std::vector<double> h = internal::RealInverseDft(h_response);
  const size_t half = m / 2;
  double total = 0.0;
  for (double t : h) total += t * t;

  int causal = 0;
  int anticausal = 0;
  if (options.half_length > 0) {
    causal = anticausal =
        std::min(options.half_length, static_cast<int>(half) - 1);
  } else {
    std::vector<double> forward(half);
    std::vector<double> backward(half - 1);
    for (size_t n = 0; n < half; ++n) forward[n] = h[n] * h[n];
    for (size_t n = 1; n < half; ++n) backward[n - 1] = h[m - n] * h[m - n];
    const double budget = 0.5 * options.tail_tolerance * total;
    causal = TruncationLength(forward, budget, options.max_half_length + 1) - 1;
    anticausal = backward.empty()
                     ? 0
                     : TruncationLength(backward, budget,
                                        options.max_half_length);
    // TruncationLength never returns 0; undo the floor for the backward side
    // when no anticausal tap carries energy.
    if (anticausal == 1 && backward[0] <= budget) anticausal = 0;
  }
  std::vector<double> taps;
  taps.reserve(static_cast<size_t>(anticausal + causal + 1));
  double kept = 0.0;
  for (int n = -anticausal; n <= causal; ++n) {
    const double t = h[n < 0 ? m + n : static_cast<size_t>(n)];
    taps.push_back(t);
    kept += t * t;
  }
  DPFILTER_ASSIGN_OR_RETURN(TwoSidedFir fir,
                            TwoSidedFir::Create(std::move(taps), -anticausal));
  const double dropped = total > 0.0 ? std::max(0.0, total - kept) / total : 0.0;
  return WienerFilter{std::move(fir), dropped,
                      dropped > kWienerTruncationWarning};
}

absl::StatusOr<CausalWienerFilter> CausalWiener(
    const RationalTransferFunction& f, const RationalPsd& input_psd,
    const RationalTransferFunction& g, double sigma,
    const CausalWienerOptions& options) {
  const size_t m = options.fft_size;
  DPFILTER_RETURN_IF_ERROR(CheckFftSize(m));
  if (!(sigma >= 0.0) || options.factor_length < 1 || options.max_length < 1) {
    return absl::InvalidArgumentError("invalid causal Wiener parameters");
  }
  DPFILTER_ASSIGN_OR_RETURN(auto f_response, FullResponse(f, m));
  DPFILTER_ASSIGN_OR_RETURN(auto g_response, FullResponse(g, m));
  const size_t half = m / 2;
  std::vector<double> p(m);
  for (size_t k = 0; k < m; ++k) p[k] = input_psd.Evaluate(2.0 * kPi * k / m);

  DPFILTER_ASSIGN_OR_RETURN(FrequencyGrid half_grid,
                            FrequencyGrid::Uniform(static_cast<int>(half)));
  std::vector<double> pv(half + 1);
  for (size_t k = 0; k <= half; ++k) {
    pv[k] = p[k] * std::norm(g_response[k]) + sigma * sigma;
  }
  DPFILTER_ASSIGN_OR_RETURN(GridPsd pv_grid,
                            GridPsd::Create(std::move(half_grid), std::move(pv)));
  GridFactorOptions factor_options;
  factor_options.min_fft_size = m;
  DPFILTER_ASSIGN_OR_RETURN(
      SpectralFactor factor,
      FactorGrid(pv_grid, options.factor_length, factor_options));
  DPFILTER_ASSIGN_OR_RETURN(
      RationalTransferFunction inverse,
      RationalTransferFunction::Create({1.0}, factor.q.numerator()));
  if (!inverse.IsStable()) {
    return absl::FailedPreconditionError(
        "innovations factor of the release spectrum is not minimum phase; "
        "increase factor_length");
  }
  const std::vector<std::complex<double>> q_response =
      internal::RealForwardDft(factor.q.numerator(), m);
  std::vector<std::complex<double>> l_response(m);
  for (size_t k = 0; k < m; ++k) {
    l_response[k] = p[k] * f_response[k] * std::conj(g_response[k]) /
                    std::conj(q_response[k]);
  }
  const std::vector<double> l = internal::RealInverseDft(l_response);
  std::vector<double> squares(half);
  double total = 0.0;
  for (size_t n = 0; n < half; ++n) {
    squares[n] = l[n] * l[n];
    total += squares[n];
  }
  const int length =
      TruncationLength(squares, options.tail_tolerance * total,
                       options.max_length);
  std::vector<double> taps(l.begin(), l.begin() + length);
  double kept = 0.0;
  for (double& t : taps) {
    kept += t * t;
    t /= factor.gamma_sq;
  }
  CausalWienerFilter out;
  out.numerator = TwoSidedFir::Causal(std::move(taps));
  out.inverse_factor = std::move(inverse);
  out.truncation_energy = total > 0.0 ? std::max(0.0, total - kept) / total : 0.0;
  out.pv_factor = std::move(factor);
  return out;
}

absl::StatusOr<RealizedPrefilter> DesignLmmsePrefilter(
    const RationalTransferFunction& f, const RationalPsd& input_psd,
    const PrivacyParams& params, const PrefilterOptions& options) {
  DPFILTER_ASSIGN_OR_RETURN(FrequencyGrid grid,
                            FrequencyGrid::Refined(options.grid_intervals));
  DPFILTER_ASSIGN_OR_RETURN(WaterfillProblem problem,
                            BuildWaterfillProblem(f, input_psd, params, grid));
  DPFILTER_ASSIGN_OR_RETURN(WaterfillSolution solution,
                            SolveWaterfillLmmse(problem));
  const double scale = NoiseScaleSquared(params);
  const double lambda = solution.multiplier;
  auto closed_form = [&](double w) {
    const double p = input_psd.Evaluate(w);
    return LmmseAllocation(p * std::norm(f.Evaluate(w)), p / scale, lambda);
  };
  return RealizeProfile(grid, std::move(solution), closed_form, options);
}

absl::StatusOr<RealizedPrefilter> DesignDfPrefilter(
    const RationalTransferFunction& f, const RationalPsd& input_psd,
    const PrivacyParams& params, const PrefilterOptions& options) {
  DPFILTER_ASSIGN_OR_RETURN(FrequencyGrid grid,
                            FrequencyGrid::Refined(options.grid_intervals));
  DPFILTER_ASSIGN_OR_RETURN(WaterfillProblem problem,
                            BuildWaterfillProblem(f, input_psd, params, grid));
  DPFILTER_ASSIGN_OR_RETURN(WaterfillSolution solution,
                            SolveWaterfillDf(problem));
  const double scale = NoiseScaleSquared(params);
  const double mu = solution.multiplier;
  auto closed_form = [&](double w) {
    return DfAllocation(input_psd.Evaluate(w) / scale, mu);
  };
  return RealizeProfile(grid, std::move(solution), closed_form, options);
}

absl::StatusOr<PrefilterVariants> DesignDfPrefilterVariants(
    const RationalTransferFunction& f, const RationalPsd& input_psd,
    const PrivacyParams& params, const PrefilterOptions& options) {
  DPFILTER_ASSIGN_OR_RETURN(RealizedPrefilter df,
                            DesignDfPrefilter(f, input_psd, params, options));
  DPFILTER_ASSIGN_OR_RETURN(
      RealizedPrefilter lmmse,
      DesignLmmsePrefilter(f, input_psd, params, options));
  return PrefilterVariants{std::move(df), std::move(lmmse)};
}

absl::StatusOr<MechanismDesign> DesignLmmseWithPrefilter(
    const RationalTransferFunction& f, const RationalPsd& input_psd,
    const RationalTransferFunction& g, const PrivacyParams& params,
    const LmmseOptions& options) {
  DPFILTER_RETURN_IF_ERROR(CheckStableTarget(f));
  DPFILTER_ASSIGN_OR_RETURN(RationalTransferFunction prefilter,
                            NormalizePrefilter(g));
  DPFILTER_ASSIGN_OR_RETURN(NoiseCalibration calibration,
                            Calibrate(prefilter, params));
  const double sigma = calibration.sigma;
  if (options.causal) {
    DPFILTER_ASSIGN_OR_RETURN(
        CausalWienerFilter causal,
        CausalWiener(f, input_psd, prefilter, sigma, options.causal_wiener));
    LinearReconstruction h = causal.AsReconstruction();
    DPFILTER_ASSIGN_OR_RETURN(
        const double mse,
        ReconstructionMse(f, input_psd, prefilter, sigma, h));
    return MechanismDesign{
        .kind = MechanismKind::kLmmseCausal,
        .target = f,
        .prefilter = std::move(prefilter),
        .params = params,
        .calibration = calibration,
        .reconstruction = std::move(h),
        .theoretical_mse = mse,
        .realized_mse = mse,
    };
  }
  DPFILTER_ASSIGN_OR_RETURN(
      WienerFilter wiener,
      NoncausalWiener(RationalTransferFunction::Identity(), input_psd,
                      prefilter, sigma, options.wiener));
  LinearReconstruction h{std::move(wiener.h), f};
  DPFILTER_ASSIGN_OR_RETURN(
      const double theoretical,
      LmmseTheoreticalMse(f, input_psd, prefilter, params));
  DPFILTER_ASSIGN_OR_RETURN(
      const double realized,
      ReconstructionMse(f, input_psd, prefilter, sigma, h));
  return MechanismDesign{
      .kind = MechanismKind::kLmmseNoncausal,
      .target = f,
      .prefilter = std::move(prefilter),
      .params = params,
      .calibration = calibration,
      .reconstruction = std::move(h),
      .theoretical_mse = theoretical,
      .realized_mse = realized,
  };
}

absl::StatusOr<MechanismDesign> DesignLmmse(const RationalTransferFunction& f,
                                            const RationalPsd& input_psd,
                                            const PrivacyParams& params,
                                            const LmmseOptions& options) {
  DPFILTER_ASSIGN_OR_RETURN(
      RealizedPrefilter prefilter,
      DesignLmmsePrefilter(f, input_psd, params, options.prefilter));
  DPFILTER_ASSIGN_OR_RETURN(
      MechanismDesign design,
      DesignLmmseWithPrefilter(f, input_psd, prefilter.g, params, options));
  design.prefilter_fit_error = prefilter.fit_error;
  return design;
}

// ---------------------------------------------------------------------------
// Decision feedback (the equalizer itself lives in equalizer.cc)

absl::StatusOr<double> DfApproximateMse(const RationalTransferFunction& f,
                                        const RationalPsd& input_psd,
                                        const RationalTransferFunction& g,
                                        const PrivacyParams& params,
                                        const QuadratureOptions& options) {
  DPFILTER_RETURN_IF_ERROR(CheckStableTarget(f));
  DPFILTER_ASSIGN_OR_RETURN(const double g_norm, H2Norm(g));
  if (!(g_norm > 0.0)) {
    return absl::InvalidArgumentError("prefilter is zero");
  }
  const double noise = NoiseScaleSquared(params) * g_norm * g_norm;
  DPFILTER_ASSIGN_OR_RETURN(
      const double log_input,
      RefinedIntegral([&](double w) { return std::log(input_psd.Evaluate(w)); },
                      options));
  DPFILTER_ASSIGN_OR_RETURN(
      const double log_target,
      RefinedIntegral([&](double w) { return std::log(std::norm(f.Evaluate(w))); },
                      options));
  DPFILTER_ASSIGN_OR_RETURN(
      const double log_snr,
      RefinedIntegral(
          [&](double w) {
            return std::log1p(input_psd.Evaluate(w) *
                              std::norm(g.Evaluate(w)) / noise);
          },
          options));
  return std::exp(log_input + log_target - log_snr);
}

absl::StatusOr<IdealFeedback> IdealFeedbackFilter(
    const RationalTransferFunction& f, const RationalPsd& input_psd,
    const RationalTransferFunction& g, const PrivacyParams& params, int length,
    size_t fft_size) {
  DPFILTER_RETURN_IF_ERROR(CheckFftSize(fft_size));
  DPFILTER_RETURN_IF_ERROR(CheckStableTarget(f));
  if (length < 1) return absl::InvalidArgumentError("length must be positive");
  const size_t m = fft_size;
  const size_t half = m / 2;
  DPFILTER_ASSIGN_OR_RETURN(const double g_norm, H2Norm(g));
  const double noise = NoiseScaleSquared(params) * g_norm * g_norm;

  DPFILTER_ASSIGN_OR_RETURN(FrequencyGrid grid,
                            FrequencyGrid::Uniform(static_cast<int>(half)));
  std::vector<double> snr(grid.size());
  std::vector<double> target(grid.size());
  for (size_t k = 0; k < grid.size(); ++k) {
    snr[k] = input_psd.Evaluate(grid[k]) * std::norm(g.Evaluate(grid[k])) /
                 noise +
             1.0;
    target[k] = std::norm(f.Evaluate(grid[k]));
  }
  GridFactorOptions factor_options;
  factor_options.min_fft_size = m;
  DPFILTER_ASSIGN_OR_RETURN(GridPsd snr_psd, GridPsd::Create(grid, snr));
  DPFILTER_ASSIGN_OR_RETURN(GridPsd target_psd, GridPsd::Create(grid, target));
  const int factor_length = static_cast<int>(half);
  DPFILTER_ASSIGN_OR_RETURN(SpectralFactor q,
                            FactorGrid(snr_psd, factor_length, factor_options));
  DPFILTER_ASSIGN_OR_RETURN(
      SpectralFactor q_f, FactorGrid(target_psd, factor_length, factor_options));
  DPFILTER_ASSIGN_OR_RETURN(SpectralFactor q_u, FactorRational(input_psd));

  const auto q_response = internal::RealForwardDft(q.q.numerator(), m);
  const auto qf_response = internal::RealForwardDft(q_f.q.numerator(), m);
  DPFILTER_ASSIGN_OR_RETURN(auto qu_response, FullResponse(q_u.q, m));
  std::vector<std::complex<double>> b_response(m);
  for (size_t k = 0; k < m; ++k) {
    b_response[k] = q_response[k] / (qu_response[k] * qf_response[k]);
  }
  const std::vector<double> b = internal::RealInverseDft(b_response);
  double total = 0.0;
  double anticausal = 0.0;
  for (size_t n = 0; n < m; ++n) {
    total += b[n] * b[n];
    if (n >= half) anticausal += b[n] * b[n];
  }
  IdealFeedback out;
  out.b.assign(b.begin(),
               b.begin() + std::min(static_cast<size_t>(length), half));
  out.anticausal_energy = total > 0.0 ? anticausal / total : 0.0;
  return out;
}

// ---------------------------------------------------------------------------
// Helpers

double HalfPowerFrequency(const RationalTransferFunction& g, int intervals) {
  intervals = std::max(intervals, 2);
  std::vector<double> power(static_cast<size_t>(intervals) + 1);
  for (int i = 0; i <= intervals; ++i) {
    power[i] = std::norm(g.Evaluate(kPi * i / intervals));
  }
  const double half = 0.5 * *std::max_element(power.begin(), power.end());
  const size_t peak = static_cast<size_t>(
      std::max_element(power.begin(), power.end()) - power.begin());
  for (size_t i = peak + 1; i < power.size(); ++i) {
    if (power[i] <= half) {
      const double t = (power[i - 1] - half) / (power[i - 1] - power[i]);
      return kPi * (static_cast<double>(i - 1) + t) / intervals;
    }
  }
  return kPi;
}

absl::StatusOr<RationalTransferFunction> NormalizePrefilter(
    const RationalTransferFunction& g) {
  DPFILTER_ASSIGN_OR_RETURN(const double norm, H2Norm(g));
  if (!(norm > 0.0) || !std::isfinite(norm)) {
    return absl::InvalidArgumentError("prefilter has zero or infinite H2 norm");
  }
  return g.Scaled(1.0 / norm);
}

}  // namespace dpfilter
