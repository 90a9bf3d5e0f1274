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

// Design-time construction of private filter approximations.
//
// Every mechanism releases v = G u + n, with G a prefilter of unit H2 norm and
// n white Gaussian noise calibrated from G alone, then reconstructs an
// estimate of y = F u from v:
//
//   * LZF:   |G|^2 proportional to |F|, H = F G^-1. Input-independent error.
//   * LMMSE: |G|^2 from the water-filling allocation against the noncausal
//            Wiener error, H the (noncausal or causal) Wiener filter.
//   * DF:    forward filter, decision device on the input alphabet and
//            strictly causal feedback of past decisions, then F.
//
// All spectral integrals use trapezoidal quadrature on [0, pi] with the grid
// refined near omega = 0 and doubled until successive values agree.

#ifndef DPFILTER_DESIGN_H_
#define DPFILTER_DESIGN_H_

#include <complex>
#include <functional>
#include <string_view>
#include <variant>
#include <vector>

#include "absl/status/statusor.h"
#include "dpfilter/lti.h"
#include "dpfilter/privacy.h"
#include "dpfilter/spectral.h"
#include "dpfilter/waterfill.h"

namespace dpfilter {

enum class MechanismKind {
  kLzf,
  kLmmseNoncausal,
  kLmmseCausal,
  kDecisionFeedback,
};

std::string_view MechanismKindName(MechanismKind kind);

class DecisionDevice {
 public:
  enum class Kind { kSign, kQuantizer };

  // Outputs +level for x >= 0 and -level otherwise.
  static DecisionDevice Sign(double level = 1.0);
  // Nearest point of offset + step * Z.
  static absl::StatusOr<DecisionDevice> Quantizer(double step,
                                                  double offset = 0.0);

  double Decide(double x) const;

  Kind kind() const { return kind_; }
  double level() const { return level_; }
  double step() const { return step_; }
  double offset() const { return offset_; }

 private:
  DecisionDevice(Kind kind, double level, double step, double offset)
      : kind_(kind), level_(level), step_(step), offset_(offset) {}

  Kind kind_;
  double level_;
  double step_;
  double offset_;
};

enum class OutputMode {
  kSoft,  // publish F applied to the detector input
  kHard,  // publish F applied to the decisions
};

// v -> stage (two-sided FIR, realized with latency) -> post (rational).
struct LinearReconstruction {
  TwoSidedFir stage = TwoSidedFir::Causal({1.0});
  RationalTransferFunction post = RationalTransferFunction::Identity();

  std::complex<double> Evaluate(double omega) const {
    return stage.Evaluate(omega) * post.Evaluate(omega);
  }
};

struct DecisionFeedbackReconstruction {
  // H1, support -delay .. n_forward - delay - 1.
  TwoSidedFir forward = TwoSidedFir::Causal({1.0});
  // H2, strictly causal (start_index 1).
  TwoSidedFir feedback = TwoSidedFir::Zero();
  DecisionDevice decision = DecisionDevice::Sign();
  OutputMode output_mode = OutputMode::kSoft;
  RationalTransferFunction output_filter = RationalTransferFunction::Identity();
  // E|u_{t} - u~_{t}|^2 assuming correct past decisions.
  double detector_mse = 0.0;
};

struct MechanismDesign {
  MechanismKind kind;
  RationalTransferFunction target;     // F
  RationalTransferFunction prefilter;  // G, ||G||_2 = 1
  PrivacyParams params;
  NoiseCalibration calibration;
  std::variant<LinearReconstruction, DecisionFeedbackReconstruction>
      reconstruction;
  // LZF: the lower bound; LMMSE: the noncausal Wiener error for the realized
  // G (causal: the causal filter's error); DF: the F-weighted error under
  // correct decisions.
  double theoretical_mse = 0.0;
  // Error of the filters as actually realized (truncations included).
  double realized_mse = 0.0;
  // Relative |G|^2 reconstruction error of the prefilter synthesis.
  double prefilter_fit_error = 0.0;

  int release_delay() const;
};

// ---------------------------------------------------------------------------
// Quadrature

struct QuadratureOptions {
  int initial_intervals = 4096;
  int max_intervals = 1 << 18;
  double relative_tolerance = 1e-6;
  double min_spacing = 1e-6;
};

// (1/pi) int_0^pi f, doubling the refined grid until two successive values
// agree to the relative tolerance.
absl::StatusOr<double> RefinedIntegral(const std::function<double(double)>& f,
                                       const QuadratureOptions& options = {});

// ---------------------------------------------------------------------------
// LZF

// d^2 kappa^2 ((1/2pi) int |F|)^2.
absl::StatusOr<double> LzfTheoreticalMse(const RationalTransferFunction& f,
                                         const PrivacyParams& params,
                                         const QuadratureOptions& options = {});

// d^2 kappa^2 ||G||_2^2 ||F G^-1||_2^2 for a given minimum-phase G.
absl::StatusOr<double> LzfMse(const RationalTransferFunction& f,
                              const RationalTransferFunction& g,
                              const PrivacyParams& params);

struct LzfOptions {
  int fir_length = 512;
  GridFactorOptions factor;
};

absl::StatusOr<MechanismDesign> DesignLzf(const RationalTransferFunction& f,
                                          const PrivacyParams& params,
                                          const LzfOptions& options = {});

// ---------------------------------------------------------------------------
// LMMSE

// alpha_i = P_u |F|^2, beta_i = P_u / (d kappa)^2 with trapezoidal weights.
absl::StatusOr<WaterfillProblem> BuildWaterfillProblem(
    const RationalTransferFunction& f, const RationalPsd& input_psd,
    const PrivacyParams& params, const FrequencyGrid& grid);

// Error of the water-filling optimum solved on refined grids of increasing
// size until successive values agree.
absl::StatusOr<double> LmmseOptimalMse(const RationalTransferFunction& f,
                                       const RationalPsd& input_psd,
                                       const PrivacyParams& params,
                                       const QuadratureOptions& options = {});

// Noncausal-Wiener error for a normalized profile x = |G|^2 / ||G||^2 on
// `grid` (no refinement: the profile only exists on the grid).
absl::StatusOr<double> LmmseTheoreticalMse(const RationalTransferFunction& f,
                                           const RationalPsd& input_psd,
                                           const FrequencyGrid& grid,
                                           const std::vector<double>& x,
                                           const PrivacyParams& params);
// Same for a realized prefilter, with refined quadrature.
absl::StatusOr<double> LmmseTheoreticalMse(
    const RationalTransferFunction& f, const RationalPsd& input_psd,
    const RationalTransferFunction& g, const PrivacyParams& params,
    const QuadratureOptions& options = {});

// (1/2pi) int |F - H G|^2 P_u + |H|^2 sigma^2 for any linear reconstruction.
absl::StatusOr<double> ReconstructionMse(const RationalTransferFunction& f,
                                         const RationalPsd& input_psd,
                                         const RationalTransferFunction& g,
                                         double sigma,
                                         const LinearReconstruction& h,
                                         const QuadratureOptions& options = {});

struct WienerOptions {
  size_t fft_size = size_t{1} << 16;
  // > 0: keep taps -half_length..half_length. 0: choose each side so it drops
  // at most tail_tolerance / 2 of the energy, capped at max_half_length.
  int half_length = 0;
  double tail_tolerance = 1e-8;
  int max_half_length = 8192;
};

struct WienerFilter {
  TwoSidedFir h = TwoSidedFir::Zero();
  // Fraction of the untruncated energy dropped by truncation.
  double truncation_energy = 0.0;
  // Set when truncation_energy exceeds 1e-4.
  bool truncation_warning = false;
};

inline constexpr double kWienerTruncationWarning = 1e-4;

// H = P_u F G(e^{-jw}) / (P_u |G|^2 + sigma^2), sampled, inverse transformed
// and truncated.
absl::StatusOr<WienerFilter> NoncausalWiener(const RationalTransferFunction& f,
                                             const RationalPsd& input_psd,
                                             const RationalTransferFunction& g,
                                             double sigma,
                                             const WienerOptions& options = {});

struct CausalWienerOptions {
  int factor_length = 512;
  size_t fft_size = size_t{1} << 16;
  double tail_tolerance = 1e-10;
  int max_length = 16384;
};

// H = (1 / (gamma_v^2 Q_v)) [P_yv / Q_v(z^-1)]_+ realized as a causal FIR
// followed by the all-pole 1 / Q_v.
struct CausalWienerFilter {
  TwoSidedFir numerator = TwoSidedFir::Zero();  // [P_yv / Q_v(z^-1)]_+ / gamma_v^2
  RationalTransferFunction inverse_factor = RationalTransferFunction::Identity();
  SpectralFactor pv_factor;
  double truncation_energy = 0.0;

  LinearReconstruction AsReconstruction() const {
    return {numerator, inverse_factor};
  }
};

absl::StatusOr<CausalWienerFilter> CausalWiener(
    const RationalTransferFunction& f, const RationalPsd& input_psd,
    const RationalTransferFunction& g, double sigma,
    const CausalWienerOptions& options = {});

// How a profile solved on the design grid is carried to the FFT grid used
// for prefilter synthesis.
enum class ProfileRealization {
  kClosedForm,  // re-evaluate the KKT closed form at each FFT frequency
  kLinear,      // interpolate the grid solution linearly
};

struct PrefilterOptions {
  int grid_intervals = 4096;
  int fir_length = 512;
  // Allocations below floor * max are raised to it so the log-spectrum stays
  // finite; the water-filling optimum is exactly zero above its cutoff.
  double profile_floor = 1e-8;
  ProfileRealization realization = ProfileRealization::kClosedForm;
  GridFactorOptions factor;
};

struct RealizedPrefilter {
  RationalTransferFunction g = RationalTransferFunction::Identity();
  WaterfillSolution allocation;
  FrequencyGrid grid;
  double fit_error = 0.0;
};

absl::StatusOr<RealizedPrefilter> DesignLmmsePrefilter(
    const RationalTransferFunction& f, const RationalPsd& input_psd,
    const PrivacyParams& params, const PrefilterOptions& options = {});
absl::StatusOr<RealizedPrefilter> DesignDfPrefilter(
    const RationalTransferFunction& f, const RationalPsd& input_psd,
    const PrivacyParams& params, const PrefilterOptions& options = {});

struct PrefilterVariants {
  RealizedPrefilter df;     // from the log-integral (DF) allocation
  RealizedPrefilter lmmse;  // from the Wiener-error (LMMSE) allocation
};

absl::StatusOr<PrefilterVariants> DesignDfPrefilterVariants(
    const RationalTransferFunction& f, const RationalPsd& input_psd,
    const PrivacyParams& params, const PrefilterOptions& options = {});

struct LmmseOptions {
  PrefilterOptions prefilter;
  bool causal = false;
  WienerOptions wiener;
  CausalWienerOptions causal_wiener;
};

absl::StatusOr<MechanismDesign> DesignLmmse(const RationalTransferFunction& f,
                                            const RationalPsd& input_psd,
                                            const PrivacyParams& params,
                                            const LmmseOptions& options = {});

// Linear mechanism around an externally supplied prefilter (normalized to
// unit H2 norm here).
absl::StatusOr<MechanismDesign> DesignLmmseWithPrefilter(
    const RationalTransferFunction& f, const RationalPsd& input_psd,
    const RationalTransferFunction& g, const PrivacyParams& params,
    const LmmseOptions& options = {});

// ---------------------------------------------------------------------------
// Decision feedback

struct DfOptions {
  int delay = 5;
  int n_forward = 16;
  int n_feedback = 8;
  DecisionDevice decision = DecisionDevice::Sign(1.0);
  OutputMode output_mode = OutputMode::kSoft;
  size_t fft_size = size_t{1} << 16;
  double ridge = 1e-12;
};

struct DfEqualizer {
  TwoSidedFir forward = TwoSidedFir::Causal({1.0});
  TwoSidedFir feedback = TwoSidedFir::Zero();
  double detector_mse = 0.0;
};

// Finite-length MMSE decision-feedback equalizer with decision delay, from the
// normal equations under the correct-past-decisions assumption. sigma may be
// zero.
absl::StatusOr<DfEqualizer> DesignDfEqualizer(
    const RationalPsd& input_psd, const RationalTransferFunction& g,
    double sigma, const DfOptions& options = {});

struct DfErrorSpectrum {
  double detector_mse = 0.0;  // (1/2pi) int S_e
  double output_mse = 0.0;    // (1/2pi) int |F|^2 S_e
};

// Error spectrum S_e = |B - H1 G|^2 P_u + |H1|^2 sigma^2 of u - u~ when the
// fed-back decisions are correct, B = 1 + H2.
absl::StatusOr<DfErrorSpectrum> DfCorrectDecisionMse(
    const RationalTransferFunction& f, const RationalPsd& input_psd,
    const RationalTransferFunction& g, double sigma,
    const DfEqualizer& equalizer, const QuadratureOptions& options = {});

// gamma_u^2 gamma_F^2 / gamma^2, the infinite-length DF error under correct
// decisions, from the log-integral (geometric mean) formula.
absl::StatusOr<double> DfApproximateMse(const RationalTransferFunction& f,
                                        const RationalPsd& input_psd,
                                        const RationalTransferFunction& g,
                                        const PrivacyParams& params,
                                        const QuadratureOptions& options = {});

struct IdealFeedback {
  std::vector<double> b;  // causal taps of Q / (Q_u Q_F)
  double anticausal_energy = 0.0;
};

// B = Q / (Q_u Q_F) from the three canonical factors.
absl::StatusOr<IdealFeedback> IdealFeedbackFilter(
    const RationalTransferFunction& f, const RationalPsd& input_psd,
    const RationalTransferFunction& g, const PrivacyParams& params,
    int length, size_t fft_size = size_t{1} << 16);

absl::StatusOr<MechanismDesign> DesignDf(const RationalTransferFunction& f,
                                         const RationalPsd& input_psd,
                                         const RationalTransferFunction& g,
                                         const PrivacyParams& params,
                                         const DfOptions& options = {});

// ---------------------------------------------------------------------------
// Helpers

// First omega where |G|^2 drops to half of its maximum over [0, pi].
double HalfPowerFrequency(const RationalTransferFunction& g,
                          int intervals = 8192);

// Rescales G to unit H2 norm.
absl::StatusOr<RationalTransferFunction> NormalizePrefilter(
    const RationalTransferFunction& g);

}  // namespace dpfilter

#endif  // DPFILTER_DESIGN_H_
