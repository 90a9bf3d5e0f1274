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


// Finite-length decision-feedback equalizer for the DF mechanism.
//
// With decision delay D the detector estimates u_s from
//   z = [v_{s+D}, ..., v_{s+D-nf+1}, u_{s-1}, ..., u_{s-nb}]
// where the past inputs stand in for past decisions. The Wiener solution of
// E|u_s - w'z|^2 gives the forward filter h1_k = w_{k+D} on -D..nf-D-1 and the
// feedback filter h2_j = -w_{nf+j-1} on 1..nb.

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "Eigen/Dense"
#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "design_internal.h"
#include "dpfilter/design.h"
#include "fft.h"
#include "status_macros.h"

namespace dpfilter {
namespace {

constexpr double kPi = std::numbers::pi;

class Correlation {
 public:
  explicit Correlation(std::vector<double> values)
      : values_(std::move(values)) {}

  double operator()(long lag) const {
    const long m = static_cast<long>(values_.size());
    return values_[static_cast<size_t>(((lag % m) + m) % m)];
  }

 private:
  std::vector<double> values_;
};

}  // namespace

absl::StatusOr<DfEqualizer> DesignDfEqualizer(const RationalPsd& input_psd,
                                              const RationalTransferFunction& g,
                                              double sigma,
                                              const DfOptions& options) {
  const int nf = options.n_forward;
  const int nb = options.n_feedback;
  const int delay = options.delay;
  if (nf < 1 || nb < 0 || delay < 0) {
    return absl::InvalidArgumentError(
        "need n_forward >= 1, n_feedback >= 0 and delay >= 0");
  }
  if (!(sigma >= 0.0) || !std::isfinite(sigma) || !(options.ridge >= 0.0)) {
    return absl::InvalidArgumentError("sigma and ridge must be nonnegative");
  }
  const size_t m = options.fft_size;
  DPFILTER_RETURN_IF_ERROR(internal::CheckFftSize(m));
  if (m < 4 * static_cast<size_t>(nf + nb + delay + 1)) {
    return absl::InvalidArgumentError(
        absl::StrCat("fft_size ", m, " too small for the equalizer lengths"));
  }

  DPFILTER_ASSIGN_OR_RETURN(auto g_response, internal::FullResponse(g, m));
  std::vector<std::complex<double>> su(m), sv(m), svu(m);
  for (size_t k = 0; k < m; ++k) {
    const double p = input_psd.Evaluate(2.0 * kPi * k / m);
    su[k] = p;
    sv[k] = p * std::norm(g_response[k]);
    svu[k] = p * g_response[k];
  }
  const Correlation ru(internal::RealInverseDft(su));
  std::vector<double> rv_values = internal::RealInverseDft(sv);
  rv_values[0] += sigma * sigma;
  const Correlation rv(std::move(rv_values));
  // rvu(k) = E[v_t u_{t-k}].
  const Correlation rvu(internal::RealInverseDft(svu));

  const int n = nf + nb;
  Eigen::MatrixXd r(n, n);
  Eigen::VectorXd p(n);
  for (int i = 0; i < nf; ++i) {
    for (int j = 0; j < nf; ++j) r(i, j) = rv(j - i);
    p(i) = rvu(delay - i);
    for (int j = 0; j < nb; ++j) {
      r(i, nf + j) = r(nf + j, i) = rvu(delay - i + 1 + j);
    }
  }
  for (int i = 0; i < nb; ++i) {
    for (int j = 0; j < nb; ++j) r(nf + i, nf + j) = ru(i - j);
    p(nf + i) = ru(i + 1);
  }
  const double scale = r.trace() / n;
  r.diagonal().array() += options.ridge * scale;

  Eigen::LDLT<Eigen::MatrixXd> ldlt(r);
  if (ldlt.info() != Eigen::Success) {
    return absl::FailedPreconditionError("equalizer normal equations failed");
  }
  const Eigen::VectorXd w = ldlt.solve(p);
  if (!w.allFinite()) {
    return absl::FailedPreconditionError(
        "equalizer normal equations are singular");
  }

  std::vector<double> forward(w.data(), w.data() + nf);
  DPFILTER_ASSIGN_OR_RETURN(TwoSidedFir h1,
                            TwoSidedFir::Create(std::move(forward), -delay));
  TwoSidedFir h2 = TwoSidedFir::Zero();
  if (nb > 0) {
    std::vector<double> feedback(static_cast<size_t>(nb));
    for (int j = 0; j < nb; ++j) feedback[j] = -w(nf + j);
    DPFILTER_ASSIGN_OR_RETURN(h2, TwoSidedFir::Create(std::move(feedback), 1));
  }
  const double mse = std::max(0.0, ru(0) - p.dot(w));
  return DfEqualizer{std::move(h1), std::move(h2), mse};
}

absl::StatusOr<DfErrorSpectrum> DfCorrectDecisionMse(
    const RationalTransferFunction& f, const RationalPsd& input_psd,
    const RationalTransferFunction& g, double sigma,
    const DfEqualizer& equalizer, const QuadratureOptions& options) {
  if (!f.IsStable()) {
    return absl::FailedPreconditionError("target filter is unstable");
  }
  const double noise = sigma * sigma;
  auto error_psd = [&](double w) {
    const std::complex<double> h1 = equalizer.forward.Evaluate(w);
    const std::complex<double> b = 1.0 + equalizer.feedback.Evaluate(w);
    return std::norm(b - h1 * g.Evaluate(w)) * input_psd.Evaluate(w) +
           std::norm(h1) * noise;
  };
  DfErrorSpectrum out;
  DPFILTER_ASSIGN_OR_RETURN(out.detector_mse,
                            RefinedIntegral(error_psd, options));
  DPFILTER_ASSIGN_OR_RETURN(
      out.output_mse,
      RefinedIntegral(
          [&](double w) { return std::norm(f.Evaluate(w)) * error_psd(w); },
          options));
  return out;
}

absl::StatusOr<MechanismDesign> DesignDf(const RationalTransferFunction& f,
                                         const RationalPsd& input_psd,
                                         const RationalTransferFunction& g,
                                         const PrivacyParams& params,
                                         const DfOptions& options) {
  if (!f.IsStable()) {
    return absl::FailedPreconditionError("target filter is unstable");
  }
  DPFILTER_ASSIGN_OR_RETURN(RationalTransferFunction prefilter,
                            NormalizePrefilter(g));
  DPFILTER_ASSIGN_OR_RETURN(NoiseCalibration calibration,
                            Calibrate(prefilter, params));
  DPFILTER_ASSIGN_OR_RETURN(
      DfEqualizer equalizer,
      DesignDfEqualizer(input_psd, prefilter, calibration.sigma, options));
  DPFILTER_ASSIGN_OR_RETURN(
      DfErrorSpectrum error,
      DfCorrectDecisionMse(f, input_psd, prefilter, calibration.sigma,
                           equalizer));
  DecisionFeedbackReconstruction reconstruction{
      .forward = std::move(equalizer.forward),
      .feedback = std::move(equalizer.feedback),
      .decision = options.decision,
      .output_mode = options.output_mode,
      .output_filter = f,
      .detector_mse = equalizer.detector_mse,
  };
  return MechanismDesign{
      .kind = MechanismKind::kDecisionFeedback,
      .target = f,
      .prefilter = std::move(prefilter),
      .params = params,
      .calibration = calibration,
      .reconstruction = std::move(reconstruction),
      .theoretical_mse = error.output_mse,
      .realized_mse = error.output_mse,
  };
}

}  // namespace dpfilter
