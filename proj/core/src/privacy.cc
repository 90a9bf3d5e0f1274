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

#include "dpfilter/privacy.h"

#include <cmath>
#include <numbers>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"

namespace dpfilter {

absl::StatusOr<PrivacyParams> PrivacyParams::Create(double epsilon,
                                                    double delta,
                                                    int adjacency) {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    return absl::InvalidArgumentError(
        absl::StrCat("epsilon must be positive, got ", epsilon));
  }
  if (!(delta > 0.0 && delta < 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("delta must lie in (0, 1), got ", delta));
  }
  if (adjacency < 1) {
    return absl::InvalidArgumentError(
        absl::StrCat("adjacency level d must be >= 1, got ", adjacency));
  }
  return PrivacyParams(epsilon, delta, adjacency);
}

double QFunction(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

absl::StatusOr<double> QFunctionInverse(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("Q^-1 needs 0 < p < 1, got ", p));
  }
  // Q is strictly decreasing; bracket, bisect, then polish with Newton.
  double lo = -40.0;
  double hi = 40.0;
  for (int i = 0; i < 60; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (QFunction(mid) > p) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  double x = 0.5 * (lo + hi);
  const double inv_sqrt_2pi = 1.0 / std::sqrt(2.0 * std::numbers::pi);
  for (int i = 0; i < 8; ++i) {
    const double density = inv_sqrt_2pi * std::exp(-0.5 * x * x);
    if (density == 0.0) break;
    const double step = (QFunction(x) - p) / density;
    x += step;
    if (std::abs(step) <= 1e-16 * (1.0 + std::abs(x))) break;
  }
  return x;
}

double Kappa(const PrivacyParams& params) {
  const double k = *QFunctionInverse(params.delta());
  const double eps = params.epsilon();
  return (k + std::sqrt(k * k + 2.0 * eps)) / (2.0 * eps);
}

absl::StatusOr<double> FilterSensitivity(const ImpulseResponse& impulse,
                                         double p, int adjacency) {
  if (adjacency < 1) {
    return absl::InvalidArgumentError("adjacency level d must be >= 1");
  }
  if (!std::isfinite(impulse.tail_energy_bound)) {
    return absl::FailedPreconditionError(
        "impulse response is not square summable");
  }
  absl::StatusOr<double> norm = LpNorm(impulse.values, p);
  if (!norm.ok()) return norm.status();
  double value = *norm;
  if (p == 2.0 && impulse.tail_energy_bound > 0.0) {
    value = std::sqrt(value * value + impulse.tail_energy_bound);
  }
  return adjacency * value;
}

absl::StatusOr<NoiseCalibration> Calibrate(const ImpulseResponse& prefilter,
                                           const PrivacyParams& params) {
  absl::StatusOr<double> sensitivity =
      FilterSensitivity(prefilter, 2.0, params.adjacency());
  if (!sensitivity.ok()) return sensitivity.status();
  const double kappa = Kappa(params);
  return NoiseCalibration{kappa, kappa * *sensitivity, *sensitivity};
}

absl::StatusOr<NoiseCalibration> Calibrate(
    const RationalTransferFunction& prefilter, const PrivacyParams& params) {
  absl::StatusOr<ImpulseResponse> impulse = ComputeImpulseResponse(prefilter);
  if (!impulse.ok()) return impulse.status();
  return Calibrate(*impulse, params);
}

}  // namespace dpfilter
