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

// Event-level (epsilon, delta) privacy policy and Gaussian noise calibration
// for LTI prefilters.
//
// Under the adjacency relation "u and u' differ at a single time by at most
// d", the l_p sensitivity of an LTI system with impulse response g is
// d * ||g||_p, and releasing v = G u + n with white Gaussian n of standard
// deviation d * kappa(epsilon, delta) * ||G||_2 is (epsilon, delta)-private.
// Nothing here reads input statistics: calibration depends on the prefilter
// and the policy only.

#ifndef DPFILTER_PRIVACY_H_
#define DPFILTER_PRIVACY_H_

#include "absl/status/statusor.h"
#include "dpfilter/lti.h"

namespace dpfilter {

class PrivacyParams {
 public:
  static absl::StatusOr<PrivacyParams> Create(double epsilon, double delta,
                                              int adjacency = 1);

  double epsilon() const { return epsilon_; }
  double delta() const { return delta_; }
  // Largest single-time change of an adjacent input, in event counts.
  int adjacency() const { return adjacency_; }

 private:
  PrivacyParams(double epsilon, double delta, int adjacency)
      : epsilon_(epsilon), delta_(delta), adjacency_(adjacency) {}

  double epsilon_;
  double delta_;
  int adjacency_;
};

struct NoiseCalibration {
  double kappa = 0.0;
  // Standard deviation of the injected white Gaussian noise.
  double sigma = 0.0;
  // l2 sensitivity d * ||G||_2.
  double sensitivity = 0.0;
};

// Gaussian tail probability P(N(0,1) > x).
double QFunction(double x);

// x with QFunction(x) == p, for 0 < p < 1.
absl::StatusOr<double> QFunctionInverse(double p);

// (K + sqrt(K^2 + 2 epsilon)) / (2 epsilon) with K = Q^{-1}(delta).
double Kappa(const PrivacyParams& params);

// d * ||g||_p. For p = 2 the reported tail energy of a truncated response is
// included.
absl::StatusOr<double> FilterSensitivity(const ImpulseResponse& impulse,
                                         double p, int adjacency);

absl::StatusOr<NoiseCalibration> Calibrate(const ImpulseResponse& prefilter,
                                           const PrivacyParams& params);
absl::StatusOr<NoiseCalibration> Calibrate(
    const RationalTransferFunction& prefilter, const PrivacyParams& params);

}  // namespace dpfilter

#endif  // DPFILTER_PRIVACY_H_
