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


#include "dpfilter/sources.h"

#include <algorithm>
#include <cmath>
#include <random>

#include "absl/status/status.h"
#include "absl/strings/str_format.h"
#include "dpfilter/lti.h"
#include "dpfilter/random.h"

namespace dpfilter {

absl::StatusOr<MarkovSource> MarkovSource::Create(
    const Matrix& transition, const std::array<double, 2>& values,
    std::optional<int> initial_state) {
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      const double p = transition[i][j];
      if (!(p >= 0.0 && p <= 1.0)) {
        return absl::InvalidArgumentError(absl::StrFormat(
            "transition[%d][%d] = %g is not a probability", i, j, p));
      }
    }
    if (std::abs(transition[i][0] + transition[i][1] - 1.0) > 1e-12) {
      return absl::InvalidArgumentError(
          absl::StrFormat("transition row %d does not sum to 1", i));
    }
    if (!std::isfinite(values[i])) {
      return absl::InvalidArgumentError("state values must be finite");
    }
  }
  if (initial_state.has_value() && *initial_state != 0 && *initial_state != 1) {
    return absl::InvalidArgumentError("initial_state must be 0 or 1");
  }
  return MarkovSource(transition, values, initial_state);
}

absl::StatusOr<MarkovSource> MarkovSource::Symmetric(double stay_probability,
                                                     double level) {
  return Create({{{stay_probability, 1.0 - stay_probability},
                  {1.0 - stay_probability, stay_probability}}},
                {-level, level});
}

std::array<double, 2> MarkovSource::Stationary() const {
  const double p01 = transition_[0][1];
  const double p10 = transition_[1][0];
  const double total = p01 + p10;
  if (total == 0.0) return {0.5, 0.5};
  return {p10 / total, p01 / total};
}

double MarkovSource::Mean() const {
  const auto pi = Stationary();
  return pi[0] * values_[0] + pi[1] * values_[1];
}

double MarkovSource::Variance() const {
  const auto pi = Stationary();
  const double gap = values_[0] - values_[1];
  return pi[0] * pi[1] * gap * gap;
}

std::vector<double> MarkovSource::Sample(int64_t length, uint64_t seed) const {
  std::vector<double> out(static_cast<size_t>(std::max<int64_t>(length, 0)));
  if (out.empty()) return out;
  std::mt19937_64 engine(seed);
  int state = initial_state_.has_value()
                  ? *initial_state_
                  : (UniformDouble(engine) < Stationary()[1] ? 1 : 0);
  out[0] = values_[state];
  for (size_t t = 1; t < out.size(); ++t) {
    state = UniformDouble(engine) < transition_[state][1] ? 1 : 0;
    out[t] = values_[state];
  }
  return out;
}

absl::StatusOr<RationalPsd> MarkovSource::Psd() const {
  const double lambda = 1.0 - transition_[0][1] - transition_[1][0];
  if (std::abs(lambda) >= 1.0 - 1e-12) {
    return absl::FailedPreconditionError(
        "chain is reducible or periodic; its spectrum has lines");
  }
  const double variance = Variance();
  if (!(variance > 0.0)) {
    return absl::FailedPreconditionError("chain has zero variance");
  }
  if (lambda == 0.0) return RationalPsd::White(variance);
  return RationalPsd::Create(variance * (1.0 - lambda * lambda), {},
                             {std::complex<double>(lambda, 0.0)});
}

std::string MarkovSource::Describe() const {
  return absl::StrFormat("markov(p01=%.17g, p10=%.17g, values=[%.17g, %.17g])",
                         transition_[0][1], transition_[1][0], values_[0],
                         values_[1]);
}

// ---------------------------------------------------------------------------

absl::StatusOr<ArSource> ArSource::Create(std::vector<double> coefficients,
                                          double noise_std, double mean) {
  if (!(noise_std > 0.0) || !std::isfinite(noise_std) || !std::isfinite(mean)) {
    return absl::InvalidArgumentError(
        "AR source needs a positive noise_std and a finite mean");
  }
  std::vector<double> denominator = {1.0};
  for (double a : coefficients) {
    if (!std::isfinite(a)) {
      return absl::InvalidArgumentError("AR coefficients must be finite");
    }
    denominator.push_back(-a);
  }
  absl::StatusOr<RationalTransferFunction> system =
      RationalTransferFunction::Create({1.0}, denominator);
  if (!system.ok()) return system.status();
  if (!system->IsStable()) {
    return absl::InvalidArgumentError("AR coefficients are not stationary");
  }
  const double rho = system->MaxPoleModulus();
  int64_t burn_in = 0;
  if (rho > 0.0) {
    burn_in = std::clamp<int64_t>(
        static_cast<int64_t>(std::ceil(std::log(1e-17) / std::log(rho))), 100,
        kMaxImpulseHorizon);
  }
  return ArSource(std::move(coefficients), noise_std, mean, burn_in);
}

std::vector<double> ArSource::Sample(int64_t length, uint64_t seed) const {
  std::vector<double> out(static_cast<size_t>(std::max<int64_t>(length, 0)));
  GaussianGenerator gaussian(seed);
  const size_t order = coefficients_.size();
  std::vector<double> history(order, 0.0);  // newest first
  const int64_t total = burn_in_ + length;
  for (int64_t t = 0; t < total; ++t) {
    double s = noise_std_ * gaussian.Next();
    for (size_t i = 0; i < order; ++i) s += coefficients_[i] * history[i];
    if (order > 0) {
      std::copy_backward(history.begin(), history.end() - 1, history.end());
      history[0] = s;
    }
    if (t >= burn_in_) out[static_cast<size_t>(t - burn_in_)] = mean_ + s;
  }
  return out;
}

absl::StatusOr<RationalPsd> ArSource::Psd() const {
  const double variance = noise_std_ * noise_std_;
  if (coefficients_.empty()) return RationalPsd::White(variance);
  std::vector<double> denominator = {1.0};
  for (double a : coefficients_) denominator.push_back(-a);
  return RationalPsd::Create(variance, {}, PolynomialRoots(denominator));
}

std::string ArSource::Describe() const {
  std::string coefficients;
  for (size_t i = 0; i < coefficients_.size(); ++i) {
    absl::StrAppendFormat(&coefficients, "%s%.17g", i == 0 ? "" : ", ",
                          coefficients_[i]);
  }
  return absl::StrFormat("ar(coefficients=[%s], noise_std=%.17g, mean=%.17g)",
                         coefficients, noise_std_, mean_);
}

// ---------------------------------------------------------------------------

absl::StatusOr<IidSource> IidSource::Create(const std::array<double, 2>& values,
                                            double probability) {
  if (!(probability >= 0.0 && probability <= 1.0)) {
    return absl::InvalidArgumentError("probability must lie in [0, 1]");
  }
  if (!std::isfinite(values[0]) || !std::isfinite(values[1])) {
    return absl::InvalidArgumentError("values must be finite");
  }
  return IidSource(values, probability);
}

std::vector<double> IidSource::Sample(int64_t length, uint64_t seed) const {
  std::vector<double> out(static_cast<size_t>(std::max<int64_t>(length, 0)));
  std::mt19937_64 engine(seed);
  for (double& x : out) {
    x = UniformDouble(engine) < probability_ ? values_[1] : values_[0];
  }
  return out;
}

double IidSource::Mean() const {
  return (1.0 - probability_) * values_[0] + probability_ * values_[1];
}

absl::StatusOr<RationalPsd> IidSource::Psd() const {
  const double gap = values_[1] - values_[0];
  const double variance = probability_ * (1.0 - probability_) * gap * gap;
  if (!(variance > 0.0)) {
    return absl::FailedPreconditionError("source has zero variance");
  }
  return RationalPsd::White(variance);
}

std::string IidSource::Describe() const {
  return absl::StrFormat("iid(values=[%.17g, %.17g], p=%.17g)", values_[0],
                         values_[1], probability_);
}

}  // namespace dpfilter
