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


// Input-signal generators for simulation.

#ifndef DPFILTER_SOURCES_H_
#define DPFILTER_SOURCES_H_

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "dpfilter/spectral.h"

namespace dpfilter {

class SignalSource {
 public:
  virtual ~SignalSource() = default;

  // A stationary path of length `length`; identical seeds give identical
  // paths.
  virtual std::vector<double> Sample(int64_t length, uint64_t seed) const = 0;
  virtual double Mean() const = 0;
  // PSD of the centered process.
  virtual absl::StatusOr<RationalPsd> Psd() const = 0;
  virtual std::string Describe() const = 0;
};

// Two-state Markov chain started from its stationary distribution.
class MarkovSource : public SignalSource {
 public:
  using Matrix = std::array<std::array<double, 2>, 2>;

  // `initial_state` pins the first state instead of drawing it from the
  // stationary distribution.
  static absl::StatusOr<MarkovSource> Create(
      const Matrix& transition, const std::array<double, 2>& values,
      std::optional<int> initial_state = std::nullopt);

  // P = [[p, 1-p], [1-p, p]] with states {-level, +level}.
  static absl::StatusOr<MarkovSource> Symmetric(double stay_probability,
                                                double level);

  std::vector<double> Sample(int64_t length, uint64_t seed) const override;
  double Mean() const override;
  // r(k) = var * lambda^|k| with lambda = 1 - p01 - p10, so the PSD is
  // var (1 - lambda^2) / |1 - lambda e^{-jw}|^2. Chains with |lambda| = 1
  // have spectral lines and are rejected.
  absl::StatusOr<RationalPsd> Psd() const override;
  std::string Describe() const override;

  const Matrix& transition() const { return transition_; }
  const std::array<double, 2>& values() const { return values_; }
  std::array<double, 2> Stationary() const;
  double Variance() const;

 private:
  MarkovSource(const Matrix& transition, const std::array<double, 2>& values,
               std::optional<int> initial_state)
      : transition_(transition),
        values_(values),
        initial_state_(initial_state) {}

  Matrix transition_;
  std::array<double, 2> values_;
  std::optional<int> initial_state_;
};

// x_t = mean + s_t, s_t = sum_i a_i s_{t-i} + w_t with w_t ~ N(0, noise_std^2).
// No coefficients gives iid Gaussian samples.
class ArSource : public SignalSource {
 public:
  static absl::StatusOr<ArSource> Create(std::vector<double> coefficients,
                                         double noise_std, double mean = 0.0);

  std::vector<double> Sample(int64_t length, uint64_t seed) const override;
  double Mean() const override { return mean_; }
  absl::StatusOr<RationalPsd> Psd() const override;
  std::string Describe() const override;

  const std::vector<double>& coefficients() const { return coefficients_; }

 private:
  ArSource(std::vector<double> coefficients, double noise_std, double mean,
           int64_t burn_in)
      : coefficients_(std::move(coefficients)),
        noise_std_(noise_std),
        mean_(mean),
        burn_in_(burn_in) {}

  std::vector<double> coefficients_;
  double noise_std_;
  double mean_;
  int64_t burn_in_;
};

// iid draws from {values[0], values[1]} with P(values[1]) = probability.
class IidSource : public SignalSource {
 public:
  static absl::StatusOr<IidSource> Create(const std::array<double, 2>& values,
                                          double probability = 0.5);

  std::vector<double> Sample(int64_t length, uint64_t seed) const override;
  double Mean() const override;
  absl::StatusOr<RationalPsd> Psd() const override;
  std::string Describe() const override;

 private:
  IidSource(const std::array<double, 2>& values, double probability)
      : values_(values), probability_(probability) {}

  std::array<double, 2> values_;
  double probability_;
};

}  // namespace dpfilter

#endif  // DPFILTER_SOURCES_H_
