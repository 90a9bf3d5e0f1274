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

// Single-input single-output discrete-time LTI systems: rational transfer
// functions in z^-1, two-sided FIR filters, frequency grids on [0, pi],
// impulse responses, norms and per-sample streaming evaluation.

#ifndef DPFILTER_LTI_H_
#define DPFILTER_LTI_H_

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "absl/status/statusor.h"

namespace dpfilter {

// Roots closer than this (in modulus) to the unit circle are treated as lying
// on it.
inline constexpr double kUnitCircleTolerance = 1e-9;

// Target relative l2 energy left beyond an automatically chosen impulse
// response horizon.
inline constexpr double kImpulseTailTolerance = 1e-12;

// Hard cap on automatically chosen impulse response horizons.
inline constexpr int64_t kMaxImpulseHorizon = 1'000'000;

// Roots in z of the polynomial c_0 + c_1 z^-1 + ... + c_n z^-n. Leading zero
// coefficients (pure delays) contribute no finite roots.
std::vector<std::complex<double>> PolynomialRoots(
    std::span<const double> coefficients);

// Product of two z^-1 polynomials.
std::vector<double> PolynomialMultiply(std::span<const double> a,
                                       std::span<const double> b);

// Causal system b(z^-1) / a(z^-1) with a_0 normalized to 1.
class RationalTransferFunction {
 public:
  static absl::StatusOr<RationalTransferFunction> Create(
      std::vector<double> numerator, std::vector<double> denominator);
  static RationalTransferFunction Identity();
  static RationalTransferFunction Delay(int samples);
  static RationalTransferFunction Fir(std::vector<double> taps);

  const std::vector<double>& numerator() const { return numerator_; }
  const std::vector<double>& denominator() const { return denominator_; }
  bool is_fir() const { return denominator_.size() == 1; }

  // max(m, n): length of the transposed direct-form II delay line.
  int order() const;

  // H(e^{j omega}).
  std::complex<double> Evaluate(double omega) const;

  std::vector<std::complex<double>> Poles() const;
  std::vector<std::complex<double>> Zeros() const;
  double MaxPoleModulus() const;
  bool IsStable() const;

  // Series connection: this * other.
  RationalTransferFunction Cascade(const RationalTransferFunction& other) const;
  RationalTransferFunction Scaled(double gain) const;

 private:
  RationalTransferFunction(std::vector<double> numerator,
                           std::vector<double> denominator)
      : numerator_(std::move(numerator)),
        denominator_(std::move(denominator)) {}

  std::vector<double> numerator_;
  std::vector<double> denominator_;
};

// FIR filter with possibly anti-causal support: tap i sits at time index
// start_index + i.
class TwoSidedFir {
 public:
  static absl::StatusOr<TwoSidedFir> Create(std::vector<double> taps,
                                            int start_index);
  static TwoSidedFir Causal(std::vector<double> taps);
  // The zero filter: a single zero tap at index 0.
  static TwoSidedFir Zero();

  const std::vector<double>& taps() const { return taps_; }
  int start_index() const { return start_index_; }
  int end_index() const {
    return start_index_ + static_cast<int>(taps_.size()) - 1;
  }
  // Tap at absolute time index, zero outside the support.
  double tap(int time_index) const;
  // Number of samples of look-ahead required to realize the filter.
  int anticausal_extent() const { return start_index_ < 0 ? -start_index_ : 0; }

  std::complex<double> Evaluate(double omega) const;
  double Energy() const;

 private:
  TwoSidedFir(std::vector<double> taps, int start_index)
      : taps_(std::move(taps)), start_index_(start_index) {}

  std::vector<double> taps_;
  int start_index_ = 0;
};

// Increasing frequencies covering [0, pi]. All spectra handled by the library
// are even in omega, so only this half interval is stored.
class FrequencyGrid {
 public:
  // omega_i = i pi / N, i = 0..N. Requires N >= 2.
  static absl::StatusOr<FrequencyGrid> Uniform(int intervals);
  // Uniform grid merged with geometrically spaced points in
  // [min_spacing, refine_upto] to resolve sharp peaks near omega = 0.
  // refine_upto <= 0 selects 16 uniform spacings.
  static absl::StatusOr<FrequencyGrid> Refined(int intervals,
                                               double min_spacing = 1e-6,
                                               double refine_upto = 0.0);
  static absl::StatusOr<FrequencyGrid> FromFrequencies(
      std::vector<double> frequencies);

  size_t size() const { return frequencies_.size(); }
  std::span<const double> frequencies() const { return frequencies_; }
  double operator[](size_t i) const { return frequencies_[i]; }
  // Number of uniform intervals this grid was built from (0 if arbitrary).
  int intervals() const { return intervals_; }
  bool is_uniform() const { return uniform_; }

  // Trapezoidal weights normalized so that sum_i w_i f(omega_i) approximates
  // (1/pi) int_0^pi f = (1/2pi) int_{-pi}^{pi} f for even f. Sums to 1.
  const std::vector<double>& weights() const { return weights_; }
  double Integrate(std::span<const double> values) const;

 private:
  FrequencyGrid(std::vector<double> frequencies, int intervals, bool uniform);

  std::vector<double> frequencies_;
  std::vector<double> weights_;
  int intervals_ = 0;
  bool uniform_ = false;
};

absl::StatusOr<std::vector<std::complex<double>>> FreqResponse(
    const RationalTransferFunction& system, const FrequencyGrid& grid);
std::vector<std::complex<double>> FreqResponse(const TwoSidedFir& system,
                                               const FrequencyGrid& grid);

// Truncated impulse response with an estimate of the l2 energy beyond it.
struct ImpulseResponse {
  std::vector<double> values;
  double tail_energy_bound = 0.0;
};

// g_0..g_{horizon-1}. The tail bound extrapolates the last window
// geometrically at the largest pole modulus.
absl::StatusOr<ImpulseResponse> ComputeImpulseResponse(
    const RationalTransferFunction& system, int64_t horizon);
// Horizon chosen from the pole moduli so the tail carries less than
// kImpulseTailTolerance of the energy.
absl::StatusOr<ImpulseResponse> ComputeImpulseResponse(
    const RationalTransferFunction& system);

absl::StatusOr<double> H2Norm(const RationalTransferFunction& system);
double H2Norm(const TwoSidedFir& system);

// l_p norm for 1 <= p <= inf (pass std::numeric_limits<double>::infinity()).
absl::StatusOr<double> LpNorm(std::span<const double> sequence, double p);

// Streaming state of a rational system, transposed direct-form II.
class RationalFilter {
 public:
  explicit RationalFilter(RationalTransferFunction system);

  absl::StatusOr<double> Step(double input);
  // Caller guarantees a finite input.
  double StepUnchecked(double input);
  void Reset();

  const RationalTransferFunction& system() const { return system_; }
  size_t state_size() const { return state_.size(); }

 private:
  RationalTransferFunction system_;
  std::vector<double> numerator_;    // padded to order + 1
  std::vector<double> denominator_;  // padded to order + 1
  std::vector<double> state_;
};

// Streaming state of a two-sided FIR. A filter with start_index k0 < 0 emits
// the output for time t at time t + |k0| (the latency).
class FirFilter {
 public:
  explicit FirFilter(TwoSidedFir system);

  absl::StatusOr<double> Step(double input);
  double StepUnchecked(double input);
  void Reset();

  int latency() const { return system_.anticausal_extent(); }
  const TwoSidedFir& system() const { return system_; }
  size_t state_size() const { return taps_.size(); }

 private:
  TwoSidedFir system_;
  // Taps re-indexed by input age, including any positive start offset.
  std::vector<double> taps_;
  // Mirrored ring buffer: history_[pos_ .. pos_ + n) holds the n most recent
  // inputs, newest first.
  std::vector<double> history_;
  size_t pos_ = 0;
};

}  // namespace dpfilter

#endif  // DPFILTER_LTI_H_
