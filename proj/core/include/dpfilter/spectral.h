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

// Power spectral densities and their factorization into canonical (monic,
// causal, minimum-phase) factors, either exactly from rational root data or
// approximately from sampled values via the real cepstrum.

#ifndef DPFILTER_SPECTRAL_H_
#define DPFILTER_SPECTRAL_H_

#include <complex>
#include <vector>

#include "absl/status/statusor.h"
#include "dpfilter/lti.h"

namespace dpfilter {

// gain * prod_k |1 - n_k e^{-jw}|^2 / prod_k |1 - p_k e^{-jw}|^2.
//
// Each stored root r stands for the para-conjugate pair
// (1 - r z^-1)(1 - conj(r) z); complex roots must be listed together with
// their conjugates. Roots given outside the unit circle are reflected inside
// (with the matching gain adjustment), so stored roots satisfy |r| < 1.
class RationalPsd {
 public:
  static absl::StatusOr<RationalPsd> Create(
      double gain, std::vector<std::complex<double>> numerator_roots,
      std::vector<std::complex<double>> denominator_roots);
  static RationalPsd White(double variance);

  double gain() const { return gain_; }
  const std::vector<std::complex<double>>& numerator_roots() const {
    return numerator_roots_;
  }
  const std::vector<std::complex<double>>& denominator_roots() const {
    return denominator_roots_;
  }

  double Evaluate(double omega) const;
  // Zero-lag autocorrelation (1/2pi) int P.
  double Variance() const;

 private:
  RationalPsd(double gain, std::vector<std::complex<double>> numerator_roots,
              std::vector<std::complex<double>> denominator_roots)
      : gain_(gain),
        numerator_roots_(std::move(numerator_roots)),
        denominator_roots_(std::move(denominator_roots)) {}

  double gain_ = 1.0;
  std::vector<std::complex<double>> numerator_roots_;
  std::vector<std::complex<double>> denominator_roots_;
};

// PSD samples on [0, pi]; even symmetry is implied.
class GridPsd {
 public:
  static absl::StatusOr<GridPsd> Create(FrequencyGrid grid,
                                        std::vector<double> values);
  static GridPsd Sample(const RationalPsd& psd, FrequencyGrid grid);

  const FrequencyGrid& grid() const { return grid_; }
  const std::vector<double>& values() const { return values_; }

 private:
  GridPsd(FrequencyGrid grid, std::vector<double> values)
      : grid_(std::move(grid)), values_(std::move(values)) {}

  FrequencyGrid grid_;
  std::vector<double> values_;
};

// psd = gamma_sq * |Q(e^{jw})|^2 with Q monic, causal and minimum phase.
struct SpectralFactor {
  double gamma_sq = 1.0;
  RationalTransferFunction q = RationalTransferFunction::Identity();
  // Max relative reconstruction error observed on the checking grid.
  double reconstruction_error = 0.0;
};

struct PaleyWienerResult {
  bool satisfied = false;
  // (1/2pi) int log psd, -inf when the condition fails.
  double log_integral = 0.0;
};

// Values below this are treated as zeros of the spectrum.
inline constexpr double kSpectralZeroThreshold = 1e-300;

PaleyWienerResult PaleyWienerCheck(const GridPsd& psd);

absl::StatusOr<SpectralFactor> FactorRational(const RationalPsd& psd);

// How sampled values are carried onto the FFT grid used by the cepstrum.
enum class Interpolation { kLinear, kCubic };

struct GridFactorOptions {
  // FFT size is the smallest power of two >= max(8 * fir_length,
  // min_fft_size), enlarged to a multiple of 2N for uniform input grids.
  size_t min_fft_size = size_t{1} << 16;
  Interpolation interpolation = Interpolation::kLinear;
};

// Minimum-phase FIR factor of length `fir_length` by the real-cepstrum
// method, normalized monic with the scale carried by gamma_sq.
absl::StatusOr<SpectralFactor> FactorGrid(const GridPsd& psd, int fir_length,
                                          const GridFactorOptions& options = {});

struct MinPhaseFir {
  std::vector<double> taps;
  double reconstruction_error = 0.0;
};

// Causal minimum-phase FIR g with |G(e^{jw})|^2 matching `magnitude_squared`.
absl::StatusOr<MinPhaseFir> MinPhaseFirFromMagnitude(
    const GridPsd& magnitude_squared, int fir_length,
    const GridFactorOptions& options = {});

// [L(z)]_+: drops taps with negative time index.
TwoSidedFir CausalPart(const TwoSidedFir& filter);

}  // namespace dpfilter

#endif  // DPFILTER_SPECTRAL_H_
