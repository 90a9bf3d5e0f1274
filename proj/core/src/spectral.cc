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

#include "dpfilter/spectral.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "fft.h"

namespace dpfilter {
namespace {

constexpr double kConjugateTolerance = 1e-9;

bool ConjugateClosed(const std::vector<std::complex<double>>& roots) {
  std::vector<bool> used(roots.size(), false);
  for (size_t i = 0; i < roots.size(); ++i) {
    if (used[i] || std::abs(roots[i].imag()) <= kConjugateTolerance) continue;
    bool found = false;
    for (size_t j = i + 1; j < roots.size(); ++j) {
      if (!used[j] &&
          std::abs(roots[j] - std::conj(roots[i])) <= kConjugateTolerance) {
        used[j] = found = true;
        break;
      }
    }
    if (!found) return false;
  }
  return true;
}

double PairFactor(const std::complex<double>& r, double omega) {
  return std::norm(1.0 - r * std::polar(1.0, -omega));
}

// Real coefficients of prod_k (1 - r_k z^-1).
std::vector<double> ExpandRoots(const std::vector<std::complex<double>>& roots) {
  std::vector<std::complex<double>> poly = {1.0};
  for (const auto& r : roots) {
    std::vector<std::complex<double>> next(poly.size() + 1, 0.0);
    for (size_t i = 0; i < poly.size(); ++i) {
      next[i] += poly[i];
      next[i + 1] -= r * poly[i];
    }
    poly = std::move(next);
  }
  std::vector<double> out(poly.size());
  for (size_t i = 0; i < poly.size(); ++i) out[i] = poly[i].real();
  return out;
}

// Log-spectrum of `psd` at the FFT bins omega_k = 2 pi k / M, k = 0..M/2.
std::vector<double> ResampleLogSpectrum(const GridPsd& psd, size_t fft_size,
                                        Interpolation interpolation) {
  const auto w = psd.grid().frequencies();
  const auto& p = psd.values();
  const size_t n = w.size();
  std::vector<double> log_p(n);
  for (size_t i = 0; i < n; ++i) log_p[i] = std::log(p[i]);

  // Finite-difference slopes for cubic Hermite interpolation.
  std::vector<double> slope(n, 0.0);
  if (interpolation == Interpolation::kCubic) {
    for (size_t i = 0; i < n; ++i) {
      const size_t lo = i == 0 ? 0 : i - 1;
      const size_t hi = i + 1 == n ? n - 1 : i + 1;
      slope[i] = (log_p[hi] - log_p[lo]) / (w[hi] - w[lo]);
    }
    // Even symmetry forces zero slope at 0 and pi.
    slope.front() = 0.0;
    slope.back() = 0.0;
  }

  const size_t half = fft_size / 2;
  std::vector<double> out(half + 1);
  size_t seg = 0;
  for (size_t k = 0; k <= half; ++k) {
    const double omega =
        k == half ? std::numbers::pi
                  : 2.0 * std::numbers::pi * static_cast<double>(k) /
                        static_cast<double>(fft_size);
    while (seg + 2 < n && w[seg + 1] < omega) ++seg;
    const double h = w[seg + 1] - w[seg];
    const double t = std::clamp((omega - w[seg]) / h, 0.0, 1.0);
    if (t == 0.0) {
      out[k] = log_p[seg];
    } else if (t == 1.0) {
      out[k] = log_p[seg + 1];
    } else if (interpolation == Interpolation::kLinear) {
      out[k] = (1.0 - t) * log_p[seg] + t * log_p[seg + 1];
    } else {
      const double t2 = t * t;
      const double t3 = t2 * t;
      out[k] = (2 * t3 - 3 * t2 + 1) * log_p[seg] +
               (t3 - 2 * t2 + t) * h * slope[seg] +
               (-2 * t3 + 3 * t2) * log_p[seg + 1] +
               (t3 - t2) * h * slope[seg + 1];
    }
  }
  return out;
}

size_t ChooseFftSize(const FrequencyGrid& grid, int fir_length,
                     const GridFactorOptions& options) {
  const size_t required = internal::NextPowerOfTwo(std::max<size_t>(
      8 * static_cast<size_t>(fir_length), options.min_fft_size));
  if (grid.is_uniform()) {
    const size_t period = 2 * static_cast<size_t>(grid.intervals());
    return period * ((required + period - 1) / period);
  }
  return required;
}

}  // namespace

// ---------------------------------------------------------------------------
// RationalPsd / GridPsd

absl::StatusOr<RationalPsd> RationalPsd::Create(
    double gain, std::vector<std::complex<double>> numerator_roots,
    std::vector<std::complex<double>> denominator_roots) {
  if (!(gain > 0.0) || !std::isfinite(gain)) {
    return absl::InvalidArgumentError("PSD gain must be positive and finite");
  }
  for (const auto* roots : {&numerator_roots, &denominator_roots}) {
    for (const auto& r : *roots) {
      if (!std::isfinite(r.real()) || !std::isfinite(r.imag())) {
        return absl::InvalidArgumentError("PSD roots must be finite");
      }
    }
    if (!ConjugateClosed(*roots)) {
      return absl::InvalidArgumentError(
          "complex PSD roots must come with their conjugates");
    }
  }
  for (auto& r : numerator_roots) {
    const double m = std::abs(r);
    if (m > 1.0 + kUnitCircleTolerance) {
      gain *= m * m;
      r = 1.0 / std::conj(r);
    }
  }
  for (auto& r : denominator_roots) {
    const double m = std::abs(r);
    if (std::abs(m - 1.0) < kUnitCircleTolerance) {
      return absl::InvalidArgumentError(absl::StrFormat(
          "PSD denominator root on the unit circle (modulus %.15g)", m));
    }
    if (m > 1.0) {
      gain /= m * m;
      r = 1.0 / std::conj(r);
    }
  }
  return RationalPsd(gain, std::move(numerator_roots),
                     std::move(denominator_roots));
}

RationalPsd RationalPsd::White(double variance) {
  return RationalPsd(variance, {}, {});
}

double RationalPsd::Evaluate(double omega) const {
  double value = gain_;
  for (const auto& r : numerator_roots_) value *= PairFactor(r, omega);
  for (const auto& r : denominator_roots_) value /= PairFactor(r, omega);
  return value;
}

double RationalPsd::Variance() const {
  if (numerator_roots_.empty() && denominator_roots_.empty()) return gain_;
  // Periodic and analytic on the circle: the rectangle rule converges
  // geometrically.
  constexpr int kPoints = 1 << 16;
  double sum = 0.0;
  for (int k = 0; k < kPoints; ++k) {
    sum += Evaluate(2.0 * std::numbers::pi * k / kPoints);
  }
  return sum / kPoints;
}

absl::StatusOr<GridPsd> GridPsd::Create(FrequencyGrid grid,
                                        std::vector<double> values) {
  if (values.size() != grid.size()) {
    return absl::InvalidArgumentError(
        absl::StrCat("PSD has ", values.size(), " values for a grid of ",
                     grid.size(), " frequencies"));
  }
  for (double v : values) {
    if (!std::isfinite(v) || v < 0.0) {
      return absl::InvalidArgumentError(
          "PSD values must be finite and nonnegative");
    }
  }
  return GridPsd(std::move(grid), std::move(values));
}

GridPsd GridPsd::Sample(const RationalPsd& psd, FrequencyGrid grid) {
  std::vector<double> values(grid.size());
  for (size_t i = 0; i < grid.size(); ++i) values[i] = psd.Evaluate(grid[i]);
  return GridPsd(std::move(grid), std::move(values));
}

// ---------------------------------------------------------------------------
// Factorization

PaleyWienerResult PaleyWienerCheck(const GridPsd& psd) {
  std::vector<double> log_values(psd.values().size());
  for (size_t i = 0; i < log_values.size(); ++i) {
    const double v = psd.values()[i];
    if (!(v >= kSpectralZeroThreshold)) {
      return {false, -std::numeric_limits<double>::infinity()};
    }
    log_values[i] = std::log(v);
  }
  const double integral = psd.grid().Integrate(log_values);
  return {std::isfinite(integral), integral};
}

absl::StatusOr<SpectralFactor> FactorRational(const RationalPsd& psd) {
  for (const auto* roots : {&psd.numerator_roots(), &psd.denominator_roots()}) {
    for (const auto& r : *roots) {
      if (std::abs(std::abs(r) - 1.0) < kUnitCircleTolerance) {
        return absl::FailedPreconditionError(absl::StrFormat(
            "PSD root on the unit circle (modulus %.15g); no minimum-phase "
            "factor exists",
            std::abs(r)));
      }
    }
  }
  absl::StatusOr<RationalTransferFunction> q = RationalTransferFunction::Create(
      ExpandRoots(psd.numerator_roots()), ExpandRoots(psd.denominator_roots()));
  if (!q.ok()) return q.status();
  SpectralFactor factor{psd.gain(), *std::move(q), 0.0};

  absl::StatusOr<FrequencyGrid> check = FrequencyGrid::Uniform(4096);
  for (double omega : check->frequencies()) {
    const double target = psd.Evaluate(omega);
    const double rebuilt = factor.gamma_sq * std::norm(factor.q.Evaluate(omega));
    factor.reconstruction_error =
        std::max(factor.reconstruction_error,
                 std::abs(rebuilt - target) / target);
  }
  return factor;
}

absl::StatusOr<SpectralFactor> FactorGrid(const GridPsd& psd, int fir_length,
                                          const GridFactorOptions& options) {
  if (fir_length < 1) {
    return absl::InvalidArgumentError("fir_length must be positive");
  }
  const PaleyWienerResult pw = PaleyWienerCheck(psd);
  if (!pw.satisfied) {
    return absl::FailedPreconditionError(
        "PSD violates the Paley-Wiener condition (log-integral diverges)");
  }
  const size_t m = ChooseFftSize(psd.grid(), fir_length, options);
  const size_t half = m / 2;
  const std::vector<double> log_half =
      ResampleLogSpectrum(psd, m, options.interpolation);

  std::vector<std::complex<double>> log_full(m);
  for (size_t k = 0; k <= half; ++k) log_full[k] = log_half[k];
  for (size_t k = half + 1; k < m; ++k) log_full[k] = log_half[m - k];
  const std::vector<double> cepstrum = internal::RealInverseDft(log_full);

  // Fold onto causal quefrencies: log Q has cepstrum c_n for 0 < n < M/2.
  std::vector<std::complex<double>> folded(m, 0.0);
  for (size_t n = 1; n < half; ++n) folded[n] = cepstrum[n];
  folded[half] = 0.5 * cepstrum[half];
  std::vector<std::complex<double>> spectrum = internal::ForwardDft(folded);
  for (auto& s : spectrum) s = std::exp(s);
  std::vector<double> q = internal::RealInverseDft(spectrum);
  q.resize(static_cast<size_t>(fir_length));

  double gamma_sq = std::exp(cepstrum[0]);
  const double q0 = q[0];
  if (!(std::abs(q0) > 0.0)) {
    return absl::InternalError("degenerate cepstral factor");
  }
  for (double& t : q) t /= q0;
  gamma_sq *= q0 * q0;

  // Reconstruction error on the FFT bins, against the resampled target.
  const std::vector<std::complex<double>> q_response =
      internal::RealForwardDft(q, m);
  double error = 0.0;
  for (size_t k = 0; k <= half; ++k) {
    const double target = std::exp(log_half[k]);
    error = std::max(error,
                     std::abs(gamma_sq * std::norm(q_response[k]) - target) /
                         target);
  }
  return SpectralFactor{gamma_sq, RationalTransferFunction::Fir(std::move(q)),
                        error};
}

absl::StatusOr<MinPhaseFir> MinPhaseFirFromMagnitude(
    const GridPsd& magnitude_squared, int fir_length,
    const GridFactorOptions& options) {
  absl::StatusOr<SpectralFactor> factor =
      FactorGrid(magnitude_squared, fir_length, options);
  if (!factor.ok()) return factor.status();
  MinPhaseFir out{factor->q.numerator(), factor->reconstruction_error};
  const double scale = std::sqrt(factor->gamma_sq);
  for (double& t : out.taps) t *= scale;
  return out;
}

TwoSidedFir CausalPart(const TwoSidedFir& filter) {
  if (filter.start_index() >= 0) return filter;
  if (filter.end_index() < 0) return TwoSidedFir::Zero();
  const auto& taps = filter.taps();
  return TwoSidedFir::Causal(std::vector<double>(
      taps.begin() + (-filter.start_index()), taps.end()));
}

}  // namespace dpfilter
