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

#include "dpfilter/lti.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "Eigen/Dense"
#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "absl/strings/str_join.h"

namespace dpfilter {
namespace {

bool AllFinite(std::span<const double> values) {
  return std::all_of(values.begin(), values.end(),
                     [](double v) { return std::isfinite(v); });
}

// sum_k c_k w^k by Horner's rule.
std::complex<double> EvaluatePolynomial(std::span<const double> c,
                                        std::complex<double> w) {
  std::complex<double> acc = 0.0;
  for (size_t k = c.size(); k-- > 0;) acc = acc * w + c[k];
  return acc;
}

std::string FormatModuli(std::span<const std::complex<double>> roots,
                         double threshold) {
  std::vector<std::string> parts;
  for (const auto& r : roots) {
    if (std::abs(r) >= threshold) {
      parts.push_back(absl::StrFormat("%.12g", std::abs(r)));
    }
  }
  return absl::StrJoin(parts, ", ");
}

absl::Status CheckPoles(const std::vector<std::complex<double>>& poles) {
  for (const auto& p : poles) {
    if (std::abs(p) >= 1.0 - kUnitCircleTolerance) {
      return absl::FailedPreconditionError(absl::StrCat(
          "system is not stable; pole moduli at or outside the unit circle: ",
          FormatModuli(poles, 1.0 - kUnitCircleTolerance)));
    }
  }
  return absl::OkStatus();
}

absl::Status CheckStable(const RationalTransferFunction& system) {
  if (system.is_fir()) return absl::OkStatus();
  return CheckPoles(system.Poles());
}

double MaxModulus(const std::vector<std::complex<double>>& roots) {
  double rho = 0.0;
  for (const auto& r : roots) rho = std::max(rho, std::abs(r));
  return rho;
}

}  // namespace

std::vector<std::complex<double>> PolynomialRoots(
    std::span<const double> coefficients) {
  size_t first = 0;
  while (first < coefficients.size() && coefficients[first] == 0.0) ++first;
  if (first >= coefficients.size()) return {};
  size_t last = coefficients.size() - 1;
  size_t zero_roots = 0;
  while (last > first && coefficients[last] == 0.0) {
    --last;
    ++zero_roots;
  }
  const int n = static_cast<int>(last - first);
  std::vector<std::complex<double>> roots(zero_roots, 0.0);
  if (n == 0) return roots;
  // Companion matrix of z^n + (c_1/c_0) z^{n-1} + ... + c_n/c_0.
  Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(n, n);
  const double lead = coefficients[first];
  for (int k = 0; k < n; ++k) {
    companion(0, k) = -coefficients[first + 1 + k] / lead;
  }
  for (int k = 1; k < n; ++k) companion(k, k - 1) = 1.0;
  Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, false);
  const auto& eigenvalues = solver.eigenvalues();
  for (int k = 0; k < n; ++k) roots.push_back(eigenvalues[k]);
  return roots;
}

std::vector<double> PolynomialMultiply(std::span<const double> a,
                                       std::span<const double> b) {
  if (a.empty() || b.empty()) return {};
  std::vector<double> out(a.size() + b.size() - 1, 0.0);
  for (size_t i = 0; i < a.size(); ++i) {
    for (size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  }
  return out;
}

// ---------------------------------------------------------------------------
// RationalTransferFunction

absl::StatusOr<RationalTransferFunction> RationalTransferFunction::Create(
    std::vector<double> numerator, std::vector<double> denominator) {
  if (numerator.empty() || denominator.empty()) {
    return absl::InvalidArgumentError(
        "numerator and denominator must be non-empty");
  }
  if (!AllFinite(numerator) || !AllFinite(denominator)) {
    return absl::InvalidArgumentError("coefficients must be finite");
  }
  if (denominator[0] == 0.0) {
    return absl::InvalidArgumentError("leading denominator coefficient is 0");
  }
  const double a0 = denominator[0];
  for (double& b : numerator) b /= a0;
  for (double& a : denominator) a /= a0;
  return RationalTransferFunction(std::move(numerator), std::move(denominator));
}

RationalTransferFunction RationalTransferFunction::Identity() {
  return RationalTransferFunction({1.0}, {1.0});
}

RationalTransferFunction RationalTransferFunction::Delay(int samples) {
  std::vector<double> numerator(std::max(samples, 0) + 1, 0.0);
  numerator.back() = 1.0;
  return RationalTransferFunction(std::move(numerator), {1.0});
}

RationalTransferFunction RationalTransferFunction::Fir(
    std::vector<double> taps) {
  if (taps.empty()) taps.push_back(0.0);
  return RationalTransferFunction(std::move(taps), {1.0});
}

int RationalTransferFunction::order() const {
  return static_cast<int>(std::max(numerator_.size(), denominator_.size())) -
         1;
}

std::complex<double> RationalTransferFunction::Evaluate(double omega) const {
  const std::complex<double> w = std::polar(1.0, -omega);
  return EvaluatePolynomial(numerator_, w) /
         EvaluatePolynomial(denominator_, w);
}

std::vector<std::complex<double>> RationalTransferFunction::Poles() const {
  return PolynomialRoots(denominator_);
}

std::vector<std::complex<double>> RationalTransferFunction::Zeros() const {
  return PolynomialRoots(numerator_);
}

double RationalTransferFunction::MaxPoleModulus() const {
  double rho = 0.0;
  for (const auto& p : Poles()) rho = std::max(rho, std::abs(p));
  return rho;
}

bool RationalTransferFunction::IsStable() const {
  return MaxPoleModulus() < 1.0 - kUnitCircleTolerance;
}

RationalTransferFunction RationalTransferFunction::Cascade(
    const RationalTransferFunction& other) const {
  return RationalTransferFunction(
      PolynomialMultiply(numerator_, other.numerator_),
      PolynomialMultiply(denominator_, other.denominator_));
}

RationalTransferFunction RationalTransferFunction::Scaled(double gain) const {
  std::vector<double> numerator = numerator_;
  for (double& b : numerator) b *= gain;
  return RationalTransferFunction(std::move(numerator), denominator_);
}

// ---------------------------------------------------------------------------
// TwoSidedFir

absl::StatusOr<TwoSidedFir> TwoSidedFir::Create(std::vector<double> taps,
                                                int start_index) {
  if (taps.empty()) {
    return absl::InvalidArgumentError("FIR filter needs at least one tap");
  }
  if (!AllFinite(taps)) {
    return absl::InvalidArgumentError("FIR taps must be finite");
  }
  return TwoSidedFir(std::move(taps), start_index);
}

TwoSidedFir TwoSidedFir::Causal(std::vector<double> taps) {
  if (taps.empty()) taps.push_back(0.0);
  return TwoSidedFir(std::move(taps), 0);
}

TwoSidedFir TwoSidedFir::Zero() { return TwoSidedFir({0.0}, 0); }

double TwoSidedFir::tap(int time_index) const {
  const int i = time_index - start_index_;
  if (i < 0 || i >= static_cast<int>(taps_.size())) return 0.0;
  return taps_[i];
}

std::complex<double> TwoSidedFir::Evaluate(double omega) const {
  const std::complex<double> w = std::polar(1.0, -omega);
  return EvaluatePolynomial(taps_, w) * std::polar(1.0, -omega * start_index_);
}

double TwoSidedFir::Energy() const {
  double energy = 0.0;
  for (double t : taps_) energy += t * t;
  return energy;
}

// ---------------------------------------------------------------------------
// FrequencyGrid

FrequencyGrid::FrequencyGrid(std::vector<double> frequencies, int intervals,
                             bool uniform)
    : frequencies_(std::move(frequencies)),
      intervals_(intervals),
      uniform_(uniform) {
  const size_t n = frequencies_.size();
  weights_.assign(n, 0.0);
  for (size_t i = 0; i + 1 < n; ++i) {
    const double half = 0.5 * (frequencies_[i + 1] - frequencies_[i]);
    weights_[i] += half;
    weights_[i + 1] += half;
  }
  for (double& w : weights_) w /= std::numbers::pi;
}

absl::StatusOr<FrequencyGrid> FrequencyGrid::Uniform(int intervals) {
  if (intervals < 2) {
    return absl::InvalidArgumentError(
        absl::StrCat("grid needs N >= 2 intervals, got ", intervals));
  }
  std::vector<double> w(intervals + 1);
  for (int i = 0; i <= intervals; ++i) {
    w[i] = std::numbers::pi * static_cast<double>(i) / intervals;
  }
  w.back() = std::numbers::pi;
  return FrequencyGrid(std::move(w), intervals, true);
}

absl::StatusOr<FrequencyGrid> FrequencyGrid::Refined(int intervals,
                                                     double min_spacing,
                                                     double refine_upto) {
  absl::StatusOr<FrequencyGrid> uniform = Uniform(intervals);
  if (!uniform.ok()) return uniform.status();
  const double spacing = std::numbers::pi / intervals;
  if (refine_upto <= 0.0) refine_upto = 16.0 * spacing;
  if (!(min_spacing > 0.0) || min_spacing >= refine_upto ||
      refine_upto > std::numbers::pi) {
    return absl::InvalidArgumentError(
        "refinement needs 0 < min_spacing < refine_upto <= pi");
  }
  std::vector<double> w(uniform->frequencies().begin(),
                        uniform->frequencies().end());
  constexpr double kRatio = 1.04;
  for (double x = min_spacing; x < refine_upto; x *= kRatio) w.push_back(x);
  std::sort(w.begin(), w.end());
  std::vector<double> merged;
  merged.reserve(w.size());
  for (double x : w) {
    if (merged.empty() || x - merged.back() > 1e-3 * min_spacing) {
      merged.push_back(x);
    }
  }
  merged.back() = std::numbers::pi;
  return FrequencyGrid(std::move(merged), intervals, false);
}

absl::StatusOr<FrequencyGrid> FrequencyGrid::FromFrequencies(
    std::vector<double> frequencies) {
  if (frequencies.size() < 3) {
    return absl::InvalidArgumentError("grid needs at least 3 frequencies");
  }
  if (std::abs(frequencies.front()) > 1e-12 ||
      std::abs(frequencies.back() - std::numbers::pi) > 1e-12) {
    return absl::InvalidArgumentError("grid must cover [0, pi]");
  }
  for (size_t i = 1; i < frequencies.size(); ++i) {
    if (!(frequencies[i] > frequencies[i - 1])) {
      return absl::InvalidArgumentError(
          "grid frequencies must be strictly increasing");
    }
  }
  frequencies.front() = 0.0;
  frequencies.back() = std::numbers::pi;
  return FrequencyGrid(std::move(frequencies), 0, false);
}

double FrequencyGrid::Integrate(std::span<const double> values) const {
  double sum = 0.0;
  const size_t n = std::min(values.size(), weights_.size());
  for (size_t i = 0; i < n; ++i) sum += weights_[i] * values[i];
  return sum;
}

// ---------------------------------------------------------------------------
// Frequency responses, impulse responses and norms

absl::StatusOr<std::vector<std::complex<double>>> FreqResponse(
    const RationalTransferFunction& system, const FrequencyGrid& grid) {
  if (!system.is_fir()) {
    const std::vector<std::complex<double>> poles = system.Poles();
    for (const auto& p : poles) {
      if (std::abs(std::abs(p) - 1.0) < kUnitCircleTolerance) {
        return absl::FailedPreconditionError(
            absl::StrFormat("pole on the unit circle (modulus %.15g)",
                            std::abs(p)));
      }
    }
  }
  std::vector<std::complex<double>> response(grid.size());
  for (size_t i = 0; i < grid.size(); ++i) {
    response[i] = system.Evaluate(grid[i]);
  }
  return response;
}

std::vector<std::complex<double>> FreqResponse(const TwoSidedFir& system,
                                               const FrequencyGrid& grid) {
  std::vector<std::complex<double>> response(grid.size());
  for (size_t i = 0; i < grid.size(); ++i) {
    response[i] = system.Evaluate(grid[i]);
  }
  return response;
}

namespace {

ImpulseResponse SimulateImpulse(const RationalTransferFunction& system,
                                int64_t horizon, double rho) {
  ImpulseResponse out;
  out.values.resize(horizon);
  RationalFilter filter(system);
  for (int64_t t = 0; t < horizon; ++t) {
    out.values[t] = filter.StepUnchecked(t == 0 ? 1.0 : 0.0);
  }
  if (system.is_fir()) {
    const auto& taps = system.numerator();
    for (size_t k = static_cast<size_t>(horizon); k < taps.size(); ++k) {
      out.tail_energy_bound += taps[k] * taps[k];
    }
    return out;
  }
  // Geometric extrapolation of the energy in the last window.
  const int64_t window =
      std::min<int64_t>(horizon, std::max(system.order(), 1) * 4);
  double window_energy = 0.0;
  for (int64_t t = horizon - window; t < horizon; ++t) {
    window_energy += out.values[t] * out.values[t];
  }
  const double decay = std::pow(rho, 2.0 * static_cast<double>(window));
  out.tail_energy_bound =
      decay >= 1.0 ? std::numeric_limits<double>::infinity()
                   : window_energy * decay / (1.0 - decay);
  return out;
}

}  // namespace

absl::StatusOr<ImpulseResponse> ComputeImpulseResponse(
    const RationalTransferFunction& system, int64_t horizon) {
  if (horizon <= 0) {
    return absl::InvalidArgumentError("horizon must be positive");
  }
  if (system.is_fir()) return SimulateImpulse(system, horizon, 0.0);
  const std::vector<std::complex<double>> poles = system.Poles();
  if (absl::Status s = CheckPoles(poles); !s.ok()) return s;
  return SimulateImpulse(system, horizon, MaxModulus(poles));
}

absl::StatusOr<ImpulseResponse> ComputeImpulseResponse(
    const RationalTransferFunction& system) {
  if (system.is_fir()) {
    return SimulateImpulse(system,
                           static_cast<int64_t>(system.numerator().size()),
                           0.0);
  }
  const std::vector<std::complex<double>> poles = system.Poles();
  if (absl::Status s = CheckPoles(poles); !s.ok()) return s;
  const double rho = MaxModulus(poles);
  int64_t horizon = 4 * static_cast<int64_t>(system.order() + 1);
  if (rho > 0.0) {
    const double needed = std::log(kImpulseTailTolerance * (1.0 - rho * rho)) /
                          (2.0 * std::log(rho));
    horizon = std::max<int64_t>(horizon,
                                static_cast<int64_t>(std::ceil(needed)) +
                                    system.order());
  }
  while (true) {
    if (horizon > kMaxImpulseHorizon) {
      return absl::ResourceExhaustedError(absl::StrFormat(
          "impulse response tail does not fall below %g within %d taps "
          "(max pole modulus %.12g)",
          kImpulseTailTolerance, kMaxImpulseHorizon, rho));
    }
    ImpulseResponse response = SimulateImpulse(system, horizon, rho);
    double energy = 0.0;
    for (double g : response.values) energy += g * g;
    if (!std::isfinite(energy)) {
      return absl::FailedPreconditionError("impulse response diverged");
    }
    if (response.tail_energy_bound <= kImpulseTailTolerance * energy) {
      return response;
    }
    horizon *= 2;
  }
}

absl::StatusOr<double> H2Norm(const RationalTransferFunction& system) {
  absl::StatusOr<ImpulseResponse> response = ComputeImpulseResponse(system);
  if (!response.ok()) return response.status();
  double energy = response->tail_energy_bound;
  for (double g : response->values) energy += g * g;
  return std::sqrt(energy);
}

double H2Norm(const TwoSidedFir& system) {
  return std::sqrt(system.Energy());
}

absl::StatusOr<double> LpNorm(std::span<const double> sequence, double p) {
  if (!(p >= 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("l_p norm needs p >= 1, got ", p));
  }
  if (!AllFinite(sequence)) {
    return absl::InvalidArgumentError("sequence must be finite");
  }
  double peak = 0.0;
  for (double x : sequence) peak = std::max(peak, std::abs(x));
  if (std::isinf(p) || peak == 0.0) return peak;
  if (p == 1.0) {
    double sum = 0.0;
    for (double x : sequence) sum += std::abs(x);
    return sum;
  }
  double sum = 0.0;
  for (double x : sequence) sum += std::pow(std::abs(x) / peak, p);
  return peak * std::pow(sum, 1.0 / p);
}

// ---------------------------------------------------------------------------
// Streaming filters

RationalFilter::RationalFilter(RationalTransferFunction system)
    : system_(std::move(system)) {
  const size_t n = static_cast<size_t>(system_.order());
  numerator_ = system_.numerator();
  denominator_ = system_.denominator();
  numerator_.resize(n + 1, 0.0);
  denominator_.resize(n + 1, 0.0);
  state_.assign(n, 0.0);
}

absl::StatusOr<double> RationalFilter::Step(double input) {
  if (!std::isfinite(input)) {
    return absl::InvalidArgumentError("non-finite filter input");
  }
  return StepUnchecked(input);
}

double RationalFilter::StepUnchecked(double input) {
  const size_t n = state_.size();
  if (n == 0) return numerator_[0] * input;
  const double y = numerator_[0] * input + state_[0];
  for (size_t i = 0; i + 1 < n; ++i) {
    state_[i] =
        state_[i + 1] + numerator_[i + 1] * input - denominator_[i + 1] * y;
  }
  state_[n - 1] = numerator_[n] * input - denominator_[n] * y;
  return y;
}

void RationalFilter::Reset() { std::fill(state_.begin(), state_.end(), 0.0); }

FirFilter::FirFilter(TwoSidedFir system) : system_(std::move(system)) {
  const size_t offset = system_.start_index() > 0
                            ? static_cast<size_t>(system_.start_index())
                            : 0;
  taps_.assign(offset, 0.0);
  taps_.insert(taps_.end(), system_.taps().begin(), system_.taps().end());
  history_.assign(2 * taps_.size(), 0.0);
}

absl::StatusOr<double> FirFilter::Step(double input) {
  if (!std::isfinite(input)) {
    return absl::InvalidArgumentError("non-finite filter input");
  }
  return StepUnchecked(input);
}

double FirFilter::StepUnchecked(double input) {
  const size_t n = taps_.size();
  pos_ = pos_ == 0 ? n - 1 : pos_ - 1;
  history_[pos_] = input;
  history_[pos_ + n] = input;
  const double* h = history_.data() + pos_;
  double acc = 0.0;
  for (size_t a = 0; a < n; ++a) acc += taps_[a] * h[a];
  return acc;
}

void FirFilter::Reset() {
  std::fill(history_.begin(), history_.end(), 0.0);
  pos_ = 0;
}

}  // namespace dpfilter
