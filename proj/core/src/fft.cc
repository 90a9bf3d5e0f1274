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

#include "fft.h"

#include <fftw3.h>

#include <algorithm>
#include <mutex>

namespace dpfilter {
namespace internal {
namespace {

// The FFTW planner is not thread-safe; execution on distinct arrays is.
std::mutex& PlannerMutex() {
  static std::mutex mu;
  return mu;
}

std::vector<std::complex<double>> Transform(
    std::span<const std::complex<double>> data, int sign) {
  const size_t n = data.size();
  std::vector<std::complex<double>> out(data.begin(), data.end());
  if (n <= 1) return out;
  auto* buffer = reinterpret_cast<fftw_complex*>(out.data());
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(PlannerMutex());
    plan = fftw_plan_dft_1d(static_cast<int>(n), buffer, buffer, sign,
                            FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  {
    std::lock_guard<std::mutex> lock(PlannerMutex());
    fftw_destroy_plan(plan);
  }
  return out;
}

}  // namespace

std::vector<std::complex<double>> ForwardDft(
    std::span<const std::complex<double>> data) {
  return Transform(data, FFTW_FORWARD);
}

std::vector<std::complex<double>> InverseDft(
    std::span<const std::complex<double>> data) {
  std::vector<std::complex<double>> out = Transform(data, FFTW_BACKWARD);
  const double scale = 1.0 / static_cast<double>(data.size());
  for (auto& value : out) value *= scale;
  return out;
}

std::vector<std::complex<double>> RealForwardDft(std::span<const double> data,
                                                 size_t size) {
  std::vector<std::complex<double>> padded(size, 0.0);
  for (size_t i = 0; i < data.size(); ++i) padded[i % size] += data[i];
  return ForwardDft(padded);
}

std::vector<double> RealInverseDft(
    std::span<const std::complex<double>> data) {
  std::vector<std::complex<double>> complex_out = InverseDft(data);
  std::vector<double> out(complex_out.size());
  std::transform(complex_out.begin(), complex_out.end(), out.begin(),
                 [](const std::complex<double>& c) { return c.real(); });
  return out;
}

size_t NextPowerOfTwo(size_t n) {
  size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

}  // namespace internal
}  // namespace dpfilter
