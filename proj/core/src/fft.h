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

#ifndef DPFILTER_CORE_SRC_FFT_H_
#define DPFILTER_CORE_SRC_FFT_H_

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace dpfilter {
namespace internal {

// Unnormalized complex DFT of size `data.size()`:
//   X_k = sum_n x_n exp(-2 pi j k n / M).
// Backed by FFTW; plan creation is serialized so concurrent callers are safe.
std::vector<std::complex<double>> ForwardDft(
    std::span<const std::complex<double>> data);

// Inverse DFT including the 1/M factor, so InverseDft(ForwardDft(x)) == x.
std::vector<std::complex<double>> InverseDft(
    std::span<const std::complex<double>> data);

// Forward DFT of a real sequence zero-padded (or wrapped) to length `size`.
std::vector<std::complex<double>> RealForwardDft(std::span<const double> data,
                                                 size_t size);

// Real part of the inverse DFT.
std::vector<double> RealInverseDft(std::span<const std::complex<double>> data);

// Smallest power of two that is >= n.
size_t NextPowerOfTwo(size_t n);

}  // namespace internal
}  // namespace dpfilter

#endif  // DPFILTER_CORE_SRC_FFT_H_
