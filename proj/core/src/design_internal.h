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


#ifndef DPFILTER_CORE_SRC_DESIGN_INTERNAL_H_
#define DPFILTER_CORE_SRC_DESIGN_INTERNAL_H_

#include <complex>
#include <cstddef>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "dpfilter/lti.h"
#include "dpfilter/privacy.h"

namespace dpfilter {
namespace internal {

// (d kappa)^2.
double NoiseScaleSquared(const PrivacyParams& params);

// H(e^{j 2 pi k / m}) for k = 0..m-1.
absl::StatusOr<std::vector<std::complex<double>>> FullResponse(
    const RationalTransferFunction& system, size_t m);

absl::Status CheckFftSize(size_t m);

}  // namespace internal
}  // namespace dpfilter

#endif  // DPFILTER_CORE_SRC_DESIGN_INTERNAL_H_
