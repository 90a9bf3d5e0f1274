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


// Seedable random number generation with bit-identical output across
// platforms and standard libraries.

#ifndef DPFILTER_RANDOM_H_
#define DPFILTER_RANDOM_H_

#include <cstdint>
#include <random>

namespace dpfilter {

// One SplitMix64 step applied to x: a bijective 64-bit mixer used to derive
// independent seeds from a base seed and a stream index.
uint64_t SplitMix64(uint64_t x);

// Seed for stream `index` under `base`.
uint64_t DeriveSeed(uint64_t base, uint64_t index);

// Uniform double in [0, 1) from the top 53 bits of one 64-bit draw.
inline double UniformDouble(std::mt19937_64& engine) {
  return static_cast<double>(engine() >> 11) * 0x1p-53;
}

// Standard normal variates by the polar method over mt19937_64.
// std::normal_distribution is implementation-defined, so it is not used.
class GaussianGenerator {
 public:
  explicit GaussianGenerator(uint64_t seed) : engine_(seed) {}

  double Next();

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace dpfilter

#endif  // DPFILTER_RANDOM_H_
