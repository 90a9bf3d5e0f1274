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

// Microbenchmarks for the design routines and the per-sample runtime.

#include <cmath>
#include <random>
#include <vector>

#include "benchmark/benchmark.h"
#include "dpfilter/design.h"
#include "dpfilter/lti.h"
#include "dpfilter/privacy.h"
#include "dpfilter/runtime.h"
#include "dpfilter/sources.h"
#include "dpfilter/spectral.h"
#include "dpfilter/waterfill.h"

namespace dpfilter {
namespace {

RationalTransferFunction Target() {
  return *RationalTransferFunction::Create({1.0, 0.995}, {1.0, -0.995});
}

RationalPsd InputPsd() { return *RationalPsd::Create(0.75, {}, {0.5}); }

PrivacyParams Params() {
  return *PrivacyParams::Create(std::log(3.0), 0.05, 1);
}

void BM_Kappa(benchmark::State& state) {
  const PrivacyParams params = Params();
  for (auto _ : state) benchmark::DoNotOptimize(Kappa(params));
}
BENCHMARK(BM_Kappa);

void BM_SolveWaterfillLmmse(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> level(0.1, 10.0);
  std::vector<double> alpha(n), beta(n), w(n, 1.0 / n);
  for (int i = 0; i < n; ++i) {
    alpha[i] = level(rng);
    beta[i] = level(rng);
  }
  const WaterfillProblem problem = *WaterfillProblem::Create(alpha, beta, w);
  for (auto _ : state) {
    benchmark::DoNotOptimize(SolveWaterfillLmmse(problem));
  }
}
BENCHMARK(BM_SolveWaterfillLmmse)->Arg(64)->Arg(4096);

void BM_FactorGrid(benchmark::State& state) {
  const GridPsd psd =
      GridPsd::Sample(InputPsd(), *FrequencyGrid::Uniform(4096));
  const int taps = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(FactorGrid(psd, taps));
}
BENCHMARK(BM_FactorGrid)->Arg(64)->Arg(512)->Unit(benchmark::kMillisecond);

void BM_LzfTheoreticalMse(benchmark::State& state) {
  const RationalTransferFunction f = Target();
  const PrivacyParams params = Params();
  for (auto _ : state) benchmark::DoNotOptimize(LzfTheoreticalMse(f, params));
}
BENCHMARK(BM_LzfTheoreticalMse)->Unit(benchmark::kMillisecond);

void BM_DesignDfEqualizer(benchmark::State& state) {
  const RationalTransferFunction g = RationalTransferFunction::Fir({0.8, 0.6});
  DfOptions options;
  options.n_forward = static_cast<int>(state.range(0));
  options.n_feedback = options.n_forward / 2;
  for (auto _ : state) {
    benchmark::DoNotOptimize(DesignDfEqualizer(InputPsd(), g, 1.0, options));
  }
}
BENCHMARK(BM_DesignDfEqualizer)
    ->Arg(16)
    ->Arg(128)
    ->Unit(benchmark::kMillisecond);

// Per-sample cost of the full pipeline: noise, prefilter, reconstruction.
void RunPipeline(benchmark::State& state, const MechanismDesign& design) {
  MechanismInstance instance = *MechanismInstance::Create(design, 0.0);
  const std::vector<double> u =
      MarkovSource::Symmetric(0.75, 1.0)->Sample(4096, 1);
  size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(instance.Process(u[i]));
    i = (i + 1) % u.size();
  }
  state.SetItemsProcessed(state.iterations());
}

void BM_ProcessLzf(benchmark::State& state) {
  LzfOptions options;
  options.fir_length = static_cast<int>(state.range(0));
  RunPipeline(state, *DesignLzf(Target(), Params(), options));
}
BENCHMARK(BM_ProcessLzf)->Arg(64)->Arg(512);

void BM_ProcessDf(benchmark::State& state) {
  const RationalTransferFunction g = RationalTransferFunction::Fir({0.8, 0.6});
  RunPipeline(state, *DesignDf(Target(), InputPsd(), g, Params()));
}
BENCHMARK(BM_ProcessDf);

}  // namespace
}  // namespace dpfilter

BENCHMARK_MAIN();
