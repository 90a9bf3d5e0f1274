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

#include <cmath>
#include <random>
#include <vector>

#include "dpfilter/design.h"
#include "dpfilter/lti.h"
#include "dpfilter/privacy.h"
#include "dpfilter/sources.h"
#include "dpfilter/spectral.h"
#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "test_util.h"

namespace dpfilter {
namespace {

RationalTransferFunction Make(std::vector<double> b, std::vector<double> a) {
  return *RationalTransferFunction::Create(std::move(b), std::move(a));
}

// Unit-variance two-state chain with lambda = 0.5.
RationalPsd MarkovPsd() { return *RationalPsd::Create(0.75, {}, {0.5}); }

PrivacyParams Ln3Params() {
  return *PrivacyParams::Create(std::log(3.0), 0.05, 1);
}

DfOptions Lengths(int delay, int n_forward, int n_feedback) {
  DfOptions options;
  options.delay = delay;
  options.n_forward = n_forward;
  options.n_feedback = n_feedback;
  return options;
}

double Tap(const TwoSidedFir& fir, int index) {
  const int i = index - fir.start_index();
  if (i < 0 || i >= static_cast<int>(fir.taps().size())) return 0.0;
  return fir.taps()[i];
}

TEST(DecisionDeviceTest, SignMapsTiesUp) {
  const DecisionDevice sign = DecisionDevice::Sign(2.0);
  EXPECT_EQ(sign.Decide(0.3), 2.0);
  EXPECT_EQ(sign.Decide(-1e-9), -2.0);
  EXPECT_EQ(sign.Decide(0.0), 2.0);
}

TEST(DecisionDeviceTest, QuantizerPicksNearestLatticePoint) {
  ASSERT_OK_AND_ASSIGN(const DecisionDevice q,
                       DecisionDevice::Quantizer(0.5, 0.25));
  EXPECT_DOUBLE_EQ(q.Decide(0.6), 0.75);
  EXPECT_DOUBLE_EQ(q.Decide(0.4), 0.25);
  EXPECT_DOUBLE_EQ(q.Decide(-0.9), -0.75);
  EXPECT_FALSE(DecisionDevice::Quantizer(0.0).ok());
  EXPECT_FALSE(DecisionDevice::Quantizer(-1.0).ok());
}

TEST(DfEqualizerTest, NoiselessIdentityChannelPassesThrough) {
  ASSERT_OK_AND_ASSIGN(
      const DfEqualizer eq,
      DesignDfEqualizer(MarkovPsd(), RationalTransferFunction::Identity(), 0.0,
                        Lengths(0, 1, 4)));
  EXPECT_NEAR(Tap(eq.forward, 0), 1.0, 1e-9);
  for (double tap : eq.feedback.taps()) EXPECT_NEAR(tap, 0.0, 1e-9);
  EXPECT_EQ(eq.feedback.start_index(), 1);
  EXPECT_NEAR(eq.detector_mse, 0.0, 1e-9);
}

TEST(DfEqualizerTest, RejectsInvalidLengths) {
  const auto g = RationalTransferFunction::Identity();
  EXPECT_FALSE(DesignDfEqualizer(MarkovPsd(), g, 1.0, Lengths(0, 0, 2)).ok());
  EXPECT_FALSE(DesignDfEqualizer(MarkovPsd(), g, 1.0, Lengths(-1, 4, 2)).ok());
  EXPECT_FALSE(DesignDfEqualizer(MarkovPsd(), g, 1.0, Lengths(0, 4, -1)).ok());
  DfOptions small_fft = Lengths(5, 16, 8);
  small_fft.fft_size = 64;
  EXPECT_FALSE(DesignDfEqualizer(MarkovPsd(), g, 1.0, small_fft).ok());
}

TEST(DfEqualizerTest, ReportedMseMatchesErrorSpectrum) {
  const auto g = Make({0.8, 0.6}, {1.0});
  const auto f = Make({1.0, 0.5}, {1.0, -0.3});
  ASSERT_OK_AND_ASSIGN(
      const DfEqualizer eq,
      DesignDfEqualizer(MarkovPsd(), g, 0.7, Lengths(3, 8, 4)));
  ASSERT_OK_AND_ASSIGN(const DfErrorSpectrum spectrum,
                       DfCorrectDecisionMse(f, MarkovPsd(), g, 0.7, eq));
  EXPECT_NEAR(spectrum.detector_mse, eq.detector_mse, 1e-8);
  EXPECT_GT(spectrum.output_mse, 0.0);
}

// Time-domain oracle: run the equalizer with the true past symbols fed back.
TEST(DfEqualizerTest, GenieSimulationMatchesDetectorMse) {
  const std::vector<double> g_taps = {0.8, 0.6};
  const double sigma = 0.9;
  ASSERT_OK_AND_ASSIGN(
      const DfEqualizer eq,
      DesignDfEqualizer(MarkovPsd(), RationalTransferFunction::Fir(g_taps),
                        sigma, Lengths(4, 12, 6)));
  ASSERT_OK_AND_ASSIGN(const MarkovSource source,
                       MarkovSource::Symmetric(0.75, 1.0));
  const int64_t n = 400000;
  const std::vector<double> u = source.Sample(n, 17);
  std::mt19937_64 rng(29);
  std::normal_distribution<double> normal(0.0, sigma);
  std::vector<double> v(n);
  for (int64_t t = 0; t < n; ++t) {
    v[t] =
        g_taps[0] * u[t] + (t > 0 ? g_taps[1] * u[t - 1] : 0.0) + normal(rng);
  }
  const int margin = 64;
  double sum = 0.0;
  int64_t count = 0;
  for (int64_t s = margin; s < n - margin; ++s) {
    double estimate = 0.0;
    const auto& h1 = eq.forward.taps();
    for (size_t i = 0; i < h1.size(); ++i) {
      estimate += h1[i] * v[s - (eq.forward.start_index() + i)];
    }
    const auto& h2 = eq.feedback.taps();
    for (size_t j = 0; j < h2.size(); ++j) {
      estimate -= h2[j] * u[s - (eq.feedback.start_index() + j)];
    }
    sum += (u[s] - estimate) * (u[s] - estimate);
    ++count;
  }
  EXPECT_NEAR(sum / count, eq.detector_mse, 0.03 * eq.detector_mse);
}

TEST(DfEqualizerTest, LongEqualizerApproachesLogIntegralMse) {
  const auto f = RationalTransferFunction::Identity();
  const auto g = RationalTransferFunction::Identity();
  const PrivacyParams params = Ln3Params();
  ASSERT_OK_AND_ASSIGN(const double approx,
                       DfApproximateMse(f, MarkovPsd(), g, params));
  ASSERT_OK_AND_ASSIGN(
      const DfEqualizer eq,
      DesignDfEqualizer(MarkovPsd(), g, Kappa(params), Lengths(20, 64, 32)));
  EXPECT_NEAR(eq.detector_mse, approx, 0.01 * approx);
  // Shorter equalizers cannot do better.
  ASSERT_OK_AND_ASSIGN(
      const DfEqualizer short_eq,
      DesignDfEqualizer(MarkovPsd(), g, Kappa(params), Lengths(2, 4, 2)));
  EXPECT_GE(short_eq.detector_mse, eq.detector_mse - 1e-12);
}

TEST(DfEqualizerTest, MseIsMonotoneInLengths) {
  const auto g = Make({0.8, 0.6}, {1.0});
  double previous = 1e300;
  for (int n : {1, 2, 4, 8, 16}) {
    ASSERT_OK_AND_ASSIGN(
        const DfEqualizer eq,
        DesignDfEqualizer(MarkovPsd(), g, 1.0, Lengths(n - 1, n, n)));
    EXPECT_LE(eq.detector_mse, previous + 1e-12) << n;
    previous = eq.detector_mse;
  }
}

TEST(IdealFeedbackTest, MonicWithNegligibleAnticausalPart) {
  const auto f = Make({1.0, 0.5}, {1.0, -0.3});
  const auto g = Make({0.8, 0.6}, {1.0});
  ASSERT_OK_AND_ASSIGN(
      const IdealFeedback fb,
      IdealFeedbackFilter(f, MarkovPsd(), g, Ln3Params(), 16, 1 << 14));
  ASSERT_EQ(fb.b.size(), 16u);
  EXPECT_NEAR(fb.b[0], 1.0, 1e-6);
  EXPECT_LT(fb.anticausal_energy, 1e-6);
}

TEST(DesignDfTest, AssemblesMechanism) {
  const auto f = Make({1.0, 0.5}, {1.0, -0.3});
  const auto g = Make({0.8, 0.6}, {1.0});
  const PrivacyParams params = Ln3Params();
  ASSERT_OK_AND_ASSIGN(const MechanismDesign design,
                       DesignDf(f, MarkovPsd(), g, params, Lengths(5, 16, 8)));
  EXPECT_EQ(design.kind, MechanismKind::kDecisionFeedback);
  EXPECT_EQ(design.release_delay(), 5);
  EXPECT_NEAR(design.calibration.sigma, Kappa(params), 1e-9);
  const auto& df =
      std::get<DecisionFeedbackReconstruction>(design.reconstruction);
  EXPECT_EQ(df.feedback.start_index(), 1);
  EXPECT_EQ(df.forward.start_index(), -5);
  EXPECT_EQ(df.forward.taps().size(), 16u);
  EXPECT_EQ(df.feedback.taps().size(), 8u);
  for (double w : {0.1, 1.0, 2.5}) {
    EXPECT_NEAR(std::abs(df.output_filter.Evaluate(w) - f.Evaluate(w)), 0.0,
                1e-12);
  }
  ASSERT_OK_AND_ASSIGN(
      const DfEqualizer eq,
      DesignDfEqualizer(MarkovPsd(), design.prefilter, design.calibration.sigma,
                        Lengths(5, 16, 8)));
  EXPECT_NEAR(df.detector_mse, eq.detector_mse, 1e-9);
  EXPECT_GT(design.theoretical_mse, 0.0);
}

}  // namespace
}  // namespace dpfilter
