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

#include "dpfilter/design.h"

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <vector>

#include "dpfilter/lti.h"
#include "dpfilter/privacy.h"
#include "dpfilter/spectral.h"
#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "test_util.h"

namespace dpfilter {
namespace {

constexpr double kPi = std::numbers::pi;

RationalTransferFunction Make(std::vector<double> b, std::vector<double> a) {
  return *RationalTransferFunction::Create(std::move(b), std::move(a));
}

RationalTransferFunction FirstOrderExample() {
  return Make({1.0, 0.995}, {1.0, -0.995});
}

RationalPsd MarkovPsd() { return *RationalPsd::Create(0.75, {}, {0.5}); }

PrivacyParams Ln3Params() {
  return *PrivacyParams::Create(std::log(3.0), 0.05, 1);
}

LzfOptions LzfLength(int length) {
  LzfOptions options;
  options.fir_length = length;
  return options;
}

WienerOptions HalfLength(int half_length) {
  WienerOptions options;
  options.half_length = half_length;
  return options;
}

LmmseOptions CausalLmmse() {
  LmmseOptions options;
  options.causal = true;
  return options;
}

PrefilterOptions SmallPrefilter() {
  PrefilterOptions options;
  options.grid_intervals = 1024;
  options.fir_length = 64;
  return options;
}

// Adaptive Simpson on [a, b], independent of the library quadrature.
double AdaptiveSimpson(const std::function<double(double)>& f, double a,
                       double b, double tol) {
  std::function<double(double, double, double, double, double, double, int)>
      recurse = [&](double lo, double hi, double flo, double fmid, double fhi,
                    double whole, int depth) -> double {
    const double mid = 0.5 * (lo + hi);
    const double lm = 0.5 * (lo + mid);
    const double rm = 0.5 * (mid + hi);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = (mid - lo) / 6.0 * (flo + 4.0 * flm + fmid);
    const double right = (hi - mid) / 6.0 * (fmid + 4.0 * frm + fhi);
    if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol) {
      return left + right + (left + right - whole) / 15.0;
    }
    return recurse(lo, mid, flo, flm, fmid, left, depth - 1) +
           recurse(mid, hi, fmid, frm, fhi, right, depth - 1);
  };
  const double fa = f(a);
  const double fb = f(b);
  const double fm = f(0.5 * (a + b));
  return recurse(a, b, fa, fm, fb, (b - a) / 6.0 * (fa + 4.0 * fm + fb), 60);
}

// (1/pi) int_0^pi |F| for F = (1 + a z^-1) / (1 - a z^-1).
double MeanMagnitude(double a) {
  auto mag = [a](double w) {
    return std::sqrt((1.0 + a * a + 2.0 * a * std::cos(w)) /
                     (1.0 + a * a - 2.0 * a * std::cos(w)));
  };
  return AdaptiveSimpson(mag, 0.0, kPi, 1e-13) / kPi;
}

// Power-series taps of sqrt((1 + a x) / (1 - a x)), the minimum-phase factor
// phi+ with |phi+|^2 = |F|.
std::vector<double> SqrtFactorSeries(double a, int length) {
  std::vector<double> up(length);    // (1 + y)^{1/2}
  std::vector<double> down(length);  // (1 - y)^{-1/2}
  up[0] = 1.0;
  down[0] = 1.0;
  for (int k = 1; k < length; ++k) {
    up[k] = up[k - 1] * (0.5 - (k - 1)) / k;
    down[k] = down[k - 1] * (0.5 + (k - 1)) / k;
  }
  std::vector<double> taps(length, 0.0);
  double power = 1.0;
  for (int k = 0; k < length; ++k) {
    double c = 0.0;
    for (int i = 0; i <= k; ++i) c += up[i] * down[k - i];
    taps[k] = c * power;
    power *= a;
  }
  return taps;
}

// --- LZF -------------------------------------------------------------------

TEST(LzfTheoreticalMseTest, ConstantTargets) {
  const PrivacyParams params = Ln3Params();
  const double kappa = Kappa(params);
  ASSERT_OK_AND_ASSIGN(
      double unit,
      LzfTheoreticalMse(RationalTransferFunction::Identity(), params));
  EXPECT_NEAR(unit, kappa * kappa, 1e-12);

  ASSERT_OK_AND_ASSIGN(PrivacyParams d2,
                       PrivacyParams::Create(std::log(3.0), 0.05, 2));
  ASSERT_OK_AND_ASSIGN(double gain, LzfTheoreticalMse(Make({3.0}, {1.0}), d2));
  EXPECT_NEAR(gain, 9.0 * 4.0 * kappa * kappa, 1e-10);
}

TEST(LzfTheoreticalMseTest, FirstOrderMatchesIndependentQuadrature) {
  const PrivacyParams params = Ln3Params();
  ASSERT_OK_AND_ASSIGN(double mse,
                       LzfTheoreticalMse(FirstOrderExample(), params));
  const double expected = Kappa(params) * MeanMagnitude(0.995);
  EXPECT_NEAR(std::sqrt(mse) / expected, 1.0, 2e-6);
  EXPECT_NEAR(std::sqrt(mse), 7.4715, 1e-3);
}

TEST(LzfMseTest, ScaleInvariance) {
  const PrivacyParams params = Ln3Params();
  const RationalTransferFunction f = Make({1.0, 0.5}, {1.0, -0.8});
  const RationalTransferFunction g = Make({1.0, 0.3, -0.2}, {1.0});
  ASSERT_OK_AND_ASSIGN(double base, LzfMse(f, g, params));
  for (double c : {1e-3, 0.5, 7.0, 1e4}) {
    ASSERT_OK_AND_ASSIGN(double scaled, LzfMse(f, g.Scaled(c), params));
    EXPECT_NEAR(scaled / base, 1.0, 1e-9) << "c=" << c;
  }
}

TEST(DesignLzfTest, IdentityTarget) {
  const PrivacyParams params = Ln3Params();
  ASSERT_OK_AND_ASSIGN(
      MechanismDesign design,
      DesignLzf(RationalTransferFunction::Identity(), params, LzfLength(8)));
  EXPECT_EQ(design.kind, MechanismKind::kLzf);
  ASSERT_OK_AND_ASSIGN(ImpulseResponse g,
                       ComputeImpulseResponse(design.prefilter, 8));
  EXPECT_NEAR(g.values[0], 1.0, 1e-9);
  for (int k = 1; k < 8; ++k) EXPECT_NEAR(g.values[k], 0.0, 1e-9);
  const auto& h = std::get<LinearReconstruction>(design.reconstruction);
  for (double w : {0.0, 0.4, 2.0, kPi}) {
    EXPECT_LT(std::abs(h.Evaluate(w) - 1.0), 1e-9);
  }
  EXPECT_NEAR(design.calibration.sigma, Kappa(params), 1e-9);
  EXPECT_EQ(design.release_delay(), 0);
}

TEST(DesignLzfTest, FirstOrderRealizationCloseToBound) {
  const PrivacyParams params = Ln3Params();
  ASSERT_OK_AND_ASSIGN(MechanismDesign design,
                       DesignLzf(FirstOrderExample(), params));
  ASSERT_OK_AND_ASSIGN(double bound,
                       LzfTheoreticalMse(FirstOrderExample(), params));
  ASSERT_OK_AND_ASSIGN(double realized,
                       LzfMse(FirstOrderExample(), design.prefilter, params));
  EXPECT_NEAR(realized / bound, 1.0, 0.01);
  EXPECT_NEAR(design.theoretical_mse, bound, 1e-12 * bound);
  ASSERT_OK_AND_ASSIGN(double norm, H2Norm(design.prefilter));
  EXPECT_NEAR(norm, 1.0, 1e-9);
  for (const auto& z : design.prefilter.Zeros()) EXPECT_LT(std::abs(z), 1.0);
}

TEST(DesignLzfTest, PrefilterMatchesSquareRootFactorSeries) {
  // |F| = phi+ phi- with phi+ = sqrt((1 + a z^-1) / (1 - a z^-1)).
  const PrivacyParams params = Ln3Params();
  ASSERT_OK_AND_ASSIGN(MechanismDesign design,
                       DesignLzf(FirstOrderExample(), params));
  const std::vector<double>& taps = design.prefilter.numerator();
  std::vector<double> series = SqrtFactorSeries(0.995, taps.size());
  double energy = 0.0;
  for (double t : series) energy += t * t;
  const double scale = 1.0 / std::sqrt(energy);
  double worst = 0.0;
  for (size_t k = 0; k < taps.size(); ++k) {
    worst = std::max(worst, std::abs(taps[k] - scale * series[k]));
  }
  EXPECT_LT(worst, 1e-3 * scale * series[0]);
}

TEST(DesignLzfTest, RejectsUnstableTarget) {
  EXPECT_FALSE(DesignLzf(Make({1.0}, {1.0, -1.2}), Ln3Params()).ok());
}

// --- LMMSE -----------------------------------------------------------------

TEST(LmmseTheoreticalMseTest, ZeroProfileIsPriorError) {
  const PrivacyParams params = Ln3Params();
  const RationalTransferFunction f = Make({1.0, 0.5}, {1.0, -0.8});
  ASSERT_OK_AND_ASSIGN(FrequencyGrid grid, FrequencyGrid::Uniform(1024));
  std::vector<double> prior;
  for (double w : grid.frequencies()) {
    prior.push_back(MarkovPsd().Evaluate(w) * std::norm(f.Evaluate(w)));
  }
  ASSERT_OK_AND_ASSIGN(
      double mse,
      LmmseTheoreticalMse(f, MarkovPsd(), grid,
                          std::vector<double>(grid.size(), 0.0), params));
  EXPECT_NEAR(mse, grid.Integrate(prior), 1e-12);
}

TEST(LmmseTheoreticalMseTest, HighSignalLimitRecoversLzf) {
  const PrivacyParams params = Ln3Params();
  const RationalTransferFunction f = Make({1.0, 0.5}, {1.0, -0.8});
  const RationalTransferFunction g = Make({1.0, 0.3}, {1.0});
  ASSERT_OK_AND_ASSIGN(double lzf, LzfMse(f, g, params));
  ASSERT_OK_AND_ASSIGN(RationalPsd loud, RationalPsd::Create(1e9, {}, {0.5}));
  ASSERT_OK_AND_ASSIGN(double lmmse, LmmseTheoreticalMse(f, loud, g, params));
  EXPECT_NEAR(lmmse / lzf, 1.0, 1e-6);
}

TEST(LmmseOptimalMseTest, FirstOrderExample) {
  ASSERT_OK_AND_ASSIGN(double mse, LmmseOptimalMse(FirstOrderExample(),
                                                   MarkovPsd(), Ln3Params()));
  // Independent high-resolution evaluation of the same optimum.
  EXPECT_NEAR(std::sqrt(mse), 5.6178, 1e-3);
  ASSERT_OK_AND_ASSIGN(double lzf,
                       LzfTheoreticalMse(FirstOrderExample(), Ln3Params()));
  EXPECT_LT(mse, lzf);
}

TEST(LmmseOptimalMseTest, OptimumBeatsFlatAndLzfProfiles) {
  const PrivacyParams params = Ln3Params();
  const RationalTransferFunction f = Make({1.0, 0.5}, {1.0, -0.8});
  ASSERT_OK_AND_ASSIGN(double optimum, LmmseOptimalMse(f, MarkovPsd(), params));
  ASSERT_OK_AND_ASSIGN(
      double flat,
      LmmseTheoreticalMse(f, MarkovPsd(), RationalTransferFunction::Identity(),
                          params));
  EXPECT_LE(optimum, flat * (1.0 + 1e-9));
  ASSERT_OK_AND_ASSIGN(MechanismDesign lzf, DesignLzf(f, params));
  ASSERT_OK_AND_ASSIGN(
      double lzf_profile,
      LmmseTheoreticalMse(f, MarkovPsd(), lzf.prefilter, params));
  EXPECT_LE(optimum, lzf_profile * (1.0 + 1e-9));
}

TEST(NoncausalWienerTest, ScalarCase) {
  ASSERT_OK_AND_ASSIGN(
      WienerFilter h,
      NoncausalWiener(RationalTransferFunction::Identity(),
                      RationalPsd::White(1.0),
                      RationalTransferFunction::Identity(), 1.0));
  EXPECT_NEAR(h.h.tap(0), 0.5, 1e-12);
  EXPECT_LT(h.h.Energy() - 0.25, 1e-12);
  EXPECT_FALSE(h.truncation_warning);
}

TEST(NoncausalWienerTest, NoiselessLimitInvertsPrefilter) {
  const RationalTransferFunction f = Make({1.0}, {1.0, -0.5});
  const RationalTransferFunction g = Make({1.0, 0.5}, {1.0});
  ASSERT_OK_AND_ASSIGN(WienerFilter h, NoncausalWiener(f, MarkovPsd(), g, 1e-7,
                                                       HalfLength(256)));
  for (double w : {0.0, 0.3, 1.0, 2.5, kPi}) {
    const std::complex<double> expected = f.Evaluate(w) / g.Evaluate(w);
    EXPECT_LT(std::abs(h.h.Evaluate(w) - expected), 1e-6 * std::abs(expected));
  }
}

TEST(NoncausalWienerTest, TruncationWarningOnShortFilter) {
  ASSERT_OK_AND_ASSIGN(
      WienerFilter h, NoncausalWiener(FirstOrderExample(), MarkovPsd(),
                                      RationalTransferFunction::Identity(), 1.0,
                                      HalfLength(4)));
  EXPECT_GT(h.truncation_energy, kWienerTruncationWarning);
  EXPECT_TRUE(h.truncation_warning);
}

TEST(NoncausalWienerTest, TapPerturbationsDoNotImprove) {
  const RationalTransferFunction f = Make({1.0, 0.5}, {1.0, -0.8});
  const RationalTransferFunction g = Make({0.8, 0.5, 0.2}, {1.0});
  constexpr double kSigma = 0.7;
  ASSERT_OK_AND_ASSIGN(WienerFilter h,
                       NoncausalWiener(f, MarkovPsd(), g, kSigma));
  const LinearReconstruction base{h.h, RationalTransferFunction::Identity()};
  ASSERT_OK_AND_ASSIGN(double best,
                       ReconstructionMse(f, MarkovPsd(), g, kSigma, base));
  for (int k = -4; k <= 4; ++k) {
    for (double delta : {-1e-3, 1e-3}) {
      std::vector<double> taps = h.h.taps();
      const int index = k - h.h.start_index();
      ASSERT_GE(index, 0);
      ASSERT_LT(index, static_cast<int>(taps.size()));
      taps[index] += delta;
      ASSERT_OK_AND_ASSIGN(TwoSidedFir perturbed,
                           TwoSidedFir::Create(taps, h.h.start_index()));
      ASSERT_OK_AND_ASSIGN(
          double mse,
          ReconstructionMse(f, MarkovPsd(), g, kSigma,
                            {perturbed, RationalTransferFunction::Identity()}));
      EXPECT_GE(mse, best) << "k=" << k << " delta=" << delta;
    }
  }
}

TEST(CausalWienerTest, ScalarCase) {
  ASSERT_OK_AND_ASSIGN(CausalWienerFilter h,
                       CausalWiener(RationalTransferFunction::Identity(),
                                    RationalPsd::White(1.0),
                                    RationalTransferFunction::Identity(), 1.0));
  EXPECT_NEAR(h.pv_factor.gamma_sq, 2.0, 1e-9);
  EXPECT_LT(std::abs(h.AsReconstruction().Evaluate(0.7) - 0.5), 1e-9);
}

TEST(CausalWienerTest, MatchesNoncausalWhenAlreadyCausal) {
  // White input and G = 1: H = F / (1 + sigma^2), already causal.
  const RationalTransferFunction f = Make({1.0, 0.4}, {1.0, -0.6});
  constexpr double kSigma = 0.5;
  ASSERT_OK_AND_ASSIGN(
      WienerFilter noncausal,
      NoncausalWiener(f, RationalPsd::White(1.0),
                      RationalTransferFunction::Identity(), kSigma));
  ASSERT_OK_AND_ASSIGN(
      CausalWienerFilter causal,
      CausalWiener(f, RationalPsd::White(1.0),
                   RationalTransferFunction::Identity(), kSigma));
  for (int k = -5; k < 0; ++k) EXPECT_LT(std::abs(noncausal.h.tap(k)), 1e-12);
  const RationalTransferFunction realized =
      RationalTransferFunction::Fir(causal.numerator.taps())
          .Cascade(causal.inverse_factor);
  ASSERT_OK_AND_ASSIGN(ImpulseResponse impulse,
                       ComputeImpulseResponse(realized, 64));
  for (int k = 0; k < std::min(64, noncausal.h.end_index()); ++k) {
    EXPECT_NEAR(impulse.values[k], noncausal.h.tap(k), 1e-8) << "k=" << k;
  }
}

TEST(CausalWienerTest, NoBetterThanNoncausal) {
  const RationalTransferFunction f = Make({1.0, 0.5}, {1.0, -0.8});
  const RationalTransferFunction g = Make({0.8, 0.5, 0.2}, {1.0});
  constexpr double kSigma = 0.7;
  ASSERT_OK_AND_ASSIGN(WienerFilter noncausal,
                       NoncausalWiener(f, MarkovPsd(), g, kSigma));
  ASSERT_OK_AND_ASSIGN(CausalWienerFilter causal,
                       CausalWiener(f, MarkovPsd(), g, kSigma));
  ASSERT_OK_AND_ASSIGN(
      double mse_noncausal,
      ReconstructionMse(f, MarkovPsd(), g, kSigma,
                        {noncausal.h, RationalTransferFunction::Identity()}));
  ASSERT_OK_AND_ASSIGN(
      double mse_causal,
      ReconstructionMse(f, MarkovPsd(), g, kSigma, causal.AsReconstruction()));
  EXPECT_GT(mse_causal, mse_noncausal);
}

TEST(DesignLmmseTest, FirstOrderExample) {
  const PrivacyParams params = Ln3Params();
  ASSERT_OK_AND_ASSIGN(MechanismDesign design,
                       DesignLmmse(FirstOrderExample(), MarkovPsd(), params));
  EXPECT_EQ(design.kind, MechanismKind::kLmmseNoncausal);
  ASSERT_OK_AND_ASSIGN(double optimum, LmmseOptimalMse(FirstOrderExample(),
                                                       MarkovPsd(), params));
  EXPECT_NEAR(design.theoretical_mse / optimum, 1.0, 2e-3);
  EXPECT_NEAR(design.realized_mse / design.theoretical_mse, 1.0, 1e-3);
  ASSERT_OK_AND_ASSIGN(double norm, H2Norm(design.prefilter));
  EXPECT_NEAR(norm, 1.0, 1e-9);
  EXPECT_NEAR(design.calibration.sigma, Kappa(params) * norm, 1e-12);
  EXPECT_GT(design.release_delay(), 0);
}

TEST(DesignLmmseTest, CausalVariantIsWorseButRealizable) {
  const PrivacyParams params = Ln3Params();
  const RationalTransferFunction f = Make({1.0, 0.5}, {1.0, -0.8});
  ASSERT_OK_AND_ASSIGN(MechanismDesign noncausal,
                       DesignLmmse(f, MarkovPsd(), params));
  ASSERT_OK_AND_ASSIGN(MechanismDesign causal,
                       DesignLmmse(f, MarkovPsd(), params, CausalLmmse()));
  EXPECT_EQ(causal.kind, MechanismKind::kLmmseCausal);
  EXPECT_EQ(causal.release_delay(), 0);
  EXPECT_GT(causal.theoretical_mse, noncausal.theoretical_mse);
}

// --- Prefilter variants ----------------------------------------------------

TEST(PrefilterVariantsTest, WhiteInputGivesFlatDfPrefilter) {
  ASSERT_OK_AND_ASSIGN(
      PrefilterVariants variants,
      DesignDfPrefilterVariants(FirstOrderExample(), RationalPsd::White(1.0),
                                Ln3Params(), SmallPrefilter()));
  for (double x : variants.df.allocation.x) EXPECT_NEAR(x, 1.0, 1e-9);
  for (double w : {0.0, 1.0, 2.0, kPi}) {
    EXPECT_NEAR(std::abs(variants.df.g.Evaluate(w)), 1.0, 1e-6);
  }
}

TEST(PrefilterVariantsTest, FirstOrderExampleCutoffs) {
  ASSERT_OK_AND_ASSIGN(
      PrefilterVariants variants,
      DesignDfPrefilterVariants(FirstOrderExample(), MarkovPsd(), Ln3Params()));
  ASSERT_OK_AND_ASSIGN(double norm_df, H2Norm(variants.df.g));
  ASSERT_OK_AND_ASSIGN(double norm_lmmse, H2Norm(variants.lmmse.g));
  EXPECT_NEAR(norm_df, 1.0, 1e-9);
  EXPECT_NEAR(norm_lmmse, 1.0, 1e-9);
  EXPECT_LT(HalfPowerFrequency(variants.lmmse.g),
            HalfPowerFrequency(variants.df.g));
}

TEST(HalfPowerFrequencyTest, TwoTapAverage) {
  // |1 + z^-1|^2 = 2 + 2 cos w reaches half its peak at pi / 2.
  EXPECT_NEAR(HalfPowerFrequency(Make({1.0, 1.0}, {1.0})), kPi / 2.0, 1e-6);
  EXPECT_EQ(HalfPowerFrequency(RationalTransferFunction::Identity()), kPi);
}

TEST(RefinedIntegralTest, SmoothAndPeakedIntegrands) {
  ASSERT_OK_AND_ASSIGN(double one, RefinedIntegral([](double) { return 1.0; }));
  EXPECT_NEAR(one, 1.0, 1e-12);
  ASSERT_OK_AND_ASSIGN(double peaked, RefinedIntegral([](double w) {
                         return 1.0 / (1.0 + 1e6 * w * w);
                       }));
  // Successive refinements agree to 1e-6; the true error is a few times that.
  EXPECT_NEAR(peaked, std::atan(1e3 * kPi) / (1e3 * kPi), 1e-5 * peaked);
}

}  // namespace
}  // namespace dpfilter
