// Copyright 2026 The GDP Accounting Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#include "gdp/functionals.h"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "gdp/errors.h"
#include "gdp/normal.h"
#include "gtest/gtest.h"
#include "test_util.h"

namespace gdp {
namespace {

using testing::Trapezoid;

double Phi(double x) { return NormalCdf(x); }

// Independent route for the Gaussian functionals: brute-force trapezoid
// integration in the normal-quantile coordinate, where
// log |G_mu'(alpha(z))| = mu z - mu^2/2 and d(alpha) = phi(z) dz.
double GaussianFunctionalOracle(double mu, bool tilde,
                                const std::function<double(double)>& h) {
  return Trapezoid(
      [&](double z) {
        const double l = mu * z - 0.5 * mu * mu;
        const double weight = tilde ? std::exp(l) : 1.0;
        return h(l) * weight * std::exp(-0.5 * z * z) /
               std::sqrt(2.0 * M_PI);
      },
      -40.0, 40.0 + 2.0 * mu, 800001);
}

TEST(KlFunctionalsTest, IdentityIsAllZero) {
  const KlFunctionals k = ComputeKlFunctionals(TradeoffFunction::Identity());
  EXPECT_DOUBLE_EQ(k.kl, 0.0);
  EXPECT_DOUBLE_EQ(k.kl_tilde, 0.0);
  EXPECT_DOUBLE_EQ(k.kappa2, 0.0);
  EXPECT_DOUBLE_EQ(k.kappa2_tilde, 0.0);
  EXPECT_DOUBLE_EQ(k.kappa3, 0.0);
  EXPECT_DOUBLE_EQ(k.kappa3_tilde, 0.0);
}

TEST(KlFunctionalsTest, GaussianClosedForms) {
  // kl(G_mu) is the KL divergence of N(0,1) from N(mu,1): mu^2/2; the
  // second moments are mu^2 + mu^4/4.
  for (double mu : {0.4, 1.0, 2.0}) {
    const KlFunctionals k =
        ComputeKlFunctionals(TradeoffFunction::Gaussian(mu));
    const double mu2 = mu * mu;
    EXPECT_NEAR(k.kl, 0.5 * mu2, 1e-9) << mu;
    EXPECT_NEAR(k.kl_tilde, 0.5 * mu2, 1e-9) << mu;
    EXPECT_NEAR(k.kappa2, mu2 + 0.25 * mu2 * mu2, 1e-8) << mu;
    EXPECT_NEAR(k.kappa2_tilde, mu2 + 0.25 * mu2 * mu2, 1e-8) << mu;
    // Third absolute moments against the brute-force oracle.
    auto abs3 = [](double l) { return std::abs(l) * l * l; };
    EXPECT_NEAR(k.kappa3, GaussianFunctionalOracle(mu, false, abs3), 1e-8)
        << mu;
    EXPECT_NEAR(k.kappa3_tilde, GaussianFunctionalOracle(mu, true, abs3),
                1e-8)
        << mu;
  }
}

TEST(KlFunctionalsTest, SubsampledMatchesLemmaForms) {
  // kl(f_p) = -Int log(1 + p g) with g = |f'| - 1, and companions; checked
  // against direct trapezoid integration in the quantile coordinate.
  const double mu = 1.0 / 1.1;
  const double p = 0.05;
  const TradeoffFunction fp = Subsample(TradeoffFunction::Gaussian(mu), p);
  const KlFunctionals k = ComputeKlFunctionals(fp);
  auto log_ratio = [&](double z) {
    return std::log1p(p * std::expm1(mu * z - 0.5 * mu * mu));
  };
  const double kl_oracle = Trapezoid(
      [&](double z) {
        return -log_ratio(z) * std::exp(-0.5 * z * z) / std::sqrt(2.0 * M_PI);
      },
      -40.0, 44.0, 800001);
  const double kl_tilde_oracle = Trapezoid(
      [&](double z) {
        const double l = log_ratio(z);
        return l * std::exp(l - 0.5 * z * z) / std::sqrt(2.0 * M_PI);
      },
      -40.0, 44.0, 800001);
  const double kappa2_oracle = Trapezoid(
      [&](double z) {
        const double l = log_ratio(z);
        return l * l * std::exp(-0.5 * z * z) / std::sqrt(2.0 * M_PI);
      },
      -40.0, 44.0, 800001);
  EXPECT_NEAR(k.kl, kl_oracle, 1e-9);
  EXPECT_NEAR(k.kl_tilde, kl_tilde_oracle, 1e-9);
  EXPECT_NEAR(k.kappa2, kappa2_oracle, 1e-9);
}

TEST(KlFunctionalsTest, NonNegativityAndIdentityCharacterization) {
  for (double mu : {0.1, 0.5, 1.7}) {
    const KlFunctionals k =
        ComputeKlFunctionals(TradeoffFunction::Gaussian(mu));
    EXPECT_GT(k.kl, 0.0);
    EXPECT_GT(ChiSquare(TradeoffFunction::Gaussian(mu)), 0.0);
  }
  EXPECT_DOUBLE_EQ(ComputeKlFunctionals(TradeoffFunction::Identity()).kl, 0.0);
  EXPECT_DOUBLE_EQ(ChiSquare(TradeoffFunction::Identity()), 0.0);
}

TEST(KlFunctionalsTest, StandingAssumptionViolationsThrow) {
  EXPECT_THROW(ComputeKlFunctionals(TradeoffFunction::EpsDelta(1.0, 0.1)),
               std::invalid_argument);
  // A grid that hits zero in the interior violates f(x) > 0 for x < 1.
  const TradeoffFunction grid =
      TradeoffFunction::Grid({0.0, 0.5, 1.0}, {1.0, 0.0, 0.0});
  EXPECT_THROW(ComputeKlFunctionals(grid), std::invalid_argument);
}

TEST(ChiSquareTest, SpecValues) {
  EXPECT_DOUBLE_EQ(ChiSquare(TradeoffFunction::Identity()), 0.0);
  for (double sigma : {0.5, 0.9, 1.3}) {
    EXPECT_NEAR(ChiSquare(TradeoffFunction::Gaussian(1.0 / sigma)),
                std::expm1(1.0 / (sigma * sigma)), 1e-12)
        << sigma;
  }
  EXPECT_NEAR(ChiSquare(TradeoffFunction::Gaussian(1.0)), 1.718282, 1e-6);
  EXPECT_NEAR(ChiSquareQuadrature(TradeoffFunction::Gaussian(1.0)),
              std::exp(1.0) - 1.0, 1e-6);
}

TEST(ChiSquareTest, QuadratureConsistencyAcrossSigmaRange) {
  for (double sigma : {0.5, 0.7, 1.0, 1.5, 2.0, 3.0}) {
    const TradeoffFunction g = TradeoffFunction::Gaussian(1.0 / sigma);
    const double closed = ChiSquare(g);
    const double quad = ChiSquareQuadrature(g);
    EXPECT_NEAR(quad, closed, 1e-6 * closed) << sigma;
  }
}

TEST(ChiSquareTest, SubsampledScalesQuadratically) {
  const TradeoffFunction g = TradeoffFunction::Gaussian(1.25);
  for (double p : {0.01, 0.2, 0.77}) {
    const TradeoffFunction fp = Subsample(g, p);
    EXPECT_NEAR(ChiSquare(fp), p * p * ChiSquare(g), 1e-12);
    EXPECT_NEAR(ChiSquareQuadrature(fp), p * p * ChiSquare(g),
                1e-8 * (1.0 + ChiSquare(g)));
  }
}

TEST(ChiSquareTest, EpsDeltaAgainstFiniteDifferenceOracle) {
  const double eps = 1.3;
  const TradeoffFunction f = TradeoffFunction::EpsDelta(eps, 0.0);
  // Brute force: segment slopes recovered from Eval differences.
  const int n = 1000000;
  double brute = 0.0;
  double prev = Eval(f, 0.0);
  for (int i = 1; i <= n; ++i) {
    const double alpha = static_cast<double>(i) / n;
    const double value = Eval(f, alpha);
    const double slope = (prev - value) * n;
    brute += slope * slope / n;
    prev = value;
  }
  brute -= 1.0;
  EXPECT_NEAR(ChiSquare(f), brute, 1e-3 * brute);
}

TEST(RenyiTest, SpecValues) {
  EXPECT_DOUBLE_EQ(RenyiFromTradeoff(TradeoffFunction::Identity(), 2.0), 0.0);
  EXPECT_NEAR(RenyiFromTradeoff(TradeoffFunction::Gaussian(1.0), 2.0), 1.0,
              1e-9);
}

TEST(RenyiTest, GaussianClosedFormLattice) {
  for (double order : {1.5, 2.0, 4.0, 16.0}) {
    for (double mu : {0.25, 1.0, 2.0}) {
      const double expected = order * mu * mu / 2.0;
      const double actual =
          RenyiFromTradeoff(TradeoffFunction::Gaussian(mu), order);
      EXPECT_NEAR(actual, expected, 1e-6 * expected)
          << "order=" << order << " mu=" << mu;
    }
  }
}

TEST(RenyiTest, GridPathAgreesWithSmoothPath) {
  const TradeoffFunction f = Subsample(TradeoffFunction::Gaussian(1.0), 0.3);
  const TradeoffFunction grid = ToGrid(f, DefaultAlphaGrid());
  for (double order : {2.0, 4.0}) {
    const double smooth = RenyiFromTradeoff(f, order);
    const double discrete = RenyiFromTradeoff(grid, order);
    // Chord slopes under-estimate the convex |f'|^order integrand, so the
    // grid route approaches the smooth one from below as the grid refines.
    EXPECT_LE(discrete, smooth + 1e-9) << order;
    EXPECT_NEAR(discrete, smooth, 5e-3 * smooth) << order;
  }
}

TEST(CltMuTest, TableOneRows) {
  const double p = 256.0 / 60000.0;
  EXPECT_NEAR(CltMuSubsampledGaussian(p, 3516, 1.3), 0.23, 0.005);
  EXPECT_NEAR(CltMuSubsampledGaussian(p, 14063, 1.1), 0.57, 0.005);
}

TEST(CltMuTest, InfiniteNoiseGivesNoLoss) {
  EXPECT_LT(CltMuSubsampledGaussian(0.3, 1000, 1e8), 1e-5);
}

TEST(CltMuTest, SigmaFloorRejected) {
  EXPECT_THROW(CltMuSubsampledGaussian(0.01, 100, 0.1), InfeasibleError);
  EXPECT_THROW(CltMuSubsampledGaussian(0.0, 100, 1.0), std::invalid_argument);
  EXPECT_THROW(CltMuSubsampledGaussian(0.5, 0, 1.0), std::invalid_argument);
}

TEST(CltMuGeneralTest, RegimeEquivalenceWithClosedForm) {
  for (double sigma : {0.7, 1.1, 1.3}) {
    for (long T : {1000L, 14063L}) {
      const double p = 0.5 / std::sqrt(static_cast<double>(T));
      const AsymptoticRegime regime = AsymptoticRegime::FromFinite(p, T);
      const double via_general = CltMuGeneral(
          TradeoffFunction::Gaussian(1.0 / sigma), regime);
      const double via_formula = CltMuSubsampledGaussian(p, T, sigma);
      EXPECT_NEAR(via_general, via_formula, 1e-12) << sigma << " " << T;
    }
  }
}

TEST(CltMuGeneralTest, IdentityGivesZero) {
  const AsymptoticRegime regime = AsymptoticRegime::FromFinite(0.01, 2500);
  EXPECT_DOUBLE_EQ(CltMuGeneral(TradeoffFunction::Identity(), regime), 0.0);
}

TEST(CltMuGeneralTest, EpsDeltaViaQuadratureCrossCheck) {
  const double eps = 0.8;
  const TradeoffFunction f = TradeoffFunction::EpsDelta(eps, 0.0);
  const AsymptoticRegime regime = AsymptoticRegime::FromFinite(0.02, 2500);
  const double mu = CltMuGeneral(f, regime);
  EXPECT_NEAR(mu, regime.nu * std::sqrt(ChiSquareQuadrature(f)), 1e-9);
  // Exact two-segment value: slopes e^{eps}, e^{-eps} with the kink at
  // 1/(1+e^eps).
  const double kink = 1.0 / (1.0 + std::exp(eps));
  const double chi2 = std::exp(2.0 * eps) * kink +
                      std::exp(-2.0 * eps) * (1.0 - kink) - 1.0;
  EXPECT_NEAR(mu, regime.nu * std::sqrt(chi2), 1e-10);
}

TEST(CltMuAsymmetricTest, AllIdentityIsDegenerate) {
  const std::vector<TradeoffFunction> components(
      4, TradeoffFunction::Identity());
  EXPECT_THROW(CltMuAsymmetric(components), InfeasibleError);
}

TEST(CltMuAsymmetricTest, SubsampledGaussianApproachesClosedForm) {
  const double sigma = 1.1;
  const long T = 10000;
  const double nu = 0.5;
  const double p = nu / std::sqrt(static_cast<double>(T));
  const CltFunctionalSums sums = CltMuAsymmetric(
      Subsample(TradeoffFunction::Gaussian(1.0 / sigma), p), T);
  const double limit = CltMuSubsampledGaussian(p, T, sigma);
  EXPECT_NEAR(sums.mu(), limit, 0.02 * limit);
  // The Lyapunov diagnostic vanishes at this scale.
  EXPECT_LT(sums.kappa3_sum, 0.05);
  EXPECT_LT(sums.kappa3_tilde_sum, 0.05);
}

TEST(CltMuAsymmetricTest, TwoGaussianHalves) {
  // K = mu^2 and s = mu sqrt(1 + mu^2/8) for two copies of G_{mu/sqrt 2};
  // K/s equals mu up to the mu^3/8 finite-size correction.
  for (double mu : {0.05, 0.2, 1.0}) {
    const std::vector<TradeoffFunction> components(
        2, TradeoffFunction::Gaussian(mu / std::sqrt(2.0)));
    const CltFunctionalSums sums = CltMuAsymmetric(components);
    EXPECT_NEAR(sums.K, mu * mu, 1e-8 * (1.0 + mu * mu));
    EXPECT_NEAR(sums.mu(), mu / std::sqrt(1.0 + mu * mu / 8.0), 1e-8);
    EXPECT_NEAR(sums.mu(), mu, mu * mu * mu / 8.0 + 1e-9);
  }
}

TEST(CltMuAsymmetricTest, RepeatedOverloadMatchesVector) {
  const TradeoffFunction f = Subsample(TradeoffFunction::Gaussian(1.0), 0.05);
  const std::vector<TradeoffFunction> components(16, f);
  const CltFunctionalSums a = CltMuAsymmetric(components);
  const CltFunctionalSums b = CltMuAsymmetric(f, 16);
  EXPECT_NEAR(a.mu(), b.mu(), 1e-12);
  EXPECT_NEAR(a.kappa3_sum, b.kappa3_sum, 1e-12);
}

}  // namespace
}  // namespace gdp
