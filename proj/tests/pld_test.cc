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
#include "gdp/pld.h"

#include <cmath>
#include <stdexcept>

#include "gdp/dual.h"
#include "gdp/errors.h"
#include "gdp/functionals.h"
#include "gtest/gtest.h"
#include "test_util.h"

namespace gdp {
namespace {

using testing::SupDistance;

double NuForMu(double mu, double sigma) {
  return mu / std::sqrt(std::expm1(1.0 / (sigma * sigma)));
}

TEST(PldConstructionTest, SigmaFloorAndArgumentChecks) {
  EXPECT_THROW(PldFromSubsampledGaussian(0.1, 0.5, Adjacency::kAdd),
               InfeasibleError);
  EXPECT_THROW(PldFromSubsampledGaussian(1.0, 0.0, Adjacency::kAdd),
               std::invalid_argument);
  EXPECT_THROW(PldFromSubsampledGaussian(1.0, 1.5, Adjacency::kAdd),
               std::invalid_argument);
}

TEST(PldConstructionTest, ConservationAndPessimisticRounding) {
  for (Adjacency dir : {Adjacency::kAdd, Adjacency::kRemove}) {
    const PrivacyLossDistribution pld =
        PldFromSubsampledGaussian(1.1, 0.05, dir);
    EXPECT_NEAR(pld.TotalMass() + pld.tail_mass_low() + pld.tail_mass_high(),
                1.0, 1e-12);
    EXPECT_LE(pld.tail_mass_low() + pld.tail_mass_high(), 1e-10);
  }
}

TEST(PldConstructionTest, PureGaussianMeanIsKl) {
  // Under the numerator measure the mean loss of the Gaussian pair is
  // KL(Q || P) = 1/(2 sigma^2); grid rounding shifts it up by < spacing.
  for (double sigma : {0.8, 1.3}) {
    const PrivacyLossDistribution pld =
        PldFromSubsampledGaussian(sigma, 1.0, Adjacency::kAdd);
    const double kl = 0.5 / (sigma * sigma);
    EXPECT_GE(pld.Mean(), kl - 1e-6) << sigma;
    EXPECT_LE(pld.Mean(), kl + 2.0 * pld.spacing()) << sigma;
  }
}

TEST(PldDirectionTest, AddAndRemoveCurvesAreInverses) {
  const double sigma = 1.1, p = 0.2;
  const TradeoffFunction f_add = TradeoffFromPld(
      PldFromSubsampledGaussian(sigma, p, Adjacency::kAdd));
  const TradeoffFunction f_remove = TradeoffFromPld(
      PldFromSubsampledGaussian(sigma, p, Adjacency::kRemove));
  EXPECT_LT(SupDistance(Inverse(f_add), f_remove), 2e-4);
}

TEST(PldDirectionTest, SingleStepMatchesSubsampledClosedForm) {
  // The add-direction single-step curve is p G_{1/sigma} + (1-p) Id.
  const double sigma = 1.1, p = 0.2;
  const TradeoffFunction f_add = TradeoffFromPld(
      PldFromSubsampledGaussian(sigma, p, Adjacency::kAdd));
  const TradeoffFunction closed =
      Subsample(TradeoffFunction::Gaussian(1.0 / sigma), p);
  EXPECT_LT(SupDistance(f_add, closed), 2e-4);
}

TEST(SelfComposeTest, SingleFoldIsIdentity) {
  const PrivacyLossDistribution pld =
      PldFromSubsampledGaussian(1.1, 0.05, Adjacency::kAdd);
  const PrivacyLossDistribution same = SelfCompose(pld, 1);
  EXPECT_EQ(same.masses().size(), pld.masses().size());
  EXPECT_EQ(same.origin_index(), pld.origin_index());
  EXPECT_DOUBLE_EQ(same.Mean(), pld.Mean());
}

TEST(SelfComposeTest, MeanAdditivity) {
  const PrivacyLossDistribution pld =
      PldFromSubsampledGaussian(1.1, 0.05, Adjacency::kAdd);
  const PrivacyLossDistribution composed = SelfCompose(pld, 8);
  EXPECT_NEAR(composed.Mean(), 8.0 * pld.Mean(),
              1e-9 * std::max(1.0, 8.0 * std::abs(pld.Mean())));
  EXPECT_NEAR(composed.Variance(), 8.0 * pld.Variance(),
              1e-8 * std::max(1.0, 8.0 * pld.Variance()));
}

TEST(SelfComposeTest, ConservationAfterComposition) {
  const PrivacyLossDistribution pld =
      PldFromSubsampledGaussian(1.1, 0.0158, Adjacency::kAdd);
  const PrivacyLossDistribution composed = SelfCompose(pld, 1000);
  EXPECT_NEAR(composed.TotalMass() + composed.tail_mass_low() +
                  composed.tail_mass_high(),
              1.0, 1e-9);
  EXPECT_LE(composed.tail_mass_low() + composed.tail_mass_high(), 1e-10);
}

TEST(SelfComposeTest, PureGaussianComposesBySquareRoot) {
  // T pure-Gaussian steps equal one Gaussian with mu multiplied by sqrt(T).
  const double sigma = 1.0;
  const PldOptions options;
  const PrivacyLossDistribution add =
      PldFromSubsampledGaussian(sigma, 1.0, Adjacency::kAdd, options);
  const PrivacyLossDistribution remove =
      PldFromSubsampledGaussian(sigma, 1.0, Adjacency::kRemove, options);
  const TradeoffFunction composed =
      PldToTradeoff(SelfCompose(add, 4, options), SelfCompose(remove, 4, options));
  EXPECT_LT(SupDistance(composed, TradeoffFunction::Gaussian(2.0 / sigma)),
            2.0 * options.spacing);
}

TEST(SelfComposeTest, GridCapTriggersTailBudgetError) {
  PldOptions options;
  options.max_grid_size = 1 << 10;
  EXPECT_THROW(
      SelfCompose(PldFromSubsampledGaussian(1.1, 0.3, Adjacency::kAdd), 64,
                  options),
      TailBudgetError);
}

TEST(ComposeTest, HeterogeneousGaussiansFollowPythagoras) {
  // G_{mu1} (x) G_{mu2} = G_{sqrt(mu1^2 + mu2^2)}.
  const double mu1 = 0.8, mu2 = 0.6;
  const PldOptions options;
  const auto make = [&](double mu, Adjacency dir) {
    return PldFromSubsampledGaussian(1.0 / mu, 1.0, dir, options);
  };
  const TradeoffFunction composed = PldToTradeoff(
      Compose(make(mu1, Adjacency::kAdd), make(mu2, Adjacency::kAdd), options),
      Compose(make(mu1, Adjacency::kRemove), make(mu2, Adjacency::kRemove),
              options));
  const double mu = std::sqrt(mu1 * mu1 + mu2 * mu2);
  EXPECT_LT(SupDistance(composed, TradeoffFunction::Gaussian(mu)),
            2.0 * options.spacing);
}

TEST(PldToTradeoffTest, RecoversSingleGaussian) {
  const double sigma = 1.3;
  const PldOptions options;
  const TradeoffFunction oracle = ComposeSubsampledGaussian(sigma, 1.0, 1, options);
  EXPECT_LT(SupDistance(oracle, TradeoffFunction::Gaussian(1.0 / sigma)),
            2.0 * options.spacing);
}

TEST(PldToTradeoffTest, DirectionValidation) {
  const PrivacyLossDistribution add =
      PldFromSubsampledGaussian(1.1, 0.05, Adjacency::kAdd);
  EXPECT_THROW(PldToTradeoff(add, add), std::invalid_argument);
}

TEST(PldToTradeoffTest, FigureFiveConfiguration) {
  // sigma = 1.1, T = 234 (one epoch), p scaled so p sqrt(T) keeps the
  // final GDP parameter at 0.57: the composed curve is already within
  // 0.01 of the CLT limit.
  const double sigma = 1.1;
  const long T = 234;
  const double nu = NuForMu(0.57, sigma);
  const double p = nu / std::sqrt(static_cast<double>(T));
  EXPECT_NEAR(p * std::sqrt(static_cast<double>(T)), 0.5028, 1e-3);
  const TradeoffFunction oracle = ComposeSubsampledGaussian(sigma, p, T);
  EXPECT_LT(SupDistance(oracle, TradeoffFunction::Gaussian(0.57), 4001), 0.01);
}

TEST(PldToTradeoffTest, MnistRowTwoFullComposition) {
  // The 60-epoch MNIST configuration composed in full agrees with G_0.57
  // to half a percent.
  const double sigma = 1.1;
  const double p = 256.0 / 60000.0;
  const long T = 14063;
  const double mu = CltMuSubsampledGaussian(p, T, sigma);
  const TradeoffFunction oracle = ComposeSubsampledGaussian(sigma, p, T);
  EXPECT_LT(SupDistance(oracle, TradeoffFunction::Gaussian(mu), 4001), 0.005);
}

TEST(PldValidityTest, RefiningSpacingMovesCurveUp) {
  // Coarser grids are more pessimistic: the curve can only rise as the
  // spacing refines, across five nested spacings.
  const double sigma = 1.1, p = 0.05;
  const long T = 64;
  std::vector<TradeoffFunction> curves;
  for (double spacing : {16e-4, 8e-4, 4e-4, 2e-4, 1e-4}) {
    PldOptions options;
    options.spacing = spacing;
    curves.push_back(ComposeSubsampledGaussian(sigma, p, T, options));
  }
  for (size_t level = 0; level + 1 < curves.size(); ++level) {
    for (int i = 0; i <= 1000; ++i) {
      const double alpha = i / 1000.0;
      EXPECT_LE(Eval(curves[level], alpha),
                Eval(curves[level + 1], alpha) + 1e-7)
          << "level=" << level << " alpha=" << alpha;
    }
  }
}

TEST(PldValidityTest, CltConvergenceMonotoneInT) {
  const double sigma = 1.1, nu = 0.5;
  const double mu = nu * std::sqrt(std::expm1(1.0 / (sigma * sigma)));
  const TradeoffFunction limit = TradeoffFunction::Gaussian(mu);
  double prev = 2.0;
  for (long T : {10L, 100L, 1000L, 10000L}) {
    const double p = nu / std::sqrt(static_cast<double>(T));
    const double dist =
        SupDistance(ComposeSubsampledGaussian(sigma, p, T), limit, 4001);
    EXPECT_LT(dist, prev) << T;
    prev = dist;
  }
}

TEST(GapCheckTest, TableRowOneOrdering) {
  const double p = 256.0 / 60000.0;
  const GapCheckResult r = GapCheck(1.3, p, 3516, 0.83);
  EXPECT_NEAR(r.delta_clt, 1e-5, 0.5e-5);
  EXPECT_GT(r.delta_ma, r.delta_clt);
}

TEST(GapCheckTest, LowerBoundVanishesWithMu) {
  const GapCheckResult r = GapCheck(1.0, 1e-6, 100, 1.0);
  EXPECT_LT(r.mu, 1e-4);
  EXPECT_LT(r.lower_bound, 1e-10);
}

TEST(GapCheckTest, HoldsAtLargeT) {
  const GapCheckResult r = GapCheck(1.0, 1e-6 * 0.0 + 1.0 / std::sqrt(1e5),
                                    100000, 1.0);
  EXPECT_TRUE(r.Holds(1e-4))
      << "delta_ma=" << r.delta_ma << " delta_clt=" << r.delta_clt
      << " bound=" << r.lower_bound;
}

}  // namespace
}  // namespace gdp
