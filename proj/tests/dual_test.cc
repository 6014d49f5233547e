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
#include "gdp/dual.h"

#include <cmath>
#include <stdexcept>

#include "gdp/errors.h"
#include "gdp/functionals.h"
#include "gdp/normal.h"
#include "gdp/tradeoff.h"
#include "gtest/gtest.h"

namespace gdp {
namespace {

TEST(DeltaFromEpsTest, EpsZeroClosedForm) {
  for (double mu : {0.1, 0.57, 2.0}) {
    EXPECT_NEAR(DeltaFromEps(mu, 0.0),
                NormalCdf(0.5 * mu) - NormalCdf(-0.5 * mu), 1e-14)
        << mu;
  }
}

TEST(DeltaFromEpsTest, MatchesConjugateRoute) {
  // delta(eps; mu) = 1 + G*_mu(-e^eps): the two code paths must agree.
  for (double mu : {0.23, 1.13, 3.0}) {
    for (double eps : {0.0, 0.5, 2.0, 6.0}) {
      const double via_conjugate =
          1.0 + Conjugate(TradeoffFunction::Gaussian(mu), -std::exp(eps));
      // The raw conjugate forms 1 + (value near -1), so it carries ~1e-16
      // absolute noise; the log-domain route exists to do better.
      EXPECT_NEAR(DeltaFromEps(mu, eps), via_conjugate,
                  1e-15 + 1e-12 * via_conjugate)
          << mu << " " << eps;
    }
  }
}

// Row-1 mu at full precision (p = 256/60000, sigma = 1.3, 15 epochs).
double TableRowOneMu() {
  const double p = 256.0 / 60000.0;
  const double T = 3516.0;
  return p * std::sqrt(T * std::expm1(1.0 / (1.3 * 1.3)));
}

TEST(DeltaFromEpsTest, TableOnePairings) {
  // mu and eps columns pair at delta = 1e-5; the table's mu values are
  // rounded to two decimals, so the recovered delta sits near 1e-5.
  EXPECT_NEAR(DeltaFromEps(0.23, 0.83), 1e-5, 0.5e-5);
  EXPECT_NEAR(DeltaFromEps(1.13, 5.07), 1e-5, 0.5e-5);
  // With the unrounded mu the agreement tightens.
  const double mu_row1 = TableRowOneMu();
  EXPECT_NEAR(DeltaFromEps(mu_row1, 0.83), 1e-5, 0.15e-5);
}

TEST(DeltaFromEpsTest, DeepTailStaysAccurate) {
  // Large eps/mu: the naive difference cancels catastrophically; the
  // log-domain route must stay positive and monotone down to ~1e-300
  // (below that the true delta is not representable and flushes to 0).
  double prev = 1.0;
  for (double eps = 1.0; eps <= 36.0; eps += 1.0) {
    const double delta = DeltaFromEps(1.0, eps);
    EXPECT_GT(delta, 0.0) << eps;
    EXPECT_LT(delta, prev) << eps;
    prev = delta;
  }
  EXPECT_GT(DeltaFromEps(1.0, 36.0), 1e-300);
  EXPECT_LT(DeltaFromEps(1.0, 36.0), 1e-250);
}

TEST(EpsFromDeltaTest, TableOneRows) {
  EXPECT_NEAR(EpsFromDelta(2.00, 1e-5), 9.98, 0.02);
  EXPECT_NEAR(EpsFromDelta(0.57, 1e-5), 2.32, 0.02);
}

TEST(EpsFromDeltaTest, BoundaryConvention) {
  for (double mu : {0.3, 1.0}) {
    const double delta_star = DeltaFromEps(mu, 0.0);
    EXPECT_DOUBLE_EQ(EpsFromDelta(mu, delta_star), 0.0);
    EXPECT_DOUBLE_EQ(EpsFromDelta(mu, std::min(0.9, delta_star * 1.5)), 0.0);
  }
}

TEST(EpsFromDeltaTest, RoundTripIdentity) {
  for (double mu : {0.05, 0.3, 1.0, 2.5, 5.0}) {
    for (double eps : {0.1, 0.5, 1.0, 4.0, 16.0, 32.0}) {
      const double delta = DeltaFromEps(mu, eps);
      if (delta < 1e-290) continue;  // below any representable target
      EXPECT_NEAR(EpsFromDelta(mu, delta), eps, 1e-8 * (1.0 + eps))
          << mu << " " << eps;
    }
  }
}

TEST(DualMonotonicityTest, DeltaDecreasesInEpsIncreasesInMu) {
  const std::vector<double> eps_grid = {0.0, 0.5, 1.0, 2.0, 4.0,
                                        8.0, 16.0, 32.0};
  const std::vector<double> mu_grid = {0.05, 0.1, 0.3, 0.8, 1.5, 3.0, 5.0};
  // Strict comparisons are meaningful only while the values stay
  // representable; the deep tail flushes to zero legitimately.
  constexpr double kFloor = 1e-290;
  for (double mu : mu_grid) {
    for (size_t i = 0; i + 1 < eps_grid.size(); ++i) {
      const double hi = DeltaFromEps(mu, eps_grid[i]);
      const double lo = DeltaFromEps(mu, eps_grid[i + 1]);
      if (hi < kFloor) continue;
      EXPECT_GT(hi, lo) << mu << " " << eps_grid[i];
    }
  }
  for (double eps : eps_grid) {
    for (size_t i = 0; i + 1 < mu_grid.size(); ++i) {
      const double lo = DeltaFromEps(mu_grid[i], eps);
      const double hi = DeltaFromEps(mu_grid[i + 1], eps);
      if (hi < kFloor) continue;
      EXPECT_LT(lo, hi) << eps << " " << mu_grid[i];
    }
  }
}

TEST(CalibrateMuTest, FigureFourTargets) {
  EXPECT_NEAR(CalibrateMu({1.34, 1e-5}), 0.35, 0.01);
  EXPECT_NEAR(CalibrateMu({8.68, 1e-5}), 1.78, 0.01);
}

TEST(CalibrateMuTest, EpsZeroClosedFormInversion) {
  const double mu = 1.0;
  const double delta = 2.0 * NormalCdf(0.5 * mu) - 1.0;
  EXPECT_NEAR(CalibrateMu({0.0, delta}), 1.0, 1e-9);
}

TEST(CalibrateMuTest, ResidualBelowTolerance) {
  const EpsDeltaPoint target{2.5, 1e-6};
  const double mu = CalibrateMu(target);
  EXPECT_LE(std::abs(DeltaFromEps(mu, target.eps) - target.delta), 1e-12);
}

TEST(CalibrateSigmaTest, FigureFourCaptions) {
  const double p = 256.0 / 60000.0;
  const long T20 = IterationsFromEpochs(20.0, p);
  EXPECT_EQ(T20, 4688);
  const CalibrationResult r1 = CalibrateSigma({1.34, 1e-5}, p, T20);
  EXPECT_NEAR(r1.sigma_tilde, 1.06, 0.01);
  EXPECT_NEAR(r1.mu_tilde, 0.35, 0.01);
  EXPECT_LE(r1.residual, 1e-10);

  const long T70 = IterationsFromEpochs(70.0, p);
  EXPECT_EQ(T70, 16406);
  const CalibrationResult r2 = CalibrateSigma({8.68, 1e-5}, p, T70);
  EXPECT_NEAR(r2.sigma_tilde, 0.638, 0.008);
  EXPECT_NEAR(r2.mu_tilde, 1.78, 0.01);
}

TEST(CalibrateSigmaTest, RoundTripThroughAccounting) {
  const double p = 0.005;
  const long T = 10000;
  const EpsDeltaPoint target{3.0, 1e-6};
  const CalibrationResult r = CalibrateSigma(target, p, T);
  const double mu = CltMuSubsampledGaussian(p, T, r.sigma_tilde);
  const double eps_back = EpsFromDelta(mu, target.delta);
  EXPECT_NEAR(eps_back, target.eps, 1e-6);
}

TEST(CalibrateSigmaTest, InfeasibleBelowFloor) {
  // A huge eps target over a single rarely-sampled iteration demands a
  // large mu~ and hence sigma below the floor; the call must refuse
  // rather than emit a meaningless noise scale.
  EXPECT_THROW(CalibrateSigma({500.0, 0.05}, 5e-5, 1), InfeasibleError);
}

TEST(IterationsFromEpochsTest, RoundsToNearest) {
  const double p = 256.0 / 60000.0;
  EXPECT_EQ(IterationsFromEpochs(15.0, p), 3516);   // 3515.625
  EXPECT_EQ(IterationsFromEpochs(60.0, p), 14063);  // 14062.5 rounds up
  EXPECT_EQ(IterationsFromEpochs(45.0, p), 10547);
  EXPECT_THROW(IterationsFromEpochs(0.0, p), std::invalid_argument);
  EXPECT_THROW(IterationsFromEpochs(1.0, 0.0), std::invalid_argument);
}

}  // namespace
}  // namespace gdp
