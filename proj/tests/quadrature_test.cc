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
#include "gdp/quadrature.h"

#include <cmath>

#include "gdp/errors.h"
#include "gtest/gtest.h"

namespace gdp {
namespace {

TEST(QuadratureTest, PolynomialAndTrigReference) {
  EXPECT_NEAR(IntegrateOrThrow([](double x) { return x * x; }, 0.0, 1.0),
              1.0 / 3.0, 1e-12);
  EXPECT_NEAR(IntegrateOrThrow([](double x) { return std::sin(x); }, 0.0,
                               M_PI),
              2.0, 1e-10);
}

TEST(QuadratureTest, GaussianMassIsOne) {
  const double mass = IntegrateOrThrow(
      [](double x) {
        return std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI);
      },
      -40.0, 40.0);
  EXPECT_NEAR(mass, 1.0, 1e-10);
}

TEST(QuadratureTest, NarrowPeakFoundWithScaledPanels) {
  // A unit-width Gaussian bump far from the origin inside a wide window.
  QuadratureOptions options;
  options.initial_panels = 512;
  const double mass = IntegrateOrThrow(
      [](double x) {
        const double d = x - 300.0;
        return std::exp(-0.5 * d * d) / std::sqrt(2.0 * M_PI);
      },
      0.0, 400.0, options);
  EXPECT_NEAR(mass, 1.0, 1e-8);
}

TEST(QuadratureTest, LogDomainMatchesDirectWhereRepresentable) {
  // log of int exp(mu x) phi(x) = mu^2 / 2.
  for (double mu : {0.5, 2.0, 8.0}) {
    const double log_value = LogIntegrateExp(
        [mu](double x) {
          return mu * x - 0.5 * x * x - 0.5 * std::log(2.0 * M_PI);
        },
        -40.0, 40.0 + mu);
    EXPECT_NEAR(log_value, 0.5 * mu * mu, 1e-9) << "mu=" << mu;
  }
}

TEST(QuadratureTest, LogDomainHandlesHugeScale) {
  // Same identity at a scale equivalent to e^{5000}; the linear-domain
  // integral overflows, the log-domain one must not.
  const double mu = 100.0;
  QuadratureOptions options;
  options.initial_panels = 256;
  const double log_value = LogIntegrateExp(
      [mu](double x) {
        return mu * x - 0.5 * x * x - 0.5 * std::log(2.0 * M_PI);
      },
      -40.0, 40.0 + mu, options);
  EXPECT_NEAR(log_value, 0.5 * mu * mu, 1e-7);
}

TEST(QuadratureTest, NonFiniteIntegrandThrows) {
  EXPECT_THROW(IntegrateOrThrow([](double x) { return 1.0 / x; }, -1.0, 1.0),
               IntegrabilityError);
}

}  // namespace
}  // namespace gdp
