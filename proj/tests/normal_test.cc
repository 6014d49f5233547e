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
#include "gdp/normal.h"

#include <cmath>

#include "gtest/gtest.h"

namespace gdp {
namespace {

TEST(NormalTest, CdfReferenceValues) {
  EXPECT_NEAR(NormalCdf(0.0), 0.5, 1e-15);
  EXPECT_NEAR(NormalCdf(1.0), 0.8413447460685429, 1e-15);
  EXPECT_NEAR(NormalCdf(-1.0), 0.15865525393145705, 1e-16);
  EXPECT_NEAR(NormalCdf(-1.959963984540054), 0.025, 1e-15);
}

TEST(NormalTest, QuantileRoundTrip) {
  for (double p : {1e-12, 1e-6, 0.025, 0.3, 0.5, 0.7, 0.975, 1.0 - 1e-9}) {
    EXPECT_NEAR(NormalCdf(NormalQuantile(p)), p, 1e-13 * std::max(p, 1e-3))
        << "p=" << p;
  }
  EXPECT_NEAR(NormalQuantile(0.975), 1.959963984540054, 1e-12);
  EXPECT_TRUE(std::isinf(NormalQuantile(0.0)));
  EXPECT_TRUE(std::isinf(NormalQuantile(1.0)));
  EXPECT_THROW(NormalQuantile(-0.1), std::invalid_argument);
}

TEST(NormalTest, LogCdfMatchesDirectEvaluationInOverlap) {
  // The erfc route is reliable down to x ~ -37; the asymptotic branch must
  // agree with it across the switch point.
  for (double x = -37.0; x <= 8.0; x += 0.25) {
    const double direct = std::log(NormalCdf(x));
    EXPECT_NEAR(LogNormalCdf(x), direct, 1e-12 * std::abs(direct) + 1e-13)
        << "x=" << x;
  }
}

TEST(NormalTest, LogCdfDeepTail) {
  // Sanity in the regime where Phi underflows: monotone, finite, and
  // consistent with the leading-order exponent -x^2/2.
  double prev = LogNormalCdf(-40.0);
  EXPECT_TRUE(std::isfinite(prev));
  for (double x = -45.0; x >= -200.0; x -= 5.0) {
    const double value = LogNormalCdf(x);
    EXPECT_TRUE(std::isfinite(value));
    EXPECT_LT(value, prev);
    EXPECT_LT(value, -0.5 * x * x + 1.0);
    EXPECT_GT(value, -0.5 * x * x - std::log(-x) - 2.0);
    prev = value;
  }
}

}  // namespace
}  // namespace gdp
