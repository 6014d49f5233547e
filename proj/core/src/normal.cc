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
#include <limits>
#include <stdexcept>

#include <boost/math/special_functions/erf.hpp>

namespace gdp {
namespace {

constexpr double kSqrt2 = 1.4142135623730950488;
constexpr double kLogSqrt2Pi = 0.91893853320467274178;  // log(sqrt(2*pi))

// Switch point between the erfc route and the asymptotic expansion of
// log Phi(x). erfc(38/sqrt(2)) is still comfortably above the denormal
// range, and at |x| = 30 the expansion has already converged to full
// double precision.
constexpr double kLogCdfSeriesCutoff = -30.0;

// Mills-ratio series: Phi(-t) = phi(t)/t * (1 - 1/t^2 + 3/t^4 - ...).
double MillsSeries(double t) {
  const double inv_t2 = 1.0 / (t * t);
  double term = 1.0;
  double sum = 1.0;
  for (int k = 1; k <= 20; ++k) {
    term *= -(2 * k - 1) * inv_t2;
    sum += term;
    if (std::abs(term) < 1e-17 * std::abs(sum)) break;
  }
  return sum;
}

}  // namespace

double NormalPdf(double x) {
  return std::exp(-0.5 * x * x - kLogSqrt2Pi);
}

double NormalCdf(double x) { return 0.5 * std::erfc(-x / kSqrt2); }

double NormalQuantile(double p) {
  if (p < 0.0 || p > 1.0) {
    throw std::invalid_argument("NormalQuantile: p must lie in [0, 1]");
  }
  if (p == 0.0) return -std::numeric_limits<double>::infinity();
  if (p == 1.0) return std::numeric_limits<double>::infinity();
  // Phi^{-1}(p) = -sqrt(2) * erfc_inv(2p).
  return -kSqrt2 * boost::math::erfc_inv(2.0 * p);
}

double LogNormalCdf(double x) {
  if (x > 0.0) {
    // log(1 - Phi(-x)); Phi(-x) <= 1/2 so log1p is exact here.
    return std::log1p(-NormalCdf(-x));
  }
  if (x >= kLogCdfSeriesCutoff) {
    return std::log(NormalCdf(x));
  }
  const double t = -x;
  return -0.5 * t * t - std::log(t) - kLogSqrt2Pi + std::log(MillsSeries(t));
}

}  // namespace gdp
