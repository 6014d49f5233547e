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

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "gdp/errors.h"
#include "gdp/functionals.h"
#include "gdp/normal.h"

namespace gdp {
namespace {

constexpr int kBisectionIterations = 200;

void ValidateMu(double mu) {
  if (!(mu > 0.0) || !std::isfinite(mu)) {
    throw std::invalid_argument("mu must be positive and finite");
  }
}

}  // namespace

double DeltaFromEps(double mu, double eps) {
  ValidateMu(mu);
  if (!(eps >= 0.0)) throw std::invalid_argument("eps must be >= 0");
  const double a = eps / mu;
  const double b = 0.5 * mu;
  // delta = t1 - t2 with t1 = Phi(b - a), t2 = e^eps Phi(-a - b).
  // The two terms approach each other as eps grows; the difference is
  // formed as -t1 * expm1(log t2 - log t1) to avoid the cancellation.
  const double log_t1 = LogNormalCdf(b - a);
  if (log_t1 == -std::numeric_limits<double>::infinity()) return 0.0;
  const double log_t2 = eps + LogNormalCdf(-a - b);
  const double delta = -std::exp(log_t1) * std::expm1(log_t2 - log_t1);
  return std::clamp(delta, 0.0, 1.0);
}

double EpsFromDelta(double mu, double delta) {
  ValidateMu(mu);
  if (!(delta > 0.0 && delta < 1.0)) {
    throw std::invalid_argument("delta must lie in (0, 1)");
  }
  if (delta >= DeltaFromEps(mu, 0.0)) return 0.0;
  double lo = 0.0;
  double hi = 1.0;
  while (DeltaFromEps(mu, hi) > delta) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e9) {
      throw AccountingError("EpsFromDelta: bracket expansion failed");
    }
  }
  for (int i = 0; i < kBisectionIterations; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    if (DeltaFromEps(mu, mid) > delta) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double CalibrateMu(const EpsDeltaPoint& target) {
  if (!(target.delta > 0.0 && target.delta < 1.0)) {
    throw std::invalid_argument("target delta must lie in (0, 1)");
  }
  if (!(target.eps >= 0.0)) {
    throw std::invalid_argument("target eps must be >= 0");
  }
  double lo = 1e-6;
  double hi = 100.0;
  if (DeltaFromEps(lo, target.eps) > target.delta ||
      DeltaFromEps(hi, target.eps) < target.delta) {
    throw InfeasibleError("CalibrateMu: target outside the [1e-6, 100] "
                          "mu bracket");
  }
  for (int i = 0; i < kBisectionIterations; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    if (DeltaFromEps(mid, target.eps) < target.delta) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

CalibrationResult CalibrateSigma(const EpsDeltaPoint& target, double p,
                                 long T) {
  if (!(p > 0.0 && p < 1.0)) {
    throw std::invalid_argument("subsampling probability must lie in (0, 1)");
  }
  if (T < 1) throw std::invalid_argument("iteration count must be >= 1");
  const double mu_tilde = CalibrateMu(target);
  const double ratio = mu_tilde * mu_tilde / (p * p * static_cast<double>(T));
  const double sigma_tilde = 1.0 / std::sqrt(std::log1p(ratio));
  if (sigma_tilde < kSigmaFloor) {
    throw InfeasibleError(
        "CalibrateSigma: required noise scale " + std::to_string(sigma_tilde) +
        " is below the accounting floor " + std::to_string(kSigmaFloor));
  }
  const double residual =
      std::abs(CltMuSubsampledGaussian(p, T, sigma_tilde) - mu_tilde);
  if (!(residual <= 1e-10 * std::max(1.0, mu_tilde))) {
    throw AccountingError("CalibrateSigma: round-trip residual " +
                          std::to_string(residual));
  }
  return CalibrationResult{mu_tilde, sigma_tilde, kBisectionIterations,
                           residual};
}

long IterationsFromEpochs(double epochs, double p) {
  if (!(epochs > 0.0)) throw std::invalid_argument("epochs must be positive");
  if (!(p > 0.0 && p <= 1.0)) {
    throw std::invalid_argument("subsampling probability must lie in (0, 1]");
  }
  return std::llround(epochs / p);
}

}  // namespace gdp
