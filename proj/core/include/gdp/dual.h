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
#ifndef GDP_DUAL_H_
#define GDP_DUAL_H_

namespace gdp {

struct EpsDeltaPoint {
  double eps;
  double delta;
};

// The GDP duality curve:
//   delta(eps; mu) = Phi(-eps/mu + mu/2) - e^eps * Phi(-eps/mu - mu/2).
// Evaluated through the log of the complementary normal CDF so the result
// stays accurate down to delta ~ 1e-300 for large eps/mu.
double DeltaFromEps(double mu, double eps);

// Inverse of DeltaFromEps in eps, by bracketed bisection; returns 0 when
// delta >= delta(0; mu) (no positive eps is needed).
double EpsFromDelta(double mu, double delta);

// The mu whose duality curve passes through the target point. delta(eps; .)
// is strictly increasing in mu, so bisection on [1e-6, 100] applies.
// Throws InfeasibleError when the target is outside that bracket.
double CalibrateMu(const EpsDeltaPoint& target);

struct CalibrationResult {
  double mu_tilde;
  double sigma_tilde;
  int iterations;
  double residual;
};

// The smaller noise scale whose CLT accounting meets the (eps, delta)
// target after T subsampled steps:
//   sigma~ = (log(mu~^2 / (p^2 T) + 1))^{-1/2},  mu~ = CalibrateMu(target).
// Throws InfeasibleError when sigma~ falls below the accounting floor.
CalibrationResult CalibrateSigma(const EpsDeltaPoint& target, double p, long T);

// T = round(epochs / p), rounding to nearest. Every epoch <-> iteration
// conversion in the project goes through here.
long IterationsFromEpochs(double epochs, double p);

}  // namespace gdp

#endif  // GDP_DUAL_H_
