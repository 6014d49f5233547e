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
#ifndef GDP_FUNCTIONALS_H_
#define GDP_FUNCTIONALS_H_

#include <cstdint>
#include <vector>

#include "gdp/quadrature.h"
#include "gdp/tradeoff.h"

namespace gdp {

// Noise scales below this floor make e^{1/sigma^2} explode and the
// closed-form accountant numerically meaningless; such configurations are
// rejected rather than approximated.
inline constexpr double kSigmaFloor = 0.2;

// The six divergence-like integrals of a trade-off function that drive the
// composition central limit theorem. All are integrals of functions of
// |f'(x)| over [0, 1]; the tilde variants carry an extra |f'(x)| weight.
struct KlFunctionals {
  double kl = 0.0;
  double kl_tilde = 0.0;
  double kappa2 = 0.0;
  double kappa2_tilde = 0.0;
  double kappa3 = 0.0;
  double kappa3_tilde = 0.0;
};

// Requires f(0) = 1 and f(x) > 0 for x < 1. Piecewise-linear inputs are
// summed segment-exactly; Gaussian-backed inputs go through adaptive
// quadrature in the normal-quantile coordinate, where the integrands are
// smooth. Subsampled inputs use the 1 + p*g(x) segment forms with
// g = |f'| - 1. Throws IntegrabilityError when an integral fails to
// converge (the fourth-moment condition is checked alongside).
KlFunctionals ComputeKlFunctionals(const TradeoffFunction& f,
                                   const QuadratureOptions& options = {});

// chi^2(f) = Int (f')^2 dx - 1. Closed form for Gaussian, EpsDelta with
// delta = 0, Identity and Subsampled-of-closed-form inputs; segment sums
// for grids.
double ChiSquare(const TradeoffFunction& f);

// The same functional evaluated by numeric quadrature regardless of any
// closed form; the consistency of the two routes is part of the test
// surface.
double ChiSquareQuadrature(const TradeoffFunction& f,
                           const QuadratureOptions& options = {});

// Renyi divergence D_order(Q || P) of the pair behind f = T(P, Q),
// recovered from the trade-off derivative:
//   D_order = 1/(order-1) * log Int_0^1 |f'(x)|^order dx.
// Requires order > 1 and the standing assumptions above.
double RenyiFromTradeoff(const TradeoffFunction& f, double order,
                         const QuadratureOptions& options = {});

// mu_CLT = p * sqrt(T * (e^{1/sigma^2} - 1)), the asymptotic GDP parameter
// of T Poisson-subsampled Gaussian steps. Throws InfeasibleError for sigma
// below kSigmaFloor.
double CltMuSubsampledGaussian(double p, long T, double sigma);

// The asymptotic regime p*sqrt(T) -> nu of the subsampling CLT.
struct AsymptoticRegime {
  double nu;
  long T;
  double p;

  static AsymptoticRegime FromFinite(double p, long T);
};

// nu * sqrt(chi^2(f)): the GDP limit of f_p^{(x)T} under the regime.
// Specializes to CltMuSubsampledGaussian when f is Gaussian{1/sigma}.
double CltMuGeneral(const TradeoffFunction& f, const AsymptoticRegime& regime);

// The condition sums of the asymmetric composition CLT. mu() = K / s is
// the limiting GDP parameter; the kappa3 sums are the Lyapunov-style
// diagnostic (small values mean the normal approximation is trustworthy).
struct CltFunctionalSums {
  double K = 0.0;
  double s = 0.0;
  double kappa3_sum = 0.0;
  double kappa3_tilde_sum = 0.0;

  double mu() const { return K / s; }
};

// Sums kl + kl_tilde, kappa2 and the kappa3 diagnostics over the
// components. Throws InfeasibleError when s = 0 (no privacy loss
// accumulates and the ratio K/s is undefined).
CltFunctionalSums CltMuAsymmetric(const std::vector<TradeoffFunction>& components,
                                  const QuadratureOptions& options = {});
// Same for `copies` repetitions of a single component, without
// recomputing the integrals per copy.
CltFunctionalSums CltMuAsymmetric(const TradeoffFunction& component,
                                  long copies,
                                  const QuadratureOptions& options = {});

}  // namespace gdp

#endif  // GDP_FUNCTIONALS_H_
