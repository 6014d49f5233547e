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

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <utility>

#include "gdp/errors.h"
#include "gdp/normal.h"

namespace gdp {
namespace {

constexpr double kZMax = 38.0;
constexpr double kLogSqrt2Pi = 0.91893853320467274178;

// A segment of a piecewise-linear trade-off function: alpha-length and the
// slope magnitude |f'| on it.
struct Segment {
  double length;
  double slope;
};

bool IsPiecewiseLinear(const TradeoffFunction& f) {
  if (f.is_identity() || f.is_eps_delta() || f.is_grid()) return true;
  if (f.is_subsampled()) return IsPiecewiseLinear(f.subsampled_base());
  return false;
}

void CheckStandingAssumptions(const TradeoffFunction& f) {
  if (f.is_identity() || f.is_gaussian()) return;
  if (f.is_eps_delta()) {
    if (f.eps_delta().delta != 0.0) {
      throw std::invalid_argument(
          "functionals need f(0) = 1; EpsDelta requires delta = 0");
    }
    return;
  }
  if (f.is_grid()) {
    const GridSpec& g = f.grid();
    if (g.betas.front() < 1.0 - 1e-9) {
      throw std::invalid_argument("functionals need f(0) = 1");
    }
    for (size_t i = 0; i + 1 < g.alphas.size(); ++i) {
      if (g.betas[i] <= 0.0) {
        throw std::invalid_argument("functionals need f(x) > 0 for x < 1");
      }
    }
    return;
  }
  CheckStandingAssumptions(f.subsampled_base());
}

std::vector<Segment> LinearSegments(const TradeoffFunction& f) {
  if (f.is_identity()) return {{1.0, 1.0}};
  if (f.is_eps_delta()) {
    const double eps = f.eps_delta().eps;
    const double kink = 1.0 / (1.0 + std::exp(eps));
    return {{kink, std::exp(eps)}, {1.0 - kink, std::exp(-eps)}};
  }
  if (f.is_grid()) {
    const GridSpec& g = f.grid();
    std::vector<Segment> segments;
    segments.reserve(g.alphas.size() - 1);
    for (size_t i = 0; i + 1 < g.alphas.size(); ++i) {
      const double len = g.alphas[i + 1] - g.alphas[i];
      segments.push_back({len, (g.betas[i] - g.betas[i + 1]) / len});
    }
    return segments;
  }
  // Subsampled: |f_p'| = p |f'| + (1 - p) segment-wise.
  std::vector<Segment> segments = LinearSegments(f.subsampled_base());
  const double p = f.subsampled_p();
  for (Segment& s : segments) s.slope = p * s.slope + (1.0 - p);
  return segments;
}

KlFunctionals FunctionalsFromSegments(const std::vector<Segment>& segments) {
  KlFunctionals out;
  for (const Segment& seg : segments) {
    if (seg.slope <= 0.0) {
      throw IntegrabilityError("kl functionals diverge on a flat segment");
    }
    const double l = std::log(seg.slope);
    const double w = seg.length;
    out.kl -= w * l;
    out.kl_tilde += w * seg.slope * l;
    out.kappa2 += w * l * l;
    out.kappa2_tilde += w * seg.slope * l * l;
    const double a3 = std::abs(l) * l * l;
    out.kappa3 += w * a3;
    out.kappa3_tilde += w * seg.slope * a3;
  }
  return out;
}

// log |f'(alpha(z))| with alpha(z) = 1 - Phi(z); defined for the
// Gaussian-backed variants (possibly nested subsampling).
double LogSlopeZ(const TradeoffFunction& f, double z) {
  if (f.is_gaussian()) {
    const double mu = f.gaussian_mu();
    return mu * z - 0.5 * mu * mu;
  }
  if (f.is_identity()) return 0.0;
  if (f.is_subsampled()) {
    const double p = f.subsampled_p();
    const double t = LogSlopeZ(f.subsampled_base(), z);
    // log(p e^t + (1 - p))
    if (t > 0.0) return t + std::log(p + (1.0 - p) * std::exp(-t));
    return std::log1p(p * std::expm1(t));
  }
  throw std::invalid_argument("no smooth slope profile for this variant");
}

// Largest Gaussian mean appearing inside f; the tilde weight shifts the
// integrand mass by about this much.
double InnerMu(const TradeoffFunction& f) {
  if (f.is_gaussian()) return f.gaussian_mu();
  if (f.is_subsampled()) return InnerMu(f.subsampled_base());
  return 0.0;
}

double GaussWeighted(const TradeoffFunction& f,
                     const std::function<double(double)>& h, double shift,
                     const QuadratureOptions& options) {
  return IntegrateOrThrow(
      [&](double z) {
        const double log_w = -0.5 * z * z - kLogSqrt2Pi;
        const double v = h(LogSlopeZ(f, z));
        if (v == 0.0) return 0.0;
        return v * std::exp(log_w);
      },
      -kZMax, kZMax + shift, options);
}

// Same with the |f'| tilde weight, evaluated as exp(log|f'| + log phi).
double GaussWeightedTilde(const TradeoffFunction& f,
                          const std::function<double(double)>& h, double shift,
                          const QuadratureOptions& options) {
  return IntegrateOrThrow(
      [&](double z) {
        const double ls = LogSlopeZ(f, z);
        const double log_w = ls - 0.5 * z * z - kLogSqrt2Pi;
        const double v = h(ls);
        if (v == 0.0) return 0.0;
        return v * std::exp(log_w);
      },
      -kZMax, kZMax + shift, options);
}

void CheckFourthMoment(const TradeoffFunction& f,
                       const QuadratureOptions& options) {
  // Int (|f'| - 1)^4 dx with the integration window widened to cover the
  // e^{4 log|f'|} term; a relatively heavy tail signals divergence.
  const double mu = InnerMu(f);
  const double hi = kZMax + 4.0 * mu;
  auto integrand = [&](double z) {
    const double g = std::expm1(LogSlopeZ(f, z));
    const double g2 = g * g;
    return g2 * g2 * std::exp(-0.5 * z * z - kLogSqrt2Pi);
  };
  const double total = IntegrateOrThrow(integrand, -kZMax, hi, options);
  const double tail = IntegrateOrThrow(integrand, hi - 4.0, hi, options);
  if (!(std::isfinite(total)) || tail > 1e-6 * (1.0 + total)) {
    throw IntegrabilityError(
        "fourth-moment condition violated: tail estimate " +
        std::to_string(tail) + " of total " + std::to_string(total));
  }
}

double SegmentsChiSquare(const std::vector<Segment>& segments) {
  double sum = 0.0;
  for (const Segment& seg : segments) {
    sum += seg.length * seg.slope * seg.slope;
  }
  return std::max(0.0, sum - 1.0);
}

}  // namespace

KlFunctionals ComputeKlFunctionals(const TradeoffFunction& f,
                                   const QuadratureOptions& options) {
  CheckStandingAssumptions(f);
  if (IsPiecewiseLinear(f)) {
    return FunctionalsFromSegments(LinearSegments(f));
  }
  CheckFourthMoment(f, options);
  const double mu = InnerMu(f);
  auto neg = [](double l) { return -l; };
  auto ident = [](double l) { return l; };
  auto sq = [](double l) { return l * l; };
  auto abs3 = [](double l) { return std::abs(l) * l * l; };
  KlFunctionals out;
  out.kl = GaussWeighted(f, neg, 0.0, options);
  out.kl_tilde = GaussWeightedTilde(f, ident, mu, options);
  out.kappa2 = GaussWeighted(f, sq, 0.0, options);
  out.kappa2_tilde = GaussWeightedTilde(f, sq, mu, options);
  out.kappa3 = GaussWeighted(f, abs3, 0.0, options);
  out.kappa3_tilde = GaussWeightedTilde(f, abs3, mu, options);
  return out;
}

double ChiSquare(const TradeoffFunction& f) {
  if (f.is_identity()) return 0.0;
  if (f.is_gaussian()) {
    const double mu = f.gaussian_mu();
    return std::expm1(mu * mu);
  }
  if (f.is_eps_delta()) {
    CheckStandingAssumptions(f);
    return SegmentsChiSquare(LinearSegments(f));
  }
  if (f.is_grid()) {
    CheckStandingAssumptions(f);
    return SegmentsChiSquare(LinearSegments(f));
  }
  // chi^2(p f + (1-p) Id) = p^2 chi^2(f): the cross terms integrate |f'|
  // to exactly one.
  return f.subsampled_p() * f.subsampled_p() * ChiSquare(f.subsampled_base());
}

double ChiSquareQuadrature(const TradeoffFunction& f,
                           const QuadratureOptions& options) {
  CheckStandingAssumptions(f);
  if (IsPiecewiseLinear(f)) {
    return SegmentsChiSquare(LinearSegments(f));
  }
  const double shift = 2.0 * InnerMu(f);
  const double value = IntegrateOrThrow(
      [&](double z) {
        return std::exp(2.0 * LogSlopeZ(f, z) - 0.5 * z * z - kLogSqrt2Pi);
      },
      -kZMax, kZMax + shift, options);
  return std::max(0.0, value - 1.0);
}

double RenyiFromTradeoff(const TradeoffFunction& f, double order,
                         const QuadratureOptions& options) {
  if (!(order > 1.0) || !std::isfinite(order)) {
    throw std::invalid_argument("Renyi order must be finite and > 1");
  }
  CheckStandingAssumptions(f);
  double log_integral;
  if (IsPiecewiseLinear(f)) {
    // log sum of length * slope^order, in log space to dodge overflow.
    const std::vector<Segment> segments = LinearSegments(f);
    double peak = -std::numeric_limits<double>::infinity();
    std::vector<double> exponents;
    exponents.reserve(segments.size());
    for (const Segment& seg : segments) {
      if (seg.slope <= 0.0 || seg.length <= 0.0) continue;
      const double e = order * std::log(seg.slope) + std::log(seg.length);
      exponents.push_back(e);
      peak = std::max(peak, e);
    }
    if (exponents.empty()) {
      throw IntegrabilityError("Renyi integral is empty");
    }
    double acc = 0.0;
    for (double e : exponents) acc += std::exp(e - peak);
    log_integral = peak + std::log(acc);
  } else {
    log_integral = LogIntegrateExp(
        [&](double z) {
          return order * LogSlopeZ(f, z) - 0.5 * z * z - kLogSqrt2Pi;
        },
        -kZMax, kZMax + order * InnerMu(f), options);
  }
  if (!std::isfinite(log_integral)) {
    throw IntegrabilityError("Renyi integral is numerically infinite");
  }
  return std::max(0.0, log_integral / (order - 1.0));
}

double CltMuSubsampledGaussian(double p, long T, double sigma) {
  if (!(p > 0.0 && p < 1.0)) {
    throw std::invalid_argument("subsampling probability must lie in (0, 1)");
  }
  if (T < 1) throw std::invalid_argument("iteration count must be >= 1");
  if (!(sigma > 0.0)) throw std::invalid_argument("sigma must be positive");
  if (sigma < kSigmaFloor) {
    throw InfeasibleError(
        "sigma below the accounting floor " + std::to_string(kSigmaFloor) +
        "; e^{1/sigma^2} is numerically meaningless in this regime");
  }
  return p * std::sqrt(static_cast<double>(T) * std::expm1(1.0 / (sigma * sigma)));
}

AsymptoticRegime AsymptoticRegime::FromFinite(double p, long T) {
  if (!(p > 0.0 && p < 1.0)) {
    throw std::invalid_argument("subsampling probability must lie in (0, 1)");
  }
  if (T < 1) throw std::invalid_argument("iteration count must be >= 1");
  return AsymptoticRegime{p * std::sqrt(static_cast<double>(T)), T, p};
}

double CltMuGeneral(const TradeoffFunction& f, const AsymptoticRegime& regime) {
  if (!(regime.nu > 0.0)) {
    throw std::invalid_argument("regime constant nu must be positive");
  }
  CheckStandingAssumptions(f);
  return regime.nu * std::sqrt(ChiSquare(f));
}

CltFunctionalSums CltMuAsymmetric(const std::vector<TradeoffFunction>& components,
                                  const QuadratureOptions& options) {
  CltFunctionalSums sums;
  double kappa2_sum = 0.0;
  for (const TradeoffFunction& f : components) {
    const KlFunctionals k = ComputeKlFunctionals(f, options);
    sums.K += k.kl + k.kl_tilde;
    kappa2_sum += k.kappa2;
    sums.kappa3_sum += k.kappa3;
    sums.kappa3_tilde_sum += k.kappa3_tilde;
  }
  sums.s = std::sqrt(kappa2_sum);
  if (!(sums.s > 0.0)) {
    throw InfeasibleError("degenerate composition: s = 0, no privacy loss");
  }
  return sums;
}

CltFunctionalSums CltMuAsymmetric(const TradeoffFunction& component,
                                  long copies,
                                  const QuadratureOptions& options) {
  if (copies < 1) throw std::invalid_argument("copies must be >= 1");
  const KlFunctionals k = ComputeKlFunctionals(component, options);
  const double n = static_cast<double>(copies);
  CltFunctionalSums sums;
  sums.K = n * (k.kl + k.kl_tilde);
  sums.s = std::sqrt(n * k.kappa2);
  sums.kappa3_sum = n * k.kappa3;
  sums.kappa3_tilde_sum = n * k.kappa3_tilde;
  if (!(sums.s > 0.0)) {
    throw InfeasibleError("degenerate composition: s = 0, no privacy loss");
  }
  return sums;
}

}  // namespace gdp
