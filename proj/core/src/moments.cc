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
#include "gdp/moments.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "gdp/errors.h"

namespace gdp {
namespace {

constexpr double kLogSqrt2Pi = 0.91893853320467274178;
constexpr double kTailWidth = 40.0;

// log of the mixture likelihood ratio GM_{p,sigma} / N(0,1) at x:
// log(1 + p * (e^{x/sigma - 1/(2 sigma^2)} - 1)), evaluated stably on
// both sides of t = 0.
double LogMixtureRatio(double x, double sigma, double p) {
  const double t = x / sigma - 0.5 / (sigma * sigma);
  if (p == 1.0) return t;  // expm1(t) -> -1 would poison log1p below
  if (t > 0.0) return t + std::log(p + (1.0 - p) * std::exp(-t));
  return std::log1p(p * std::expm1(t));
}

QuadratureOptions PanelsForRange(QuadratureOptions options, double lo,
                                 double hi) {
  const double range = hi - lo;
  options.initial_panels =
      std::clamp(static_cast<int>(std::ceil(range)), 16, 4096);
  return options;
}

}  // namespace

std::vector<double> DefaultLambdaGrid() {
  // The published discretization {1.25, 1.5, ..., 512} enumerates Renyi
  // orders; the moment order is lambda = order - 1. The shift matters: the
  // optimal lambda drops below 1 in the small-sigma rows.
  std::vector<double> grid = {0.25, 0.5, 0.75, 1.0, 1.25,
                              1.5,  2.0, 2.5,  3.0, 3.5};
  for (int i = 4; i <= 63; ++i) grid.push_back(static_cast<double>(i));
  grid.push_back(127.0);
  grid.push_back(255.0);
  grid.push_back(511.0);
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return grid;
}

double AlphaGm(double lambda, double sigma, double p,
               const QuadratureOptions& options) {
  if (!(lambda > 0.0)) throw std::invalid_argument("lambda must be positive");
  if (!(sigma > 0.0)) throw std::invalid_argument("sigma must be positive");
  if (!(p > 0.0 && p <= 1.0)) {
    throw std::invalid_argument("subsampling probability must lie in (0, 1]");
  }
  // lambda * D_{lambda+1}(GM || P) = log E_P[(GM/P)^{lambda+1}]. The
  // integrand peaks near (lambda+1)/sigma, far outside the bulk of P for
  // large lambda, so the window is widened accordingly and the integral
  // is carried in log space.
  const double hi1 = std::max(kTailWidth, (lambda + 1.0) / sigma + kTailWidth);
  const double log_i1 = LogIntegrateExp(
      [&](double x) {
        return -0.5 * x * x - kLogSqrt2Pi +
               (lambda + 1.0) * LogMixtureRatio(x, sigma, p);
      },
      -kTailWidth, hi1, PanelsForRange(options, -kTailWidth, hi1));
  // lambda * D_{lambda+1}(P || GM) = log E_P[(GM/P)^{-lambda}]; the mass
  // sits on the left where the ratio approaches 1 - p.
  const double lo2 = -(kTailWidth + lambda / sigma);
  const double hi2 = kTailWidth + 1.0 / sigma;
  const double log_i2 = LogIntegrateExp(
      [&](double x) {
        return -0.5 * x * x - kLogSqrt2Pi -
               lambda * LogMixtureRatio(x, sigma, p);
      },
      lo2, hi2, PanelsForRange(options, lo2, hi2));
  return std::max(0.0, std::max(log_i1, log_i2));
}

MomentsAccountant::MomentsAccountant(MomentsAccountantConfig config)
    : config_(std::move(config)) {
  if (!(config_.sigma > 0.0)) {
    throw std::invalid_argument("sigma must be positive");
  }
  if (!(config_.p > 0.0 && config_.p <= 1.0)) {
    throw std::invalid_argument("subsampling probability must lie in (0, 1]");
  }
  if (config_.T < 1) throw std::invalid_argument("T must be >= 1");
  if (config_.lambda_grid.empty()) config_.lambda_grid = DefaultLambdaGrid();
  if (!std::is_sorted(config_.lambda_grid.begin(), config_.lambda_grid.end()) ||
      config_.lambda_grid.front() <= 0.0) {
    throw std::invalid_argument("lambda grid must be positive and increasing");
  }
  alpha_cache_.reserve(config_.lambda_grid.size());
  for (double lambda : config_.lambda_grid) {
    alpha_cache_.push_back(
        AlphaGm(lambda, config_.sigma, config_.p, config_.quadrature));
  }
  // Epsilon knots for the trade-off envelope: cover [0, eps_hi] where the
  // accountant's delta has decayed to fp noise.
  double eps_hi = 1.0;
  while (Delta(eps_hi) > 1e-16 && eps_hi < 1e6) eps_hi *= 2.0;
  constexpr int kEnvelopeKnots = 1024;
  envelope_eps_.reserve(kEnvelopeKnots);
  for (int i = 0; i < kEnvelopeKnots; ++i) {
    envelope_eps_.push_back(eps_hi * i / (kEnvelopeKnots - 1));
  }
}

double MomentsAccountant::LogDeltaAt(double lambda, double eps) const {
  return static_cast<double>(config_.T) *
             AlphaGm(lambda, config_.sigma, config_.p, config_.quadrature) -
         lambda * eps;
}

double MomentsAccountant::Delta(double eps, LambdaMode mode) const {
  if (!(eps >= 0.0)) throw std::invalid_argument("eps must be >= 0");
  const std::vector<double>& grid = config_.lambda_grid;
  double best = std::numeric_limits<double>::infinity();
  size_t best_index = 0;
  for (size_t i = 0; i < grid.size(); ++i) {
    const double exponent =
        static_cast<double>(config_.T) * alpha_cache_[i] - grid[i] * eps;
    if (exponent < best) {
      best = exponent;
      best_index = i;
    }
  }
  if (mode == LambdaMode::kContinuous) {
    // T * alpha_GM(lambda) - lambda * eps is convex in lambda; refine by
    // golden section between the neighbors of the grid minimizer.
    double lo = best_index > 0 ? grid[best_index - 1] : grid.front() / 8.0;
    double hi = best_index + 1 < grid.size() ? grid[best_index + 1]
                                             : 2.0 * grid.back();
    constexpr double kInvPhi = 0.6180339887498949;
    double x1 = hi - kInvPhi * (hi - lo);
    double x2 = lo + kInvPhi * (hi - lo);
    double f1 = LogDeltaAt(x1, eps);
    double f2 = LogDeltaAt(x2, eps);
    for (int it = 0; it < 48 && hi - lo > 1e-4 * (1.0 + hi); ++it) {
      if (f1 < f2) {
        hi = x2;
        x2 = x1;
        f2 = f1;
        x1 = hi - kInvPhi * (hi - lo);
        f1 = LogDeltaAt(x1, eps);
      } else {
        lo = x1;
        x1 = x2;
        f1 = f2;
        x2 = lo + kInvPhi * (hi - lo);
        f2 = LogDeltaAt(x2, eps);
      }
    }
    best = std::min({best, f1, f2});
  }
  if (best >= 0.0) return 1.0;
  return std::exp(best);
}

double MomentsAccountant::Epsilon(double delta, LambdaMode mode) const {
  if (!(delta > 0.0 && delta < 1.0)) {
    throw std::invalid_argument("delta must lie in (0, 1)");
  }
  double lo = 0.0;
  double hi = 1.0;
  while (Delta(hi, mode) > delta) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e7) throw AccountingError("EpsMa: bracket expansion failed");
  }
  while (hi - lo > 1e-5) {
    const double mid = 0.5 * (lo + hi);
    if (Delta(mid, mode) > delta) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double MomentsAccountant::TradeoffEnvelope(double alpha) const {
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw std::invalid_argument("alpha must lie in [0, 1]");
  }
  double best = 0.0;
  for (double eps : envelope_eps_) {
    const double delta = Delta(eps);
    const double low = std::exp(-eps) * (1.0 - delta - alpha);
    const double high =
        alpha == 0.0 ? 1.0 - delta : 1.0 - delta - std::exp(eps) * alpha;
    best = std::max({best, low, high});
  }
  return std::min(best, 1.0 - alpha);
}

double DeltaMa(double eps, const MomentsAccountantConfig& config,
               LambdaMode mode) {
  return MomentsAccountant(config).Delta(eps, mode);
}

double EpsMa(double delta, const MomentsAccountantConfig& config,
             LambdaMode mode) {
  return MomentsAccountant(config).Epsilon(delta, mode);
}

double MaTradeoffEnvelope(const MomentsAccountantConfig& config, double alpha) {
  return MomentsAccountant(config).TradeoffEnvelope(alpha);
}

}  // namespace gdp
