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
#include "gdp/tradeoff.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

#include "gdp/normal.h"

namespace gdp {
namespace {

constexpr double kGridSlack = 1e-12;

void ValidateAlpha(double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw std::invalid_argument("alpha must lie in [0, 1]");
  }
}

void ValidateGrid(const GridSpec& g) {
  if (g.alphas.size() != g.betas.size() || g.alphas.size() < 2) {
    throw std::invalid_argument("grid needs matching alpha/beta knots");
  }
  if (g.alphas.front() != 0.0 || g.alphas.back() != 1.0) {
    throw std::invalid_argument("grid alphas must include 0 and 1");
  }
  for (size_t i = 0; i + 1 < g.alphas.size(); ++i) {
    if (!(g.alphas[i] < g.alphas[i + 1])) {
      throw std::invalid_argument("grid alphas must be strictly increasing");
    }
    if (g.betas[i + 1] > g.betas[i] + kGridSlack) {
      throw std::invalid_argument("grid betas must be non-increasing");
    }
  }
  for (size_t i = 0; i < g.alphas.size(); ++i) {
    if (!(g.betas[i] >= -kGridSlack &&
          g.betas[i] <= 1.0 - g.alphas[i] + kGridSlack)) {
      throw std::invalid_argument("grid betas must satisfy 0 <= f <= 1-alpha");
    }
  }
  // Discrete convexity: slopes must be non-decreasing. The slack is applied
  // to the cross product so it scales with the knot spacing.
  for (size_t i = 0; i + 2 < g.alphas.size(); ++i) {
    const double da1 = g.alphas[i + 1] - g.alphas[i];
    const double da2 = g.alphas[i + 2] - g.alphas[i + 1];
    const double db1 = g.betas[i + 1] - g.betas[i];
    const double db2 = g.betas[i + 2] - g.betas[i + 1];
    if (db1 * da2 > db2 * da1 + kGridSlack) {
      throw std::invalid_argument("grid betas must be convex");
    }
  }
}

double EvalGrid(const GridSpec& g, double alpha) {
  if (alpha <= 0.0) return g.betas.front();
  if (alpha >= 1.0) return g.betas.back();
  const auto it =
      std::upper_bound(g.alphas.begin(), g.alphas.end(), alpha);
  const size_t hi = static_cast<size_t>(it - g.alphas.begin());
  const size_t lo = hi - 1;
  const double t = (alpha - g.alphas[lo]) / (g.alphas[hi] - g.alphas[lo]);
  return g.betas[lo] + t * (g.betas[hi] - g.betas[lo]);
}

double EvalEpsDelta(const EpsDeltaSpec& s, double alpha) {
  const double low = std::exp(-s.eps) * (1.0 - s.delta - alpha);
  double value = std::max(0.0, low);
  if (alpha == 0.0) return std::max(value, 1.0 - s.delta);
  const double high = 1.0 - s.delta - std::exp(s.eps) * alpha;
  return std::max(value, high);
}

double EvalGaussian(double mu, double alpha) {
  if (alpha == 0.0) return 1.0;
  if (alpha == 1.0) return 0.0;
  return NormalCdf(NormalQuantile(1.0 - alpha) - mu);
}

// inf{t : f(t) <= y} for a piecewise-linear grid; picks the leftmost
// crossing so flat stretches resolve to their infimum.
double GridInversePoint(const GridSpec& g, double y) {
  if (g.betas.front() <= y) return 0.0;
  if (g.betas.back() > y) return 1.0;  // inf of an empty set, capped.
  // Leftmost knot with beta <= y. betas are non-increasing.
  size_t lo = 0;
  size_t hi = g.betas.size() - 1;
  while (lo + 1 < hi) {
    const size_t mid = (lo + hi) / 2;
    if (g.betas[mid] <= y) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  const double b0 = g.betas[lo];
  const double b1 = g.betas[hi];
  if (b0 == b1) return g.alphas[lo];
  const double t = (b0 - y) / (b0 - b1);
  return g.alphas[lo] + t * (g.alphas[hi] - g.alphas[lo]);
}

TradeoffFunction GridFromSpec(GridSpec spec) {
  return TradeoffFunction::Grid(std::move(spec.alphas), std::move(spec.betas));
}

std::vector<double> MergeKnots(const std::vector<double>& a,
                               const std::vector<double>& b) {
  std::vector<double> merged;
  merged.reserve(a.size() + b.size());
  std::merge(a.begin(), a.end(), b.begin(), b.end(),
             std::back_inserter(merged));
  merged.erase(std::unique(merged.begin(), merged.end()), merged.end());
  return merged;
}

}  // namespace

TradeoffFunction::TradeoffFunction(Variant variant)
    : variant_(std::move(variant)) {}

TradeoffFunction TradeoffFunction::Gaussian(double mu) {
  if (!(mu >= 0.0) || !std::isfinite(mu)) {
    throw std::invalid_argument("Gaussian trade-off needs mu >= 0");
  }
  if (mu == 0.0) return Identity();
  return TradeoffFunction(GaussianSpec{mu});
}

TradeoffFunction TradeoffFunction::EpsDelta(double eps, double delta) {
  if (!(eps >= 0.0)) {
    throw std::invalid_argument("EpsDelta trade-off needs eps >= 0");
  }
  if (!(delta >= 0.0 && delta <= 1.0)) {
    throw std::invalid_argument("EpsDelta trade-off needs delta in [0, 1]");
  }
  if (eps == 0.0 && delta == 0.0) return Identity();
  return TradeoffFunction(EpsDeltaSpec{eps, delta});
}

TradeoffFunction TradeoffFunction::Identity() {
  return TradeoffFunction(IdentitySpec{});
}

TradeoffFunction TradeoffFunction::Grid(std::vector<double> alphas,
                                        std::vector<double> betas) {
  GridSpec spec{std::move(alphas), std::move(betas)};
  ValidateGrid(spec);
  // Canonicalize away the validation slack so downstream consumers see
  // exactly monotone, non-negative values.
  for (size_t i = 0; i < spec.betas.size(); ++i) {
    spec.betas[i] = std::clamp(spec.betas[i], 0.0, 1.0 - spec.alphas[i]);
    if (i > 0) spec.betas[i] = std::min(spec.betas[i], spec.betas[i - 1]);
  }
  return TradeoffFunction(std::move(spec));
}

double TradeoffFunction::operator()(double alpha) const {
  return gdp::Eval(*this, alpha);
}

bool TradeoffFunction::is_gaussian() const {
  return std::holds_alternative<GaussianSpec>(variant_);
}
bool TradeoffFunction::is_identity() const {
  return std::holds_alternative<IdentitySpec>(variant_);
}
bool TradeoffFunction::is_eps_delta() const {
  return std::holds_alternative<EpsDeltaSpec>(variant_);
}
bool TradeoffFunction::is_grid() const {
  return std::holds_alternative<GridSpec>(variant_);
}
bool TradeoffFunction::is_subsampled() const {
  return std::holds_alternative<SubsampledSpec>(variant_);
}
double TradeoffFunction::gaussian_mu() const {
  if (is_identity()) return 0.0;
  return std::get<GaussianSpec>(variant_).mu;
}
const EpsDeltaSpec& TradeoffFunction::eps_delta() const {
  return std::get<EpsDeltaSpec>(variant_);
}
const GridSpec& TradeoffFunction::grid() const {
  return std::get<GridSpec>(variant_);
}
const TradeoffFunction& TradeoffFunction::subsampled_base() const {
  return *std::get<SubsampledSpec>(variant_).base;
}
double TradeoffFunction::subsampled_p() const {
  return std::get<SubsampledSpec>(variant_).p;
}

double Eval(const TradeoffFunction& f, double alpha) {
  ValidateAlpha(alpha);
  return std::visit(
      [alpha](const auto& spec) -> double {
        using T = std::decay_t<decltype(spec)>;
        if constexpr (std::is_same_v<T, GaussianSpec>) {
          return EvalGaussian(spec.mu, alpha);
        } else if constexpr (std::is_same_v<T, EpsDeltaSpec>) {
          return EvalEpsDelta(spec, alpha);
        } else if constexpr (std::is_same_v<T, IdentitySpec>) {
          return 1.0 - alpha;
        } else if constexpr (std::is_same_v<T, GridSpec>) {
          return EvalGrid(spec, alpha);
        } else {
          return spec.p * Eval(*spec.base, alpha) +
                 (1.0 - spec.p) * (1.0 - alpha);
        }
      },
      f.variant());
}

TradeoffFunction Inverse(const TradeoffFunction& f) {
  if (f.is_identity() || f.is_gaussian() || f.is_eps_delta()) {
    return f;  // These families are symmetric: f^{-1} = f.
  }
  const TradeoffFunction materialized =
      f.is_grid() ? f : ToGrid(f, DefaultAlphaGrid());
  const GridSpec& g = materialized.grid();
  // Knots of the inverse: the beta values (reversed to ascend) plus 0 and 1.
  std::vector<double> ys(g.betas.rbegin(), g.betas.rend());
  ys.push_back(0.0);
  ys.push_back(1.0);
  std::sort(ys.begin(), ys.end());
  ys.erase(std::unique(ys.begin(), ys.end()), ys.end());
  std::vector<double> xs(ys.size());
  for (size_t i = 0; i < ys.size(); ++i) xs[i] = GridInversePoint(g, ys[i]);
  return GridFromSpec(GridSpec{std::move(ys), std::move(xs)});
}

double Conjugate(const TradeoffFunction& f, double x) {
  if (!(x <= 0.0)) {
    throw std::invalid_argument("Conjugate is defined here for x <= 0");
  }
  return std::visit(
      [&f, x](const auto& spec) -> double {
        using T = std::decay_t<decltype(spec)>;
        if constexpr (std::is_same_v<T, IdentitySpec>) {
          return std::max(x, -1.0);
        } else if constexpr (std::is_same_v<T, GaussianSpec>) {
          if (x == 0.0) return 0.0;
          // Supremum at alpha* where G'(alpha*) = x; with eps = log(-x),
          // alpha* = Phi(-eps/mu - mu/2).
          const double eps = std::log(-x);
          const double mu = spec.mu;
          const double a = eps / mu;
          const double b = 0.5 * mu;
          return x * NormalCdf(-a - b) - NormalCdf(a - b);
        } else if constexpr (std::is_same_v<T, EpsDeltaSpec>) {
          // Piecewise-linear objective: the sup sits on a vertex. The
          // curve's knees are the segment crossing and the zero at 1-delta.
          const double kink = (1.0 - spec.delta) / (1.0 + std::exp(spec.eps));
          const double zero = 1.0 - spec.delta;
          double best = -std::numeric_limits<double>::infinity();
          for (double alpha : {0.0, kink, zero, 1.0}) {
            best = std::max(best, alpha * x - EvalEpsDelta(spec, alpha));
          }
          return best;
        } else if constexpr (std::is_same_v<T, GridSpec>) {
          double best = -std::numeric_limits<double>::infinity();
          for (size_t i = 0; i < spec.alphas.size(); ++i) {
            best = std::max(best, spec.alphas[i] * x - spec.betas[i]);
          }
          return best;
        } else {
          // Concave objective; ternary search.
          auto objective = [&f, x](double alpha) {
            return alpha * x - Eval(f, alpha);
          };
          double lo = 0.0, hi = 1.0;
          for (int it = 0; it < 200; ++it) {
            const double m1 = lo + (hi - lo) / 3.0;
            const double m2 = hi - (hi - lo) / 3.0;
            if (objective(m1) < objective(m2)) {
              lo = m1;
            } else {
              hi = m2;
            }
          }
          const double mid = 0.5 * (lo + hi);
          return std::max({objective(0.0), objective(mid), objective(1.0)});
        }
      },
      f.variant());
}

TradeoffFunction Subsample(const TradeoffFunction& f, double p) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw std::invalid_argument("subsampling probability must lie in [0, 1]");
  }
  if (p == 0.0 || f.is_identity()) return TradeoffFunction::Identity();
  if (p == 1.0) return f;
  return TradeoffFunction(
      SubsampledSpec{std::make_shared<const TradeoffFunction>(f), p});
}

TradeoffFunction Symmetrize(const TradeoffFunction& f) {
  return Symmetrize(f, DefaultAlphaGrid());
}

TradeoffFunction Symmetrize(const TradeoffFunction& f,
                            const std::vector<double>& alphas) {
  if (f.is_identity() || f.is_gaussian() || f.is_eps_delta()) {
    return f;  // min{f, f^{-1}}** = f** = f for symmetric f.
  }
  const TradeoffFunction g = f.is_grid() ? f : ToGrid(f, alphas);
  const TradeoffFunction gi = Inverse(g);
  const std::vector<double> knots =
      MergeKnots(g.grid().alphas, gi.grid().alphas);
  std::vector<double> mins(knots.size());
  for (size_t i = 0; i < knots.size(); ++i) {
    mins[i] = std::min(Eval(g, knots[i]), Eval(gi, knots[i]));
  }
  GridSpec hull = LowerConvexHull(knots, mins);
  return GridFromSpec(std::move(hull));
}

TradeoffFunction ComposeGaussian(const std::vector<double>& mus) {
  double sum_sq = 0.0;
  for (double mu : mus) {
    if (!(mu >= 0.0)) {
      throw std::invalid_argument("ComposeGaussian needs mu >= 0");
    }
    sum_sq += mu * mu;
  }
  return TradeoffFunction::Gaussian(std::sqrt(sum_sq));
}

std::vector<double> DefaultAlphaGrid() {
  constexpr int kUniform = 10000;
  constexpr int kLog = 100;
  std::vector<double> knots;
  knots.reserve(kUniform + kLog + 2);
  for (int i = 0; i <= kUniform; ++i) {
    knots.push_back(static_cast<double>(i) / kUniform);
  }
  const double lo = std::log(1e-9);
  const double hi = std::log(1e-3);
  for (int i = 0; i < kLog; ++i) {
    knots.push_back(std::exp(lo + (hi - lo) * i / (kLog - 1)));
  }
  std::sort(knots.begin(), knots.end());
  knots.erase(std::unique(knots.begin(), knots.end()), knots.end());
  return knots;
}

TradeoffFunction ToGrid(const TradeoffFunction& f,
                        const std::vector<double>& alphas) {
  std::vector<double> betas(alphas.size());
  for (size_t i = 0; i < alphas.size(); ++i) betas[i] = Eval(f, alphas[i]);
  return TradeoffFunction::Grid(alphas, std::move(betas));
}

GridSpec LowerConvexHull(const std::vector<double>& alphas,
                         const std::vector<double>& values) {
  if (alphas.size() != values.size() || alphas.empty()) {
    throw std::invalid_argument("hull needs matching non-empty inputs");
  }
  GridSpec hull;
  hull.alphas.reserve(alphas.size());
  hull.betas.reserve(alphas.size());
  for (size_t i = 0; i < alphas.size(); ++i) {
    const double x = alphas[i];
    const double y = values[i];
    if (!hull.alphas.empty() && x == hull.alphas.back()) {
      if (y >= hull.betas.back()) continue;
      hull.alphas.pop_back();
      hull.betas.pop_back();
    }
    // Pop while the previous vertex lies on or above the chord from its
    // predecessor to the new point.
    while (hull.alphas.size() >= 2) {
      const size_t n = hull.alphas.size();
      const double ox = hull.alphas[n - 2], oy = hull.betas[n - 2];
      const double mx = hull.alphas[n - 1], my = hull.betas[n - 1];
      const double cross = (mx - ox) * (y - oy) - (my - oy) * (x - ox);
      if (cross <= 0.0) {
        hull.alphas.pop_back();
        hull.betas.pop_back();
      } else {
        break;
      }
    }
    hull.alphas.push_back(x);
    hull.betas.push_back(y);
  }
  return hull;
}

}  // namespace gdp
