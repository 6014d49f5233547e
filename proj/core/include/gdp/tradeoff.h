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
#ifndef GDP_TRADEOFF_H_
#define GDP_TRADEOFF_H_

#include <memory>
#include <variant>
#include <vector>

namespace gdp {

class TradeoffFunction;

struct GaussianSpec {
  double mu;
};

struct EpsDeltaSpec {
  double eps;
  double delta;
};

struct IdentitySpec {};

// Piecewise-linear curve through strictly increasing alpha knots that
// include 0 and 1. Betas are non-increasing, within [0, 1 - alpha], and
// discretely convex (slope monotonicity up to a 1e-12 slack).
struct GridSpec {
  std::vector<double> alphas;
  std::vector<double> betas;
};

// p * f + (1 - p) * Id, the Poisson-subsampling amplification of f.
struct SubsampledSpec {
  std::shared_ptr<const TradeoffFunction> base;
  double p;
};

// A trade-off function: the type II error of the best level-alpha test
// between two distributions, as a function of alpha. Convex, continuous,
// non-increasing, and bounded by 0 <= f(alpha) <= 1 - alpha.
//
// Values are immutable after construction; all operations on them are pure
// functions, safe for unsynchronized concurrent use.
class TradeoffFunction {
 public:
  using Variant = std::variant<GaussianSpec, EpsDeltaSpec, IdentitySpec,
                               GridSpec, SubsampledSpec>;

  // T(N(0,1), N(mu,1)); mu >= 0. Gaussian{0} is the identity curve.
  static TradeoffFunction Gaussian(double mu);
  // The curve of an (eps, delta)-DP guarantee:
  // max{0, 1 - delta - e^eps * alpha, e^-eps * (1 - delta - alpha)}.
  static TradeoffFunction EpsDelta(double eps, double delta);
  // Perfect privacy, Id(alpha) = 1 - alpha.
  static TradeoffFunction Identity();
  // Piecewise-linear curve; validates the GridSpec invariants.
  static TradeoffFunction Grid(std::vector<double> alphas,
                               std::vector<double> betas);

  double operator()(double alpha) const;

  const Variant& variant() const { return variant_; }
  bool is_gaussian() const;
  bool is_identity() const;
  bool is_eps_delta() const;
  bool is_grid() const;
  bool is_subsampled() const;
  // Valid only for the matching variant.
  double gaussian_mu() const;
  const EpsDeltaSpec& eps_delta() const;
  const GridSpec& grid() const;
  const TradeoffFunction& subsampled_base() const;
  double subsampled_p() const;

 private:
  explicit TradeoffFunction(Variant variant);
  friend TradeoffFunction Subsample(const TradeoffFunction&, double);

  Variant variant_;
};

// f(alpha). Throws std::invalid_argument for alpha outside [0, 1].
double Eval(const TradeoffFunction& f, double alpha);

// f^{-1}(alpha) = inf{t in [0,1] : f(t) <= alpha}, the trade-off of the
// swapped distribution pair. Closed-form passthrough for the symmetric
// families; axis swap with infimum tie-breaking for grids.
TradeoffFunction Inverse(const TradeoffFunction& f);

// Convex conjugate f*(x) = sup_alpha {alpha * x - f(alpha)} for x <= 0.
double Conjugate(const TradeoffFunction& f, double x);

// p * f + (1 - p) * Id for p in [0, 1]. p = 0 and p = 1 short-circuit to
// Identity and f.
TradeoffFunction Subsample(const TradeoffFunction& f, double p);

// min{f, f^{-1}}**, the greatest convex lower bound of min{f, f^{-1}};
// the canonical symmetric privacy bound for one-sided guarantees.
// Closed-form families are returned unchanged (they are symmetric); other
// inputs are resolved on `alphas` (DefaultAlphaGrid() when omitted).
TradeoffFunction Symmetrize(const TradeoffFunction& f);
TradeoffFunction Symmetrize(const TradeoffFunction& f,
                            const std::vector<double>& alphas);

// G_mu1 (x) G_mu2 (x) ... = G_sqrt(sum mu_i^2).
TradeoffFunction ComposeGaussian(const std::vector<double>& mus);

// 1e4 uniform knots plus 100 logarithmically spaced knots in [0, 1e-3];
// trade-off curves are steep near 0 when privacy is weak.
std::vector<double> DefaultAlphaGrid();

// Materializes f as a Grid over the given alpha knots.
TradeoffFunction ToGrid(const TradeoffFunction& f,
                        const std::vector<double>& alphas);

// Greatest convex minorant of the polyline through (alphas[i], values[i]);
// returns the hull vertices. Exposed for reuse by the composition oracle.
GridSpec LowerConvexHull(const std::vector<double>& alphas,
                         const std::vector<double>& values);

}  // namespace gdp

#endif  // GDP_TRADEOFF_H_
