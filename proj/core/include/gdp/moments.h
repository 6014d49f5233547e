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
#ifndef GDP_MOMENTS_H_
#define GDP_MOMENTS_H_

#include <vector>

#include "gdp/quadrature.h"
#include "gdp/tradeoff.h"

namespace gdp {

// The published order discretization {1.25, 1.5, 1.75, 2, 2.25, 2.5, 3,
// 3.5, 4, 4.5} u {5, 6, ..., 64} u {128, 256, 512}, shifted to moment
// orders lambda = order - 1.
std::vector<double> DefaultLambdaGrid();

// alpha_GM(lambda; sigma, p): the larger of the two scaled Renyi
// divergences between the subsampled-Gaussian mixture GM = p N(1/sigma, 1)
// + (1-p) N(0, 1) and N(0, 1), i.e.
//   max{ lambda D_{lambda+1}(GM || P), lambda D_{lambda+1}(P || GM) },
// computed by log-domain adaptive quadrature over the real line.
double AlphaGm(double lambda, double sigma, double p,
               const QuadratureOptions& options = {});

enum class LambdaMode {
  kGrid,        // infimum over the configured lambda grid
  kContinuous,  // golden-section refinement around the grid minimizer
};

struct MomentsAccountantConfig {
  double sigma = 1.0;
  double p = 0.01;
  long T = 1;
  std::vector<double> lambda_grid;  // DefaultLambdaGrid() when empty
  QuadratureOptions quadrature{.abs_tol = 1e-12};
};

// Moments-accountant bookkeeping for a fixed mechanism configuration.
// The per-lambda divergences are computed once at construction; all
// methods on a built accountant are const and safe to call concurrently.
class MomentsAccountant {
 public:
  explicit MomentsAccountant(MomentsAccountantConfig config);

  // delta_MA(eps) = inf_lambda exp(T * alpha_GM(lambda) - lambda * eps),
  // clamped to [0, 1].
  double Delta(double eps, LambdaMode mode = LambdaMode::kGrid) const;

  // Inverse of Delta by bisection, to 1e-4 in eps.
  double Epsilon(double delta, LambdaMode mode = LambdaMode::kGrid) const;

  // The optimal trade-off curve the accountant supports:
  // sup_eps f_{eps, Delta(eps)}(alpha).
  double TradeoffEnvelope(double alpha) const;

  const MomentsAccountantConfig& config() const { return config_; }
  const std::vector<double>& alpha_cache() const { return alpha_cache_; }

 private:
  double LogDeltaAt(double lambda, double eps) const;

  MomentsAccountantConfig config_;
  std::vector<double> alpha_cache_;   // alpha_GM per grid lambda
  std::vector<double> envelope_eps_;  // eps knots for the envelope sup
};

// Convenience wrappers over a one-shot accountant.
double DeltaMa(double eps, const MomentsAccountantConfig& config,
               LambdaMode mode = LambdaMode::kGrid);
double EpsMa(double delta, const MomentsAccountantConfig& config,
             LambdaMode mode = LambdaMode::kGrid);
double MaTradeoffEnvelope(const MomentsAccountantConfig& config, double alpha);

}  // namespace gdp

#endif  // GDP_MOMENTS_H_
