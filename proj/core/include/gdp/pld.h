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
#ifndef GDP_PLD_H_
#define GDP_PLD_H_

#include <cstdint>
#include <vector>

#include "gdp/tradeoff.h"

namespace gdp {

// Which adjacency ordering a privacy-loss distribution encodes.
// kAdd:    losses of log(dGM/dP) under GM, the numerator measure of
//          T(P, GM) — the f_p direction.
// kRemove: losses of log(dP/dGM) under P — the f_p^{-1} direction.
enum class Adjacency { kAdd, kRemove };

struct PldOptions {
  double spacing = 1e-4;
  // Probability mass allowed to leave the represented grid in total,
  // across discretization and all composition steps.
  double tail_budget = 1e-10;
  // Hard cap on the mass-array length; exceeded only if the tail budget
  // cannot pay for the required trimming.
  std::size_t max_grid_size = std::size_t{1} << 22;
};

// Discretized distribution of the log-likelihood ratio under the numerator
// measure, on the uniform loss grid {k * spacing}. Discretization rounds
// losses up (toward more privacy loss), truncated upper-tail mass is
// tracked as +infinity loss, and truncated lower-tail mass re-enters at the
// lowest kept grid point when a trade-off curve is formed — every choice
// errs toward claiming less privacy, so the resulting curve is a valid
// lower bound.
class PrivacyLossDistribution {
 public:
  PrivacyLossDistribution(std::int64_t origin_index, double spacing,
                          std::vector<double> masses, double tail_mass_low,
                          double tail_mass_high, Adjacency direction);

  double spacing() const { return spacing_; }
  std::int64_t origin_index() const { return origin_index_; }
  // Loss value of masses()[i].
  double LossAt(std::size_t i) const {
    return (static_cast<double>(origin_index_) + static_cast<double>(i)) *
           spacing_;
  }
  const std::vector<double>& masses() const { return masses_; }
  double tail_mass_low() const { return tail_mass_low_; }
  double tail_mass_high() const { return tail_mass_high_; }
  Adjacency direction() const { return direction_; }

  // Everything below ignores the (budget-sized) tail masses.
  double TotalMass() const;
  double Mean() const;
  double Variance() const;

 private:
  std::int64_t origin_index_;
  double spacing_;
  std::vector<double> masses_;
  double tail_mass_low_;
  double tail_mass_high_;
  Adjacency direction_;
};

// Single-step PLD of the Poisson-subsampled Gaussian mechanism
// (mixture GM_{p,sigma} = p N(1/sigma, 1) + (1-p) N(0, 1) against N(0,1)).
// The loss CDF is evaluated in closed form through the normal CDF, so the
// only approximation is the pessimistic grid rounding. p = 1 degenerates
// to the plain Gaussian mechanism. Throws InfeasibleError for sigma below
// the accounting floor and TailBudgetError when the requested truncation
// cannot meet the budget.
PrivacyLossDistribution PldFromSubsampledGaussian(double sigma, double p,
                                                  Adjacency direction,
                                                  const PldOptions& options = {});

// T-fold convolution by repeated squaring with FFT convolution. Tail
// masses accumulate additively (pessimistically); the grid is re-centered
// after every convolution, spending at most the remaining tail budget.
// Deterministic for a fixed grid regardless of thread count.
PrivacyLossDistribution SelfCompose(const PrivacyLossDistribution& pld, long T,
                                    const PldOptions& options = {});

// Convolution of two lock-step PLDs (same direction and spacing); the
// two-factor form of the composition product.
PrivacyLossDistribution Compose(const PrivacyLossDistribution& a,
                                const PrivacyLossDistribution& b,
                                const PldOptions& options = {});

// The exact trade-off polyline of the discretized pair a PLD encodes:
// type-I/type-II error pairs of the likelihood-ratio tests, swept over
// loss thresholds. For an add-direction PLD this approximates f, for a
// remove-direction PLD f^{-1}.
TradeoffFunction TradeoffFromPld(const PrivacyLossDistribution& pld);

// The symmetrized trade-off bound min{f, f^{-1}}** assembled from the two
// composed directions: each PLD yields the exact trade-off polyline of its
// discretized pair via the likelihood-ratio test, the two curves are
// min-combined, convexified, and symmetrized.
TradeoffFunction PldToTradeoff(const PrivacyLossDistribution& add,
                               const PrivacyLossDistribution& remove);

// One-call oracle for (p G_{1/sigma} + (1-p) Id)^{(x) T} symmetrized.
TradeoffFunction ComposeSubsampledGaussian(double sigma, double p, long T,
                                           const PldOptions& options = {});

// The asymptotic separation between the moments accountant and the CLT
// duality at a common eps:
//   delta_MA - delta_CLT >= e^eps * Phi(-eps/mu - mu/2)  (T large).
struct GapCheckResult {
  double delta_ma;
  double delta_clt;
  double lower_bound;
  double mu;

  bool Holds(double tol) const {
    return delta_ma - delta_clt >= lower_bound - tol;
  }
};

GapCheckResult GapCheck(double sigma, double p, long T, double eps);

}  // namespace gdp

#endif  // GDP_PLD_H_
