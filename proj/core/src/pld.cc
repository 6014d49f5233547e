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
#include "gdp/pld.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <stdexcept>
#include <string>

#include <fftw3.h>

#include "gdp/dual.h"
#include "gdp/errors.h"
#include "gdp/functionals.h"
#include "gdp/moments.h"
#include "gdp/normal.h"

namespace gdp {
namespace {

// Fraction of the total tail budget a single discretization step may
// truncate per side; composition inherits one such share per factor, so
// the headroom supports T up to ~10^6 within half the budget.
constexpr double kSingleStepShare = 1e-7;

// x such that the mixture/base log-likelihood ratio equals t, i.e. the
// inverse of l(x) = log(1 + p (e^{x/sigma - 1/(2 sigma^2)} - 1)).
// -infinity for t at or below the ratio's infimum log(1-p).
double XFromLoss(double t, double sigma, double p) {
  const double e = std::expm1(t) / p;  // e^{x/sigma - 1/(2 sigma^2)} - 1
  if (e <= -1.0) return -std::numeric_limits<double>::infinity();
  return sigma * std::log1p(e) + 0.5 / sigma;
}

double MixtureCdf(double x, double sigma, double p) {
  return p * NormalCdf(x - 1.0 / sigma) + (1.0 - p) * NormalCdf(x);
}

double MixtureSf(double x, double sigma, double p) {
  return p * NormalCdf(1.0 / sigma - x) + (1.0 - p) * NormalCdf(-x);
}

// CDF / survival of the privacy loss under the numerator (A) and
// denominator (B) measures of the chosen adjacency direction.
struct LossLaw {
  double sigma;
  double p;
  Adjacency direction;

  // A(L <= t).
  double CdfA(double t) const {
    if (direction == Adjacency::kAdd) {
      const double x = XFromLoss(t, sigma, p);
      if (x == -std::numeric_limits<double>::infinity()) return 0.0;
      return MixtureCdf(x, sigma, p);
    }
    const double x = XFromLoss(-t, sigma, p);
    if (x == -std::numeric_limits<double>::infinity()) return 1.0;
    return NormalCdf(-x);
  }
  // A(L > t), via complementary CDFs to keep tiny tails accurate.
  double SfA(double t) const {
    if (direction == Adjacency::kAdd) {
      const double x = XFromLoss(t, sigma, p);
      if (x == -std::numeric_limits<double>::infinity()) return 1.0;
      return MixtureSf(x, sigma, p);
    }
    const double x = XFromLoss(-t, sigma, p);
    if (x == -std::numeric_limits<double>::infinity()) return 0.0;
    return NormalCdf(x);
  }
  // B(L <= t) and B(L > t).
  double CdfB(double t) const {
    if (direction == Adjacency::kAdd) {
      const double x = XFromLoss(t, sigma, p);
      if (x == -std::numeric_limits<double>::infinity()) return 0.0;
      return NormalCdf(x);
    }
    const double x = XFromLoss(-t, sigma, p);
    if (x == -std::numeric_limits<double>::infinity()) return 1.0;
    return MixtureSf(x, sigma, p);
  }
  double SfB(double t) const {
    if (direction == Adjacency::kAdd) {
      const double x = XFromLoss(t, sigma, p);
      if (x == -std::numeric_limits<double>::infinity()) return 1.0;
      return NormalCdf(-x);
    }
    const double x = XFromLoss(-t, sigma, p);
    if (x == -std::numeric_limits<double>::infinity()) return 0.0;
    return MixtureCdf(x, sigma, p);
  }
};

std::size_t NextPow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

// Linear convolution of two mass arrays via FFTW r2c/c2r transforms.
// Deterministic (FFTW_ESTIMATE plans); tiny negative round-off is clamped.
std::vector<double> Convolve(const std::vector<double>& a,
                             const std::vector<double>& b) {
  const std::size_t out_len = a.size() + b.size() - 1;
  const std::size_t n = NextPow2(out_len);
  const std::size_t nc = n / 2 + 1;
  double* buf_a = fftw_alloc_real(n);
  double* buf_b = fftw_alloc_real(n);
  fftw_complex* spec_a = fftw_alloc_complex(nc);
  fftw_complex* spec_b = fftw_alloc_complex(nc);
  std::fill(buf_a, buf_a + n, 0.0);
  std::fill(buf_b, buf_b + n, 0.0);
  std::copy(a.begin(), a.end(), buf_a);
  std::copy(b.begin(), b.end(), buf_b);
  fftw_plan fwd_a = fftw_plan_dft_r2c_1d(static_cast<int>(n), buf_a, spec_a,
                                         FFTW_ESTIMATE);
  fftw_plan fwd_b = fftw_plan_dft_r2c_1d(static_cast<int>(n), buf_b, spec_b,
                                         FFTW_ESTIMATE);
  fftw_execute(fwd_a);
  fftw_execute(fwd_b);
  for (std::size_t i = 0; i < nc; ++i) {
    const double re =
        spec_a[i][0] * spec_b[i][0] - spec_a[i][1] * spec_b[i][1];
    const double im =
        spec_a[i][0] * spec_b[i][1] + spec_a[i][1] * spec_b[i][0];
    spec_a[i][0] = re;
    spec_a[i][1] = im;
  }
  fftw_plan inv = fftw_plan_dft_c2r_1d(static_cast<int>(n), spec_a, buf_a,
                                       FFTW_ESTIMATE);
  fftw_execute(inv);
  std::vector<double> out(out_len);
  const double scale = 1.0 / static_cast<double>(n);
  for (std::size_t i = 0; i < out_len; ++i) {
    out[i] = std::max(0.0, buf_a[i] * scale);
  }
  fftw_destroy_plan(fwd_a);
  fftw_destroy_plan(fwd_b);
  fftw_destroy_plan(inv);
  fftw_free(buf_a);
  fftw_free(buf_b);
  fftw_free(spec_a);
  fftw_free(spec_b);
  return out;
}

struct TrimBudget {
  double low = 0.0;
  double high = 0.0;
};

// Pairwise convolution of PLDs with pessimistic tail bookkeeping: any
// product involving an upper-tail event stays an upper-tail (+infinity
// loss) event; products involving only a lower-tail event join the lower
// tail, to be re-entered at the lowest kept grid point later.
PrivacyLossDistribution ConvolvePld(const PrivacyLossDistribution& a,
                                    const PrivacyLossDistribution& b,
                                    const PldOptions& options,
                                    TrimBudget& budget) {
  std::vector<double> masses = Convolve(a.masses(), b.masses());
  const double tha = a.tail_mass_high(), thb = b.tail_mass_high();
  const double tla = a.tail_mass_low(), tlb = b.tail_mass_low();
  double tail_high = tha + thb - tha * thb;
  double tail_low = (1.0 - tha) * (1.0 - thb) -
                    (1.0 - tha - tla) * (1.0 - thb - tlb);
  std::int64_t origin = a.origin_index() + b.origin_index();

  // Trim both ends while the budget allows; zero cells are free.
  std::size_t lo = 0, hi = masses.size();
  double spend_low = 0.0, spend_high = 0.0;
  while (lo < hi && spend_low + masses[lo] <= budget.low) {
    spend_low += masses[lo];
    ++lo;
  }
  while (hi > lo && spend_high + masses[hi - 1] <= budget.high) {
    spend_high += masses[hi - 1];
    --hi;
  }
  budget.low -= spend_low;
  budget.high -= spend_high;
  tail_low += spend_low;
  tail_high += spend_high;
  origin += static_cast<std::int64_t>(lo);
  masses.erase(masses.begin() + hi, masses.end());
  masses.erase(masses.begin(), masses.begin() + lo);
  if (masses.size() > options.max_grid_size) {
    throw TailBudgetError(
        "composed loss grid needs " + std::to_string(masses.size()) +
        " cells; the tail budget cannot pay for more trimming");
  }
  return PrivacyLossDistribution(origin, a.spacing(), std::move(masses),
                                 tail_low, tail_high, a.direction());
}

// Exact trade-off polyline of the discretized pair behind a PLD: rejection
// regions of the likelihood-ratio test, swept from the largest loss down.
// Returns hull-cleaned vertices.
GridSpec CurveFromPld(const PrivacyLossDistribution& pld) {
  std::vector<double> alphas;
  std::vector<double> betas;
  alphas.reserve(pld.masses().size() + 4);
  betas.reserve(pld.masses().size() + 4);
  double alpha = 0.0;
  // The +infinity atom is rejected by every test: free type-II reduction.
  double beta = 1.0 - pld.tail_mass_high();
  alphas.push_back(0.0);
  betas.push_back(beta);
  for (std::size_t r = pld.masses().size(); r-- > 0;) {
    const double a = pld.masses()[r];
    if (a == 0.0) continue;
    const double loss = pld.LossAt(r);
    alpha += a * std::exp(-loss);
    beta -= a;
    alphas.push_back(std::min(alpha, 1.0));
    betas.push_back(std::max(beta, 0.0));
  }
  if (pld.tail_mass_low() > 0.0) {
    // Lower-tail mass re-enters at the lowest kept loss (rounded up).
    const double loss = pld.LossAt(0);
    alpha += pld.tail_mass_low() * std::exp(-loss);
    beta -= pld.tail_mass_low();
    alphas.push_back(std::min(alpha, 1.0));
    betas.push_back(std::max(beta, 0.0));
  }
  alphas.push_back(1.0);
  betas.push_back(0.0);
  return LowerConvexHull(alphas, betas);
}

}  // namespace

PrivacyLossDistribution::PrivacyLossDistribution(
    std::int64_t origin_index, double spacing, std::vector<double> masses,
    double tail_mass_low, double tail_mass_high, Adjacency direction)
    : origin_index_(origin_index),
      spacing_(spacing),
      masses_(std::move(masses)),
      tail_mass_low_(tail_mass_low),
      tail_mass_high_(tail_mass_high),
      direction_(direction) {
  if (!(spacing_ > 0.0)) throw std::invalid_argument("spacing must be > 0");
  if (masses_.empty()) throw std::invalid_argument("masses must be non-empty");
  if (!(tail_mass_low_ >= 0.0 && tail_mass_high_ >= 0.0)) {
    throw std::invalid_argument("tail masses must be non-negative");
  }
}

double PrivacyLossDistribution::TotalMass() const {
  // Kahan summation: the conservation invariant is checked at 1e-12 and
  // the arrays run to ~1e5 cells.
  double total = 0.0;
  double carry = 0.0;
  for (double m : masses_) {
    const double y = m - carry;
    const double t = total + y;
    carry = (t - total) - y;
    total = t;
  }
  return total;
}

double PrivacyLossDistribution::Mean() const {
  double mean = 0.0;
  for (std::size_t i = 0; i < masses_.size(); ++i) {
    mean += masses_[i] * LossAt(i);
  }
  return mean;
}

double PrivacyLossDistribution::Variance() const {
  const double mean = Mean();
  double var = 0.0;
  for (std::size_t i = 0; i < masses_.size(); ++i) {
    const double d = LossAt(i) - mean;
    var += masses_[i] * d * d;
  }
  return var;
}

PrivacyLossDistribution PldFromSubsampledGaussian(double sigma, double p,
                                                  Adjacency direction,
                                                  const PldOptions& options) {
  if (!(sigma > 0.0)) throw std::invalid_argument("sigma must be positive");
  if (sigma < kSigmaFloor) {
    throw InfeasibleError("sigma below the accounting floor " +
                          std::to_string(kSigmaFloor));
  }
  if (!(p > 0.0 && p <= 1.0)) {
    throw std::invalid_argument("subsampling probability must lie in (0, 1]");
  }
  if (!(options.spacing > 0.0)) {
    throw std::invalid_argument("spacing must be positive");
  }
  const double h = options.spacing;
  const double share = kSingleStepShare * options.tail_budget;
  const double x_tail = -NormalQuantile(share);
  const LossLaw law{sigma, p, direction};

  // Grid range of the loss under the numerator measure. Bounded support
  // ends sit one cell outside the support so no mass is lost there; the
  // unbounded ends are truncated where the numerator mass drops below the
  // single-step share.
  std::int64_t k_min, k_max;
  if (direction == Adjacency::kAdd) {
    const double loss_hi =
        std::log1p(p * std::expm1((x_tail + 1.0 / sigma) / sigma -
                                  0.5 / (sigma * sigma)));
    k_max = static_cast<std::int64_t>(std::ceil(loss_hi / h));
    if (p < 1.0) {
      k_min = static_cast<std::int64_t>(std::floor(std::log1p(-p) / h));
    } else {
      const double loss_lo = 0.5 / (sigma * sigma) - x_tail / sigma;
      k_min = static_cast<std::int64_t>(std::floor(loss_lo / h));
    }
  } else {
    const double loss_lo =
        -std::log1p(p * std::expm1(x_tail / sigma - 0.5 / (sigma * sigma)));
    k_min = static_cast<std::int64_t>(std::floor(loss_lo / h));
    if (p < 1.0) {
      k_max = static_cast<std::int64_t>(std::ceil(-std::log1p(-p) / h));
    } else {
      const double loss_hi = x_tail / sigma + 0.5 / (sigma * sigma);
      k_max = static_cast<std::int64_t>(std::ceil(loss_hi / h));
    }
  }
  if (k_max < k_min) k_max = k_min;
  const std::size_t cells = static_cast<std::size_t>(k_max - k_min + 1);
  if (cells > options.max_grid_size) {
    throw TailBudgetError("single-step loss grid needs " +
                          std::to_string(cells) + " cells at spacing " +
                          std::to_string(h));
  }

  // Dominating-pair discretization: choose grid masses so the discrete
  // pair's hockey-stick divergence delta(eps) equals the continuous one at
  // every grid eps (and, being linear in e^eps between knots while the
  // true delta is convex in e^eps, dominates it everywhere). This keeps
  // the bound valid without the O(spacing) per-step bias that plain
  // round-up discretization accumulates across T compositions.
  //
  // With D_j = delta(j h) and S_j = (D_{j-1} - D_j) / (1 - e^{-h}), the
  // masses are a_j = S_j - e^{-h} S_{j+1}, the +infinity atom is D_{kmax},
  // and D_{j-1} - D_j expands into cell probabilities
  //   cellA_j - e^{(j-1)h} (cellB_j - (e^h - 1) B(L > j h)),
  // which avoids forming differences of near-equal deltas.
  std::vector<double> s(cells + 1, 0.0);
  {
    double cdf_a_prev = law.CdfA((k_min - 1) * h);
    double cdf_b_prev = law.CdfB((k_min - 1) * h);
    double sf_a_prev = law.SfA((k_min - 1) * h);
    double sf_b_prev = law.SfB((k_min - 1) * h);
    const double expm1_h = std::expm1(h);
    const double inv_one_minus_exp_mh = 1.0 / -std::expm1(-h);
    for (std::size_t i = 0; i < cells; ++i) {
      const std::int64_t j = k_min + static_cast<std::int64_t>(i);
      const double cdf_a = law.CdfA(j * h);
      const double cdf_b = law.CdfB(j * h);
      const double sf_a = law.SfA(j * h);
      const double sf_b = law.SfB(j * h);
      // Difference whichever side keeps full relative precision; the far
      // tails otherwise drown in the 1 - tiny cancellation.
      const double cell_a =
          cdf_a <= 0.5 ? cdf_a - cdf_a_prev : sf_a_prev - sf_a;
      const double cell_b =
          cdf_b <= 0.5 ? cdf_b - cdf_b_prev : sf_b_prev - sf_b;
      const double gap =
          cell_a - std::exp((j - 1) * h) * (cell_b - expm1_h * sf_b);
      s[i] = std::max(0.0, gap) * inv_one_minus_exp_mh;
      cdf_a_prev = cdf_a;
      cdf_b_prev = cdf_b;
      sf_a_prev = sf_a;
      sf_b_prev = sf_b;
    }
  }
  const double exp_mh = std::exp(-h);
  std::vector<double> masses(cells);
  for (std::size_t i = 0; i < cells; ++i) {
    masses[i] = std::max(0.0, s[i] - exp_mh * s[i + 1]);
  }
  // Telescoping gives sum(masses) + D(e_kmax) = S_kmin + D(e_kmin), so the
  // below-grid remainder follows from the two anchors alone, free of the
  // accumulated summation noise of the 10^4-cell total.
  const double tail_high = std::max(
      0.0, law.SfA(k_max * h) - std::exp(k_max * h) * law.SfB(k_max * h));
  const double d_min =
      law.SfA(k_min * h) - std::exp(k_min * h) * law.SfB(k_min * h);
  const double tail_low = std::max(0.0, 1.0 - s[0] - d_min);
  if (tail_low > 64.0 * share + 1e-14 || tail_high > 64.0 * share + 1e-14) {
    throw TailBudgetError("single-step truncation " +
                          std::to_string(tail_low + tail_high) +
                          " exceeds the per-step share");
  }
  return PrivacyLossDistribution(k_min, h, std::move(masses), tail_low,
                                 tail_high, direction);
}

PrivacyLossDistribution SelfCompose(const PrivacyLossDistribution& pld, long T,
                                    const PldOptions& options) {
  if (T < 1) throw std::invalid_argument("composition count must be >= 1");
  if (T == 1) return pld;
  // The single-step truncations are inherited by every factor; what is
  // left of the budget pays for the re-centering trims. A trim applied to
  // a k-fold intermediate is inherited by T/k factors of the final
  // product, so each convolution's allowance scales with its fold count.
  const double spent = pld.tail_mass_low() + pld.tail_mass_high();
  const double inherited = static_cast<double>(T) * spent;
  if (inherited > 0.5 * options.tail_budget) {
    throw TailBudgetError(
        "single-step truncation " + std::to_string(spent) + " x T = " +
        std::to_string(T) + " factors exceeds half the tail budget");
  }
  int convolutions = 0;
  for (long t = T; t > 1; t >>= 1) convolutions += 2;
  const double budget_per_conv =
      std::max(0.0, options.tail_budget - inherited) / (convolutions + 1);
  const auto allowance = [&](long folds) {
    return 0.5 * budget_per_conv * static_cast<double>(folds) /
           static_cast<double>(T);
  };
  TrimBudget budget;

  const PrivacyLossDistribution* base = &pld;
  PrivacyLossDistribution base_storage = pld;
  long base_folds = 1;
  std::unique_ptr<PrivacyLossDistribution> acc;
  long acc_folds = 0;
  long t = T;
  while (true) {
    if (t & 1) {
      budget.low = budget.high = allowance(acc_folds + base_folds);
      acc = std::make_unique<PrivacyLossDistribution>(
          acc ? ConvolvePld(*acc, *base, options, budget) : *base);
      acc_folds += base_folds;
    }
    t >>= 1;
    if (t == 0) break;
    budget.low = budget.high = allowance(2 * base_folds);
    base_storage = ConvolvePld(*base, *base, options, budget);
    base = &base_storage;
    base_folds *= 2;
  }
  return *acc;
}

PrivacyLossDistribution Compose(const PrivacyLossDistribution& a,
                                const PrivacyLossDistribution& b,
                                const PldOptions& options) {
  if (a.direction() != b.direction()) {
    throw std::invalid_argument("Compose needs PLDs of the same direction");
  }
  if (a.spacing() != b.spacing()) {
    throw std::invalid_argument("Compose needs PLDs on the same loss grid");
  }
  TrimBudget budget;
  const double spent = a.tail_mass_low() + a.tail_mass_high() +
                       b.tail_mass_low() + b.tail_mass_high();
  budget.low = budget.high =
      0.5 * std::max(0.0, options.tail_budget - spent);
  return ConvolvePld(a, b, options, budget);
}

TradeoffFunction TradeoffFromPld(const PrivacyLossDistribution& pld) {
  GridSpec curve = CurveFromPld(pld);
  return TradeoffFunction::Grid(std::move(curve.alphas),
                                std::move(curve.betas));
}

TradeoffFunction PldToTradeoff(const PrivacyLossDistribution& add,
                               const PrivacyLossDistribution& remove) {
  if (add.direction() != Adjacency::kAdd ||
      remove.direction() != Adjacency::kRemove) {
    throw std::invalid_argument(
        "PldToTradeoff needs one add- and one remove-direction PLD");
  }
  const GridSpec curve_add = CurveFromPld(add);
  const GridSpec curve_remove = CurveFromPld(remove);
  const TradeoffFunction f_add =
      TradeoffFunction::Grid(curve_add.alphas, curve_add.betas);
  const TradeoffFunction f_remove =
      TradeoffFunction::Grid(curve_remove.alphas, curve_remove.betas);
  // Pointwise min over the union of knots, then its convex envelope.
  std::vector<double> knots;
  knots.reserve(curve_add.alphas.size() + curve_remove.alphas.size());
  std::merge(curve_add.alphas.begin(), curve_add.alphas.end(),
             curve_remove.alphas.begin(), curve_remove.alphas.end(),
             std::back_inserter(knots));
  knots.erase(std::unique(knots.begin(), knots.end()), knots.end());
  std::vector<double> mins(knots.size());
  for (std::size_t i = 0; i < knots.size(); ++i) {
    mins[i] = std::min(Eval(f_add, knots[i]), Eval(f_remove, knots[i]));
  }
  GridSpec hull = LowerConvexHull(knots, mins);
  return Symmetrize(
      TradeoffFunction::Grid(std::move(hull.alphas), std::move(hull.betas)));
}

TradeoffFunction ComposeSubsampledGaussian(double sigma, double p, long T,
                                           const PldOptions& options) {
  const PrivacyLossDistribution add =
      SelfCompose(PldFromSubsampledGaussian(sigma, p, Adjacency::kAdd, options),
                  T, options);
  const PrivacyLossDistribution remove = SelfCompose(
      PldFromSubsampledGaussian(sigma, p, Adjacency::kRemove, options), T,
      options);
  return PldToTradeoff(add, remove);
}

GapCheckResult GapCheck(double sigma, double p, long T, double eps) {
  MomentsAccountantConfig config;
  config.sigma = sigma;
  config.p = p;
  config.T = T;
  const MomentsAccountant accountant(config);
  GapCheckResult result;
  result.mu = CltMuSubsampledGaussian(p, T, sigma);
  result.delta_ma = accountant.Delta(eps, LambdaMode::kContinuous);
  result.delta_clt = DeltaFromEps(result.mu, eps);
  result.lower_bound =
      result.mu == 0.0
          ? 0.0
          : std::exp(eps +
                     LogNormalCdf(-eps / result.mu - 0.5 * result.mu));
  return result;
}

}  // namespace gdp
