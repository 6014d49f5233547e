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
#ifndef GDP_OPTIMIZERS_H_
#define GDP_OPTIMIZERS_H_

#include <cstdint>
#include <string>
#include <vector>

namespace gdp {

struct TrainConfig {
  double eta = 0.1;      // learning rate
  double R = 1.0;        // per-example gradient norm bound
  double sigma = 1.0;    // noise scale, multiplies R
  double p = 0.01;       // Poisson subsampling probability
  long T = 100;          // iterations
  double beta1 = 0.9;    // first-moment decay (NoisyAdam)
  double beta2 = 0.999;  // second-moment decay (NoisyAdam)
  double xi = 1e-8;      // Adam stabilizer
  std::uint64_t seed = 1;

  void Validate() const;
};

struct OptimizerState {
  std::vector<double> theta;
  std::vector<double> m;  // first moment, zero at step 0
  std::vector<double> u;  // second moment, zero at step 0
  long step = 0;

  static OptimizerState Zero(std::vector<double> theta0);
};

// One example per row, label carried separately (last column of the
// delimited input format).
struct Dataset {
  std::vector<std::vector<double>> features;
  std::vector<double> labels;

  std::size_t size() const { return features.size(); }
  std::size_t dim() const { return features.empty() ? 0 : features[0].size(); }
};

// Parses delimited numeric text: one example per line, label last column;
// comma, semicolon, space or tab delimited; '#' starts a comment line.
// Throws std::invalid_argument on malformed input.
Dataset LoadDelimitedDataset(const std::string& path);

// Per-example loss with gradient, pluggable into the optimizers.
class ExampleLoss {
 public:
  virtual ~ExampleLoss() = default;
  virtual double Value(const std::vector<double>& theta,
                       const std::vector<double>& x, double y) const = 0;
  virtual void Gradient(const std::vector<double>& theta,
                        const std::vector<double>& x, double y,
                        std::vector<double>& out) const = 0;
};

// Binary logistic loss with labels in {0, 1}.
class LogisticLoss final : public ExampleLoss {
 public:
  double Value(const std::vector<double>& theta, const std::vector<double>& x,
               double y) const override;
  void Gradient(const std::vector<double>& theta, const std::vector<double>& x,
                double y, std::vector<double>& out) const override;
};

// 0.5 * ||theta - x||^2 per example; handy closed-form test loss.
class QuadraticLoss final : public ExampleLoss {
 public:
  double Value(const std::vector<double>& theta, const std::vector<double>& x,
               double y) const override;
  void Gradient(const std::vector<double>& theta, const std::vector<double>& x,
                double y, std::vector<double>& out) const override;
};

// Deterministic counter-based uniform/normal draws: a fixed function of
// (seed, stream, counter), so trajectories do not depend on thread count
// or call interleaving.
double CounterUniform(std::uint64_t seed, std::uint64_t stream,
                      std::uint64_t counter);
double CounterNormal(std::uint64_t seed, std::uint64_t stream,
                     std::uint64_t counter);

// Poisson subsample of {0, ..., n-1}: each index enters independently with
// probability p. May be empty.
std::vector<std::size_t> PoissonSubsample(std::size_t n, double p,
                                          std::uint64_t seed, long step);

// v / max{1, ||v||_2 / R}: norm capped at R, direction preserved.
std::vector<double> Clip(const std::vector<double>& v, double R);
void ClipInPlace(std::vector<double>& v, double R);

// One NoisySGD step: clip per-example gradients over the batch, sum, add
// N(0, (sigma R)^2 I), divide by |batch|, take the gradient step. An empty
// batch skips the update but still advances the step counter (the
// accountant counts mechanism invocations, not data touched).
void NoisySgdStep(OptimizerState& state, const Dataset& data,
                  const ExampleLoss& loss,
                  const std::vector<std::size_t>& batch,
                  const TrainConfig& config);

// One NoisyAdam step: the same noisy gradient feeds the moment
// recurrences m, u and the update theta -= eta * m / (sqrt(u) + xi).
// Post-processing of the noisy gradient stream; no extra privacy cost.
void NoisyAdamStep(OptimizerState& state, const Dataset& data,
                   const ExampleLoss& loss,
                   const std::vector<std::size_t>& batch,
                   const TrainConfig& config);

struct PrivacyReport {
  std::string method;  // "clt"
  double mu = 0.0;     // +inf when sigma = 0 (not private)
  double eps = 0.0;
  double delta = 0.0;
  bool is_private = true;
  double sigma = 0.0;
  double p = 0.0;
  long T = 0;
};

enum class OptimizerKind { kSgd, kAdam };

struct RunResult {
  std::vector<double> theta;
  std::vector<double> loss_trace;  // average training loss per step
  PrivacyReport report;
};

// Runs T optimizer steps from theta = 0 and attaches the CLT privacy
// report at the given delta. sigma = 0 is flagged non-private; p = 1 uses
// the exact Gaussian composition mu = sqrt(T)/sigma.
RunResult Run(const Dataset& data, const ExampleLoss& loss,
              const TrainConfig& config, OptimizerKind kind,
              double report_delta);

}  // namespace gdp

#endif  // GDP_OPTIMIZERS_H_
