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
#include "gdp/optimizers.h"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "gdp/dual.h"
#include "gdp/functionals.h"
#include "gdp/normal.h"

namespace gdp {
namespace {

constexpr std::uint64_t kSubsampleStream = 0x5353414d504c45ULL;  // "SSAMPLE"
constexpr std::uint64_t kNoiseStream = 0x4e4f495345ULL;          // "NOISE"

std::uint64_t SplitMix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t CounterBits(std::uint64_t seed, std::uint64_t stream,
                          std::uint64_t counter) {
  return SplitMix64(SplitMix64(seed ^ SplitMix64(stream)) ^ counter);
}

double DotProduct(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// The shared mechanism of both optimizers: the clipped per-example
// gradient sum plus sigma*R Gaussian noise, divided by the batch size.
// Returns false (and leaves `out` untouched) on an empty batch.
bool NoisyGradient(const OptimizerState& state, const Dataset& data,
                   const ExampleLoss& loss,
                   const std::vector<std::size_t>& batch,
                   const TrainConfig& config, std::vector<double>& out) {
  if (batch.empty()) return false;
  const std::size_t dim = state.theta.size();
  out.assign(dim, 0.0);
  std::vector<double> grad(dim);
  for (std::size_t index : batch) {
    loss.Gradient(state.theta, data.features[index], data.labels[index], grad);
    ClipInPlace(grad, config.R);
    for (std::size_t j = 0; j < dim; ++j) out[j] += grad[j];
  }
  if (config.sigma > 0.0) {
    const std::uint64_t base =
        static_cast<std::uint64_t>(state.step) * static_cast<std::uint64_t>(dim);
    for (std::size_t j = 0; j < dim; ++j) {
      out[j] += config.sigma * config.R *
                CounterNormal(config.seed, kNoiseStream, base + j);
    }
  }
  const double inv = 1.0 / static_cast<double>(batch.size());
  for (std::size_t j = 0; j < dim; ++j) out[j] *= inv;
  return true;
}

double AverageLoss(const OptimizerState& state, const Dataset& data,
                   const ExampleLoss& loss) {
  double total = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    total += loss.Value(state.theta, data.features[i], data.labels[i]);
  }
  return total / static_cast<double>(data.size());
}

}  // namespace

void TrainConfig::Validate() const {
  if (!(R > 0.0)) throw std::invalid_argument("clipping bound R must be > 0");
  if (!(sigma >= 0.0)) throw std::invalid_argument("sigma must be >= 0");
  if (!(p > 0.0 && p <= 1.0)) {
    throw std::invalid_argument("subsampling probability must lie in (0, 1]");
  }
  if (T < 0) throw std::invalid_argument("iteration count must be >= 0");
  if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0)) {
    throw std::invalid_argument("momentum decays must lie in [0, 1)");
  }
  if (!(xi > 0.0)) throw std::invalid_argument("xi must be > 0");
}

OptimizerState OptimizerState::Zero(std::vector<double> theta0) {
  OptimizerState state;
  state.m.assign(theta0.size(), 0.0);
  state.u.assign(theta0.size(), 0.0);
  state.theta = std::move(theta0);
  state.step = 0;
  return state;
}

Dataset LoadDelimitedDataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open dataset file: " + path);
  Dataset data;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    for (char& c : line) {
      if (c == ',' || c == ';' || c == '\t') c = ' ';
    }
    std::istringstream row(line);
    std::vector<double> values;
    std::string token;
    while (row >> token) {
      if (token[0] == '#') break;
      try {
        std::size_t used = 0;
        values.push_back(std::stod(token, &used));
        if (used != token.size()) throw std::invalid_argument(token);
      } catch (const std::exception&) {
        throw std::invalid_argument("dataset line " +
                                    std::to_string(line_number) +
                                    ": bad number '" + token + "'");
      }
    }
    if (values.empty()) continue;
    if (values.size() < 2) {
      throw std::invalid_argument("dataset line " +
                                  std::to_string(line_number) +
                                  ": need features plus a trailing label");
    }
    const double label = values.back();
    values.pop_back();
    if (!data.features.empty() && values.size() != data.dim()) {
      throw std::invalid_argument("dataset line " +
                                  std::to_string(line_number) +
                                  ": inconsistent feature count");
    }
    data.features.push_back(std::move(values));
    data.labels.push_back(label);
  }
  if (data.features.empty()) {
    throw std::invalid_argument("dataset is empty: " + path);
  }
  return data;
}

double LogisticLoss::Value(const std::vector<double>& theta,
                           const std::vector<double>& x, double y) const {
  const double s = DotProduct(theta, x);
  // -y log(sig(s)) - (1-y) log(1 - sig(s)), written via log1p(exp(.)).
  const double log1p_exp = s > 0.0 ? s + std::log1p(std::exp(-s))
                                   : std::log1p(std::exp(s));
  return log1p_exp - y * s;
}

void LogisticLoss::Gradient(const std::vector<double>& theta,
                            const std::vector<double>& x, double y,
                            std::vector<double>& out) const {
  const double s = DotProduct(theta, x);
  const double sig = 1.0 / (1.0 + std::exp(-s));
  out.resize(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) out[j] = (sig - y) * x[j];
}

double QuadraticLoss::Value(const std::vector<double>& theta,
                            const std::vector<double>& x, double) const {
  double s = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    const double d = theta[j] - x[j];
    s += d * d;
  }
  return 0.5 * s;
}

void QuadraticLoss::Gradient(const std::vector<double>& theta,
                             const std::vector<double>& x, double,
                             std::vector<double>& out) const {
  out.resize(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) out[j] = theta[j] - x[j];
}

double CounterUniform(std::uint64_t seed, std::uint64_t stream,
                      std::uint64_t counter) {
  // (k + 0.5) / 2^64: open interval, symmetric.
  return (static_cast<double>(CounterBits(seed, stream, counter)) + 0.5) *
         0x1.0p-64;
}

double CounterNormal(std::uint64_t seed, std::uint64_t stream,
                     std::uint64_t counter) {
  return NormalQuantile(CounterUniform(seed, stream, counter));
}

std::vector<std::size_t> PoissonSubsample(std::size_t n, double p,
                                          std::uint64_t seed, long step) {
  if (!(p > 0.0 && p <= 1.0)) {
    throw std::invalid_argument("subsampling probability must lie in (0, 1]");
  }
  std::vector<std::size_t> batch;
  if (p == 1.0) {
    batch.resize(n);
    for (std::size_t i = 0; i < n; ++i) batch[i] = i;
    return batch;
  }
  const std::uint64_t stream = kSubsampleStream + static_cast<std::uint64_t>(step);
  for (std::size_t i = 0; i < n; ++i) {
    if (CounterUniform(seed, stream, i) < p) batch.push_back(i);
  }
  return batch;
}

std::vector<double> Clip(const std::vector<double>& v, double R) {
  std::vector<double> out = v;
  ClipInPlace(out, R);
  return out;
}

void ClipInPlace(std::vector<double>& v, double R) {
  if (!(R > 0.0)) throw std::invalid_argument("clipping bound R must be > 0");
  const double norm = std::sqrt(DotProduct(v, v));
  if (norm <= R) return;
  const double scale = R / norm;
  for (double& x : v) x *= scale;
}

void NoisySgdStep(OptimizerState& state, const Dataset& data,
                  const ExampleLoss& loss,
                  const std::vector<std::size_t>& batch,
                  const TrainConfig& config) {
  std::vector<double> gradient;
  if (NoisyGradient(state, data, loss, batch, config, gradient)) {
    for (std::size_t j = 0; j < state.theta.size(); ++j) {
      state.theta[j] -= config.eta * gradient[j];
    }
  }
  ++state.step;
}

void NoisyAdamStep(OptimizerState& state, const Dataset& data,
                   const ExampleLoss& loss,
                   const std::vector<std::size_t>& batch,
                   const TrainConfig& config) {
  std::vector<double> gradient;
  if (NoisyGradient(state, data, loss, batch, config, gradient)) {
    for (std::size_t j = 0; j < state.theta.size(); ++j) {
      const double v = gradient[j];
      state.m[j] = config.beta1 * state.m[j] + (1.0 - config.beta1) * v;
      state.u[j] = config.beta2 * state.u[j] + (1.0 - config.beta2) * v * v;
      state.theta[j] -=
          config.eta * state.m[j] / (std::sqrt(state.u[j]) + config.xi);
    }
  }
  ++state.step;
}

RunResult Run(const Dataset& data, const ExampleLoss& loss,
              const TrainConfig& config, OptimizerKind kind,
              double report_delta) {
  config.Validate();
  if (data.size() == 0) throw std::invalid_argument("dataset is empty");

  RunResult result;
  OptimizerState state =
      OptimizerState::Zero(std::vector<double>(data.dim(), 0.0));
  result.loss_trace.reserve(static_cast<std::size_t>(config.T));
  for (long t = 0; t < config.T; ++t) {
    const std::vector<std::size_t> batch =
        PoissonSubsample(data.size(), config.p, config.seed, t);
    if (kind == OptimizerKind::kSgd) {
      NoisySgdStep(state, data, loss, batch, config);
    } else {
      NoisyAdamStep(state, data, loss, batch, config);
    }
    result.loss_trace.push_back(AverageLoss(state, data, loss));
  }
  result.theta = std::move(state.theta);

  PrivacyReport& report = result.report;
  report.method = "clt";
  report.sigma = config.sigma;
  report.p = config.p;
  report.T = config.T;
  report.delta = report_delta;
  if (config.sigma == 0.0) {
    report.mu = std::numeric_limits<double>::infinity();
    report.eps = std::numeric_limits<double>::infinity();
    report.is_private = false;
  } else if (config.T == 0) {
    report.mu = 0.0;
    report.eps = 0.0;
  } else {
    report.mu = config.p == 1.0
                    ? std::sqrt(static_cast<double>(config.T)) / config.sigma
                    : CltMuSubsampledGaussian(config.p, config.T, config.sigma);
    report.eps = EpsFromDelta(report.mu, report_delta);
  }
  return result;
}

}  // namespace gdp
