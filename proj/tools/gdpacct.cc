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
//
// gdpacct: privacy accounting for noisy optimizers in the f-DP framework.
//
// Subcommands:
//   account      CLT and moments-accountant (eps, delta) reports
//   calibrate    smallest noise scale matching an (eps, delta) target
//   tradeoff-csv trade-off curves as CSV for plotting
//   verify       numeric cross-checks of the accountant against the
//                composition oracle
//   train-demo   NoisySGD / NoisyAdam on a small dataset with its report
//
// Exit codes: 0 success, 2 invalid flags or malformed dataset, 3 rejected
// configuration (noise floor / infeasible target), 4 I/O failure,
// 5 verification failure.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "gdp/dual.h"
#include "gdp/errors.h"
#include "gdp/functionals.h"
#include "gdp/moments.h"
#include "gdp/normal.h"
#include "gdp/optimizers.h"
#include "gdp/pld.h"
#include "gdp/tradeoff.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitIo = 4;
constexpr int kExitVerifyFailed = 5;

using nlohmann::json;

struct MechanismFlags {
  std::optional<long> n;
  std::optional<long> batch;
  std::optional<double> p;
  std::optional<double> sigma;
  std::optional<double> epochs;
  std::optional<long> iterations;

  void Register(CLI::App* cmd, bool with_sigma = true) {
    cmd->add_option("--n", n, "Number of training examples");
    cmd->add_option("--batch", batch, "Expected mini-batch size");
    cmd->add_option("--p", p, "Poisson subsampling probability");
    if (with_sigma) cmd->add_option("--sigma", sigma, "Noise scale");
    cmd->add_option("--epochs", epochs, "Training epochs (T = epochs / p)");
    cmd->add_option("--T", iterations, "Iteration count");
  }

  double ResolveP() const {
    if (p.has_value()) {
      if (n.has_value() || batch.has_value()) {
        throw CLI::ValidationError("--p conflicts with --n/--batch");
      }
      if (!(*p > 0.0 && *p <= 1.0)) {
        throw CLI::ValidationError("--p must lie in (0, 1]");
      }
      return *p;
    }
    if (!n.has_value() || !batch.has_value()) {
      throw CLI::ValidationError("need either --p or both --n and --batch");
    }
    if (*n <= 0 || *batch <= 0 || *batch > *n) {
      throw CLI::ValidationError("--batch must lie in [1, n]");
    }
    return static_cast<double>(*batch) / static_cast<double>(*n);
  }

  long ResolveT(double resolved_p) const {
    if (iterations.has_value()) {
      if (epochs.has_value()) {
        throw CLI::ValidationError("--T conflicts with --epochs");
      }
      if (*iterations < 1) throw CLI::ValidationError("--T must be >= 1");
      return *iterations;
    }
    if (!epochs.has_value()) {
      throw CLI::ValidationError("need either --T or --epochs");
    }
    return gdp::IterationsFromEpochs(*epochs, resolved_p);
  }
};

// mu of the subsampled run; p = 1 short-circuits to the exact Gaussian
// composition sqrt(T)/sigma.
double MuForRun(double p, long T, double sigma) {
  if (p == 1.0) return std::sqrt(static_cast<double>(T)) / sigma;
  return gdp::CltMuSubsampledGaussian(p, T, sigma);
}

void WriteJsonOrDie(const std::string& path, const json& document) {
  std::ofstream out(path);
  if (!out) {
    throw std::ios_base::failure("cannot open " + path + " for writing");
  }
  out << document.dump(2) << "\n";
  if (!out) throw std::ios_base::failure("failed writing " + path);
}

int RunAccount(const MechanismFlags& flags, std::optional<double> delta,
               std::optional<double> eps, const std::string& json_out) {
  if (delta.has_value() == eps.has_value()) {
    throw CLI::ValidationError("supply exactly one of --delta / --eps");
  }
  if (!flags.sigma.has_value()) {
    throw CLI::ValidationError("--sigma is required");
  }
  const double p = flags.ResolveP();
  const long T = flags.ResolveT(p);
  const double sigma = *flags.sigma;
  const double mu = MuForRun(p, T, sigma);

  gdp::MomentsAccountantConfig ma_config;
  ma_config.sigma = sigma;
  ma_config.p = p;
  ma_config.T = T;
  const gdp::MomentsAccountant accountant(ma_config);

  double eps_clt, delta_clt, eps_ma, delta_ma;
  if (delta.has_value()) {
    delta_clt = delta_ma = *delta;
    eps_clt = gdp::EpsFromDelta(mu, *delta);
    eps_ma = accountant.Epsilon(*delta);
  } else {
    eps_clt = eps_ma = *eps;
    delta_clt = gdp::DeltaFromEps(mu, *eps);
    delta_ma = accountant.Delta(*eps);
  }

  std::printf("inputs: p=%.10g T=%ld sigma=%.10g\n", p, T, sigma);
  std::printf("%-8s %12s %12s %12s\n", "method", "mu", "eps", "delta");
  std::printf("%-8s %12.6g %12.6g %12.6g\n", "clt", mu, eps_clt, delta_clt);
  std::printf("%-8s %12s %12.6g %12.6g\n", "ma", "-", eps_ma, delta_ma);

  if (!json_out.empty()) {
    json document = {
        {"schema_version", 1},
        {"command", "account"},
        {"inputs",
         {{"p", p}, {"T", T}, {"sigma", sigma},
          {"delta", delta.has_value() ? json(*delta) : json()},
          {"eps", eps.has_value() ? json(*eps) : json()}}},
        {"outputs",
         {{"clt", {{"mu", mu}, {"eps", eps_clt}, {"delta", delta_clt}}},
          {"ma", {{"eps", eps_ma}, {"delta", delta_ma}}}}},
        {"diagnostics",
         {{"lambda_grid_size", accountant.config().lambda_grid.size()}}}};
    WriteJsonOrDie(json_out, document);
  }
  return kExitOk;
}

int RunCalibrate(const MechanismFlags& flags, double eps, double delta,
                 const std::string& json_out) {
  const double p = flags.ResolveP();
  const long T = flags.ResolveT(p);
  const gdp::CalibrationResult result =
      gdp::CalibrateSigma({eps, delta}, p, T);
  std::printf("inputs: eps=%.10g delta=%.10g p=%.10g T=%ld\n", eps, delta, p,
              T);
  std::printf("sigma_tilde=%.6f mu_tilde=%.6f residual=%.3g iterations=%d\n",
              result.sigma_tilde, result.mu_tilde, result.residual,
              result.iterations);
  if (!json_out.empty()) {
    json document = {
        {"schema_version", 1},
        {"command", "calibrate"},
        {"inputs", {{"eps", eps}, {"delta", delta}, {"p", p}, {"T", T}}},
        {"outputs",
         {{"sigma_tilde", result.sigma_tilde},
          {"mu_tilde", result.mu_tilde}}},
        {"diagnostics",
         {{"residual", result.residual},
          {"iterations", result.iterations}}}};
    WriteJsonOrDie(json_out, document);
  }
  return kExitOk;
}

int RunTradeoffCsv(const MechanismFlags& flags, double delta,
                   const std::vector<std::string>& curves, double spacing,
                   int grid_points, const std::string& out_path) {
  if (!flags.sigma.has_value()) {
    throw CLI::ValidationError("--sigma is required");
  }
  const double p = flags.ResolveP();
  const long T = flags.ResolveT(p);
  const double sigma = *flags.sigma;

  std::ostringstream csv;
  csv << "alpha,beta,curve\n";
  char row[128];
  const auto emit = [&](const gdp::TradeoffFunction& f,
                        const std::string& name) {
    for (int i = 0; i < grid_points; ++i) {
      const double alpha = static_cast<double>(i) / (grid_points - 1);
      std::snprintf(row, sizeof(row), "%.12g,%.12g,%s\n", alpha,
                    gdp::Eval(f, alpha), name.c_str());
      csv << row;
    }
  };

  std::optional<gdp::MomentsAccountant> accountant;
  const auto ma = [&]() -> const gdp::MomentsAccountant& {
    if (!accountant.has_value()) {
      gdp::MomentsAccountantConfig config;
      config.sigma = sigma;
      config.p = p;
      config.T = T;
      accountant.emplace(std::move(config));
    }
    return *accountant;
  };

  for (const std::string& curve : curves) {
    if (curve == "clt") {
      emit(gdp::TradeoffFunction::Gaussian(MuForRun(p, T, sigma)), curve);
    } else if (curve == "ma-point") {
      emit(gdp::TradeoffFunction::EpsDelta(ma().Epsilon(delta), delta), curve);
    } else if (curve == "ma-envelope") {
      for (int i = 0; i < grid_points; ++i) {
        const double alpha = static_cast<double>(i) / (grid_points - 1);
        std::snprintf(row, sizeof(row), "%.12g,%.12g,%s\n", alpha,
                      ma().TradeoffEnvelope(alpha), curve.c_str());
        csv << row;
      }
    } else if (curve == "oracle") {
      gdp::PldOptions options;
      options.spacing = spacing;
      emit(gdp::ComposeSubsampledGaussian(sigma, p, T, options), curve);
    } else {
      throw CLI::ValidationError(
          "--curve must be one of clt, ma-point, ma-envelope, oracle");
    }
  }

  if (out_path.empty() || out_path == "-") {
    std::cout << csv.str();
    return kExitOk;
  }
  std::ofstream out(out_path);
  if (!out) throw std::ios_base::failure("cannot open " + out_path);
  out << csv.str();
  if (!out) throw std::ios_base::failure("failed writing " + out_path);
  return kExitOk;
}

int RunVerify(double spacing) {
  bool all_ok = true;
  const auto report = [&](const std::string& name, bool ok, double measured,
                          double bound) {
    std::printf("[%s] %-24s measured=%.6g bound=%.6g\n", ok ? "ok" : "FAIL",
                name.c_str(), measured, bound);
    all_ok = all_ok && ok;
  };
  gdp::PldOptions options;
  options.spacing = spacing;

  // Composition oracle against the CLT limit at the one-epoch scale.
  {
    const double sigma = 1.1;
    const long T = 234;
    const double mu = 0.57;
    const double p = mu / std::sqrt(std::expm1(1.0 / (sigma * sigma))) /
                     std::sqrt(static_cast<double>(T));
    const gdp::TradeoffFunction oracle =
        gdp::ComposeSubsampledGaussian(sigma, p, T, options);
    const gdp::TradeoffFunction limit = gdp::TradeoffFunction::Gaussian(mu);
    double sup = 0.0;
    for (int i = 0; i <= 2000; ++i) {
      const double alpha = i / 2000.0;
      sup = std::max(sup,
                     std::abs(gdp::Eval(oracle, alpha) - gdp::Eval(limit, alpha)));
    }
    report("oracle-vs-clt-fig5", sup <= 0.01, sup, 0.01);
  }
  // Pure Gaussian composition against the closed form.
  {
    const double sigma = 1.0;
    const gdp::TradeoffFunction oracle =
        gdp::ComposeSubsampledGaussian(sigma, 1.0, 4, options);
    const gdp::TradeoffFunction exact = gdp::TradeoffFunction::Gaussian(2.0);
    double sup = 0.0;
    for (int i = 0; i <= 2000; ++i) {
      const double alpha = i / 2000.0;
      sup = std::max(sup,
                     std::abs(gdp::Eval(oracle, alpha) - gdp::Eval(exact, alpha)));
    }
    report("gaussian-composition", sup <= 2.0 * spacing, sup, 2.0 * spacing);
  }
  // Moments accountant vs CLT duality separation at large T.
  {
    const long T = 100000;
    const double p = 1.0 / std::sqrt(static_cast<double>(T));
    const gdp::GapCheckResult gap = gdp::GapCheck(1.0, p, T, 1.0);
    const double measured = gap.delta_ma - gap.delta_clt;
    report("ma-clt-gap", gap.Holds(1e-4), measured, gap.lower_bound - 1e-4);
  }
  return all_ok ? kExitOk : kExitVerifyFailed;
}

gdp::Dataset BundledSyntheticDataset() {
  // 200-point, 4-feature logistic dataset, deterministic by construction.
  gdp::Dataset data;
  const std::vector<double> truth = {1.2, -0.8, 0.5, 0.3};
  for (int i = 0; i < 200; ++i) {
    std::vector<double> x(truth.size());
    double score = 0.0;
    for (std::size_t j = 0; j < truth.size(); ++j) {
      x[j] = gdp::CounterNormal(2026, 7, i * truth.size() + j);
      score += truth[j] * x[j];
    }
    const double u = gdp::CounterUniform(2026, 8, i);
    data.labels.push_back(u < 1.0 / (1.0 + std::exp(-score)) ? 1.0 : 0.0);
    data.features.push_back(std::move(x));
  }
  return data;
}

int RunTrainDemo(const MechanismFlags& flags, const std::string& optimizer,
                 const std::string& data_path, double eta, double clip_norm,
                 std::uint64_t seed, double delta, long trace_every,
                 const std::string& json_out) {
  if (!flags.sigma.has_value()) {
    throw CLI::ValidationError("--sigma is required");
  }
  gdp::TrainConfig config;
  config.p = flags.ResolveP();
  config.T = flags.ResolveT(config.p);
  config.sigma = *flags.sigma;
  config.eta = eta;
  config.R = clip_norm;
  config.seed = seed;

  gdp::Dataset data;
  try {
    data = data_path.empty() ? BundledSyntheticDataset()
                             : gdp::LoadDelimitedDataset(data_path);
  } catch (const std::invalid_argument& e) {
    std::cerr << "dataset error: " << e.what() << "\n";
    return kExitUsage;
  }

  const gdp::LogisticLoss loss;
  const gdp::OptimizerKind kind =
      optimizer == "adam" ? gdp::OptimizerKind::kAdam : gdp::OptimizerKind::kSgd;
  const gdp::RunResult result = gdp::Run(data, loss, config, kind, delta);

  std::printf("optimizer=%s n=%zu dim=%zu p=%.6g T=%ld sigma=%.6g eta=%.6g "
              "R=%.6g seed=%llu\n",
              optimizer.c_str(), data.size(), data.dim(), config.p, config.T,
              config.sigma, config.eta, config.R,
              static_cast<unsigned long long>(config.seed));
  for (std::size_t t = 0; t < result.loss_trace.size(); ++t) {
    if (t % static_cast<std::size_t>(trace_every) == 0 ||
        t + 1 == result.loss_trace.size()) {
      std::printf("step %6zu  loss %.8f\n", t, result.loss_trace[t]);
    }
  }
  const gdp::PrivacyReport& report = result.report;
  if (report.is_private) {
    std::printf("privacy: method=%s mu=%.6g eps=%.6g delta=%.6g\n",
                report.method.c_str(), report.mu, report.eps, report.delta);
  } else {
    std::printf("privacy: NOT PRIVATE (sigma = 0)\n");
  }
  if (!json_out.empty()) {
    json document = {
        {"schema_version", 1},
        {"command", "train-demo"},
        {"inputs",
         {{"optimizer", optimizer}, {"p", config.p}, {"T", config.T},
          {"sigma", config.sigma}, {"eta", config.eta}, {"R", config.R},
          {"seed", config.seed}, {"delta", delta},
          {"n", data.size()}, {"dim", data.dim()}}},
        {"outputs",
         {{"final_loss", result.loss_trace.empty() ? json()
                                                   : json(result.loss_trace.back())},
          {"mu", report.is_private ? json(report.mu) : json()},
          {"eps", report.is_private ? json(report.eps) : json()},
          {"is_private", report.is_private}}},
        {"diagnostics", {{"loss_trace_length", result.loss_trace.size()}}}};
    WriteJsonOrDie(json_out, document);
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"f-DP / Gaussian-DP accounting for noisy optimizers"};
  app.require_subcommand(1);

  // account
  auto* account = app.add_subcommand(
      "account", "CLT and moments-accountant privacy report");
  MechanismFlags account_flags;
  account_flags.Register(account);
  std::optional<double> account_delta, account_eps;
  account->add_option("--delta", account_delta, "Target delta");
  account->add_option("--eps", account_eps, "Target eps");
  std::string account_json;
  account->add_option("--json-out", account_json, "Write a JSON report");

  // calibrate
  auto* calibrate = app.add_subcommand(
      "calibrate", "Smallest noise scale meeting an (eps, delta) target");
  MechanismFlags calibrate_flags;
  calibrate_flags.Register(calibrate, /*with_sigma=*/false);
  double calibrate_eps = 0.0, calibrate_delta = 0.0;
  calibrate->add_option("--eps", calibrate_eps, "Target eps")->required();
  calibrate->add_option("--delta", calibrate_delta, "Target delta")
      ->required();
  std::string calibrate_json;
  calibrate->add_option("--json-out", calibrate_json, "Write a JSON report");

  // tradeoff-csv
  auto* csv = app.add_subcommand(
      "tradeoff-csv", "Emit trade-off curves as alpha,beta,curve CSV");
  MechanismFlags csv_flags;
  csv_flags.Register(csv);
  double csv_delta = 1e-5;
  csv->add_option("--delta", csv_delta, "Delta for the ma-point curve");
  std::vector<std::string> csv_curves = {"clt", "ma-point"};
  csv->add_option("--curve", csv_curves,
                  "Curves: clt, ma-point, ma-envelope, oracle");
  double csv_spacing = 1e-4;
  csv->add_option("--spacing", csv_spacing, "Oracle loss-grid spacing");
  int csv_points = 1001;
  csv->add_option("--grid-points", csv_points, "Alpha grid size");
  std::string csv_out;
  csv->add_option("--out", csv_out, "Output path ('-' for stdout)");

  // verify
  auto* verify = app.add_subcommand(
      "verify", "Cross-check the CLT accountant against the oracle");
  double verify_spacing = 1e-4;
  verify->add_option("--spacing", verify_spacing, "Oracle loss-grid spacing");

  // train-demo
  auto* demo = app.add_subcommand(
      "train-demo", "NoisySGD / NoisyAdam on a small dataset");
  MechanismFlags demo_flags;
  demo_flags.Register(demo);
  std::string demo_optimizer = "sgd";
  demo->add_option("--optimizer", demo_optimizer, "sgd or adam")
      ->check(CLI::IsMember({"sgd", "adam"}));
  std::string demo_data;
  demo->add_option("--data", demo_data,
                   "Delimited numeric text, label last column "
                   "(bundled synthetic data when omitted)");
  double demo_eta = 0.15, demo_clip = 1.0, demo_delta = 1e-5;
  std::uint64_t demo_seed = 1;
  long demo_trace = 50;
  demo->add_option("--eta", demo_eta, "Learning rate");
  demo->add_option("--R", demo_clip, "Clipping norm bound");
  demo->add_option("--seed", demo_seed, "RNG seed");
  demo->add_option("--delta", demo_delta, "Delta for the privacy report");
  demo->add_option("--trace-every", demo_trace, "Loss print stride");
  std::string demo_json;
  demo->add_option("--json-out", demo_json, "Write a JSON report");

  try {
    app.parse(argc, argv);
    if (account->parsed()) {
      return RunAccount(account_flags, account_delta, account_eps,
                        account_json);
    }
    if (calibrate->parsed()) {
      return RunCalibrate(calibrate_flags, calibrate_eps, calibrate_delta,
                          calibrate_json);
    }
    if (csv->parsed()) {
      return RunTradeoffCsv(csv_flags, csv_delta, csv_curves, csv_spacing,
                            csv_points, csv_out);
    }
    if (verify->parsed()) return RunVerify(verify_spacing);
    if (demo->parsed()) {
      return RunTrainDemo(demo_flags, demo_optimizer, demo_data, demo_eta,
                          demo_clip, demo_seed, demo_delta, demo_trace,
                          demo_json);
    }
    return kExitUsage;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  } catch (const gdp::InfeasibleError& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const std::ios_base::failure& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kExitIo;
  } catch (const gdp::AccountingError& e) {
    std::cerr << "accounting error: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid arguments: " << e.what() << "\n";
    return kExitUsage;
  }
}
