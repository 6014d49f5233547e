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
#include "gdp/quadrature.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "gdp/errors.h"

namespace gdp {
namespace {

struct Workspace {
  const std::function<double(double)>* f = nullptr;
  long evaluations = 0;
  bool finite = true;
  bool converged = true;

  double Eval(double x) {
    ++evaluations;
    const double y = (*f)(x);
    if (!std::isfinite(y)) finite = false;
    return y;
  }
};

double SimpsonPanel(double fa, double fm, double fb, double h) {
  return h / 6.0 * (fa + 4.0 * fm + fb);
}

double AdaptiveStep(Workspace& ws, double a, double b, double fa, double fm,
                    double fb, double whole, double abs_tol, double rel_tol,
                    int depth, double& error_acc) {
  const double m = 0.5 * (a + b);
  const double lm = ws.Eval(0.5 * (a + m));
  const double rm = ws.Eval(0.5 * (m + b));
  const double left = SimpsonPanel(fa, lm, fm, m - a);
  const double right = SimpsonPanel(fm, rm, fb, b - m);
  const double delta = left + right - whole;
  if (depth <= 0) {
    ws.converged = false;
    error_acc += std::abs(delta);
    return left + right + delta / 15.0;
  }
  const double tol = abs_tol + rel_tol * std::abs(left + right);
  if (std::abs(delta) <= 15.0 * tol) {
    error_acc += std::abs(delta) / 15.0;
    return left + right + delta / 15.0;
  }
  return AdaptiveStep(ws, a, m, fa, lm, fm, left, 0.5 * abs_tol, rel_tol,
                      depth - 1, error_acc) +
         AdaptiveStep(ws, m, b, fm, rm, fb, right, 0.5 * abs_tol, rel_tol,
                      depth - 1, error_acc);
}

}  // namespace

QuadratureResult Integrate(const std::function<double(double)>& f, double a,
                           double b, const QuadratureOptions& options) {
  QuadratureResult result;
  if (a == b) return result;
  Workspace ws;
  ws.f = &f;
  const int panels = std::max(1, options.initial_panels);
  const double h = (b - a) / panels;
  double total = 0.0;
  double error_acc = 0.0;
  double left_x = a;
  double f_left = ws.Eval(left_x);
  for (int i = 0; i < panels; ++i) {
    const double right_x = (i + 1 == panels) ? b : a + (i + 1) * h;
    const double mid_x = 0.5 * (left_x + right_x);
    const double f_mid = ws.Eval(mid_x);
    const double f_right = ws.Eval(right_x);
    const double whole = SimpsonPanel(f_left, f_mid, f_right, right_x - left_x);
    total += AdaptiveStep(ws, left_x, right_x, f_left, f_mid, f_right, whole,
                          options.abs_tol, options.rel_tol, options.max_depth,
                          error_acc);
    left_x = right_x;
    f_left = f_right;
  }
  result.value = total;
  result.error_estimate = error_acc;
  result.evaluations = ws.evaluations;
  result.converged = ws.converged && ws.finite;
  if (!ws.finite) result.value = std::numeric_limits<double>::quiet_NaN();
  return result;
}

double IntegrateOrThrow(const std::function<double(double)>& f, double a,
                        double b, const QuadratureOptions& options) {
  const QuadratureResult result = Integrate(f, a, b, options);
  if (!result.converged || !std::isfinite(result.value)) {
    throw IntegrabilityError(
        "quadrature did not converge; error estimate " +
        std::to_string(result.error_estimate) + " after " +
        std::to_string(result.evaluations) + " evaluations");
  }
  return result.value;
}

double LogIntegrateExp(const std::function<double(double)>& log_f, double a,
                       double b, const QuadratureOptions& options) {
  if (a >= b) return -std::numeric_limits<double>::infinity();
  // Locate the scale on a scan grid; the shifted integrand is then <= e.
  constexpr int kScanPoints = 513;
  double peak = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < kScanPoints; ++i) {
    const double x = a + (b - a) * i / (kScanPoints - 1);
    peak = std::max(peak, log_f(x));
  }
  if (!std::isfinite(peak)) {
    if (peak == -std::numeric_limits<double>::infinity()) return peak;
    throw IntegrabilityError("log-domain integrand is unbounded");
  }
  const double value = IntegrateOrThrow(
      [&](double x) {
        const double l = log_f(x) - peak;
        return l < -745.0 ? 0.0 : std::exp(l);
      },
      a, b, options);
  if (value <= 0.0) return -std::numeric_limits<double>::infinity();
  return peak + std::log(value);
}

}  // namespace gdp
