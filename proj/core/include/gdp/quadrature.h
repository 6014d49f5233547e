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
#ifndef GDP_QUADRATURE_H_
#define GDP_QUADRATURE_H_

#include <functional>

namespace gdp {

struct QuadratureOptions {
  // Per-panel acceptance threshold: abs_tol + rel_tol * |panel estimate|.
  // The relative term keeps large-magnitude integrands (moment integrals)
  // from subdividing forever against a purely absolute target.
  double abs_tol = 1e-10;
  double rel_tol = 1e-10;
  int max_depth = 48;
  // Number of equal panels the interval is split into before adaptive
  // refinement starts. Keeps narrow features from being missed by the
  // first Simpson estimate on a wide interval.
  int initial_panels = 16;
};

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
  long evaluations = 0;
  bool converged = true;
};

// Adaptive Simpson integration of f over [a, b].
QuadratureResult Integrate(const std::function<double(double)>& f, double a,
                           double b, const QuadratureOptions& options = {});

// Returns Integrate(...).value; throws IntegrabilityError when the
// integrand produced non-finite values or the subdivision did not converge.
double IntegrateOrThrow(const std::function<double(double)>& f, double a,
                        double b, const QuadratureOptions& options = {});

// log of the integral of exp(log_f(x)) over [a, b], evaluated without ever
// forming exp(log_f) at its full scale: the maximum of log_f on a scan grid
// is factored out first. Intended for moment integrands whose magnitude can
// exceed the double range.
double LogIntegrateExp(const std::function<double(double)>& log_f, double a,
                       double b, const QuadratureOptions& options = {});

}  // namespace gdp

#endif  // GDP_QUADRATURE_H_
