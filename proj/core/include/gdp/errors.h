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
#ifndef GDP_ERRORS_H_
#define GDP_ERRORS_H_

#include <stdexcept>
#include <string>

namespace gdp {

// Base class for failures of the accounting computations themselves, as
// opposed to std::invalid_argument which is reserved for violated
// preconditions on caller-supplied values.
class AccountingError : public std::runtime_error {
 public:
  explicit AccountingError(const std::string& what)
      : std::runtime_error(what) {}
};

// A requested configuration cannot be accounted: noise scale below the
// supported floor, or a calibration target that no parameter reaches.
class InfeasibleError : public AccountingError {
 public:
  explicit InfeasibleError(const std::string& what) : AccountingError(what) {}
};

// A divergence integral failed to converge or is numerically infinite.
class IntegrabilityError : public AccountingError {
 public:
  explicit IntegrabilityError(const std::string& what)
      : AccountingError(what) {}
};

// Probability mass discarded during discretization or composition exceeded
// the configured budget.
class TailBudgetError : public AccountingError {
 public:
  explicit TailBudgetError(const std::string& what) : AccountingError(what) {}
};

}  // namespace gdp

#endif  // GDP_ERRORS_H_
