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
#ifndef GDP_NORMAL_H_
#define GDP_NORMAL_H_

namespace gdp {

// Standard normal density.
double NormalPdf(double x);

// Standard normal CDF. Accurate in the left tail (relative error of erfc);
// exact 0/1 saturation only past the double underflow point.
double NormalCdf(double x);

// Inverse of NormalCdf on (0, 1). Returns -+infinity at 0 and 1.
double NormalQuantile(double p);

// log(NormalCdf(x)), finite down to x ~ -1e154. The erfc-based CDF
// underflows near x = -38; below that an asymptotic Mills-ratio expansion
// keeps full relative precision.
double LogNormalCdf(double x);

}  // namespace gdp

#endif  // GDP_NORMAL_H_
