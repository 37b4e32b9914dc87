// Copyright 2026 The poolrank Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "poolrank/random.hpp"

#include <cmath>
#include <numbers>

namespace poolrank {

double standard_normal(Rng& rng) {
  double u1 = uniform01(rng);
  while (u1 <= 0.0) u1 = uniform01(rng);
  const double u2 = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t poisson(Rng& rng, double mean) {
  if (!(mean > 0)) return 0;
  if (mean > 500.0) {
    const double v = std::round(mean + std::sqrt(mean) * standard_normal(rng));
    return v < 0 ? 0 : static_cast<std::uint64_t>(v);
  }
  // Knuth's product method in log space.
  const double limit = -mean;
  double log_prod = 0.0;
  std::uint64_t k = 0;
  while (true) {
    double u = uniform01(rng);
    while (u <= 0.0) u = uniform01(rng);
    log_prod += std::log(u);
    if (log_prod < limit) return k;
    ++k;
  }
}

}  // namespace poolrank
