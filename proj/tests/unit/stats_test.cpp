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

#include <cmath>
#include <random>
#include <vector>

#include <boost/math/distributions/fisher_f.hpp>
#include <boost/math/distributions/students_t.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <gtest/gtest.h>

#include "poolrank/stats.hpp"

using namespace poolrank;

namespace {

TEST(Stats, MeanVarianceQuantiles) {
  const std::vector<double> v = {4, 1, 3, 2, 5};
  EXPECT_DOUBLE_EQ(stats::mean(v), 3.0);
  EXPECT_DOUBLE_EQ(stats::sample_variance(v), 2.5);
  EXPECT_DOUBLE_EQ(stats::median(v), 3.0);
  EXPECT_DOUBLE_EQ(stats::quantile(v, 0.25), 2.0);
  EXPECT_DOUBLE_EQ(stats::quantile({1, 2, 3, 4}, 0.5), 2.5);
  EXPECT_DOUBLE_EQ(stats::quantile({1, 2, 3, 4}, 0.25), 1.75);
  EXPECT_EQ(stats::sample_variance(std::vector<double>{7.0}), 0.0);
}

TEST(Stats, IncompleteBetaMatchesReference) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 500; ++t) {
    const double a = 0.1 + 60 * u(rng), b = 0.1 + 60 * u(rng), x = u(rng);
    EXPECT_NEAR(stats::incomplete_beta(a, b, x), boost::math::ibeta(a, b, x), 1e-11) << a << " " << b << " " << x;
  }
  EXPECT_EQ(stats::incomplete_beta(2, 3, 0.0), 0.0);
  EXPECT_EQ(stats::incomplete_beta(2, 3, 1.0), 1.0);
}

TEST(Stats, DistributionFunctionsMatchReference) {
  std::mt19937_64 rng(22);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 300; ++t) {
    const double d1 = 1 + std::floor(200 * u(rng)), d2 = 1 + std::floor(200 * u(rng));
    const double f = 4 * u(rng);
    EXPECT_NEAR(stats::f_cdf(f, d1, d2), boost::math::cdf(boost::math::fisher_f(d1, d2), f), 1e-10);
    const double df = 1 + 300 * u(rng), x = 8 * u(rng) - 4;
    EXPECT_NEAR(stats::student_t_cdf(x, df), boost::math::cdf(boost::math::students_t(df), x), 1e-10);
  }
}

TEST(Stats, SpearmanWithTies) {
  const std::vector<double> a = {1, 2, 2, 3};
  const std::vector<double> b = {10, 20, 20, 30};
  EXPECT_NEAR(stats::spearman(a, b), 1.0, 1e-15);
  const std::vector<double> c = {4, 3, 3, 1};
  EXPECT_NEAR(stats::spearman(a, c), -1.0, 1e-15);
  const std::vector<double> k = {5, 5, 5, 5};
  EXPECT_EQ(stats::spearman(a, k), 0.0);
  const auto r = stats::average_ranks(a);
  EXPECT_EQ(r, (std::vector<double>{1.0, 2.5, 2.5, 4.0}));
}

}  // namespace
