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

#pragma once

// Small numeric helpers: summary statistics, quantiles and the F / Student t
// distribution functions used by the AUC comparison tests.

#include <span>
#include <vector>

namespace poolrank::stats {

double mean(std::span<const double> v);
//! Unbiased (n-1) sample variance; 0 for n < 2.
double sample_variance(std::span<const double> v);
double sample_sd(std::span<const double> v);

//! Linear-interpolation quantile (R type 7); q in [0, 1]. Throws on empty input.
double quantile(std::vector<double> v, double q);
double median(std::vector<double> v);

//! Regularized incomplete beta I_x(a, b), continued fraction (modified Lentz).
double incomplete_beta(double a, double b, double x);

//! P(F <= f) for F ~ F(d1, d2).
double f_cdf(double f, double d1, double d2);
//! P(T <= t) for T ~ t(df).
double student_t_cdf(double t, double df);

//! Spearman rank correlation (average ranks for ties); 0 when either input
//! is constant.
double spearman(std::span<const double> a, std::span<const double> b);

//! Average ranks (1-based) with ties sharing the mean rank.
std::vector<double> average_ranks(std::span<const double> v);

}  // namespace poolrank::stats
