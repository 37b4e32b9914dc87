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

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include <boost/math/distributions/fisher_f.hpp>
#include <boost/math/distributions/students_t.hpp>
#include <gtest/gtest.h>

#include "oracles.hpp"
#include "poolrank/error.hpp"
#include "poolrank/eval.hpp"
#include "poolrank/stats.hpp"

using namespace poolrank;

namespace {

TEST(Metrics, MatchBruteForceCountsOnRandomInstances) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int inst = 0; inst < 300; ++inst) {
    const std::size_t n = 1 + static_cast<std::size_t>(u(rng) * 150);
    std::vector<int> y(n);
    std::vector<double> s(n);
    for (std::size_t i = 0; i < n; ++i) {
      y[i] = u(rng) < 0.3 ? 1 : 0;
      s[i] = std::round(u(rng) * 10) / 10;
    }
    const double theta = std::round(u(rng) * 10) / 10;
    const auto lib = eval::metrics(eval::confusion(y, s, theta));
    const auto ref = oracle::metrics_from_counts(oracle::count_confusion(y, s, theta));
    EXPECT_EQ(lib.accuracy, ref.accuracy);
    EXPECT_EQ(lib.precision, ref.precision);
    EXPECT_EQ(lib.sensitivity, ref.sensitivity);
    EXPECT_EQ(lib.fall_out, ref.fall_out);
    EXPECT_EQ(lib.f_score, ref.f_score);
    EXPECT_EQ(lib.mcc, ref.mcc);
  }
}

TEST(Metrics, ScoreEqualToThresholdIsPositive) {
  const std::vector<int> y = {1, 0};
  const std::vector<double> s = {0.5, 0.5};
  const auto c = eval::confusion(y, s, 0.5);
  EXPECT_EQ(c.tp, 1u);
  EXPECT_EQ(c.fp, 1u);
}

TEST(Metrics, ZeroDenominatorsGiveZero) {
  eval::ConfusionMatrix c;
  c.tn = 10;
  const auto m = eval::metrics(c);
  EXPECT_EQ(m.precision, 0.0);
  EXPECT_EQ(m.sensitivity, 0.0);
  EXPECT_EQ(m.f_score, 0.0);
  EXPECT_EQ(m.mcc, 0.0);
  EXPECT_EQ(m.accuracy, 1.0);
}

TEST(Metrics, PerfectAndInvertedClassifiers) {
  eval::ConfusionMatrix perfect{5, 0, 15, 0};
  EXPECT_DOUBLE_EQ(eval::metrics(perfect).mcc, 1.0);
  eval::ConfusionMatrix inverted{0, 15, 0, 5};
  EXPECT_DOUBLE_EQ(eval::metrics(inverted).mcc, -1.0);
}

TEST(Metrics, FScoreIsHarmonicMeanAndMccBounded) {
  std::mt19937_64 rng(12);
  std::uniform_int_distribution<int> d(0, 40);
  for (int t = 0; t < 1000; ++t) {
    eval::ConfusionMatrix c{static_cast<std::size_t>(d(rng)), static_cast<std::size_t>(d(rng)),
                            static_cast<std::size_t>(d(rng)), static_cast<std::size_t>(d(rng))};
    const auto m = eval::metrics(c);
    if (m.precision > 0 && m.sensitivity > 0) {
      EXPECT_NEAR(m.f_score, 2.0 / (1.0 / m.precision + 1.0 / m.sensitivity), 1e-15);
    }
    EXPECT_LE(std::abs(m.mcc), 1.0 + 1e-15);
    for (std::size_t i = 0; i < 6; ++i) {
      EXPECT_GE(eval::metric_value(m, i), i == 5 ? -1.0 : 0.0);
    }
  }
}

TEST(Metrics, RejectBadInput) {
  const std::vector<int> y = {1, 2};
  const std::vector<double> s = {0.1, 0.2};
  EXPECT_THROW(eval::confusion(y, s, 0.5), InputError);
  const std::vector<int> y1 = {1};
  EXPECT_THROW(eval::confusion(y1, s, 0.5), InputError);
}

TEST(ThetaGrid, IsHundredthsFromZero) {
  const auto g = eval::theta_grid();
  ASSERT_EQ(g.size(), 100u);
  for (std::size_t i = 0; i < g.size(); ++i) EXPECT_EQ(g[i], static_cast<double>(i) / 100.0);
}

TEST(Roc, AucEqualsConcordanceWithTies) {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int inst = 0; inst < 100; ++inst) {
    const std::size_t n = 2 + static_cast<std::size_t>(u(rng) * 200);
    std::vector<int> y(n);
    std::vector<double> s(n);
    for (std::size_t i = 0; i < n; ++i) {
      y[i] = u(rng) < 0.4 ? 1 : 0;
      s[i] = std::floor((u(rng) + 0.2 * y[i]) * 5) / 5;
    }
    y[0] = 1;
    y[1] = 0;
    EXPECT_NEAR(eval::auc(y, s), oracle::concordance(y, s), 1e-12);
  }
}

TEST(Roc, CurveIsMonotoneStaircaseFromOriginToOne) {
  const std::vector<int> y = {1, 0, 1, 1, 0, 0, 1, 0};
  const std::vector<double> s = {0.9, 0.8, 0.8, 0.6, 0.5, 0.3, 0.3, 0.1};
  const auto r = eval::roc_auc(y, s);
  EXPECT_EQ(r.points.front().fpr, 0.0);
  EXPECT_EQ(r.points.front().tpr, 0.0);
  EXPECT_EQ(r.points.back().fpr, 1.0);
  EXPECT_EQ(r.points.back().tpr, 1.0);
  for (std::size_t i = 1; i < r.points.size(); ++i) {
    EXPECT_GE(r.points[i].fpr, r.points[i - 1].fpr);
    EXPECT_GE(r.points[i].tpr, r.points[i - 1].tpr);
  }
  EXPECT_EQ(r.points.size(), 7u);  // origin plus one per distinct score
}

TEST(Roc, InvariantUnderMonotoneTransform) {
  std::mt19937_64 rng(14);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<int> y(100);
  std::vector<double> s(100), t(100);
  for (std::size_t i = 0; i < 100; ++i) {
    y[i] = i % 3 == 0;
    s[i] = u(rng) + 0.3 * y[i];
    t[i] = std::exp(3 * s[i]) - 7;
  }
  EXPECT_DOUBLE_EQ(eval::auc(y, s), eval::auc(y, t));
}

TEST(Roc, SingleClassIsDegenerate) {
  const std::vector<int> y = {1, 1};
  const std::vector<double> s = {0.1, 0.2};
  EXPECT_THROW(eval::auc(y, s), DegenerateError);
}

TEST(NullModel, ExpectationsAndLegacyLabels) {
  for (double theta : eval::theta_grid()) {
    const auto e = eval::null_expectations(theta);
    EXPECT_NEAR(e.expected.accuracy, 0.25 + 0.5 * theta, 1e-15);
    EXPECT_NEAR(e.expected.f_score, (1 - theta) / (2.5 - 2 * theta), 1e-15);
    EXPECT_EQ(e.expected.precision, 0.25);
    EXPECT_EQ(e.expected.sensitivity, 1 - theta);
    EXPECT_EQ(e.legacy_labels.precision, e.expected.sensitivity);
    EXPECT_EQ(e.legacy_labels.sensitivity, e.expected.precision);
    EXPECT_EQ(e.expected.mcc, 0.0);
  }
}

TEST(NullModel, SimulationAgreesWithExpectation) {
  std::mt19937_64 rng(15);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const std::size_t n = 200000;
  std::vector<int> y(n);
  std::vector<double> s(n);
  for (std::size_t i = 0; i < n; ++i) {
    y[i] = i % 4 == 0;
    s[i] = u(rng);
  }
  for (double theta : {0.1, 0.34, 0.5, 0.9}) {
    const auto m = eval::metrics(eval::confusion(y, s, theta));
    const auto e = eval::null_expectations(theta).expected;
    EXPECT_NEAR(m.precision, e.precision, 0.01);
    EXPECT_NEAR(m.sensitivity, e.sensitivity, 0.01);
    EXPECT_NEAR(m.fall_out, e.fall_out, 0.01);
    EXPECT_NEAR(m.mcc, 0.0, 0.01);
  }
}

TEST(Sweep, ArgmaxTiesKeepSmallerTheta) {
  eval::SweepResult s;
  s.thetas = {0.1, 0.2, 0.3};
  s.curves.resize(3);
  s.curves[0].mcc = 0.2;
  s.curves[1].mcc = 0.5;
  s.curves[2].mcc = 0.5;
  s.curves[0].f_score = 0.7;
  s.curves[1].f_score = 0.3;
  s.curves[2].f_score = 0.7;
  eval::select_thresholds(s);
  EXPECT_EQ(s.theta_mcc_max, 0.2);
  EXPECT_EQ(s.theta_f_max, 0.1);
}

TEST(Sweep, CurvesMatchPointwiseMetrics) {
  std::mt19937_64 rng(16);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<int> y(300);
  std::vector<double> s(300);
  for (std::size_t i = 0; i < 300; ++i) {
    y[i] = u(rng) < 0.25;
    s[i] = std::clamp(u(rng) * 0.7 + 0.3 * y[i], 0.0, 1.0);
  }
  const auto r = eval::sweep_and_select(y, s);
  ASSERT_EQ(r.thetas.size(), 100u);
  for (std::size_t t = 0; t < r.thetas.size(); ++t) {
    const auto m = eval::metrics(eval::confusion(y, s, r.thetas[t]));
    EXPECT_EQ(r.curves[t].mcc, m.mcc);
    EXPECT_EQ(r.curves[t].f_score, m.f_score);
  }
}

TEST(CompareAuc, MatchesReferenceDistributions) {
  std::mt19937_64 rng(17);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int t = 0; t < 20; ++t) {
    const std::size_t n = 30 + static_cast<std::size_t>(t);
    std::vector<double> a(n), b(n);
    const double sd_b = t % 2 == 0 ? 1.0 : 3.0;
    for (std::size_t i = 0; i < n; ++i) {
      a[i] = 0.8 + 0.01 * g(rng);
      b[i] = 0.79 + 0.01 * sd_b * g(rng);
    }
    const auto r = eval::compare_auc(a, b, 0.01);
    const double va = stats::sample_variance(a), vb = stats::sample_variance(b);
    const double f = va / vb;
    EXPECT_NEAR(r.f_statistic, f, 1e-12 * f);
    boost::math::fisher_f fd(static_cast<double>(n - 1), static_cast<double>(n - 1));
    const double p_f = 2 * std::min(boost::math::cdf(fd, f), boost::math::cdf(boost::math::complement(fd, f)));
    EXPECT_NEAR(r.f_p_value, p_f, 1e-9);
    EXPECT_EQ(r.equal_variances, !(p_f < 0.01));

    const double ma = stats::mean(a), mb = stats::mean(b), dn = static_cast<double>(n);
    double tstat, df;
    if (r.equal_variances) {
      const double sp = ((dn - 1) * va + (dn - 1) * vb) / (2 * dn - 2);
      tstat = (ma - mb) / std::sqrt(sp * 2 / dn);
      df = 2 * dn - 2;
      EXPECT_EQ(r.mean_test, "pooled");
    } else {
      const double se2 = va / dn + vb / dn;
      tstat = (ma - mb) / std::sqrt(se2);
      df = se2 * se2 / ((va / dn) * (va / dn) / (dn - 1) + (vb / dn) * (vb / dn) / (dn - 1));
      EXPECT_EQ(r.mean_test, "welch");
    }
    EXPECT_NEAR(r.t_statistic, tstat, 1e-9 * std::abs(tstat) + 1e-12);
    EXPECT_NEAR(r.df, df, 1e-9 * df);
    boost::math::students_t td(df);
    const double p_t = 2 * boost::math::cdf(boost::math::complement(td, std::abs(tstat)));
    EXPECT_NEAR(r.t_p_value, p_t, 1e-9);
  }
}

TEST(CompareAuc, RejectsDegenerateInput) {
  const std::vector<double> a = {0.7, 0.7, 0.7};
  EXPECT_THROW(eval::compare_auc(a, a), DegenerateError);
  const std::vector<double> b = {0.7, 0.8};
  EXPECT_THROW(eval::compare_auc(a, b), InputError);
}

}  // namespace
