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
#include <numeric>
#include <random>
#include <set>
#include <vector>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "poolrank/error.hpp"
#include "poolrank/models.hpp"
#include "poolrank/stats.hpp"

using namespace poolrank;

namespace {

struct Data {
  Eigen::MatrixXd X;
  std::vector<int> y;
};

Data make_data(std::uint64_t seed, int n, int p, int active, double signal = 1.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Data d{Eigen::MatrixXd(n, p), std::vector<int>(static_cast<std::size_t>(n))};
  for (int j = 0; j < p; ++j) {
    const double sd = 0.1 + 5 * u(rng);
    for (int i = 0; i < n; ++i) d.X(i, j) = 3.0 * j + sd * g(rng);
  }
  const Eigen::MatrixXd Z = oracle::standardize(d.X);
  for (int i = 0; i < n; ++i) {
    double eta = -1.0;
    for (int j = 0; j < active; ++j) eta += signal * (j % 2 ? -1 : 1) * Z(i, j);
    d.y[static_cast<std::size_t>(i)] = u(rng) < 1 / (1 + std::exp(-eta)) ? 1 : 0;
  }
  return d;
}

TEST(OlsR2, MatchesNormalEquations) {
  std::mt19937_64 rng(31);
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::MatrixXd X(80, 3);
  Eigen::VectorXd y(80);
  for (int i = 0; i < 80; ++i) {
    for (int j = 0; j < 3; ++j) X(i, j) = g(rng);
    y(i) = 1 + 2 * X(i, 0) - X(i, 2) + g(rng);
  }
  Eigen::MatrixXd A(80, 4);
  A << Eigen::VectorXd::Ones(80), X;
  const Eigen::VectorXd b = A.colPivHouseholderQr().solve(y);
  const double ssr = (y - A * b).squaredNorm();
  const double sst = (y.array() - y.mean()).matrix().squaredNorm();
  EXPECT_NEAR(models::ols_r2(X, y), 1 - ssr / sst, 1e-9);
  EXPECT_THROW(models::ols_r2(X, Eigen::VectorXd::Constant(80, 2.0)), DegenerateError);
}

TEST(LambdaGrid, DefaultIsTwoHundredOneLogSpacedValues) {
  const auto v = models::LambdaGrid{}.values();
  ASSERT_EQ(v.size(), 201u);
  EXPECT_EQ(v.front(), 1e-4);
  EXPECT_NEAR(v.back(), 0.1, 1e-16);
  for (std::size_t i = 1; i < v.size(); ++i) EXPECT_NEAR(v[i] / v[i - 1], std::pow(10.0, 0.015), 1e-13);
}

TEST(LrL1, ZeroAtLambdaMax) {
  const auto d = make_data(32, 120, 8, 3);
  const double lmax = models::lambda_max(d.X, d.y);
  const double ybar = std::accumulate(d.y.begin(), d.y.end(), 0.0) / d.y.size();
  for (double f : {1.0, 2.0}) {
    const auto m = models::fit_lr_l1(d.X, d.y, f * lmax);
    EXPECT_EQ(m.n_nonzero(), 0u);
    EXPECT_NEAR(m.beta0, std::log(ybar / (1 - ybar)), 1e-8);
  }
  EXPECT_GT(models::fit_lr_l1(d.X, d.y, 0.9 * lmax).n_nonzero(), 0u);
}

TEST(LrL1, SatisfiesKktConditions) {
  for (std::uint64_t s = 0; s < 10; ++s) {
    const auto d = make_data(100 + s, 200, 30, 5);
    const double lambda = 0.1 * models::lambda_max(d.X, d.y);
    const auto m = models::fit_lr_l1(d.X, d.y, lambda);
    ASSERT_TRUE(m.converged);
    const Eigen::MatrixXd Z = oracle::standardize(d.X);
    const Eigen::VectorXd eta = m.decision(d.X);
    Eigen::VectorXd r(200);
    for (int i = 0; i < 200; ++i) r(i) = d.y[static_cast<std::size_t>(i)] - 1 / (1 + std::exp(-eta(i)));
    EXPECT_NEAR(r.mean(), 0.0, 1e-6);
    const Eigen::VectorXd g = Z.transpose() * r / 200.0;
    for (int j = 0; j < 30; ++j) {
      if (m.beta_std(j) != 0) {
        EXPECT_NEAR(g(j), lambda * (m.beta_std(j) > 0 ? 1 : -1), 1e-6);
      } else {
        EXPECT_LE(std::abs(g(j)), lambda + 1e-6);
      }
    }
  }
}

TEST(LrL1, UnpenalizedFitMatchesNewtonRaphson) {
  for (std::uint64_t s = 0; s < 5; ++s) {
    const auto d = make_data(200 + s, 250, 3, 3, 0.5);
    const auto m = models::fit_lr_l1(d.X, d.y, 0.0);
    const auto ref = oracle::newton_logistic(d.X, d.y);
    EXPECT_NEAR(m.beta0, ref(0), 1e-5);
    for (int j = 0; j < 3; ++j) EXPECT_NEAR(m.beta(j), ref(j + 1), 1e-5);
  }
}

TEST(LrL1, ObjectiveTraceIsMonotone) {
  const auto d = make_data(33, 150, 20, 4);
  const auto m = models::fit_lr_l1(d.X, d.y, 0.02);
  ASSERT_FALSE(m.objective_trace.empty());
  for (std::size_t k = 1; k < m.objective_trace.size(); ++k) {
    EXPECT_GE(m.objective_trace[k], m.objective_trace[k - 1]);
  }
  EXPECT_NEAR(m.objective_trace.back(), models::lr_objective(d.X, d.y, m), 1e-12);
}

TEST(LrL1, SparsityDecreasesAlongTheGrid) {
  const auto d = make_data(34, 200, 25, 5);
  const auto lambdas = models::LambdaGrid{}.values();
  const auto path = models::fit_lr_path(d.X, d.y, lambdas);
  std::vector<double> nnz, lam;
  for (std::size_t i = 0; i < path.size(); ++i) {
    nnz.push_back(static_cast<double>(path[i].n_nonzero()));
    lam.push_back(lambdas[i]);
  }
  EXPECT_LE(stats::spearman(lam, nnz), 0.0);
  EXPECT_GE(path.front().n_nonzero(), path.back().n_nonzero());
}

TEST(LrL1, PathEqualsIndividualFits) {
  const auto d = make_data(35, 150, 10, 3);
  const std::vector<double> lambdas = {0.003, 0.05, 0.01};
  const auto path = models::fit_lr_path(d.X, d.y, lambdas);
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    const auto single = models::fit_lr_l1(d.X, d.y, lambdas[i]);
    EXPECT_EQ(path[i].lambda, lambdas[i]);
    EXPECT_NEAR((path[i].beta - single.beta).lpNorm<Eigen::Infinity>(), 0.0, 1e-5);
  }
}

TEST(LrL1, ConstantColumnStaysZeroAndScalingIsInvariant) {
  auto d = make_data(36, 150, 5, 2);
  d.X.col(4).setConstant(7.0);
  const auto m = models::fit_lr_l1(d.X, d.y, 0.01);
  EXPECT_EQ(m.beta(4), 0.0);
  Eigen::MatrixXd scaled = d.X;
  scaled.col(0) *= 1000.0;
  const auto ms = models::fit_lr_l1(scaled, d.y, 0.01);
  EXPECT_NEAR(ms.beta(0) * 1000.0, m.beta(0), 1e-6);
  EXPECT_NEAR(ms.beta0, m.beta0, 1e-6);
}

TEST(LrL1, RejectsBadInput) {
  auto d = make_data(37, 50, 3, 1);
  std::vector<int> all_zero(50, 0);
  EXPECT_THROW(models::fit_lr_l1(d.X, all_zero, 0.01), DegenerateError);
  d.X(3, 1) = std::nan("");
  EXPECT_THROW(models::fit_lr_l1(d.X, d.y, 0.01), InputError);
  EXPECT_THROW(models::fit_lr_l1(make_data(37, 50, 3, 1).X, d.y, -1.0), InputError);
}

TEST(LrL1, SeparableDataIsCappedWithWarning) {
  Eigen::MatrixXd X(40, 1);
  std::vector<int> y(40);
  for (int i = 0; i < 40; ++i) {
    X(i, 0) = i;
    y[static_cast<std::size_t>(i)] = i >= 20;
  }
  const auto m = models::fit_lr_l1(X, y, 0.0);
  EXPECT_TRUE(std::isfinite(m.beta(0)));
  EXPECT_GT(m.beta(0), 0.0);
}

TEST(Folds, StratifiedAndBalanced) {
  std::vector<int> y(103, 0);
  for (std::size_t i = 0; i < 103; i += 4) y[i] = 1;
  auto rng = make_rng(1, Stream::kFolds);
  const auto f = models::stratified_folds(y, 10, rng);
  std::vector<int> pos(10, 0), all(10, 0);
  for (std::size_t i = 0; i < y.size(); ++i) {
    ASSERT_GE(f[i], 0);
    ASSERT_LT(f[i], 10);
    pos[static_cast<std::size_t>(f[i])] += y[i];
    all[static_cast<std::size_t>(f[i])] += 1;
  }
  EXPECT_LE(*std::max_element(pos.begin(), pos.end()) - *std::min_element(pos.begin(), pos.end()), 1);
  EXPECT_LE(*std::max_element(all.begin(), all.end()) - *std::min_element(all.begin(), all.end()), 1);
  std::vector<int> few(20, 0);
  few[0] = 1;
  EXPECT_THROW(models::stratified_folds(few, 10, rng), DegenerateError);
}

TEST(Splits, EightyTwentyStratified) {
  std::vector<int> y(1200, 0);
  for (std::size_t i = 0; i < 300; ++i) y[i * 4 + 1] = 1;
  for (std::uint64_t s = 0; s < 50; ++s) {
    auto rng = make_rng(5, Stream::kSplit, s);
    const auto sp = models::stratified_split(y, 0.2, rng);
    ASSERT_EQ(sp.test.size(), 240u);
    ASSERT_EQ(sp.train.size(), 960u);
    int tp = 0;
    for (auto i : sp.test) tp += y[i];
    EXPECT_EQ(tp, 60);
    EXPECT_TRUE(std::is_sorted(sp.test.begin(), sp.test.end()));
    std::set<std::size_t> all(sp.train.begin(), sp.train.end());
    all.insert(sp.test.begin(), sp.test.end());
    EXPECT_EQ(all.size(), 1200u);
  }
}

TEST(Splits, BootstrapKeepsClassCounts) {
  std::vector<int> y(50, 0);
  for (std::size_t i = 0; i < 12; ++i) y[i * 4] = 1;
  auto rng = make_rng(6, Stream::kBootstrap);
  const auto rows = models::stratified_bootstrap(y, rng);
  ASSERT_EQ(rows.size(), 50u);
  int pos = 0;
  for (auto r : rows) pos += y[r];
  EXPECT_EQ(pos, 12);
  EXPECT_TRUE(std::is_sorted(rows.begin(), rows.end()));
}

TEST(CvLambda, DeterministicAndOnGrid) {
  const auto d = make_data(38, 200, 15, 3);
  models::LambdaGrid grid;
  grid.count = 40;
  grid.step = 0.075;
  const auto a = models::cv_lambda(d.X, d.y, 5, 9, grid);
  const auto b = models::cv_lambda(d.X, d.y, 5, 9, grid);
  EXPECT_EQ(a.best_index, b.best_index);
  EXPECT_EQ(a.mean_auc, b.mean_auc);
  EXPECT_EQ(a.lambda, grid.values()[a.best_index]);
  const double best = *std::max_element(a.mean_auc.begin(), a.mean_auc.end());
  EXPECT_EQ(a.mean_auc[a.best_index], best);
  for (std::size_t i = a.best_index + 1; i < a.mean_auc.size(); ++i) EXPECT_LT(a.mean_auc[i], best);
}

TEST(Classify, ThresholdIsInclusive) {
  EXPECT_EQ(models::classify(0.34, 0.34), 1);
  EXPECT_EQ(models::classify(0.3399, 0.34), 0);
}

}  // namespace
