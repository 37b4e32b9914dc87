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

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "poolrank/classifier.hpp"
#include "poolrank/error.hpp"
#include "poolrank/trees.hpp"

using namespace poolrank;

namespace {

void expect_same(const models::RegressionTree& t, int k, const oracle::Node& o) {
  const auto& nd = t.nodes[static_cast<std::size_t>(k)];
  ASSERT_EQ(static_cast<std::size_t>(nd.n), o.n);
  EXPECT_NEAR(nd.value, o.value, 1e-12);
  ASSERT_EQ(nd.feature, o.feature);
  if (o.feature < 0) return;
  EXPECT_EQ(nd.threshold, o.threshold);
  expect_same(t, nd.left, *o.left);
  expect_same(t, nd.right, *o.right);
}

struct Problem {
  Eigen::MatrixXd X;
  std::vector<double> y;
};

Problem random_problem(std::mt19937_64& rng, int n, int p, bool coarse) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Problem pr{Eigen::MatrixXd(n, p), std::vector<double>(static_cast<std::size_t>(n))};
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < p; ++j) pr.X(i, j) = coarse ? std::floor(5 * u(rng)) : u(rng);
    pr.y[static_cast<std::size_t>(i)] = coarse ? (u(rng) < 0.5) : pr.X(i, 0) + 0.2 * u(rng);
  }
  return pr;
}

TEST(Tree, MatchesExhaustiveOracle) {
  std::mt19937_64 rng(41);
  for (int t = 0; t < 200; ++t) {
    const int n = 2 + t % 29, p = 1 + t % 4;
    const auto pr = random_problem(rng, n, p, t % 2 == 0);
    std::vector<std::size_t> rows(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) rows[static_cast<std::size_t>(i)] = static_cast<std::size_t>(i);
    models::TreeParams params;
    params.min_leaf = 1 + t % 3;
    const auto tree = models::fit_tree(pr.X, pr.y, rows, params);
    const auto ref = oracle::exhaustive_cart(pr.X, pr.y, rows, {params.min_leaf, params.max_splits});
    expect_same(tree, 0, *ref);
  }
}

TEST(Tree, PredictsLeafMeansAndRespectsMinLeaf) {
  std::mt19937_64 rng(42);
  const auto pr = random_problem(rng, 60, 3, false);
  std::vector<std::size_t> rows(60);
  for (std::size_t i = 0; i < 60; ++i) rows[i] = i;
  models::TreeParams params;
  params.min_leaf = 7;
  const auto tree = models::fit_tree(pr.X, pr.y, rows, params);
  for (const auto& nd : tree.nodes) {
    if (nd.feature < 0) {
      EXPECT_GE(nd.n, 7);
    }
  }
  params.max_splits = 3;
  const auto small = models::fit_tree(pr.X, pr.y, rows, params);
  EXPECT_EQ(small.n_splits(), 3u);
  EXPECT_EQ(small.n_leaves(), 4u);
}

TEST(Tree, ConstantResponseIsASingleLeaf) {
  Eigen::MatrixXd X(10, 2);
  X.setRandom();
  const std::vector<double> y(10, 0.3);
  const std::vector<std::size_t> rows = {0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
  const auto tree = models::fit_tree(X, y, rows, {});
  ASSERT_EQ(tree.nodes.size(), 1u);
  EXPECT_DOUBLE_EQ(tree.nodes[0].value, 0.3);
}

TEST(Forest, WeightsSumToOneAndReproducePredictions) {
  std::mt19937_64 rng(43);
  const auto pr = random_problem(rng, 90, 4, false);
  models::ForestParams fp;
  fp.n_trees = 20;
  const auto f = models::fit_forest(pr.X, pr.y, fp, 3);
  const Eigen::VectorXd pred = f.predict(pr.X);
  for (Eigen::Index i = 0; i < pr.X.rows(); ++i) {
    const Eigen::RowVectorXd q = pr.X.row(i);
    const auto w = f.training_weights(q.data(), 4);
    double s = 0, wy = 0;
    for (std::size_t k = 0; k < w.size(); ++k) {
      EXPECT_GE(w[k], 0.0);
      s += w[k];
      wy += w[k] * pr.y[k];
    }
    EXPECT_NEAR(s, 1.0, 1e-12);
    EXPECT_NEAR(wy, pred(i), 1e-12);
  }
}

TEST(Forest, DeterministicForASeed) {
  std::mt19937_64 rng(44);
  const auto pr = random_problem(rng, 80, 5, false);
  models::ForestParams fp;
  fp.n_trees = 15;
  const auto a = models::fit_forest(pr.X, pr.y, fp, 7);
  const auto b = models::fit_forest(pr.X, pr.y, fp, 7);
  EXPECT_EQ(a.predict(pr.X), b.predict(pr.X));
  const auto c = models::fit_forest(pr.X, pr.y, fp, 8);
  EXPECT_NE(a.predict(pr.X), c.predict(pr.X));
}

TEST(Gbrt, TrainingErrorNeverIncreases) {
  std::mt19937_64 rng(45);
  for (int t = 0; t < 10; ++t) {
    const auto pr = random_problem(rng, 100, 3, t % 2 == 0);
    models::GbrtParams gp;
    gp.n_cycles = 40;
    const auto m = models::fit_gbrt(pr.X, pr.y, gp);
    ASSERT_EQ(m.train_mse.size(), m.trees.size() + 1);
    for (std::size_t k = 1; k < m.train_mse.size(); ++k) EXPECT_LE(m.train_mse[k], m.train_mse[k - 1]);
    double mean = 0;
    for (double v : pr.y) mean += v;
    EXPECT_NEAR(m.f0, mean / 100, 1e-12);
    const Eigen::VectorXd p = m.predict(pr.X);
    EXPECT_GE(p.minCoeff(), 0.0);
    EXPECT_LE(p.maxCoeff(), 1.0);
  }
}

TEST(Gbrt, StopsWhenImprovementIsBelowThreshold) {
  std::mt19937_64 rng(46);
  const auto pr = random_problem(rng, 60, 2, false);
  models::GbrtParams gp;
  gp.n_cycles = 500;
  gp.stop_threshold = 1e-3;
  const auto m = models::fit_gbrt(pr.X, pr.y, gp);
  EXPECT_LT(m.trees.size(), 500u);
  for (std::size_t k = 1; k < m.train_mse.size(); ++k) EXPECT_GE(m.train_mse[k - 1] - m.train_mse[k], 1e-3);
}

TEST(Tuning, GridsAndTieBreaking) {
  std::mt19937_64 rng(47);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Eigen::MatrixXd X(80, 3);
  std::vector<int> y(80);
  for (int i = 0; i < 80; ++i) {
    for (int j = 0; j < 3; ++j) X(i, j) = u(rng);
    y[static_cast<std::size_t>(i)] = u(rng) < X(i, 0);
  }
  const std::vector<models::GbrtParams> same(3);
  const auto r = models::tune_gbrt(X, y, same, 4, 1);
  EXPECT_EQ(r.best_index, 0u);
  EXPECT_EQ(r.mean_auc[0], r.mean_auc[2]);
  EXPECT_THROW(models::tune_forest(X, y, std::vector<models::ForestParams>{}, 4, 1), InputError);
}

TEST(Classifier, JsonRoundTripPreservesPredictions) {
  std::mt19937_64 rng(48);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Eigen::MatrixXd X(120, 4);
  std::vector<int> y(120);
  for (int i = 0; i < 120; ++i) {
    for (int j = 0; j < 4; ++j) X(i, j) = u(rng);
    y[static_cast<std::size_t>(i)] = u(rng) < X(i, 1);
  }
  models::TrainOptions opt;
  opt.k = 3;
  opt.lambda_grid.count = 20;
  opt.lambda_grid.step = 0.15;
  opt.forest_grid.resize(1);
  opt.forest_grid[0].n_trees = 10;
  opt.gbrt_grid.resize(1);
  for (auto method : models::kAllMethods) {
    const auto c = models::train_classifier(method, X, y, {"a", "b", "c", "d"}, opt, 4);
    const auto back = models::classifier_from_json(models::classifier_to_json(c));
    EXPECT_EQ(back.method, method);
    EXPECT_EQ(back.feature_names, c.feature_names);
    EXPECT_EQ(back.predict_proba(X), c.predict_proba(X));
  }
}

TEST(Classifier, RefusesOtherFormatVersions) {
  EXPECT_THROW(models::classifier_from_json(R"({"format": "poolrank-model", "version": 999, "method": "lr_l1"})"), InputError);
  EXPECT_THROW(models::classifier_from_json("not json"), InputError);
}

}  // namespace
