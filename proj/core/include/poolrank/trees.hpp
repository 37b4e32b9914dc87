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

// CART regression trees grown on squared error, bagged random forests and
// gradient-boosted regression trees, plus grid-search tuning.

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "poolrank/random.hpp"

namespace poolrank::models {

struct TreeParams {
  //! Maximum number of internal nodes; nodes are split breadth first.
  int max_splits = std::numeric_limits<int>::max();
  int min_leaf = 1;
  //! Candidate features per split; 0 means all.
  int features_per_split = 0;
};

struct TreeNode {
  int feature = -1;  // -1 for leaves
  double threshold = 0.0;  // rows with x[feature] <= threshold go left
  int left = -1;
  int right = -1;
  double value = 0.0;  // mean response of the node's training rows
  int n = 0;           // training rows (with bootstrap multiplicity)
};

class RegressionTree {
 public:
  std::vector<TreeNode> nodes;  // nodes[0] is the root

  int leaf_index(const double* x, std::size_t p) const;
  double predict(const double* x, std::size_t p) const;
  std::size_t n_leaves() const;
  std::size_t n_splits() const { return nodes.size() - n_leaves(); }
};

//! Fits one tree on the given rows of (X, y); rows may repeat. Splits are
//! exhaustive over candidate features (all, or `features_per_split` drawn
//! from rng per node). Thresholds are midpoints between consecutive
//! distinct values; ties in gain keep the lowest feature, then the lowest
//! threshold. A split must leave min_leaf rows on both sides.
RegressionTree fit_tree(const Eigen::MatrixXd& X, std::span<const double> y,
                        std::span<const std::size_t> rows, const TreeParams& params, Rng* rng = nullptr);

// Random forest -------------------------------------------------------------

struct ForestParams {
  int n_trees = 100;
  int min_leaf = 5;
  int max_splits = std::numeric_limits<int>::max();
  //! Features tried per split = ceil(p * fraction); 1/3 by default.
  double feature_fraction = 1.0 / 3.0;
};

struct ForestModel {
  ForestParams params;
  std::size_t n_features = 0;
  std::vector<RegressionTree> trees;
  std::vector<std::vector<std::size_t>> bootstrap;  // training rows per tree
  //! Leaf reached by each bootstrap member, per tree (aligned with bootstrap).
  std::vector<std::vector<int>> member_leaf;
  std::size_t n_train = 0;

  Eigen::VectorXd predict(const Eigen::MatrixXd& X) const;
  //! Weight of every training row in the prediction for x: the average over
  //! trees of (multiplicity of the row in x's leaf) / (leaf size). Sums to 1.
  std::vector<double> training_weights(const double* x, std::size_t p) const;
};

//! Trees are fit in parallel; tree t draws from Stream::kForest index t.
ForestModel fit_forest(const Eigen::MatrixXd& X, std::span<const double> y, const ForestParams& params,
                       std::uint64_t seed);

// Gradient boosting -------------------------------------------------------------

struct GbrtParams {
  int n_cycles = 100;
  double learn_rate = 0.1;
  int min_leaf = 5;
  int max_splits = 10;
  //! Stop (without adding the tree) when the training MSE improves by less.
  double stop_threshold = 1e-6;
};

struct GbrtModel {
  GbrtParams params;
  std::size_t n_features = 0;
  double f0 = 0.0;
  std::vector<RegressionTree> trees;  // leaf values are the gamma_j
  std::vector<double> train_mse;      // after 0, 1, ..., trees.size() trees

  //! Raw boosted score F_M(x) (not clamped).
  Eigen::VectorXd decision(const Eigen::MatrixXd& X) const;
  //! F_M(x) clamped to [0, 1].
  Eigen::VectorXd predict(const Eigen::MatrixXd& X) const;
};

GbrtModel fit_gbrt(const Eigen::MatrixXd& X, std::span<const double> y, const GbrtParams& params);

// Tuning ----------------------------------------------------------------------

struct TuneResult {
  std::size_t best_index = 0;
  std::vector<double> mean_auc;
};

//! Grid search by mean out-of-fold AUC over stratified folds drawn exactly
//! as in cv_lambda (Stream::kFolds of seed). Ties keep the earlier grid
//! entry. Throws InputError on an empty grid.
TuneResult tune_forest(const Eigen::MatrixXd& X, std::span<const int> y,
                       std::span<const ForestParams> grid, int k, std::uint64_t seed);
TuneResult tune_gbrt(const Eigen::MatrixXd& X, std::span<const int> y,
                     std::span<const GbrtParams> grid, int k, std::uint64_t seed);

std::vector<ForestParams> default_forest_grid();
std::vector<GbrtParams> default_gbrt_grid();

}  // namespace poolrank::models
