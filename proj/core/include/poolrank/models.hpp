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

// Ordinary least squares screening, l1-regularized logistic regression and
// the stratified resampling helpers shared by every cross-validation loop.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "poolrank/random.hpp"

namespace poolrank::models {

//! Throws InputError unless every entry is 0 or 1 and sizes match.
void validate_binary(std::span<const int> y, std::size_t n_rows);
//! Throws InputError on NaN or infinite entries.
void validate_finite(const Eigen::MatrixXd& X);

// OLS ----------------------------------------------------------------------

//! R^2 = 1 - SSR/SST of an OLS fit with intercept. The normal equations get
//! a 1e-8 ridge so collinear columns do not break the solve. Throws
//! DegenerateError when y has zero variance.
double ols_r2(const Eigen::MatrixXd& X, const Eigen::VectorXd& y);

// Grids and resampling ----------------------------------------------------

struct LambdaGrid {
  double base_exponent = -4.0;
  double step = 0.015;
  int count = 201;

  //! 10^(base + step*i), i = 0..count-1, ascending.
  std::vector<double> values() const;
};

//! Fold index per row for stratified k-fold CV: each class is shuffled and
//! dealt round-robin, positives first, negatives continuing the count.
//! Throws DegenerateError if a class has fewer than k members (some fold
//! would miss it).
std::vector<int> stratified_folds(std::span<const int> y, int k, Rng& rng);

struct Split {
  std::vector<std::size_t> train;  // ascending
  std::vector<std::size_t> test;   // ascending
};

//! Stratified holdout: test size round(test_fraction*n), test positives
//! round(test_size * n_pos / n).
Split stratified_split(std::span<const int> y, double test_fraction, Rng& rng);

//! Stratified bootstrap: n_pos draws with replacement from the positives and
//! n_neg from the negatives, sorted.
std::vector<std::size_t> stratified_bootstrap(std::span<const int> y, Rng& rng);

Eigen::MatrixXd take_rows(const Eigen::MatrixXd& X, std::span<const std::size_t> rows);
std::vector<int> take(std::span<const int> y, std::span<const std::size_t> rows);

// l1-regularized logistic regression ------------------------------------------

struct LrOptions {
  double tolerance = 1e-7;     // max coefficient change
  int max_sweeps = 10000;      // coordinate-descent sweeps, all outer steps
  double coefficient_cap = 1e4;
  bool strong_rules = true;
};

struct LrModel {
  double lambda = 0.0;
  //! Raw-scale coefficients: logit = beta0 + beta . x.
  double beta0 = 0.0;
  Eigen::VectorXd beta;
  //! Fit-time standardization (1/n variance) and the coefficients on that
  //! scale, which is where the penalty acts.
  Eigen::VectorXd center;
  Eigen::VectorXd scale;
  double beta0_std = 0.0;
  Eigen::VectorXd beta_std;

  int sweeps = 0;
  bool converged = false;
  //! Objective value after each accepted outer (Newton) step.
  std::vector<double> objective_trace;
  std::vector<std::string> warnings;

  std::size_t n_features() const { return static_cast<std::size_t>(beta.size()); }
  std::size_t n_nonzero() const;
  Eigen::VectorXd decision(const Eigen::MatrixXd& X) const;
  Eigen::VectorXd predict_proba(const Eigen::MatrixXd& X) const;
};

//! Column means and 1/n standard deviations. Constant columns get scale 0.
void column_moments(const Eigen::MatrixXd& X, Eigen::VectorXd& center, Eigen::VectorXd& scale);

//! Smallest lambda for which the all-zero coefficient vector is optimal:
//! max_j |(1/n) sum_i z_ij (y_i - ybar)| on standardized columns.
double lambda_max(const Eigen::MatrixXd& X, std::span<const int> y);

//! Penalized mean log-likelihood on the standardized scale:
//! (1/n) sum [y*eta - log(1 + e^eta)] - lambda * ||beta_std||_1.
double lr_objective(const Eigen::MatrixXd& X, std::span<const int> y, const LrModel& m);

LrModel fit_lr_l1(const Eigen::MatrixXd& X, std::span<const int> y, double lambda,
                  const LrOptions& options = {});

//! Fits every lambda (warm-started, largest first). The result is in the
//! order of `lambdas`.
std::vector<LrModel> fit_lr_path(const Eigen::MatrixXd& X, std::span<const int> y,
                                 std::span<const double> lambdas, const LrOptions& options = {});

struct CvResult {
  std::vector<double> lambdas;   // the grid, ascending
  std::vector<double> mean_auc;  // per grid value
  std::size_t best_index = 0;
  double lambda = 0.0;
};

//! Stratified k-fold CV of the lambda path by mean out-of-fold AUC; ties go
//! to the larger lambda. Folds come from Stream::kFolds of `seed`.
CvResult cv_lambda(const Eigen::MatrixXd& X, std::span<const int> y, int k, std::uint64_t seed,
                   const LambdaGrid& grid = {}, const LrOptions& options = {});

//! 1 iff score >= theta.
int classify(double score, double theta);

}  // namespace poolrank::models
