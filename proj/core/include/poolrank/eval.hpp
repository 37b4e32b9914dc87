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

// Classification metrics, ROC/AUC, the uniform-score null model, threshold
// sweeps, repeated-split ensembles, AUC comparison tests and bootstrap
// coefficient stability.

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "poolrank/classifier.hpp"

namespace poolrank::eval {

struct ConfusionMatrix {
  std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
  std::size_t n() const { return tp + fp + tn + fn; }
};

//! Counts classify(score, theta) against y. Throws InputError on length
//! mismatch or non-binary y.
ConfusionMatrix confusion(std::span<const int> y, std::span<const double> scores, double theta);

struct MetricSet {
  double accuracy = 0.0;
  double precision = 0.0;
  double sensitivity = 0.0;
  double fall_out = 0.0;
  double f_score = 0.0;
  double mcc = 0.0;
};

inline constexpr const char* kMetricNames[] = {"accuracy", "precision", "sensitivity",
                                               "fall_out", "f_score",   "mcc"};
double metric_value(const MetricSet& m, std::size_t i);

//! Any metric whose denominator is zero is 0.
MetricSet metrics(const ConfusionMatrix& c);

//! {0, 0.01, ..., 0.99}, computed as i/100.
std::vector<double> theta_grid();

struct RocPoint {
  double fpr = 0.0;
  double tpr = 0.0;
};

struct RocResult {
  std::vector<RocPoint> points;  // (0,0) ... (1,1), one step per distinct score
  double auc = 0.0;
};

//! Throws DegenerateError unless both classes are present.
RocResult roc_auc(std::span<const int> y, std::span<const double> scores);
double auc(std::span<const int> y, std::span<const double> scores);

struct NullExpectation {
  MetricSet expected;
  //! The same values with precision and sensitivity swapped, for reports
  //! compared against tables that use that labelling.
  MetricSet legacy_labels;
};

//! Expected metrics of a classifier whose score is Uniform(0,1) independent
//! of the truth, at prevalence pi: accuracy pi + (1-2pi)theta, precision pi,
//! sensitivity = fall-out = 1-theta, F = 2pi(1-theta)/(pi+1-theta), MCC 0.
NullExpectation null_expectations(double theta, double prevalence = 0.25);

struct SweepResult {
  std::vector<double> thetas;
  std::vector<MetricSet> curves;  // one per theta
  double theta_mcc_max = 0.0;
  double theta_f_max = 0.0;
};

//! Argmax positions of MCC and F-score on a curve; ties keep the smaller theta.
void select_thresholds(SweepResult& s);
//! Sweeps `thetas` (the default grid when empty).
SweepResult sweep_and_select(std::span<const int> y, std::span<const double> scores,
                             std::span<const double> thetas = {});

struct SplitOutcome {
  double auc = 0.0;
  double oracle_auc = 0.0;  // NaN unless oracle scores were supplied
  std::vector<MetricSet> curves;
  std::vector<RocPoint> roc;
  double selected = 0.0;  // lambda or grid index
  std::size_t n_test = 0;
  std::size_t n_test_pos = 0;
};

struct EnsembleResult {
  models::Method method = models::Method::kLrL1;
  std::vector<double> thetas;
  std::vector<SplitOutcome> splits;
  std::vector<MetricSet> mean;  // per theta
  std::vector<MetricSet> sd;    // per theta, n-1 denominator
  double theta_mcc_max = 0.0;   // from the mean curves
  double theta_f_max = 0.0;
  std::vector<double> aucs() const;
  double mean_auc() const;
  double mean_oracle_auc() const;
};

struct EnsembleOptions {
  int n_splits = 100;
  double test_fraction = 0.2;
  std::vector<double> thetas;  // empty: theta_grid()
  models::TrainOptions train;
};

//! Split s uses Stream::kSplit index s of `seed`; its training run uses
//! derive_seed(seed, Stream::kSplit, s) as its own master seed. Splits run
//! in parallel and are aggregated in index order. `oracle_scores`, when
//! non-empty, is scored on every test set for comparison.
EnsembleResult ensemble_experiment(const Eigen::MatrixXd& X, std::span<const int> y, models::Method method,
                                   const EnsembleOptions& options, std::uint64_t seed,
                                   std::span<const double> oracle_scores = {});

struct AucComparison {
  double var_a = 0.0, var_b = 0.0;
  double f_statistic = 0.0;
  double f_p_value = 1.0;
  bool equal_variances = true;
  std::string mean_test;  // "pooled" or "welch"
  double t_statistic = 0.0;
  double df = 0.0;
  double t_p_value = 1.0;
};

//! Two-sided F-test of equal variances; Welch t-test if rejected at alpha,
//! pooled t-test otherwise. Throws DegenerateError when both ensembles have
//! zero variance and InputError when sizes differ or are < 2.
AucComparison compare_auc(std::span<const double> a, std::span<const double> b, double alpha = 0.01);

enum class CoefficientScaling {
  kDivideBySd,    // beta / sd(x)
  kMultiplyBySd,  // beta * sd(x), the effect-size convention
};

struct BootstrapOptions {
  int n_resamples = 500;
  int k = 10;
  models::LambdaGrid lambda_grid;
  models::LrOptions lr;
  CoefficientScaling scaling = CoefficientScaling::kDivideBySd;
  double report_frequency = 0.9;
};

struct CoefficientSummary {
  std::string predictor;
  double median = 0.0, q1 = 0.0, q3 = 0.0;
  double selection_frequency = 0.0;  // share of resamples with beta != 0
  double zero_fraction = 0.0;
  bool reported = false;  // selection_frequency >= report_frequency
};

struct BootstrapResult {
  std::vector<CoefficientSummary> coefficients;
  Eigen::MatrixXd standardized;  // n_resamples x p
  std::vector<double> lambdas;   // selected per resample
};

//! Resample b uses Stream::kBootstrap index b. Each resample is drawn
//! stratified, so it always contains both classes.
BootstrapResult bootstrap_coefficients(const Eigen::MatrixXd& X, std::span<const int> y,
                                       std::span<const std::string> names, const BootstrapOptions& options,
                                       std::uint64_t seed);

// Report files ----------------------------------------------------------------

void write_roc_points_csv(const std::filesystem::path& path, std::span<const EnsembleResult> results);
void write_coefficients_csv(const std::filesystem::path& path, const BootstrapResult& r);

}  // namespace poolrank::eval
