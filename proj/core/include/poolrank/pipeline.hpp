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

// Command-level orchestration: the run configuration and one function per
// pipeline step. Every step reads its inputs from the configured paths and
// the output directory, and writes CSV/JSON artifacts there.

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "poolrank/classifier.hpp"
#include "poolrank/eval.hpp"
#include "poolrank/features.hpp"
#include "poolrank/geometry.hpp"
#include "poolrank/ingest.hpp"
#include "poolrank/synth.hpp"

namespace poolrank::pipeline {

struct Paths {
  std::filesystem::path manifest;
  std::filesystem::path stations;
  std::filesystem::path transactions;
  std::filesystem::path output_dir = "out";
};

//! Every setting of a run. Defaults reproduce the reference protocol:
//! 350 m buffers, top 25 % by popularity over calendar 2015, lambda grid
//! 10^(-4 + 0.015 i) for i < 201, 10-fold CV, 100 stratified 80/20 splits,
//! 500 bootstrap resamples, theta = 0.34 for ranking.
struct RunConfig {
  Paths paths;
  geo::BufferSpec buffer;
  double pool_merge_distance_m = 50.0;

  ingest::LabelingSpec labeling;
  std::string indicator = "popularity";

  features::PreprocessOptions preprocess;

  int theta_count = 100;  // thetas are i / theta_count
  models::LambdaGrid lambda_grid;
  int k = 10;
  int n_splits = 100;
  double test_fraction = 0.2;
  int n_resamples = 500;
  eval::CoefficientScaling scaling = eval::CoefficientScaling::kDivideBySd;
  double report_frequency = 0.9;

  std::uint64_t seed = 1;
  std::string method = "lr_l1";  // lr_l1, rf, gbrt or all
  double theta = 0.34;
  double alpha = 0.01;

  std::vector<models::ForestParams> forest_grid = models::default_forest_grid();
  std::vector<models::GbrtParams> gbrt_grid = models::default_gbrt_grid();
  int threads = 0;  // 0: all hardware threads

  std::vector<double> thetas() const;
  std::vector<models::Method> methods() const;
  models::TrainOptions train_options() const;

  //! Throws InputError on empty grids or out-of-range settings.
  void validate() const;

  //! Fully resolved JSON (every key present).
  std::string to_json() const;
  //! Missing keys keep their defaults; unknown keys are rejected.
  static RunConfig from_json(std::string_view text);
  static RunConfig load(const std::filesystem::path& path);
  void save(const std::filesystem::path& path) const;
};

//! Sets one key, addressed by a dotted path such as "buffer.radius" or
//! "seed". The value is parsed as JSON when possible, else taken as a
//! string. Throws InputError for unknown keys or ill-typed values.
void apply_override(RunConfig& config, std::string_view key, std::string_view value);

// Steps -------------------------------------------------------------------------

struct ExtractSummary {
  std::size_t n_pools = 0;
  std::size_t n_raw_predictors = 0;
  std::size_t n_predictors = 0;
  std::size_t n_positive = 0;
};

//! pools.csv, features.csv (pre-processed), features_raw.csv,
//! feature_report.json and run_config.json.
ExtractSummary run_extract(const RunConfig& config);

//! radius_sweep.csv: radius_m, n_predictors, r2, best. Returns the argmax radius.
double run_radius_sweep(const RunConfig& config);

//! model_<method>.json for every configured method.
void run_train(const RunConfig& config);

//! eval_report.json and roc_points.csv.
std::vector<eval::EnsembleResult> run_evaluate(const RunConfig& config);

//! ranking.csv from model_<method>.json (lr_l1 when method is "all").
void run_rank(const RunConfig& config);

//! coefficients.csv from the bootstrap of the l1 logistic model.
eval::BootstrapResult run_bootstrap(const RunConfig& config);

//! Writes a scenario into `dir` together with config.json, a run
//! configuration pointing at the scenario files with output in dir/out.
synth::Scenario run_synth(const synth::ScenarioSpec& spec, const std::filesystem::path& dir);

// Shared loaders ---------------------------------------------------------------

struct Dataset {
  std::vector<std::string> pool_ids;
  std::vector<std::string> names;
  Eigen::MatrixXd X;
  std::vector<int> y;
};

//! features.csv joined with the labels in pools.csv (by pool id).
Dataset load_dataset(const std::filesystem::path& output_dir);

}  // namespace poolrank::pipeline
