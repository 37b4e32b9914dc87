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

// A fitted classifier of any of the three kinds, the shared training entry
// point (with internal cross-validation) and versioned JSON persistence.

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <Eigen/Core>

#include "poolrank/models.hpp"
#include "poolrank/trees.hpp"

namespace poolrank::models {

enum class Method { kLrL1, kForest, kGbrt };

//! "lr_l1", "rf", "gbrt".
std::string_view to_string(Method m);
Method parse_method(std::string_view s);
inline constexpr Method kAllMethods[] = {Method::kLrL1, Method::kForest, Method::kGbrt};

struct TrainOptions {
  int k = 10;
  LambdaGrid lambda_grid;
  LrOptions lr;
  std::vector<ForestParams> forest_grid = default_forest_grid();
  std::vector<GbrtParams> gbrt_grid = default_gbrt_grid();
};

struct Classifier {
  Method method = Method::kLrL1;
  std::vector<std::string> feature_names;
  std::variant<LrModel, ForestModel, GbrtModel> model;
  //! Mean out-of-fold AUC of the selected setting (lambda or grid entry).
  double cv_auc = 0.0;
  //! Index of the selected lambda / grid entry.
  std::size_t selected_index = 0;

  //! Scores in [0, 1] for rows laid out like the training matrix.
  Eigen::VectorXd predict_proba(const Eigen::MatrixXd& X) const;
};

//! Cross-validates the hyperparameters (lambda for lr_l1, the grid for the
//! tree methods) on (X, y) with folds from `seed`, then refits on all rows.
Classifier train_classifier(Method method, const Eigen::MatrixXd& X, std::span<const int> y,
                            std::vector<std::string> feature_names, const TrainOptions& options,
                            std::uint64_t seed);

inline constexpr int kModelFormatVersion = 1;

std::string classifier_to_json(const Classifier& c);
//! Throws InputError on a format or version mismatch.
Classifier classifier_from_json(std::string_view text);

void save_classifier(const std::filesystem::path& path, const Classifier& c);
Classifier load_classifier(const std::filesystem::path& path);

}  // namespace poolrank::models
