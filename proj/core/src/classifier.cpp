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

#include "poolrank/classifier.hpp"

#include "poolrank/error.hpp"

namespace poolrank::models {

std::string_view to_string(Method m) {
  switch (m) {
    case Method::kLrL1: return "lr_l1";
    case Method::kForest: return "rf";
    case Method::kGbrt: return "gbrt";
  }
  return {};
}

Method parse_method(std::string_view s) {
  if (s == "lr_l1") return Method::kLrL1;
  if (s == "rf") return Method::kForest;
  if (s == "gbrt") return Method::kGbrt;
  throw InputError("unknown method '" + std::string(s) + "' (expected lr_l1, rf or gbrt)");
}

Eigen::VectorXd Classifier::predict_proba(const Eigen::MatrixXd& X) const {
  if (static_cast<std::size_t>(X.cols()) != feature_names.size()) {
    throw InputError("classifier expects " + std::to_string(feature_names.size()) + " predictors, got " +
                     std::to_string(X.cols()));
  }
  return std::visit(
      [&](const auto& m) -> Eigen::VectorXd {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, LrModel>) {
          return m.predict_proba(X);
        } else if constexpr (std::is_same_v<T, ForestModel>) {
          // Leaf means of a 0/1 response already lie in [0, 1].
          return m.predict(X);
        } else {
          return m.predict(X);
        }
      },
      model);
}

Classifier train_classifier(Method method, const Eigen::MatrixXd& X, std::span<const int> y,
                            std::vector<std::string> feature_names, const TrainOptions& options,
                            std::uint64_t seed) {
  validate_binary(y, static_cast<std::size_t>(X.rows()));
  if (feature_names.size() != static_cast<std::size_t>(X.cols())) {
    throw InputError("feature name count does not match predictor columns");
  }
  Classifier c;
  c.method = method;
  c.feature_names = std::move(feature_names);
  const std::vector<double> yd(y.begin(), y.end());
  switch (method) {
    case Method::kLrL1: {
      const auto cv = cv_lambda(X, y, options.k, seed, options.lambda_grid, options.lr);
      c.selected_index = cv.best_index;
      c.cv_auc = cv.mean_auc[cv.best_index];
      c.model = fit_lr_l1(X, y, cv.lambda, options.lr);
      break;
    }
    case Method::kForest: {
      const auto t = tune_forest(X, y, options.forest_grid, options.k, seed);
      c.selected_index = t.best_index;
      c.cv_auc = t.mean_auc[t.best_index];
      c.model = fit_forest(X, yd, options.forest_grid[t.best_index], derive_seed(seed, Stream::kForest));
      break;
    }
    case Method::kGbrt: {
      const auto t = tune_gbrt(X, y, options.gbrt_grid, options.k, seed);
      c.selected_index = t.best_index;
      c.cv_auc = t.mean_auc[t.best_index];
      c.model = fit_gbrt(X, yd, options.gbrt_grid[t.best_index]);
      break;
    }
  }
  return c;
}

}  // namespace poolrank::models
