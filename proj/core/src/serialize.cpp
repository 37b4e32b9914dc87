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

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "poolrank/classifier.hpp"
#include "poolrank/error.hpp"

namespace poolrank::models {

using nlohmann::json;

namespace {

constexpr const char* kFormat = "poolrank-model";

json vec_json(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

Eigen::VectorXd vec_from(const json& j) {
  const auto v = j.get<std::vector<double>>();
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

json tree_json(const RegressionTree& t) {
  // Column layout keeps files compact.
  std::vector<int> feature, left, right, n;
  std::vector<double> threshold, value;
  for (const auto& nd : t.nodes) {
    feature.push_back(nd.feature);
    left.push_back(nd.left);
    right.push_back(nd.right);
    n.push_back(nd.n);
    threshold.push_back(nd.threshold);
    value.push_back(nd.value);
  }
  return {{"feature", feature}, {"threshold", threshold}, {"left", left},
          {"right", right},     {"value", value},         {"n", n}};
}

RegressionTree tree_from(const json& j) {
  RegressionTree t;
  const auto feature = j.at("feature").get<std::vector<int>>();
  const auto threshold = j.at("threshold").get<std::vector<double>>();
  const auto left = j.at("left").get<std::vector<int>>();
  const auto right = j.at("right").get<std::vector<int>>();
  const auto value = j.at("value").get<std::vector<double>>();
  const auto n = j.at("n").get<std::vector<int>>();
  const std::size_t m = feature.size();
  if (threshold.size() != m || left.size() != m || right.size() != m || value.size() != m || n.size() != m || m == 0) {
    throw InputError("model file: inconsistent tree arrays");
  }
  for (std::size_t i = 0; i < m; ++i) {
    if (feature[i] >= 0 && (left[i] <= static_cast<int>(i) || right[i] <= static_cast<int>(i) ||
                            left[i] >= static_cast<int>(m) || right[i] >= static_cast<int>(m))) {
      throw InputError("model file: invalid tree child index");
    }
    t.nodes.push_back({feature[i], threshold[i], left[i], right[i], value[i], n[i]});
  }
  return t;
}

}  // namespace

std::string classifier_to_json(const Classifier& c) {
  json doc = {{"format", kFormat},
              {"version", kModelFormatVersion},
              {"method", std::string(to_string(c.method))},
              {"feature_names", c.feature_names},
              {"cv_auc", c.cv_auc},
              {"selected_index", c.selected_index}};
  if (const auto* lr = std::get_if<LrModel>(&c.model)) {
    doc["lr"] = {{"lambda", lr->lambda},
                 {"beta0", lr->beta0},
                 {"beta", vec_json(lr->beta)},
                 {"center", vec_json(lr->center)},
                 {"scale", vec_json(lr->scale)},
                 {"beta0_std", lr->beta0_std},
                 {"beta_std", vec_json(lr->beta_std)},
                 {"converged", lr->converged},
                 {"sweeps", lr->sweeps}};
  } else if (const auto* rf = std::get_if<ForestModel>(&c.model)) {
    json trees = json::array();
    for (std::size_t t = 0; t < rf->trees.size(); ++t) {
      json jt = tree_json(rf->trees[t]);
      jt["bootstrap"] = rf->bootstrap[t];
      jt["member_leaf"] = rf->member_leaf[t];
      trees.push_back(std::move(jt));
    }
    doc["forest"] = {{"n_trees", rf->params.n_trees},
                     {"min_leaf", rf->params.min_leaf},
                     {"max_splits", rf->params.max_splits},
                     {"feature_fraction", rf->params.feature_fraction},
                     {"n_features", rf->n_features},
                     {"n_train", rf->n_train},
                     {"trees", trees}};
  } else {
    const auto& gb = std::get<GbrtModel>(c.model);
    json trees = json::array();
    for (const auto& t : gb.trees) trees.push_back(tree_json(t));
    doc["gbrt"] = {{"n_cycles", gb.params.n_cycles},
                   {"learn_rate", gb.params.learn_rate},
                   {"min_leaf", gb.params.min_leaf},
                   {"max_splits", gb.params.max_splits},
                   {"stop_threshold", gb.params.stop_threshold},
                   {"n_features", gb.n_features},
                   {"f0", gb.f0},
                   {"train_mse", gb.train_mse},
                   {"trees", trees}};
  }
  return doc.dump(1) + "\n";
}

Classifier classifier_from_json(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InputError(std::string("model file is not valid JSON: ") + e.what());
  }
  if (!doc.is_object() || doc.value("format", "") != kFormat) throw InputError("not a poolrank model file");
  const int version = doc.value("version", -1);
  if (version != kModelFormatVersion) {
    throw InputError("model file version " + std::to_string(version) + " is not supported (expected " +
                     std::to_string(kModelFormatVersion) + ")");
  }
  Classifier c;
  try {
    c.method = parse_method(doc.at("method").get<std::string>());
    c.feature_names = doc.at("feature_names").get<std::vector<std::string>>();
    c.cv_auc = doc.at("cv_auc").get<double>();
    c.selected_index = doc.at("selected_index").get<std::size_t>();
    switch (c.method) {
      case Method::kLrL1: {
        const auto& j = doc.at("lr");
        LrModel m;
        m.lambda = j.at("lambda").get<double>();
        m.beta0 = j.at("beta0").get<double>();
        m.beta = vec_from(j.at("beta"));
        m.center = vec_from(j.at("center"));
        m.scale = vec_from(j.at("scale"));
        m.beta0_std = j.at("beta0_std").get<double>();
        m.beta_std = vec_from(j.at("beta_std"));
        m.converged = j.at("converged").get<bool>();
        m.sweeps = j.at("sweeps").get<int>();
        c.model = std::move(m);
        break;
      }
      case Method::kForest: {
        const auto& j = doc.at("forest");
        ForestModel m;
        m.params.n_trees = j.at("n_trees").get<int>();
        m.params.min_leaf = j.at("min_leaf").get<int>();
        m.params.max_splits = j.at("max_splits").get<int>();
        m.params.feature_fraction = j.at("feature_fraction").get<double>();
        m.n_features = j.at("n_features").get<std::size_t>();
        m.n_train = j.at("n_train").get<std::size_t>();
        for (const auto& jt : j.at("trees")) {
          m.trees.push_back(tree_from(jt));
          m.bootstrap.push_back(jt.at("bootstrap").get<std::vector<std::size_t>>());
          m.member_leaf.push_back(jt.at("member_leaf").get<std::vector<int>>());
        }
        c.model = std::move(m);
        break;
      }
      case Method::kGbrt: {
        const auto& j = doc.at("gbrt");
        GbrtModel m;
        m.params.n_cycles = j.at("n_cycles").get<int>();
        m.params.learn_rate = j.at("learn_rate").get<double>();
        m.params.min_leaf = j.at("min_leaf").get<int>();
        m.params.max_splits = j.at("max_splits").get<int>();
        m.params.stop_threshold = j.at("stop_threshold").get<double>();
        m.n_features = j.at("n_features").get<std::size_t>();
        m.f0 = j.at("f0").get<double>();
        m.train_mse = j.at("train_mse").get<std::vector<double>>();
        for (const auto& jt : j.at("trees")) m.trees.push_back(tree_from(jt));
        c.model = std::move(m);
        break;
      }
    }
  } catch (const json::exception& e) {
    throw InputError(std::string("malformed model file: ") + e.what());
  }
  return c;
}

void save_classifier(const std::filesystem::path& path, const Classifier& c) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path.string());
  out << classifier_to_json(c);
}

Classifier load_classifier(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open model file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return classifier_from_json(ss.str());
  } catch (const InputError& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

}  // namespace poolrank::models
