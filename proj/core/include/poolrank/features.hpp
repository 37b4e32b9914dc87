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

// Predictor extraction around charging pools and the pre-processing
// pipeline (median imputation, sparsity and correlation pruning).

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "poolrank/geometry.hpp"
#include "poolrank/ingest.hpp"
#include "poolrank/layer.hpp"

namespace poolrank::features {

enum class AttributeKind { kExtensive, kIntensive, kCategorical };

std::string_view to_string(AttributeKind k);

struct AttributeSpec {
  std::string name;
  AttributeKind kind = AttributeKind::kExtensive;
  //! Intensive only: weight by this attribute's buffer estimate instead of
  //! by intersection area.
  std::optional<std::string> weight_attribute;
  //! Categorical only: the finite category set, in output order.
  std::vector<std::string> categories;
};

//! Imputation rule applied to polygon attribute tables.
struct ImputationRule {
  enum class Type {
    kZeroWhen,     // set missing targets to 0 where condition holds
    kFillMissing,  // set missing target to a constant
    kDeriveRatio,  // missing target = numerator / denominator
  };
  enum class Comparison { kEqual, kLess };

  Type type = Type::kZeroWhen;
  std::string label;  // free text shown in the report
  std::string condition_attribute;
  Comparison comparison = Comparison::kEqual;
  double threshold = 0.0;
  std::vector<std::string> targets;
  double fill_value = 0.0;
  std::string numerator;
  std::string denominator;
};

enum class LayerRole { kPolygonAttributes, kRoads, kPoints, kRasterPoints };

struct LayerSpec {
  std::string name;
  std::string file;
  LayerRole role = LayerRole::kPolygonAttributes;

  // kPolygonAttributes
  std::vector<AttributeSpec> attributes;
  std::vector<ImputationRule> imputation;

  // kRoads
  std::string type_attribute = "road_type";
  std::vector<std::string> road_types = {"residential", "primary", "secondary", "tertiary"};
  std::vector<std::string> flow_attributes;
  //! Flow used for traffic density; empty means the sum of flow_attributes.
  std::string density_flow;

  // kPoints
  std::string category_attribute;  // empty: the whole layer is one category
  std::vector<std::string> categories;
  //! Points closer than this to the pool are the pool itself (not counted).
  double exclude_within_m = 0.0;

  // kRasterPoints
  std::vector<std::string> value_attributes;
};

//! The attributes.json document describing every layer of a scenario.
struct Manifest {
  int version = 1;
  std::vector<LayerSpec> layers;
  std::filesystem::path base_dir;

  static Manifest read(const std::filesystem::path& path);
  void write(const std::filesystem::path& path) const;
};

//! The default rule set for population-style polygons
//! (uninhabited, no income recipients, no buildings, no households,
//! missing urbanity, missing zip share, few metering points, household
//! size derivation). Rules referring to attributes a layer lacks are
//! skipped by impute_layer.
std::vector<ImputationRule> default_imputation_rules();

struct ImputationReport {
  std::string layer;
  std::vector<std::pair<std::string, std::size_t>> filled;  // rule label -> cells
};

//! Applies rules in order, kDeriveRatio rules last. Only missing cells are
//! written.
ImputationReport impute_layer(Layer& layer, std::span<const ImputationRule> rules);

struct LayerSet {
  Manifest manifest;
  std::vector<Layer> layers;  // same order as manifest.layers
  std::vector<ImputationReport> imputation;
};

//! Loads and imputes every manifest layer.
LayerSet load_layers(const Manifest& manifest, const geo::Projection& projection);

// Single-value extractors -------------------------------------------------

//! One polygon feature's overlap with a buffer.
struct Overlap {
  std::size_t feature;
  double area;      // intersection area, m^2
  double fraction;  // area / feature area
};

std::vector<Overlap> overlaps(const Layer& layer, const geo::Polygon& buffer);

//! Sum over overlaps of value * fraction; NaN if any overlapping feature is
//! missing the value.
double extract_extensive(const Layer& layer, const std::string& attribute,
                         const geo::Polygon& buffer);
double extract_extensive(const Layer& layer, const std::string& attribute,
                         std::span<const Overlap> ov);

//! Weighted mean over overlaps. Weights are intersection areas, or the
//! weight attribute's extensive estimate. NaN when the total weight is 0
//! or a contributing value is missing.
double extract_intensive(const Layer& layer, const std::string& attribute,
                         const geo::Polygon& buffer,
                         const std::optional<std::string>& weight_attribute = std::nullopt);
double extract_intensive(const Layer& layer, const std::string& attribute,
                         std::span<const Overlap> ov,
                         const std::optional<std::string>& weight_attribute = std::nullopt);

//! Share of the buffer area covered by each category.
std::vector<double> extract_categorical(const Layer& layer, const std::string& attribute,
                                        std::span<const std::string> categories,
                                        const geo::Polygon& buffer);

struct RoadFeatures {
  std::vector<double> closest_flows;  // one per flow attribute
  double traffic_density = 0.0;       // sum(clipped length * flow) / buffer area
  double road_density = 0.0;          // sum(clipped length) / buffer area
  std::vector<double> closest_type;   // one-hot over road_types
};

RoadFeatures extract_road_features(const Layer& roads, const LayerSpec& spec,
                                   geo::PointXY pool, const geo::Polygon& buffer);

struct PointFeatures {
  double density = 0.0;     // points per m^2 of buffer
  double nearest_m = 0.0;   // NaN when the category has no points
};

//! One entry per category (or a single entry when the layer is
//! uncategorized).
std::vector<PointFeatures> extract_point_features(const Layer& points, const LayerSpec& spec,
                                                  geo::PointXY pool, const geo::Polygon& buffer);

//! n_connectors, max_power_kw, latitude, longitude, rollout (strategic = 1).
std::vector<double> extract_pool_features(const ingest::PoolRecord& pool);

// Feature matrix ---------------------------------------------------------

struct ColumnInfo {
  std::string name;
  std::string source;
  std::string kind;
};

//! n x p predictor matrix; NaN marks missing cells.
struct FeatureMatrix {
  std::vector<std::string> row_ids;
  std::vector<ColumnInfo> columns;
  Eigen::MatrixXd values;

  std::size_t rows() const { return static_cast<std::size_t>(values.rows()); }
  std::size_t cols() const { return static_cast<std::size_t>(values.cols()); }
  bool missing(std::size_t i, std::size_t j) const;
  std::optional<std::size_t> column_index(std::string_view name) const;
  std::vector<std::string> column_names() const;
  //! Copy restricted to the given column indices (in order).
  FeatureMatrix select_columns(std::span<const std::size_t> keep) const;
};

//! Predictor names in extraction order for a manifest.
std::vector<ColumnInfo> predictor_columns(const LayerSet& layers);

//! Extracts all predictors for every pool (parallel across pools).
FeatureMatrix extract_features(const LayerSet& layers, std::span<const ingest::PoolRecord> pools,
                               const geo::BufferSpec& buffer);

enum class CorrelationGrouping {
  kClique,     // groups where every pair exceeds the threshold
  kComponent,  // connected components of the threshold graph
};

struct PreprocessOptions {
  double max_missing_fraction = 0.015;  // impute when strictly below
  double max_zero_fraction = 0.95;      // drop when strictly above
  double max_abs_correlation = 0.95;    // prune when strictly above
  CorrelationGrouping grouping = CorrelationGrouping::kClique;
};

struct ColumnDrop {
  std::string column;
  std::string reason;  // "missing", "sparse", "constant", "correlated"
  std::string detail;
};

struct ColumnImputation {
  std::string column;
  std::size_t n_missing = 0;
  double median = 0.0;
};

struct PreprocessReport {
  std::size_t n_rows = 0;
  std::size_t n_input_columns = 0;
  std::vector<ColumnDrop> drops;
  std::vector<ColumnImputation> imputations;
};

struct PreprocessResult {
  FeatureMatrix matrix;
  PreprocessReport report;
};

PreprocessResult preprocess(const FeatureMatrix& raw, const PreprocessOptions& options = {});

double pearson(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

// Files ---------------------------------------------------------------------

//! features.csv: pool_id column followed by one column per predictor.
void write_features_csv(const std::filesystem::path& path, const FeatureMatrix& m);
FeatureMatrix read_features_csv(const std::filesystem::path& path);

}  // namespace poolrank::features
