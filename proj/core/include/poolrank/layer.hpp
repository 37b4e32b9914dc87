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

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "poolrank/geometry.hpp"

namespace poolrank::features {

enum class GeometryKind { kPolygon, kPolyline, kPoint };

//! Per-feature attribute table. Numeric columns use NaN for missing values;
//! a GeoJSON property that is a string anywhere becomes a text column.
struct AttributeTable {
  std::size_t rows = 0;
  std::map<std::string, std::vector<double>> numeric;
  std::map<std::string, std::vector<std::string>> text;

  bool has_numeric(const std::string& name) const { return numeric.contains(name); }
  //! Throws InputError when the column is absent.
  const std::vector<double>& require_numeric(const std::string& name) const;
  const std::vector<std::string>& require_text(const std::string& name) const;
  std::vector<double>& numeric_column(const std::string& name);
};

//! A geometry collection with one attribute row per feature. Multi-part
//! geometries are flattened into parts that point back at their feature.
struct Layer {
  std::string name;
  GeometryKind kind = GeometryKind::kPolygon;

  std::vector<geo::Polygon> polygons;
  std::vector<geo::Polyline> polylines;
  std::vector<geo::PointXY> points;
  std::vector<std::size_t> part_feature;  // part index -> feature row

  //! Total area per feature (polygon layers only).
  std::vector<double> feature_area;
  AttributeTable attributes;
  //! Features dropped or repaired while loading.
  std::vector<std::string> warnings;

  std::size_t part_count() const;
  std::size_t feature_count() const { return attributes.rows; }

  //! Builds the bounding-box grid over parts. Called by the loader.
  void build_index(double cell_size = 500.0);
  const geo::GridIndex& index() const { return index_; }

 private:
  geo::GridIndex index_;
};

//! Reads a GeoJSON FeatureCollection in WGS84 lon/lat and projects it.
//! Polygons with area below 1e-6 m^2 are dropped with a warning;
//! self-intersecting rings are rejected with InputError.
Layer read_geojson(const std::filesystem::path& path, const std::string& name,
                   const geo::Projection& projection);

//! Writes a layer back to GeoJSON (lon/lat, inverse projection). Text
//! attributes are written as strings, NaN numerics as null.
void write_geojson(const std::filesystem::path& path, const Layer& layer,
                   const geo::Projection& projection);

}  // namespace poolrank::features
