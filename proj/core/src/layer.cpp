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

#include "poolrank/layer.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <set>

#include <nlohmann/json.hpp>

#include "poolrank/error.hpp"

namespace poolrank::features {

using nlohmann::json;

namespace {

constexpr double kMinPolygonArea = 1e-6;  // m^2

geo::PointXY read_position(const json& pos, const geo::Projection& proj) {
  if (!pos.is_array() || pos.size() < 2) throw InputError("GeoJSON position must be [lon, lat]");
  return proj.forward(pos[0].get<double>(), pos[1].get<double>());
}

geo::Ring read_ring(const json& coords, const geo::Projection& proj) {
  geo::Ring ring;
  ring.reserve(coords.size());
  for (const auto& p : coords) ring.push_back(read_position(p, proj));
  return ring;
}

json write_position(geo::PointXY p, const geo::Projection& proj) {
  const auto ll = proj.inverse(p);
  return json::array({ll[0], ll[1]});
}

json write_ring(const geo::Ring& ring, const geo::Projection& proj) {
  json out = json::array();
  for (const auto& p : ring) out.push_back(write_position(p, proj));
  out.push_back(write_position(ring.front(), proj));
  return out;
}

}  // namespace

const std::vector<double>& AttributeTable::require_numeric(const std::string& name) const {
  auto it = numeric.find(name);
  if (it == numeric.end()) throw InputError("missing numeric attribute '" + name + "'");
  return it->second;
}

const std::vector<std::string>& AttributeTable::require_text(const std::string& name) const {
  auto it = text.find(name);
  if (it == text.end()) throw InputError("missing text attribute '" + name + "'");
  return it->second;
}

std::vector<double>& AttributeTable::numeric_column(const std::string& name) {
  auto [it, inserted] = numeric.try_emplace(name);
  if (inserted) it->second.assign(rows, std::numeric_limits<double>::quiet_NaN());
  return it->second;
}

std::size_t Layer::part_count() const {
  switch (kind) {
    case GeometryKind::kPolygon: return polygons.size();
    case GeometryKind::kPolyline: return polylines.size();
    case GeometryKind::kPoint: return points.size();
  }
  return 0;
}

void Layer::build_index(double cell_size) {
  std::vector<geo::BoundingBox> boxes;
  boxes.reserve(part_count());
  switch (kind) {
    case GeometryKind::kPolygon:
      for (const auto& p : polygons) boxes.push_back(p.bbox());
      break;
    case GeometryKind::kPolyline:
      for (const auto& l : polylines) boxes.push_back(l.bbox());
      break;
    case GeometryKind::kPoint:
      for (const auto& p : points) boxes.push_back({p.x, p.y, p.x, p.y});
      break;
  }
  index_ = geo::GridIndex(boxes, cell_size);
}

Layer read_geojson(const std::filesystem::path& path, const std::string& name,
                   const geo::Projection& projection) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open layer file " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw InputError(path.string() + ": invalid JSON: " + e.what());
  }
  if (doc.value("type", "") != "FeatureCollection" || !doc.contains("features")) {
    throw InputError(path.string() + ": expected a GeoJSON FeatureCollection");
  }
  const auto& features = doc["features"];

  Layer layer;
  layer.name = name;
  layer.attributes.rows = features.size();

  // Text columns: any key whose value is a string in some feature.
  std::set<std::string> text_keys;
  for (const auto& f : features) {
    if (!f.contains("properties") || !f["properties"].is_object()) continue;
    for (const auto& [k, v] : f["properties"].items()) {
      if (v.is_string()) text_keys.insert(k);
    }
  }

  std::optional<GeometryKind> kind;
  for (std::size_t row = 0; row < features.size(); ++row) {
    const auto& f = features[row];
    const std::string where = path.string() + ": feature " + std::to_string(row);
    if (f.contains("properties") && f["properties"].is_object()) {
      for (const auto& [k, v] : f["properties"].items()) {
        if (text_keys.contains(k)) {
          auto& col = layer.attributes.text[k];
          col.resize(layer.attributes.rows);
          col[row] = v.is_string() ? v.get<std::string>() : (v.is_null() ? "" : v.dump());
        } else if (v.is_number() || v.is_boolean()) {
          layer.attributes.numeric_column(k)[row] = v.is_boolean() ? (v.get<bool>() ? 1.0 : 0.0)
                                                                   : v.get<double>();
        } else if (v.is_null()) {
          layer.attributes.numeric_column(k);
        }
      }
    }
    if (!f.contains("geometry") || f["geometry"].is_null()) continue;
    const auto& g = f["geometry"];
    const std::string type = g.value("type", "");
    const auto& coords = g.at("coordinates");
    GeometryKind k;
    if (type == "Point" || type == "MultiPoint") {
      k = GeometryKind::kPoint;
    } else if (type == "LineString" || type == "MultiLineString") {
      k = GeometryKind::kPolyline;
    } else if (type == "Polygon" || type == "MultiPolygon") {
      k = GeometryKind::kPolygon;
    } else {
      throw InputError(where + ": unsupported geometry type '" + type + "'");
    }
    if (kind && *kind != k) throw InputError(where + ": mixed geometry kinds in one layer");
    kind = k;

    try {
      if (type == "Point") {
        layer.points.push_back(read_position(coords, projection));
        layer.part_feature.push_back(row);
      } else if (type == "MultiPoint") {
        for (const auto& p : coords) {
          layer.points.push_back(read_position(p, projection));
          layer.part_feature.push_back(row);
        }
      } else if (type == "LineString" || type == "MultiLineString") {
        auto add = [&](const json& c) {
          layer.polylines.emplace_back(read_ring(c, projection));
          layer.part_feature.push_back(row);
        };
        if (type == "LineString") {
          add(coords);
        } else {
          for (const auto& c : coords) add(c);
        }
      } else {
        auto add = [&](const json& rings) {
          if (rings.empty()) return;
          std::vector<geo::Ring> holes;
          for (std::size_t h = 1; h < rings.size(); ++h) holes.push_back(read_ring(rings[h], projection));
          try {
            geo::Polygon poly(read_ring(rings[0], projection), std::move(holes));
            if (poly.area() < kMinPolygonArea) {
              layer.warnings.push_back(where + ": dropped polygon with area < 1e-6 m^2");
              return;
            }
            layer.polygons.push_back(std::move(poly));
            layer.part_feature.push_back(row);
          } catch (const DegenerateError& e) {
            layer.warnings.push_back(where + ": dropped degenerate polygon (" + e.what() + ")");
          }
        };
        if (type == "Polygon") {
          add(coords);
        } else {
          for (const auto& c : coords) add(c);
        }
      }
    } catch (const InputError& e) {
      throw InputError(where + ": " + e.what());
    }
  }
  layer.kind = kind.value_or(GeometryKind::kPoint);
  for (auto& [k, col] : layer.attributes.text) col.resize(layer.attributes.rows);
  if (layer.kind == GeometryKind::kPolygon) {
    layer.feature_area.assign(layer.attributes.rows, 0.0);
    for (std::size_t i = 0; i < layer.polygons.size(); ++i) {
      layer.feature_area[layer.part_feature[i]] += layer.polygons[i].area();
    }
  }
  layer.build_index();
  return layer;
}

void write_geojson(const std::filesystem::path& path, const Layer& layer,
                   const geo::Projection& projection) {
  std::vector<std::vector<std::size_t>> parts(layer.attributes.rows);
  for (std::size_t i = 0; i < layer.part_feature.size(); ++i) parts[layer.part_feature[i]].push_back(i);

  json features = json::array();
  for (std::size_t row = 0; row < layer.attributes.rows; ++row) {
    json props = json::object();
    for (const auto& [k, col] : layer.attributes.numeric) {
      props[k] = std::isnan(col[row]) ? json(nullptr) : json(col[row]);
    }
    for (const auto& [k, col] : layer.attributes.text) props[k] = col[row];
    json geom = nullptr;
    const auto& ps = parts[row];
    if (!ps.empty()) {
      switch (layer.kind) {
        case GeometryKind::kPoint:
          if (ps.size() == 1) {
            geom = {{"type", "Point"}, {"coordinates", write_position(layer.points[ps[0]], projection)}};
          } else {
            json c = json::array();
            for (auto i : ps) c.push_back(write_position(layer.points[i], projection));
            geom = {{"type", "MultiPoint"}, {"coordinates", c}};
          }
          break;
        case GeometryKind::kPolyline: {
          auto line = [&](std::size_t i) {
            json c = json::array();
            for (const auto& p : layer.polylines[i].vertices()) c.push_back(write_position(p, projection));
            return c;
          };
          if (ps.size() == 1) {
            geom = {{"type", "LineString"}, {"coordinates", line(ps[0])}};
          } else {
            json c = json::array();
            for (auto i : ps) c.push_back(line(i));
            geom = {{"type", "MultiLineString"}, {"coordinates", c}};
          }
          break;
        }
        case GeometryKind::kPolygon: {
          auto poly = [&](std::size_t i) {
            json rings = json::array({write_ring(layer.polygons[i].exterior(), projection)});
            for (const auto& h : layer.polygons[i].holes()) rings.push_back(write_ring(h, projection));
            return rings;
          };
          if (ps.size() == 1) {
            geom = {{"type", "Polygon"}, {"coordinates", poly(ps[0])}};
          } else {
            json c = json::array();
            for (auto i : ps) c.push_back(poly(i));
            geom = {{"type", "MultiPolygon"}, {"coordinates", c}};
          }
          break;
        }
      }
    }
    features.push_back({{"type", "Feature"}, {"properties", props}, {"geometry", geom}});
  }
  json doc = {{"type", "FeatureCollection"}, {"features", features}};
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path.string());
  out << doc.dump() << '\n';
}

}  // namespace poolrank::features
