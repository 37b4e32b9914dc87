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

#include "poolrank/features.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <numeric>

#include <nlohmann/json.hpp>

#include "poolrank/csv.hpp"
#include "poolrank/error.hpp"
#include "poolrank/parallel.hpp"

namespace poolrank::features {

using nlohmann::json;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

AttributeKind parse_kind(const std::string& s) {
  if (s == "extensive") return AttributeKind::kExtensive;
  if (s == "intensive") return AttributeKind::kIntensive;
  if (s == "categorical") return AttributeKind::kCategorical;
  throw InputError("unknown attribute kind '" + s + "'");
}

LayerRole parse_role(const std::string& s) {
  if (s == "polygon_attributes") return LayerRole::kPolygonAttributes;
  if (s == "roads") return LayerRole::kRoads;
  if (s == "points") return LayerRole::kPoints;
  if (s == "raster_points") return LayerRole::kRasterPoints;
  throw InputError("unknown layer role '" + s + "'");
}

std::string role_name(LayerRole r) {
  switch (r) {
    case LayerRole::kPolygonAttributes: return "polygon_attributes";
    case LayerRole::kRoads: return "roads";
    case LayerRole::kPoints: return "points";
    case LayerRole::kRasterPoints: return "raster_points";
  }
  return {};
}

ImputationRule parse_rule(const json& j) {
  ImputationRule r;
  const std::string type = j.at("type").get<std::string>();
  r.label = j.value("label", type);
  if (type == "zero_when") {
    r.type = ImputationRule::Type::kZeroWhen;
    r.condition_attribute = j.at("if").get<std::string>();
    const std::string op = j.value("op", "eq");
    if (op == "eq") {
      r.comparison = ImputationRule::Comparison::kEqual;
    } else if (op == "lt") {
      r.comparison = ImputationRule::Comparison::kLess;
    } else {
      throw InputError("imputation op must be 'eq' or 'lt', got '" + op + "'");
    }
    r.threshold = j.value("value", 0.0);
    r.targets = j.at("targets").get<std::vector<std::string>>();
  } else if (type == "fill_missing") {
    r.type = ImputationRule::Type::kFillMissing;
    r.targets = {j.at("target").get<std::string>()};
    r.fill_value = j.at("value").get<double>();
  } else if (type == "derive_ratio") {
    r.type = ImputationRule::Type::kDeriveRatio;
    r.targets = {j.at("target").get<std::string>()};
    r.numerator = j.at("numerator").get<std::string>();
    r.denominator = j.at("denominator").get<std::string>();
  } else {
    throw InputError("unknown imputation rule type '" + type + "'");
  }
  return r;
}

json rule_json(const ImputationRule& r) {
  switch (r.type) {
    case ImputationRule::Type::kZeroWhen:
      return {{"type", "zero_when"},
              {"label", r.label},
              {"if", r.condition_attribute},
              {"op", r.comparison == ImputationRule::Comparison::kEqual ? "eq" : "lt"},
              {"value", r.threshold},
              {"targets", r.targets}};
    case ImputationRule::Type::kFillMissing:
      return {{"type", "fill_missing"}, {"label", r.label}, {"target", r.targets.front()},
              {"value", r.fill_value}};
    case ImputationRule::Type::kDeriveRatio:
      return {{"type", "derive_ratio"}, {"label", r.label}, {"target", r.targets.front()},
              {"numerator", r.numerator}, {"denominator", r.denominator}};
  }
  return {};
}

// Point layer grouped by category.
struct PreparedPoints {
  std::vector<std::vector<geo::PointXY>> by_category;
};

PreparedPoints prepare_points(const Layer& layer, const LayerSpec& spec) {
  PreparedPoints out;
  if (spec.category_attribute.empty()) {
    out.by_category.emplace_back(layer.points.begin(), layer.points.end());
    return out;
  }
  out.by_category.resize(spec.categories.size());
  const auto& cats = layer.attributes.require_text(spec.category_attribute);
  std::map<std::string, std::size_t> slot;
  for (std::size_t c = 0; c < spec.categories.size(); ++c) slot[spec.categories[c]] = c;
  for (std::size_t i = 0; i < layer.points.size(); ++i) {
    auto it = slot.find(cats[layer.part_feature[i]]);
    if (it != slot.end()) out.by_category[it->second].push_back(layer.points[i]);
  }
  return out;
}

std::vector<PointFeatures> point_features(const PreparedPoints& prep, const LayerSpec& spec,
                                          geo::PointXY pool, const geo::Polygon& buffer) {
  std::vector<PointFeatures> out;
  out.reserve(prep.by_category.size());
  const double area = geo::polygon_area(buffer);
  const auto& box = buffer.bbox();
  for (const auto& pts : prep.by_category) {
    PointFeatures f;
    std::size_t count = 0;
    double nearest = std::numeric_limits<double>::infinity();
    for (const auto& p : pts) {
      const double d = geo::distance(pool, p);
      if (d < spec.exclude_within_m) continue;
      nearest = std::min(nearest, d);
      if (box.contains(p) && geo::contains(buffer, p)) ++count;
    }
    f.density = static_cast<double>(count) / area;
    f.nearest_m = std::isfinite(nearest) ? nearest : kNaN;
    out.push_back(f);
  }
  return out;
}

double median_of(std::vector<double> v) {
  if (v.empty()) return kNaN;
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  const double hi = v[mid];
  if (v.size() % 2 == 1) return hi;
  const double lo = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lo + hi);
}

}  // namespace

std::string_view to_string(AttributeKind k) {
  switch (k) {
    case AttributeKind::kExtensive: return "extensive";
    case AttributeKind::kIntensive: return "intensive";
    case AttributeKind::kCategorical: return "categorical";
  }
  return {};
}

Manifest Manifest::read(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open manifest " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw InputError(path.string() + ": invalid JSON: " + e.what());
  }
  Manifest m;
  m.base_dir = path.parent_path();
  try {
    m.version = doc.value("version", 1);
    if (m.version != 1) throw InputError("unsupported manifest version " + std::to_string(m.version));
    for (const auto& jl : doc.at("layers")) {
      LayerSpec s;
      s.name = jl.at("name").get<std::string>();
      s.file = jl.at("file").get<std::string>();
      s.role = parse_role(jl.at("role").get<std::string>());
      for (const auto& ja : jl.value("attributes", json::array())) {
        AttributeSpec a;
        a.name = ja.at("name").get<std::string>();
        a.kind = parse_kind(ja.at("kind").get<std::string>());
        if (ja.contains("weight")) a.weight_attribute = ja["weight"].get<std::string>();
        a.categories = ja.value("categories", std::vector<std::string>{});
        if (a.kind == AttributeKind::kCategorical && a.categories.empty()) {
          throw InputError("categorical attribute '" + a.name + "' lists no categories");
        }
        s.attributes.push_back(std::move(a));
      }
      if (jl.contains("imputation")) {
        const auto& ji = jl["imputation"];
        if (ji.is_string() && ji.get<std::string>() == "default") {
          s.imputation = default_imputation_rules();
        } else {
          for (const auto& jr : ji) s.imputation.push_back(parse_rule(jr));
        }
      }
      s.type_attribute = jl.value("type_attribute", s.type_attribute);
      s.road_types = jl.value("road_types", s.road_types);
      s.flow_attributes = jl.value("flow_attributes", std::vector<std::string>{});
      s.density_flow = jl.value("density_flow", std::string{});
      s.category_attribute = jl.value("category_attribute", std::string{});
      s.categories = jl.value("categories", std::vector<std::string>{});
      s.exclude_within_m = jl.value("exclude_within_m", 0.0);
      s.value_attributes = jl.value("value_attributes", std::vector<std::string>{});
      m.layers.push_back(std::move(s));
    }
  } catch (const json::exception& e) {
    throw InputError(path.string() + ": malformed manifest: " + e.what());
  }
  return m;
}

void Manifest::write(const std::filesystem::path& path) const {
  json layers_json = json::array();
  for (const auto& s : layers) {
    json jl = {{"name", s.name}, {"file", s.file}, {"role", role_name(s.role)}};
    switch (s.role) {
      case LayerRole::kPolygonAttributes: {
        json attrs = json::array();
        for (const auto& a : s.attributes) {
          json ja = {{"name", a.name}, {"kind", std::string(to_string(a.kind))}};
          if (a.weight_attribute) ja["weight"] = *a.weight_attribute;
          if (!a.categories.empty()) ja["categories"] = a.categories;
          attrs.push_back(ja);
        }
        jl["attributes"] = attrs;
        json rules = json::array();
        for (const auto& r : s.imputation) rules.push_back(rule_json(r));
        jl["imputation"] = rules;
        break;
      }
      case LayerRole::kRoads:
        jl["type_attribute"] = s.type_attribute;
        jl["road_types"] = s.road_types;
        jl["flow_attributes"] = s.flow_attributes;
        jl["density_flow"] = s.density_flow;
        break;
      case LayerRole::kPoints:
        jl["category_attribute"] = s.category_attribute;
        jl["categories"] = s.categories;
        jl["exclude_within_m"] = s.exclude_within_m;
        break;
      case LayerRole::kRasterPoints:
        jl["value_attributes"] = s.value_attributes;
        break;
    }
    layers_json.push_back(jl);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path.string());
  out << json{{"version", version}, {"layers", layers_json}}.dump(2) << '\n';
}

std::vector<ImputationRule> default_imputation_rules() {
  using T = ImputationRule::Type;
  using C = ImputationRule::Comparison;
  std::vector<ImputationRule> rules;
  auto zero_when = [&](std::string label, std::string cond, C cmp, double thr,
                       std::vector<std::string> targets) {
    ImputationRule r;
    r.type = T::kZeroWhen;
    r.label = std::move(label);
    r.condition_attribute = std::move(cond);
    r.comparison = cmp;
    r.threshold = thr;
    r.targets = std::move(targets);
    rules.push_back(std::move(r));
  };
  auto fill = [&](std::string label, std::string target, double value) {
    ImputationRule r;
    r.type = T::kFillMissing;
    r.label = std::move(label);
    r.targets = {std::move(target)};
    r.fill_value = value;
    rules.push_back(std::move(r));
  };
  zero_when("uninhabited", "population", C::kEqual, 0,
            {"persons_social_assistance", "persons_disability_benefit", "age_0_14", "age_15_24",
             "age_25_44", "age_45_64", "age_65_74", "age_75_plus", "workers_industry",
             "workers_services"});
  zero_when("no_income_recipients", "income_recipients", C::kEqual, 0,
            {"income_low", "income_high", "avg_income"});
  zero_when("no_buildings", "n_buildings", C::kEqual, 0,
            {"rental_properties", "corporate_homes", "pct_multi_family", "mean_house_value",
             "mean_house_occupancy"});
  zero_when("no_households", "households", C::kEqual, 0,
            {"households_single", "households_with_children", "households_without_children"});
  // Urbanity classes run 1 (very strongly urban) to 5 (non-urban).
  fill("missing_urbanity", "urbanity", 5);
  // Zip-share bands run 1 (< 50% of addresses) upwards.
  fill("missing_zip_share", "zip_share_band", 1);
  zero_when("few_electricity_meters", "electricity_meters", C::kLess, 5,
            {"electricity_households", "electricity_companies"});
  zero_when("few_gas_meters", "gas_meters", C::kLess, 5, {"gas_households", "gas_companies"});
  ImputationRule ratio;
  ratio.type = T::kDeriveRatio;
  ratio.label = "derive_household_size";
  ratio.targets = {"mean_household_size"};
  ratio.numerator = "population";
  ratio.denominator = "households";
  rules.push_back(std::move(ratio));
  return rules;
}

ImputationReport impute_layer(Layer& layer, std::span<const ImputationRule> rules) {
  ImputationReport report;
  report.layer = layer.name;
  auto& table = layer.attributes;
  auto apply = [&](const ImputationRule& r) {
    std::size_t filled = 0;
    switch (r.type) {
      case ImputationRule::Type::kZeroWhen: {
        if (!table.has_numeric(r.condition_attribute)) return;
        const auto cond = table.numeric.at(r.condition_attribute);
        for (const auto& target : r.targets) {
          if (!table.has_numeric(target)) continue;
          auto& col = table.numeric.at(target);
          for (std::size_t i = 0; i < table.rows; ++i) {
            if (!std::isnan(col[i]) || std::isnan(cond[i])) continue;
            const bool holds = r.comparison == ImputationRule::Comparison::kEqual
                                   ? cond[i] == r.threshold
                                   : cond[i] < r.threshold;
            if (holds) {
              col[i] = 0.0;
              ++filled;
            }
          }
        }
        break;
      }
      case ImputationRule::Type::kFillMissing: {
        if (!table.has_numeric(r.targets.front())) return;
        for (auto& v : table.numeric.at(r.targets.front())) {
          if (std::isnan(v)) {
            v = r.fill_value;
            ++filled;
          }
        }
        break;
      }
      case ImputationRule::Type::kDeriveRatio: {
        if (!table.has_numeric(r.targets.front()) || !table.has_numeric(r.numerator) ||
            !table.has_numeric(r.denominator)) {
          return;
        }
        const auto num = table.numeric.at(r.numerator);
        const auto den = table.numeric.at(r.denominator);
        auto& col = table.numeric.at(r.targets.front());
        for (std::size_t i = 0; i < table.rows; ++i) {
          if (std::isnan(col[i]) && std::isfinite(num[i]) && std::isfinite(den[i]) && den[i] != 0) {
            col[i] = num[i] / den[i];
            ++filled;
          }
        }
        break;
      }
    }
    report.filled.emplace_back(r.label, filled);
  };
  for (const auto& r : rules) {
    if (r.type != ImputationRule::Type::kDeriveRatio) apply(r);
  }
  for (const auto& r : rules) {
    if (r.type == ImputationRule::Type::kDeriveRatio) apply(r);
  }
  return report;
}

LayerSet load_layers(const Manifest& manifest, const geo::Projection& projection) {
  LayerSet set;
  set.manifest = manifest;
  for (const auto& spec : manifest.layers) {
    Layer layer = read_geojson(manifest.base_dir / spec.file, spec.name, projection);
    const GeometryKind expected = spec.role == LayerRole::kPolygonAttributes ? GeometryKind::kPolygon
                                  : spec.role == LayerRole::kRoads          ? GeometryKind::kPolyline
                                                                             : GeometryKind::kPoint;
    if (layer.part_count() > 0 && layer.kind != expected) {
      throw InputError("layer '" + spec.name + "' has the wrong geometry kind for its role");
    }
    layer.kind = expected;
    if (spec.role == LayerRole::kPolygonAttributes) {
      for (const auto& a : spec.attributes) {
        if (a.kind == AttributeKind::kCategorical) {
          layer.attributes.require_text(a.name);
        } else {
          layer.attributes.numeric_column(a.name);
          if (a.weight_attribute) layer.attributes.numeric_column(*a.weight_attribute);
        }
      }
      set.imputation.push_back(impute_layer(layer, spec.imputation));
    }
    set.layers.push_back(std::move(layer));
  }
  return set;
}

std::vector<Overlap> overlaps(const Layer& layer, const geo::Polygon& buffer) {
  std::vector<Overlap> out;
  for (std::size_t part : layer.index().query(buffer.bbox())) {
    const double a = geo::intersection_area(layer.polygons[part], buffer);
    if (a <= 0) continue;
    const std::size_t f = layer.part_feature[part];
    auto it = std::find_if(out.begin(), out.end(), [&](const Overlap& o) { return o.feature == f; });
    if (it == out.end()) {
      out.push_back({f, a, 0.0});
    } else {
      it->area += a;
    }
  }
  for (auto& o : out) o.fraction = std::min(1.0, o.area / layer.feature_area[o.feature]);
  std::sort(out.begin(), out.end(), [](const Overlap& a, const Overlap& b) { return a.feature < b.feature; });
  return out;
}

double extract_extensive(const Layer& layer, const std::string& attribute,
                         std::span<const Overlap> ov) {
  const auto& col = layer.attributes.require_numeric(attribute);
  double total = 0.0;
  for (const auto& o : ov) {
    if (std::isnan(col[o.feature])) return kNaN;
    total += col[o.feature] * o.fraction;
  }
  return total;
}

double extract_extensive(const Layer& layer, const std::string& attribute,
                         const geo::Polygon& buffer) {
  const auto ov = overlaps(layer, buffer);
  return extract_extensive(layer, attribute, ov);
}

double extract_intensive(const Layer& layer, const std::string& attribute,
                         std::span<const Overlap> ov,
                         const std::optional<std::string>& weight_attribute) {
  const auto& col = layer.attributes.require_numeric(attribute);
  const std::vector<double>* wcol =
      weight_attribute ? &layer.attributes.require_numeric(*weight_attribute) : nullptr;
  double num = 0.0, den = 0.0;
  for (const auto& o : ov) {
    const double w = wcol ? (*wcol)[o.feature] * o.fraction : o.area;
    if (std::isnan(w)) return kNaN;
    if (w == 0) continue;
    if (std::isnan(col[o.feature])) return kNaN;
    num += w * col[o.feature];
    den += w;
  }
  return den > 0 ? num / den : kNaN;
}

double extract_intensive(const Layer& layer, const std::string& attribute,
                         const geo::Polygon& buffer,
                         const std::optional<std::string>& weight_attribute) {
  const auto ov = overlaps(layer, buffer);
  return extract_intensive(layer, attribute, ov, weight_attribute);
}

namespace {

std::vector<double> categorical_shares(const Layer& layer, const std::string& attribute,
                                       std::span<const std::string> categories,
                                       std::span<const Overlap> ov, double buffer_area) {
  const auto& col = layer.attributes.require_text(attribute);
  std::vector<double> shares(categories.size(), 0.0);
  for (const auto& o : ov) {
    auto it = std::find(categories.begin(), categories.end(), col[o.feature]);
    if (it != categories.end()) shares[static_cast<std::size_t>(it - categories.begin())] += o.area;
  }
  for (auto& s : shares) s = std::min(1.0, s / buffer_area);
  return shares;
}

}  // namespace

std::vector<double> extract_categorical(const Layer& layer, const std::string& attribute,
                                        std::span<const std::string> categories,
                                        const geo::Polygon& buffer) {
  const auto ov = overlaps(layer, buffer);
  return categorical_shares(layer, attribute, categories, ov, geo::polygon_area(buffer));
}

RoadFeatures extract_road_features(const Layer& roads, const LayerSpec& spec, geo::PointXY pool,
                                   const geo::Polygon& buffer) {
  RoadFeatures out;
  const std::size_t n_flows = spec.flow_attributes.size();
  if (roads.polylines.empty()) {
    out.closest_flows.assign(n_flows, kNaN);
    out.closest_type.assign(spec.road_types.size(), kNaN);
    out.traffic_density = kNaN;
    out.road_density = kNaN;
    return out;
  }
  std::vector<const std::vector<double>*> flows;
  for (const auto& f : spec.flow_attributes) flows.push_back(&roads.attributes.require_numeric(f));
  const std::vector<double>* density_flow =
      spec.density_flow.empty() ? nullptr : &roads.attributes.require_numeric(spec.density_flow);
  auto flow_for_density = [&](std::size_t feature) {
    if (density_flow) return (*density_flow)[feature];
    double s = 0.0;
    for (const auto* f : flows) s += (*f)[feature];
    return s;
  };

  const double area = geo::polygon_area(buffer);
  double length = 0.0, traffic = 0.0;
  for (std::size_t part : roads.index().query(buffer.bbox())) {
    const double len = geo::polyline_length_within(roads.polylines[part], buffer);
    if (len <= 0) continue;
    length += len;
    traffic += len * flow_for_density(roads.part_feature[part]);
  }
  out.road_density = length / area;
  out.traffic_density = traffic / area;

  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < roads.polylines.size(); ++i) {
    const auto& bb = roads.polylines[i].bbox();
    // Lower bound from the bbox lets most segments be skipped.
    const double dx = std::max({bb.min_x - pool.x, 0.0, pool.x - bb.max_x});
    const double dy = std::max({bb.min_y - pool.y, 0.0, pool.y - bb.max_y});
    if (std::hypot(dx, dy) >= best_d) continue;
    const double d = geo::point_polyline_distance(pool, roads.polylines[i]);
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  const std::size_t feature = roads.part_feature[best];
  for (const auto* f : flows) out.closest_flows.push_back((*f)[feature]);
  out.closest_type.assign(spec.road_types.size(), 0.0);
  const auto& types = roads.attributes.require_text(spec.type_attribute);
  auto it = std::find(spec.road_types.begin(), spec.road_types.end(), types[feature]);
  if (it != spec.road_types.end()) out.closest_type[static_cast<std::size_t>(it - spec.road_types.begin())] = 1.0;
  return out;
}

std::vector<PointFeatures> extract_point_features(const Layer& points, const LayerSpec& spec,
                                                  geo::PointXY pool, const geo::Polygon& buffer) {
  return point_features(prepare_points(points, spec), spec, pool, buffer);
}

std::vector<double> extract_pool_features(const ingest::PoolRecord& pool) {
  return {static_cast<double>(pool.n_connectors), pool.max_power_kw, pool.lat, pool.lon,
          pool.rollout == ingest::Rollout::kStrategic ? 1.0 : 0.0};
}

bool FeatureMatrix::missing(std::size_t i, std::size_t j) const {
  return std::isnan(values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
}

std::optional<std::size_t> FeatureMatrix::column_index(std::string_view name) const {
  for (std::size_t j = 0; j < columns.size(); ++j) {
    if (columns[j].name == name) return j;
  }
  return std::nullopt;
}

std::vector<std::string> FeatureMatrix::column_names() const {
  std::vector<std::string> out;
  for (const auto& c : columns) out.push_back(c.name);
  return out;
}

FeatureMatrix FeatureMatrix::select_columns(std::span<const std::size_t> keep) const {
  FeatureMatrix out;
  out.row_ids = row_ids;
  out.values.resize(values.rows(), static_cast<Eigen::Index>(keep.size()));
  for (std::size_t k = 0; k < keep.size(); ++k) {
    out.columns.push_back(columns.at(keep[k]));
    out.values.col(static_cast<Eigen::Index>(k)) = values.col(static_cast<Eigen::Index>(keep[k]));
  }
  return out;
}

std::vector<ColumnInfo> predictor_columns(const LayerSet& set) {
  std::vector<ColumnInfo> cols;
  for (const auto& spec : set.manifest.layers) {
    const std::string& L = spec.name;
    switch (spec.role) {
      case LayerRole::kPolygonAttributes:
        for (const auto& a : spec.attributes) {
          if (a.kind == AttributeKind::kCategorical) {
            for (const auto& c : a.categories) cols.push_back({L + "." + a.name + "." + c, L, "categorical"});
          } else {
            cols.push_back({L + "." + a.name, L, std::string(to_string(a.kind))});
          }
        }
        break;
      case LayerRole::kRoads:
        for (const auto& f : spec.flow_attributes) cols.push_back({L + ".closest." + f, L, "closest_flow"});
        cols.push_back({L + ".traffic_density", L, "density"});
        cols.push_back({L + ".road_density", L, "density"});
        for (const auto& t : spec.road_types) cols.push_back({L + ".closest_type." + t, L, "one_hot"});
        break;
      case LayerRole::kPoints:
        if (spec.category_attribute.empty()) {
          cols.push_back({L + ".density", L, "density"});
          cols.push_back({L + ".nearest_m", L, "distance"});
        } else {
          for (const auto& c : spec.categories) {
            cols.push_back({L + "." + c + ".density", L, "density"});
            cols.push_back({L + "." + c + ".nearest_m", L, "distance"});
          }
        }
        break;
      case LayerRole::kRasterPoints:
        for (const auto& v : spec.value_attributes) cols.push_back({L + "." + v, L, "raster"});
        break;
    }
  }
  for (const char* name : {"n_connectors", "max_power_kw", "latitude", "longitude", "rollout_strategic"}) {
    cols.push_back({std::string("pool.") + name, "pool", "pool"});
  }
  return cols;
}

FeatureMatrix extract_features(const LayerSet& set, std::span<const ingest::PoolRecord> pools,
                               const geo::BufferSpec& buffer_spec) {
  buffer_spec.validate();
  FeatureMatrix m;
  m.columns = predictor_columns(set);
  const auto p = static_cast<Eigen::Index>(m.columns.size());
  m.values.resize(static_cast<Eigen::Index>(pools.size()), p);
  for (const auto& pool : pools) m.row_ids.push_back(pool.pool_id);

  std::vector<std::optional<PreparedPoints>> prepared(set.layers.size());
  for (std::size_t l = 0; l < set.layers.size(); ++l) {
    if (set.manifest.layers[l].role == LayerRole::kPoints) {
      prepared[l] = prepare_points(set.layers[l], set.manifest.layers[l]);
    }
  }

  parallel_for(pools.size(), [&](std::size_t i) {
    const auto& pool = pools[i];
    const geo::Polygon buffer = geo::make_buffer(pool.location, buffer_spec);
    const double buffer_area = geo::polygon_area(buffer);
    std::vector<double> row;
    row.reserve(static_cast<std::size_t>(p));
    for (std::size_t l = 0; l < set.layers.size(); ++l) {
      const auto& spec = set.manifest.layers[l];
      const auto& layer = set.layers[l];
      switch (spec.role) {
        case LayerRole::kPolygonAttributes: {
          const auto ov = overlaps(layer, buffer);
          for (const auto& a : spec.attributes) {
            switch (a.kind) {
              case AttributeKind::kExtensive:
                row.push_back(extract_extensive(layer, a.name, ov));
                break;
              case AttributeKind::kIntensive:
                row.push_back(extract_intensive(layer, a.name, ov, a.weight_attribute));
                break;
              case AttributeKind::kCategorical:
                for (double s : categorical_shares(layer, a.name, a.categories, ov, buffer_area)) {
                  row.push_back(s);
                }
                break;
            }
          }
          break;
        }
        case LayerRole::kRoads: {
          const auto r = extract_road_features(layer, spec, pool.location, buffer);
          row.insert(row.end(), r.closest_flows.begin(), r.closest_flows.end());
          row.push_back(r.traffic_density);
          row.push_back(r.road_density);
          row.insert(row.end(), r.closest_type.begin(), r.closest_type.end());
          break;
        }
        case LayerRole::kPoints:
          for (const auto& f : point_features(*prepared[l], spec, pool.location, buffer)) {
            row.push_back(f.density);
            row.push_back(f.nearest_m);
          }
          break;
        case LayerRole::kRasterPoints: {
          if (layer.points.empty()) {
            row.insert(row.end(), spec.value_attributes.size(), kNaN);
            break;
          }
          std::size_t best = 0;
          double best_d = std::numeric_limits<double>::infinity();
          for (std::size_t k = 0; k < layer.points.size(); ++k) {
            const double d = geo::distance(pool.location, layer.points[k]);
            if (d < best_d) {
              best_d = d;
              best = k;
            }
          }
          for (const auto& v : spec.value_attributes) {
            row.push_back(layer.attributes.require_numeric(v)[layer.part_feature[best]]);
          }
          break;
        }
      }
    }
    const auto pf = extract_pool_features(pool);
    row.insert(row.end(), pf.begin(), pf.end());
    if (static_cast<Eigen::Index>(row.size()) != p) {
      throw Error("internal: extracted row width does not match predictor columns");
    }
    for (Eigen::Index j = 0; j < p; ++j) m.values(static_cast<Eigen::Index>(i), j) = row[static_cast<std::size_t>(j)];
  });
  return m;
}

double pearson(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const double n = static_cast<double>(a.size());
  const Eigen::VectorXd da = a.array() - a.mean();
  const Eigen::VectorXd db = b.array() - b.mean();
  const double sa = std::sqrt(da.squaredNorm() / n), sb = std::sqrt(db.squaredNorm() / n);
  if (sa == 0 || sb == 0) return 0.0;
  return da.dot(db) / (n * sa * sb);
}

PreprocessResult preprocess(const FeatureMatrix& raw, const PreprocessOptions& opt) {
  PreprocessResult res;
  auto& report = res.report;
  const std::size_t n = raw.rows();
  report.n_rows = n;
  report.n_input_columns = raw.cols();
  if (n == 0) throw InputError("preprocess: empty feature matrix");
  FeatureMatrix work = raw;

  // Missing values: median-impute rare gaps, drop the rest.
  std::vector<std::size_t> keep;
  for (std::size_t j = 0; j < work.cols(); ++j) {
    auto col = work.values.col(static_cast<Eigen::Index>(j));
    std::vector<double> present;
    present.reserve(n);
    for (Eigen::Index i = 0; i < col.size(); ++i) {
      if (!std::isnan(col(i))) present.push_back(col(i));
    }
    const std::size_t n_missing = n - present.size();
    if (n_missing == 0) {
      keep.push_back(j);
      continue;
    }
    const double frac = static_cast<double>(n_missing) / static_cast<double>(n);
    if (frac < opt.max_missing_fraction && !present.empty()) {
      const double med = median_of(present);
      for (Eigen::Index i = 0; i < col.size(); ++i) {
        if (std::isnan(col(i))) col(i) = med;
      }
      report.imputations.push_back({work.columns[j].name, n_missing, med});
      keep.push_back(j);
    } else {
      report.drops.push_back({work.columns[j].name, "missing",
                              "missing fraction " + csv::format_double(frac)});
    }
  }
  work = work.select_columns(keep);

  // Near-zero variance.
  keep.clear();
  for (std::size_t j = 0; j < work.cols(); ++j) {
    const auto col = work.values.col(static_cast<Eigen::Index>(j));
    const double zeros = static_cast<double>((col.array() == 0.0).count()) / static_cast<double>(n);
    if (zeros > opt.max_zero_fraction) {
      report.drops.push_back({work.columns[j].name, "sparse", "zero fraction " + csv::format_double(zeros)});
    } else if (col.maxCoeff() == col.minCoeff()) {
      report.drops.push_back({work.columns[j].name, "constant", "zero variance"});
    } else {
      keep.push_back(j);
    }
  }
  work = work.select_columns(keep);

  // Correlation pruning.
  const auto p = static_cast<Eigen::Index>(work.cols());
  Eigen::MatrixXd z = work.values;
  for (Eigen::Index j = 0; j < p; ++j) {
    auto c = z.col(j);
    c.array() -= c.mean();
    const double s = std::sqrt(c.squaredNorm() / static_cast<double>(n));
    c /= s;
  }
  const Eigen::MatrixXd corr = (z.transpose() * z) / static_cast<double>(n);
  auto linked = [&](std::size_t a, std::size_t b) {
    return std::abs(corr(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b))) > opt.max_abs_correlation;
  };

  std::vector<std::size_t> alive(static_cast<std::size_t>(p));
  std::iota(alive.begin(), alive.end(), 0);
  auto drop_correlated = [&](std::size_t j, std::size_t rep) {
    report.drops.push_back({work.columns[j].name, "correlated",
                            "kept " + work.columns[rep].name + " (r=" +
                                csv::format_double(corr(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(rep))) + ")"});
  };
  if (opt.grouping == CorrelationGrouping::kComponent) {
    std::vector<std::size_t> comp(alive.size());
    std::iota(comp.begin(), comp.end(), 0);
    std::function<std::size_t(std::size_t)> find = [&](std::size_t i) {
      return comp[i] == i ? i : comp[i] = find(comp[i]);
    };
    for (std::size_t a = 0; a < alive.size(); ++a) {
      for (std::size_t b = a + 1; b < alive.size(); ++b) {
        if (linked(a, b)) {
          const auto ra = find(a), rb = find(b);
          comp[std::max(ra, rb)] = std::min(ra, rb);
        }
      }
    }
    std::vector<std::size_t> next;
    for (std::size_t a = 0; a < alive.size(); ++a) {
      if (find(a) == a) {
        next.push_back(a);
      } else {
        drop_correlated(a, find(a));
      }
    }
    alive = next;
  } else {
    // Greedy clique partition in index order; repeat until no pair exceeds
    // the threshold. Each pass removes at least one member of every
    // non-trivial component, so the loop terminates.
    while (true) {
      std::vector<std::vector<std::size_t>> cliques;
      for (std::size_t a : alive) {
        bool placed = false;
        for (auto& clique : cliques) {
          if (std::all_of(clique.begin(), clique.end(), [&](std::size_t b) { return linked(a, b); })) {
            clique.push_back(a);
            placed = true;
            break;
          }
        }
        if (!placed) cliques.push_back({a});
      }
      if (cliques.size() == alive.size()) break;
      std::vector<std::size_t> next;
      for (const auto& clique : cliques) {
        next.push_back(clique.front());
        for (std::size_t k = 1; k < clique.size(); ++k) drop_correlated(clique[k], clique.front());
      }
      std::sort(next.begin(), next.end());
      alive = next;
    }
  }
  res.matrix = work.select_columns(alive);
  return res;
}

void write_features_csv(const std::filesystem::path& path, const FeatureMatrix& m) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path.string());
  csv::Writer w(out);
  std::vector<std::string> header = {"pool_id"};
  for (const auto& c : m.columns) header.push_back(c.name);
  w.row(header);
  for (std::size_t i = 0; i < m.rows(); ++i) {
    std::vector<std::string> row = {m.row_ids[i]};
    for (std::size_t j = 0; j < m.cols(); ++j) {
      row.push_back(csv::format_double(m.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))));
    }
    w.row(row);
  }
}

FeatureMatrix read_features_csv(const std::filesystem::path& path) {
  const auto t = csv::read(path);
  const std::size_t id_col = t.require("pool_id");
  FeatureMatrix m;
  std::vector<std::size_t> value_cols;
  for (std::size_t c = 0; c < t.header.size(); ++c) {
    if (c == id_col) continue;
    const auto& name = t.header[c];
    const auto dot = name.find('.');
    m.columns.push_back({name, dot == std::string::npos ? std::string{} : name.substr(0, dot), ""});
    value_cols.push_back(c);
  }
  m.values.resize(static_cast<Eigen::Index>(t.rows.size()), static_cast<Eigen::Index>(value_cols.size()));
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    m.row_ids.push_back(t.rows[r][id_col]);
    for (std::size_t k = 0; k < value_cols.size(); ++k) {
      m.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(k)) =
          csv::to_double(t.rows[r][value_cols[k]], t, r);
    }
  }
  return m;
}

}  // namespace poolrank::features
