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

#include "poolrank/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <set>

#include "poolrank/csv.hpp"
#include "poolrank/error.hpp"
#include "poolrank/ingest.hpp"
#include "poolrank/layer.hpp"
#include "poolrank/random.hpp"

namespace poolrank::synth {

namespace fs = std::filesystem;
using features::AttributeKind;
using features::AttributeSpec;
using features::Layer;
using features::LayerRole;
using features::LayerSpec;
using geo::PointXY;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

const std::vector<std::string> kLandUse = {
    "residential",      "commercial",      "industrial",      "office_park",     "retail_area",
    "public_facility",  "social_institution", "mixed_use",    "recreation_park", "sports_field",
    "allotment_garden", "day_recreation",  "holiday_park",    "greenhouse",      "agriculture",
    "forest",           "dry_natural_terrain", "wet_natural_terrain", "inland_water", "road_infrastructure",
    "rail_infrastructure", "airport",      "construction_site", "cemetery",      "dump_site"};

const std::vector<std::string> kPoiCategories = {
    "food",   "retail", "education", "healthcare", "hotel",   "leisure",       "parking",   "fuel",
    "office", "culture", "sport",    "worship",    "transport", "public_service", "car_service"};

const std::vector<std::string> kFlows = {"car_day",   "car_evening",   "car_night",
                                         "van_day",   "van_evening",   "van_night",
                                         "truck_day", "truck_evening", "truck_night"};

LayerSpec layer_spec(const std::string& name, LayerRole role) {
  LayerSpec s;
  s.name = name;
  s.file = name + ".geojson";
  s.role = role;
  return s;
}

double lognormal(Rng& rng, double sd) { return std::exp(sd * standard_normal(rng) - 0.5 * sd * sd); }
double uniform(Rng& rng, double a, double b) { return a + (b - a) * uniform01(rng); }

// Urban density field: a rural floor plus Gaussian city kernels.
struct DensityField {
  struct Kernel {
    PointXY c;
    double weight, scale;
  };
  std::vector<Kernel> kernels;
  double floor = 0.12;

  double operator()(PointXY p) const {
    double d = floor;
    for (const auto& k : kernels) {
      const double dx = p.x - k.c.x, dy = p.y - k.c.y;
      d += k.weight * std::exp(-(dx * dx + dy * dy) / (2 * k.scale * k.scale));
    }
    return d;
  }
  double max() const {
    double m = floor;
    for (const auto& k : kernels) m += k.weight;
    return m;
  }
};

struct Frame {
  geo::Projection proj;
  PointXY origin;  // projected scenario center
  double half = 0.0;
  geo::BoundingBox box() const { return {origin.x - half, origin.y - half, origin.x + half, origin.y + half}; }
};

PointXY sample_uniform(Rng& rng, const geo::BoundingBox& b) {
  return {uniform(rng, b.min_x, b.max_x), uniform(rng, b.min_y, b.max_y)};
}

PointXY sample_density(Rng& rng, const DensityField& f, const geo::BoundingBox& b) {
  const double m = f.max();
  while (true) {
    const PointXY p = sample_uniform(rng, b);
    if (uniform01(rng) * m <= f(p)) return p;
  }
}

// Clips a convex CCW polygon to the half plane closer to `s` than to `q`.
geo::Ring clip_bisector(const geo::Ring& poly, PointXY s, PointXY q) {
  const double nx = q.x - s.x, ny = q.y - s.y;
  const double c = 0.5 * (nx * (q.x + s.x) + ny * (q.y + s.y));
  auto side = [&](PointXY p) { return nx * p.x + ny * p.y - c; };  // <= 0 inside
  geo::Ring out;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const PointXY a = poly[i], b = poly[(i + 1) % poly.size()];
    const double sa = side(a), sb = side(b);
    if (sa <= 0) out.push_back(a);
    if ((sa < 0 && sb > 0) || (sa > 0 && sb < 0)) {
      const double t = sa / (sa - sb);
      out.push_back({a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)});
    }
  }
  // Drop near-duplicate vertices created by clipping through a corner.
  geo::Ring clean;
  for (const auto& p : out) {
    if (clean.empty() || std::hypot(p.x - clean.back().x, p.y - clean.back().y) > 1e-6) clean.push_back(p);
  }
  while (clean.size() > 1 && std::hypot(clean.front().x - clean.back().x, clean.front().y - clean.back().y) <= 1e-6) {
    clean.pop_back();
  }
  return clean;
}

// Voronoi cells of `seeds` clipped to `box`, by successive bisector clipping.
std::vector<geo::Ring> voronoi(const std::vector<PointXY>& seeds, const geo::BoundingBox& box) {
  std::vector<geo::Ring> cells(seeds.size());
  std::vector<std::pair<double, std::size_t>> nb(seeds.size());
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    for (std::size_t j = 0; j < seeds.size(); ++j) {
      nb[j] = {geo::distance(seeds[i], seeds[j]), j};
    }
    std::sort(nb.begin(), nb.end());
    geo::Ring cell = {{box.min_x, box.min_y}, {box.max_x, box.min_y}, {box.max_x, box.max_y}, {box.min_x, box.max_y}};
    for (const auto& [d, j] : nb) {
      if (j == i) continue;
      double r = 0.0;
      for (const auto& v : cell) r = std::max(r, geo::distance(seeds[i], v));
      if (d > 2.0 * r) break;
      cell = clip_bisector(cell, seeds[i], seeds[j]);
      if (cell.size() < 3) break;
    }
    cells[i] = std::move(cell);
  }
  return cells;
}

double min_distance_to(const std::vector<PointXY>& pts, PointXY p) {
  double d = std::numeric_limits<double>::infinity();
  for (const auto& q : pts) d = std::min(d, geo::distance(p, q));
  return d;
}

Layer polygon_layer(const std::string& name, const std::vector<geo::Ring>& cells) {
  Layer layer;
  layer.name = name;
  layer.kind = features::GeometryKind::kPolygon;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    layer.polygons.emplace_back(cells[i]);
    layer.part_feature.push_back(i);
  }
  layer.attributes.rows = cells.size();
  return layer;
}

void set_numeric(Layer& layer, const std::string& name, std::vector<double> v) {
  layer.attributes.numeric[name] = std::move(v);
}

// --- population cells -----------------------------------------------------------

struct RateAttr {
  const char* name;
  double rate;
  double sd;
  char rule;  // 'a' uninhabited, 'b' no income recipients, 'd' no households, 0 none
};

Layer make_population(Rng& rng, const DensityField& dens, const std::vector<geo::Ring>& cells, LayerSpec& spec,
                       PointXY origin) {
  Layer layer = polygon_layer("population", cells);
  const std::size_t n = cells.size();
  std::vector<double> pop(n), hh(n), recipients(n), buildings(n), cdist(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& poly = layer.polygons[i];
    const PointXY c = poly.bbox().center();
    cdist[i] = geo::distance(c, origin);
    const double area_km2 = poly.area() / 1e6;
    const bool empty = uniform01(rng) < 0.04;
    pop[i] = empty ? 0.0 : std::round(area_km2 * dens(c) * 4000.0 * lognormal(rng, 0.5));
    hh[i] = pop[i] > 0 ? std::max(1.0, std::round(pop[i] / uniform(rng, 1.7, 3.0))) : 0.0;
    recipients[i] = pop[i] > 0 ? std::round(pop[i] * 0.78 * lognormal(rng, 0.1)) : 0.0;
    buildings[i] = hh[i] > 0 ? std::round(hh[i] * uniform(rng, 0.6, 1.2))
                             : (uniform01(rng) < 0.3 ? std::round(uniform(rng, 1, 20)) : 0.0);
  }
  set_numeric(layer, "population", pop);
  set_numeric(layer, "households", hh);
  set_numeric(layer, "income_recipients", recipients);
  set_numeric(layer, "n_buildings", buildings);
  spec.attributes.push_back({"population", AttributeKind::kExtensive, std::nullopt, {}});
  spec.attributes.push_back({"households", AttributeKind::kExtensive, std::nullopt, {}});
  spec.attributes.push_back({"income_recipients", AttributeKind::kExtensive, std::nullopt, {}});
  spec.attributes.push_back({"n_buildings", AttributeKind::kExtensive, std::nullopt, {}});

  const RateAttr per_person[] = {
      {"males", 0.49, 0.05, 0},
      {"females", 0.51, 0.05, 0},
      {"age_0_14", 0.16, 0.3, 'a'},
      {"age_15_24", 0.12, 0.3, 'a'},
      {"age_25_44", 0.26, 0.3, 'a'},
      {"age_45_64", 0.27, 0.3, 'a'},
      {"age_65_74", 0.11, 0.4, 'a'},
      {"age_75_plus", 0.08, 0.5, 'a'},
      {"unmarried", 0.48, 0.2, 0},
      {"married", 0.40, 0.2, 0},
      {"divorced", 0.07, 0.3, 0},
      {"widowed", 0.05, 0.3, 0},
      {"western_migrants", 0.10, 0.6, 0},
      {"non_western_migrants", 0.12, 0.9, 0},
      {"persons_social_assistance", 0.03, 0.8, 'a'},
      {"persons_disability_benefit", 0.05, 0.6, 'a'},
      {"workers_industry", 0.08, 0.7, 'a'},
      {"workers_services", 0.30, 0.5, 'a'},
      {"income_low", 0.25, 0.5, 'b'},
      {"income_high", 0.20, 0.7, 'b'},
      {"cars", 0.45, 0.4, 0},
      {"companies_total", 0.08, 1.0, 0},
      {"companies_retail", 0.012, 1.2, 0},
      {"companies_hospitality", 0.008, 1.3, 0},
      {"companies_business", 0.02, 1.1, 0},
      {"households_single", 0.38, 0.4, 'd'},
      {"households_with_children", 0.30, 0.4, 'd'},
      {"households_without_children", 0.32, 0.4, 'd'},
      {"students", 0.06, 0.8, 0},
      {"retirees", 0.17, 0.4, 0},
      {"unemployed", 0.04, 0.7, 0},
      {"self_employed", 0.09, 0.5, 0},
      {"commuters_out", 0.25, 0.5, 0},
      {"commuters_in", 0.20, 1.0, 0},
      {"bicycles", 0.9, 0.3, 0},
      {"electric_cars", 0.01, 1.0, 0},
      {"hybrid_cars", 0.02, 0.9, 0},
      {"motorcycles", 0.03, 0.6, 0},
      {"delivery_vans", 0.02, 1.1, 0},
      {"vacant_homes", 0.03, 0.9, 'c'},
      {"new_buildings", 0.02, 1.2, 'c'},
      {"social_housing", 0.25, 0.8, 'c'},
      {"owner_occupied_homes", 0.5, 0.4, 'c'},
      {"rental_properties", 0.45, 0.5, 'c'},
      {"corporate_homes", 0.30, 0.6, 'c'},
  };
  for (const auto& a : per_person) {
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double base = a.rule == 'd' ? hh[i] : a.rule == 'c' ? buildings[i] : pop[i];
      // Urban cores skew some attributes.
      const double urban = std::exp(-cdist[i] / 8000.0);
      double tilt = 1.0;
      if (std::string_view(a.name).starts_with("companies")) tilt = 0.5 + 1.5 * urban;
      if (std::string_view(a.name) == "households_single") tilt = 0.7 + 0.8 * urban;
      if (std::string_view(a.name) == "cars") tilt = 1.3 - 0.6 * urban;
      v[i] = std::round(base * a.rate * tilt * lognormal(rng, a.sd));
      const bool blank = (a.rule == 'a' && pop[i] == 0) || (a.rule == 'b' && recipients[i] == 0) ||
                         (a.rule == 'd' && hh[i] == 0) || (a.rule == 'c' && buildings[i] == 0);
      if (blank) v[i] = kNaN;
    }
    set_numeric(layer, a.name, std::move(v));
    spec.attributes.push_back({a.name, AttributeKind::kExtensive, std::nullopt, {}});
  }

  auto intensive = [&](const char* name, std::optional<std::string> weight, auto gen) {
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = gen(i);
    set_numeric(layer, name, std::move(v));
    spec.attributes.push_back({name, AttributeKind::kIntensive, std::move(weight), {}});
  };
  intensive("avg_income", "income_recipients", [&](std::size_t i) {
    if (recipients[i] == 0) return kNaN;
    return 24000.0 * (1.0 + 0.3 * std::tanh((cdist[i] - 5000.0) / 4000.0)) * lognormal(rng, 0.2);
  });
  intensive("mean_house_value", "n_buildings", [&](std::size_t i) {
    if (buildings[i] == 0) return kNaN;
    return 230000.0 * lognormal(rng, 0.35);
  });
  intensive("pct_multi_family", "n_buildings", [&](std::size_t i) {
    if (buildings[i] == 0) return kNaN;
    return std::clamp(100.0 * std::exp(-cdist[i] / 6000.0) + 15.0 * standard_normal(rng), 0.0, 100.0);
  });
  intensive("mean_house_occupancy", std::nullopt, [&](std::size_t i) {
    if (buildings[i] == 0) return kNaN;
    return uniform(rng, 1.5, 3.2);
  });
  intensive("mean_household_size", "households", [&](std::size_t i) {
    // Often unpublished; the derivation rule fills it from population/households.
    if (hh[i] == 0 || uniform01(rng) < 0.3) return kNaN;
    return pop[i] / hh[i];
  });
  intensive("urbanity", std::nullopt, [&](std::size_t i) {
    if (uniform01(rng) < 0.03) return kNaN;
    const double d = dens(layer.polygons[i].bbox().center());
    return d > 1.5 ? 1.0 : d > 0.9 ? 2.0 : d > 0.5 ? 3.0 : d > 0.25 ? 4.0 : 5.0;
  });
  intensive("zip_share_band", std::nullopt, [&](std::size_t) {
    if (uniform01(rng) < 0.03) return kNaN;
    return std::floor(uniform(rng, 1, 7));
  });
  intensive("cars_per_household", "households", [&](std::size_t i) {
    if (hh[i] == 0) return kNaN;
    return uniform(rng, 0.5, 1.6) * (0.6 + 0.4 * (1 - std::exp(-cdist[i] / 5000.0)));
  });
  intensive("pct_owner_occupied", "n_buildings", [&](std::size_t i) {
    if (buildings[i] == 0 || uniform01(rng) < 0.001) return kNaN;
    return std::clamp(uniform(rng, 20, 90), 0.0, 100.0);
  });
  intensive("dist_to_supermarket_km", std::nullopt, [&](std::size_t i) {
    if (uniform01(rng) < 0.001) return kNaN;
    return 0.3 + cdist[i] / 8000.0 * lognormal(rng, 0.4);
  });
  intensive("pct_non_western", std::nullopt, [&](std::size_t) {
    // Suppressed for privacy in many cells; too sparse to keep.
    if (uniform01(rng) < 0.15) return kNaN;
    return uniform(rng, 0, 40);
  });
  spec.imputation = features::default_imputation_rules();
  return layer;
}

Layer make_neighborhoods(Rng& rng, const std::vector<geo::Ring>& cells, LayerSpec& spec) {
  Layer layer = polygon_layer("neighborhoods", cells);
  const std::size_t n = cells.size();
  std::vector<double> e_meters(n), g_meters(n);
  for (std::size_t i = 0; i < n; ++i) {
    const bool few = uniform01(rng) < 0.05;
    e_meters[i] = few ? std::floor(uniform(rng, 0, 5)) : std::round(layer.polygons[i].area() / 1e6 * 900 * lognormal(rng, 0.6));
    g_meters[i] = few ? std::floor(uniform(rng, 0, 5)) : std::round(e_meters[i] * uniform(rng, 0.7, 1.0));
  }
  set_numeric(layer, "electricity_meters", e_meters);
  set_numeric(layer, "gas_meters", g_meters);
  spec.attributes.push_back({"electricity_meters", AttributeKind::kExtensive, std::nullopt, {}});
  spec.attributes.push_back({"gas_meters", AttributeKind::kExtensive, std::nullopt, {}});
  auto intensive = [&](const char* name, auto gen) {
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = gen(i);
    set_numeric(layer, name, std::move(v));
    spec.attributes.push_back({name, AttributeKind::kIntensive, std::nullopt, {}});
  };
  intensive("liveability", [&](std::size_t) { return uniform(rng, 3, 8); });
  intensive("liveability_physical", [&](std::size_t) { return standard_normal(rng); });
  intensive("liveability_social", [&](std::size_t) { return standard_normal(rng); });
  intensive("liveability_safety", [&](std::size_t) { return standard_normal(rng); });
  intensive("liveability_amenities", [&](std::size_t) { return standard_normal(rng); });
  intensive("electricity_households", [&](std::size_t i) { return e_meters[i] < 5 ? kNaN : 2900.0 * lognormal(rng, 0.2); });
  intensive("electricity_companies", [&](std::size_t i) { return e_meters[i] < 5 ? kNaN : 50000.0 * lognormal(rng, 0.8); });
  intensive("gas_households", [&](std::size_t i) { return g_meters[i] < 5 ? kNaN : 1300.0 * lognormal(rng, 0.25); });
  intensive("gas_companies", [&](std::size_t i) { return g_meters[i] < 5 ? kNaN : 20000.0 * lognormal(rng, 0.8); });
  std::vector<double> solar(n);
  for (std::size_t i = 0; i < n; ++i) solar[i] = std::round(e_meters[i] * 0.05 * lognormal(rng, 0.7));
  set_numeric(layer, "solar_panels", solar);
  spec.attributes.push_back({"solar_panels", AttributeKind::kExtensive, std::nullopt, {}});
  spec.imputation = features::default_imputation_rules();
  return layer;
}

Layer make_land_use(Rng& rng, const DensityField& dens, const std::vector<geo::Ring>& cells, LayerSpec& spec) {
  Layer layer = polygon_layer("land_use", cells);
  std::vector<std::string> cat(cells.size());
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const double d = dens(layer.polygons[i].bbox().center());
    const double urban = std::clamp(d / 1.5, 0.0, 1.0);
    // Category weights blend a rural and an urban profile.
    std::vector<double> w(kLandUse.size());
    const double rural[] = {4, 0.5, 2, 0.3, 0.3, 0.5, 0.3, 0.3, 1.5, 1, 0.5, 0.5, 0.4, 2,
                            20, 8, 2, 2, 3, 2, 0.5, 0.1, 0.5, 0.3, 0.2};
    const double city[] = {30, 8, 4, 3, 4, 4, 3, 5, 4, 2, 1, 1, 0.1, 0.1,
                           1, 1, 0.3, 0.3, 1.5, 5, 1.5, 0.1, 1.5, 0.5, 0.1};
    double total = 0;
    for (std::size_t k = 0; k < w.size(); ++k) total += w[k] = (1 - urban) * rural[k] + urban * city[k];
    double u = uniform01(rng) * total;
    std::size_t k = 0;
    while (k + 1 < w.size() && u >= w[k]) u -= w[k++];
    cat[i] = kLandUse[k];
  }
  layer.attributes.text["class"] = cat;
  spec.attributes.push_back({"class", AttributeKind::kCategorical, std::nullopt, kLandUse});
  return layer;
}

Layer make_roads(Rng& rng, const DensityField& dens, const geo::BoundingBox& box, int n_nodes, int k,
                 LayerSpec& spec) {
  std::vector<PointXY> nodes;
  for (int i = 0; i < n_nodes; ++i) nodes.push_back(sample_density(rng, dens, box));
  std::set<std::pair<std::size_t, std::size_t>> edges;
  std::vector<std::pair<double, std::size_t>> nb(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    for (std::size_t j = 0; j < nodes.size(); ++j) nb[j] = {geo::distance(nodes[i], nodes[j]), j};
    std::partial_sort(nb.begin(), nb.begin() + std::min<std::ptrdiff_t>(k + 1, static_cast<std::ptrdiff_t>(nb.size())), nb.end());
    for (int m = 1; m <= k && m < static_cast<int>(nb.size()); ++m) {
      const auto j = nb[static_cast<std::size_t>(m)].second;
      if (nb[static_cast<std::size_t>(m)].first > 0) edges.insert({std::min(i, j), std::max(i, j)});
    }
  }
  Layer layer;
  layer.name = "roads";
  layer.kind = features::GeometryKind::kPolyline;
  std::vector<double> score;
  for (const auto& [a, b] : edges) {
    const PointXY pa = nodes[a], pb = nodes[b];
    const PointXY mid{(pa.x + pb.x) / 2 + uniform(rng, -30, 30), (pa.y + pb.y) / 2 + uniform(rng, -30, 30)};
    layer.polylines.emplace_back(std::vector<PointXY>{pa, mid, pb});
    layer.part_feature.push_back(layer.part_feature.size());
    score.push_back(geo::distance(pa, pb) * (0.5 + uniform01(rng)) * std::sqrt(dens(mid)));
  }
  const std::size_t n = layer.polylines.size();
  layer.attributes.rows = n;
  std::vector<double> sorted = score;
  std::sort(sorted.begin(), sorted.end());
  auto q = [&](double f) { return sorted[static_cast<std::size_t>(f * static_cast<double>(n - 1))]; };
  const double q_primary = q(0.92), q_secondary = q(0.78), q_tertiary = q(0.55);
  std::vector<std::string> type(n);
  std::vector<std::vector<double>> flows(kFlows.size(), std::vector<double>(n));
  const double mode_share[] = {1.0, 0.12, 0.06};
  const double time_share[] = {1.0, 0.4, 0.1};
  for (std::size_t e = 0; e < n; ++e) {
    double base;
    if (score[e] >= q_primary) {
      type[e] = "primary";
      base = 20000;
    } else if (score[e] >= q_secondary) {
      type[e] = "secondary";
      base = 8000;
    } else if (score[e] >= q_tertiary) {
      type[e] = "tertiary";
      base = 3000;
    } else {
      type[e] = "residential";
      base = 500;
    }
    base *= lognormal(rng, 0.4);
    for (std::size_t f = 0; f < kFlows.size(); ++f) {
      flows[f][e] = std::round(base * mode_share[f / 3] * time_share[f % 3] * lognormal(rng, 0.15));
    }
  }
  layer.attributes.text["road_type"] = type;
  for (std::size_t f = 0; f < kFlows.size(); ++f) set_numeric(layer, kFlows[f], flows[f]);
  spec.type_attribute = "road_type";
  spec.road_types = {"residential", "primary", "secondary", "tertiary"};
  spec.flow_attributes = kFlows;
  return layer;
}

Layer make_pois(Rng& rng, const DensityField& dens, const geo::BoundingBox& box, int per_category, LayerSpec& spec) {
  Layer layer;
  layer.name = "poi";
  layer.kind = features::GeometryKind::kPoint;
  std::vector<std::string> cat;
  for (const auto& c : kPoiCategories) {
    std::vector<PointXY> clusters;
    const int n_clusters = 3 + static_cast<int>(uniform_index(rng, 4));
    for (int i = 0; i < n_clusters; ++i) clusters.push_back(sample_density(rng, dens, box));
    const int count = static_cast<int>(std::round(per_category * uniform(rng, 0.6, 1.4)));
    for (int i = 0; i < count; ++i) {
      PointXY p;
      if (uniform01(rng) < 0.6) {
        const auto& cc = clusters[uniform_index(rng, clusters.size())];
        p = {cc.x + 600 * standard_normal(rng), cc.y + 600 * standard_normal(rng)};
        p.x = std::clamp(p.x, box.min_x, box.max_x);
        p.y = std::clamp(p.y, box.min_y, box.max_y);
      } else {
        p = sample_density(rng, dens, box);
      }
      layer.points.push_back(p);
      layer.part_feature.push_back(layer.part_feature.size());
      cat.push_back(c);
    }
  }
  layer.attributes.rows = layer.points.size();
  layer.attributes.text["category"] = cat;
  spec.category_attribute = "category";
  spec.categories = kPoiCategories;
  return layer;
}

Layer make_landscan(Rng& rng, const DensityField& dens, const geo::BoundingBox& box, double spacing) {
  Layer layer;
  layer.name = "landscan";
  layer.kind = features::GeometryKind::kPoint;
  std::vector<double> v;
  for (double y = box.min_y + spacing / 2; y < box.max_y; y += spacing) {
    for (double x = box.min_x + spacing / 2; x < box.max_x; x += spacing) {
      layer.points.push_back({x, y});
      layer.part_feature.push_back(layer.part_feature.size());
      v.push_back(std::round(dens({x, y}) * 1500.0 * lognormal(rng, 0.3)));
    }
  }
  layer.attributes.rows = layer.points.size();
  set_numeric(layer, "ambient_population", v);
  return layer;
}

double skewness(const Eigen::VectorXd& c) {
  const double n = static_cast<double>(c.size());
  const Eigen::ArrayXd d = c.array() - c.mean();
  const double m2 = d.square().sum() / n;
  if (m2 <= 0) return 0.0;
  return (d.cube().sum() / n) / std::pow(m2, 1.5);
}

}  // namespace

void ScenarioSpec::validate() const {
  auto positive = [](int v, const char* what) {
    if (v <= 0) throw InputError(std::string("scenario: ") + what + " must be positive");
  };
  positive(n_city_centers, "n_city_centers");
  positive(n_population_cells, "n_population_cells");
  positive(n_neighborhoods, "n_neighborhoods");
  positive(n_land_use_cells, "n_land_use_cells");
  positive(n_road_nodes, "n_road_nodes");
  positive(road_neighbors, "road_neighbors");
  positive(pois_per_category, "pois_per_category");
  positive(n_pools, "n_pools");
  positive(n_rfids, "n_rfids");
  positive(popularity_levels, "popularity_levels");
  if (n_planted < 0) throw InputError("scenario: n_planted must be >= 0");
  if (!(extent_km > 2)) throw InputError("scenario: extent_km must exceed 2 km");
  if (!(noise_sd >= 0)) throw InputError("scenario: noise_sd must be >= 0");
  if (!(z > 0 && z < 1)) throw InputError("scenario: z must be in (0, 1)");
  if (!(beta_min >= 0 && beta_max >= beta_min)) throw InputError("scenario: need 0 <= beta_min <= beta_max");
  if (n_rfids < popularity_levels + 2) throw InputError("scenario: n_rfids too small for the popularity range");
}

ScenarioSpec reference_scenario() { return ScenarioSpec{}; }

ScenarioSpec small_scenario() {
  ScenarioSpec s;
  s.extent_km = 10.0;
  s.n_city_centers = 2;
  s.n_population_cells = 400;
  s.n_neighborhoods = 80;
  s.n_land_use_cells = 400;
  s.n_road_nodes = 400;
  s.pois_per_category = 50;
  s.n_pools = 300;
  s.n_rfids = 5000;
  s.n_planted = 5;
  return s;
}

std::vector<std::size_t> choose_planted_columns(const features::FeatureMatrix& m, int count,
                                                const std::vector<std::string>& forced, Rng& rng) {
  const std::size_t p = m.cols();
  const auto n = static_cast<double>(m.rows());
  std::vector<char> eligible(p, 0);
  for (std::size_t j = 0; j < p; ++j) {
    const Eigen::VectorXd c = m.values.col(static_cast<Eigen::Index>(j));
    std::vector<double> v(c.data(), c.data() + c.size());
    std::sort(v.begin(), v.end());
    const double distinct = static_cast<double>(std::unique(v.begin(), v.end()) - v.begin());
    eligible[j] = distinct / n >= 0.5 && std::abs(skewness(c)) <= 2.5;
  }
  std::vector<std::size_t> order;
  for (const auto& name : forced) {
    if (auto j = m.column_index(name)) {
      order.push_back(*j);
      eligible[*j] = 1;
    }
  }
  std::vector<std::size_t> rest(p);
  std::iota(rest.begin(), rest.end(), 0);
  shuffle(std::span(rest), rng);
  for (auto j : rest) {
    if (std::find(order.begin(), order.end(), j) == order.end()) order.push_back(j);
  }
  std::vector<std::size_t> chosen;
  for (auto j : order) {
    if (static_cast<int>(chosen.size()) >= count) break;
    if (!eligible[j]) continue;
    const Eigen::VectorXd cj = m.values.col(static_cast<Eigen::Index>(j));
    bool ok = true;
    for (auto k : chosen) {
      if (std::abs(features::pearson(cj, m.values.col(static_cast<Eigen::Index>(k)))) >= 0.3) {
        ok = false;
        break;
      }
    }
    if (ok) chosen.push_back(j);
  }
  if (static_cast<int>(chosen.size()) < count) {
    throw DegenerateError("only " + std::to_string(chosen.size()) + " predictors are eligible for planting; " +
                          std::to_string(count) + " requested");
  }
  return chosen;
}

std::vector<int> popularity_from_scores(const std::vector<double>& noisy, double z, int levels) {
  const std::size_t n = noisy.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return noisy[a] < noisy[b]; });
  const auto n_top = static_cast<std::size_t>(std::llround(z * static_cast<double>(n)));
  std::vector<int> pop(n);
  for (std::size_t r = 0; r < n; ++r) {
    const auto base = static_cast<int>((static_cast<std::uint64_t>(levels) * r) / n);
    pop[order[r]] = 1 + base + (r >= n - n_top ? 1 : 0);
  }
  return pop;
}

Scenario generate_scenario(const ScenarioSpec& spec, const fs::path& dir) {
  spec.validate();
  fs::create_directories(dir);
  Scenario sc;
  sc.spec = spec;
  sc.dir = dir;

  Frame frame;
  frame.proj.ref_lat_deg = spec.center_lat;
  frame.origin = frame.proj.forward(spec.center_lon, spec.center_lat);
  frame.half = spec.extent_km * 500.0;
  const geo::BoundingBox box = frame.box();

  // Each layer draws from its own sub-stream so changing one layer's counts
  // leaves the others untouched.
  auto stream = [&](std::uint64_t index) { return make_rng(spec.seed, Stream::kSynth, index); };

  DensityField dens;
  {
    Rng rng = stream(0);
    const geo::BoundingBox inner{frame.origin.x - 0.6 * frame.half, frame.origin.y - 0.6 * frame.half,
                                 frame.origin.x + 0.6 * frame.half, frame.origin.y + 0.6 * frame.half};
    for (int i = 0; i < spec.n_city_centers; ++i) {
      dens.kernels.push_back({sample_uniform(rng, inner), i == 0 ? 2.0 : uniform(rng, 0.6, 1.4),
                              uniform(rng, 1200, 2500) * spec.extent_km / 20.0});
    }
  }

  features::Manifest manifest;
  std::vector<Layer> layers;
  {
    Rng rng = stream(1);
    std::vector<PointXY> seeds;
    for (int i = 0; i < spec.n_population_cells; ++i) seeds.push_back(sample_density(rng, dens, box));
    LayerSpec ls = layer_spec("population", LayerRole::kPolygonAttributes);
    layers.push_back(make_population(rng, dens, voronoi(seeds, box), ls, frame.origin));
    manifest.layers.push_back(std::move(ls));
  }
  {
    Rng rng = stream(2);
    std::vector<PointXY> seeds;
    for (int i = 0; i < spec.n_neighborhoods; ++i) seeds.push_back(sample_density(rng, dens, box));
    LayerSpec ls = layer_spec("neighborhoods", LayerRole::kPolygonAttributes);
    layers.push_back(make_neighborhoods(rng, voronoi(seeds, box), ls));
    manifest.layers.push_back(std::move(ls));
  }
  {
    Rng rng = stream(3);
    std::vector<PointXY> seeds;
    for (int i = 0; i < spec.n_land_use_cells; ++i) seeds.push_back(sample_uniform(rng, box));
    LayerSpec ls = layer_spec("land_use", LayerRole::kPolygonAttributes);
    layers.push_back(make_land_use(rng, dens, voronoi(seeds, box), ls));
    manifest.layers.push_back(std::move(ls));
  }
  {
    Rng rng = stream(4);
    LayerSpec ls = layer_spec("roads", LayerRole::kRoads);
    layers.push_back(make_roads(rng, dens, box, spec.n_road_nodes, spec.road_neighbors, ls));
    manifest.layers.push_back(std::move(ls));
  }
  {
    Rng rng = stream(5);
    LayerSpec ls = layer_spec("poi", LayerRole::kPoints);
    layers.push_back(make_pois(rng, dens, box, spec.pois_per_category, ls));
    manifest.layers.push_back(std::move(ls));
  }

  // Charging pools: well separated centers, 1-3 stations each.
  std::vector<ingest::StationRecord> stations;
  std::vector<PointXY> centers;
  {
    Rng rng = stream(6);
    const double margin = 600.0;
    const geo::BoundingBox inner{box.min_x + margin, box.min_y + margin, box.max_x - margin, box.max_y - margin};
    int attempts = 0;
    while (static_cast<int>(centers.size()) < spec.n_pools) {
      if (++attempts > spec.n_pools * 1000) throw DegenerateError("cannot place the requested number of pools");
      const PointXY c = sample_density(rng, dens, inner);
      if (min_distance_to(centers, c) >= spec.min_pool_spacing_m) centers.push_back(c);
    }
    int next_id = 1;
    for (const auto& c : centers) {
      const double u = uniform01(rng);
      const int n_st = u < 0.6 ? 1 : u < 0.9 ? 2 : 3;
      const auto rollout = uniform01(rng) < 0.6 ? ingest::Rollout::kStrategic : ingest::Rollout::kDemandDriven;
      const double pw = uniform01(rng);
      const double power = pw < 0.6 ? 11.0 : pw < 0.95 ? 22.0 : 50.0;
      for (int s = 0; s < n_st; ++s) {
        const double r = 12.0 * std::sqrt(uniform01(rng)), a = 2 * M_PI * uniform01(rng);
        const auto ll = frame.proj.inverse({c.x + r * std::cos(a), c.y + r * std::sin(a)});
        ingest::StationRecord st;
        char id[16];
        std::snprintf(id, sizeof(id), "ST%05d", next_id++);
        st.id = id;
        st.lon = ll[0];
        st.lat = ll[1];
        st.n_connectors = uniform01(rng) < 0.85 ? 2 : (uniform01(rng) < 0.5 ? 1 : 4);
        st.max_power_kw = power;
        st.rollout = rollout;
        stations.push_back(std::move(st));
      }
    }
    // Competitor layer: every station is a point; a pool's own stations lie
    // within the exclusion radius of its centroid.
    Layer comp;
    comp.name = "charging";
    comp.kind = features::GeometryKind::kPoint;
    for (const auto& st : stations) {
      comp.points.push_back(frame.proj.forward(st.lon, st.lat));
      comp.part_feature.push_back(comp.part_feature.size());
    }
    comp.attributes.rows = comp.points.size();
    layers.push_back(std::move(comp));
    LayerSpec ls = layer_spec("charging", LayerRole::kPoints);
    ls.exclude_within_m = 50.0;
    manifest.layers.push_back(std::move(ls));
  }
  {
    Rng rng = stream(7);
    layers.push_back(make_landscan(rng, dens, box, spec.landscan_spacing_m));
    LayerSpec ls = layer_spec("landscan", LayerRole::kRasterPoints);
    ls.value_attributes = {"ambient_population"};
    manifest.layers.push_back(std::move(ls));
  }

  for (std::size_t l = 0; l < layers.size(); ++l) {
    features::write_geojson(dir / manifest.layers[l].file, layers[l], frame.proj);
  }
  manifest.write(dir / "attributes.json");
  ingest::write_stations(dir / "stations.csv", stations);

  // Read everything back and extract exactly as the pipeline does.
  auto read_stations = ingest::read_stations(dir / "stations.csv");
  const geo::Projection proj{ingest::reference_latitude(read_stations)};
  ingest::project_stations(read_stations, proj);
  const auto pools = ingest::aggregate_pools(read_stations);
  if (static_cast<int>(pools.size()) != spec.n_pools) {
    throw Error("synthetic stations aggregated into " + std::to_string(pools.size()) + " pools, expected " +
                std::to_string(spec.n_pools));
  }
  const auto loaded = features::load_layers(features::Manifest::read(dir / "attributes.json"), proj);
  geo::BufferSpec buffer;
  buffer.radius = spec.buffer_radius_m;
  const auto raw = features::extract_features(loaded, pools, buffer);
  const auto processed = features::preprocess(raw).matrix;
  sc.n_raw_predictors = raw.cols();
  sc.n_predictors = processed.cols();

  // Plant the signal.
  auto& truth = sc.truth;
  const std::size_t n = pools.size();
  {
    Rng rng = stream(8);
    const auto cols = choose_planted_columns(processed, spec.n_planted, spec.forced_predictors, rng);
    Eigen::VectorXd eta = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
    for (auto j : cols) {
      Eigen::VectorXd c = processed.values.col(static_cast<Eigen::Index>(j));
      c.array() -= c.mean();
      c /= std::sqrt(c.squaredNorm() / static_cast<double>(n));
      const bool is_forced = std::find(spec.forced_predictors.begin(), spec.forced_predictors.end(),
                                       processed.columns[j].name) != spec.forced_predictors.end();
      const double sign = uniform01(rng) < 0.5 ? -1.0 : 1.0;
      const double b = uniform(rng, spec.beta_min, spec.beta_max) * (is_forced ? 1.0 : sign);
      eta += b * c;
      truth.predictors.push_back(processed.columns[j].name);
      truth.beta.push_back(b);
    }
    for (std::size_t i = 0; i < n; ++i) {
      truth.pool_ids.push_back(pools[i].pool_id);
      const double e = eta(static_cast<Eigen::Index>(i));
      truth.eta.push_back(e);
      truth.noisy.push_back(e + spec.noise_sd * standard_normal(rng));
      truth.oracle_score.push_back(1.0 / (1.0 + std::exp(-e)));
    }
    truth.popularity = popularity_from_scores(truth.noisy, spec.z, spec.popularity_levels);
    std::vector<double> popd(truth.popularity.begin(), truth.popularity.end());
    truth.labels = ingest::label_top(popd, spec.z).labels;
  }

  // Transactions realizing the planted popularity.
  {
    Rng rng = stream(9);
    const Timestamp start = ingest::Period::calendar_year(spec.year).start;
    const Timestamp end = ingest::Period::calendar_year(spec.year).end;
    std::vector<ingest::Transaction> txs;
    char rfid[24];
    auto rfid_name = [&](std::size_t k) {
      std::snprintf(rfid, sizeof(rfid), "RF%06zu", k);
      return std::string(rfid);
    };
    for (std::size_t i = 0; i < n; ++i) {
      const auto& pool = pools[i];
      std::set<std::size_t> drawn;
      while (static_cast<int>(drawn.size()) < truth.popularity[i]) {
        drawn.insert(uniform_index(rng, static_cast<std::size_t>(spec.n_rfids)));
      }
      std::vector<std::size_t> ids(drawn.begin(), drawn.end());
      shuffle(std::span(ids), rng);
      for (auto card : ids) {
        const int n_tx = 1 + static_cast<int>(uniform_index(rng, 3));
        for (int t = 0; t < n_tx; ++t) {
          ingest::Transaction tx;
          tx.station_id = pool.station_ids[uniform_index(rng, pool.station_ids.size())];
          tx.rfid = rfid_name(card);
          const auto dur = static_cast<Timestamp>(
              std::llround(3600.0 * std::min(20.0, 0.5 - 3.0 * std::log(1.0 - uniform01(rng)))));
          const double dur_h = seconds_to_hours(dur);
          tx.plug_in = start + static_cast<Timestamp>(uniform_index(rng, static_cast<std::size_t>(end - start - dur)));
          tx.plug_out = tx.plug_in + dur;
          tx.charging_time_h = std::floor(dur_h * uniform(rng, 0.3, 1.0) * 1e4) / 1e4;
          tx.energy_kwh = std::round(tx.charging_time_h * std::min(pool.max_power_kw, 11.0) * uniform(rng, 0.5, 1.0) * 1e3) / 1e3;
          txs.push_back(std::move(tx));
        }
      }
      // A few records the filter must discard: before the period or with
      // plug-out before plug-in. They reuse cards already seen at the pool.
      if (uniform01(rng) < 0.02) {
        ingest::Transaction tx;
        tx.station_id = pool.station_ids.front();
        tx.rfid = rfid_name(ids.front());
        tx.plug_in = start - 3 * 3600;
        tx.plug_out = start + 3600;
        tx.charging_time_h = 1.0;
        tx.energy_kwh = 5.0;
        txs.push_back(std::move(tx));
      }
      if (uniform01(rng) < 0.01) {
        ingest::Transaction tx;
        tx.station_id = pool.station_ids.front();
        tx.rfid = rfid_name(ids.back());
        tx.plug_in = start + 86400 * 100;
        tx.plug_out = tx.plug_in - 600;
        tx.charging_time_h = 0.1;
        tx.energy_kwh = 1.0;
        txs.push_back(std::move(tx));
      }
    }
    ingest::write_transactions(dir / "transactions.csv", txs);
  }

  {
    std::ofstream out(dir / "truth.csv", std::ios::binary);
    csv::Writer w(out);
    w.row({"pool_id", "eta", "noisy", "oracle_score", "popularity", "label"});
    for (std::size_t i = 0; i < n; ++i) {
      w.row({truth.pool_ids[i], csv::format_double(truth.eta[i]), csv::format_double(truth.noisy[i]),
             csv::format_double(truth.oracle_score[i]), std::to_string(truth.popularity[i]),
             std::to_string(truth.labels[i])});
    }
  }
  {
    std::ofstream out(dir / "planted.csv", std::ios::binary);
    csv::Writer w(out);
    w.row({"predictor", "beta"});
    for (std::size_t j = 0; j < truth.predictors.size(); ++j) {
      w.row({truth.predictors[j], csv::format_double(truth.beta[j])});
    }
  }
  return sc;
}

PlantedTruth read_truth(const fs::path& dir) {
  PlantedTruth t;
  const auto tt = csv::read(dir / "truth.csv");
  const auto c_id = tt.require("pool_id"), c_eta = tt.require("eta"), c_noisy = tt.require("noisy"),
             c_or = tt.require("oracle_score"), c_pop = tt.require("popularity"), c_lab = tt.require("label");
  for (std::size_t r = 0; r < tt.rows.size(); ++r) {
    const auto& row = tt.rows[r];
    t.pool_ids.push_back(row[c_id]);
    t.eta.push_back(csv::to_double(row[c_eta], tt, r));
    t.noisy.push_back(csv::to_double(row[c_noisy], tt, r));
    t.oracle_score.push_back(csv::to_double(row[c_or], tt, r));
    t.popularity.push_back(static_cast<int>(csv::to_int(row[c_pop], tt, r)));
    t.labels.push_back(static_cast<int>(csv::to_int(row[c_lab], tt, r)));
  }
  const auto pt = csv::read(dir / "planted.csv");
  const auto c_pred = pt.require("predictor"), c_beta = pt.require("beta");
  for (std::size_t r = 0; r < pt.rows.size(); ++r) {
    t.predictors.push_back(pt.rows[r][c_pred]);
    t.beta.push_back(csv::to_double(pt.rows[r][c_beta], pt, r));
  }
  return t;
}

}  // namespace poolrank::synth
