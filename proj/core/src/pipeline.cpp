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

#include "poolrank/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>

#include <nlohmann/json.hpp>

#include "poolrank/csv.hpp"
#include "poolrank/error.hpp"
#include "poolrank/parallel.hpp"
#include "poolrank/stats.hpp"
#include "poolrank/timestamp.hpp"

namespace poolrank::pipeline {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

// Enum spellings used in the JSON config.
std::string basis_name(ingest::UseTimeBasis b) {
  return b == ingest::UseTimeBasis::kConnected ? "connected" : "charging";
}
ingest::UseTimeBasis parse_basis(const std::string& s) {
  if (s == "connected") return ingest::UseTimeBasis::kConnected;
  if (s == "charging") return ingest::UseTimeBasis::kCharging;
  throw InputError("config: use_time_basis must be 'connected' or 'charging', got '" + s + "'");
}
std::string grouping_name(features::CorrelationGrouping g) {
  return g == features::CorrelationGrouping::kClique ? "clique" : "component";
}
features::CorrelationGrouping parse_grouping(const std::string& s) {
  if (s == "clique") return features::CorrelationGrouping::kClique;
  if (s == "component") return features::CorrelationGrouping::kComponent;
  throw InputError("config: correlation_grouping must be 'clique' or 'component', got '" + s + "'");
}
std::string scaling_name(eval::CoefficientScaling s) {
  return s == eval::CoefficientScaling::kDivideBySd ? "divide_by_sd" : "multiply_by_sd";
}
eval::CoefficientScaling parse_scaling(const std::string& s) {
  if (s == "divide_by_sd") return eval::CoefficientScaling::kDivideBySd;
  if (s == "multiply_by_sd") return eval::CoefficientScaling::kMultiplyBySd;
  throw InputError("config: scaling must be 'divide_by_sd' or 'multiply_by_sd', got '" + s + "'");
}

json max_splits_json(int v) { return v == std::numeric_limits<int>::max() ? json(nullptr) : json(v); }
int max_splits_from(const json& j) { return j.is_null() ? std::numeric_limits<int>::max() : j.get<int>(); }

json config_json(const RunConfig& c) {
  json j;
  j["paths"] = {{"manifest", c.paths.manifest.generic_string()},
                {"stations", c.paths.stations.generic_string()},
                {"transactions", c.paths.transactions.generic_string()},
                {"output_dir", c.paths.output_dir.generic_string()}};
  j["buffer"] = {{"radius", c.buffer.radius}, {"n_segments", c.buffer.n_segments}};
  j["pool_merge_distance_m"] = c.pool_merge_distance_m;
  j["labeling"] = {{"z", c.labeling.z},
                   {"period_start", format_rfc3339(c.labeling.period.start)},
                   {"period_end", format_rfc3339(c.labeling.period.end)},
                   {"use_time_basis", basis_name(c.labeling.use_time_basis)},
                   {"indicator", c.indicator}};
  j["preprocess"] = {{"max_missing_fraction", c.preprocess.max_missing_fraction},
                     {"max_zero_fraction", c.preprocess.max_zero_fraction},
                     {"max_abs_correlation", c.preprocess.max_abs_correlation},
                     {"correlation_grouping", grouping_name(c.preprocess.grouping)}};
  j["theta_count"] = c.theta_count;
  j["lambda_grid"] = {{"base_exponent", c.lambda_grid.base_exponent},
                      {"step", c.lambda_grid.step},
                      {"count", c.lambda_grid.count}};
  j["k"] = c.k;
  j["n_splits"] = c.n_splits;
  j["test_fraction"] = c.test_fraction;
  j["bootstrap"] = {{"n_resamples", c.n_resamples},
                    {"scaling", scaling_name(c.scaling)},
                    {"report_frequency", c.report_frequency}};
  j["seed"] = c.seed;
  j["method"] = c.method;
  j["theta"] = c.theta;
  j["alpha"] = c.alpha;
  j["forest_grid"] = json::array();
  for (const auto& f : c.forest_grid) {
    j["forest_grid"].push_back({{"n_trees", f.n_trees},
                                {"min_leaf", f.min_leaf},
                                {"max_splits", max_splits_json(f.max_splits)},
                                {"feature_fraction", f.feature_fraction}});
  }
  j["gbrt_grid"] = json::array();
  for (const auto& g : c.gbrt_grid) {
    j["gbrt_grid"].push_back({{"n_cycles", g.n_cycles},
                              {"learn_rate", g.learn_rate},
                              {"min_leaf", g.min_leaf},
                              {"max_splits", max_splits_json(g.max_splits)},
                              {"stop_threshold", g.stop_threshold}});
  }
  j["threads"] = c.threads;
  return j;
}

// Every key of `given` must exist in `reference`; arrays are not descended.
void check_keys(const json& given, const json& reference, const std::string& prefix) {
  if (!given.is_object()) return;
  for (auto it = given.begin(); it != given.end(); ++it) {
    const std::string key = prefix.empty() ? it.key() : prefix + "." + it.key();
    if (!reference.contains(it.key())) throw InputError("config: unknown key '" + key + "'");
    const auto& ref = reference[it.key()];
    if (ref.is_object()) {
      if (!it.value().is_object()) throw InputError("config: '" + key + "' must be an object");
      check_keys(it.value(), ref, key);
    }
  }
}

void merge(json& base, const json& over) {
  for (auto it = over.begin(); it != over.end(); ++it) {
    if (it.value().is_object() && base[it.key()].is_object()) {
      merge(base[it.key()], it.value());
    } else {
      base[it.key()] = it.value();
    }
  }
}

RunConfig config_from(const json& j) {
  RunConfig c;
  const auto& p = j.at("paths");
  c.paths.manifest = p.at("manifest").get<std::string>();
  c.paths.stations = p.at("stations").get<std::string>();
  c.paths.transactions = p.at("transactions").get<std::string>();
  c.paths.output_dir = p.at("output_dir").get<std::string>();
  c.buffer.radius = j.at("buffer").at("radius").get<double>();
  c.buffer.n_segments = j.at("buffer").at("n_segments").get<int>();
  c.pool_merge_distance_m = j.at("pool_merge_distance_m").get<double>();
  const auto& l = j.at("labeling");
  c.labeling.z = l.at("z").get<double>();
  c.labeling.period.start = parse_rfc3339(l.at("period_start").get<std::string>());
  c.labeling.period.end = parse_rfc3339(l.at("period_end").get<std::string>());
  c.labeling.use_time_basis = parse_basis(l.at("use_time_basis").get<std::string>());
  c.indicator = l.at("indicator").get<std::string>();
  const auto& pp = j.at("preprocess");
  c.preprocess.max_missing_fraction = pp.at("max_missing_fraction").get<double>();
  c.preprocess.max_zero_fraction = pp.at("max_zero_fraction").get<double>();
  c.preprocess.max_abs_correlation = pp.at("max_abs_correlation").get<double>();
  c.preprocess.grouping = parse_grouping(pp.at("correlation_grouping").get<std::string>());
  c.theta_count = j.at("theta_count").get<int>();
  c.lambda_grid.base_exponent = j.at("lambda_grid").at("base_exponent").get<double>();
  c.lambda_grid.step = j.at("lambda_grid").at("step").get<double>();
  c.lambda_grid.count = j.at("lambda_grid").at("count").get<int>();
  c.k = j.at("k").get<int>();
  c.n_splits = j.at("n_splits").get<int>();
  c.test_fraction = j.at("test_fraction").get<double>();
  const auto& b = j.at("bootstrap");
  c.n_resamples = b.at("n_resamples").get<int>();
  c.scaling = parse_scaling(b.at("scaling").get<std::string>());
  c.report_frequency = b.at("report_frequency").get<double>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.method = j.at("method").get<std::string>();
  c.theta = j.at("theta").get<double>();
  c.alpha = j.at("alpha").get<double>();
  c.forest_grid.clear();
  for (const auto& f : j.at("forest_grid")) {
    models::ForestParams fp;
    fp.n_trees = f.value("n_trees", fp.n_trees);
    fp.min_leaf = f.value("min_leaf", fp.min_leaf);
    if (f.contains("max_splits")) fp.max_splits = max_splits_from(f.at("max_splits"));
    fp.feature_fraction = f.value("feature_fraction", fp.feature_fraction);
    c.forest_grid.push_back(fp);
  }
  c.gbrt_grid.clear();
  for (const auto& g : j.at("gbrt_grid")) {
    models::GbrtParams gp;
    gp.n_cycles = g.value("n_cycles", gp.n_cycles);
    gp.learn_rate = g.value("learn_rate", gp.learn_rate);
    gp.min_leaf = g.value("min_leaf", gp.min_leaf);
    if (g.contains("max_splits")) gp.max_splits = max_splits_from(g.at("max_splits"));
    gp.stop_threshold = g.value("stop_threshold", gp.stop_threshold);
    c.gbrt_grid.push_back(gp);
  }
  c.threads = j.at("threads").get<int>();
  return c;
}

void write_json(const fs::path& path, const json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// NaN and infinities become null, which JSON readers accept.
json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json metric_json(const eval::MetricSet& m) {
  json j;
  for (std::size_t k = 0; k < std::size(eval::kMetricNames); ++k) {
    j[eval::kMetricNames[k]] = number(eval::metric_value(m, k));
  }
  return j;
}

void prepare(const RunConfig& c) {
  c.validate();
  set_thread_count(static_cast<std::size_t>(std::max(0, c.threads)));
  fs::create_directories(c.paths.output_dir);
}

struct PoolData {
  std::vector<ingest::PoolRecord> pools;
  std::vector<int> labels;
  geo::Projection projection;
  ingest::FilterReport filter;
  std::size_t unassigned = 0;
  std::size_t n_stations = 0;
  std::vector<std::string> warnings;
};

PoolData load_pools(const RunConfig& c) {
  PoolData d;
  auto stations = ingest::read_stations(c.paths.stations);
  d.n_stations = stations.size();
  d.projection.ref_lat_deg = ingest::reference_latitude(stations);
  ingest::project_stations(stations, d.projection);
  d.pools = ingest::aggregate_pools(stations, c.pool_merge_distance_m);
  const auto raw = ingest::read_transactions(c.paths.transactions);
  const auto filtered = ingest::filter_transactions(raw, c.labeling.period);
  d.filter = filtered.report;
  const auto per_pool = ingest::assign_transactions(d.pools, filtered.kept, &d.unassigned);
  for (std::size_t i = 0; i < d.pools.size(); ++i) {
    d.pools[i].indicators = ingest::compute_indicators(d.pools[i], per_pool[i], c.labeling);
  }
  const auto idx = ingest::IndicatorSet::index_of(c.indicator);
  std::vector<double> values;
  for (const auto& p : d.pools) values.push_back(p.indicators.value(idx));
  auto lab = ingest::label_top(values, c.labeling.z);
  d.labels = std::move(lab.labels);
  d.warnings = std::move(lab.warnings);
  return d;
}

features::LayerSet load_layer_set(const RunConfig& c, const geo::Projection& proj) {
  return features::load_layers(features::Manifest::read(c.paths.manifest), proj);
}

double indicator_r2(const features::FeatureMatrix& m, std::span<const ingest::PoolRecord> pools, std::size_t idx) {
  Eigen::VectorXd y(static_cast<Eigen::Index>(pools.size()));
  for (std::size_t i = 0; i < pools.size(); ++i) y(static_cast<Eigen::Index>(i)) = pools[i].indicators.value(idx);
  return models::ols_r2(m.values, y);
}

fs::path model_path(const RunConfig& c, models::Method m) {
  return c.paths.output_dir / ("model_" + std::string(models::to_string(m)) + ".json");
}

}  // namespace

// RunConfig ------------------------------------------------------------------------

std::vector<double> RunConfig::thetas() const {
  std::vector<double> t;
  for (int i = 0; i < theta_count; ++i) t.push_back(static_cast<double>(i) / theta_count);
  return t;
}

std::vector<models::Method> RunConfig::methods() const {
  if (method == "all") return {std::begin(models::kAllMethods), std::end(models::kAllMethods)};
  return {models::parse_method(method)};
}

models::TrainOptions RunConfig::train_options() const {
  models::TrainOptions o;
  o.k = k;
  o.lambda_grid = lambda_grid;
  o.forest_grid = forest_grid;
  o.gbrt_grid = gbrt_grid;
  return o;
}

void RunConfig::validate() const {
  buffer.validate();
  labeling.validate();
  auto require = [](bool ok, const std::string& what) {
    if (!ok) throw InputError("config: " + what);
  };
  require(pool_merge_distance_m >= 0, "pool_merge_distance_m must be >= 0");
  require(theta_count >= 1, "theta_count must be >= 1");
  require(lambda_grid.count >= 1, "lambda_grid.count must be >= 1");
  require(k >= 2, "k must be >= 2");
  require(n_splits >= 1, "n_splits must be >= 1");
  require(test_fraction > 0 && test_fraction < 1, "test_fraction must be in (0, 1)");
  require(n_resamples >= 1, "bootstrap.n_resamples must be >= 1");
  require(report_frequency >= 0 && report_frequency <= 1, "bootstrap.report_frequency must be in [0, 1]");
  require(theta >= 0 && theta <= 1, "theta must be in [0, 1]");
  require(alpha > 0 && alpha < 1, "alpha must be in (0, 1)");
  require(!forest_grid.empty(), "forest_grid must not be empty");
  require(!gbrt_grid.empty(), "gbrt_grid must not be empty");
  require(threads >= 0, "threads must be >= 0");
  (void)methods();
  (void)ingest::IndicatorSet::index_of(indicator);
}

std::string RunConfig::to_json() const { return config_json(*this).dump(2) + "\n"; }

RunConfig RunConfig::from_json(std::string_view text) {
  json given;
  try {
    given = json::parse(text);
  } catch (const json::exception& e) {
    throw InputError(std::string("config: invalid JSON: ") + e.what());
  }
  if (!given.is_object()) throw InputError("config: top level must be an object");
  json full = config_json(RunConfig{});
  check_keys(given, full, "");
  merge(full, given);
  try {
    return config_from(full);
  } catch (const json::exception& e) {
    throw InputError(std::string("config: ") + e.what());
  }
}

RunConfig RunConfig::load(const fs::path& path) { return from_json(read_file(path)); }

void RunConfig::save(const fs::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path.string());
  out << to_json();
}

void apply_override(RunConfig& config, std::string_view key, std::string_view value) {
  json v;
  try {
    v = json::parse(value);
  } catch (const json::exception&) {
    v = std::string(value);
  }
  json patch = v;
  std::string k(key);
  while (true) {
    const auto dot = k.rfind('.');
    json wrap;
    wrap[dot == std::string::npos ? k : k.substr(dot + 1)] = patch;
    patch = std::move(wrap);
    if (dot == std::string::npos) break;
    k.resize(dot);
  }
  json full = config_json(config);
  check_keys(patch, full, "");
  // A scalar must not replace an object (e.g. "--set buffer=3").
  const json* ref = &full;
  for (std::size_t start = 0;;) {
    const auto dot = key.find('.', start);
    ref = &(*ref)[std::string(key.substr(start, dot - start))];
    if (dot == std::string_view::npos) break;
    start = dot + 1;
  }
  if (ref->is_object()) throw InputError("config: '" + std::string(key) + "' is a section, not a value");
  merge(full, patch);
  try {
    config = config_from(full);
  } catch (const json::exception& e) {
    throw InputError("config: bad value for '" + std::string(key) + "': " + e.what());
  }
}

// Steps --------------------------------------------------------------------------

ExtractSummary run_extract(const RunConfig& c) {
  prepare(c);
  auto data = load_pools(c);
  const auto layers = load_layer_set(c, data.projection);
  const auto raw = features::extract_features(layers, data.pools, c.buffer);
  const auto pre = features::preprocess(raw, c.preprocess);

  ingest::write_pools(c.paths.output_dir / "pools.csv", data.pools, data.labels);
  features::write_features_csv(c.paths.output_dir / "features_raw.csv", raw);
  features::write_features_csv(c.paths.output_dir / "features.csv", pre.matrix);

  json report;
  report["n_stations"] = data.n_stations;
  report["n_pools"] = data.pools.size();
  report["n_positive"] = std::count(data.labels.begin(), data.labels.end(), 1);
  report["transactions"] = {{"input", data.filter.input},
                            {"kept", data.filter.kept},
                            {"outside_period", data.filter.outside_period},
                            {"inconsistent", data.filter.inconsistent},
                            {"unassigned", data.unassigned}};
  report["labeling_warnings"] = data.warnings;
  json layer_reports = json::array();
  for (std::size_t l = 0; l < layers.layers.size(); ++l) {
    json lj;
    lj["name"] = layers.layers[l].name;
    lj["features"] = layers.layers[l].feature_count();
    lj["warnings"] = layers.layers[l].warnings;
    json filled = json::object();
    for (const auto& rep : layers.imputation) {
      if (rep.layer != layers.layers[l].name) continue;
      for (const auto& [label, count] : rep.filled) filled[label] = count;
    }
    lj["imputed_cells"] = filled;
    layer_reports.push_back(lj);
  }
  report["layers"] = layer_reports;
  report["n_raw_predictors"] = raw.cols();
  report["n_predictors"] = pre.matrix.cols();
  json drops = json::array();
  for (const auto& d : pre.report.drops) drops.push_back({{"column", d.column}, {"reason", d.reason}, {"detail", d.detail}});
  report["dropped"] = drops;
  json imps = json::array();
  for (const auto& m : pre.report.imputations) {
    imps.push_back({{"column", m.column}, {"n_missing", m.n_missing}, {"median", number(m.median)}});
  }
  report["median_imputed"] = imps;
  json r2 = json::object();
  for (std::size_t k = 0; k < ingest::IndicatorSet::kNames.size(); ++k) {
    r2[std::string(ingest::IndicatorSet::kNames[k])] = number(indicator_r2(pre.matrix, data.pools, k));
  }
  report["indicator_r2"] = r2;
  report["response"] = c.indicator;
  write_json(c.paths.output_dir / "feature_report.json", report);
  c.save(c.paths.output_dir / "run_config.json");

  ExtractSummary s;
  s.n_pools = data.pools.size();
  s.n_raw_predictors = raw.cols();
  s.n_predictors = pre.matrix.cols();
  s.n_positive = static_cast<std::size_t>(report["n_positive"].get<long long>());
  return s;
}

double run_radius_sweep(const RunConfig& c) {
  prepare(c);
  const auto data = load_pools(c);
  const auto layers = load_layer_set(c, data.projection);
  const auto idx = ingest::IndicatorSet::index_of(c.indicator);
  std::vector<double> r2;
  std::vector<std::size_t> cols;
  for (double radius : geo::kBufferRadii) {
    geo::BufferSpec b = c.buffer;
    b.radius = radius;
    const auto pre = features::preprocess(features::extract_features(layers, data.pools, b), c.preprocess);
    r2.push_back(indicator_r2(pre.matrix, data.pools, idx));
    cols.push_back(pre.matrix.cols());
  }
  const auto best = static_cast<std::size_t>(std::max_element(r2.begin(), r2.end()) - r2.begin());
  std::ofstream out(c.paths.output_dir / "radius_sweep.csv", std::ios::binary);
  if (!out) throw InputError("cannot write radius_sweep.csv");
  csv::Writer w(out);
  w.row({"radius_m", "n_predictors", "r2", "best"});
  for (std::size_t i = 0; i < r2.size(); ++i) {
    w.row({csv::format_double(geo::kBufferRadii[i]), std::to_string(cols[i]), csv::format_double(r2[i]),
           i == best ? "1" : "0"});
  }
  return geo::kBufferRadii[best];
}

Dataset load_dataset(const fs::path& output_dir) {
  const auto m = features::read_features_csv(output_dir / "features.csv");
  const auto pools = ingest::read_pools(output_dir / "pools.csv");
  std::map<std::string, int> label;
  for (std::size_t i = 0; i < pools.pools.size(); ++i) label[pools.pools[i].pool_id] = pools.labels[i];
  Dataset d;
  d.pool_ids = m.row_ids;
  d.names = m.column_names();
  d.X = m.values;
  for (const auto& id : m.row_ids) {
    const auto it = label.find(id);
    if (it == label.end()) throw InputError("features.csv: pool '" + id + "' is missing from pools.csv");
    d.y.push_back(it->second);
  }
  models::validate_finite(d.X);
  return d;
}

void run_train(const RunConfig& c) {
  prepare(c);
  const auto d = load_dataset(c.paths.output_dir);
  for (auto m : c.methods()) {
    const auto clf = models::train_classifier(m, d.X, d.y, d.names, c.train_options(), c.seed);
    models::save_classifier(model_path(c, m), clf);
  }
  c.save(c.paths.output_dir / "run_config.json");
}

std::vector<eval::EnsembleResult> run_evaluate(const RunConfig& c) {
  prepare(c);
  const auto d = load_dataset(c.paths.output_dir);
  eval::EnsembleOptions opts;
  opts.n_splits = c.n_splits;
  opts.test_fraction = c.test_fraction;
  opts.thetas = c.thetas();
  opts.train = c.train_options();
  std::vector<eval::EnsembleResult> results;
  for (auto m : c.methods()) results.push_back(eval::ensemble_experiment(d.X, d.y, m, opts, c.seed));

  const double prevalence =
      static_cast<double>(std::count(d.y.begin(), d.y.end(), 1)) / static_cast<double>(d.y.size());
  // Position of the configured ranking threshold on the grid.
  std::size_t at = 0;
  for (std::size_t t = 1; t < opts.thetas.size(); ++t) {
    if (std::abs(opts.thetas[t] - c.theta) < std::abs(opts.thetas[at] - c.theta)) at = t;
  }

  json report;
  report["n_pools"] = d.y.size();
  report["n_predictors"] = d.names.size();
  report["prevalence"] = prevalence;
  report["n_splits"] = c.n_splits;
  report["test_fraction"] = c.test_fraction;
  report["seed"] = c.seed;
  report["theta"] = opts.thetas[at];
  json methods = json::array();
  for (const auto& r : results) {
    json mj;
    mj["method"] = std::string(models::to_string(r.method));
    const auto aucs = r.aucs();
    mj["auc_mean"] = number(stats::mean(aucs));
    mj["auc_sd"] = number(aucs.size() > 1 ? stats::sample_sd(aucs) : 0.0);
    mj["aucs"] = aucs;
    mj["theta_mcc_max"] = r.theta_mcc_max;
    mj["theta_f_max"] = r.theta_f_max;
    mj["at_theta"] = {{"mean", metric_json(r.mean[at])}, {"sd", metric_json(r.sd[at])}};
    std::size_t im = 0;
    for (std::size_t t = 0; t < r.thetas.size(); ++t) {
      if (r.thetas[t] == r.theta_mcc_max) im = t;
    }
    mj["at_theta_mcc_max"] = {{"mean", metric_json(r.mean[im])}, {"sd", metric_json(r.sd[im])}};
    json curves = json::array();
    for (std::size_t t = 0; t < r.thetas.size(); ++t) {
      curves.push_back({{"theta", r.thetas[t]}, {"mean", metric_json(r.mean[t])}, {"sd", metric_json(r.sd[t])}});
    }
    mj["curves"] = curves;
    std::vector<double> selected;
    for (const auto& s : r.splits) selected.push_back(s.selected);
    mj["selected"] = selected;
    methods.push_back(mj);
  }
  report["methods"] = methods;

  json null_model = json::array();
  for (double t : opts.thetas) {
    const auto e = eval::null_expectations(t, prevalence);
    null_model.push_back({{"theta", t}, {"expected", metric_json(e.expected)}, {"legacy_labels", metric_json(e.legacy_labels)}});
  }
  report["null_model"] = null_model;

  json comparisons = json::array();
  for (std::size_t a = 0; a < results.size(); ++a) {
    for (std::size_t b = a + 1; b < results.size(); ++b) {
      json cj;
      cj["a"] = std::string(models::to_string(results[a].method));
      cj["b"] = std::string(models::to_string(results[b].method));
      try {
        const auto cmp = eval::compare_auc(results[a].aucs(), results[b].aucs(), c.alpha);
        cj["var_a"] = number(cmp.var_a);
        cj["var_b"] = number(cmp.var_b);
        cj["f_statistic"] = number(cmp.f_statistic);
        cj["f_p_value"] = number(cmp.f_p_value);
        cj["equal_variances"] = cmp.equal_variances;
        cj["mean_test"] = cmp.mean_test;
        cj["t_statistic"] = number(cmp.t_statistic);
        cj["df"] = number(cmp.df);
        cj["t_p_value"] = number(cmp.t_p_value);
      } catch (const Error& e) {
        cj["error"] = e.what();
      }
      comparisons.push_back(cj);
    }
  }
  report["comparisons"] = comparisons;
  write_json(c.paths.output_dir / "eval_report.json", report);
  eval::write_roc_points_csv(c.paths.output_dir / "roc_points.csv", results);
  c.save(c.paths.output_dir / "run_config.json");
  return results;
}

void run_rank(const RunConfig& c) {
  prepare(c);
  const auto method = c.method == "all" ? models::Method::kLrL1 : models::parse_method(c.method);
  const auto clf = models::load_classifier(model_path(c, method));
  const auto d = load_dataset(c.paths.output_dir);
  Eigen::MatrixXd X(d.X.rows(), static_cast<Eigen::Index>(clf.feature_names.size()));
  for (std::size_t j = 0; j < clf.feature_names.size(); ++j) {
    const auto it = std::find(d.names.begin(), d.names.end(), clf.feature_names[j]);
    if (it == d.names.end()) throw InputError("features.csv lacks model predictor '" + clf.feature_names[j] + "'");
    X.col(static_cast<Eigen::Index>(j)) = d.X.col(it - d.names.begin());
  }
  const Eigen::VectorXd p = clf.predict_proba(X);
  std::vector<std::size_t> order(d.pool_ids.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return p(static_cast<Eigen::Index>(a)) > p(static_cast<Eigen::Index>(b));
  });
  std::ofstream out(c.paths.output_dir / "ranking.csv", std::ios::binary);
  if (!out) throw InputError("cannot write ranking.csv");
  csv::Writer w(out);
  w.row({"rank", "pool_id", "probability", "predicted_class", "label"});
  for (std::size_t r = 0; r < order.size(); ++r) {
    const auto i = order[r];
    const double pi = p(static_cast<Eigen::Index>(i));
    w.row({std::to_string(r + 1), d.pool_ids[i], csv::format_double(pi), std::to_string(models::classify(pi, c.theta)),
           std::to_string(d.y[i])});
  }
}

eval::BootstrapResult run_bootstrap(const RunConfig& c) {
  prepare(c);
  const auto d = load_dataset(c.paths.output_dir);
  eval::BootstrapOptions o;
  o.n_resamples = c.n_resamples;
  o.k = c.k;
  o.lambda_grid = c.lambda_grid;
  o.scaling = c.scaling;
  o.report_frequency = c.report_frequency;
  auto r = eval::bootstrap_coefficients(d.X, d.y, d.names, o, c.seed);
  eval::write_coefficients_csv(c.paths.output_dir / "coefficients.csv", r);
  c.save(c.paths.output_dir / "run_config.json");
  return r;
}

synth::Scenario run_synth(const synth::ScenarioSpec& spec, const fs::path& dir) {
  auto sc = synth::generate_scenario(spec, dir);
  RunConfig c;
  c.paths.manifest = dir / "attributes.json";
  c.paths.stations = dir / "stations.csv";
  c.paths.transactions = dir / "transactions.csv";
  c.paths.output_dir = dir / "out";
  c.labeling.z = spec.z;
  c.labeling.period = ingest::Period::calendar_year(spec.year);
  c.buffer.radius = spec.buffer_radius_m;
  c.seed = spec.seed;
  c.save(dir / "config.json");
  return sc;
}

}  // namespace poolrank::pipeline
