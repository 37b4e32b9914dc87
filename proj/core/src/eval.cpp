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

#include "poolrank/eval.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>

#include "poolrank/csv.hpp"
#include "poolrank/error.hpp"
#include "poolrank/parallel.hpp"
#include "poolrank/stats.hpp"

namespace poolrank::eval {

namespace {

void check_inputs(std::span<const int> y, std::span<const double> scores) {
  if (y.size() != scores.size()) {
    throw InputError("labels (" + std::to_string(y.size()) + ") and scores (" + std::to_string(scores.size()) +
                     ") differ in length");
  }
  for (int v : y) {
    if (v != 0 && v != 1) throw InputError("labels must be binary (0/1)");
  }
}

double ratio(double num, double den) { return den > 0 ? num / den : 0.0; }

}  // namespace

ConfusionMatrix confusion(std::span<const int> y, std::span<const double> scores, double theta) {
  check_inputs(y, scores);
  ConfusionMatrix c;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const int pred = models::classify(scores[i], theta);
    if (pred == 1) {
      (y[i] == 1 ? c.tp : c.fp)++;
    } else {
      (y[i] == 1 ? c.fn : c.tn)++;
    }
  }
  return c;
}

double metric_value(const MetricSet& m, std::size_t i) {
  switch (i) {
    case 0: return m.accuracy;
    case 1: return m.precision;
    case 2: return m.sensitivity;
    case 3: return m.fall_out;
    case 4: return m.f_score;
    case 5: return m.mcc;
  }
  throw InputError("metric index out of range");
}

namespace {
double& metric_ref(MetricSet& m, std::size_t i) {
  switch (i) {
    case 0: return m.accuracy;
    case 1: return m.precision;
    case 2: return m.sensitivity;
    case 3: return m.fall_out;
    case 4: return m.f_score;
    default: return m.mcc;
  }
}
}  // namespace

MetricSet metrics(const ConfusionMatrix& c) {
  const double tp = static_cast<double>(c.tp), fp = static_cast<double>(c.fp);
  const double tn = static_cast<double>(c.tn), fn = static_cast<double>(c.fn);
  MetricSet m;
  m.accuracy = ratio(tp + tn, tp + fp + tn + fn);
  m.precision = ratio(tp, tp + fp);
  m.sensitivity = ratio(tp, tp + fn);
  m.fall_out = ratio(fp, fp + tn);
  m.f_score = ratio(2.0 * m.sensitivity * m.precision, m.sensitivity + m.precision);
  const double prod = (tp + fp) * (tp + fn) * (tn + fp) * (tn + fn);
  m.mcc = prod > 0 ? (tp * tn - fp * fn) / std::sqrt(prod) : 0.0;
  return m;
}

std::vector<double> theta_grid() {
  std::vector<double> g(100);
  for (int i = 0; i < 100; ++i) g[static_cast<std::size_t>(i)] = i / 100.0;
  return g;
}

RocResult roc_auc(std::span<const int> y, std::span<const double> scores) {
  check_inputs(y, scores);
  const auto P = static_cast<std::size_t>(std::count(y.begin(), y.end(), 1));
  const std::size_t N = y.size() - P;
  if (P == 0 || N == 0) throw DegenerateError("ROC/AUC needs both classes");
  std::vector<std::size_t> order(y.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  RocResult r;
  r.points.push_back({0.0, 0.0});
  // Twice the area in count units stays an exact integer.
  std::uint64_t tp = 0, fp = 0, area2 = 0;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    std::uint64_t dtp = 0, dfp = 0;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) {
      (y[order[j]] == 1 ? dtp : dfp)++;
      ++j;
    }
    area2 += dfp * (2 * tp + dtp);
    tp += dtp;
    fp += dfp;
    r.points.push_back({static_cast<double>(fp) / static_cast<double>(N), static_cast<double>(tp) / static_cast<double>(P)});
    i = j;
  }
  r.auc = static_cast<double>(area2) / (2.0 * static_cast<double>(P) * static_cast<double>(N));
  return r;
}

double auc(std::span<const int> y, std::span<const double> scores) { return roc_auc(y, scores).auc; }

NullExpectation null_expectations(double theta, double prevalence) {
  if (!(theta >= 0 && theta < 1)) throw InputError("theta must be in [0, 1)");
  if (!(prevalence > 0 && prevalence < 1)) throw InputError("prevalence must be in (0, 1)");
  NullExpectation e;
  auto& m = e.expected;
  m.accuracy = prevalence + (1.0 - 2.0 * prevalence) * theta;
  m.precision = prevalence;
  m.sensitivity = 1.0 - theta;
  m.fall_out = 1.0 - theta;
  m.f_score = 2.0 * prevalence * (1.0 - theta) / (prevalence + 1.0 - theta);
  m.mcc = 0.0;
  e.legacy_labels = m;
  std::swap(e.legacy_labels.precision, e.legacy_labels.sensitivity);
  return e;
}

void select_thresholds(SweepResult& s) {
  std::size_t bm = 0, bf = 0;
  for (std::size_t i = 1; i < s.curves.size(); ++i) {
    if (s.curves[i].mcc > s.curves[bm].mcc) bm = i;
    if (s.curves[i].f_score > s.curves[bf].f_score) bf = i;
  }
  s.theta_mcc_max = s.thetas.at(bm);
  s.theta_f_max = s.thetas.at(bf);
}

SweepResult sweep_and_select(std::span<const int> y, std::span<const double> scores,
                             std::span<const double> thetas) {
  SweepResult s;
  s.thetas = thetas.empty() ? theta_grid() : std::vector<double>(thetas.begin(), thetas.end());
  for (double t : s.thetas) s.curves.push_back(metrics(confusion(y, scores, t)));
  select_thresholds(s);
  return s;
}

std::vector<double> EnsembleResult::aucs() const {
  std::vector<double> a;
  for (const auto& s : splits) a.push_back(s.auc);
  return a;
}

double EnsembleResult::mean_auc() const {
  const auto a = aucs();
  return stats::mean(a);
}

double EnsembleResult::mean_oracle_auc() const {
  std::vector<double> a;
  for (const auto& s : splits) a.push_back(s.oracle_auc);
  return stats::mean(a);
}

EnsembleResult ensemble_experiment(const Eigen::MatrixXd& X, std::span<const int> y, models::Method method,
                                   const EnsembleOptions& options, std::uint64_t seed,
                                   std::span<const double> oracle_scores) {
  models::validate_binary(y, static_cast<std::size_t>(X.rows()));
  if (options.n_splits < 1) throw InputError("need at least one split");
  if (!oracle_scores.empty() && oracle_scores.size() != y.size()) {
    throw InputError("oracle scores must have one entry per row");
  }
  EnsembleResult res;
  res.method = method;
  res.thetas = options.thetas.empty() ? theta_grid() : options.thetas;
  const auto S = static_cast<std::size_t>(options.n_splits);
  res.splits.resize(S);
  std::vector<std::string> names(static_cast<std::size_t>(X.cols()));
  for (std::size_t j = 0; j < names.size(); ++j) names[j] = "x" + std::to_string(j);

  parallel_for(S, [&](std::size_t s) {
    Rng rng = make_rng(seed, Stream::kSplit, s);
    const auto split = models::stratified_split(y, options.test_fraction, rng);
    const auto Xtr = models::take_rows(X, split.train);
    const auto ytr = models::take(y, split.train);
    const auto Xte = models::take_rows(X, split.test);
    const auto yte = models::take(y, split.test);
    const auto clf = models::train_classifier(method, Xtr, ytr, names, options.train,
                                              derive_seed(seed, Stream::kSplit, s));
    const Eigen::VectorXd score = clf.predict_proba(Xte);
    const std::span<const double> sc(score.data(), static_cast<std::size_t>(score.size()));
    auto& out = res.splits[s];
    const auto roc = roc_auc(yte, sc);
    out.auc = roc.auc;
    out.roc = roc.points;
    out.curves = sweep_and_select(yte, sc, res.thetas).curves;
    out.n_test = yte.size();
    out.n_test_pos = static_cast<std::size_t>(std::count(yte.begin(), yte.end(), 1));
    if (const auto* lr = std::get_if<models::LrModel>(&clf.model)) {
      out.selected = lr->lambda;
    } else {
      out.selected = static_cast<double>(clf.selected_index);
    }
    if (!oracle_scores.empty()) {
      std::vector<double> o;
      for (auto i : split.test) o.push_back(oracle_scores[i]);
      out.oracle_auc = auc(yte, o);
    } else {
      out.oracle_auc = std::numeric_limits<double>::quiet_NaN();
    }
  });

  const std::size_t T = res.thetas.size();
  res.mean.assign(T, {});
  res.sd.assign(T, {});
  std::vector<double> column(S);
  for (std::size_t t = 0; t < T; ++t) {
    for (std::size_t k = 0; k < std::size(kMetricNames); ++k) {
      for (std::size_t s = 0; s < S; ++s) column[s] = metric_value(res.splits[s].curves[t], k);
      metric_ref(res.mean[t], k) = stats::mean(column);
      metric_ref(res.sd[t], k) = stats::sample_sd(column);
    }
  }
  SweepResult sweep{res.thetas, res.mean, 0.0, 0.0};
  select_thresholds(sweep);
  res.theta_mcc_max = sweep.theta_mcc_max;
  res.theta_f_max = sweep.theta_f_max;
  return res;
}

AucComparison compare_auc(std::span<const double> a, std::span<const double> b, double alpha) {
  if (a.size() != b.size() || a.size() < 2) throw InputError("AUC ensembles must have equal size >= 2");
  AucComparison r;
  const double n = static_cast<double>(a.size());
  // Constant ensembles get exactly zero; the two-pass formula leaves
  // rounding residue when the mean is not representable.
  auto variance = [](std::span<const double> v) {
    const bool constant = std::all_of(v.begin(), v.end(), [&](double x) { return x == v.front(); });
    return constant ? 0.0 : stats::sample_variance(v);
  };
  r.var_a = variance(a);
  r.var_b = variance(b);
  if (r.var_a == 0 && r.var_b == 0) throw DegenerateError("both AUC ensembles have zero variance");
  const double d = n - 1.0;
  // Two-sided F-test, each tail from the incomplete beta directly.
  if (r.var_b == 0 || r.var_a == 0) {
    r.f_statistic = r.var_b == 0 ? std::numeric_limits<double>::infinity() : 0.0;
    r.f_p_value = 0.0;
  } else {
    r.f_statistic = r.var_a / r.var_b;
    const double x = d * r.f_statistic / (d * r.f_statistic + d);
    const double lower = stats::incomplete_beta(d / 2, d / 2, x);
    const double upper = stats::incomplete_beta(d / 2, d / 2, 1.0 - x);
    r.f_p_value = std::min(1.0, 2.0 * std::min(lower, upper));
  }
  r.equal_variances = !(r.f_p_value < alpha);

  const double ma = stats::mean(a), mb = stats::mean(b);
  double se2;
  if (r.equal_variances) {
    r.mean_test = "pooled";
    const double sp2 = (d * r.var_a + d * r.var_b) / (2.0 * d);
    se2 = sp2 * (2.0 / n);
    r.df = 2.0 * d;
  } else {
    r.mean_test = "welch";
    const double qa = r.var_a / n, qb = r.var_b / n;
    se2 = qa + qb;
    r.df = se2 * se2 / (qa * qa / d + qb * qb / d);
  }
  r.t_statistic = (ma - mb) / std::sqrt(se2);
  const double t2 = r.t_statistic * r.t_statistic;
  r.t_p_value = std::min(1.0, stats::incomplete_beta(r.df / 2, 0.5, r.df / (r.df + t2)));
  return r;
}

BootstrapResult bootstrap_coefficients(const Eigen::MatrixXd& X, std::span<const int> y,
                                       std::span<const std::string> names, const BootstrapOptions& options,
                                       std::uint64_t seed) {
  models::validate_binary(y, static_cast<std::size_t>(X.rows()));
  models::validate_finite(X);
  if (names.size() != static_cast<std::size_t>(X.cols())) throw InputError("one name per predictor required");
  if (options.n_resamples < 1) throw InputError("need at least one bootstrap resample");
  const auto B = static_cast<std::size_t>(options.n_resamples);
  const Eigen::Index p = X.cols();
  BootstrapResult res;
  res.standardized.resize(static_cast<Eigen::Index>(B), p);
  res.lambdas.resize(B);

  // Sample standard deviations of the predictors on the full data.
  Eigen::VectorXd sd(p);
  for (Eigen::Index j = 0; j < p; ++j) {
    const auto c = X.col(j);
    sd(j) = X.rows() > 1 ? std::sqrt((c.array() - c.mean()).square().sum() / static_cast<double>(X.rows() - 1)) : 0.0;
  }

  parallel_for(B, [&](std::size_t b) {
    Rng rng = make_rng(seed, Stream::kBootstrap, b);
    const auto rows = models::stratified_bootstrap(y, rng);
    const auto Xb = models::take_rows(X, rows);
    const auto yb = models::take(y, rows);
    const auto cv = models::cv_lambda(Xb, yb, options.k, derive_seed(seed, Stream::kBootstrap, b),
                                      options.lambda_grid, options.lr);
    const auto m = models::fit_lr_l1(Xb, yb, cv.lambda, options.lr);
    res.lambdas[b] = cv.lambda;
    for (Eigen::Index j = 0; j < p; ++j) {
      double v = 0.0;
      if (m.beta(j) != 0.0 && sd(j) > 0) {
        v = options.scaling == CoefficientScaling::kDivideBySd ? m.beta(j) / sd(j) : m.beta(j) * sd(j);
      }
      res.standardized(static_cast<Eigen::Index>(b), j) = v;
    }
  });

  for (Eigen::Index j = 0; j < p; ++j) {
    std::vector<double> v(B);
    std::size_t nonzero = 0;
    for (std::size_t b = 0; b < B; ++b) {
      v[b] = res.standardized(static_cast<Eigen::Index>(b), j);
      if (v[b] != 0.0) ++nonzero;
    }
    CoefficientSummary s;
    s.predictor = names[static_cast<std::size_t>(j)];
    s.median = stats::quantile(v, 0.5);
    s.q1 = stats::quantile(v, 0.25);
    s.q3 = stats::quantile(v, 0.75);
    s.selection_frequency = static_cast<double>(nonzero) / static_cast<double>(B);
    s.zero_fraction = 1.0 - s.selection_frequency;
    s.reported = s.selection_frequency >= options.report_frequency;
    res.coefficients.push_back(std::move(s));
  }
  return res;
}

void write_roc_points_csv(const std::filesystem::path& path, std::span<const EnsembleResult> results) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path.string());
  csv::Writer w(out);
  w.row({"method", "split", "fpr", "tpr"});
  for (const auto& r : results) {
    for (std::size_t s = 0; s < r.splits.size(); ++s) {
      for (const auto& pt : r.splits[s].roc) {
        w.row({std::string(models::to_string(r.method)), std::to_string(s), csv::format_double(pt.fpr),
               csv::format_double(pt.tpr)});
      }
    }
  }
}

void write_coefficients_csv(const std::filesystem::path& path, const BootstrapResult& r) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path.string());
  csv::Writer w(out);
  w.row({"predictor", "median", "q1", "q3", "selection_frequency", "zero_fraction", "reported"});
  for (const auto& c : r.coefficients) {
    w.row({c.predictor, csv::format_double(c.median), csv::format_double(c.q1), csv::format_double(c.q3),
           csv::format_double(c.selection_frequency), csv::format_double(c.zero_fraction),
           c.reported ? "1" : "0"});
  }
}

}  // namespace poolrank::eval
