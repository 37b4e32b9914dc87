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

#include "poolrank/trees.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>

#include "poolrank/error.hpp"
#include "poolrank/eval.hpp"
#include "poolrank/models.hpp"
#include "poolrank/parallel.hpp"

namespace poolrank::models {

int RegressionTree::leaf_index(const double* x, std::size_t p) const {
  if (nodes.empty()) throw Error("empty regression tree");
  int k = 0;
  while (nodes[static_cast<std::size_t>(k)].feature >= 0) {
    const auto& nd = nodes[static_cast<std::size_t>(k)];
    if (static_cast<std::size_t>(nd.feature) >= p) throw InputError("tree split refers to a missing predictor");
    k = x[nd.feature] <= nd.threshold ? nd.left : nd.right;
  }
  return k;
}

double RegressionTree::predict(const double* x, std::size_t p) const {
  return nodes[static_cast<std::size_t>(leaf_index(x, p))].value;
}

std::size_t RegressionTree::n_leaves() const {
  return static_cast<std::size_t>(std::count_if(nodes.begin(), nodes.end(), [](const TreeNode& n) { return n.feature < 0; }));
}

namespace {

struct SplitChoice {
  int feature = -1;
  double threshold = 0.0;
  double gain = 0.0;
};

SplitChoice best_split(const Eigen::MatrixXd& X, std::span<const double> y, const std::vector<std::size_t>& rows,
                       std::span<const int> features, int min_leaf) {
  const std::size_t n = rows.size();
  double sum = 0.0;
  for (auto r : rows) sum += y[r];
  const double mean = sum / static_cast<double>(n);
  double sse = 0.0;
  for (auto r : rows) sse += (y[r] - mean) * (y[r] - mean);
  SplitChoice best;
  if (!(sse > 0)) return best;
  // Gains within this tolerance are treated as ties so rounding differences
  // between equivalent formulas cannot reorder candidates.
  const double eps = 1e-10 * sse;
  const double base = sum * sum / static_cast<double>(n);

  std::vector<std::pair<double, double>> xy(n);
  for (int f : features) {
    for (std::size_t i = 0; i < n; ++i) xy[i] = {X(static_cast<Eigen::Index>(rows[i]), f), y[rows[i]]};
    std::stable_sort(xy.begin(), xy.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    double left = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
      left += xy[i].second;
      const std::size_t nl = i + 1, nr = n - nl;
      if (xy[i].first == xy[i + 1].first) continue;
      if (nl < static_cast<std::size_t>(min_leaf) || nr < static_cast<std::size_t>(min_leaf)) continue;
      const double right = sum - left;
      const double gain = left * left / static_cast<double>(nl) + right * right / static_cast<double>(nr) - base;
      if (gain > best.gain + eps) {
        double thr = 0.5 * (xy[i].first + xy[i + 1].first);
        if (!(thr < xy[i + 1].first)) thr = xy[i].first;
        best = {f, thr, gain};
      }
    }
  }
  return best;
}

}  // namespace

RegressionTree fit_tree(const Eigen::MatrixXd& X, std::span<const double> y, std::span<const std::size_t> rows,
                        const TreeParams& params, Rng* rng) {
  if (rows.empty()) throw InputError("cannot fit a tree on zero rows");
  if (params.min_leaf < 1) throw InputError("min_leaf must be >= 1");
  if (params.max_splits < 0) throw InputError("max_splits must be >= 0");
  const int p = static_cast<int>(X.cols());
  const int n_try = params.features_per_split <= 0 ? p : std::min(params.features_per_split, p);
  if (n_try < p && rng == nullptr) throw InputError("feature subsampling needs a random stream");

  RegressionTree tree;
  std::vector<std::vector<std::size_t>> members;
  auto make_node = [&](std::vector<std::size_t> m) {
    TreeNode nd;
    double s = 0.0;
    for (auto r : m) s += y[r];
    nd.n = static_cast<int>(m.size());
    nd.value = s / static_cast<double>(m.size());
    tree.nodes.push_back(nd);
    members.push_back(std::move(m));
    return static_cast<int>(tree.nodes.size() - 1);
  };
  make_node(std::vector<std::size_t>(rows.begin(), rows.end()));

  std::vector<int> all(static_cast<std::size_t>(p));
  std::iota(all.begin(), all.end(), 0);
  std::vector<int> features;
  std::deque<int> queue{0};
  int splits = 0;
  while (!queue.empty() && splits < params.max_splits) {
    const int k = queue.front();
    queue.pop_front();
    const auto uk = static_cast<std::size_t>(k);
    if (members[uk].size() < 2 * static_cast<std::size_t>(params.min_leaf)) continue;
    if (n_try < p) {
      // Partial Fisher-Yates draw, then ascending order for tie-breaking.
      std::vector<int> pool = all;
      for (int i = 0; i < n_try; ++i) {
        const auto j = static_cast<std::size_t>(i) + uniform_index(*rng, static_cast<std::size_t>(p - i));
        std::swap(pool[static_cast<std::size_t>(i)], pool[j]);
      }
      features.assign(pool.begin(), pool.begin() + n_try);
      std::sort(features.begin(), features.end());
    } else {
      features = all;
    }
    const SplitChoice s = best_split(X, y, members[uk], features, params.min_leaf);
    if (s.feature < 0) continue;
    std::vector<std::size_t> l, r;
    for (auto row : members[uk]) (X(static_cast<Eigen::Index>(row), s.feature) <= s.threshold ? l : r).push_back(row);
    members[uk].clear();
    members[uk].shrink_to_fit();
    const int li = make_node(std::move(l));
    const int ri = make_node(std::move(r));
    auto& nd = tree.nodes[uk];
    nd.feature = s.feature;
    nd.threshold = s.threshold;
    nd.left = li;
    nd.right = ri;
    queue.push_back(li);
    queue.push_back(ri);
    ++splits;
  }
  return tree;
}

// ---------------------------------------------------------------------------

Eigen::VectorXd ForestModel::predict(const Eigen::MatrixXd& X) const {
  if (static_cast<std::size_t>(X.cols()) != n_features) {
    throw InputError("forest expects " + std::to_string(n_features) + " predictors, got " + std::to_string(X.cols()));
  }
  const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> Xr = X;
  Eigen::VectorXd out = Eigen::VectorXd::Zero(X.rows());
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    double s = 0.0;
    for (const auto& t : trees) s += t.predict(Xr.row(i).data(), n_features);
    out(i) = s / static_cast<double>(trees.size());
  }
  return out;
}

std::vector<double> ForestModel::training_weights(const double* x, std::size_t p) const {
  std::vector<double> w(n_train, 0.0);
  const double m = static_cast<double>(trees.size());
  for (std::size_t t = 0; t < trees.size(); ++t) {
    const int leaf = trees[t].leaf_index(x, p);
    const double size = trees[t].nodes[static_cast<std::size_t>(leaf)].n;
    for (std::size_t k = 0; k < bootstrap[t].size(); ++k) {
      if (member_leaf[t][k] == leaf) w[bootstrap[t][k]] += 1.0 / (size * m);
    }
  }
  return w;
}

ForestModel fit_forest(const Eigen::MatrixXd& X, std::span<const double> y, const ForestParams& params,
                       std::uint64_t seed) {
  const std::size_t n = static_cast<std::size_t>(X.rows());
  if (y.size() != n) throw InputError("fit_forest: X and y row counts differ");
  if (params.n_trees < 1) throw InputError("forest needs at least one tree");
  if (params.min_leaf < 1) throw InputError("min_leaf must be >= 1");
  if (n < 2 * static_cast<std::size_t>(params.min_leaf)) {
    throw InputError("forest needs at least 2*min_leaf training rows");
  }
  if (!(params.feature_fraction > 0 && params.feature_fraction <= 1)) {
    throw InputError("feature fraction must be in (0, 1]");
  }
  models::validate_finite(X);
  ForestModel m;
  m.params = params;
  m.n_features = static_cast<std::size_t>(X.cols());
  m.n_train = n;
  const auto T = static_cast<std::size_t>(params.n_trees);
  m.trees.resize(T);
  m.bootstrap.resize(T);
  m.member_leaf.resize(T);
  const int p = static_cast<int>(X.cols());
  TreeParams tp;
  tp.min_leaf = params.min_leaf;
  tp.max_splits = params.max_splits;
  tp.features_per_split = std::clamp(static_cast<int>(std::ceil(p * params.feature_fraction - 1e-12)), 1, std::max(p, 1));
  parallel_for(T, [&](std::size_t t) {
    Rng rng = make_rng(seed, Stream::kForest, t);
    auto& boot = m.bootstrap[t];
    boot.resize(n);
    for (auto& r : boot) r = uniform_index(rng, n);
    std::sort(boot.begin(), boot.end());
    m.trees[t] = fit_tree(X, y, boot, tp, &rng);
    auto& leaves = m.member_leaf[t];
    leaves.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
      const Eigen::VectorXd row = X.row(static_cast<Eigen::Index>(boot[k]));
      leaves[k] = m.trees[t].leaf_index(row.data(), m.n_features);
    }
  });
  return m;
}

// ---------------------------------------------------------------------------

Eigen::VectorXd GbrtModel::decision(const Eigen::MatrixXd& X) const {
  if (static_cast<std::size_t>(X.cols()) != n_features) {
    throw InputError("boosted model expects " + std::to_string(n_features) + " predictors, got " +
                     std::to_string(X.cols()));
  }
  const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> Xr = X;
  Eigen::VectorXd out(X.rows());
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    double f = f0;
    for (const auto& t : trees) f += params.learn_rate * t.predict(Xr.row(i).data(), n_features);
    out(i) = f;
  }
  return out;
}

Eigen::VectorXd GbrtModel::predict(const Eigen::MatrixXd& X) const {
  return decision(X).cwiseMax(0.0).cwiseMin(1.0);
}

GbrtModel fit_gbrt(const Eigen::MatrixXd& X, std::span<const double> y, const GbrtParams& params) {
  const std::size_t n = static_cast<std::size_t>(X.rows());
  if (y.size() != n || n == 0) throw InputError("fit_gbrt: X and y row counts differ or are zero");
  if (!(params.learn_rate > 0 && params.learn_rate <= 1)) throw InputError("learn rate must be in (0, 1]");
  if (params.n_cycles < 0) throw InputError("number of learning cycles must be >= 0");
  models::validate_finite(X);
  GbrtModel m;
  m.params = params;
  m.n_features = static_cast<std::size_t>(X.cols());
  m.f0 = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);
  std::vector<double> F(n, m.f0), resid(n), Fnew(n);
  auto mse = [&](const std::vector<double>& f) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += (y[i] - f[i]) * (y[i] - f[i]);
    return s / static_cast<double>(n);
  };
  m.train_mse.push_back(mse(F));
  std::vector<std::size_t> rows(n);
  std::iota(rows.begin(), rows.end(), 0);
  const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> Xr = X;
  TreeParams tp;
  tp.min_leaf = params.min_leaf;
  tp.max_splits = params.max_splits;
  for (int cycle = 0; cycle < params.n_cycles; ++cycle) {
    for (std::size_t i = 0; i < n; ++i) resid[i] = y[i] - F[i];
    RegressionTree tree = fit_tree(X, resid, rows, tp);
    for (std::size_t i = 0; i < n; ++i) {
      Fnew[i] = F[i] + params.learn_rate * tree.predict(Xr.row(static_cast<Eigen::Index>(i)).data(), m.n_features);
    }
    const double e = mse(Fnew);
    if (m.train_mse.back() - e < params.stop_threshold) break;
    F.swap(Fnew);
    m.trees.push_back(std::move(tree));
    m.train_mse.push_back(e);
  }
  return m;
}

// ---------------------------------------------------------------------------

namespace {

template <class Params, class FitScore>
TuneResult tune(const Eigen::MatrixXd& X, std::span<const int> y, std::span<const Params> grid, int k,
                std::uint64_t seed, FitScore fit_score) {
  if (grid.empty()) throw InputError("hyperparameter grid is empty");
  validate_binary(y, static_cast<std::size_t>(X.rows()));
  Rng rng = make_rng(seed, Stream::kFolds);
  const auto fold = stratified_folds(y, k, rng);
  const std::size_t G = grid.size(), K = static_cast<std::size_t>(k);
  std::vector<double> auc(G * K);
  parallel_for(G * K, [&](std::size_t task) {
    const std::size_t g = task / K, f = task % K;
    std::vector<std::size_t> tr, te;
    for (std::size_t i = 0; i < y.size(); ++i) (fold[i] == static_cast<int>(f) ? te : tr).push_back(i);
    const auto Xtr = take_rows(X, tr), Xte = take_rows(X, te);
    const auto ytr = take(y, tr), yte = take(y, te);
    std::vector<double> ytr_d(ytr.begin(), ytr.end());
    const Eigen::VectorXd s = fit_score(Xtr, ytr_d, Xte, grid[g], derive_seed(seed, Stream::kTuning, f));
    auc[task] = eval::auc(yte, std::span<const double>(s.data(), static_cast<std::size_t>(s.size())));
  });
  TuneResult res;
  res.mean_auc.assign(G, 0.0);
  for (std::size_t g = 0; g < G; ++g) {
    for (std::size_t f = 0; f < K; ++f) res.mean_auc[g] += auc[g * K + f];
    res.mean_auc[g] /= static_cast<double>(K);
    if (res.mean_auc[g] > res.mean_auc[res.best_index]) res.best_index = g;
  }
  return res;
}

}  // namespace

TuneResult tune_forest(const Eigen::MatrixXd& X, std::span<const int> y, std::span<const ForestParams> grid, int k,
                       std::uint64_t seed) {
  return tune(X, y, grid, k, seed,
              [](const Eigen::MatrixXd& Xtr, const std::vector<double>& ytr, const Eigen::MatrixXd& Xte,
                 const ForestParams& p, std::uint64_t s) { return fit_forest(Xtr, ytr, p, s).predict(Xte); });
}

TuneResult tune_gbrt(const Eigen::MatrixXd& X, std::span<const int> y, std::span<const GbrtParams> grid, int k,
                     std::uint64_t seed) {
  return tune(X, y, grid, k, seed,
              [](const Eigen::MatrixXd& Xtr, const std::vector<double>& ytr, const Eigen::MatrixXd& Xte,
                 const GbrtParams& p, std::uint64_t) { return fit_gbrt(Xtr, ytr, p).predict(Xte); });
}

std::vector<ForestParams> default_forest_grid() {
  std::vector<ForestParams> grid;
  for (int leaf : {1, 5, 10}) {
    ForestParams p;
    p.min_leaf = leaf;
    grid.push_back(p);
  }
  return grid;
}

std::vector<GbrtParams> default_gbrt_grid() {
  std::vector<GbrtParams> grid;
  for (double nu : {0.05, 0.1}) {
    for (int splits : {4, 16}) {
      GbrtParams p;
      p.learn_rate = nu;
      p.max_splits = splits;
      grid.push_back(p);
    }
  }
  return grid;
}

}  // namespace poolrank::models
