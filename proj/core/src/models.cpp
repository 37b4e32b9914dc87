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

#include "poolrank/models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <Eigen/Cholesky>

#include "poolrank/error.hpp"
#include "poolrank/eval.hpp"
#include "poolrank/parallel.hpp"

namespace poolrank::models {

void validate_binary(std::span<const int> y, std::size_t n_rows) {
  if (y.size() != n_rows) {
    throw InputError("response has " + std::to_string(y.size()) + " entries but X has " +
                     std::to_string(n_rows) + " rows");
  }
  for (int v : y) {
    if (v != 0 && v != 1) throw InputError("response must be binary (0/1)");
  }
}

void validate_finite(const Eigen::MatrixXd& X) {
  if (!X.allFinite()) throw InputError("predictor matrix contains NaN or infinite values");
}

double ols_r2(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
  const Eigen::Index n = X.rows(), p = X.cols();
  if (y.size() != n) throw InputError("ols_r2: X and y row counts differ");
  validate_finite(X);
  const double ybar = y.mean();
  const double sst = (y.array() - ybar).square().sum();
  if (!(sst > 0)) throw DegenerateError("ols_r2: response has zero variance");
  // Center to keep the intercept out of the ridge.
  Eigen::MatrixXd Xc = X.rowwise() - X.colwise().mean();
  const Eigen::VectorXd yc = y.array() - ybar;
  Eigen::MatrixXd gram = Xc.transpose() * Xc;
  gram.diagonal().array() += 1e-8;
  const Eigen::VectorXd beta = gram.ldlt().solve(Xc.transpose() * yc);
  const double ssr = (yc - Xc * beta).squaredNorm();
  (void)p;
  return 1.0 - ssr / sst;
}

std::vector<double> LambdaGrid::values() const {
  if (count < 1) throw InputError("lambda grid must contain at least one value");
  std::vector<double> v(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) v[static_cast<std::size_t>(i)] = std::pow(10.0, base_exponent + step * i);
  return v;
}

std::vector<int> stratified_folds(std::span<const int> y, int k, Rng& rng) {
  if (k < 2) throw InputError("cross-validation needs k >= 2");
  std::vector<std::size_t> pos, neg;
  for (std::size_t i = 0; i < y.size(); ++i) (y[i] == 1 ? pos : neg).push_back(i);
  if (pos.size() < static_cast<std::size_t>(k) || neg.size() < static_cast<std::size_t>(k)) {
    throw DegenerateError("cannot stratify into " + std::to_string(k) + " folds: " +
                          std::to_string(pos.size()) + " positives, " + std::to_string(neg.size()) +
                          " negatives; some fold would contain one class");
  }
  shuffle(std::span(pos), rng);
  shuffle(std::span(neg), rng);
  std::vector<int> fold(y.size());
  const auto uk = static_cast<std::size_t>(k);
  for (std::size_t i = 0; i < pos.size(); ++i) fold[pos[i]] = static_cast<int>(i % uk);
  for (std::size_t i = 0; i < neg.size(); ++i) fold[neg[i]] = static_cast<int>((pos.size() + i) % uk);
  return fold;
}

Split stratified_split(std::span<const int> y, double test_fraction, Rng& rng) {
  if (!(test_fraction > 0 && test_fraction < 1)) throw InputError("test fraction must be in (0, 1)");
  std::vector<std::size_t> pos, neg;
  for (std::size_t i = 0; i < y.size(); ++i) (y[i] == 1 ? pos : neg).push_back(i);
  const double n = static_cast<double>(y.size());
  const auto n_test = static_cast<std::size_t>(std::llround(test_fraction * n));
  const auto n_test_pos = static_cast<std::size_t>(
      std::llround(static_cast<double>(n_test) * static_cast<double>(pos.size()) / n));
  const std::size_t n_test_neg = n_test - n_test_pos;
  if (n_test_pos == 0 || n_test_neg == 0 || n_test_pos >= pos.size() || n_test_neg >= neg.size()) {
    throw DegenerateError("stratified split infeasible: both classes must appear in train and test");
  }
  shuffle(std::span(pos), rng);
  shuffle(std::span(neg), rng);
  Split s;
  s.test.insert(s.test.end(), pos.begin(), pos.begin() + static_cast<std::ptrdiff_t>(n_test_pos));
  s.test.insert(s.test.end(), neg.begin(), neg.begin() + static_cast<std::ptrdiff_t>(n_test_neg));
  s.train.insert(s.train.end(), pos.begin() + static_cast<std::ptrdiff_t>(n_test_pos), pos.end());
  s.train.insert(s.train.end(), neg.begin() + static_cast<std::ptrdiff_t>(n_test_neg), neg.end());
  std::sort(s.test.begin(), s.test.end());
  std::sort(s.train.begin(), s.train.end());
  return s;
}

std::vector<std::size_t> stratified_bootstrap(std::span<const int> y, Rng& rng) {
  std::vector<std::size_t> pos, neg;
  for (std::size_t i = 0; i < y.size(); ++i) (y[i] == 1 ? pos : neg).push_back(i);
  if (pos.empty() || neg.empty()) throw DegenerateError("bootstrap needs both classes");
  std::vector<std::size_t> rows;
  rows.reserve(y.size());
  for (std::size_t i = 0; i < pos.size(); ++i) rows.push_back(pos[uniform_index(rng, pos.size())]);
  for (std::size_t i = 0; i < neg.size(); ++i) rows.push_back(neg[uniform_index(rng, neg.size())]);
  std::sort(rows.begin(), rows.end());
  return rows;
}

Eigen::MatrixXd take_rows(const Eigen::MatrixXd& X, std::span<const std::size_t> rows) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), X.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = X.row(static_cast<Eigen::Index>(rows[i]));
  return out;
}

std::vector<int> take(std::span<const int> y, std::span<const std::size_t> rows) {
  std::vector<int> out;
  out.reserve(rows.size());
  for (auto r : rows) out.push_back(y[r]);
  return out;
}

// ---------------------------------------------------------------------------

std::size_t LrModel::n_nonzero() const {
  return static_cast<std::size_t>((beta_std.array() != 0.0).count());
}

Eigen::VectorXd LrModel::decision(const Eigen::MatrixXd& X) const {
  if (X.cols() != beta.size()) {
    throw InputError("model expects " + std::to_string(beta.size()) + " predictors, got " +
                     std::to_string(X.cols()));
  }
  return (X * beta).array() + beta0;
}

Eigen::VectorXd LrModel::predict_proba(const Eigen::MatrixXd& X) const {
  return decision(X).unaryExpr([](double e) { return 1.0 / (1.0 + std::exp(-e)); });
}

void column_moments(const Eigen::MatrixXd& X, Eigen::VectorXd& center, Eigen::VectorXd& scale) {
  const double n = static_cast<double>(X.rows());
  center = X.colwise().mean();
  scale.resize(X.cols());
  for (Eigen::Index j = 0; j < X.cols(); ++j) {
    const double ss = (X.col(j).array() - center(j)).square().sum();
    scale(j) = std::sqrt(ss / n);
    // Columns whose spread is pure rounding noise count as constant.
    if (scale(j) <= 1e-12 * std::max(1.0, std::abs(center(j)))) scale(j) = 0.0;
  }
}

namespace {

Eigen::MatrixXd standardize(const Eigen::MatrixXd& X, const Eigen::VectorXd& center,
                            const Eigen::VectorXd& scale) {
  Eigen::MatrixXd Z(X.rows(), X.cols());
  for (Eigen::Index j = 0; j < X.cols(); ++j) {
    if (scale(j) > 0) {
      Z.col(j) = (X.col(j).array() - center(j)) / scale(j);
    } else {
      Z.col(j).setZero();
    }
  }
  return Z;
}

inline double log1pexp(double e) { return e > 0 ? e + std::log1p(std::exp(-e)) : std::log1p(std::exp(e)); }
inline double sigmoid(double e) {
  if (e >= 0) return 1.0 / (1.0 + std::exp(-e));
  const double z = std::exp(e);
  return z / (1.0 + z);
}
inline double soft_threshold(double u, double lambda) {
  if (u > lambda) return u - lambda;
  if (u < -lambda) return u + lambda;
  return 0.0;
}

constexpr double kMinWeight = 1e-5;

// Proximal-Newton / coordinate-descent solver on standardized columns.
class LrSolver {
 public:
  LrSolver(const Eigen::MatrixXd& Z, const Eigen::VectorXd& y, const Eigen::VectorXd& scale,
           const LrOptions& opt)
      : Z_(Z), y_(y), opt_(opt), n_(static_cast<double>(Z.rows())), p_(Z.cols()) {
    usable_.resize(static_cast<std::size_t>(p_));
    for (Eigen::Index j = 0; j < p_; ++j) {
      usable_[static_cast<std::size_t>(j)] = scale(j) > 0;
      if (scale(j) > 0) cols_.push_back(j);
    }
    ybar_ = y.mean();
    // Intercept column followed by every usable predictor.
    const auto u = static_cast<Eigen::Index>(cols_.size());
    Zt_.resize(Z.rows(), u + 1);
    Zt_.col(0).setOnes();
    for (Eigen::Index c = 0; c < u; ++c) Zt_.col(c + 1) = Z.col(cols_[static_cast<std::size_t>(c)]);
  }

  double objective(const Eigen::VectorXd& eta, const Eigen::VectorXd& b, double lambda) const {
    double ll = 0.0;
    for (Eigen::Index i = 0; i < eta.size(); ++i) ll += y_(i) * eta(i) - log1pexp(eta(i));
    return ll / n_ - lambda * b.lpNorm<1>();
  }

  Eigen::VectorXd gradient(const Eigen::VectorXd& eta) const {
    const Eigen::VectorXd resid = y_ - eta.unaryExpr([](double e) { return sigmoid(e); });
    return Z_.transpose() * resid / n_;
  }

  double null_intercept() const { return std::log(ybar_ / (1.0 - ybar_)); }

  // Solves at `lambda` starting from (b0, b); `strong` marks candidate
  // columns. Returns the fitted model pieces.
  void solve(double lambda, double lambda_prev, double& b0, Eigen::VectorXd& b, LrModel& m) {
    Eigen::VectorXd eta = (Z_ * b).array() + b0;
    std::vector<char> cand(static_cast<std::size_t>(p_), 0);
    {
      const Eigen::VectorXd g = gradient(eta);
      const double cutoff = opt_.strong_rules ? 2.0 * lambda - lambda_prev : -1.0;
      for (Eigen::Index j = 0; j < p_; ++j) {
        const auto uj = static_cast<std::size_t>(j);
        cand[uj] = usable_[uj] && (b(j) != 0.0 || std::abs(g(j)) >= cutoff);
      }
    }
    m.objective_trace.clear();
    m.converged = false;
    int sweeps = 0;
    while (true) {
      const bool ok = outer_loop(lambda, cand, b0, b, eta, m, sweeps);
      if (!ok) break;
      // KKT check on excluded columns.
      const Eigen::VectorXd g = gradient(eta);
      bool added = false;
      for (Eigen::Index j = 0; j < p_; ++j) {
        const auto uj = static_cast<std::size_t>(j);
        if (usable_[uj] && !cand[uj] && std::abs(g(j)) > lambda) {
          cand[uj] = 1;
          added = true;
        }
      }
      if (!added) {
        m.converged = true;
        break;
      }
    }
    m.sweeps = sweeps;
  }

 private:
  // Minimizes the penalized quadratic model
  //   1/2 (x - x0)' H (x - x0) + g0'(x - x0) + lambda |x_1..m|_1
  // over x = (intercept, usable coefficients); coordinates not marked free
  // stay where they are. Cyclic coordinate descent
  // on the Gram matrix, accelerated by exact Newton steps on the current
  // active set with fixed signs; a step that would flip a sign stops at the
  // first zero crossing. Returns when a full sweep moves no coordinate by
  // more than the tolerance.
  void solve_quadratic(const Eigen::MatrixXd& H, Eigen::VectorXd& g, Eigen::VectorXd& x, double lambda,
                       const std::vector<char>& free, int& sweeps) const {
    const Eigen::Index m = x.size();
    auto update = [&](Eigen::Index j) {
      const double hjj = H(j, j);
      if (hjj <= 0.0 || !free[static_cast<std::size_t>(j)]) return 0.0;
      const double u = hjj * x(j) - g(j);
      const double nv = j == 0 ? u / hjj : soft_threshold(u, lambda) / hjj;
      const double d = nv - x(j);
      if (d != 0.0) {
        g.noalias() += d * H.col(j);
        x(j) = nv;
      }
      return std::abs(d);
    };
    std::vector<Eigen::Index> act;
    while (true) {
      double max_delta = 0.0;
      for (Eigen::Index j = 0; j < m; ++j) max_delta = std::max(max_delta, update(j));
      ++sweeps;
      if (max_delta < opt_.tolerance || sweeps >= opt_.max_sweeps) return;

      act.clear();
      for (Eigen::Index j = 0; j < m; ++j) {
        if (j == 0 || x(j) != 0.0) act.push_back(j);
      }
      const auto k = static_cast<Eigen::Index>(act.size());
      Eigen::MatrixXd Ha(k, k);
      Eigen::VectorXd rhs(k);
      for (Eigen::Index a = 0; a < k; ++a) {
        const auto ja = act[static_cast<std::size_t>(a)];
        for (Eigen::Index b = 0; b < k; ++b) Ha(a, b) = H(ja, act[static_cast<std::size_t>(b)]);
        const double sign = ja == 0 ? 0.0 : (x(ja) > 0 ? 1.0 : -1.0);
        rhs(a) = -g(ja) - lambda * sign;
      }
      const Eigen::LDLT<Eigen::MatrixXd> ldlt(Ha);
      if (ldlt.info() != Eigen::Success) continue;
      const Eigen::VectorXd step = ldlt.solve(rhs);
      if (!step.allFinite()) continue;
      // Largest step that keeps every active sign.
      double alpha = 1.0;
      Eigen::Index hit = -1;
      for (Eigen::Index a = 1; a < k; ++a) {
        const auto ja = act[static_cast<std::size_t>(a)];
        if (x(ja) * (x(ja) + step(a)) < 0.0) {
          const double t = -x(ja) / step(a);
          if (t < alpha) {
            alpha = t;
            hit = ja;
          }
        }
      }
      // The model must not get worse (guards against a singular Ha).
      const double model_change = alpha * (0.5 * alpha * step.dot(Ha * step) - rhs.dot(step));
      if (!(model_change <= 0.0)) continue;
      for (Eigen::Index a = 0; a < k; ++a) {
        const auto ja = act[static_cast<std::size_t>(a)];
        const double d = alpha * step(a);
        x(ja) += d;
        g.noalias() += d * H.col(ja);
      }
      if (hit >= 0) {
        g.noalias() -= x(hit) * H.col(hit);
        x(hit) = 0.0;
      }
    }
  }

  // Weighted Gram matrix (1/n) Zt' W Zt at the current weights.
  void refresh_hessian(const Eigen::VectorXd& w) {
    Zs_ = Zt_.array().colwise() * w.array().sqrt();
    H_.setZero(Zt_.cols(), Zt_.cols());
    H_.selfadjointView<Eigen::Lower>().rankUpdate(Zs_.transpose(), 1.0 / n_);
    H_.triangularView<Eigen::StrictlyUpper>() = H_.transpose();
    have_h_ = true;
  }

  // Proximal Newton iterations. The Hessian is reused across iterations
  // (and across lambdas) while steps keep shrinking quickly; it is rebuilt
  // whenever convergence slows or the line search has to backtrack. A stale
  // Hessian changes only the path to the optimum, not the optimum: the
  // fixed point is set by the exact gradient.
  // Returns false if the fit stopped early (sweep limit or divergence).
  bool outer_loop(double lambda, const std::vector<char>& cand, double& b0, Eigen::VectorXd& b,
                  Eigen::VectorXd& eta, LrModel& m, int& sweeps) {
    const Eigen::Index n = Z_.rows();
    const auto u = static_cast<Eigen::Index>(cols_.size());
    std::vector<char> free(static_cast<std::size_t>(u + 1), 0);
    free[0] = 1;
    for (Eigen::Index c = 0; c < u; ++c) {
      free[static_cast<std::size_t>(c + 1)] = cand[static_cast<std::size_t>(cols_[static_cast<std::size_t>(c)])];
    }

    Eigen::VectorXd w(n), wr(n);
    double f_cur = objective(eta, b, lambda);
    if (m.objective_trace.empty()) m.objective_trace.push_back(f_cur);
    double prev_change = std::numeric_limits<double>::infinity();
    bool stale = true;  // the cached Hessian was not built at the current point

    while (true) {
      for (Eigen::Index i = 0; i < n; ++i) {
        const double pi = sigmoid(eta(i));
        w(i) = std::max(pi * (1.0 - pi), kMinWeight);
        wr(i) = y_(i) - pi;  // weight times working residual
      }
      if (!have_h_ || refresh_) {
        refresh_hessian(w);
        refresh_ = false;
        stale = false;
      }
      Eigen::VectorXd g = -(Zt_.transpose() * wr) / n_;

      Eigen::VectorXd x0(u + 1);
      x0(0) = b0;
      for (Eigen::Index c = 0; c < u; ++c) x0(c + 1) = b(cols_[static_cast<std::size_t>(c)]);
      Eigen::VectorXd x = x0;
      solve_quadratic(H_, g, x, lambda, free, sweeps);

      // Backtracking line search on the true objective.
      const Eigen::VectorXd dx = x - x0;
      const double d0 = dx(0);
      Eigen::VectorXd d = Eigen::VectorXd::Zero(p_);
      for (Eigen::Index c = 0; c < u; ++c) d(cols_[static_cast<std::size_t>(c)]) = dx(c + 1);
      const Eigen::VectorXd deta = Zt_ * dx;
      double t = 1.0;
      double f_new = f_cur;
      bool accepted = false;
      for (int tries = 0; tries < 40; ++tries) {
        const Eigen::VectorXd eta_t = eta + t * deta;
        const Eigen::VectorXd b_t = b + t * d;
        f_new = objective(eta_t, b_t, lambda);
        if (f_new >= f_cur) {
          accepted = true;
          break;
        }
        t *= 0.5;
      }
      const double step = dx.size() ? dx.cwiseAbs().maxCoeff() : 0.0;
      if (!accepted && stale) {
        refresh_ = true;  // retry with an exact Hessian before giving up
        continue;
      }
      double change = 0.0;
      if (accepted) {
        b += t * d;
        b0 += t * d0;
        eta += t * deta;
        change = t * step;
        f_cur = f_new;
        m.objective_trace.push_back(f_cur);
      }
      const double max_coef = b.size() ? b.cwiseAbs().maxCoeff() : 0.0;
      if (max_coef > opt_.coefficient_cap || std::abs(b0) > opt_.coefficient_cap) {
        b = b.cwiseMax(-opt_.coefficient_cap).cwiseMin(opt_.coefficient_cap);
        b0 = std::clamp(b0, -opt_.coefficient_cap, opt_.coefficient_cap);
        eta = (Z_ * b).array() + b0;
        m.warnings.push_back("coefficients diverge (separable data?); capped at " +
                             std::to_string(opt_.coefficient_cap));
        refresh_ = true;
        return false;
      }
      if (!accepted || change < opt_.tolerance) return true;
      if (sweeps >= opt_.max_sweeps) {
        m.warnings.push_back("coordinate descent hit the sweep limit before converging");
        return false;
      }
      if (t < 1.0 || change > 0.25 * prev_change) refresh_ = true;
      stale = true;
      prev_change = change;
    }
  }

  const Eigen::MatrixXd& Z_;
  const Eigen::VectorXd& y_;
  LrOptions opt_;
  double n_;
  Eigen::Index p_;
  std::vector<char> usable_;
  std::vector<Eigen::Index> cols_;  // usable predictor columns
  Eigen::MatrixXd Zt_, Zs_, H_;
  bool have_h_ = false;
  bool refresh_ = false;
  double ybar_ = 0.0;
};

LrModel finish(double lambda, double b0, const Eigen::VectorXd& b, const Eigen::VectorXd& center,
               const Eigen::VectorXd& scale, LrModel m) {
  m.lambda = lambda;
  m.center = center;
  m.scale = scale;
  m.beta0_std = b0;
  m.beta_std = b;
  m.beta = Eigen::VectorXd::Zero(b.size());
  m.beta0 = b0;
  for (Eigen::Index j = 0; j < b.size(); ++j) {
    if (scale(j) > 0 && b(j) != 0.0) {
      m.beta(j) = b(j) / scale(j);
      m.beta0 -= m.beta(j) * center(j);
    }
  }
  return m;
}

void check_lr_inputs(const Eigen::MatrixXd& X, std::span<const int> y) {
  validate_binary(y, static_cast<std::size_t>(X.rows()));
  validate_finite(X);
  const auto pos = std::count(y.begin(), y.end(), 1);
  if (pos == 0 || pos == static_cast<long>(y.size())) {
    throw DegenerateError("logistic regression needs both classes in the response");
  }
}

}  // namespace

double lambda_max(const Eigen::MatrixXd& X, std::span<const int> y) {
  check_lr_inputs(X, y);
  Eigen::VectorXd center, scale;
  column_moments(X, center, scale);
  const Eigen::MatrixXd Z = standardize(X, center, scale);
  Eigen::VectorXd yv(static_cast<Eigen::Index>(y.size()));
  for (std::size_t i = 0; i < y.size(); ++i) yv(static_cast<Eigen::Index>(i)) = y[i];
  const Eigen::VectorXd g = Z.transpose() * (yv.array() - yv.mean()).matrix() / static_cast<double>(y.size());
  return g.size() ? g.cwiseAbs().maxCoeff() : 0.0;
}

double lr_objective(const Eigen::MatrixXd& X, std::span<const int> y, const LrModel& m) {
  const Eigen::MatrixXd Z = standardize(X, m.center, m.scale);
  const Eigen::VectorXd eta = (Z * m.beta_std).array() + m.beta0_std;
  double ll = 0.0;
  for (Eigen::Index i = 0; i < eta.size(); ++i) ll += y[static_cast<std::size_t>(i)] * eta(i) - log1pexp(eta(i));
  return ll / static_cast<double>(y.size()) - m.lambda * m.beta_std.lpNorm<1>();
}

std::vector<LrModel> fit_lr_path(const Eigen::MatrixXd& X, std::span<const int> y,
                                 std::span<const double> lambdas, const LrOptions& options) {
  check_lr_inputs(X, y);
  for (double l : lambdas) {
    if (!(l >= 0) || !std::isfinite(l)) throw InputError("lambda must be finite and >= 0");
  }
  Eigen::VectorXd center, scale;
  column_moments(X, center, scale);
  const Eigen::MatrixXd Z = standardize(X, center, scale);
  Eigen::VectorXd yv(static_cast<Eigen::Index>(y.size()));
  for (std::size_t i = 0; i < y.size(); ++i) yv(static_cast<Eigen::Index>(i)) = y[i];

  LrSolver solver(Z, yv, scale, options);
  const Eigen::VectorXd g0 = Z.transpose() * (yv.array() - yv.mean()).matrix() / static_cast<double>(y.size());
  const double lmax = g0.size() ? g0.cwiseAbs().maxCoeff() : 0.0;

  std::vector<std::size_t> order(lambdas.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return lambdas[a] > lambdas[b]; });

  std::vector<LrModel> out(lambdas.size());
  double b0 = solver.null_intercept();
  Eigen::VectorXd b = Eigen::VectorXd::Zero(X.cols());
  double prev = lmax;
  for (std::size_t idx : order) {
    const double lambda = lambdas[idx];
    LrModel m;
    if (lambda >= lmax) {
      // The intercept-only model is exactly optimal here; solving would only
      // add rounding noise at the boundary.
      b0 = solver.null_intercept();
      b.setZero();
      const double ybar = yv.mean();
      m.objective_trace = {ybar * b0 - std::log1p(std::exp(b0))};
      m.converged = true;
    } else {
      solver.solve(lambda, std::max(prev, lambda), b0, b, m);
    }
    out[idx] = finish(lambda, b0, b, center, scale, std::move(m));
    prev = lambda;
  }
  return out;
}

LrModel fit_lr_l1(const Eigen::MatrixXd& X, std::span<const int> y, double lambda,
                  const LrOptions& options) {
  const double l[1] = {lambda};
  return std::move(fit_lr_path(X, y, l, options).front());
}

CvResult cv_lambda(const Eigen::MatrixXd& X, std::span<const int> y, int k, std::uint64_t seed,
                   const LambdaGrid& grid, const LrOptions& options) {
  check_lr_inputs(X, y);
  CvResult res;
  res.lambdas = grid.values();
  Rng rng = make_rng(seed, Stream::kFolds);
  const auto fold = stratified_folds(y, k, rng);
  const std::size_t L = res.lambdas.size();
  std::vector<std::vector<double>> fold_auc(static_cast<std::size_t>(k));
  parallel_for(static_cast<std::size_t>(k), [&](std::size_t f) {
    std::vector<std::size_t> tr, te;
    for (std::size_t i = 0; i < y.size(); ++i) (fold[i] == static_cast<int>(f) ? te : tr).push_back(i);
    const auto Xtr = take_rows(X, tr), Xte = take_rows(X, te);
    const auto ytr = take(y, tr), yte = take(y, te);
    const auto path = fit_lr_path(Xtr, ytr, res.lambdas, options);
    auto& aucs = fold_auc[f];
    aucs.resize(L);
    for (std::size_t l = 0; l < L; ++l) {
      const Eigen::VectorXd s = path[l].decision(Xte);
      aucs[l] = eval::auc(yte, std::span<const double>(s.data(), static_cast<std::size_t>(s.size())));
    }
  });
  res.mean_auc.assign(L, 0.0);
  for (std::size_t l = 0; l < L; ++l) {
    for (const auto& a : fold_auc) res.mean_auc[l] += a[l];
    res.mean_auc[l] /= static_cast<double>(k);
  }
  double best = -1.0;
  for (std::size_t l = 0; l < L; ++l) {
    if (res.mean_auc[l] >= best) {
      best = res.mean_auc[l];
      res.best_index = l;
    }
  }
  res.lambda = res.lambdas[res.best_index];
  return res;
}

int classify(double score, double theta) { return score >= theta ? 1 : 0; }

}  // namespace poolrank::models
