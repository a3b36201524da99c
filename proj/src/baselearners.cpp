/*
 * Copyright 2026 The copboost Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "copboost/baselearners.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "copboost/error.hpp"

namespace copboost {

namespace {

constexpr double kLogLambdaLo = -20.0;
constexpr double kLogLambdaHi = 20.0;
constexpr double kDfTol = 1e-3;
constexpr double kJitter = 1e-10;

double default_df(LearnerKind kind) { return kind == LearnerKind::linear ? 2.0 : 4.0; }

// Nonzero cubic (or degree-p) B-spline values at x: basis functions
// span-p .. span. Outside [lo, hi] the boundary span is kept, which extends
// the end polynomials.
int bspline_values(const LearnerBasis& b, double x, double* out) {
  const int p = b.def.degree;
  const int n_int = b.def.n_inner_knots + 1;
  const double step = (b.hi - b.lo) / n_int;
  int span = p + static_cast<int>(std::floor((x - b.lo) / step));
  span = std::clamp(span, p, p + n_int - 1);
  const auto& t = b.knots;
  double left[8], right[8];
  out[0] = 1.0;
  for (int j = 1; j <= p; ++j) {
    left[j] = x - t[span + 1 - j];
    right[j] = t[span + j] - x;
    double saved = 0.0;
    for (int r = 0; r < j; ++r) {
      const double temp = out[r] / (right[r + 1] + left[j - r]);
      out[r] = saved + right[r + 1] * temp;
      saved = left[j - r] * temp;
    }
    out[j] = saved;
  }
  return span - p;
}

Eigen::MatrixXd difference_matrix(int d, int order) {
  Eigen::MatrixXd D = Eigen::MatrixXd::Identity(d, d);
  for (int o = 0; o < order; ++o) {
    const Eigen::Index r = D.rows();
    D = (D.bottomRows(r - 1) - D.topRows(r - 1)).eval();
  }
  return D;
}

}  // namespace

LearnerKind parse_learner_kind(std::string_view name) {
  if (name == "intercept") return LearnerKind::intercept;
  if (name == "linear") return LearnerKind::linear;
  if (name == "pspline") return LearnerKind::pspline;
  if (name == "categorical") return LearnerKind::categorical;
  throw ConfigError("unknown base-learner kind '" + std::string(name) + "'");
}

std::string_view learner_kind_name(LearnerKind kind) {
  switch (kind) {
    case LearnerKind::intercept: return "intercept";
    case LearnerKind::linear: return "linear";
    case LearnerKind::pspline: return "pspline";
    case LearnerKind::categorical: return "categorical";
  }
  return "?";
}

BaseLearnerDef BaseLearnerDef::intercept() { return BaseLearnerDef{}; }

BaseLearnerDef BaseLearnerDef::linear(int covariate) {
  BaseLearnerDef d;
  d.kind = LearnerKind::linear;
  d.covariate = covariate;
  return d;
}

BaseLearnerDef BaseLearnerDef::pspline(int covariate, double df) {
  BaseLearnerDef d;
  d.kind = LearnerKind::pspline;
  d.covariate = covariate;
  d.df = df;
  return d;
}

BaseLearnerDef BaseLearnerDef::categorical(int covariate, double df) {
  BaseLearnerDef d;
  d.kind = LearnerKind::categorical;
  d.covariate = covariate;
  d.df = df;
  return d;
}

std::string BaseLearnerDef::name() const {
  if (kind == LearnerKind::intercept) return "intercept";
  return std::string(learner_kind_name(kind)) + "(x" + std::to_string(covariate + 1) + ")";
}

int LearnerBasis::dim() const {
  switch (def.kind) {
    case LearnerKind::intercept: return 1;
    case LearnerKind::linear: return 2;
    case LearnerKind::pspline: return def.n_inner_knots + def.degree + 1;
    case LearnerKind::categorical: return static_cast<int>(levels.size());
  }
  return 0;
}

LearnerBasis bl_basis(const BaseLearnerDef& def, std::span<const double> x_train) {
  LearnerBasis b;
  b.def = def;
  if (b.def.df == 0.0) b.def.df = default_df(def.kind);
  if (def.kind == LearnerKind::intercept) return b;
  if (x_train.empty()) throw InputError(def.name() + ": no training rows");
  for (double v : x_train) {
    if (!std::isfinite(v)) throw InputError(def.name() + ": non-finite covariate value");
  }
  if (def.kind == LearnerKind::pspline) {
    if (def.degree < 1 || def.degree > 6) throw ConfigError("pspline degree must be in 1..6");
    if (def.n_inner_knots < 1) throw ConfigError("pspline needs at least one inner knot");
    if (def.diff_order < 1 || def.diff_order >= b.dim()) {
      throw ConfigError("pspline difference order out of range");
    }
    const auto [mn, mx] = std::minmax_element(x_train.begin(), x_train.end());
    b.lo = *mn;
    b.hi = *mx;
    if (!(b.hi > b.lo)) {
      warn(def.name() + ": constant covariate, using a unit-width knot range");
      b.hi = b.lo + 1.0;
    }
    const int n_int = def.n_inner_knots + 1;
    const double step = (b.hi - b.lo) / n_int;
    for (int i = -def.degree; i <= n_int + def.degree; ++i) b.knots.push_back(b.lo + i * step);
  } else if (def.kind == LearnerKind::categorical) {
    std::set<double> lv(x_train.begin(), x_train.end());
    b.levels.assign(lv.begin(), lv.end());
    // An explicit df above the level count is an error; the default is capped.
    if (def.df == 0.0) b.def.df = std::min(4.0, static_cast<double>(b.levels.size()));
  }
  return b;
}

Eigen::MatrixXd bl_design(const LearnerBasis& basis, std::span<const double> x) {
  const auto n = static_cast<Eigen::Index>(x.size());
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(n, basis.dim());
  switch (basis.def.kind) {
    case LearnerKind::intercept: B.setOnes(); break;
    case LearnerKind::linear:
      for (Eigen::Index i = 0; i < n; ++i) {
        B(i, 0) = 1.0;
        B(i, 1) = x[i];
      }
      break;
    case LearnerKind::pspline: {
      double vals[8];
      for (Eigen::Index i = 0; i < n; ++i) {
        const int first = bspline_values(basis, x[i], vals);
        for (int j = 0; j <= basis.def.degree; ++j) B(i, first + j) = vals[j];
      }
      break;
    }
    case LearnerKind::categorical: {
      bool unseen = false;
      for (Eigen::Index i = 0; i < n; ++i) {
        const auto it = std::lower_bound(basis.levels.begin(), basis.levels.end(), x[i]);
        if (it == basis.levels.end() || *it != x[i]) {
          unseen = true;
          continue;
        }
        B(i, it - basis.levels.begin()) = 1.0;
      }
      if (unseen) warn(basis.def.name() + ": unseen level mapped to zero effect");
      break;
    }
  }
  return B;
}

Eigen::MatrixXd bl_penalty(const LearnerBasis& basis) {
  const int d = basis.dim();
  switch (basis.def.kind) {
    case LearnerKind::pspline: {
      const Eigen::MatrixXd D = difference_matrix(d, basis.def.diff_order);
      return D.transpose() * D;
    }
    case LearnerKind::categorical: return Eigen::MatrixXd::Identity(d, d);
    default: return Eigen::MatrixXd::Zero(d, d);
  }
}

double effective_df(const Eigen::MatrixXd& gram, const Eigen::MatrixXd& penalty, double lambda) {
  const Eigen::MatrixXd A = gram + lambda * penalty;
  return A.ldlt().solve(gram).trace();
}

double df_to_lambda(const Eigen::MatrixXd& gram, const Eigen::MatrixXd& penalty, double df) {
  const auto d = static_cast<double>(gram.rows());
  // Unpenalised learners carry their full dimension whatever the target.
  if (penalty.isZero(0.0)) return 0.0;
  if (!(df >= 1.0) || df > d + kDfTol) {
    throw ConfigError("degrees of freedom " + std::to_string(df) + " not attainable (dimension " +
                      std::to_string(gram.rows()) + ")");
  }
  double lo = kLogLambdaLo, hi = kLogLambdaHi;
  if (effective_df(gram, penalty, std::exp(lo)) <= df + kDfTol) return std::exp(lo);
  if (effective_df(gram, penalty, std::exp(hi)) > df + kDfTol) {
    throw ConfigError("degrees of freedom " + std::to_string(df) +
                      " below the penalty null space");
  }
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double f = effective_df(gram, penalty, std::exp(mid));
    if (std::abs(f - df) < 1e-6 * kDfTol) return std::exp(mid);
    (f > df ? lo : hi) = mid;
    if (hi - lo < 1e-12) break;
  }
  return std::exp(0.5 * (lo + hi));
}

LearnerFit::LearnerFit(LearnerBasis basis, std::span<const double> x,
                       std::span<const double> weights)
    : basis_(std::move(basis)) {
  if (basis_.def.kind != LearnerKind::intercept && x.size() != weights.size()) {
    throw InputError(basis_.def.name() + ": covariate and weight lengths differ");
  }
  const auto n = static_cast<Eigen::Index>(weights.size());
  if (basis_.def.kind == LearnerKind::intercept) {
    design_ = Eigen::MatrixXd::Ones(n, 1);
  } else {
    design_ = bl_design(basis_, x);
  }
  weights_ = Eigen::Map<const Eigen::VectorXd>(weights.data(), n);
  gram_ = design_.transpose() * weights_.asDiagonal() * design_;
  const Eigen::MatrixXd P = bl_penalty(basis_);
  lambda_ = df_to_lambda(gram_, P, basis_.def.df);
  Eigen::MatrixXd A = gram_ + lambda_ * P;
  llt_.compute(A);
  if (llt_.info() != Eigen::Success) {
    A.diagonal().array() += kJitter;
    llt_.compute(A);
    if (llt_.info() != Eigen::Success) {
      throw NumericError(basis_.def.name() + ": singular penalised system");
    }
  }
}

FittedLearner LearnerFit::fit(std::span<const double> target) const {
  if (static_cast<Eigen::Index>(target.size()) != design_.rows()) {
    throw InputError(basis_.def.name() + ": target length differs from design");
  }
  const Eigen::Map<const Eigen::VectorXd> g(target.data(), design_.rows());
  const Eigen::VectorXd wg = weights_.cwiseProduct(g);
  const Eigen::VectorXd rhs = design_.transpose() * wg;
  FittedLearner out;
  out.coefficients = llt_.solve(rhs);
  // rss = g'Wg - 2 beta'B'Wg + beta'B'WB beta
  const double gwg = g.dot(wg);
  out.rss = gwg - 2.0 * out.coefficients.dot(rhs) + out.coefficients.dot(gram_ * out.coefficients);
  out.rss = std::max(out.rss, 0.0);
  return out;
}

FittedLearner bl_fit(const LearnerBasis& basis, std::span<const double> x,
                     std::span<const double> target, std::span<const double> weights) {
  return LearnerFit(basis, x, weights).fit(target);
}

Eigen::VectorXd bl_predict(const LearnerBasis& basis, const Eigen::VectorXd& coefficients,
                           std::span<const double> x) {
  if (coefficients.size() != basis.dim()) {
    throw InputError(basis.def.name() + ": coefficient dimension mismatch");
  }
  if (basis.def.kind == LearnerKind::intercept) {
    return Eigen::VectorXd::Constant(static_cast<Eigen::Index>(x.size()), coefficients(0));
  }
  return bl_design(basis, x) * coefficients;
}

}  // namespace copboost
