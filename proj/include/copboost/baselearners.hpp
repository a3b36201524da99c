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

#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace copboost {

enum class LearnerKind { intercept, linear, pspline, categorical };

LearnerKind parse_learner_kind(std::string_view name);
std::string_view learner_kind_name(LearnerKind kind);

struct BaseLearnerDef {
  LearnerKind kind = LearnerKind::intercept;
  int covariate = -1;  // column index; unused by the intercept
  int n_inner_knots = 20;
  int degree = 3;
  int diff_order = 2;
  double df = 0.0;  // 0 selects the default: 2 for linear, 4 otherwise

  static BaseLearnerDef intercept();
  static BaseLearnerDef linear(int covariate);
  static BaseLearnerDef pspline(int covariate, double df = 4.0);
  static BaseLearnerDef categorical(int covariate, double df = 4.0);

  // e.g. "pspline(x3)"; covariates are numbered from 1 in names.
  std::string name() const;
};

// Data-dependent parts of a learner, fixed from the training rows: spline
// range and knots, categorical levels.
struct LearnerBasis {
  BaseLearnerDef def;
  double lo = 0.0;
  double hi = 0.0;
  std::vector<double> knots;
  std::vector<double> levels;

  int dim() const;
};

LearnerBasis bl_basis(const BaseLearnerDef& def, std::span<const double> x_train);
Eigen::MatrixXd bl_design(const LearnerBasis& basis, std::span<const double> x);
Eigen::MatrixXd bl_penalty(const LearnerBasis& basis);

// trace((B'WB + lambda P)^{-1} B'WB), with gram = B'WB.
double effective_df(const Eigen::MatrixXd& gram, const Eigen::MatrixXd& penalty, double lambda);
// Bisection on log(lambda) in [-20, 20]; returns exp(-20) when the target is at
// or above the df at that end, 0 for unpenalised learners.
double df_to_lambda(const Eigen::MatrixXd& gram, const Eigen::MatrixXd& penalty, double df);

struct FittedLearner {
  Eigen::VectorXd coefficients;
  double rss = 0.0;
};

// A learner bound to one data set and one set of {0,1} training weights. The
// penalised normal equations are factorised once; each fit is then a solve.
class LearnerFit {
 public:
  LearnerFit(LearnerBasis basis, std::span<const double> x, std::span<const double> weights);

  FittedLearner fit(std::span<const double> target) const;
  // Fitted values at the bound rows.
  Eigen::VectorXd fitted(const Eigen::VectorXd& coefficients) const { return design_ * coefficients; }

  const LearnerBasis& basis() const { return basis_; }
  const Eigen::MatrixXd& design() const { return design_; }
  double lambda() const { return lambda_; }

 private:
  LearnerBasis basis_;
  Eigen::MatrixXd design_;
  Eigen::VectorXd weights_;
  Eigen::MatrixXd gram_;
  Eigen::LLT<Eigen::MatrixXd> llt_;
  double lambda_ = 0.0;
};

FittedLearner bl_fit(const LearnerBasis& basis, std::span<const double> x,
                     std::span<const double> target, std::span<const double> weights);
// For the intercept only x.size() is used.
Eigen::VectorXd bl_predict(const LearnerBasis& basis, const Eigen::VectorXd& coefficients,
                           std::span<const double> x);

}  // namespace copboost
