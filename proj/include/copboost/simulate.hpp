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

#include <Eigen/Core>
#include <cstdint>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "copboost/data.hpp"
#include "copboost/expression.hpp"
#include "copboost/likelihood.hpp"

namespace copboost {

enum class Preset {
  s1_binary_linear,
  s2_count_linear,
  s2_count_nonlinear,
  s3_mixed_linear,
  s3_mixed_nonlinear,
  custom
};

Preset parse_preset(std::string_view name);  // e.g. "s2-count-nonlinear"
std::string_view preset_name(Preset preset);

enum class CovariateMode { toeplitz_gaussian, iid_uniform01 };

CovariateMode parse_covariate_mode(std::string_view name);
std::string_view covariate_mode_name(CovariateMode mode);

struct DgpSpec {
  Preset preset = Preset::s1_binary_linear;
  int p = 10;
  std::size_t n_train = 1000;
  std::size_t n_mstop = 1500;
  std::size_t n_test = 1000;
  CovariateMode covariates = CovariateMode::toeplitz_gaussian;
  double rho = 0.5;
  std::uint64_t seed = 1;
  // Custom DGPs only: the model and one predictor expression per parameter.
  ModelSpec model;
  std::vector<std::string> eta;

  std::size_t n() const { return n_train + n_mstop + n_test; }
};

// A named preset with its model, covariate mode and predictor expressions.
DgpSpec make_dgp(Preset preset, int p = 10, std::uint64_t seed = 1);

ModelSpec preset_model(Preset preset);
CovariateMode preset_covariates(Preset preset);
std::vector<std::string> preset_formulas(Preset preset);

// Compiled predictors of a DGP.
class TruePredictor {
 public:
  explicit TruePredictor(const DgpSpec& dgp);
  EtaVector eta(std::span<const double> x) const;
  // Covariates with an effect on each parameter, 0-based.
  std::vector<std::set<int>> informative() const;
  int n_params() const { return static_cast<int>(exprs_.size()); }

 private:
  std::vector<Expression> exprs_;
};

EtaVector preset_eta(Preset preset, std::span<const double> x);

Eigen::MatrixXd gen_covariates(const DgpSpec& dgp);
// Returns y1, y2 for each row of x. Rows are drawn from independent streams
// derived from the seed, so the result does not depend on threads.
std::pair<std::vector<double>, std::vector<double>> gen_response(const DgpSpec& dgp,
                                                                 const Eigen::MatrixXd& x,
                                                                 int threads = 1);
// Covariates, responses and the train/mstop/test partition, in that order.
Dataset simulate(const DgpSpec& dgp, int threads = 1);
// True predictors for every row, n x K.
Eigen::MatrixXd true_eta(const DgpSpec& dgp, const Eigen::MatrixXd& x);

}  // namespace copboost
