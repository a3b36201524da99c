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
#include <array>
#include <span>
#include <string>
#include <string_view>

#include "copboost/links.hpp"

namespace copboost {

// Univariate response families. Parameterisations follow the gamlss.dist
// conventions (mu, sigma, nu in that order):
//
//   bernoulli  f(y) = mu^y (1-mu)^(1-y)                         mu in (0,1)
//   gaussian   f(y) = phi((y-mu)/sigma) / sigma                  sigma > 0
//   poisson    f(y) = exp(-mu) mu^y / y!                         mu > 0
//   geometric  f(y) = mu^y / (1+mu)^(y+1)                        mu > 0
//   negbin1    f(y) = G(y+1/s) / (G(1/s) y!) r^y (1+s mu)^(-1/s),
//              r = s mu / (1 + s mu)                             mu, s > 0
//   zalg       f(0) = sigma,
//              f(y) = (1-sigma) a mu^y / y, a = -1/log(1-mu)     mu, sigma in (0,1)
//   zip        f(0) = sigma + (1-sigma) exp(-mu),
//              f(y) = (1-sigma) exp(-mu) mu^y / y!               mu > 0, sigma in [0,1]
//   zanbi      f(0) = nu, f(y) = (1-nu) NB(y) / (1 - NB(0))      mu, sigma > 0, nu in [0,1]
//   zinbi      f(0) = nu + (1-nu) NB(0), f(y) = (1-nu) NB(y)     mu, sigma > 0, nu in [0,1]
//
// with NB the negbin1 mass at (mu, sigma).
enum class Family { bernoulli, gaussian, poisson, geometric, negbin1, zalg, zip, zanbi, zinbi };

enum class Support { binary, count, real };

enum class ParamRange { real, positive, unit };

inline constexpr int kMaxMarginParams = 3;
using ParamVector = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, kMaxMarginParams, 1>;

struct MarginFamily {
  Family family = Family::bernoulli;
  int n_params = 1;
  std::array<Link, kMaxMarginParams> links{Link::logit, Link::log, Link::logit};

  // Default links per family; bernoulli_link selects logit/probit/cloglog.
  static MarginFamily make(Family family, Link bernoulli_link = Link::logit);

  Support support() const;
  ParamRange range(int k) const;
  std::string_view param_name(int k) const;
};

Family parse_family(std::string_view name);
std::string_view family_name(Family family);
int family_n_params(Family family);

// Parameter vector from predictor values (one per parameter).
ParamVector margin_response(const MarginFamily& margin, std::span<const double> eta);

// Throws DomainError when a parameter is outside its range.
void validate_params(const MarginFamily& margin, const ParamVector& params);
// Throws DomainError when y is outside the support.
void validate_response(const MarginFamily& margin, double y);

double margin_pdf(const MarginFamily& margin, double y, const ParamVector& params);
double margin_log_pdf(const MarginFamily& margin, double y, const ParamVector& params);
double margin_cdf(const MarginFamily& margin, double y, const ParamVector& params);
// Generalised inverse: smallest y in the support with F(y) >= p.
double margin_quantile(const MarginFamily& margin, double p, const ParamVector& params);
double margin_mean(const MarginFamily& margin, const ParamVector& params);
double margin_variance(const MarginFamily& margin, const ParamVector& params);

// Intercept-only maximum-likelihood fit, returned on the link scale.
ParamVector margin_offset(const MarginFamily& margin, std::span<const double> y);

// Mass (or density) and CDF at one point, evaluated together.
struct MarginEval {
  double pdf = 0.0;
  double log_pdf = 0.0;
  double cdf = 0.0;
};

// Same, plus derivatives of pdf, log pdf and cdf with respect to each
// natural-scale parameter. Closed forms for bernoulli, gaussian, poisson,
// geometric and zip; central differences otherwise.
struct MarginEvalGrad {
  MarginEval value;
  ParamVector d_pdf;
  ParamVector d_log_pdf;
  ParamVector d_cdf;
};

MarginEval margin_eval(const MarginFamily& margin, double y, const ParamVector& params);
MarginEvalGrad margin_eval_grad(const MarginFamily& margin, double y, const ParamVector& params);

}  // namespace copboost
