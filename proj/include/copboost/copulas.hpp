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
#include <string>
#include <string_view>
#include <utility>

#include "copboost/rng.hpp"

namespace copboost {

enum class CopulaFamily { gauss, clayton, gumbel, frank, amh, fgm, joe };

// One-parameter copula with an optional rotation (0, 90, 180, 270 degrees):
//   C90(u,v)  = v - C(1-u, v)
//   C180(u,v) = u + v - 1 + C(1-u, 1-v)
//   C270(u,v) = u - C(u, 1-v)
// Clayton, Gumbel and Joe rotated by 90/270 carry a negative parameter (the
// base copula is evaluated at -theta), so their response is -exp(eta) and
// -(1 + exp(eta)). Symmetric-range families keep theta as is.
struct CopulaSpec {
  CopulaFamily family = CopulaFamily::gauss;
  int rotation = 0;

  static CopulaSpec make(CopulaFamily family, int rotation = 0);

  // True when the user-facing parameter is the negated base parameter.
  bool negated() const;
  // Parameter value at which the copula is the independence copula, if any.
  bool has_independence_point() const;
  std::string name() const;
};

CopulaFamily parse_copula_family(std::string_view name);
std::string_view copula_family_name(CopulaFamily family);

void validate_theta(const CopulaSpec& spec, double theta);

double theta_response(const CopulaSpec& spec, double eta);
double theta_link(const CopulaSpec& spec, double theta);
double theta_response_derivative(const CopulaSpec& spec, double eta);

double copula_cdf(const CopulaSpec& spec, double u, double v, double theta);
// C-volume of [u1, u2] x [v1, v2].
double copula_rect_mass(const CopulaSpec& spec, double u1, double u2, double v1, double v2,
                        double theta);
// wrt = 1: dC/du (conditional CDF of V given U = u); wrt = 2: dC/dv.
double copula_hfun(const CopulaSpec& spec, double u, double v, double theta, int wrt);
double copula_density(const CopulaSpec& spec, double u, double v, double theta);
// dC/dtheta at fixed (u, v).
double copula_dtheta(const CopulaSpec& spec, double u, double v, double theta);
// Inverse of the wrt = 1 h-function: v such that dC/du(u, v) = w.
double copula_hinv(const CopulaSpec& spec, double u, double w, double theta);

double kendall_tau(const CopulaSpec& spec, double theta);

// n draws (u, v) by conditional inversion; column 0 holds u, column 1 v.
Eigen::MatrixX2d copula_sample(const CopulaSpec& spec, double theta, Eigen::Index n,
                               std::uint64_t seed);
std::pair<double, double> copula_draw(const CopulaSpec& spec, double theta, Rng& rng);

}  // namespace copboost
