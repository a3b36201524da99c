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

#include <cmath>
#include <functional>
#include <numbers>

namespace copboost::special {

inline constexpr double kInvSqrt2Pi = 0.39894228040143267794;

inline double norm_pdf(double x) { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

inline double norm_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

// Inverse standard normal CDF. Rational start (Acklam) polished by one Halley
// step against erfc; relative accuracy near machine precision on (0,1).
double norm_quantile(double p);

// P(X <= x, Y <= y) for a standard bivariate normal with correlation rho.
// Drezner-Wesolowsky/Genz Gauss-Legendre scheme; absolute error ~1e-15.
double bvn_cdf(double x, double y, double rho);

double bvn_pdf(double x, double y, double rho);

// Double-exponential (tanh-sinh) quadrature on [a, b]. Levels are refined
// until successive estimates agree to rel_tol; tolerates integrable endpoint
// singularities.
double integrate(const std::function<double(double)>& f, double a, double b,
                 double rel_tol = 1e-12);

// Bisection-safeguarded Newton for an increasing function f on [lo, hi] with
// derivative df. Returns x with f(x) ~ target to within x_tol in x.
double solve_increasing(const std::function<double(double)>& f,
                        const std::function<double(double)>& df, double target,
                        double lo, double hi, double x_tol = 1e-12);

// log(1 - exp(-a)) for a > 0.
inline double log1mexp(double a) {
  return a < std::numbers::ln2 ? std::log(-std::expm1(-a))
                               : std::log1p(-std::exp(-a));
}

// Digamma for x > 0.
double digamma(double x);

}  // namespace copboost::special
