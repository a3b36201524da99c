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

#include "copboost/special.hpp"

#include <algorithm>
#include <array>
#include <limits>

namespace copboost::special {

double norm_quantile(double p) {
  if (!(p > 0.0)) return -std::numeric_limits<double>::infinity();
  if (!(p < 1.0)) return std::numeric_limits<double>::infinity();
  if (p > 0.5) return -norm_quantile(1.0 - p);

  static constexpr std::array<double, 6> a{-3.969683028665376e+01, 2.209460984245205e+02,
                                           -2.759285104469687e+02, 1.383577518672690e+02,
                                           -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr std::array<double, 5> b{-5.447609879822406e+01, 1.615858368580409e+02,
                                           -1.556989798598866e+02, 6.680131188771972e+01,
                                           -1.328068155288572e+01};
  static constexpr std::array<double, 6> c{-7.784894002430293e-03, -3.223964580411365e-01,
                                           -2.400758277161838e+00, -2.549732539343734e+00,
                                           4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr std::array<double, 4> d{7.784695709041462e-03, 3.224671290700398e-01,
                                           2.445134137142996e+00, 3.754408661907416e+00};
  double x;
  if (p < 0.02425) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  }
  // Two Halley refinements; the residual is computed relative to p.
  for (int it = 0; it < 2; ++it) {
    const double e = 0.5 * std::erfc(-x / std::numbers::sqrt2) - p;
    const double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * x * x);
    x = x - u / (1.0 + 0.5 * x * u);
  }
  return x;
}

namespace {

// Upper bivariate normal probability P(X > dh, Y > dk).
double bvnu(double dh, double dk, double r) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  if (dh == inf || dk == inf) return 0.0;
  if (dh == -inf) return dk == -inf ? 1.0 : norm_cdf(-dk);
  if (dk == -inf) return norm_cdf(-dh);
  if (r == 0.0) return norm_cdf(-dh) * norm_cdf(-dk);

  static constexpr std::array<double, 3> w6{0.1713244923791705, 0.3607615730481384,
                                            0.4679139345726904};
  static constexpr std::array<double, 3> x6{0.9324695142031522, 0.6612093864662647,
                                            0.2386191860831970};
  static constexpr std::array<double, 6> w12{0.04717533638651177, 0.1069393259953183,
                                             0.1600783285433464,  0.2031674267230659,
                                             0.2334925365383547,  0.2491470458134029};
  static constexpr std::array<double, 6> x12{0.9815606342467191, 0.9041172563704750,
                                             0.7699026741943050, 0.5873179542866171,
                                             0.3678314989981802, 0.1252334085114692};
  static constexpr std::array<double, 10> w20{
      0.01761400713915212, 0.04060142980038694, 0.06267204833410906, 0.08327674157670475,
      0.1019301198172404,  0.1181945319615184,  0.1316886384491766,  0.1420961093183821,
      0.1491729864726037,  0.1527533871307259};
  static constexpr std::array<double, 10> x20{
      0.9931285991850949, 0.9639719272779138, 0.9122344282513259, 0.8391169718222188,
      0.7463319064601508, 0.6360536807265150, 0.5108670019508271, 0.3737060887154196,
      0.2277858511416451, 0.07652652113349733};

  const double* w;
  const double* xg;
  int ng;
  const double ar = std::abs(r);
  if (ar < 0.3) {
    w = w6.data(); xg = x6.data(); ng = 3;
  } else if (ar < 0.75) {
    w = w12.data(); xg = x12.data(); ng = 6;
  } else {
    w = w20.data(); xg = x20.data(); ng = 10;
  }

  constexpr double tp = 2.0 * std::numbers::pi;
  double h = dh;
  double k = dk;
  double hk = h * k;
  double bvn = 0.0;
  if (ar < 0.925) {
    const double hs = (h * h + k * k) / 2.0;
    const double asr = std::asin(r) / 2.0;
    for (int i = 0; i < ng; ++i) {
      for (const double sgn : {-1.0, 1.0}) {
        const double sn = std::sin(asr * (1.0 + sgn * xg[i]));
        bvn += w[i] * std::exp((sn * hk - hs) / (1.0 - sn * sn));
      }
    }
    return std::clamp(bvn * asr / tp + norm_cdf(-h) * norm_cdf(-k), 0.0, 1.0);
  }
  if (r < 0.0) {
    k = -k;
    hk = -hk;
  }
  if (ar < 1.0) {
    const double as = 1.0 - r * r;
    double a = std::sqrt(as);
    const double bs = (h - k) * (h - k);
    const double c = (4.0 - hk) / 8.0;
    const double d = (12.0 - hk) / 80.0;
    double asr = -(bs / as + hk) / 2.0;
    if (asr > -100.0) {
      bvn = a * std::exp(asr) * (1.0 - c * (bs - as) * (1.0 - d * bs) / 3.0 + c * d * as * as);
    }
    if (hk > -100.0) {
      const double b = std::sqrt(bs);
      const double sp = std::sqrt(tp) * norm_cdf(-b / a);
      bvn -= std::exp(-hk / 2.0) * sp * b * (1.0 - c * bs * (1.0 - d * bs) / 3.0);
    }
    a /= 2.0;
    double acc = 0.0;
    for (int i = 0; i < ng; ++i) {
      for (const double sgn : {-1.0, 1.0}) {
        const double xi = a * (1.0 + sgn * xg[i]);
        const double xs = xi * xi;
        asr = -(bs / xs + hk) / 2.0;
        if (asr > -100.0) {
          const double sp = 1.0 + c * xs * (1.0 + 5.0 * d * xs);
          const double rs = std::sqrt(1.0 - xs);
          const double ep = std::exp(-(hk / 2.0) * xs / ((1.0 + rs) * (1.0 + rs))) / rs;
          acc += w[i] * std::exp(asr) * (sp - ep);
        }
      }
    }
    bvn = (a * acc - bvn) / tp;
  }
  if (r > 0.0) {
    bvn += norm_cdf(-std::max(h, k));
  } else if (h >= k) {
    bvn = -bvn;
  } else {
    const double l = h < 0.0 ? norm_cdf(k) - norm_cdf(h) : norm_cdf(-h) - norm_cdf(-k);
    bvn = l - bvn;
  }
  return std::clamp(bvn, 0.0, 1.0);
}

}  // namespace

double bvn_cdf(double x, double y, double rho) { return bvnu(-x, -y, rho); }

double bvn_pdf(double x, double y, double rho) {
  const double om = 1.0 - rho * rho;
  return std::exp(-(x * x - 2.0 * rho * x * y + y * y) / (2.0 * om)) /
         (2.0 * std::numbers::pi * std::sqrt(om));
}

double integrate(const std::function<double(double)>& f, double a, double b, double rel_tol) {
  if (a == b) return 0.0;
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  constexpr double pi2 = std::numbers::pi / 2.0;

  // Abscissae are generated in terms of the distance to the nearest endpoint
  // so that f is never evaluated exactly at a or b.
  auto node_sum = [&](double t) {
    const double s = pi2 * std::sinh(t);
    const double cs = std::cosh(s);
    const double w = pi2 * std::cosh(t) / (cs * cs);
    const double dist = half / (std::exp(s) * cs);  // half * (1 - tanh(s))
    double total = 0.0;
    if (dist > 0.0) {
      const double xr = b - dist;
      const double xl = a + dist;
      if (xr > a && xr < b) total += f(xr);
      if (xl > a && xl < b) total += f(xl);
    }
    return w * total;
  };

  constexpr double t_max = 6.5;
  double h = 0.5;
  double sum = pi2 * f(mid);
  for (double t = h; t <= t_max; t += h) sum += node_sum(t);
  double estimate = half * h * sum;
  for (int level = 1; level <= 12; ++level) {
    h /= 2.0;
    for (double t = h; t <= t_max; t += 2.0 * h) sum += node_sum(t);
    const double next = half * h * sum;
    if (level >= 3 && std::abs(next - estimate) <= rel_tol * std::abs(next)) return next;
    estimate = next;
  }
  return estimate;
}

double solve_increasing(const std::function<double(double)>& f,
                        const std::function<double(double)>& df, double target, double lo,
                        double hi, double x_tol) {
  double x = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    const double fx = f(x) - target;
    if (fx == 0.0) return x;
    if (fx > 0.0) hi = x; else lo = x;
    const double slope = df ? df(x) : 0.0;
    double next = slope > 0.0 && std::isfinite(slope) ? x - fx / slope : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - x) < x_tol || hi - lo < x_tol) return next;
    x = next;
  }
  return x;
}

double digamma(double x) {
  double shift = 0.0;
  while (x < 12.0) {
    shift -= 1.0 / x;
    x += 1.0;
  }
  const double r = 1.0 / (x * x);
  const double series =
      r * (1.0 / 12 -
           r * (1.0 / 120 -
                r * (1.0 / 252 - r * (1.0 / 240 - r * (1.0 / 132 - r * (691.0 / 32760 - r / 12))))));
  return shift + std::log(x) - 0.5 / x - series;
}

}  // namespace copboost::special
