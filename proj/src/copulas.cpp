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

#include "copboost/copulas.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "copboost/error.hpp"
#include "copboost/special.hpp"

namespace copboost {

namespace {

constexpr double kClip = 1e-12;
constexpr double kFrankIndependence = 1e-8;
constexpr double kRhoMax = 1.0 - 1e-12;

double clip(double x) { return std::clamp(x, kClip, 1.0 - kClip); }

// log(e^a + e^b - 1) for a, b >= 0.
double log_clayton_sum(double a, double b) {
  const double m = std::max(a, b);
  if (m < 1.0) return std::log1p(std::expm1(a) + std::expm1(b));
  return m + std::log(std::exp(a - m) + std::exp(b - m) - std::exp(-m));
}

// Gumbel: log T and log A with T = x^th + y^th, A = T^(1/th).
struct GumbelTerms {
  double log_t;
  double a;
  double log_a;
};

GumbelTerms gumbel_terms(double x, double y, double th) {
  const double m = std::max(x, y);
  const double log_t =
      th * std::log(m) + std::log(std::pow(x / m, th) + std::pow(y / m, th));
  const double log_a = log_t / th;
  return {log_t, std::exp(log_a), log_a};
}

// Joe: S = x + y - xy with x = ubar^th, y = vbar^th, so 1 - S = (1-x)(1-y).
// Near (1,1) S is tiny and is summed directly instead of via 1 - (1-S).
struct JoeTerms {
  double one_minus_x;
  double one_minus_y;
  double s;
  double log_s;
};

JoeTerms joe_terms(double u, double v, double th) {
  const double lx = th * std::log1p(-u), ly = th * std::log1p(-v);
  const double omx = -std::expm1(lx);
  const double omy = -std::expm1(ly);
  const double oms = omx * omy;
  if (oms < 0.5) return {omx, omy, 1.0 - oms, std::log1p(-oms)};
  const double x = std::exp(lx), y = std::exp(ly);
  const double s = x + y - x * y;
  return {omx, omy, s, std::log(s)};
}

// ---- base (unrotated, positive-parameter) copulas -------------------------

double base_cdf(CopulaFamily f, double u, double v, double th) {
  switch (f) {
    case CopulaFamily::gauss:
      if (th >= 1.0) return std::min(u, v);
      if (th <= -1.0) return std::max(u + v - 1.0, 0.0);
      return special::bvn_cdf(special::norm_quantile(u), special::norm_quantile(v), th);
    case CopulaFamily::clayton: {
      const double ls = log_clayton_sum(-th * std::log(u), -th * std::log(v));
      return std::exp(-ls / th);
    }
    case CopulaFamily::gumbel: {
      const GumbelTerms g = gumbel_terms(-std::log(u), -std::log(v), th);
      return std::exp(-g.a);
    }
    case CopulaFamily::frank: {
      if (std::abs(th) < kFrankIndependence) return u * v;
      const double a = std::expm1(-th * u);
      const double b = std::expm1(-th * v);
      const double c = std::expm1(-th);
      return -std::log1p(a * b / c) / th;
    }
    case CopulaFamily::amh: return u * v / (1.0 - th * (1.0 - u) * (1.0 - v));
    case CopulaFamily::fgm: return u * v * (1.0 + th * (1.0 - u) * (1.0 - v));
    case CopulaFamily::joe: {
      const JoeTerms j = joe_terms(u, v, th);
      return -std::expm1(j.log_s / th);
    }
  }
  return 0.0;
}

// dC/du of the base copula; by exchangeability dC/dv(u, v) = h1(v, u).
double base_h1(CopulaFamily f, double u, double v, double th) {
  switch (f) {
    case CopulaFamily::gauss: {
      const double rho = std::clamp(th, -kRhoMax, kRhoMax);
      const double x = special::norm_quantile(u);
      const double y = special::norm_quantile(v);
      return special::norm_cdf((y - rho * x) / std::sqrt(1.0 - rho * rho));
    }
    case CopulaFamily::clayton: {
      const double lu = std::log(u);
      const double ls = log_clayton_sum(-th * lu, -th * std::log(v));
      return std::exp(-(th + 1.0) * lu - (1.0 / th + 1.0) * ls);
    }
    case CopulaFamily::gumbel: {
      const double x = -std::log(u);
      const double y = -std::log(v);
      const GumbelTerms g = gumbel_terms(x, y, th);
      return std::exp(-g.a + (1.0 - th) * g.log_a + (th - 1.0) * std::log(x) + x);
    }
    case CopulaFamily::frank: {
      if (std::abs(th) < kFrankIndependence) return v;
      const double a = std::expm1(-th * u);
      const double b = std::expm1(-th * v);
      const double c = std::expm1(-th);
      return std::exp(-th * u) * b / (c + a * b);
    }
    case CopulaFamily::amh: {
      const double d = 1.0 - th * (1.0 - u) * (1.0 - v);
      return v * (1.0 - th * (1.0 - v)) / (d * d);
    }
    case CopulaFamily::fgm: return v * (1.0 + th * (1.0 - v) * (1.0 - 2.0 * u));
    case CopulaFamily::joe: {
      const JoeTerms j = joe_terms(u, v, th);
      return std::exp((1.0 / th - 1.0) * j.log_s + (th - 1.0) * std::log1p(-u)) * j.one_minus_y;
    }
  }
  return 0.0;
}

double base_density(CopulaFamily f, double u, double v, double th) {
  switch (f) {
    case CopulaFamily::gauss: {
      const double rho = std::clamp(th, -kRhoMax, kRhoMax);
      const double x = special::norm_quantile(u);
      const double y = special::norm_quantile(v);
      const double om = 1.0 - rho * rho;
      return std::exp(-(rho * rho * (x * x + y * y) - 2.0 * rho * x * y) / (2.0 * om)) /
             std::sqrt(om);
    }
    case CopulaFamily::clayton: {
      const double lu = std::log(u);
      const double lv = std::log(v);
      const double ls = log_clayton_sum(-th * lu, -th * lv);
      return std::exp(std::log1p(th) - (th + 1.0) * (lu + lv) - (1.0 / th + 2.0) * ls);
    }
    case CopulaFamily::gumbel: {
      const double x = -std::log(u);
      const double y = -std::log(v);
      const GumbelTerms g = gumbel_terms(x, y, th);
      return std::exp(-g.a + x + y + (th - 1.0) * (std::log(x) + std::log(y)) +
                      (1.0 - 2.0 * th) * g.log_a + std::log(g.a + th - 1.0));
    }
    case CopulaFamily::frank: {
      if (std::abs(th) < kFrankIndependence) return 1.0;
      const double a = std::expm1(-th * u);
      const double b = std::expm1(-th * v);
      const double c = std::expm1(-th);
      const double den = c + a * b;
      return -th * c * std::exp(-th * (u + v)) / (den * den);
    }
    case CopulaFamily::amh: {
      const double ub = 1.0 - u;
      const double d = 1.0 - th * ub * (1.0 - v);
      const double n = v * (1.0 - th * (1.0 - v));
      const double dn = 1.0 - th * (1.0 - 2.0 * v);
      return (dn * d - 2.0 * n * th * ub) / (d * d * d);
    }
    case CopulaFamily::fgm: return 1.0 + th * (1.0 - 2.0 * u) * (1.0 - 2.0 * v);
    case CopulaFamily::joe: {
      const JoeTerms j = joe_terms(u, v, th);
      return std::exp((1.0 / th - 2.0) * j.log_s +
                      (th - 1.0) * (std::log1p(-u) + std::log1p(-v))) *
             (th - 1.0 + j.s);
    }
  }
  return 0.0;
}

double base_dtheta(CopulaFamily f, double u, double v, double th) {
  switch (f) {
    case CopulaFamily::gauss: {
      const double rho = std::clamp(th, -kRhoMax, kRhoMax);
      return special::bvn_pdf(special::norm_quantile(u), special::norm_quantile(v), rho);
    }
    case CopulaFamily::clayton: {
      const double a = -th * std::log(u);
      const double b = -th * std::log(v);
      const double ls = log_clayton_sum(a, b);
      const double m = std::max(a, b);
      const double s_scaled = std::exp(a - m) + std::exp(b - m) - std::exp(-m);
      const double ds_over_s = (a * std::exp(a - m) + b * std::exp(b - m)) / (th * s_scaled);
      return std::exp(-ls / th) * (ls / (th * th) - ds_over_s / th);
    }
    case CopulaFamily::gumbel: {
      const double x = -std::log(u);
      const double y = -std::log(v);
      const GumbelTerms g = gumbel_terms(x, y, th);
      const double m = std::max(x, y);
      const double wx = std::pow(x / m, th);
      const double wy = std::pow(y / m, th);
      const double weighted_log = (wx * std::log(x) + wy * std::log(y)) / (wx + wy);
      const double dlog_a = -g.log_t / (th * th) + weighted_log / th;
      return -std::exp(-g.a) * g.a * dlog_a;
    }
    case CopulaFamily::frank: {
      if (std::abs(th) < 1e-2) {
        const double h = 1e-4;
        return (base_cdf(f, u, v, th + h) - base_cdf(f, u, v, th - h)) / (2.0 * h);
      }
      const double a = std::expm1(-th * u);
      const double b = std::expm1(-th * v);
      const double c = std::expm1(-th);
      const double da = -u * std::exp(-th * u);
      const double db = -v * std::exp(-th * v);
      const double dc = -std::exp(-th);
      const double l = std::log1p(a * b / c);
      const double dl = ((da * b + a * db) * c - a * b * dc) / (c * (c + a * b));
      return l / (th * th) - dl / th;
    }
    case CopulaFamily::amh: {
      const double d = 1.0 - th * (1.0 - u) * (1.0 - v);
      return u * v * (1.0 - u) * (1.0 - v) / (d * d);
    }
    case CopulaFamily::fgm: return u * v * (1.0 - u) * (1.0 - v);
    case CopulaFamily::joe: {
      const double lub = std::log1p(-u);
      const double lvb = std::log1p(-v);
      const double x = std::exp(th * lub);
      const double y = std::exp(th * lvb);
      const JoeTerms j = joe_terms(u, v, th);
      const double ds = x * lub * j.one_minus_y + y * lvb * j.one_minus_x;
      const double p = std::exp(j.log_s / th);
      return -p * (-j.log_s / (th * th) + ds / (th * j.s));
    }
  }
  return 0.0;
}

// Solves base_h1(u, v) = w for v.
double base_hinv(CopulaFamily f, double u, double w, double th) {
  switch (f) {
    case CopulaFamily::gauss: {
      const double rho = std::clamp(th, -kRhoMax, kRhoMax);
      const double x = special::norm_quantile(u);
      return special::norm_cdf(rho * x + std::sqrt(1.0 - rho * rho) * special::norm_quantile(w));
    }
    case CopulaFamily::clayton: {
      const double a = -th * std::log(u);
      const double c = -th / (th + 1.0) * std::log(w);
      const double t = a + std::log(std::expm1(c));
      const double l = t > 0.0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t));
      return std::exp(-l / th);
    }
    case CopulaFamily::frank: {
      if (std::abs(th) < kFrankIndependence) return w;
      const double c = std::expm1(-th);
      const double b = w * c / (w + (1.0 - w) * std::exp(-th * u));
      return -std::log1p(b) / th;
    }
    case CopulaFamily::fgm: {
      const double a = th * (1.0 - 2.0 * u);
      return 2.0 * w / ((1.0 + a) + std::sqrt((1.0 + a) * (1.0 + a) - 4.0 * a * w));
    }
    default: break;
  }
  return special::solve_increasing(
      [&](double v) { return base_h1(f, u, clip(v), th); },
      [&](double v) { return base_density(f, u, clip(v), th); }, w, 0.0, 1.0, 1e-13);
}

double joe_tau(double th) {
  if (th == 1.0) return 0.0;
  const double d = 2.0 - th;
  if (std::abs(d) < 1e-6) {
    // Second-order expansion about 2, where the closed form is 0/0.
    constexpr double trigamma2 = std::numbers::pi * std::numbers::pi / 6.0 - 1.0;
    constexpr double tetragamma2 = 2.0 - 2.0 * 1.2020569031595942854;
    return 1.0 - 2.0 * trigamma2 / th - tetragamma2 * d / (th * th);
  }
  return 1.0 + 2.0 / d * (special::digamma(2.0) - special::digamma(2.0 / th + 1.0));
}

double frank_tau(double th) {
  if (std::abs(th) < 1e-4) return th / 9.0 - th * th * th / 900.0;
  const double lo = std::min(0.0, th);
  const double hi = std::max(0.0, th);
  const double integral = special::integrate(
      [](double t) { return t == 0.0 ? 1.0 : t / std::expm1(t); }, lo, hi, 1e-14);
  const double d1 = (th > 0.0 ? integral : -integral) / th;
  return 1.0 - 4.0 / th * (1.0 - d1);
}

double amh_tau(double th) {
  if (std::abs(th) < 1e-3) {
    const double t2 = th * th;
    return 2.0 * th / 9.0 + t2 / 18.0 + t2 * th / 45.0 + t2 * t2 / 90.0 + 2.0 * t2 * t2 * th / 315.0;
  }
  if (th >= 1.0) return 1.0 / 3.0;
  return 1.0 - 2.0 * (th + (1.0 - th) * (1.0 - th) * std::log1p(-th)) / (3.0 * th * th);
}

double base_tau(CopulaFamily f, double th) {
  switch (f) {
    case CopulaFamily::gauss: return 2.0 / std::numbers::pi * std::asin(th);
    case CopulaFamily::clayton: return th / (th + 2.0);
    case CopulaFamily::gumbel: return 1.0 - 1.0 / th;
    case CopulaFamily::frank: return frank_tau(th);
    case CopulaFamily::amh: return amh_tau(th);
    case CopulaFamily::fgm: return 2.0 * th / 9.0;
    case CopulaFamily::joe: return joe_tau(th);
  }
  return 0.0;
}

double base_theta(const CopulaSpec& spec, double theta) { return spec.negated() ? -theta : theta; }

}  // namespace

CopulaSpec CopulaSpec::make(CopulaFamily family, int rotation) {
  if (rotation != 0 && rotation != 90 && rotation != 180 && rotation != 270) {
    throw ConfigError("copula rotation must be 0, 90, 180 or 270");
  }
  return CopulaSpec{family, rotation};
}

bool CopulaSpec::negated() const {
  const bool one_sided = family == CopulaFamily::clayton || family == CopulaFamily::gumbel ||
                         family == CopulaFamily::joe;
  return one_sided && (rotation == 90 || rotation == 270);
}

bool CopulaSpec::has_independence_point() const {
  return family == CopulaFamily::gauss || family == CopulaFamily::fgm ||
         family == CopulaFamily::amh || family == CopulaFamily::frank;
}

std::string CopulaSpec::name() const {
  std::string out(copula_family_name(family));
  if (rotation != 0) out += "-" + std::to_string(rotation);
  return out;
}

CopulaFamily parse_copula_family(std::string_view name) {
  if (name == "gauss") return CopulaFamily::gauss;
  if (name == "clayton") return CopulaFamily::clayton;
  if (name == "gumbel") return CopulaFamily::gumbel;
  if (name == "frank") return CopulaFamily::frank;
  if (name == "amh") return CopulaFamily::amh;
  if (name == "fgm") return CopulaFamily::fgm;
  if (name == "joe") return CopulaFamily::joe;
  throw ConfigError("unknown copula family '" + std::string(name) + "'");
}

std::string_view copula_family_name(CopulaFamily family) {
  switch (family) {
    case CopulaFamily::gauss: return "gauss";
    case CopulaFamily::clayton: return "clayton";
    case CopulaFamily::gumbel: return "gumbel";
    case CopulaFamily::frank: return "frank";
    case CopulaFamily::amh: return "amh";
    case CopulaFamily::fgm: return "fgm";
    case CopulaFamily::joe: return "joe";
  }
  return "?";
}

void validate_theta(const CopulaSpec& spec, double theta) {
  const double th = base_theta(spec, theta);
  bool ok = std::isfinite(th);
  switch (spec.family) {
    case CopulaFamily::gauss:
    case CopulaFamily::amh:
    case CopulaFamily::fgm: ok = ok && th >= -1.0 && th <= 1.0; break;
    case CopulaFamily::clayton: ok = ok && th > 0.0; break;
    case CopulaFamily::gumbel:
    case CopulaFamily::joe: ok = ok && th >= 1.0; break;
    case CopulaFamily::frank: break;
  }
  if (!ok) {
    throw DomainError(spec.name() + " parameter " + std::to_string(theta) + " out of range");
  }
}

double theta_response(const CopulaSpec& spec, double eta) {
  const double sign = spec.negated() ? -1.0 : 1.0;
  switch (spec.family) {
    case CopulaFamily::gauss:
    case CopulaFamily::amh:
    case CopulaFamily::fgm: return std::tanh(eta);
    case CopulaFamily::clayton: return sign * std::exp(eta);
    case CopulaFamily::gumbel:
    case CopulaFamily::joe: return sign * (1.0 + std::exp(eta));
    case CopulaFamily::frank: return eta;
  }
  return 0.0;
}

double theta_link(const CopulaSpec& spec, double theta) {
  const double th = base_theta(spec, theta);
  switch (spec.family) {
    case CopulaFamily::gauss:
    case CopulaFamily::amh:
    case CopulaFamily::fgm: return std::atanh(th);
    case CopulaFamily::clayton: return std::log(th);
    case CopulaFamily::gumbel:
    case CopulaFamily::joe: return std::log(th - 1.0);
    case CopulaFamily::frank: return th;
  }
  return 0.0;
}

double theta_response_derivative(const CopulaSpec& spec, double eta) {
  const double sign = spec.negated() ? -1.0 : 1.0;
  switch (spec.family) {
    case CopulaFamily::gauss:
    case CopulaFamily::amh:
    case CopulaFamily::fgm: {
      const double t = std::tanh(eta);
      return 1.0 - t * t;
    }
    case CopulaFamily::clayton:
    case CopulaFamily::gumbel:
    case CopulaFamily::joe: return sign * std::exp(eta);
    case CopulaFamily::frank: return 1.0;
  }
  return 0.0;
}

double copula_cdf(const CopulaSpec& spec, double u, double v, double theta) {
  validate_theta(spec, theta);
  if (!(u >= 0.0 && u <= 1.0 && v >= 0.0 && v <= 1.0)) {
    throw DomainError("copula arguments must lie in [0,1]");
  }
  if (u == 0.0 || v == 0.0) return 0.0;
  if (u == 1.0) return v;
  if (v == 1.0) return u;
  const double th = base_theta(spec, theta);
  const CopulaFamily f = spec.family;
  double c = 0.0;
  switch (spec.rotation) {
    case 0: c = base_cdf(f, u, v, th); break;
    case 90: c = v - base_cdf(f, 1.0 - u, v, th); break;
    case 180: c = u + v - 1.0 + base_cdf(f, 1.0 - u, 1.0 - v, th); break;
    case 270: c = u - base_cdf(f, u, 1.0 - v, th); break;
  }
  return std::clamp(c, std::max(u + v - 1.0, 0.0), std::min(u, v));
}

double copula_rect_mass(const CopulaSpec& spec, double u1, double u2, double v1, double v2,
                        double theta) {
  validate_theta(spec, theta);
  if (!(0.0 <= u1 && u1 <= u2 && u2 <= 1.0 && 0.0 <= v1 && v1 <= v2 && v2 <= 1.0)) {
    throw DomainError("copula rectangle must be ordered and inside [0,1]^2");
  }
  // Reflect the rectangle into the unrotated copula instead of differencing
  // rotated CDFs: their linear terms cancel and cost digits on small masses.
  auto reflect = [](double& lo, double& hi) {
    const double t = 1.0 - hi;
    hi = 1.0 - lo;
    lo = t;
  };
  if (spec.rotation == 90 || spec.rotation == 180) reflect(u1, u2);
  if (spec.rotation == 180 || spec.rotation == 270) reflect(v1, v2);
  // Radially symmetric families have the same volume on the point-reflected
  // rectangle; use whichever sits nearer the origin, where C is small.
  const bool symmetric = spec.family == CopulaFamily::gauss ||
                         spec.family == CopulaFamily::frank || spec.family == CopulaFamily::fgm;
  if (symmetric && u1 + u2 + v1 + v2 > 2.0) {
    reflect(u1, u2);
    reflect(v1, v2);
  }
  const double th = base_theta(spec, theta);
  auto C = [&](double u, double v) {
    if (u <= 0.0 || v <= 0.0) return 0.0;
    if (u >= 1.0) return v;
    if (v >= 1.0) return u;
    return base_cdf(spec.family, u, v, th);
  };
  return C(u2, v2) - C(u1, v2) - C(u2, v1) + C(u1, v1);
}

double copula_hfun(const CopulaSpec& spec, double u, double v, double theta, int wrt) {
  validate_theta(spec, theta);
  if (wrt != 1 && wrt != 2) throw ConfigError("h-function wrt must be 1 or 2");
  // The conditioning argument is the one differentiated; the other is the
  // evaluation point of the conditional CDF.
  const double other = wrt == 1 ? v : u;
  if (other <= 0.0) return 0.0;
  if (other >= 1.0) return 1.0;
  u = clip(u);
  v = clip(v);
  const double th = base_theta(spec, theta);
  const CopulaFamily f = spec.family;
  double h = 0.0;
  if (wrt == 1) {
    switch (spec.rotation) {
      case 0: h = base_h1(f, u, v, th); break;
      case 90: h = base_h1(f, 1.0 - u, v, th); break;
      case 180: h = 1.0 - base_h1(f, 1.0 - u, 1.0 - v, th); break;
      case 270: h = 1.0 - base_h1(f, u, 1.0 - v, th); break;
    }
  } else {
    switch (spec.rotation) {
      case 0: h = base_h1(f, v, u, th); break;
      case 90: h = 1.0 - base_h1(f, v, 1.0 - u, th); break;
      case 180: h = 1.0 - base_h1(f, 1.0 - v, 1.0 - u, th); break;
      case 270: h = base_h1(f, 1.0 - v, u, th); break;
    }
  }
  return std::clamp(h, 0.0, 1.0);
}

double copula_density(const CopulaSpec& spec, double u, double v, double theta) {
  validate_theta(spec, theta);
  u = clip(u);
  v = clip(v);
  const double th = base_theta(spec, theta);
  switch (spec.rotation) {
    case 90: return base_density(spec.family, 1.0 - u, v, th);
    case 180: return base_density(spec.family, 1.0 - u, 1.0 - v, th);
    case 270: return base_density(spec.family, u, 1.0 - v, th);
    default: return base_density(spec.family, u, v, th);
  }
}

double copula_dtheta(const CopulaSpec& spec, double u, double v, double theta) {
  validate_theta(spec, theta);
  if (u <= 0.0 || v <= 0.0 || u >= 1.0 || v >= 1.0) return 0.0;
  const double th = base_theta(spec, theta);
  const double sign = spec.negated() ? -1.0 : 1.0;
  const CopulaFamily f = spec.family;
  switch (spec.rotation) {
    case 90: return -sign * base_dtheta(f, 1.0 - u, v, th);
    case 180: return sign * base_dtheta(f, 1.0 - u, 1.0 - v, th);
    case 270: return -sign * base_dtheta(f, u, 1.0 - v, th);
    default: return sign * base_dtheta(f, u, v, th);
  }
}

double copula_hinv(const CopulaSpec& spec, double u, double w, double theta) {
  validate_theta(spec, theta);
  const double th = base_theta(spec, theta);
  const CopulaFamily f = spec.family;
  u = clip(u);
  w = clip(w);
  double v = 0.0;
  switch (spec.rotation) {
    case 0: v = base_hinv(f, u, w, th); break;
    case 90: v = base_hinv(f, 1.0 - u, w, th); break;
    case 180: v = 1.0 - base_hinv(f, 1.0 - u, 1.0 - w, th); break;
    case 270: v = 1.0 - base_hinv(f, u, 1.0 - w, th); break;
  }
  return std::clamp(v, std::numeric_limits<double>::min(), 1.0 - 0x1.0p-53);
}

double kendall_tau(const CopulaSpec& spec, double theta) {
  validate_theta(spec, theta);
  const double tau = base_tau(spec.family, base_theta(spec, theta));
  return (spec.rotation == 90 || spec.rotation == 270) ? -tau : tau;
}

std::pair<double, double> copula_draw(const CopulaSpec& spec, double theta, Rng& rng) {
  const double u = rng.uniform();
  const double w = rng.uniform();
  return {u, copula_hinv(spec, u, w, theta)};
}

Eigen::MatrixX2d copula_sample(const CopulaSpec& spec, double theta, Eigen::Index n,
                               std::uint64_t seed) {
  if (n < 1) throw ConfigError("copula_sample needs n >= 1");
  validate_theta(spec, theta);
  Rng rng(seed);
  Eigen::MatrixX2d out(n, 2);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto [u, v] = copula_draw(spec, theta, rng);
    out(i, 0) = u;
    out(i, 1) = v;
  }
  return out;
}

}  // namespace copboost
