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

#include "copboost/margins.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <vector>

#include "copboost/error.hpp"
#include "copboost/special.hpp"

namespace copboost {

namespace {

constexpr double kQuantileCap = 1e7;
constexpr double kClampProb = 1e-6;
constexpr double kClampScale = 1e-6;

// log NB(0) = -log(1 + sigma mu) / sigma.
double nb_log_p0(double mu, double sigma) { return -std::log1p(sigma * mu) / sigma; }

// Mass recurrence for count families: f(0), f(1) and f(k+1)/f(k) for k >= 1.
struct CountRecurrence {
  double f0 = 0.0;
  double f1 = 0.0;
  Family family;
  double mu = 0.0;
  double sigma = 0.0;
  double r = 0.0;  // negbin success ratio

  CountRecurrence(Family fam, const ParamVector& p) : family(fam) {
    mu = p(0);
    switch (fam) {
      case Family::poisson:
        f0 = std::exp(-mu);
        f1 = f0 * mu;
        break;
      case Family::geometric:
        f0 = 1.0 / (1.0 + mu);
        f1 = f0 * mu / (1.0 + mu);
        break;
      case Family::negbin1: {
        sigma = p(1);
        r = sigma * mu / (1.0 + sigma * mu);
        f0 = std::exp(nb_log_p0(mu, sigma));
        f1 = f0 * r / sigma;
        break;
      }
      case Family::zalg: {
        sigma = p(1);
        const double alpha = -1.0 / std::log1p(-mu);
        f0 = sigma;
        f1 = (1.0 - sigma) * alpha * mu;
        break;
      }
      case Family::zip: {
        sigma = p(1);
        const double em = std::exp(-mu);
        f0 = sigma + (1.0 - sigma) * em;
        f1 = (1.0 - sigma) * em * mu;
        break;
      }
      case Family::zanbi:
      case Family::zinbi: {
        sigma = p(1);
        const double nu = p(2);
        r = sigma * mu / (1.0 + sigma * mu);
        const double lp0 = nb_log_p0(mu, sigma);
        const double p0 = std::exp(lp0);
        const double nb1 = p0 * r / sigma;
        if (fam == Family::zanbi) {
          f0 = nu;
          f1 = (1.0 - nu) * nb1 / (-std::expm1(lp0));
        } else {
          f0 = nu + (1.0 - nu) * p0;
          f1 = (1.0 - nu) * nb1;
        }
        break;
      }
      default:
        break;
    }
  }

  // f(k+1) / f(k), k >= 1.
  double ratio(double k) const {
    switch (family) {
      case Family::poisson:
      case Family::zip: return mu / (k + 1.0);
      case Family::geometric: return mu / (1.0 + mu);
      case Family::zalg: return mu * k / (k + 1.0);
      default: return (k + 1.0 / sigma) / (k + 1.0) * r;
    }
  }
};

// Visits (k, f(k), F(k)) for k = 0, 1, ... until visit returns false or the
// remaining tail is negligible. Returns the last (k, f, F) visited.
struct ScanState {
  double k = 0.0;
  double pmf = 0.0;
  double cdf = 0.0;
  bool tail_exhausted = false;
};

template <typename Visit>
ScanState count_scan(const CountRecurrence& rec, Visit&& visit) {
  ScanState s{0.0, rec.f0, rec.f0, false};
  if (!visit(s)) return s;
  s.k = 1.0;
  s.pmf = rec.f1;
  s.cdf += rec.f1;
  while (visit(s)) {
    const double ratio = rec.ratio(s.k);
    if (ratio < 1.0 && s.pmf < 1e-18 * s.cdf && s.k > 1.0) {
      s.tail_exhausted = true;
      return s;
    }
    s.pmf *= ratio;
    s.cdf += s.pmf;
    s.k += 1.0;
    if (s.k > kQuantileCap) throw NumericError("count scan exceeded 1e7 support points");
  }
  return s;
}

double count_log_pmf(Family fam, double y, const ParamVector& p) {
  const double mu = p(0);
  auto nb_log = [&](double sigma) {
    const double inv = 1.0 / sigma;
    return std::lgamma(y + inv) - std::lgamma(inv) - std::lgamma(y + 1.0) +
           y * std::log(sigma * mu / (1.0 + sigma * mu)) + nb_log_p0(mu, sigma);
  };
  switch (fam) {
    case Family::poisson: return y * std::log(mu) - mu - std::lgamma(y + 1.0);
    case Family::geometric: return y * std::log(mu) - (y + 1.0) * std::log1p(mu);
    case Family::negbin1: return nb_log(p(1));
    case Family::zalg: {
      if (y == 0.0) return std::log(p(1));
      const double alpha = -1.0 / std::log1p(-mu);
      return std::log1p(-p(1)) + std::log(alpha) + y * std::log(mu) - std::log(y);
    }
    case Family::zip:
      if (y == 0.0) return std::log(p(1) + (1.0 - p(1)) * std::exp(-mu));
      return std::log1p(-p(1)) + y * std::log(mu) - mu - std::lgamma(y + 1.0);
    case Family::zanbi:
      if (y == 0.0) return std::log(p(2));
      return std::log1p(-p(2)) + nb_log(p(1)) - special::log1mexp(-nb_log_p0(mu, p(1)));
    case Family::zinbi:
      if (y == 0.0) return std::log(p(2) + (1.0 - p(2)) * std::exp(nb_log_p0(mu, p(1))));
      return std::log1p(-p(2)) + nb_log(p(1));
    default: break;
  }
  return std::numeric_limits<double>::quiet_NaN();
}

bool is_support_point(const MarginFamily& m, double y) {
  switch (m.support()) {
    case Support::binary: return y == 0.0 || y == 1.0;
    case Support::count: return y >= 0.0 && std::floor(y) == y && std::isfinite(y);
    case Support::real: return std::isfinite(y);
  }
  return false;
}

// Brute-force BFGS on a small dimension with central-difference gradients.
template <typename Objective>
ParamVector minimise(Objective&& f, ParamVector x) {
  const int d = static_cast<int>(x.size());
  auto grad = [&](const ParamVector& at) {
    ParamVector g(d);
    for (int j = 0; j < d; ++j) {
      const double h = 1e-6 * std::max(1.0, std::abs(at(j)));
      ParamVector a = at, b = at;
      a(j) += h;
      b(j) -= h;
      g(j) = (f(a) - f(b)) / (2.0 * h);
    }
    return g;
  };
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxMarginParams, kMaxMarginParams>
      hinv = Eigen::MatrixXd::Identity(d, d);
  double fx = f(x);
  ParamVector g = grad(x);
  for (int it = 0; it < 500; ++it) {
    if (g.cwiseAbs().maxCoeff() < 1e-10) break;
    ParamVector dir = -(hinv * g);
    if (dir.dot(g) >= 0.0) {
      hinv.setIdentity();
      dir = -g;
    }
    double step = 1.0;
    ParamVector next = x + dir;
    double fn = f(next);
    while (!(fn <= fx + 1e-4 * step * g.dot(dir)) && step > 1e-14) {
      step *= 0.5;
      next = x + step * dir;
      fn = f(next);
    }
    if (step <= 1e-14) break;
    const ParamVector gn = grad(next);
    const ParamVector s = next - x;
    const ParamVector yv = gn - g;
    const double sy = s.dot(yv);
    if (sy > 1e-300) {
      const double rho = 1.0 / sy;
      const auto eye = Eigen::MatrixXd::Identity(d, d);
      hinv = (eye - rho * s * yv.transpose()) * hinv * (eye - rho * yv * s.transpose()) +
             rho * s * s.transpose();
    }
    const bool converged = std::abs(fx - fn) <= 1e-15 * std::max(1.0, std::abs(fx));
    x = next;
    fx = fn;
    g = gn;
    if (converged && g.cwiseAbs().maxCoeff() < 1e-6) break;
  }
  return x;
}

}  // namespace

MarginFamily MarginFamily::make(Family family, Link bernoulli_link) {
  MarginFamily m;
  m.family = family;
  m.n_params = family_n_params(family);
  switch (family) {
    case Family::bernoulli:
      if (bernoulli_link != Link::logit && bernoulli_link != Link::probit &&
          bernoulli_link != Link::cloglog) {
        throw ConfigError("bernoulli link must be logit, probit or cloglog");
      }
      m.links = {bernoulli_link, bernoulli_link, bernoulli_link};
      break;
    case Family::gaussian: m.links = {Link::identity, Link::log, Link::log}; break;
    case Family::poisson:
    case Family::geometric:
    case Family::negbin1: m.links = {Link::log, Link::log, Link::log}; break;
    case Family::zalg: m.links = {Link::logit, Link::logit, Link::logit}; break;
    case Family::zip: m.links = {Link::log, Link::logit, Link::logit}; break;
    case Family::zanbi:
    case Family::zinbi: m.links = {Link::log, Link::log, Link::logit}; break;
  }
  return m;
}

Support MarginFamily::support() const {
  if (family == Family::bernoulli) return Support::binary;
  if (family == Family::gaussian) return Support::real;
  return Support::count;
}

ParamRange MarginFamily::range(int k) const {
  switch (family) {
    case Family::bernoulli: return ParamRange::unit;
    case Family::gaussian: return k == 0 ? ParamRange::real : ParamRange::positive;
    case Family::zalg: return ParamRange::unit;
    case Family::zip: return k == 0 ? ParamRange::positive : ParamRange::unit;
    case Family::zanbi:
    case Family::zinbi: return k < 2 ? ParamRange::positive : ParamRange::unit;
    default: return ParamRange::positive;
  }
}

std::string_view MarginFamily::param_name(int k) const {
  static constexpr std::array<std::string_view, 3> names{"mu", "sigma", "nu"};
  return names.at(static_cast<std::size_t>(k));
}

Family parse_family(std::string_view name) {
  static const std::map<std::string_view, Family> lookup{
      {"bernoulli", Family::bernoulli}, {"gaussian", Family::gaussian},
      {"poisson", Family::poisson},     {"geometric", Family::geometric},
      {"negbin1", Family::negbin1},     {"zalg", Family::zalg},
      {"zip", Family::zip},             {"zanbi", Family::zanbi},
      {"zinbi", Family::zinbi}};
  const auto it = lookup.find(name);
  if (it == lookup.end()) throw ConfigError("unknown margin family '" + std::string(name) + "'");
  return it->second;
}

std::string_view family_name(Family family) {
  switch (family) {
    case Family::bernoulli: return "bernoulli";
    case Family::gaussian: return "gaussian";
    case Family::poisson: return "poisson";
    case Family::geometric: return "geometric";
    case Family::negbin1: return "negbin1";
    case Family::zalg: return "zalg";
    case Family::zip: return "zip";
    case Family::zanbi: return "zanbi";
    case Family::zinbi: return "zinbi";
  }
  return "?";
}

int family_n_params(Family family) {
  switch (family) {
    case Family::bernoulli:
    case Family::poisson:
    case Family::geometric: return 1;
    case Family::gaussian:
    case Family::negbin1:
    case Family::zalg:
    case Family::zip: return 2;
    case Family::zanbi:
    case Family::zinbi: return 3;
  }
  return 0;
}

ParamVector margin_response(const MarginFamily& margin, std::span<const double> eta) {
  ParamVector p(margin.n_params);
  for (int k = 0; k < margin.n_params; ++k) p(k) = response_apply(margin.links[k], eta[k]);
  return p;
}

void validate_params(const MarginFamily& margin, const ParamVector& params) {
  if (params.size() != margin.n_params) throw DomainError("parameter vector has wrong length");
  for (int k = 0; k < margin.n_params; ++k) {
    const double v = params(k);
    bool ok = std::isfinite(v);
    switch (margin.range(k)) {
      case ParamRange::real: break;
      case ParamRange::positive: ok = ok && v > 0.0; break;
      case ParamRange::unit: ok = ok && v >= 0.0 && v <= 1.0; break;
    }
    if (margin.family == Family::zalg && k == 0) ok = ok && v > 0.0 && v < 1.0;
    if (!ok) {
      throw DomainError(std::string(family_name(margin.family)) + " parameter " +
                        std::string(margin.param_name(k)) + " = " + std::to_string(v) +
                        " out of range");
    }
  }
}

void validate_response(const MarginFamily& margin, double y) {
  if (!is_support_point(margin, y)) {
    throw DomainError("response " + std::to_string(y) + " outside the support of " +
                      std::string(family_name(margin.family)));
  }
}

double margin_log_pdf(const MarginFamily& margin, double y, const ParamVector& params) {
  validate_params(margin, params);
  validate_response(margin, y);
  switch (margin.family) {
    case Family::bernoulli: return y == 1.0 ? std::log(params(0)) : std::log1p(-params(0));
    case Family::gaussian: {
      const double z = (y - params(0)) / params(1);
      return -0.5 * z * z - std::log(params(1)) + std::log(special::kInvSqrt2Pi);
    }
    default: return count_log_pmf(margin.family, y, params);
  }
}

double margin_pdf(const MarginFamily& margin, double y, const ParamVector& params) {
  return std::exp(margin_log_pdf(margin, y, params));
}

double margin_cdf(const MarginFamily& margin, double y, const ParamVector& params) {
  validate_params(margin, params);
  if (std::isnan(y)) throw DomainError("cdf evaluated at NaN");
  switch (margin.family) {
    case Family::bernoulli: return y < 0.0 ? 0.0 : (y < 1.0 ? 1.0 - params(0) : 1.0);
    case Family::gaussian: return special::norm_cdf((y - params(0)) / params(1));
    case Family::geometric: {
      if (y < 0.0) return 0.0;
      if (!std::isfinite(y)) return 1.0;
      const double yf = std::floor(y);
      return -std::expm1((yf + 1.0) * (std::log(params(0)) - std::log1p(params(0))));
    }
    default: break;
  }
  if (y < 0.0) return 0.0;
  if (!std::isfinite(y)) return 1.0;
  const double yf = std::floor(y);
  const CountRecurrence rec(margin.family, params);
  const ScanState s = count_scan(rec, [&](const ScanState& st) { return st.k < yf; });
  return std::min(s.cdf, 1.0);
}

double margin_quantile(const MarginFamily& margin, double p, const ParamVector& params) {
  validate_params(margin, params);
  if (!(p > 0.0 && p < 1.0)) throw DomainError("quantile probability must lie in (0,1)");
  switch (margin.family) {
    case Family::bernoulli: return p <= 1.0 - params(0) ? 0.0 : 1.0;
    case Family::gaussian: return params(0) + params(1) * special::norm_quantile(p);
    case Family::geometric: {
      // Closed-form start, then step to the exact generalised inverse.
      const double lq = std::log(params(0)) - std::log1p(params(0));
      double y = std::max(0.0, std::ceil(std::log1p(-p) / lq - 1.0));
      while (y > 0.0 && margin_cdf(margin, y - 1.0, params) >= p) y -= 1.0;
      while (margin_cdf(margin, y, params) < p) {
        y += 1.0;
        if (y > kQuantileCap) throw NumericError("quantile search exceeded 1e7");
      }
      return y;
    }
    default: break;
  }
  const CountRecurrence rec(margin.family, params);
  const ScanState s = count_scan(rec, [&](const ScanState& st) { return st.cdf < p; });
  return s.k;
}

double margin_mean(const MarginFamily& margin, const ParamVector& params) {
  validate_params(margin, params);
  const double mu = params(0);
  switch (margin.family) {
    case Family::bernoulli:
    case Family::gaussian:
    case Family::poisson:
    case Family::geometric:
    case Family::negbin1: return mu;
    case Family::zalg: {
      const double alpha = -1.0 / std::log1p(-mu);
      return (1.0 - params(1)) * alpha * mu / (1.0 - mu);
    }
    case Family::zip: return (1.0 - params(1)) * mu;
    case Family::zanbi: {
      const double c = (1.0 - params(2)) / (-std::expm1(nb_log_p0(mu, params(1))));
      return c * mu;
    }
    case Family::zinbi: return (1.0 - params(2)) * mu;
  }
  return 0.0;
}

double margin_variance(const MarginFamily& margin, const ParamVector& params) {
  validate_params(margin, params);
  const double mu = params(0);
  switch (margin.family) {
    case Family::bernoulli: return mu * (1.0 - mu);
    case Family::gaussian: return params(1) * params(1);
    case Family::poisson: return mu;
    case Family::geometric: return mu + mu * mu;
    case Family::negbin1: return mu + params(1) * mu * mu;
    case Family::zalg: {
      const double alpha = -1.0 / std::log1p(-mu);
      const double m = (1.0 - params(1)) * alpha * mu;
      return m * (1.0 - m) / ((1.0 - mu) * (1.0 - mu));
    }
    case Family::zip: return mu * (1.0 - params(1)) * (1.0 + mu * params(1));
    case Family::zanbi: {
      const double c = (1.0 - params(2)) / (-std::expm1(nb_log_p0(mu, params(1))));
      return c * mu + c * mu * mu * (1.0 + params(1) - c);
    }
    case Family::zinbi: {
      const double nu = params(2);
      return mu * (1.0 - nu) + mu * mu * (1.0 - nu) * (params(1) + nu);
    }
  }
  return 0.0;
}

ParamVector margin_offset(const MarginFamily& margin, std::span<const double> y) {
  if (y.empty()) throw InputError("margin offset needs a nonempty response vector");
  for (const double v : y) validate_response(margin, v);
  const double n = static_cast<double>(y.size());
  const double mean = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double ss = 0.0;
  for (const double v : y) ss += (v - mean) * (v - mean);
  const double var = ss / n;

  auto clamp_prob = [&](double p, std::string_view what) {
    const double c = std::clamp(p, kClampProb, 1.0 - kClampProb);
    if (c != p) warn("degenerate sample: " + std::string(what) + " clamped to " + std::to_string(c));
    return c;
  };
  auto clamp_scale = [&](double s, std::string_view what) {
    if (s >= kClampScale) return s;
    warn("degenerate sample: " + std::string(what) + " clamped to 1e-6");
    return kClampScale;
  };

  ParamVector eta(margin.n_params);
  switch (margin.family) {
    case Family::bernoulli:
      eta(0) = link_apply(margin.links[0], clamp_prob(mean, "probability"));
      return eta;
    case Family::gaussian:
      eta(0) = mean;
      eta(1) = std::log(clamp_scale(std::sqrt(var), "scale"));
      return eta;
    case Family::poisson:
    case Family::geometric:
      eta(0) = std::log(clamp_scale(mean, "mean"));
      return eta;
    default: break;
  }

  // Count families: tabulate the sample and minimise the histogram NLL.
  std::map<double, double> counts;
  for (const double v : y) counts[v] += 1.0;
  const double prop0 = counts.count(0.0) ? counts[0.0] / n : 0.0;
  double pos_sum = 0.0, pos_n = 0.0, pos_ss = 0.0;
  for (const auto& [v, c] : counts) {
    if (v > 0.0) {
      pos_sum += v * c;
      pos_n += c;
    }
  }
  const double pos_mean = pos_n > 0.0 ? pos_sum / pos_n : 1.0;
  for (const auto& [v, c] : counts) {
    if (v > 0.0) pos_ss += c * (v - pos_mean) * (v - pos_mean);
  }
  const double pos_var = pos_n > 1.0 ? pos_ss / pos_n : pos_mean;

  ParamVector start(margin.n_params);
  const double safe_mean = std::max(mean, 1e-3);
  const double disp = std::clamp((var - safe_mean) / (safe_mean * safe_mean), 0.05, 50.0);
  switch (margin.family) {
    case Family::negbin1:
      start << safe_mean, disp;
      break;
    case Family::zalg: {
      // Log-series mean a mu / (1 - mu) matched to the positive mean.
      double lo = 1e-9, hi = 1.0 - 1e-12;
      for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double m = -mid / ((1.0 - mid) * std::log1p(-mid));
        (m < pos_mean ? lo : hi) = mid;
      }
      start << std::clamp(0.5 * (lo + hi), 1e-4, 1.0 - 1e-4), std::clamp(prop0, 1e-4, 1.0 - 1e-4);
      break;
    }
    case Family::zip: {
      const double mu0 = std::max(pos_mean, safe_mean);
      start << mu0, std::clamp(1.0 - mean / mu0, 0.02, 0.98);
      break;
    }
    case Family::zanbi:
      start << std::max(pos_mean, 1e-2),
          std::clamp((pos_var - pos_mean) / (pos_mean * pos_mean), 0.05, 50.0),
          std::clamp(prop0, 1e-4, 1.0 - 1e-4);
      break;
    case Family::zinbi:
      start << safe_mean / std::max(1.0 - 0.5 * prop0, 0.5), disp, std::clamp(0.5 * prop0, 0.02, 0.98);
      break;
    default: break;
  }
  for (int k = 0; k < margin.n_params; ++k) start(k) = link_apply(margin.links[k], start(k));

  auto objective = [&](const ParamVector& e) {
    ParamVector ec = e.cwiseMax(-25.0).cwiseMin(25.0);
    const ParamVector p = margin_response(margin, std::span<const double>(ec.data(), ec.size()));
    for (int k = 0; k < margin.n_params; ++k) {
      if (margin.range(k) == ParamRange::unit && (p(k) <= 0.0 || p(k) >= 1.0)) return 1e300;
      if (margin.range(k) == ParamRange::positive && !(p(k) > 0.0)) return 1e300;
    }
    double nll = 0.0;
    for (const auto& [v, c] : counts) nll -= c * count_log_pmf(margin.family, v, p);
    double penalty = 0.0;
    for (int k = 0; k < e.size(); ++k) penalty += std::pow(e(k) - ec(k), 2);
    return std::isfinite(nll) ? nll + 1e3 * penalty : 1e300;
  };
  eta = minimise(objective, start);
  return eta.cwiseMax(-25.0).cwiseMin(25.0);
}

MarginEval margin_eval(const MarginFamily& margin, double y, const ParamVector& params) {
  MarginEval out;
  switch (margin.family) {
    case Family::bernoulli: {
      const double p = params(0);
      out.pdf = y == 1.0 ? p : 1.0 - p;
      out.log_pdf = std::log(out.pdf);
      out.cdf = y == 1.0 ? 1.0 : 1.0 - p;
      return out;
    }
    case Family::gaussian: {
      const double z = (y - params(0)) / params(1);
      out.log_pdf = -0.5 * z * z - std::log(params(1)) + std::log(special::kInvSqrt2Pi);
      out.pdf = std::exp(out.log_pdf);
      out.cdf = special::norm_cdf(z);
      return out;
    }
    default: break;
  }
  const CountRecurrence rec(margin.family, params);
  const ScanState s = count_scan(rec, [&](const ScanState& st) { return st.k < y; });
  if (s.tail_exhausted) {
    out.log_pdf = count_log_pmf(margin.family, y, params);
    out.pdf = std::exp(out.log_pdf);
    out.cdf = std::min(s.cdf, 1.0);
  } else {
    out.pdf = s.pmf;
    out.log_pdf = std::log(s.pmf);
    out.cdf = std::min(s.cdf, 1.0);
  }
  return out;
}

MarginEvalGrad margin_eval_grad(const MarginFamily& margin, double y, const ParamVector& params) {
  MarginEvalGrad g;
  const int d = margin.n_params;
  g.d_pdf = ParamVector::Zero(d);
  g.d_log_pdf = ParamVector::Zero(d);
  g.d_cdf = ParamVector::Zero(d);
  g.value = margin_eval(margin, y, params);
  const double mu = params(0);
  switch (margin.family) {
    case Family::bernoulli: {
      g.d_pdf(0) = y == 1.0 ? 1.0 : -1.0;
      g.d_log_pdf(0) = g.d_pdf(0) / g.value.pdf;
      g.d_cdf(0) = y == 1.0 ? 0.0 : -1.0;
      return g;
    }
    case Family::gaussian: {
      const double s = params(1);
      const double z = (y - mu) / s;
      const double phi = special::norm_pdf(z);
      g.d_log_pdf << z / s, (z * z - 1.0) / s;
      g.d_pdf = g.value.pdf * g.d_log_pdf;
      g.d_cdf << -phi / s, -z * phi / s;
      return g;
    }
    case Family::poisson: {
      // dF(y)/dmu = -f(y).
      g.d_log_pdf(0) = y / mu - 1.0;
      g.d_pdf(0) = g.value.pdf * g.d_log_pdf(0);
      g.d_cdf(0) = -g.value.pdf;
      return g;
    }
    case Family::geometric: {
      g.d_log_pdf(0) = y / mu - (y + 1.0) / (1.0 + mu);
      g.d_pdf(0) = g.value.pdf * g.d_log_pdf(0);
      g.d_cdf(0) = -(y + 1.0) * std::pow(mu / (1.0 + mu), y) / ((1.0 + mu) * (1.0 + mu));
      return g;
    }
    case Family::zip: {
      const double sig = params(1);
      const double em = std::exp(-mu);
      const double po = std::exp(y * std::log(mu) - mu - std::lgamma(y + 1.0));
      const double po_cdf = (g.value.cdf - sig) / (1.0 - sig);
      if (y == 0.0) {
        g.d_pdf << -(1.0 - sig) * em, 1.0 - em;
      } else {
        g.d_pdf << (1.0 - sig) * po * (y / mu - 1.0), -po;
      }
      g.d_log_pdf = g.d_pdf / g.value.pdf;
      g.d_cdf << -(1.0 - sig) * po, 1.0 - po_cdf;
      return g;
    }
    default: break;
  }
  for (int k = 0; k < d; ++k) {
    const double v = params(k);
    ParamVector up = params, dn = params;
    switch (margin.range(k)) {
      case ParamRange::positive:
        up(k) = v * (1.0 + 1e-6);
        dn(k) = v * (1.0 - 1e-6);
        break;
      case ParamRange::unit: {
        // Asymmetric near the ends of [0,1]; the zero-inflation weights enter
        // linearly, so any step is exact for them.
        const double h = 1e-6 * std::max(std::min(v, 1.0 - v), 1e-3);
        up(k) = std::min(v + h, 1.0);
        dn(k) = std::max(v - h, 0.0);
        break;
      }
      default: {
        const double h = 1e-6 * std::max(1.0, std::abs(v));
        up(k) = v + h;
        dn(k) = v - h;
        break;
      }
    }
    const double width = up(k) - dn(k);
    const MarginEval a = margin_eval(margin, y, up);
    const MarginEval b = margin_eval(margin, y, dn);
    g.d_pdf(k) = (a.pdf - b.pdf) / width;
    g.d_log_pdf(k) = (a.log_pdf - b.log_pdf) / width;
    g.d_cdf(k) = (a.cdf - b.cdf) / width;
  }
  return g;
}

}  // namespace copboost
