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

#include "copboost/likelihood.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "copboost/error.hpp"
#include "copboost/stats.hpp"

namespace copboost {

namespace {

constexpr double kMassFloor = 1e-300;
constexpr double kProbClamp = 1e-12;

double clamp_prob(double p) { return std::clamp(p, kProbClamp, 1.0 - kProbClamp); }

double neg_log_mass(double m) { return -std::log(std::max(m, kMassFloor)); }

double summary_y(const MarginFamily& m, double y) {
  return m.support() == Support::binary ? 0.0 : y;
}

}  // namespace

PairKind parse_pair_kind(std::string_view name) {
  if (name == "binary-binary") return PairKind::binary_binary;
  if (name == "count-count") return PairKind::count_count;
  if (name == "binary-continuous") return PairKind::binary_continuous;
  throw ConfigError("unknown pair kind '" + std::string(name) + "'");
}

std::string_view pair_kind_name(PairKind kind) {
  switch (kind) {
    case PairKind::binary_binary: return "binary-binary";
    case PairKind::count_count: return "count-count";
    case PairKind::binary_continuous: return "binary-continuous";
  }
  return "?";
}

ModelSpec ModelSpec::make(PairKind kind, MarginFamily margin1, MarginFamily margin2,
                          CopulaSpec copula) {
  const Support s1 = margin1.support(), s2 = margin2.support();
  bool ok = false;
  switch (kind) {
    case PairKind::binary_binary: ok = s1 == Support::binary && s2 == Support::binary; break;
    case PairKind::count_count: ok = s1 == Support::count && s2 == Support::count; break;
    case PairKind::binary_continuous: ok = s1 == Support::binary && s2 == Support::real; break;
  }
  if (!ok) {
    throw ConfigError(std::string("margins ") + std::string(family_name(margin1.family)) + "/" +
                      std::string(family_name(margin2.family)) + " do not fit pair kind " +
                      std::string(pair_kind_name(kind)));
  }
  return ModelSpec{kind, margin1, margin2, copula};
}

int ModelSpec::block(int k) const {
  if (k < 0 || k >= n_params()) throw ConfigError("parameter index out of range");
  if (k < margin1.n_params) return 0;
  if (k < margin1.n_params + margin2.n_params) return 1;
  return 2;
}

int ModelSpec::local_index(int k) const {
  switch (block(k)) {
    case 0: return k;
    case 1: return k - margin1.n_params;
    default: return 0;
  }
}

std::string ModelSpec::param_name(int k) const {
  const int b = block(k);
  if (b == 2) return "theta";
  return std::string(margin(b).param_name(local_index(k))) + std::to_string(b + 1);
}

PairParams pair_params(const ModelSpec& spec, std::span<const double> eta) {
  if (static_cast<int>(eta.size()) != spec.n_params()) {
    throw ConfigError("predictor vector has " + std::to_string(eta.size()) + " entries, expected " +
                      std::to_string(spec.n_params()));
  }
  const int k1 = spec.margin1.n_params, k2 = spec.margin2.n_params;
  PairParams p;
  p.p1 = margin_response(spec.margin1, eta.subspan(0, k1));
  p.p2 = margin_response(spec.margin2, eta.subspan(k1, k2));
  p.theta = theta_response(spec.copula, eta[k1 + k2]);
  return p;
}

void validate_eta(const ModelSpec& spec, std::span<const double> eta) {
  for (double e : eta) {
    if (!std::isfinite(e)) throw DomainError("non-finite predictor value");
  }
  const PairParams p = pair_params(spec, eta);
  validate_params(spec.margin1, p.p1);
  validate_params(spec.margin2, p.p2);
  validate_theta(spec.copula, p.theta);
}

MarginEval margin_state(const MarginFamily& margin, double y, const ParamVector& params) {
  return margin_eval(margin, summary_y(margin, y), params);
}

std::array<double, 4> binary_cells(const CopulaSpec& copula, double p1, double p2, double theta) {
  p1 = std::clamp(p1, 0.0, 1.0);
  p2 = std::clamp(p2, 0.0, 1.0);
  const double c11 = copula_cdf(copula, p1, p2, theta);
  return {std::max(1.0 - p1 - p2 + c11, 0.0), std::max(p2 - c11, 0.0),
          std::max(p1 - c11, 0.0), c11};
}

double rectangle_mass(const CopulaSpec& copula, double F1, double f1, double F2, double f2,
                      double theta) {
  const double a1 = std::clamp(F1, 0.0, 1.0), a2 = std::clamp(F2, 0.0, 1.0);
  const double b1 = std::clamp(F1 - f1, 0.0, a1), b2 = std::clamp(F2 - f2, 0.0, a2);
  return copula_rect_mass(copula, b1, a1, b2, a2, theta);
}

double pair_nll(const ModelSpec& spec, double y1, double y2, const MarginEval& s1,
                const MarginEval& s2, double theta) {
  switch (spec.kind) {
    case PairKind::binary_binary: {
      const auto cells = binary_cells(spec.copula, 1.0 - s1.cdf, 1.0 - s2.cdf, theta);
      return neg_log_mass(cells[2 * static_cast<int>(y1) + static_cast<int>(y2)]);
    }
    case PairKind::count_count:
      return neg_log_mass(rectangle_mass(spec.copula, s1.cdf, s1.pdf, s2.cdf, s2.pdf, theta));
    case PairKind::binary_continuous: {
      const double h = copula_hfun(spec.copula, s1.cdf, s2.cdf, theta, 2);
      return neg_log_mass(y1 == 0.0 ? h : 1.0 - h) - s2.log_pdf;
    }
  }
  return 0.0;
}

double joint_nll(const ModelSpec& spec, double y1, double y2, std::span<const double> eta) {
  validate_response(spec.margin1, y1);
  validate_response(spec.margin2, y2);
  validate_eta(spec, eta);
  const PairParams p = pair_params(spec, eta);
  const double r = pair_nll(spec, y1, y2, margin_state(spec.margin1, y1, p.p1),
                            margin_state(spec.margin2, y2, p.p2), p.theta);
  if (!std::isfinite(r)) throw NumericError("non-finite negative log-likelihood");
  return r;
}

EtaVector nll_gradient(const ModelSpec& spec, double y1, double y2, std::span<const double> eta) {
  validate_response(spec.margin1, y1);
  validate_response(spec.margin2, y2);
  validate_eta(spec, eta);
  const PairParams p = pair_params(spec, eta);
  const CopulaSpec& cop = spec.copula;
  const double th = p.theta;
  const MarginEvalGrad g1 = margin_eval_grad(spec.margin1, summary_y(spec.margin1, y1), p.p1);
  const MarginEvalGrad g2 = margin_eval_grad(spec.margin2, summary_y(spec.margin2, y2), p.p2);
  const int k1 = spec.margin1.n_params, k2 = spec.margin2.n_params, kc = k1 + k2;

  // Derivatives with respect to the natural parameters, except d_eta_c which
  // is taken directly on the predictor scale.
  ParamVector d1, d2;
  double d_theta = 0.0;
  bool copula_on_eta_scale = false;
  double d_eta_c = 0.0;

  switch (spec.kind) {
    case PairKind::binary_binary: {
      const double p1 = clamp_prob(1.0 - g1.value.cdf), p2 = clamp_prob(1.0 - g2.value.cdf);
      const double cu = copula_hfun(cop, p1, p2, th, 1);
      const double cv = copula_hfun(cop, p1, p2, th, 2);
      const double ct = copula_dtheta(cop, p1, p2, th);
      const auto cells = binary_cells(cop, p1, p2, th);
      const int a = static_cast<int>(y1), b = static_cast<int>(y2);
      // d cell / d(p1, p2, theta) for cells (0,0), (0,1), (1,0), (1,1).
      const double dp1[4] = {cu - 1.0, -cu, 1.0 - cu, cu};
      const double dp2[4] = {cv - 1.0, 1.0 - cv, -cv, cv};
      const double dt[4] = {ct, -ct, -ct, ct};
      const int c = 2 * a + b;
      const double m = std::max(cells[c], kMassFloor);
      // p_j = 1 - F_j(0).
      d1 = (dp1[c] / m) * g1.d_cdf;
      d2 = (dp2[c] / m) * g2.d_cdf;
      d_theta = -dt[c] / m;
      break;
    }
    case PairKind::count_count: {
      const double a1 = std::clamp(g1.value.cdf, 0.0, 1.0), a2 = std::clamp(g2.value.cdf, 0.0, 1.0);
      const double b1 = std::clamp(g1.value.cdf - g1.value.pdf, 0.0, 1.0);
      const double b2 = std::clamp(g2.value.cdf - g2.value.pdf, 0.0, 1.0);
      const bool lo1 = b1 > 0.0, lo2 = b2 > 0.0;
      const double m = std::max(rectangle_mass(cop, g1.value.cdf, g1.value.pdf, g2.value.cdf,
                                               g2.value.pdf, th),
                                kMassFloor);
      auto hu = [&](double u, double v) { return copula_hfun(cop, u, v, th, 1); };
      auto hv = [&](double u, double v) { return copula_hfun(cop, u, v, th, 2); };
      const double dm_da1 = hu(a1, a2) - (lo2 ? hu(a1, b2) : 0.0);
      const double dm_db1 = lo1 ? -(hu(b1, a2) - (lo2 ? hu(b1, b2) : 0.0)) : 0.0;
      const double dm_da2 = hv(a1, a2) - (lo1 ? hv(b1, a2) : 0.0);
      const double dm_db2 = lo2 ? -(hv(a1, b2) - (lo1 ? hv(b1, b2) : 0.0)) : 0.0;
      double dm_dt = copula_dtheta(cop, a1, a2, th);
      if (lo1) dm_dt -= copula_dtheta(cop, b1, a2, th);
      if (lo2) dm_dt -= copula_dtheta(cop, a1, b2, th);
      if (lo1 && lo2) dm_dt += copula_dtheta(cop, b1, b2, th);
      d1 = -(dm_da1 * g1.d_cdf + dm_db1 * (g1.d_cdf - g1.d_pdf)) / m;
      d2 = -(dm_da2 * g2.d_cdf + dm_db2 * (g2.d_cdf - g2.d_pdf)) / m;
      d_theta = -dm_dt / m;
      break;
    }
    case PairKind::binary_continuous: {
      const double u = clamp_prob(g1.value.cdf), v = clamp_prob(g2.value.cdf);
      auto hfun = [&](double vv, double theta) { return copula_hfun(cop, u, vv, theta, 2); };
      const double h = hfun(v, th);
      const double step_v = 1e-6 * std::min(v, 1.0 - v);
      const double dh_dv = (hfun(v + step_v, th) - hfun(v - step_v, th)) / (2.0 * step_v);
      const double dh_du = copula_density(cop, u, v, th);
      const double ec = eta[kc], step_c = 1e-6 * std::max(1.0, std::abs(ec));
      const double dh_dc = (hfun(v, theta_response(cop, ec + step_c)) -
                            hfun(v, theta_response(cop, ec - step_c))) / (2.0 * step_c);
      const double dw_dh = y1 == 0.0 ? -1.0 / std::max(h, kMassFloor)
                                     : 1.0 / std::max(1.0 - h, kMassFloor);
      d1 = (dw_dh * dh_du) * g1.d_cdf;
      d2 = (dw_dh * dh_dv) * g2.d_cdf - g2.d_log_pdf;
      copula_on_eta_scale = true;
      d_eta_c = dw_dh * dh_dc;
      break;
    }
  }

  EtaVector grad(spec.n_params());
  for (int k = 0; k < k1; ++k) grad(k) = d1(k) * response_derivative(spec.margin1.links[k], eta[k]);
  for (int k = 0; k < k2; ++k) {
    grad(k1 + k) = d2(k) * response_derivative(spec.margin2.links[k], eta[k1 + k]);
  }
  grad(kc) = copula_on_eta_scale ? d_eta_c : d_theta * theta_response_derivative(cop, eta[kc]);
  if (!grad.allFinite()) throw NumericError("non-finite gradient");
  return grad;
}

std::pair<double, double> draw_pair(const ModelSpec& spec, const PairParams& params, Rng& rng) {
  const auto [u, v] = copula_draw(spec.copula, params.theta, rng);
  if (spec.kind == PairKind::binary_binary) {
    // P(Y1 = 1, Y2 = 1) = C(p1, p2): success is the lower tail of each uniform.
    return {u < params.p1(0) ? 1.0 : 0.0, v < params.p2(0) ? 1.0 : 0.0};
  }
  return {margin_quantile(spec.margin1, u, params.p1), margin_quantile(spec.margin2, v, params.p2)};
}

Stabilization parse_stabilization(std::string_view name) {
  if (name == "none") return Stabilization::none;
  if (name == "L2") return Stabilization::L2;
  if (name == "MAD") return Stabilization::MAD;
  throw ConfigError("unknown stabilization '" + std::string(name) + "'");
}

std::string_view stabilization_name(Stabilization s) {
  switch (s) {
    case Stabilization::none: return "none";
    case Stabilization::L2: return "L2";
    case Stabilization::MAD: return "MAD";
  }
  return "?";
}

void stabilize(std::span<double> g, Stabilization mode) {
  if (g.empty()) throw InputError("stabilize: empty gradient");
  double scale = 1.0;
  switch (mode) {
    case Stabilization::none: return;
    case Stabilization::L2: {
      double ss = 0.0;
      for (double x : g) ss += x * x;
      scale = std::sqrt(ss / static_cast<double>(g.size()));
      break;
    }
    case Stabilization::MAD: {
      std::vector<double> v(g.begin(), g.end());
      const double med = stats::median(v);
      for (auto& x : v) x = std::abs(x - med);
      scale = 1.4826 * stats::median(std::move(v));
      break;
    }
  }
  if (!(scale >= 1e-12)) return;
  for (auto& x : g) x /= scale;
}

}  // namespace copboost
