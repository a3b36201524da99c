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
#include <utility>

#include "copboost/copulas.hpp"
#include "copboost/margins.hpp"
#include "copboost/rng.hpp"

namespace copboost {

enum class PairKind { binary_binary, count_count, binary_continuous };

PairKind parse_pair_kind(std::string_view name);
std::string_view pair_kind_name(PairKind kind);

inline constexpr int kMaxParams = 2 * kMaxMarginParams + 1;
using EtaVector = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, kMaxParams, 1>;

// Parameter layout: margin1 parameters, then margin2 parameters, then the
// copula parameter last.
struct ModelSpec {
  PairKind kind = PairKind::binary_binary;
  MarginFamily margin1;
  MarginFamily margin2;
  CopulaSpec copula;

  // Throws ConfigError when the margin supports do not match the pair kind.
  static ModelSpec make(PairKind kind, MarginFamily margin1, MarginFamily margin2,
                        CopulaSpec copula);

  int n_params() const { return margin1.n_params + margin2.n_params + 1; }
  int copula_index() const { return n_params() - 1; }
  // 0 for margin1, 1 for margin2, 2 for the copula.
  int block(int k) const;
  int local_index(int k) const;
  std::string param_name(int k) const;
  MarginFamily margin(int j) const { return j == 0 ? margin1 : margin2; }
};

// Natural-scale parameters of one observation.
struct PairParams {
  ParamVector p1;
  ParamVector p2;
  double theta = 0.0;
};

PairParams pair_params(const ModelSpec& spec, std::span<const double> eta);
// Validates that eta has K entries and the transformed parameters are valid.
void validate_eta(const ModelSpec& spec, std::span<const double> eta);

// Marginal quantities a pair likelihood needs from one margin. Binary margins
// are summarised at y = 0 (cdf = P(Y = 0)); other margins at the observed y.
MarginEval margin_state(const MarginFamily& margin, double y, const ParamVector& params);

// -log of the joint mass (binary-binary, count-count) or mixed
// mass-density (binary-continuous), from per-margin states.
double pair_nll(const ModelSpec& spec, double y1, double y2, const MarginEval& s1,
                const MarginEval& s2, double theta);

double joint_nll(const ModelSpec& spec, double y1, double y2, std::span<const double> eta);
// d joint_nll / d eta, one entry per parameter.
EtaVector nll_gradient(const ModelSpec& spec, double y1, double y2, std::span<const double> eta);

// Cell masses P(Y1=a, Y2=b) indexed [2a + b], with P(1,1) = C(p1, p2).
std::array<double, 4> binary_cells(const CopulaSpec& copula, double p1, double p2, double theta);
// C(F1,F2) - C(F1-f1,F2) - C(F1,F2-f2) + C(F1-f1,F2-f2).
double rectangle_mass(const CopulaSpec& copula, double F1, double f1, double F2, double f2,
                      double theta);

// One draw of (y1, y2) from the bivariate model, using the same orientation
// convention as the likelihood.
std::pair<double, double> draw_pair(const ModelSpec& spec, const PairParams& params, Rng& rng);

inline std::span<const double> as_span(const EtaVector& eta) {
  return {eta.data(), static_cast<std::size_t>(eta.size())};
}
inline PairParams pair_params(const ModelSpec& spec, const EtaVector& eta) {
  return pair_params(spec, as_span(eta));
}
inline double joint_nll(const ModelSpec& spec, double y1, double y2, const EtaVector& eta) {
  return joint_nll(spec, y1, y2, as_span(eta));
}
inline EtaVector nll_gradient(const ModelSpec& spec, double y1, double y2, const EtaVector& eta) {
  return nll_gradient(spec, y1, y2, as_span(eta));
}

enum class Stabilization { none, L2, MAD };
Stabilization parse_stabilization(std::string_view name);
std::string_view stabilization_name(Stabilization s);
// none: identity; L2: divide by the root mean square; MAD: divide by
// 1.4826 * median |g - median g|. Stabilisers below 1e-12 leave g as is.
void stabilize(std::span<double> g, Stabilization mode);

}  // namespace copboost
