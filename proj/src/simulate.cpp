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

#include "copboost/simulate.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <string>

#include "copboost/error.hpp"
#include "copboost/parallel.hpp"
#include "copboost/rng.hpp"
#include "copboost/special.hpp"

namespace copboost {

namespace {

constexpr std::uint64_t kCovariateStream = 1;
constexpr std::uint64_t kResponseStream = 2;

struct PresetInfo {
  Preset preset;
  const char* name;
};

constexpr PresetInfo kPresets[] = {
    {Preset::s1_binary_linear, "s1-binary-linear"},
    {Preset::s2_count_linear, "s2-count-linear"},
    {Preset::s2_count_nonlinear, "s2-count-nonlinear"},
    {Preset::s3_mixed_linear, "s3-mixed-linear"},
    {Preset::s3_mixed_nonlinear, "s3-mixed-nonlinear"},
    {Preset::custom, "custom"},
};

}  // namespace

Preset parse_preset(std::string_view name) {
  for (const auto& p : kPresets)
    if (name == p.name) return p.preset;
  throw ConfigError("unknown preset '" + std::string(name) + "'");
}

std::string_view preset_name(Preset preset) {
  for (const auto& p : kPresets)
    if (preset == p.preset) return p.name;
  return "custom";
}

CovariateMode parse_covariate_mode(std::string_view name) {
  if (name == "toeplitz-gaussian") return CovariateMode::toeplitz_gaussian;
  if (name == "iid-uniform01") return CovariateMode::iid_uniform01;
  throw ConfigError("unknown covariate mode '" + std::string(name) + "'");
}

std::string_view covariate_mode_name(CovariateMode mode) {
  return mode == CovariateMode::toeplitz_gaussian ? "toeplitz-gaussian" : "iid-uniform01";
}

ModelSpec preset_model(Preset preset) {
  switch (preset) {
    case Preset::s1_binary_linear:
      return ModelSpec::make(PairKind::binary_binary,
                             MarginFamily::make(Family::bernoulli, Link::probit),
                             MarginFamily::make(Family::bernoulli, Link::cloglog),
                             CopulaSpec::make(CopulaFamily::gauss));
    case Preset::s2_count_linear:
    case Preset::s2_count_nonlinear:
      return ModelSpec::make(PairKind::count_count, MarginFamily::make(Family::zalg),
                             MarginFamily::make(Family::zinbi),
                             CopulaSpec::make(CopulaFamily::joe));
    case Preset::s3_mixed_linear:
    case Preset::s3_mixed_nonlinear:
      return ModelSpec::make(PairKind::binary_continuous,
                             MarginFamily::make(Family::bernoulli, Link::probit),
                             MarginFamily::make(Family::gaussian),
                             CopulaSpec::make(CopulaFamily::clayton, 270));
    case Preset::custom: break;
  }
  throw ConfigError("the custom preset has no fixed model");
}

CovariateMode preset_covariates(Preset preset) {
  return preset == Preset::s1_binary_linear ? CovariateMode::toeplitz_gaussian
                                            : CovariateMode::iid_uniform01;
}

std::vector<std::string> preset_formulas(Preset preset) {
  switch (preset) {
    case Preset::s1_binary_linear:
      return {"-1*x2 + 0.5*x3 + 1*x4 - 0.5*x6", "0.5*x1 - 1*x2 + 0.75*x3",
              "0.5*x2 - 1.5*x3 + 1.5*x4"};
    case Preset::s2_count_linear:
      return {"-1*x1 + 1*x3",       "1*x4 + 1*x5 - 2*x8",     "1.5*x1 - 1.5*x2",
              "-0.75*x2 + 1*x4",    "-0.75*x2 + 1*x3",        "-0.5*x2 + 1.5*x3 + 1.5*x5"};
    case Preset::s2_count_nonlinear:
      return {"0.5*(x1^1.5 - 2*cos(3*x1))",
              "-80*(x3^1.5 - x3^(4/3))",
              "-0.7*exp(x2^2) + exp(x2^0.4)",
              "3 - 1.5*(1.5*cos(2*x5) + 3*tanh(x5))",
              "-3 - 0.7*(sin(x1) - exp(x1)^2)",
              "2*sin(4*x4)"};
    case Preset::s3_mixed_linear:
      return {"1.5*x2 - 1*x3 + 1.5*x4", "0.5*x2 + 1.5*x3", "1*x5", "1.5*x5 - 1.5*x6"};
    case Preset::s3_mixed_nonlinear:
      return {"0.5*(x1^1.5 - 2*cos(3*x1))", "-0.7*exp(x1^2) + exp(x1^0.4)",
              "-0.5 + cos(2*x2)", "-1 + 3*sin(4*x3)"};
    case Preset::custom: break;
  }
  throw ConfigError("the custom preset has no fixed formulas");
}

DgpSpec make_dgp(Preset preset, int p, std::uint64_t seed) {
  if (preset == Preset::custom) throw ConfigError("make_dgp needs a named preset");
  DgpSpec d;
  d.preset = preset;
  d.p = p;
  d.seed = seed;
  d.model = preset_model(preset);
  d.covariates = preset_covariates(preset);
  d.eta = preset_formulas(preset);
  return d;
}

TruePredictor::TruePredictor(const DgpSpec& dgp) {
  if (static_cast<int>(dgp.eta.size()) != dgp.model.n_params())
    throw ConfigError("DGP needs " + std::to_string(dgp.model.n_params()) +
                      " predictor expressions, got " + std::to_string(dgp.eta.size()));
  for (const auto& text : dgp.eta) exprs_.push_back(Expression::parse(text, dgp.p));
}

EtaVector TruePredictor::eta(std::span<const double> x) const {
  EtaVector e(n_params());
  for (int k = 0; k < n_params(); ++k) e(k) = exprs_[k].eval(x);
  return e;
}

std::vector<std::set<int>> TruePredictor::informative() const {
  std::vector<std::set<int>> out;
  for (const auto& e : exprs_) out.push_back(e.variables());
  return out;
}

EtaVector preset_eta(Preset preset, std::span<const double> x) {
  DgpSpec d = make_dgp(preset, static_cast<int>(x.size()));
  return TruePredictor(d).eta(x);
}

Eigen::MatrixXd gen_covariates(const DgpSpec& dgp) {
  if (dgp.p < 1 || dgp.n() < 1) throw ConfigError("n and p must be at least 1");
  const Eigen::Index n = static_cast<Eigen::Index>(dgp.n());
  const int p = dgp.p;
  Eigen::MatrixXd x(n, p);
  if (dgp.covariates == CovariateMode::iid_uniform01) {
    for (Eigen::Index i = 0; i < n; ++i) {
      Rng rng(derive_seed(dgp.seed, kCovariateStream, static_cast<std::uint64_t>(i)));
      for (int j = 0; j < p; ++j) x(i, j) = rng.uniform();
    }
    return x;
  }
  if (!(std::abs(dgp.rho) < 1.0)) throw ConfigError("Toeplitz rho must lie in (-1, 1)");
  Eigen::MatrixXd sigma(p, p);
  for (int a = 0; a < p; ++a)
    for (int b = 0; b < p; ++b) sigma(a, b) = std::pow(dgp.rho, std::abs(a - b));
  const Eigen::MatrixXd L = sigma.llt().matrixL();
  Eigen::VectorXd z(p);
  for (Eigen::Index i = 0; i < n; ++i) {
    Rng rng(derive_seed(dgp.seed, kCovariateStream, static_cast<std::uint64_t>(i)));
    for (int j = 0; j < p; ++j) z(j) = special::norm_quantile(rng.uniform());
    x.row(i) = (L * z).transpose();
  }
  return x;
}

Eigen::MatrixXd true_eta(const DgpSpec& dgp, const Eigen::MatrixXd& x) {
  if (x.cols() != dgp.p) throw InputError("covariate matrix does not match the DGP's p");
  const TruePredictor truth(dgp);
  Eigen::MatrixXd eta(x.rows(), truth.n_params());
  std::vector<double> row(static_cast<std::size_t>(dgp.p));
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (int j = 0; j < dgp.p; ++j) row[j] = x(i, j);
    eta.row(i) = truth.eta(row).transpose();
  }
  return eta;
}

std::pair<std::vector<double>, std::vector<double>> gen_response(const DgpSpec& dgp,
                                                                 const Eigen::MatrixXd& x,
                                                                 int threads) {
  const Eigen::MatrixXd eta = true_eta(dgp, x);
  const std::size_t n = static_cast<std::size_t>(x.rows());
  std::vector<double> y1(n), y2(n);
  parallel_for(n, threads, [&](std::size_t i) {
    const EtaVector e = eta.row(static_cast<Eigen::Index>(i)).transpose();
    try {
      validate_eta(dgp.model, as_span(e));
    } catch (const Error& err) {
      throw DomainError("observation " + std::to_string(i + 1) + ": " + err.what());
    }
    Rng rng(derive_seed(dgp.seed, kResponseStream, i));
    const auto [a, b] = draw_pair(dgp.model, pair_params(dgp.model, e), rng);
    y1[i] = a;
    y2[i] = b;
  });
  return {std::move(y1), std::move(y2)};
}

Dataset simulate(const DgpSpec& dgp, int threads) {
  Dataset d;
  d.x = gen_covariates(dgp);
  auto [y1, y2] = gen_response(dgp, d.x, threads);
  d.y1 = std::move(y1);
  d.y2 = std::move(y2);
  d.partition.reserve(dgp.n());
  d.partition.insert(d.partition.end(), dgp.n_train, Partition::train);
  d.partition.insert(d.partition.end(), dgp.n_mstop, Partition::mstop);
  d.partition.insert(d.partition.end(), dgp.n_test, Partition::test);
  return d;
}

}  // namespace copboost
