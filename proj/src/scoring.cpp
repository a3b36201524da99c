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

#include "copboost/scoring.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "copboost/error.hpp"
#include "copboost/parallel.hpp"
#include "copboost/rng.hpp"
#include "copboost/stats.hpp"

namespace copboost {

namespace {

constexpr std::uint64_t kEnergyStream = 3;

void check_rows(const FittedModel& model, const Dataset& test) {
  test.validate();
  if (test.n() == 0) throw InputError("no rows to score");
  if (test.p() < model.n_covariates)
    throw InputError("score data has " + std::to_string(test.p()) + " covariates, model needs " +
                     std::to_string(model.n_covariates));
}

const MarginFamily& margin_of(const FittedModel& model, int j) {
  if (j != 0 && j != 1) throw ConfigError("margin index must be 0 or 1");
  return j == 0 ? model.spec.margin1 : model.spec.margin2;
}

const std::vector<double>& response_of(const Dataset& d, int j) { return j == 0 ? d.y1 : d.y2; }

}  // namespace

double log_score(const FittedModel& model, const Dataset& test) {
  check_rows(model, test);
  return total_nll(model.spec, test, predict_eta(model, test.x));
}

double energy_score_sample(const Eigen::MatrixX2d& s, double y1, double y2) {
  const Eigen::Index S = s.rows();
  if (S < 2) throw ConfigError("energy score needs at least two samples");
  double to_obs = 0.0;
  for (Eigen::Index a = 0; a < S; ++a) to_obs += std::hypot(s(a, 0) - y1, s(a, 1) - y2);
  double pairs = 0.0;
  for (Eigen::Index a = 0; a < S; ++a) {
    double row = 0.0;
    for (Eigen::Index b = a + 1; b < S; ++b) {
      const double d0 = s(a, 0) - s(b, 0), d1 = s(a, 1) - s(b, 1);
      row += std::sqrt(d0 * d0 + d1 * d1);
    }
    pairs += row;
  }
  const double Sd = static_cast<double>(S);
  // The double sum over all ordered pairs is twice the sum over a < b.
  return to_obs / Sd - pairs / (Sd * Sd);
}

double energy_score(const FittedModel& model, const Dataset& test, int samples,
                    std::uint64_t seed, int threads) {
  check_rows(model, test);
  if (samples < 2) throw ConfigError("energy score needs at least two samples");
  const Eigen::MatrixXd eta = predict_eta(model, test.x);
  std::vector<double> per_row(test.n());
  parallel_for(test.n(), threads, [&](std::size_t i) {
    const EtaVector e = eta.row(static_cast<Eigen::Index>(i)).transpose();
    const PairParams params = pair_params(model.spec, e);
    Rng rng(derive_seed(seed, kEnergyStream, i));
    Eigen::MatrixX2d draws(samples, 2);
    for (int s = 0; s < samples; ++s) {
      const auto [a, b] = draw_pair(model.spec, params, rng);
      draws(s, 0) = a;
      draws(s, 1) = b;
    }
    per_row[i] = energy_score_sample(draws, test.y1[i], test.y2[i]);
  });
  double total = 0.0;
  for (double v : per_row) total += v;
  return total / static_cast<double>(test.n());
}

double brier_score(std::span<const double> prob, std::span<const double> y) {
  if (prob.size() != y.size() || y.empty()) throw InputError("brier: length mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) s += (prob[i] - y[i]) * (prob[i] - y[i]);
  return s / static_cast<double>(y.size());
}

double auc_score(std::span<const double> score, std::span<const double> y) {
  if (score.size() != y.size() || y.empty()) throw InputError("auc: length mismatch");
  const std::vector<double> ranks = stats::midranks(score);
  double n1 = 0.0, rank_sum = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (y[i] == 1.0) {
      n1 += 1.0;
      rank_sum += ranks[i];
    }
  }
  const double n0 = static_cast<double>(y.size()) - n1;
  if (n1 == 0.0 || n0 == 0.0) throw InputError("auc is undefined for a single-class margin");
  return (rank_sum - n1 * (n1 + 1.0) / 2.0) / (n1 * n0);
}

double mse(std::span<const double> pred, std::span<const double> y) {
  if (pred.size() != y.size() || y.empty()) throw InputError("msep: length mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) s += (pred[i] - y[i]) * (pred[i] - y[i]);
  return s / static_cast<double>(y.size());
}

namespace {

std::vector<double> binary_probability(const FittedModel& model, const Dataset& test, int j) {
  const MarginFamily& m = margin_of(model, j);
  if (m.support() != Support::binary)
    throw ConfigError("brier and auc need a binary margin");
  check_rows(model, test);
  const Eigen::MatrixXd theta = eta_to_theta(model.spec, predict_eta(model, test.x));
  const int col = j == 0 ? 0 : model.spec.margin1.n_params;
  std::vector<double> p(test.n());
  for (std::size_t i = 0; i < p.size(); ++i) p[i] = theta(static_cast<Eigen::Index>(i), col);
  return p;
}

}  // namespace

double brier(const FittedModel& model, const Dataset& test, int margin) {
  return brier_score(binary_probability(model, test, margin), response_of(test, margin));
}

double auc(const FittedModel& model, const Dataset& test, int margin) {
  return auc_score(binary_probability(model, test, margin), response_of(test, margin));
}

double msep(const FittedModel& model, const Dataset& test, int margin) {
  const MarginFamily& m = margin_of(model, margin);
  if (m.support() == Support::binary) throw ConfigError("msep needs a count or continuous margin");
  check_rows(model, test);
  const Eigen::MatrixXd eta = predict_eta(model, test.x);
  std::vector<double> pred(test.n());
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const EtaVector e = eta.row(static_cast<Eigen::Index>(i)).transpose();
    const PairParams p = pair_params(model.spec, e);
    pred[i] = margin_mean(m, margin == 0 ? p.p1 : p.p2);
  }
  return mse(pred, response_of(test, margin));
}

ScoreReport score_report(const FittedModel& model, const Dataset& test, int samples,
                         std::uint64_t seed, int threads) {
  ScoreReport r;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  r.log_score = log_score(model, test);
  r.energy_score = energy_score(model, test, samples, seed, threads);
  r.n_test = test.n();
  r.mc_samples = samples;
  for (int j = 0; j < 2; ++j) {
    r.brier[j] = r.auc[j] = r.msep[j] = nan;
    if (margin_of(model, j).support() == Support::binary) {
      r.brier[j] = brier(model, test, j);
      r.auc[j] = auc(model, test, j);
    } else {
      r.msep[j] = msep(model, test, j);
    }
  }
  return r;
}

bool same_spec(const ModelSpec& a, const ModelSpec& b) {
  auto same_margin = [](const MarginFamily& x, const MarginFamily& y) {
    if (x.family != y.family || x.n_params != y.n_params) return false;
    for (int k = 0; k < x.n_params; ++k)
      if (x.links[k] != y.links[k]) return false;
    return true;
  };
  return a.kind == b.kind && same_margin(a.margin1, b.margin1) &&
         same_margin(a.margin2, b.margin2) && a.copula.family == b.copula.family &&
         a.copula.rotation == b.copula.rotation;
}

SelectionRates selection_rates(std::span<const FittedModel> models,
                               const std::vector<std::set<int>>& truth) {
  if (models.empty()) throw InputError("no models to summarise");
  const ModelSpec& spec = models.front().spec;
  const int p = models.front().n_covariates;
  const int K = spec.n_params();
  for (const auto& m : models) {
    if (!same_spec(m.spec, spec) || m.n_covariates != p)
      throw InputError("selection rates need models with one spec and covariate count");
  }
  if (static_cast<int>(truth.size()) != K)
    throw InputError("truth lists " + std::to_string(truth.size()) + " parameters, model has " +
                     std::to_string(K));
  SelectionRates out;
  out.per_covariate.assign(K, std::vector<double>(p, 0.0));
  for (const auto& m : models) {
    const Selection s = selected_covariates(m);
    for (int k = 0; k < K; ++k)
      for (int c : s.covariates[k]) out.per_covariate[k][c] += 1.0;
  }
  const double R = static_cast<double>(models.size());
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (int k = 0; k < K; ++k) {
    double inf_sum = 0.0, non_sum = 0.0;
    int n_inf = 0, n_non = 0;
    for (int c = 0; c < p; ++c) {
      out.per_covariate[k][c] *= 100.0 / R;
      if (truth[k].count(c)) {
        inf_sum += out.per_covariate[k][c];
        ++n_inf;
      } else {
        non_sum += out.per_covariate[k][c];
        ++n_non;
      }
    }
    out.informative.push_back(n_inf ? inf_sum / n_inf : nan);
    out.noninformative.push_back(n_non ? non_sum / n_non : nan);
  }
  return out;
}

}  // namespace copboost
