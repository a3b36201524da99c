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
#include <cstdint>
#include <set>
#include <span>
#include <vector>

#include "copboost/boosting.hpp"

namespace copboost {

// Sum of joint_nll over the rows of test.
double log_score(const FittedModel& model, const Dataset& test);

// Sample energy score of one observation, samples given as S x 2.
double energy_score_sample(const Eigen::MatrixX2d& samples, double y1, double y2);
// Mean over rows of the sample energy score with S draws per row from the
// fitted bivariate distribution. Row r draws from a stream derived from
// (seed, r).
double energy_score(const FittedModel& model, const Dataset& test, int samples = 1000,
                    std::uint64_t seed = 1, int threads = 1);

// Metric kernels on predictions.
double brier_score(std::span<const double> prob, std::span<const double> y);
// Mann-Whitney statistic with mid ranks; InputError when y has one class.
double auc_score(std::span<const double> score, std::span<const double> y);
double mse(std::span<const double> pred, std::span<const double> y);

// Margin j is 0 or 1. brier/auc need a binary margin, msep a count or
// continuous one (ConfigError otherwise).
double brier(const FittedModel& model, const Dataset& test, int margin);
double auc(const FittedModel& model, const Dataset& test, int margin);
double msep(const FittedModel& model, const Dataset& test, int margin);

struct ScoreReport {
  double log_score = 0.0;
  double energy_score = 0.0;
  // NaN where the metric does not apply to the margin.
  std::array<double, 2> brier{};
  std::array<double, 2> auc{};
  std::array<double, 2> msep{};
  std::size_t n_test = 0;
  int mc_samples = 0;
};

ScoreReport score_report(const FittedModel& model, const Dataset& test, int samples = 1000,
                         std::uint64_t seed = 1, int threads = 1);

struct SelectionRates {
  // Percent, per parameter. NaN when a parameter has no covariate in that
  // class.
  std::vector<double> informative;
  std::vector<double> noninformative;
  // Percent of replicates selecting each covariate, per parameter.
  std::vector<std::vector<double>> per_covariate;
};

// truth[k] lists the informative covariates of parameter k. InputError when
// the models do not share a spec and covariate count.
SelectionRates selection_rates(std::span<const FittedModel> models,
                               const std::vector<std::set<int>>& truth);

bool same_spec(const ModelSpec& a, const ModelSpec& b);

}  // namespace copboost
