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
#include <optional>
#include <set>
#include <vector>

#include "copboost/baselearners.hpp"
#include "copboost/data.hpp"
#include "copboost/likelihood.hpp"

namespace copboost {

struct BoostConfig {
  double s_step = 0.1;
  int m_stop = 100;
  Stabilization stabilization = Stabilization::L2;
  int threads = 1;
  // Replaces the intercept-only offsets when set.
  std::optional<EtaVector> offsets;

  void validate() const;
};

// Candidate learners per parameter, in parameter order. An empty list freezes
// that parameter at its offset.
using LearnerSet = std::vector<std::vector<BaseLearnerDef>>;

struct EnsembleEntry {
  int iteration = 0;  // 1-based
  int learner = 0;
  Eigen::VectorXd coefficients;  // already multiplied by the step length
};

struct FittedModel {
  ModelSpec spec;
  EtaVector offsets;
  std::vector<std::vector<LearnerBasis>> learners;
  std::vector<std::vector<EnsembleEntry>> ensembles;
  std::vector<std::vector<Eigen::VectorXd>> aggregated;
  int m_used = 0;
  int n_covariates = 0;

  // Same model with only the first m updates kept.
  FittedModel truncated(int m) const;
};

struct IterationRecord {
  int parameter = -1;
  int learner = -1;
  double train_risk = 0.0;
  double oob_risk = 0.0;
  // Training risk after each parameter's best trial update; NaN for frozen
  // parameters.
  EtaVector candidate_risk;
  std::vector<int> candidate_learner;
};

struct BoostTrace {
  double initial_train_risk = 0.0;
  double initial_oob_risk = 0.0;
  bool has_oobag = false;
  std::vector<IterationRecord> iterations;
};

struct FitResult {
  FittedModel model;
  BoostTrace trace;
};

// Rows marked train are fitted, rows marked mstop give the out-of-bag risk,
// test rows are ignored. Risks are sums over rows.
FitResult boost_fit(const ModelSpec& spec, const Dataset& data, const LearnerSet& learners,
                    const BoostConfig& config);

struct Prediction {
  Eigen::MatrixXd eta;    // n x K
  Eigen::MatrixXd theta;  // natural scale, n x K
};

Eigen::MatrixXd predict_eta(const FittedModel& model, const Eigen::MatrixXd& x,
                            std::optional<int> at_iteration = std::nullopt);
// Replays ensemble entries one by one instead of using the aggregated sums.
Eigen::MatrixXd predict_eta_replay(const FittedModel& model, const Eigen::MatrixXd& x,
                                   std::optional<int> at_iteration = std::nullopt);
Prediction predict(const FittedModel& model, const Eigen::MatrixXd& x,
                   std::optional<int> at_iteration = std::nullopt);
Eigen::MatrixXd eta_to_theta(const ModelSpec& spec, const Eigen::MatrixXd& eta);

// Sum of joint_nll over the rows of data.
double total_nll(const ModelSpec& spec, const Dataset& data, const Eigen::MatrixXd& eta);

// argmin of the out-of-bag risk over iterations 1..M, ties to the smallest;
// 0 for an empty trace.
int tune_mstop(const BoostTrace& trace);

struct Selection {
  std::vector<std::set<int>> covariates;  // per parameter, 0-based columns
  std::vector<std::vector<int>> counts;   // per parameter and learner
};
Selection selected_covariates(const FittedModel& model);

}  // namespace copboost
