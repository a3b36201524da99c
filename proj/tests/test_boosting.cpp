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

#include <gtest/gtest.h>

#include <cmath>

#include "copboost/boosting.hpp"
#include "copboost/error.hpp"
#include "copboost/simulate.hpp"
#include "copboost/special.hpp"
#include "copboost/stats.hpp"

namespace copboost {
namespace {

Dataset small_data(Preset preset, std::uint64_t seed, std::size_t n_train = 300,
                   std::size_t n_oob = 200) {
  DgpSpec d = make_dgp(preset, 6, seed);
  d.n_train = n_train;
  d.n_mstop = n_oob;
  d.n_test = 100;
  return simulate(d);
}

LearnerSet all_linear(int K, int p) {
  LearnerSet l(K);
  for (auto& v : l)
    for (int j = 0; j < p; ++j) v.push_back(BaseLearnerDef::linear(j));
  return l;
}

LearnerSet mixed_learners(int K, int p) {
  LearnerSet l(K);
  for (auto& v : l) {
    for (int j = 0; j < p; ++j) v.push_back(BaseLearnerDef::pspline(j));
    v.push_back(BaseLearnerDef::linear(0));
  }
  return l;
}

TEST(Boosting, ConfigValidation) {
  BoostConfig c;
  c.s_step = 1.0;
  EXPECT_THROW(c.validate(), ConfigError);
  c.s_step = 0.1;
  c.m_stop = -1;
  EXPECT_THROW(c.validate(), ConfigError);
  c.m_stop = 1;
  c.threads = 0;
  EXPECT_THROW(c.validate(), ConfigError);
}

TEST(Boosting, ZeroIterationsGiveOffsets) {
  const Dataset data = small_data(Preset::s3_mixed_linear, 1);
  const ModelSpec spec = preset_model(Preset::s3_mixed_linear);
  BoostConfig c;
  c.m_stop = 0;
  const FitResult r = boost_fit(spec, data, all_linear(4, 6), c);
  EXPECT_TRUE(r.trace.iterations.empty());
  EXPECT_EQ(r.model.m_used, 0);
  EXPECT_EQ(tune_mstop(r.trace), 0);
  const Eigen::MatrixXd eta = predict_eta(r.model, data.x);
  for (Eigen::Index i = 0; i < eta.rows(); ++i)
    for (int k = 0; k < 4; ++k) EXPECT_EQ(eta(i, k), r.model.offsets(k));
  EXPECT_EQ(r.model.offsets(3), 0.0);
  const Selection s = selected_covariates(r.model);
  for (const auto& set : s.covariates) EXPECT_TRUE(set.empty());
}

TEST(Boosting, OffsetsAreInterceptMles) {
  const Dataset data = small_data(Preset::s3_mixed_linear, 2);
  const ModelSpec spec = preset_model(Preset::s3_mixed_linear);
  BoostConfig c;
  c.m_stop = 0;
  const FitResult r = boost_fit(spec, data, all_linear(4, 6), c);
  const Dataset tr = data.subset(Partition::train);
  EXPECT_NEAR(r.model.offsets(0), special::norm_quantile(stats::mean(tr.y1)), 1e-8);
  EXPECT_NEAR(r.model.offsets(1), stats::mean(tr.y2), 1e-8);
  const double n = static_cast<double>(tr.n());
  EXPECT_NEAR(r.model.offsets(2), 0.5 * std::log(stats::variance(tr.y2) * (n - 1) / n), 1e-8);
}

// Only one parameter has a learner (its intercept); the copula is frozen at
// independence so that parameter's likelihood separates.
void check_intercept_mle(int k, double start, double mle, const Dataset& data,
                         const ModelSpec& spec) {
  LearnerSet l(spec.n_params());
  l[k] = {BaseLearnerDef::intercept()};
  BoostConfig c;
  c.m_stop = 2000;
  EtaVector off = EtaVector::Zero(spec.n_params());
  off(k) = start;
  c.offsets = off;
  const FitResult r = boost_fit(spec, data, l, c);
  const Eigen::MatrixXd eta = predict_eta(r.model, data.x.topRows(1));
  EXPECT_NEAR(eta(0, k), mle, 1e-4);
  EXPECT_EQ(static_cast<int>(r.model.ensembles[k].size()), 2000);
}

TEST(Boosting, InterceptConvergesToMle) {
  Dataset data = small_data(Preset::s3_mixed_linear, 3, 500, 0);
  const ModelSpec spec = ModelSpec::make(
      PairKind::binary_continuous, MarginFamily::make(Family::bernoulli, Link::probit),
      MarginFamily::make(Family::gaussian), CopulaSpec::make(CopulaFamily::gauss));
  const Dataset tr = data.subset(Partition::train);
  check_intercept_mle(1, 4.0, stats::mean(tr.y2), data, spec);
  check_intercept_mle(0, 1.5, special::norm_quantile(stats::mean(tr.y1)), data, spec);
}

class EngineInvariants : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    data_ = new Dataset(small_data(Preset::s3_mixed_linear, 5));
    config_.m_stop = 60;
    result_ = new FitResult(boost_fit(spec(), *data_, mixed_learners(4, 6), config_));
  }
  static void TearDownTestSuite() {
    delete data_;
    delete result_;
  }
  static ModelSpec spec() { return preset_model(Preset::s3_mixed_linear); }

  static Dataset* data_;
  static FitResult* result_;
  static BoostConfig config_;
};

Dataset* EngineInvariants::data_ = nullptr;
FitResult* EngineInvariants::result_ = nullptr;
BoostConfig EngineInvariants::config_;

TEST_F(EngineInvariants, OneUpdatePerIteration) {
  const auto& r = *result_;
  ASSERT_EQ(r.trace.iterations.size(), 60u);
  EXPECT_EQ(r.model.m_used, 60);
  std::size_t entries = 0;
  std::vector<int> seen(61, 0);
  for (const auto& ens : r.model.ensembles) {
    entries += ens.size();
    for (const auto& e : ens) ++seen[e.iteration];
  }
  EXPECT_EQ(entries, 60u);
  for (int m = 1; m <= 60; ++m) EXPECT_EQ(seen[m], 1);
  const Selection s = selected_covariates(r.model);
  int total = 0;
  for (const auto& c : s.counts)
    for (int v : c) total += v;
  EXPECT_EQ(total, 60);
}

TEST_F(EngineInvariants, ExecutedUpdateHasLowestRisk) {
  for (const auto& it : result_->trace.iterations) {
    EXPECT_EQ(it.train_risk, it.candidate_risk(it.parameter));
    for (int k = 0; k < 4; ++k) EXPECT_LE(it.train_risk, it.candidate_risk(k));
    EXPECT_TRUE(std::isfinite(it.oob_risk));
  }
}

TEST_F(EngineInvariants, EnsembleMatchesAggregate) {
  const Eigen::MatrixXd a = predict_eta(result_->model, data_->x);
  const Eigen::MatrixXd b = predict_eta_replay(result_->model, data_->x);
  EXPECT_LT((a - b).cwiseAbs().maxCoeff(), 1e-12);
  const Eigen::MatrixXd a30 = predict_eta(result_->model, data_->x, 30);
  const Eigen::MatrixXd b30 = predict_eta_replay(result_->model, data_->x, 30);
  EXPECT_LT((a30 - b30).cwiseAbs().maxCoeff(), 1e-12);
}

TEST_F(EngineInvariants, PredictReproducesTrainingRisk) {
  const Dataset tr = data_->subset(Partition::train);
  const double risk = total_nll(spec(), tr, predict_eta(result_->model, tr.x));
  EXPECT_NEAR(risk, result_->trace.iterations.back().train_risk, 1e-10);
  const Dataset oob = data_->subset(Partition::mstop);
  EXPECT_NEAR(total_nll(spec(), oob, predict_eta(result_->model, oob.x)),
              result_->trace.iterations.back().oob_risk, 1e-10);
  EXPECT_NEAR(total_nll(spec(), oob, predict_eta(result_->model, oob.x, 20)),
              result_->trace.iterations[19].oob_risk, 1e-10);
}

TEST_F(EngineInvariants, TruncationEqualsShorterRun) {
  BoostConfig c = config_;
  c.m_stop = 25;
  const FitResult shorter = boost_fit(spec(), *data_, mixed_learners(4, 6), c);
  const Eigen::MatrixXd a = predict_eta(result_->model, data_->x, 25);
  const Eigen::MatrixXd b = predict_eta(shorter.model, data_->x);
  EXPECT_LT((a - b).cwiseAbs().maxCoeff(), 1e-12);
  for (int m = 0; m < 25; ++m) {
    EXPECT_EQ(shorter.trace.iterations[m].parameter, result_->trace.iterations[m].parameter);
    EXPECT_EQ(shorter.trace.iterations[m].oob_risk, result_->trace.iterations[m].oob_risk);
  }
  EXPECT_EQ(result_->model.truncated(25).m_used, 25);
}

TEST_F(EngineInvariants, Deterministic) {
  BoostConfig c = config_;
  c.threads = 3;
  const FitResult again = boost_fit(spec(), *data_, mixed_learners(4, 6), c);
  ASSERT_EQ(again.trace.iterations.size(), result_->trace.iterations.size());
  for (std::size_t m = 0; m < again.trace.iterations.size(); ++m) {
    const auto& x = again.trace.iterations[m];
    const auto& y = result_->trace.iterations[m];
    EXPECT_EQ(x.parameter, y.parameter);
    EXPECT_EQ(x.learner, y.learner);
    EXPECT_EQ(x.train_risk, y.train_risk);
    EXPECT_EQ(x.oob_risk, y.oob_risk);
  }
  EXPECT_EQ(predict_eta(again.model, data_->x), predict_eta(result_->model, data_->x));
}

TEST_F(EngineInvariants, PredictedParametersInRange) {
  const Prediction p = predict(result_->model, data_->x);
  for (Eigen::Index i = 0; i < p.theta.rows(); ++i) {
    EXPECT_GT(p.theta(i, 0), 0.0);
    EXPECT_LT(p.theta(i, 0), 1.0);
    EXPECT_GT(p.theta(i, 2), 0.0);
    EXPECT_LT(p.theta(i, 3), 0.0);
  }
}

TEST_F(EngineInvariants, SelectionMatchesCounts) {
  const Selection s = selected_covariates(result_->model);
  for (std::size_t k = 0; k < s.counts.size(); ++k) {
    for (std::size_t l = 0; l < s.counts[k].size(); ++l) {
      const int c = result_->model.learners[k][l].def.covariate;
      if (s.counts[k][l] > 0) EXPECT_TRUE(s.covariates[k].count(c));
    }
    for (int c : s.covariates[k]) {
      int n = 0;
      for (std::size_t l = 0; l < s.counts[k].size(); ++l)
        if (result_->model.learners[k][l].def.covariate == c) n += s.counts[k][l];
      EXPECT_GT(n, 0);
    }
  }
  const Selection none = selected_covariates(result_->model.truncated(0));
  for (const auto& set : none.covariates) EXPECT_TRUE(set.empty());
}

TEST(Boosting, TuneMstop) {
  BoostTrace t;
  for (int m = 1; m <= 200; ++m) t.iterations.push_back({0, 0, 0.0, 500.0 - m, {}, {}});
  EXPECT_EQ(tune_mstop(t), 200);
  for (int m = 1; m <= 200; ++m) t.iterations[m - 1].oob_risk = std::abs(m - 137.0);
  EXPECT_EQ(tune_mstop(t), 137);
  t.iterations[149].oob_risk = 0.0;
  EXPECT_EQ(tune_mstop(t), 137);
  EXPECT_EQ(tune_mstop(BoostTrace{}), 0);
}

TEST(Boosting, Errors) {
  const Dataset data = small_data(Preset::s3_mixed_linear, 6, 50, 20);
  const ModelSpec spec = preset_model(Preset::s3_mixed_linear);
  BoostConfig c;
  c.m_stop = 2;
  EXPECT_THROW(boost_fit(spec, data, all_linear(3, 6), c), ConfigError);
  LearnerSet bad = all_linear(4, 6);
  bad[1].push_back(BaseLearnerDef::linear(9));
  EXPECT_THROW(boost_fit(spec, data, bad, c), ConfigError);
  EXPECT_THROW(boost_fit(spec, data, LearnerSet(4), c), ConfigError);
  Dataset wrong = data;
  wrong.y1[3] = 2.0;
  EXPECT_THROW(boost_fit(spec, wrong, all_linear(4, 6), c), InputError);
  const FitResult r = boost_fit(spec, data, all_linear(4, 6), c);
  EXPECT_THROW(predict_eta(r.model, data.x.leftCols(0)), InputError);
}

TEST(Boosting, FrozenParameterStaysAtOffset) {
  const Dataset data = small_data(Preset::s3_mixed_linear, 7);
  const ModelSpec spec = preset_model(Preset::s3_mixed_linear);
  LearnerSet l = all_linear(4, 6);
  l[3].clear();
  BoostConfig c;
  c.m_stop = 40;
  const FitResult r = boost_fit(spec, data, l, c);
  EXPECT_TRUE(r.model.ensembles[3].empty());
  for (const auto& it : r.trace.iterations) {
    EXPECT_NE(it.parameter, 3);
    EXPECT_TRUE(std::isnan(it.candidate_risk(3)));
  }
}

}  // namespace
}  // namespace copboost
