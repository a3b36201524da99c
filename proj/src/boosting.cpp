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

#include "copboost/boosting.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "copboost/error.hpp"
#include "copboost/parallel.hpp"

namespace copboost {

void BoostConfig::validate() const {
  if (!(s_step > 0.0 && s_step < 1.0)) throw ConfigError("s_step must lie in (0, 1)");
  if (m_stop < 0) throw ConfigError("m_stop must be non-negative");
  if (threads < 1) throw ConfigError("threads must be at least 1");
}

namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

int block_offset(const ModelSpec& spec, int block) {
  return block == 0 ? 0 : block == 1 ? spec.margin1.n_params : spec.copula_index();
}

// Current predictors and cached per-margin summaries for one group of rows.
struct RowGroup {
  std::vector<double> y1, y2;
  Eigen::MatrixXd x;
  RowMatrix eta;
  std::vector<MarginEval> s1, s2;
  std::vector<double> theta, nll;

  std::size_t n() const { return y1.size(); }
};

MarginEval block_state(const ModelSpec& spec, int block, double y, const double* eta_block) {
  const MarginFamily& m = spec.margin(block);
  const ParamVector p =
      margin_response(m, std::span<const double>(eta_block, static_cast<std::size_t>(m.n_params)));
  return margin_state(m, y, p);
}

void refresh_block(const ModelSpec& spec, RowGroup& g, int block, int threads) {
  const int off = block_offset(spec, block);
  const int K = spec.n_params();
  parallel_for(g.n(), threads, [&](std::size_t i) {
    const double* row = g.eta.data() + i * K;
    if (block == 2) {
      g.theta[i] = theta_response(spec.copula, row[off]);
    } else if (block == 0) {
      g.s1[i] = block_state(spec, 0, g.y1[i], row + off);
    } else {
      g.s2[i] = block_state(spec, 1, g.y2[i], row + off);
    }
    g.nll[i] = pair_nll(spec, g.y1[i], g.y2[i], g.s1[i], g.s2[i], g.theta[i]);
  });
}

double ordered_sum(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s;
}

RowGroup make_group(const ModelSpec& spec, const Dataset& data, Partition part,
                    const EtaVector& offsets, int threads) {
  RowGroup g;
  const Dataset sub = data.subset(part);
  g.y1 = sub.y1;
  g.y2 = sub.y2;
  g.x = sub.x;
  const std::size_t n = g.n();
  g.eta.resize(static_cast<Eigen::Index>(n), spec.n_params());
  for (Eigen::Index i = 0; i < g.eta.rows(); ++i) g.eta.row(i) = offsets.transpose();
  g.s1.resize(n);
  g.s2.resize(n);
  g.theta.resize(n);
  g.nll.resize(n);
  const int K = spec.n_params();
  const int off2 = block_offset(spec, 1);
  parallel_for(n, threads, [&](std::size_t i) {
    const double* row = g.eta.data() + i * K;
    g.s1[i] = block_state(spec, 0, g.y1[i], row);
    g.s2[i] = block_state(spec, 1, g.y2[i], row + off2);
    g.theta[i] = theta_response(spec.copula, row[K - 1]);
    g.nll[i] = pair_nll(spec, g.y1[i], g.y2[i], g.s1[i], g.s2[i], g.theta[i]);
  });
  return g;
}

void check_finite(double risk, int iteration, const std::string& what) {
  if (!std::isfinite(risk))
    throw NumericError("iteration " + std::to_string(iteration) + ": non-finite risk (" + what +
                       ")");
}

std::span<const double> column_of(const Eigen::MatrixXd& x, int c) {
  return {x.col(c).data(), static_cast<std::size_t>(x.rows())};
}

// Candidate learner bound to the training rows, with its out-of-bag design.
struct Candidate {
  LearnerFit fit;
  Eigen::MatrixXd oob_design;
};

Eigen::MatrixXd learner_design(const LearnerBasis& basis, const Eigen::MatrixXd& x) {
  if (basis.def.kind == LearnerKind::intercept) return Eigen::MatrixXd::Ones(x.rows(), 1);
  return bl_design(basis, column_of(x, basis.def.covariate));
}

}  // namespace

FitResult boost_fit(const ModelSpec& spec, const Dataset& data, const LearnerSet& learners,
                    const BoostConfig& config) {
  config.validate();
  data.validate();
  const int K = spec.n_params();
  if (static_cast<int>(learners.size()) != K)
    throw ConfigError("expected learner lists for " + std::to_string(K) + " parameters, got " +
                      std::to_string(learners.size()));
  bool any = false;
  for (int k = 0; k < K; ++k) {
    any = any || !learners[k].empty();
    for (const auto& def : learners[k]) {
      if (def.kind != LearnerKind::intercept && (def.covariate < 0 || def.covariate >= data.p()))
        throw ConfigError("learner " + def.name() + " for " + spec.param_name(k) +
                          " refers to a missing covariate");
    }
  }
  if (!any) throw ConfigError("no parameter has candidate learners");
  if (data.count(Partition::train) == 0) throw InputError("no training rows");
  for (std::size_t i = 0; i < data.n(); ++i) {
    if (data.partition[i] == Partition::test) continue;
    try {
      validate_response(spec.margin1, data.y1[i]);
      validate_response(spec.margin2, data.y2[i]);
    } catch (const Error& e) {
      throw InputError("row " + std::to_string(i + 1) + ": " + e.what());
    }
  }
  const int threads = config.threads;

  FitResult result;
  FittedModel& model = result.model;
  model.spec = spec;
  model.n_covariates = data.p();
  model.offsets = EtaVector::Zero(K);
  if (config.offsets) {
    if (config.offsets->size() != K) throw ConfigError("offset override has the wrong length");
    model.offsets = *config.offsets;
  } else {
    const Dataset train = data.subset(Partition::train);
    const ParamVector o1 = margin_offset(spec.margin1, train.y1);
    const ParamVector o2 = margin_offset(spec.margin2, train.y2);
    model.offsets.head(spec.margin1.n_params) = o1;
    model.offsets.segment(spec.margin1.n_params, spec.margin2.n_params) = o2;
  }

  RowGroup tr = make_group(spec, data, Partition::train, model.offsets, threads);
  RowGroup oob = make_group(spec, data, Partition::mstop, model.offsets, threads);

  std::vector<std::vector<Candidate>> cands(K);
  std::vector<double> ones(tr.n(), 1.0);
  model.learners.resize(K);
  model.ensembles.resize(K);
  model.aggregated.resize(K);
  for (int k = 0; k < K; ++k) {
    for (const auto& def : learners[k]) {
      std::span<const double> xcol =
          def.kind == LearnerKind::intercept ? std::span<const double>(ones)
                                             : column_of(tr.x, def.covariate);
      LearnerBasis basis = bl_basis(def, xcol);
      LearnerFit fit(basis, xcol, ones);
      cands[k].push_back({std::move(fit), learner_design(basis, oob.x)});
      model.learners[k].push_back(basis);
      model.aggregated[k].push_back(Eigen::VectorXd::Zero(basis.dim()));
    }
  }

  BoostTrace& trace = result.trace;
  trace.has_oobag = oob.n() > 0;
  trace.initial_train_risk = ordered_sum(tr.nll);
  trace.initial_oob_risk = ordered_sum(oob.nll);
  check_finite(trace.initial_train_risk, 0, "training risk at the offsets");
  check_finite(trace.initial_oob_risk, 0, "out-of-bag risk at the offsets");

  const double nan = std::numeric_limits<double>::quiet_NaN();
  RowMatrix grad(static_cast<Eigen::Index>(tr.n()), K);
  std::vector<double> row_risk(tr.n());

  for (int m = 1; m <= config.m_stop; ++m) {
    // Negative gradient on the training rows.
    try {
      parallel_for(tr.n(), threads, [&](std::size_t i) {
        const double* row = tr.eta.data() + i * K;
        const EtaVector g =
            nll_gradient(spec, tr.y1[i], tr.y2[i], std::span<const double>(row, K));
        grad.row(static_cast<Eigen::Index>(i)) = -g.transpose();
      });
    } catch (const Error& e) {
      throw NumericError("iteration " + std::to_string(m) + ", gradient: " + e.what());
    }

    IterationRecord rec;
    rec.candidate_risk = EtaVector::Constant(K, nan);
    rec.candidate_learner.assign(K, -1);
    std::vector<Eigen::VectorXd> best_coef(K);
    std::vector<Eigen::VectorXd> best_fitted(K);

    for (int k = 0; k < K; ++k) {
      if (cands[k].empty()) continue;
      std::vector<double> u(tr.n());
      for (std::size_t i = 0; i < tr.n(); ++i) u[i] = grad(static_cast<Eigen::Index>(i), k);
      stabilize(u, config.stabilization);

      std::vector<FittedLearner> fits(cands[k].size());
      parallel_for(fits.size(), threads, [&](std::size_t l) { fits[l] = cands[k][l].fit.fit(u); });
      int best = 0;
      for (std::size_t l = 1; l < fits.size(); ++l)
        if (fits[l].rss < fits[best].rss) best = static_cast<int>(l);
      best_coef[k] = config.s_step * fits[best].coefficients;
      best_fitted[k] = cands[k][best].fit.fitted(best_coef[k]);

      // Full training risk after the trial update of parameter k alone.
      const int block = spec.block(k);
      const int off = block_offset(spec, block);
      const int local = k - off;
      const Eigen::VectorXd& f = best_fitted[k];
      try {
        parallel_for(tr.n(), threads, [&](std::size_t i) {
          const double* row = tr.eta.data() + i * K;
          if (block == 2) {
            const double th = theta_response(spec.copula, row[k] + f(i));
            row_risk[i] = pair_nll(spec, tr.y1[i], tr.y2[i], tr.s1[i], tr.s2[i], th);
            return;
          }
          double local_eta[kMaxMarginParams];
          const int np = spec.margin(block).n_params;
          for (int j = 0; j < np; ++j) local_eta[j] = row[off + j];
          local_eta[local] += f(i);
          if (block == 0) {
            const MarginEval s = block_state(spec, 0, tr.y1[i], local_eta);
            row_risk[i] = pair_nll(spec, tr.y1[i], tr.y2[i], s, tr.s2[i], tr.theta[i]);
          } else {
            const MarginEval s = block_state(spec, 1, tr.y2[i], local_eta);
            row_risk[i] = pair_nll(spec, tr.y1[i], tr.y2[i], tr.s1[i], s, tr.theta[i]);
          }
        });
      } catch (const Error& e) {
        throw NumericError("iteration " + std::to_string(m) + ", parameter " +
                           spec.param_name(k) + ": " + e.what());
      }
      const double risk = ordered_sum(row_risk);
      check_finite(risk, m, "parameter " + spec.param_name(k));
      rec.candidate_risk(k) = risk;
      rec.candidate_learner[k] = best;
    }

    int k_best = -1;
    for (int k = 0; k < K; ++k) {
      if (rec.candidate_learner[k] < 0) continue;
      if (k_best < 0 || rec.candidate_risk(k) < rec.candidate_risk(k_best)) k_best = k;
    }
    const int l_best = rec.candidate_learner[k_best];

    tr.eta.col(k_best) += best_fitted[k_best];
    if (oob.n() > 0) oob.eta.col(k_best) += cands[k_best][l_best].oob_design * best_coef[k_best];
    try {
      refresh_block(spec, tr, spec.block(k_best), threads);
      refresh_block(spec, oob, spec.block(k_best), threads);
    } catch (const Error& e) {
      throw NumericError("iteration " + std::to_string(m) + ", parameter " +
                         spec.param_name(k_best) + ": " + e.what());
    }
    rec.parameter = k_best;
    rec.learner = l_best;
    rec.train_risk = ordered_sum(tr.nll);
    rec.oob_risk = ordered_sum(oob.nll);
    check_finite(rec.train_risk, m, "training risk, parameter " + spec.param_name(k_best));
    check_finite(rec.oob_risk, m, "out-of-bag risk, parameter " + spec.param_name(k_best));

    model.ensembles[k_best].push_back({m, l_best, best_coef[k_best]});
    model.aggregated[k_best][l_best] += best_coef[k_best];
    model.m_used = m;
    trace.iterations.push_back(std::move(rec));
  }
  return result;
}

FittedModel FittedModel::truncated(int m) const {
  FittedModel out = *this;
  out.m_used = 0;
  for (std::size_t k = 0; k < ensembles.size(); ++k) {
    auto& ens = out.ensembles[k];
    std::erase_if(ens, [m](const EnsembleEntry& e) { return e.iteration > m; });
    for (auto& a : out.aggregated[k]) a.setZero();
    for (const auto& e : ens) {
      out.aggregated[k][e.learner] += e.coefficients;
      out.m_used = std::max(out.m_used, e.iteration);
    }
  }
  out.m_used = std::min(m, m_used);
  return out;
}

namespace {

void check_columns(const FittedModel& model, const Eigen::MatrixXd& x) {
  for (std::size_t k = 0; k < model.ensembles.size(); ++k) {
    for (const auto& e : model.ensembles[k]) {
      const auto& def = model.learners[k][e.learner].def;
      if (def.kind != LearnerKind::intercept && def.covariate >= x.cols())
        throw InputError("covariate x" + std::to_string(def.covariate + 1) +
                         " used by the model is missing from the data");
    }
  }
}

Eigen::VectorXd learner_values(const LearnerBasis& basis, const Eigen::VectorXd& coef,
                               const Eigen::MatrixXd& x) {
  if (basis.def.kind == LearnerKind::intercept) return Eigen::VectorXd::Constant(x.rows(), coef(0));
  return bl_predict(basis, coef, column_of(x, basis.def.covariate));
}

}  // namespace

Eigen::MatrixXd predict_eta(const FittedModel& model, const Eigen::MatrixXd& x,
                            std::optional<int> at_iteration) {
  if (at_iteration && *at_iteration < model.m_used)
    return predict_eta(model.truncated(*at_iteration), x);
  check_columns(model, x);
  const int K = model.spec.n_params();
  Eigen::MatrixXd eta(x.rows(), K);
  for (int k = 0; k < K; ++k) {
    eta.col(k).setConstant(model.offsets(k));
    std::vector<bool> used(model.learners[k].size(), false);
    for (const auto& e : model.ensembles[k]) used[e.learner] = true;
    for (std::size_t l = 0; l < used.size(); ++l)
      if (used[l]) eta.col(k) += learner_values(model.learners[k][l], model.aggregated[k][l], x);
  }
  return eta;
}

Eigen::MatrixXd predict_eta_replay(const FittedModel& model, const Eigen::MatrixXd& x,
                                   std::optional<int> at_iteration) {
  check_columns(model, x);
  const int limit = at_iteration.value_or(model.m_used);
  const int K = model.spec.n_params();
  Eigen::MatrixXd eta(x.rows(), K);
  for (int k = 0; k < K; ++k) {
    eta.col(k).setConstant(model.offsets(k));
    for (const auto& e : model.ensembles[k])
      if (e.iteration <= limit)
        eta.col(k) += learner_values(model.learners[k][e.learner], e.coefficients, x);
  }
  return eta;
}

Eigen::MatrixXd eta_to_theta(const ModelSpec& spec, const Eigen::MatrixXd& eta) {
  const int K = spec.n_params();
  const int n1 = spec.margin1.n_params;
  const int n2 = spec.margin2.n_params;
  Eigen::MatrixXd out(eta.rows(), K);
  for (Eigen::Index i = 0; i < eta.rows(); ++i) {
    const EtaVector row = eta.row(i).transpose();
    const PairParams p = pair_params(spec, row);
    out.row(i).head(n1) = p.p1.transpose();
    out.row(i).segment(n1, n2) = p.p2.transpose();
    out(i, K - 1) = p.theta;
  }
  return out;
}

Prediction predict(const FittedModel& model, const Eigen::MatrixXd& x,
                   std::optional<int> at_iteration) {
  Prediction p;
  p.eta = predict_eta(model, x, at_iteration);
  p.theta = eta_to_theta(model.spec, p.eta);
  return p;
}

double total_nll(const ModelSpec& spec, const Dataset& data, const Eigen::MatrixXd& eta) {
  if (static_cast<std::size_t>(eta.rows()) != data.n() || eta.cols() != spec.n_params())
    throw InputError("predictor matrix does not match the data");
  double s = 0.0;
  for (std::size_t i = 0; i < data.n(); ++i) {
    const EtaVector row = eta.row(static_cast<Eigen::Index>(i)).transpose();
    try {
      s += joint_nll(spec, data.y1[i], data.y2[i], row);
    } catch (const NumericError& e) {
      throw NumericError("row " + std::to_string(i + 1) + ": " + e.what());
    } catch (const Error& e) {
      throw DomainError("row " + std::to_string(i + 1) + ": " + e.what());
    }
  }
  return s;
}

int tune_mstop(const BoostTrace& trace) {
  int best = 0;
  for (std::size_t m = 0; m < trace.iterations.size(); ++m)
    if (best == 0 || trace.iterations[m].oob_risk < trace.iterations[best - 1].oob_risk)
      best = static_cast<int>(m) + 1;
  return best;
}

Selection selected_covariates(const FittedModel& model) {
  Selection s;
  const std::size_t K = model.learners.size();
  s.covariates.resize(K);
  s.counts.resize(K);
  for (std::size_t k = 0; k < K; ++k) {
    s.counts[k].assign(model.learners[k].size(), 0);
    for (const auto& e : model.ensembles[k]) {
      if (e.iteration > model.m_used) continue;
      ++s.counts[k][e.learner];
      const int c = model.learners[k][e.learner].def.covariate;
      if (model.learners[k][e.learner].def.kind != LearnerKind::intercept) s.covariates[k].insert(c);
    }
  }
  return s;
}

}  // namespace copboost
