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

// Acceptance suite: one PASS/FAIL line per criterion. Every tolerance and
// budget used for a verdict is a named constant below.
#include <CLI11.hpp>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <limits>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "copboost/boosting.hpp"
#include "copboost/config.hpp"
#include "copboost/copulas.hpp"
#include "copboost/likelihood.hpp"
#include "copboost/margins.hpp"
#include "copboost/model_io.hpp"
#include "copboost/scoring.hpp"
#include "copboost/simulate.hpp"
#include "copboost/special.hpp"
#include "copboost/stats.hpp"
#include "oracles.hpp"

namespace cb = copboost;
using cb::testing::all_copula_specs;
using cb::testing::cycle_spec;
using cb::testing::random_eta;

namespace tol {
// 1: gradients
constexpr int kGradDraws = 200;
constexpr double kGradRel = 1e-4;
constexpr double kGradAbs = 1e-8;
constexpr double kGradBudgetSec = 120;
// 2: copula properties
constexpr double kBoundary = 1e-12;
constexpr int kRectangles = 10000;
constexpr double kTwoIncreasing = -1e-12;
constexpr double kHfunRel = 1e-5;
constexpr double kPropBudgetSec = 60;
// 3: Kendall tau
constexpr int kTauSample = 200000;
constexpr double kTauMc = 0.015;
constexpr double kTauGauss = 1e-12;
constexpr double kTauBudgetSec = 120;
// 4, 5: factorisation and coherence
constexpr int kFactorDraws = 100;
constexpr double kFactor = 1e-10;
constexpr double kCells = 1e-12;
constexpr int kRectangleMax = 50;
constexpr double kRectangle = 1e-8;
// 6: binary scenario
constexpr int kS1Replicates = 20;
constexpr int kS1Mstop = 4000;
constexpr double kS1MarginSelection = 100.0;
constexpr double kS1CopulaSelection = 80.0;
constexpr double kS1BudgetSec = 30 * 60;
// 7: count scenario
constexpr int kS2Replicates = 10;
constexpr int kS2Mstop = 2000;
constexpr int kS2LogWins = 9;
constexpr int kS2EnergyWins = 7;
constexpr int kEnergySamples = 1000;
constexpr double kS2BudgetSec = 45 * 60;
// 8: nonlinear mixed scenario
constexpr int kS3Replicates = 10;
constexpr int kS3Mstop = 2000;
constexpr double kGridLo = 0.05, kGridHi = 0.95;
constexpr int kGridPoints = 91;
constexpr double kS3MarginSelection = 100.0;
// 9: engine
constexpr int kEngineMstop = 150;
constexpr double kRiskOrder = 1e-12;  // relative slack on the argmin check
constexpr double kRoundTrip = 1e-12;
// 10: MLE
constexpr int kMleIterations = 3000;
constexpr double kMle = 1e-4;
}  // namespace tol

namespace {

using Clock = std::chrono::steady_clock;

struct Verdict {
  bool pass = true;
  std::string detail;
  std::vector<std::string> failures;

  void check(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      if (failures.size() < 8) failures.push_back(what);
    }
  }
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double v, int digits = 4) {
  std::ostringstream s;
  s.precision(digits);
  s << v;
  return s.str();
}

double marginal_nll(const cb::MarginFamily& m, double y, std::span<const double> eta) {
  return -cb::margin_log_pdf(m, y, cb::margin_response(m, eta));
}

// ---------------------------------------------------------------- 1
Verdict gradients() {
  Verdict v;
  const auto t0 = Clock::now();
  cb::Rng rng(101);
  long checked = 0;
  double worst = 0.0;
  for (auto kind : {cb::PairKind::binary_binary, cb::PairKind::count_count,
                    cb::PairKind::binary_continuous}) {
    for (const auto& cop : all_copula_specs()) {
      for (int i = 0; i < tol::kGradDraws; ++i) {
        const auto spec = cycle_spec(kind, cop, i);
        const cb::EtaVector eta = random_eta(spec, rng);
        const auto [y1, y2] = cb::draw_pair(spec, cb::pair_params(spec, eta), rng);
        const cb::EtaVector g = cb::nll_gradient(spec, y1, y2, eta);
        const cb::EtaVector fd = cb::testing::fd_gradient(spec, y1, y2, eta);
        for (int k = 0; k < spec.n_params(); ++k) {
          ++checked;
          const double err = std::abs(g(k) - fd(k));
          if (err > tol::kGradAbs) worst = std::max(worst, err / std::max(std::abs(fd(k)), 1e-300));
          v.check(cb::testing::close_rel_abs(g(k), fd(k), tol::kGradRel, tol::kGradAbs),
                  std::string(cb::pair_kind_name(kind)) + " " + cop.name() + " " +
                      spec.param_name(k) + ": " + fmt(g(k), 10) + " vs " + fmt(fd(k), 10));
        }
      }
    }
  }
  const double t = seconds_since(t0);
  v.check(t < tol::kGradBudgetSec, "runtime " + fmt(t) + " s");
  v.detail = std::to_string(checked) + " components, worst rel err " + fmt(worst, 3) + ", " +
             fmt(t, 3) + " s";
  return v;
}

// ---------------------------------------------------------------- 2
Verdict copula_properties() {
  Verdict v;
  const auto t0 = Clock::now();
  cb::Rng rng(202);
  double min_mass = std::numeric_limits<double>::infinity(), worst_h = 0.0, worst_b = 0.0;
  for (const auto& s : all_copula_specs()) {
    for (int r = 0; r < tol::kRectangles; ++r) {
      const double th = cb::theta_response(s, 4.0 * rng.uniform() - 2.0);
      const double u = rng.uniform(), w = rng.uniform();
      if (r % 10 == 0) {
        const double b = std::max({std::abs(cb::copula_cdf(s, u, 0.0, th)),
                                   std::abs(cb::copula_cdf(s, 0.0, w, th)),
                                   std::abs(cb::copula_cdf(s, u, 1.0, th) - u),
                                   std::abs(cb::copula_cdf(s, 1.0, w, th) - w)});
        worst_b = std::max(worst_b, b);
        v.check(b <= tol::kBoundary, s.name() + " boundary error " + fmt(b, 3));
      }
      double u1 = rng.uniform(), u2 = rng.uniform(), v1 = rng.uniform(), v2 = rng.uniform();
      if (u1 > u2) std::swap(u1, u2);
      if (v1 > v2) std::swap(v1, v2);
      const double mass = cb::copula_cdf(s, u2, v2, th) - cb::copula_cdf(s, u1, v2, th) -
                          cb::copula_cdf(s, u2, v1, th) + cb::copula_cdf(s, u1, v1, th);
      min_mass = std::min(min_mass, mass);
      v.check(mass >= tol::kTwoIncreasing, s.name() + " rectangle mass " + fmt(mass, 3));

      if (r % 20 == 0) {
        const double a = 0.02 + 0.96 * u, b = 0.02 + 0.96 * w, h = 1e-6;
        const double fd1 = (cb::copula_cdf(s, a + h, b, th) - cb::copula_cdf(s, a - h, b, th)) / (2 * h);
        const double fd2 = (cb::copula_cdf(s, a, b + h, th) - cb::copula_cdf(s, a, b - h, th)) / (2 * h);
        for (auto [got, want] : {std::pair{cb::copula_hfun(s, a, b, th, 1), fd1},
                                 std::pair{cb::copula_hfun(s, a, b, th, 2), fd2}}) {
          // Relative to the value, floored where the derivative itself vanishes.
          const double rel = std::abs(got - want) / std::max(std::abs(want), 1e-3);
          worst_h = std::max(worst_h, rel);
          v.check(rel < tol::kHfunRel, s.name() + " h-function rel err " + fmt(rel, 3));
        }
      }
    }
  }
  const double t = seconds_since(t0);
  v.check(t < tol::kPropBudgetSec, "runtime " + fmt(t) + " s");
  v.detail = "28 specs; worst boundary " + fmt(worst_b, 3) + ", min rectangle mass " +
             fmt(min_mass, 3) + ", worst h rel err " + fmt(worst_h, 3) + ", " + fmt(t, 3) + " s";
  return v;
}

// ---------------------------------------------------------------- 3
Verdict kendall() {
  Verdict v;
  const auto t0 = Clock::now();
  using F = cb::CopulaFamily;
  const std::vector<std::pair<F, std::vector<double>>> grid = {
      {F::gauss, {-0.5, 0.3, 0.8}}, {F::clayton, {0.5, 2.0, 6.0}}, {F::gumbel, {1.3, 2.0, 4.0}},
      {F::frank, {-4.0, 2.0, 8.0}}, {F::fgm, {-0.8, 0.4, 1.0}},    {F::amh, {-0.8, 0.4, 0.9}},
      {F::joe, {1.5, 2.5, 5.0}}};
  double worst = 0.0;
  std::uint64_t seed = 303;
  for (const auto& [fam, thetas] : grid) {
    const auto s = cb::CopulaSpec::make(fam);
    for (double th : thetas) {
      const auto x = cb::copula_sample(s, th, tol::kTauSample, seed++);
      std::vector<double> a(x.col(0).begin(), x.col(0).end()), b(x.col(1).begin(), x.col(1).end());
      const double d = std::abs(cb::stats::kendall_tau(a, b) - cb::kendall_tau(s, th));
      worst = std::max(worst, d);
      v.check(d < tol::kTauMc, s.name() + " theta " + fmt(th) + ": |delta tau| " + fmt(d, 3));
    }
  }
  const double g = std::abs(cb::kendall_tau(cb::CopulaSpec::make(F::gauss), 0.5) - 1.0 / 3.0);
  v.check(g <= tol::kTauGauss, "gauss 0.5 analytic error " + fmt(g, 3));
  const double t = seconds_since(t0);
  v.check(t < tol::kTauBudgetSec, "runtime " + fmt(t) + " s");
  v.detail = "21 (family, theta) pairs at n = 200000, worst |delta| " + fmt(worst, 3) +
             ", gauss analytic err " + fmt(g, 3) + ", " + fmt(t, 3) + " s";
  return v;
}

// ---------------------------------------------------------------- 4
Verdict factorization() {
  Verdict v;
  cb::Rng rng(404);
  double worst = 0.0;
  for (auto kind : {cb::PairKind::binary_binary, cb::PairKind::count_count,
                    cb::PairKind::binary_continuous}) {
    for (auto fam : {cb::CopulaFamily::gauss, cb::CopulaFamily::fgm}) {
      for (int i = 0; i < tol::kFactorDraws; ++i) {
        const auto spec = cycle_spec(kind, cb::CopulaSpec::make(fam), i);
        cb::EtaVector eta = random_eta(spec, rng);
        eta(spec.copula_index()) = 0.0;
        const auto [y1, y2] = cb::draw_pair(spec, cb::pair_params(spec, eta), rng);
        const int k1 = spec.margin1.n_params;
        const double sum = marginal_nll(spec.margin1, y1, {eta.data(), std::size_t(k1)}) +
                           marginal_nll(spec.margin2, y2,
                                        {eta.data() + k1, std::size_t(spec.margin2.n_params)});
        const double d = std::abs(cb::joint_nll(spec, y1, y2, eta) - sum);
        worst = std::max(worst, d);
        v.check(d <= tol::kFactor, std::string(cb::pair_kind_name(kind)) + " " +
                                       std::string(cb::copula_family_name(fam)) + ": " + fmt(d, 3));
      }
    }
  }
  v.detail = "600 draws, worst |joint - marginal sum| " + fmt(worst, 3);
  return v;
}

// ---------------------------------------------------------------- 5
Verdict coherence() {
  Verdict v;
  cb::Rng rng(505);
  double worst_cells = 0.0, worst_rect = 0.0;
  const auto fams = cb::testing::count_families();
  for (const auto& cop : all_copula_specs()) {
    for (int i = 0; i < 50; ++i) {
      const double p1 = rng.uniform(), p2 = rng.uniform();
      const double th = cb::theta_response(cop, 4.0 * rng.uniform() - 2.0);
      const auto cells = cb::binary_cells(cop, p1, p2, th);
      const double d = std::abs(cells[0] + cells[1] + cells[2] + cells[3] - 1.0);
      worst_cells = std::max(worst_cells, d);
      v.check(d <= tol::kCells, cop.name() + " cell sum off by " + fmt(d, 3));
    }
    for (int i = 0; i < 2; ++i) {
      const auto spec = cb::ModelSpec::make(cb::PairKind::count_count,
                                            cb::MarginFamily::make(fams[rng() % fams.size()]),
                                            cb::MarginFamily::make(fams[rng() % fams.size()]), cop);
      const cb::EtaVector eta = random_eta(spec, rng);
      const cb::PairParams p = cb::pair_params(spec, eta);
      double total = 0.0;
      for (int a = 0; a <= tol::kRectangleMax; ++a)
        for (int b = 0; b <= tol::kRectangleMax; ++b)
          total += std::exp(-cb::joint_nll(spec, a, b, eta));
      const double want = cb::copula_cdf(cop, cb::margin_cdf(spec.margin1, tol::kRectangleMax, p.p1),
                                         cb::margin_cdf(spec.margin2, tol::kRectangleMax, p.p2),
                                         p.theta);
      const double d = std::abs(total - want);
      worst_rect = std::max(worst_rect, d);
      v.check(d <= tol::kRectangle, cop.name() + " rectangle total off by " + fmt(d, 3));
    }
  }
  v.detail = "worst four-cell error " + fmt(worst_cells, 3) + ", worst [0,50]^2 error " +
             fmt(worst_rect, 3);
  return v;
}

// ------------------------------------------------------- replicate studies

struct Fitted {
  cb::FittedModel model;  // truncated at the out-of-bag optimum
  int m_opt = 0;
};

Fitted fit_tuned(const cb::RunConfig& c, const cb::Dataset& data) {
  const cb::ModelSpec spec = c.fit_model();
  const cb::FitResult r = cb::boost_fit(spec, data, cb::build_learners(c, spec, data.p()), c.boost);
  const int m = cb::tune_mstop(r.trace);
  return {r.model.truncated(m), m};
}

cb::RunConfig scenario(const std::string& preset, int m_stop, const std::string& learners,
                       std::uint64_t seed, bool univariate) {
  std::string json = R"({"simulate": {"preset": ")" + preset +
                     R"("}, "boost": {"m_stop": )" + std::to_string(m_stop) +
                     R"(, "s_step": 0.1, "stabilization": "L2"}, "seed": )" +
                     std::to_string(seed) + R"(, "univariate": )" + (univariate ? "true" : "false");
  if (!learners.empty()) json += R"(, "learners": )" + learners;
  return cb::parse_config(json + "}");
}

// ---------------------------------------------------------------- 6
Verdict binary_study() {
  Verdict v;
  const auto t0 = Clock::now();
  std::vector<double> ls_c, ls_u;
  std::vector<cb::FittedModel> models;
  std::vector<std::set<int>> truth;
  for (int r = 1; r <= tol::kS1Replicates; ++r) {
    const cb::RunConfig cc = scenario("s1-binary-linear", tol::kS1Mstop, "", r, false);
    const cb::RunConfig cu = scenario("s1-binary-linear", tol::kS1Mstop, "", r, true);
    const cb::Dataset data = cb::simulate(*cc.simulate);
    const cb::Dataset test = data.subset(cb::Partition::test);
    if (truth.empty()) truth = cb::TruePredictor(*cc.simulate).informative();
    const Fitted fc = fit_tuned(cc, data), fu = fit_tuned(cu, data);
    ls_c.push_back(cb::log_score(fc.model, test));
    ls_u.push_back(cb::log_score(fu.model, test));
    models.push_back(fc.model);
    std::fprintf(stderr, "  s1 replicate %d: m_opt %d/%d, log score %.2f vs %.2f\n", r, fc.m_opt,
                 fu.m_opt, ls_c.back(), ls_u.back());
  }
  const double mc = cb::stats::mean(ls_c), mu = cb::stats::mean(ls_u);
  const cb::SelectionRates sel = cb::selection_rates(models, truth);
  v.check(mc < mu, "(a) copula mean log score " + fmt(mc, 6) + " not below " + fmt(mu, 6));
  for (int k = 0; k < 2; ++k)
    v.check(sel.informative[k] >= tol::kS1MarginSelection,
            "(b) margin " + std::to_string(k + 1) + " informative selection " +
                fmt(sel.informative[k]) + "%");
  v.check(sel.informative[2] >= tol::kS1CopulaSelection,
          "(c) copula informative selection " + fmt(sel.informative[2]) + "%");
  const double t = seconds_since(t0);
  v.check(t < tol::kS1BudgetSec, "runtime " + fmt(t) + " s");
  v.detail = "mean log score " + fmt(mc, 6) + " (copula) vs " + fmt(mu, 6) +
             " (univariate); informative selection " + fmt(sel.informative[0]) + "/" +
             fmt(sel.informative[1]) + "/" + fmt(sel.informative[2]) +
             "%; non-informative " + fmt(sel.noninformative[0]) + "/" +
             fmt(sel.noninformative[1]) + "/" + fmt(sel.noninformative[2]) + "%; " +
             fmt(t, 3) + " s";
  return v;
}

// ---------------------------------------------------------------- 7
Verdict count_study() {
  Verdict v;
  const auto t0 = Clock::now();
  int log_wins = 0, es_wins = 0;
  std::vector<double> ls_c, ls_u, es_c, es_u;
  for (int r = 1; r <= tol::kS2Replicates; ++r) {
    const cb::RunConfig cc = scenario("s2-count-linear", tol::kS2Mstop, "", r, false);
    const cb::RunConfig cu = scenario("s2-count-linear", tol::kS2Mstop, "", r, true);
    const cb::Dataset data = cb::simulate(*cc.simulate);
    const cb::Dataset test = data.subset(cb::Partition::test);
    const Fitted fc = fit_tuned(cc, data), fu = fit_tuned(cu, data);
    ls_c.push_back(cb::log_score(fc.model, test));
    ls_u.push_back(cb::log_score(fu.model, test));
    es_c.push_back(cb::energy_score(fc.model, test, tol::kEnergySamples, r));
    es_u.push_back(cb::energy_score(fu.model, test, tol::kEnergySamples, r));
    log_wins += ls_c.back() < ls_u.back();
    es_wins += es_c.back() < es_u.back();
    std::fprintf(stderr, "  s2 replicate %d: m_opt %d/%d, log %.1f vs %.1f, energy %.4f vs %.4f\n",
                 r, fc.m_opt, fu.m_opt, ls_c.back(), ls_u.back(), es_c.back(), es_u.back());
  }
  v.check(log_wins >= tol::kS2LogWins, "log score wins " + std::to_string(log_wins));
  v.check(es_wins >= tol::kS2EnergyWins, "energy score wins " + std::to_string(es_wins));
  const double t = seconds_since(t0);
  v.check(t < tol::kS2BudgetSec, "runtime " + fmt(t) + " s");
  v.detail = "copula better in " + std::to_string(log_wins) + "/10 (log) and " +
             std::to_string(es_wins) + "/10 (energy); means " + fmt(cb::stats::mean(ls_c), 6) +
             " vs " + fmt(cb::stats::mean(ls_u), 6) + ", " + fmt(cb::stats::mean(es_c)) +
             " vs " + fmt(cb::stats::mean(es_u)) + "; " + fmt(t, 3) + " s";
  return v;
}

// ---------------------------------------------------------------- 8
Verdict nonlinear_study() {
  Verdict v;
  const auto t0 = Clock::now();
  const std::string learners = R"({"type": "pspline", "df": 4})";
  std::vector<cb::FittedModel> models;
  std::vector<std::set<int>> truth;
  int K = 0;
  std::vector<double> err2, zero2;  // per parameter, summed over grid points and replicates
  for (int r = 1; r <= tol::kS3Replicates; ++r) {
    const cb::RunConfig c = scenario("s3-mixed-nonlinear", tol::kS3Mstop, learners, r, false);
    const cb::Dataset data = cb::simulate(*c.simulate);
    const Fitted f = fit_tuned(c, data);
    const cb::TruePredictor tp(*c.simulate);
    if (truth.empty()) {
      truth = tp.informative();
      K = static_cast<int>(truth.size());
      err2.assign(K, 0.0);
      zero2.assign(K, 0.0);
    }
    for (int k = 0; k < K; ++k) {
      if (truth[k].size() != 1) continue;
      const int j = *truth[k].begin();
      // Other covariates sit at the centre; the model is additive, so only
      // the centred curve in x_j matters.
      Eigen::MatrixXd x = Eigen::MatrixXd::Constant(tol::kGridPoints, data.p(), 0.5);
      for (int g = 0; g < tol::kGridPoints; ++g)
        x(g, j) = tol::kGridLo + (tol::kGridHi - tol::kGridLo) * g / (tol::kGridPoints - 1);
      Eigen::VectorXd est = cb::predict_eta(f.model, x).col(k);
      Eigen::VectorXd tru(tol::kGridPoints);
      for (int g = 0; g < tol::kGridPoints; ++g) {
        std::vector<double> row(x.cols());
        for (Eigen::Index c2 = 0; c2 < x.cols(); ++c2) row[c2] = x(g, c2);
        tru(g) = tp.eta(row)(k);
      }
      est.array() -= est.mean();
      tru.array() -= tru.mean();
      err2[k] += (est - tru).squaredNorm();
      zero2[k] += tru.squaredNorm();
    }
    models.push_back(f.model);
    std::fprintf(stderr, "  s3 replicate %d: m_opt %d\n", r, f.m_opt);
  }
  const cb::SelectionRates sel = cb::selection_rates(models, truth);
  std::string effects;
  for (int k = 0; k < K; ++k) {
    const double denom = double(tol::kGridPoints) * tol::kS3Replicates;
    const double rmse = std::sqrt(err2[k] / denom), rmse0 = std::sqrt(zero2[k] / denom);
    const std::string name = models.front().spec.param_name(k);
    v.check(rmse < rmse0, name + " effect RMSE " + fmt(rmse) + " not below " + fmt(rmse0));
    effects += (effects.empty() ? "" : ", ") + name + " " + fmt(rmse, 3) + "/" + fmt(rmse0, 3);
  }
  const cb::ModelSpec& spec = models.front().spec;
  std::string rates;
  for (int k = 0; k < K; ++k) {
    if (spec.block(k) == 2) continue;
    v.check(sel.informative[k] >= tol::kS3MarginSelection,
            spec.param_name(k) + " informative selection " + fmt(sel.informative[k]) + "%");
    rates += (rates.empty() ? "" : "/") + fmt(sel.informative[k]);
  }
  v.detail = "RMSE estimate/zero: " + effects + "; margin informative selection " + rates + "%; " +
             fmt(seconds_since(t0), 3) + " s";
  return v;
}

// ---------------------------------------------------------------- 9
std::string serialise(const cb::FitResult& r) {
  std::ostringstream s;
  cb::save_model(s, r.model, cb::ModelMeta{"", 1, "copula", tol::kEngineMstop, 0}, &r.trace);
  cb::write_trace_csv(s, r.model, r.trace);
  return s.str();
}

Verdict engine() {
  Verdict v;
  cb::DgpSpec dgp = cb::make_dgp(cb::Preset::s3_mixed_linear, 10, 909);
  const cb::Dataset data = cb::simulate(dgp);
  cb::RunConfig c = cb::parse_config(R"({"learners": {"type": "pspline", "df": 4}})");
  c.boost.m_stop = tol::kEngineMstop;
  const cb::ModelSpec spec = dgp.model;
  const cb::LearnerSet ls = cb::build_learners(c, spec, data.p());
  const cb::FitResult r = cb::boost_fit(spec, data, ls, c.boost);

  // One update per iteration.
  std::vector<int> seen(tol::kEngineMstop + 1, 0);
  for (const auto& e : r.model.ensembles)
    for (const auto& u : e) ++seen.at(u.iteration);
  int bad = 0;
  for (int m = 1; m <= tol::kEngineMstop; ++m) bad += seen[m] != 1;
  v.check(bad == 0 && int(r.trace.iterations.size()) == tol::kEngineMstop,
          std::to_string(bad) + " iterations without exactly one update");

  // Executed update is the argmin of the logged candidate risks.
  int order = 0;
  for (const auto& it : r.trace.iterations)
    for (int k = 0; k < spec.n_params(); ++k) {
      const double cand = it.candidate_risk(k);
      if (std::isnan(cand)) continue;
      order += it.train_risk > cand + tol::kRiskOrder * std::abs(cand);
    }
  v.check(order == 0, std::to_string(order) + " candidates beat the executed update");

  // No iterations: predictions are the offsets.
  cb::BoostConfig zero = c.boost;
  zero.m_stop = 0;
  const cb::FitResult r0 = cb::boost_fit(spec, data, ls, zero);
  const Eigen::MatrixXd e0 = cb::predict_eta(r0.model, data.x);
  double off = 0.0;
  for (Eigen::Index i = 0; i < e0.rows(); ++i)
    off = std::max(off, (e0.row(i).transpose() - r0.model.offsets).cwiseAbs().maxCoeff());
  v.check(off == 0.0, "m_stop = 0 predictions differ from offsets by " + fmt(off, 3));

  // Determinism, including a different thread count.
  cb::BoostConfig two = c.boost;
  two.threads = 2;
  const std::string a = serialise(r);
  v.check(a == serialise(cb::boost_fit(spec, data, ls, c.boost)), "rerun differs");
  v.check(a == serialise(cb::boost_fit(spec, data, ls, two)), "threads = 2 run differs");

  // Model file round trip on a probe set from another seed.
  cb::DgpSpec probe_dgp = cb::make_dgp(cb::Preset::s3_mixed_linear, 10, 910);
  probe_dgp.n_train = 500;
  probe_dgp.n_mstop = probe_dgp.n_test = 0;
  const Eigen::MatrixXd probe = cb::gen_covariates(probe_dgp);
  std::stringstream file;
  cb::save_model(file, r.model, cb::ModelMeta{});
  const cb::FittedModel back = cb::load_model(file);
  const double rt = (cb::predict_eta(back, probe) - cb::predict_eta(r.model, probe)).cwiseAbs().maxCoeff();
  const double rp =
      (cb::predict_eta_replay(r.model, probe) - cb::predict_eta(r.model, probe)).cwiseAbs().maxCoeff();
  v.check(rt <= tol::kRoundTrip, "round trip error " + fmt(rt, 3));
  v.check(rp <= tol::kRoundTrip, "ensemble replay error " + fmt(rp, 3));
  v.detail = std::to_string(tol::kEngineMstop) + " iterations; round trip " + fmt(rt, 3) +
             ", replay " + fmt(rp, 3) + ", determinism byte-exact";
  return v;
}

// ---------------------------------------------------------------- 10
Verdict mle_convergence() {
  Verdict v;
  const auto spec = cb::ModelSpec::make(
      cb::PairKind::binary_continuous, cb::MarginFamily::make(cb::Family::bernoulli, cb::Link::logit),
      cb::MarginFamily::make(cb::Family::gaussian), cb::CopulaSpec::make(cb::CopulaFamily::gauss));
  cb::Rng rng(1010);
  const int n = 1000;
  cb::Dataset d;
  d.x = Eigen::MatrixXd::Ones(n, 1);
  for (int i = 0; i < n; ++i) {
    d.y1.push_back(rng.uniform() < 0.3 ? 1.0 : 0.0);
    d.y2.push_back(2.0 + 1.5 * cb::special::norm_quantile(rng.uniform()));
    d.partition.push_back(cb::Partition::train);
  }
  const double p_hat = cb::stats::mean(d.y1), mu_hat = cb::stats::mean(d.y2);
  double ss = 0.0;
  for (double y : d.y2) ss += (y - mu_hat) * (y - mu_hat);
  const double sd_hat = std::sqrt(ss / n);

  // Parameter k starts well away from its MLE; the rest sit at theirs.
  const cb::EtaVector at_mle = (cb::EtaVector(4) << std::log(p_hat / (1 - p_hat)), mu_hat,
                                std::log(sd_hat), 0.0).finished();
  const double want[] = {p_hat, mu_hat, sd_hat};
  std::string detail;
  for (int k = 0; k < 3; ++k) {
    cb::LearnerSet ls(4);
    ls[k].push_back(cb::BaseLearnerDef::intercept());
    cb::BoostConfig cfg;
    cfg.m_stop = tol::kMleIterations;
    cfg.offsets = at_mle;
    (*cfg.offsets)(k) += 1.0;
    const cb::FitResult r = cb::boost_fit(spec, d, ls, cfg);
    const Eigen::MatrixXd th = cb::eta_to_theta(spec, cb::predict_eta(r.model, d.x.topRows(1)));
    const double err = std::abs(th(0, k) - want[k]);
    v.check(err < tol::kMle, spec.param_name(k) + " error " + fmt(err, 3));
    detail += (detail.empty() ? "" : ", ") + spec.param_name(k) + " " + fmt(err, 3);
  }
  v.detail = "|estimate - MLE| after " + std::to_string(tol::kMleIterations) + " iterations: " + detail;
  return v;
}

struct Criterion {
  int id;
  const char* title;
  std::function<Verdict()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all = {
      {1, "gradient oracle", gradients},
      {2, "copula properties", copula_properties},
      {3, "Kendall tau", kendall},
      {4, "independence factorisation", factorization},
      {5, "likelihood coherence", coherence},
      {6, "binary scenario study", binary_study},
      {7, "count scenario study", count_study},
      {8, "nonlinear mixed scenario study", nonlinear_study},
      {9, "engine invariants", engine},
      {10, "offset/MLE convergence", mle_convergence},
  };
  CLI::App app{"copboost acceptance suite"};
  std::vector<int> which;
  app.add_option("--criterion,-c", which, "criteria to run (default: all)")
      ->check(CLI::Range(1, 10));
  CLI11_PARSE(app, argc, argv);

  int failed = 0;
  for (const auto& c : all) {
    if (!which.empty() && std::find(which.begin(), which.end(), c.id) == which.end()) continue;
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v.pass = false;
      v.failures.push_back(std::string("exception: ") + e.what());
    }
    std::cout << "criterion " << c.id << " (" << c.title << "): " << (v.pass ? "PASS" : "FAIL")
              << (v.detail.empty() ? "" : " - " + v.detail) << '\n';
    for (const auto& f : v.failures) std::cout << "    " << f << '\n';
    std::cout.flush();
    failed += !v.pass;
  }
  return failed == 0 ? 0 : 1;
}
