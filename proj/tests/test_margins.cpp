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
#include <vector>

#include "copboost/error.hpp"
#include "copboost/margins.hpp"
#include "copboost/rng.hpp"
#include "copboost/stats.hpp"

namespace copboost {
namespace {

ParamVector pv(std::initializer_list<double> v) {
  ParamVector p(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) p(i++) = x;
  return p;
}

// Reference masses written out directly from the gamlss definitions.
double nb_ref(double y, double mu, double s) {
  return std::exp(std::lgamma(y + 1.0 / s) - std::lgamma(1.0 / s) - std::lgamma(y + 1.0) +
                  y * std::log(s * mu / (1.0 + s * mu)) - std::log(1.0 + s * mu) / s);
}

double zalg_ref(double y, double mu, double sigma) {
  if (y == 0) return sigma;
  const double alpha = -1.0 / std::log(1.0 - mu);
  return (1.0 - sigma) * alpha * std::pow(mu, y) / y;
}

double zip_ref(double y, double mu, double sigma) {
  const double pois = std::exp(-mu + y * std::log(mu) - std::lgamma(y + 1.0));
  return (y == 0 ? sigma : 0.0) + (1.0 - sigma) * pois;
}

struct Case {
  Family family;
  ParamVector params;
};

std::vector<Case> random_cases(std::uint64_t seed, int per_family) {
  Rng rng(seed);
  std::vector<Case> out;
  for (int r = 0; r < per_family; ++r) {
    const double a = rng.uniform(), b = rng.uniform(), c = rng.uniform();
    out.push_back({Family::poisson, pv({0.1 + 15.0 * a})});
    out.push_back({Family::geometric, pv({0.1 + 8.0 * a})});
    out.push_back({Family::negbin1, pv({0.2 + 10.0 * a, 0.05 + 2.0 * b})});
    out.push_back({Family::zalg, pv({0.05 + 0.9 * a, 0.05 + 0.9 * b})});
    out.push_back({Family::zip, pv({0.2 + 10.0 * a, 0.9 * b})});
    out.push_back({Family::zanbi, pv({0.2 + 10.0 * a, 0.05 + 2.0 * b, 0.9 * c})});
    out.push_back({Family::zinbi, pv({0.2 + 10.0 * a, 0.05 + 2.0 * b, 0.9 * c})});
  }
  return out;
}

MarginFamily mk(Family f) { return MarginFamily::make(f); }

TEST(Margins, ParameterCounts) {
  EXPECT_EQ(family_n_params(Family::bernoulli), 1);
  EXPECT_EQ(family_n_params(Family::gaussian), 2);
  EXPECT_EQ(family_n_params(Family::poisson), 1);
  EXPECT_EQ(family_n_params(Family::geometric), 1);
  EXPECT_EQ(family_n_params(Family::negbin1), 2);
  EXPECT_EQ(family_n_params(Family::zalg), 2);
  EXPECT_EQ(family_n_params(Family::zip), 2);
  EXPECT_EQ(family_n_params(Family::zanbi), 3);
  EXPECT_EQ(family_n_params(Family::zinbi), 3);
  for (auto name : {"bernoulli", "gaussian", "poisson", "geometric", "negbin1", "zalg", "zip",
                    "zanbi", "zinbi"}) {
    EXPECT_EQ(family_name(parse_family(name)), name);
  }
  EXPECT_THROW(parse_family("weibull"), ConfigError);
}

TEST(Margins, PdfExamples) {
  EXPECT_NEAR(margin_pdf(mk(Family::poisson), 0, pv({1.0})), std::exp(-1.0), 1e-15);
  EXPECT_NEAR(margin_pdf(mk(Family::bernoulli), 1, pv({0.3})), 0.3, 1e-15);
  const ParamVector z = pv({2.5, 0.7, 0.2});
  EXPECT_NEAR(margin_pdf(mk(Family::zinbi), 0, z), 0.2 + 0.8 * nb_ref(0, 2.5, 0.7), 1e-14);
  for (int y = 1; y < 30; ++y) {
    EXPECT_NEAR(margin_pdf(mk(Family::zinbi), y, z), 0.8 * nb_ref(y, 2.5, 0.7), 1e-14);
    EXPECT_NEAR(margin_pdf(mk(Family::zanbi), y, z),
                0.8 * nb_ref(y, 2.5, 0.7) / (1.0 - nb_ref(0, 2.5, 0.7)), 1e-14);
    EXPECT_NEAR(margin_pdf(mk(Family::negbin1), y, pv({2.5, 0.7})), nb_ref(y, 2.5, 0.7), 1e-14);
    EXPECT_NEAR(margin_pdf(mk(Family::zip), y, pv({3.0, 0.3})), zip_ref(y, 3.0, 0.3), 1e-14);
  }
  EXPECT_NEAR(margin_pdf(mk(Family::zanbi), 0, z), 0.2, 1e-15);
  EXPECT_NEAR(margin_pdf(mk(Family::gaussian), 1.0, pv({0.0, 2.0})),
              std::exp(-0.125) / (2.0 * std::sqrt(2.0 * std::numbers::pi)), 1e-15);
}

TEST(Margins, PdfErrors) {
  EXPECT_THROW(margin_pdf(mk(Family::poisson), -1, pv({1.0})), DomainError);
  EXPECT_THROW(margin_pdf(mk(Family::poisson), 1.5, pv({1.0})), DomainError);
  EXPECT_THROW(margin_pdf(mk(Family::bernoulli), 2, pv({0.3})), DomainError);
  EXPECT_THROW(margin_pdf(mk(Family::poisson), 1, pv({-1.0})), DomainError);
  EXPECT_THROW(margin_pdf(mk(Family::zalg), 1, pv({1.0, 0.3})), DomainError);
  EXPECT_THROW(margin_pdf(mk(Family::gaussian), 0.0, pv({0.0, 0.0})), DomainError);
}

TEST(Margins, CdfExamples) {
  EXPECT_NEAR(margin_cdf(mk(Family::gaussian), 1.7, pv({1.7, 0.4})), 0.5, 1e-15);
  EXPECT_NEAR(margin_cdf(mk(Family::geometric), 1e6 * 3.0, pv({3.0})), 1.0, 1e-9);
  const double mu = 0.8, sigma = 0.35;
  double partial = 0.0;
  for (int k = 0; k <= 5; ++k) partial += zalg_ref(k, mu, sigma);
  EXPECT_NEAR(margin_cdf(mk(Family::zalg), 5, pv({mu, sigma})), partial, 1e-12);
  EXPECT_EQ(margin_cdf(mk(Family::poisson), -0.5, pv({2.0})), 0.0);
  EXPECT_NEAR(margin_cdf(mk(Family::poisson), 2.5, pv({2.0})),
              margin_cdf(mk(Family::poisson), 2, pv({2.0})), 1e-15);
}

TEST(Margins, MassCdfConsistency) {
  for (const auto& c : random_cases(11, 5)) {
    const MarginFamily m = mk(c.family);
    double sum = 0.0;
    for (int y = 0; y <= 200; ++y) {
      sum += margin_pdf(m, y, c.params);
      ASSERT_NEAR(margin_cdf(m, y, c.params), sum, 1e-10) << family_name(c.family) << " y=" << y;
    }
  }
}

TEST(Margins, CdfMonotoneWithLimits) {
  for (const auto& c : random_cases(12, 3)) {
    const MarginFamily m = mk(c.family);
    double prev = 0.0;
    for (int y = 0; y <= 400; ++y) {
      const double f = margin_cdf(m, y, c.params);
      ASSERT_GE(f, prev - 1e-15);
      prev = f;
    }
    EXPECT_NEAR(prev, 1.0, 1e-6) << family_name(c.family);
  }
}

TEST(Margins, QuantileExamples) {
  EXPECT_NEAR(margin_quantile(mk(Family::gaussian), 0.5, pv({0.0, 1.0})), 0.0, 1e-12);
  EXPECT_EQ(margin_quantile(mk(Family::bernoulli), 0.2, pv({0.3})), 0.0);
  EXPECT_EQ(margin_quantile(mk(Family::bernoulli), 0.8, pv({0.3})), 1.0);
  EXPECT_THROW(margin_quantile(mk(Family::poisson), 0.0, pv({1.0})), DomainError);
  EXPECT_THROW(margin_quantile(mk(Family::poisson), 1.0, pv({1.0})), DomainError);
}

TEST(Margins, QuantileMatchesLinearScan) {
  const MarginFamily m = mk(Family::zip);
  const ParamVector p = pv({4.2, 0.3});
  for (double u = 0.005; u < 1.0; u += 0.01) {
    int scan = 0;
    while (margin_cdf(m, scan, p) < u) ++scan;
    EXPECT_EQ(margin_quantile(m, u, p), scan) << u;
  }
}

TEST(Margins, QuantileCdfConsistency) {
  Rng rng(3);
  for (const auto& c : random_cases(13, 4)) {
    const MarginFamily m = mk(c.family);
    for (int r = 0; r < 50; ++r) {
      const double p = rng.uniform();
      const double q = margin_quantile(m, p, c.params);
      EXPECT_GE(margin_cdf(m, q, c.params), p);
      if (q > 0) EXPECT_LT(margin_cdf(m, q - 1, c.params), p);
    }
  }
  const MarginFamily g = mk(Family::gaussian);
  for (double p : {1e-9, 0.01, 0.3, 0.77, 0.999999}) {
    const double q = margin_quantile(g, p, pv({2.0, 3.0}));
    EXPECT_LT(std::abs(margin_cdf(g, q, pv({2.0, 3.0})) - p), 1e-10);
  }
}

TEST(Margins, MomentExamples) {
  EXPECT_NEAR(margin_mean(mk(Family::zip), pv({2.0, 0.25})), 1.5, 1e-15);
  EXPECT_NEAR(margin_variance(mk(Family::negbin1), pv({2.0, 0.5})), 4.0, 1e-15);
  EXPECT_NEAR(margin_mean(mk(Family::geometric), pv({2.0})), 2.0, 1e-15);
  EXPECT_NEAR(margin_variance(mk(Family::geometric), pv({2.0})), 6.0, 1e-15);
}

// Closed-form moments against direct summation of the mass function.
TEST(Margins, MomentsMatchSummation) {
  for (const auto& c : random_cases(14, 3)) {
    const MarginFamily m = mk(c.family);
    double s1 = 0.0, s2 = 0.0;
    for (int y = 0; y <= 5000; ++y) {
      const double f = margin_pdf(m, y, c.params);
      s1 += y * f;
      s2 += double(y) * y * f;
    }
    const double mean = margin_mean(m, c.params);
    EXPECT_NEAR(mean, s1, 1e-8 * std::max(1.0, s1)) << family_name(c.family);
    EXPECT_NEAR(margin_variance(m, c.params), s2 - s1 * s1, 1e-7 * std::max(1.0, s2))
        << family_name(c.family);
  }
}

// Monte-Carlo moments of quantile-transform samples within 4 standard errors.
TEST(Margins, MonteCarloMoments) {
  std::vector<Case> cases = random_cases(15, 1);
  cases.push_back({Family::gaussian, pv({-1.0, 2.5})});
  cases.push_back({Family::bernoulli, pv({0.3})});
  const int n = 100000;
  for (const auto& c : cases) {
    const MarginFamily m = mk(c.family);
    Rng rng(99);
    std::vector<double> y(n), sq(n);
    for (int i = 0; i < n; ++i) y[i] = margin_quantile(m, rng.uniform(), c.params);
    const double mean = stats::mean(y);
    const double var = stats::variance(y);
    for (int i = 0; i < n; ++i) sq[i] = (y[i] - mean) * (y[i] - mean);
    const double se_mean = std::sqrt(var / n);
    const double se_var = std::sqrt(stats::variance(sq) / n);
    EXPECT_NEAR(mean, margin_mean(m, c.params), 4.0 * se_mean) << family_name(c.family);
    EXPECT_NEAR(var, margin_variance(m, c.params), 4.0 * se_var) << family_name(c.family);
  }
}

TEST(Margins, ZalgMeanMonteCarlo) {
  const MarginFamily m = mk(Family::zalg);
  const ParamVector p = pv({0.7, 0.2});
  const int n = 1000000;
  Rng rng(2024);
  double s = 0.0, s2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double y = margin_quantile(m, rng.uniform(), p);
    s += y;
    s2 += y * y;
  }
  const double mean = s / n;
  const double se = std::sqrt((s2 / n - mean * mean) / n);
  EXPECT_NEAR(mean, margin_mean(m, p), 3.0 * se);
}

TEST(Margins, OffsetsClosedForm) {
  std::vector<double> y{0, 1, 1, 0, 1, 0};
  EXPECT_NEAR(margin_offset(mk(Family::bernoulli), y)(0), 0.0, 1e-12);
  std::vector<double> g{1.0, 2.5, -0.5, 4.0, 3.0};
  const ParamVector o = margin_offset(mk(Family::gaussian), g);
  const double m = stats::mean(g);
  double ss = 0.0;
  for (double v : g) ss += (v - m) * (v - m);
  EXPECT_NEAR(o(0), m, 1e-12);
  EXPECT_NEAR(o(1), std::log(std::sqrt(ss / g.size())), 1e-12);
}

TEST(Margins, OffsetsDegenerateAreClamped) {
  set_warnings_enabled(false);
  std::vector<double> zeros(10, 0.0);
  const double eta = margin_offset(mk(Family::bernoulli), zeros)(0);
  EXPECT_NEAR(eta, std::log(1e-6 / (1.0 - 1e-6)), 1e-9);
  std::vector<double> flat(10, 3.0);
  const ParamVector o = margin_offset(mk(Family::gaussian), flat);
  EXPECT_TRUE(std::isfinite(o(1)));
  EXPECT_NEAR(o(1), std::log(1e-6), 1e-9);
  set_warnings_enabled(true);
}

TEST(Margins, ZipOffsetMatchesGridSearch) {
  const MarginFamily m = mk(Family::zip);
  const ParamVector truth = pv({3.0, 0.25});
  Rng rng(7);
  std::vector<double> y(2000);
  for (auto& v : y) v = margin_quantile(m, rng.uniform(), truth);
  const ParamVector off = margin_offset(m, y);

  auto nll = [&](double e1, double e2) {
    const double mu = std::exp(e1), sg = 1.0 / (1.0 + std::exp(-e2));
    double s = 0.0;
    for (double v : y) s -= std::log(zip_ref(v, mu, sg));
    return s;
  };
  // Coarse grid, then two refinements around the best point.
  double b1 = 0.0, b2 = 0.0, step = 0.05;
  double best = nll(b1, b2);
  for (double e1 = 0.0; e1 <= 2.0; e1 += step)
    for (double e2 = -3.0; e2 <= 1.0; e2 += step)
      if (double v = nll(e1, e2); v < best) best = v, b1 = e1, b2 = e2;
  for (int level = 0; level < 3; ++level) {
    const double c1 = b1, c2 = b2;
    step /= 10.0;
    for (int i = -10; i <= 10; ++i)
      for (int j = -10; j <= 10; ++j)
        if (double v = nll(c1 + i * step, c2 + j * step); v < best)
          best = v, b1 = c1 + i * step, b2 = c2 + j * step;
  }
  EXPECT_NEAR(off(0), b1, 1e-3);
  EXPECT_NEAR(off(1), b2, 1e-3);
}

TEST(Margins, EvalGradMatchesDifferences) {
  std::vector<Case> cases = random_cases(16, 2);
  cases.push_back({Family::gaussian, pv({0.4, 1.3})});
  cases.push_back({Family::bernoulli, pv({0.35})});
  for (const auto& c : cases) {
    const MarginFamily m = mk(c.family);
    for (double y : {0.0, 1.0, 2.0, 5.0}) {
      if (m.support() == Support::binary && y > 1) continue;
      const MarginEvalGrad g = margin_eval_grad(m, y, c.params);
      EXPECT_NEAR(g.value.pdf, margin_pdf(m, y, c.params), 1e-14);
      EXPECT_NEAR(g.value.cdf, margin_cdf(m, y, c.params), 1e-14);
      for (int k = 0; k < m.n_params; ++k) {
        ParamVector up = c.params, dn = c.params;
        const double h = 1e-5 * std::max(1e-2, std::min(c.params(k), 1.0));
        up(k) += h;
        dn(k) -= h;
        const double fd_pdf = (margin_pdf(m, y, up) - margin_pdf(m, y, dn)) / (2 * h);
        const double fd_cdf = (margin_cdf(m, y, up) - margin_cdf(m, y, dn)) / (2 * h);
        EXPECT_NEAR(g.d_pdf(k), fd_pdf, 1e-5 * std::max(1.0, std::abs(fd_pdf)))
            << family_name(c.family) << " k=" << k << " y=" << y;
        EXPECT_NEAR(g.d_cdf(k), fd_cdf, 1e-5 * std::max(1.0, std::abs(fd_cdf)))
            << family_name(c.family) << " k=" << k << " y=" << y;
      }
    }
  }
}

TEST(Margins, ResponseRespectsRanges) {
  for (Family f : {Family::bernoulli, Family::gaussian, Family::poisson, Family::geometric,
                   Family::negbin1, Family::zalg, Family::zip, Family::zanbi, Family::zinbi}) {
    const MarginFamily m = mk(f);
    for (double e = -20.0; e <= 20.0; e += 1.0) {
      const double eta[3] = {e, -e, 0.5 * e};
      ParamVector p = margin_response(m, std::span<const double>(eta, m.n_params));
      for (int k = 0; k < m.n_params; ++k) {
        if (m.range(k) == ParamRange::positive) EXPECT_GT(p(k), 0.0);
        if (m.range(k) == ParamRange::unit) {
          EXPECT_GE(p(k), 0.0);
          EXPECT_LE(p(k), 1.0);
        }
      }
    }
  }
}

}  // namespace
}  // namespace copboost
