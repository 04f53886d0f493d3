// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "sbgp/gp.hpp"
#include "sbgp/laws.hpp"
#include "sbgp/numeric.hpp"
#include "sbgp/rng.hpp"
#include "support.hpp"

using namespace sbgp;

TEST(Rng, SeededDeterminism) {
  Rng a(42), b(42);
  for (int i = 0; i < 1000; ++i) ASSERT_EQ(a.next_u64(), b.next_u64());
  Rng c(42), d(43);
  int equal = 0;
  for (int i = 0; i < 1000; ++i) equal += c.next_u64() == d.next_u64();
  EXPECT_LT(equal, 5);
}

TEST(Rng, SplitStreamsDiffer) {
  Rng parent(7);
  Rng child1 = parent.split();
  Rng child2 = parent.split();
  int equal = 0;
  for (int i = 0; i < 1000; ++i) equal += child1.next_u64() == child2.next_u64();
  EXPECT_LT(equal, 5);
}

TEST(Rng, NormalMomentsAndKs) {
  Rng rng(1);
  const int n = 100000;
  std::vector<double> draws(n);
  for (auto& x : draws) x = rng.normal();
  EXPECT_NEAR(testsupport::mean(draws), 0.0, 4.0 / std::sqrt(n));
  EXPECT_NEAR(testsupport::variance(draws), 1.0, 5.0 * std::sqrt(2.0 / n));
  EXPECT_LT(testsupport::ks_distance(draws, [](double x) { return norm_cdf(x); }), 0.006);
}

TEST(Rng, ExponentialKs) {
  Rng rng(2);
  std::vector<double> draws(100000);
  for (auto& x : draws) x = rng.exponential();
  EXPECT_LT(testsupport::ks_distance(draws, [](double x) { return 1.0 - std::exp(-x); }), 0.006);
}

TEST(Rng, GammaMeanShape2) {
  Rng rng(3);
  const int n = 1000000;
  double acc = 0.0;
  for (int i = 0; i < n; ++i) acc += rng.gamma(2.0, 1.0);
  const double se = std::sqrt(2.0 / n);
  EXPECT_NEAR(acc / n, 2.0, 4.0 * se);
}

TEST(Rng, GammaShape1IsExponential) {
  Rng rng(4);
  std::vector<double> draws(100000);
  for (auto& x : draws) x = rng.gamma(1.0, 1.0);
  EXPECT_LT(testsupport::ks_distance(draws, [](double x) { return 1.0 - std::exp(-x); }), 0.005);
}

TEST(Rng, GammaFractionalShapeMean) {
  Rng rng(5);
  const int n = 1000000;
  double acc = 0.0;
  for (int i = 0; i < n; ++i) acc += rng.gamma(0.56, 1.0);
  const double se = std::sqrt(0.56 / n);
  EXPECT_NEAR(acc / n, 0.56, 4.0 * se);
}

TEST(Rng, GammaRejectsBadArguments) {
  Rng rng(6);
  EXPECT_THROW(rng.gamma(0.0, 1.0), std::domain_error);
  EXPECT_THROW(rng.gamma(1.0, -1.0), std::domain_error);
}

TEST(ExactSum, PermutationAndDuplicationInvariance) {
  std::mt19937_64 gen(99);
  std::uniform_real_distribution<double> dist(-1e6, 1e6);
  std::vector<double> values(500);
  for (auto& v : values) v = dist(gen);

  ExactSum forward_sum;
  for (double v : values) forward_sum.add(v);
  std::vector<double> shuffled = values;
  std::shuffle(shuffled.begin(), shuffled.end(), gen);
  ExactSum shuffled_sum;
  for (double v : shuffled) shuffled_sum.add(v);
  EXPECT_EQ(forward_sum.value(), shuffled_sum.value());

  ExactSum doubled;
  for (double v : values) doubled.add(v);
  for (double v : values) doubled.add(v);
  EXPECT_EQ(doubled.value() / 1000.0, forward_sum.value() / 500.0);
}

TEST(Quadrature, PolynomialAndGaussian) {
  EXPECT_NEAR(integrate([](double x) { return x * x; }, 0.0, 3.0), 9.0, 1e-12);
  const double gauss = integrate([](double x) { return std::exp(-x * x / 2.0); }, -8.0, 8.0);
  EXPECT_NEAR(gauss, std::sqrt(2.0 * M_PI), 1e-9);
}

TEST(GpSurvival, KnownValues) {
  EXPECT_DOUBLE_EQ(gp_survival(GpParams{0.2, 1.0}, 0.0), 1.0);
  EXPECT_NEAR(gp_survival(GpParams{1.0, 1.0}, 1.0), 0.5, 1e-15);
  EXPECT_NEAR(gp_survival(GpParams{0.0, 2.0}, 2.0), std::exp(-1.0), 1e-15);
}

TEST(GpSurvival, StrictlyDecreasingAndDomain) {
  const GpParams p{0.3, 2.0};
  double prev = gp_survival(p, 0.0);
  for (double z = 0.5; z < 20.0; z += 0.5) {
    const double s = gp_survival(p, z);
    EXPECT_LT(s, prev);
    prev = s;
  }
  EXPECT_THROW(gp_survival(p, -0.1), std::domain_error);
  EXPECT_THROW(gp_survival(GpParams{-0.1, 1.0}, 1.0), std::domain_error);
}

TEST(GpQuantile, InvertsSurvival) {
  const GpParams p{0.25, 3.0};
  for (double q : {0.1, 0.5, 0.9, 0.999}) {
    const double z = gp_quantile(p, q);
    EXPECT_NEAR(gp_survival(p, z), 1.0 - q, 1e-12);
  }
}

TEST(HypoexpSurvival, KnownValues) {
  EXPECT_DOUBLE_EQ(hypoexp_survival(0.8, 0.0), 1.0);
  EXPECT_NEAR(hypoexp_survival(1.0, 1.0), std::exp(-1.0), 1e-15);
  const double expected = (0.8 * std::exp(-1.25) - 0.2 * std::exp(-5.0)) / 0.6;
  EXPECT_NEAR(hypoexp_survival(0.8, 1.0), expected, 1e-15);
  EXPECT_NEAR(expected, 0.37974, 3e-5);
}

TEST(HypoexpSurvival, MonteCarloCrossCheck) {
  Rng rng(11);
  const int n = 200000;
  int exceed = 0;
  for (int i = 0; i < n; ++i)
    exceed += (0.8 * rng.exponential() + 0.2 * rng.exponential()) > 1.0;
  const double p = hypoexp_survival(0.8, 1.0);
  const double se = std::sqrt(p * (1.0 - p) / n);
  EXPECT_NEAR(static_cast<double>(exceed) / n, p, 4.0 * se);
}

TEST(HypoexpSurvival, HalfWeightBranchIsGamma22) {
  // at w = 1/2 the numerator is Gamma(2, rate 2)
  for (double u : {0.0, 0.3, 1.0, 4.0})
    EXPECT_NEAR(hypoexp_survival(0.5, u), (1.0 + 2.0 * u) * std::exp(-2.0 * u), 1e-15);
}

TEST(ShiftLaw, DegenerateAtZeroSigma) {
  Rng rng(12);
  const ShiftLaw law{0.0};
  for (int i = 0; i < 100; ++i) {
    const auto [s1, s2] = sample_shift(law, rng);
    EXPECT_EQ(s1, 0.0);
    EXPECT_EQ(s2, 0.0);
  }
}

TEST(ShiftLaw, HalfTheDrawsAreExactZero) {
  Rng rng(13);
  const ShiftLaw law{0.7};
  const int n = 1000000;
  int zero = 0;
  for (int i = 0; i < n; ++i) zero += sample_shift(law, rng).first == 0.0;
  const double se = std::sqrt(0.25 / n);
  EXPECT_NEAR(static_cast<double>(zero) / n, 0.5, 4.0 * se);
}

TEST(ShiftLaw, MeanMatchesClosedForm) {
  Rng rng(14);
  const ShiftLaw law{1.0};
  const int n = 1000000;
  double acc = 0.0;
  for (int i = 0; i < n; ++i) acc += sample_shift(law, rng).first;
  const double se = std::sqrt(law.variance() / n);
  EXPECT_NEAR(acc / n, 1.0 / std::sqrt(M_PI), 4.0 * se);
  EXPECT_NEAR(1.0 / std::sqrt(M_PI), 0.5642, 1e-4);
}

TEST(ShiftLaw, ComponentsExchangeable) {
  Rng rng(15);
  const ShiftLaw law{0.5};
  const int n = 100000;
  std::vector<double> s1(n), s2(n);
  for (int i = 0; i < n; ++i) {
    const auto [a, b] = sample_shift(law, rng);
    s1[static_cast<std::size_t>(i)] = a;
    s2[static_cast<std::size_t>(i)] = b;
  }
  EXPECT_LT(testsupport::ks_distance_two_sample(s1, s2), 0.01);
}

TEST(HalfNormal, CdfValues) {
  const ShiftLaw law{1.0};
  EXPECT_DOUBLE_EQ(halfnormal_cond_cdf(law, 0.0), 0.0);
  EXPECT_NEAR(halfnormal_cond_cdf(law, 100.0), 1.0, 1e-15);
  EXPECT_NEAR(halfnormal_cond_cdf(law, std::sqrt(2.0)), std::erf(1.0 / std::sqrt(2.0)), 1e-12);
  EXPECT_NEAR(halfnormal_cond_cdf(law, std::sqrt(2.0)), 0.68269, 5e-6);
  EXPECT_THROW(halfnormal_cond_cdf(ShiftLaw{0.0}, 1.0), std::domain_error);
}

TEST(HalfNormal, PdfIntegratesToCdf) {
  const ShiftLaw law{0.8};
  const double integral = integrate([&](double s) { return halfnormal_cond_pdf(law, s); }, 0.0,
                                    2.0, 1e-10);
  EXPECT_NEAR(integral, halfnormal_cond_cdf(law, 2.0), 1e-8);
}

TEST(RatioLaw, SurvivalKnownValues) {
  EXPECT_DOUBLE_EQ(v_survival(RatioLaw{0.7, 0.3}, 0.0), 1.0);
  EXPECT_NEAR(v_survival(RatioLaw{0.5, 1.0}, 1.0), 0.25, 1e-15);
  const double expected = (0.8 / (2.25 * 2.25) - 0.2 / 36.0) / 0.6;
  EXPECT_NEAR(v_survival(RatioLaw{0.5, 0.8}, 1.0), expected, 1e-15);
  EXPECT_NEAR(expected, 0.25411, 1e-5);
}

TEST(RatioLaw, SurvivalMonteCarloCrossCheck) {
  Rng rng(16);
  const RatioLaw law{0.5, 0.8};
  const int n = 100000;
  int exceed = 0;
  for (int i = 0; i < n; ++i) exceed += sample_ratio(law, rng) > 1.0;
  const double p = v_survival(law, 1.0);
  const double se = std::sqrt(p * (1.0 - p) / n);
  EXPECT_NEAR(static_cast<double>(exceed) / n, p, 4.0 * se);
}

TEST(RatioLaw, DensityKnownValues) {
  EXPECT_DOUBLE_EQ(v_density(RatioLaw{0.5, 0.3}, -1.0), 0.0);
  EXPECT_NEAR(v_density(RatioLaw{0.5, 1.0}, 0.0), 2.0, 1e-15);
  EXPECT_DOUBLE_EQ(v_density(RatioLaw{0.5, 0.5}, 0.0), 0.0);
}

TEST(RatioLaw, SurvivalNonIncreasingInX) {
  const RatioLaw law{0.4, 0.65};
  double prev = 1.0;
  for (double x = 0.0; x < 50.0; x += 0.25) {
    const double s = v_survival(law, x);
    EXPECT_LE(s, prev + 1e-15);
    prev = s;
  }
}

TEST(RatioLaw, ContinuousAcrossHalfWeight) {
  for (double xi : {0.2, 0.5}) {
    for (double x : {0.1, 0.5, 1.0, 3.0, 10.0}) {
      const double mid = v_survival(RatioLaw{xi, 0.5}, x);
      EXPECT_NEAR(v_survival(RatioLaw{xi, 0.5 + 1e-7}, x), mid, 1e-5);
      EXPECT_NEAR(v_survival(RatioLaw{xi, 0.5 - 1e-7}, x), mid, 1e-5);
    }
  }
}

TEST(RatioLaw, DensityPlusSurvivalIsOne) {
  for (const RatioLaw law : {RatioLaw{0.3, 0.7}, RatioLaw{0.5, 0.5}, RatioLaw{0.45, 1.0}}) {
    double cut = 1.0;
    while (v_survival(law, cut) >= 1e-3) cut *= 2.0;
    const double mass = integrate([&](double x) { return v_density(law, x); }, 0.0, cut, 1e-10);
    EXPECT_NEAR(mass + v_survival(law, cut), 1.0, 1e-6);
  }
}

TEST(RatioLaw, EdgeWeightsMatchGpByKs) {
  for (double w : {0.0, 1.0}) {
    Rng rng(17);
    const RatioLaw law{0.3, w};
    std::vector<double> draws(100000);
    for (auto& x : draws) x = sample_ratio(law, rng);
    const GpParams gp{0.3, 0.3};
    const double d =
        testsupport::ks_distance(draws, [&](double x) { return 1.0 - gp_survival(gp, x); });
    EXPECT_LT(d, 0.005) << "w = " << w;
  }
}

TEST(RatioLaw, TailConstantsKnownValues) {
  const auto [c1, d1] = v_tail_constants(RatioLaw{0.3, 1.0});
  EXPECT_DOUBLE_EQ(c1, 1.0);
  EXPECT_DOUBLE_EQ(d1, 1.0);
  const auto [c2, d2] = v_tail_constants(RatioLaw{0.5, 0.5});
  EXPECT_NEAR(c2, 0.75, 1e-15);
  EXPECT_NEAR(d2, 2.0 / 3.0, 1e-15);
  const auto [c3, d3] = v_tail_constants(RatioLaw{0.5, 0.8});
  EXPECT_NEAR(c3, 0.84, 1e-15);
  EXPECT_NEAR(d3, (std::pow(0.8, 4) - std::pow(0.2, 4)) / 0.504, 1e-15);
  EXPECT_NEAR(d3, 0.8095, 5e-5);
}

TEST(RatioLaw, TailExpansionMatchesSurvival) {
  for (const RatioLaw law : {RatioLaw{0.5, 0.8}, RatioLaw{0.3, 0.6}}) {
    const auto [c, d] = v_tail_constants(law);
    for (double x : {1e3, 1e4}) {
      const double scaled = std::pow(x, 1.0 / law.xi) * v_survival(law, x);
      const double correction = scaled - c;
      const double predicted = -c * d / (law.xi * x);
      EXPECT_NEAR(correction / predicted, 1.0, 0.02)
          << "xi=" << law.xi << " w=" << law.w << " x=" << x;
    }
  }
}

TEST(RatioLaw, DomainErrors) {
  EXPECT_THROW(v_survival(RatioLaw{0.5, 0.5}, -0.5), std::domain_error);
  EXPECT_THROW(v_survival(RatioLaw{-0.5, 0.5}, 0.5), std::domain_error);
  EXPECT_THROW(v_survival(RatioLaw{0.5, 1.5}, 0.5), std::domain_error);
}
