// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cmath>

#include "sbgp/dependence.hpp"
#include "sbgp/model.hpp"
#include "support.hpp"

using namespace sbgp;

namespace {

Sample make_sample(std::initializer_list<std::pair<double, double>> rows) {
  Sample s(static_cast<Eigen::Index>(rows.size()), 2);
  Eigen::Index i = 0;
  for (const auto& [a, b] : rows) {
    s(i, 0) = a;
    s(i, 1) = b;
    ++i;
  }
  return s;
}

Sample independent_uniforms(Eigen::Index n, std::uint64_t seed) {
  Rng rng(seed);
  Sample s(n, 2);
  for (Eigen::Index i = 0; i < n; ++i) {
    s(i, 0) = rng.uniform01();
    s(i, 1) = rng.uniform01();
  }
  return s;
}

const SbgpParams kTheta1{3.0, 0.0, 0.0, 20.0, 30.0, 0.1, 0.8};

}  // namespace

TEST(Ranks, SmallCases) {
  const Sample s = make_sample({{3.0, 1.0}, {1.0, 2.0}, {2.0, 3.0}});
  const RankMatrix r = ranks(s);
  EXPECT_EQ(r(0, 0), 3);
  EXPECT_EQ(r(1, 0), 1);
  EXPECT_EQ(r(2, 0), 2);
  EXPECT_EQ(r(0, 1), 1);
  EXPECT_EQ(r(1, 1), 2);
  EXPECT_EQ(r(2, 1), 3);
}

TEST(Ranks, IncreasingColumnIsIdentity) {
  Sample s(5, 2);
  for (Eigen::Index i = 0; i < 5; ++i) {
    s(i, 0) = static_cast<double>(i);
    s(i, 1) = static_cast<double>(i) * 2.0;
  }
  const RankMatrix r = ranks(s);
  for (Eigen::Index i = 0; i < 5; ++i) {
    EXPECT_EQ(r(i, 0), i + 1);
    EXPECT_EQ(r(i, 1), i + 1);
  }
}

TEST(Ranks, TiesBrokenByRowIndex) {
  const Sample s = make_sample({{1.0, 2.0}, {1.0, 1.0}});
  const RankMatrix r = ranks(s);
  EXPECT_EQ(r(0, 0), 1);
  EXPECT_EQ(r(1, 0), 2);
}

TEST(Ranks, RejectsTinySample) {
  Sample s(1, 2);
  s.setZero();
  EXPECT_THROW(ranks(s), std::domain_error);
}

TEST(ChiHat, ComonotoneCountIsExact) {
  const Eigen::Index n = 1000;
  Sample s(n, 2);
  Rng rng(31);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double u = rng.uniform01();
    s(i, 0) = u;
    s(i, 1) = 2.0 * u + 1.0;
  }
  for (double q : {0.5, 0.9, 0.99}) {
    const double chi = chi_hat(s, q);
    const double count = chi * static_cast<double>(n) * (1.0 - q);
    EXPECT_NEAR(count, std::round(count), 1e-9);
    EXPECT_NEAR(chi, 1.0, 0.02);
  }
}

TEST(ChiHat, IndependentUniformsMatchOneMinusQ) {
  const Sample s = independent_uniforms(100000, 32);
  EXPECT_NEAR(chi_hat(s, 0.5), 0.5, 0.02);
  EXPECT_NEAR(chi_hat(s, 0.9), 0.1, 0.02);
}

TEST(ChiHat, Theta1HighLevelValue) {
  Rng rng(33);
  const Sample s = sample(kTheta1, 1000000, rng);
  EXPECT_NEAR(chi_hat(s, 0.99), 0.85, 0.05);
}

TEST(ChiHat, DomainAndRange) {
  const Sample s = independent_uniforms(1000, 34);
  EXPECT_THROW(chi_hat(s, 1.0), std::domain_error);
  for (double q : {0.0, 0.5, 0.995}) {
    const double chi = chi_hat(s, q);
    EXPECT_GE(chi, 0.0);
    EXPECT_LE(chi, 1.0 / (1.0 - q) + 1e-12);
  }
}

TEST(EtaFromChi, Algebra) {
  EXPECT_NEAR(*eta_from_chi(0.9, 1.0), 1.0, 1e-15);
  for (double q : {0.9, 0.99}) {
    EXPECT_NEAR(*eta_from_chi(q, 1.0 - q), 0.5, 1e-12);
    EXPECT_NEAR(*eta_from_chi(q, std::sqrt(1.0 - q)), 2.0 / 3.0, 1e-12);
  }
  EXPECT_FALSE(eta_from_chi(0.9, 0.0).has_value());
  EXPECT_FALSE(eta_from_chi(0.9, -0.1).has_value());
}

TEST(EtaHill, ComonotoneNearOne) {
  const Eigen::Index n = 100000;
  Sample s(n, 2);
  Rng rng(35);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double u = rng.uniform01();
    s(i, 0) = u;
    s(i, 1) = u * u;  // strictly increasing transform, identical ranks
  }
  const double eta = eta_hill(s);
  EXPECT_GE(eta, 0.9);
  EXPECT_LE(eta, 1.1);
}

TEST(EtaHill, IndependentNearHalf) {
  const Sample s = independent_uniforms(100000, 36);
  const double eta = eta_hill(s);
  EXPECT_GE(eta, 0.45);
  EXPECT_LE(eta, 0.55);
}

TEST(EtaHill, SubAsymptoticModelValue) {
  Rng rng(37);
  const SbgpParams p{4.44, 0.56, 0.56, 1.0, 1.0, 0.1, 0.5};
  const Sample s = sample(p, 1000000, rng);
  EXPECT_NEAR(eta_hill(s), 0.9, 0.1);
}

TEST(EtaHill, RejectsShortSamples) {
  const Sample s = independent_uniforms(19, 38);
  EXPECT_THROW(eta_hill(s), std::domain_error);
}

TEST(EtaHill, KOverrideMatchesDefault) {
  const Sample s = independent_uniforms(1000, 39);
  EXPECT_EQ(eta_hill(s), eta_hill(s, 100));
  EXPECT_NE(eta_hill(s), eta_hill(s, 50));
}

TEST(ChiCurve, IndependentUniformLevels) {
  const Sample s = independent_uniforms(100000, 40);
  const ChiCurve curve = chi_curve(s, {0.5, 0.9});
  ASSERT_EQ(curve.values.size(), 2u);
  EXPECT_NEAR(curve.values[0], 0.5, 0.02);
  EXPECT_NEAR(curve.values[1], 0.1, 0.02);
}

TEST(ChiCurve, CountermonotoneTailIsZero) {
  Rng rng(41);
  Sample s(10000, 2);
  for (Eigen::Index i = 0; i < s.rows(); ++i) {
    const double u = rng.uniform01();
    s(i, 0) = u;
    s(i, 1) = -u;
  }
  const ChiCurve curve = chi_curve(s, {0.9});
  EXPECT_EQ(curve.values[0], 0.0);
}

TEST(ChiCurve, RejectsBadLevels) {
  const Sample s = independent_uniforms(100, 42);
  EXPECT_THROW(chi_curve(s, {0.5, 0.5}), std::domain_error);
  EXPECT_THROW(chi_curve(s, {0.5, 1.0}), std::domain_error);
}

TEST(McChiCurve, Theta1GoldenLevels) {
  Rng rng(43);
  const ChiCurve curve = mc_chi_curve(kTheta1, {0.5, 0.99}, 100000, rng);
  EXPECT_NEAR(curve.values[0], 0.82, 0.05);
  EXPECT_NEAR(curve.values[1], 0.85, 0.05);
  Rng rng2(44);
  EXPECT_THROW(mc_chi_curve(kTheta1, {0.5}, 500, rng2), std::domain_error);
}

TEST(Invariance, MonotoneMarginalTransforms) {
  const Sample s = independent_uniforms(5000, 45);
  Sample t = s;
  t.col(0) = t.col(0).array().exp();
  t.col(1) = t.col(1).array() * 7.0 + 2.0;
  for (double q : {0.3, 0.8, 0.95}) EXPECT_EQ(chi_hat(s, q), chi_hat(t, q));
  EXPECT_EQ(eta_hill(s), eta_hill(t));
}

TEST(Invariance, WeightOrderingAtFixedCoefficients) {
  // identical (chi, eta) = (0, 0.9) but increasing weight: curves separate
  const double q = 0.9;
  double prev_chi = -1.0;
  double prev_se = 0.0;
  int idx = 0;
  for (double w : {0.1, 0.5, 0.9}) {
    Rng rng(46 + static_cast<std::uint64_t>(idx++));
    const SbgpParams p{4.44, 0.56, 0.56, 1.0, 1.0, 0.1, w};
    const Sample s = sample(p, 1000000, rng);
    const double chi = chi_hat(s, q);
    const double se = std::sqrt(std::max(chi, 0.01) / ((1.0 - q) * 1e6));
    if (prev_chi >= 0.0) EXPECT_GT(chi - prev_chi, 3.0 * (se + prev_se)) << "w = " << w;
    prev_chi = chi;
    prev_se = se;
  }
}
