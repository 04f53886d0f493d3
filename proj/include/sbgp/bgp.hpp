// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <utility>

#include "sbgp/rng.hpp"
#include "sbgp/sample.hpp"
#include "sbgp/train.hpp"

namespace sbgp {

/// Standardised bivariate GP baseline with a Gumbel-generated spectral vector:
/// Z_j = E - S_j with S_j = max(T_1, T_2) - T_j, T_j iid Gumbel(b_T, a_T),
/// transformed to GP(xi_j, sigma_j) conditional margins.
struct BgpParams {
  double xi1 = 0.1;
  double xi2 = 0.1;
  double sigma1 = 1.0;
  double sigma2 = 1.0;
  double a_T = 1.0;   ///< Gumbel scale
  double b_T = 0.0;   ///< Gumbel location

  void validate() const {
    if (!(xi1 >= 0.0) || !(xi2 >= 0.0)) throw std::domain_error("BgpParams: xi must be >= 0");
    if (!(sigma1 > 0.0) || !(sigma2 > 0.0))
      throw std::domain_error("BgpParams: sigma must be > 0");
    if (!(a_T > 0.0)) throw std::domain_error("BgpParams: a_T must be > 0");
  }

  std::array<double, 6> to_vector() const { return {xi1, xi2, sigma1, sigma2, a_T, b_T}; }

  static BgpParams from_vector(const std::array<double, 6>& v) {
    BgpParams p{v[0], v[1], v[2], v[3], v[4], v[5]};
    p.validate();
    return p;
  }
};

/// Standardised sample (exponential-scale margins), before the GP transform.
inline Sample sample_bgp_standardised(double a_T, double b_T, Eigen::Index n, Rng& rng) {
  if (n < 1) throw std::domain_error("sample_bgp_standardised: n must be >= 1");
  if (!(a_T > 0.0)) throw std::domain_error("sample_bgp_standardised: a_T must be > 0");
  Sample out(n, 2);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double e = rng.exponential();
    // Gumbel(location b_T, scale a_T) via inverse cdf
    const double t1 = b_T - a_T * std::log(rng.exponential());
    const double t2 = b_T - a_T * std::log(rng.exponential());
    const double m = std::max(t1, t2);
    out(i, 0) = e - (m - t1);
    out(i, 1) = e - (m - t2);
  }
  return out;
}

/// GP margin transform z' = sigma (exp(xi z) - 1) / xi (sigma z at xi = 0);
/// strictly increasing in z.
inline double bgp_margin_transform(double z, double xi, double sigma) {
  if (xi == 0.0) return sigma * z;
  return sigma * std::expm1(xi * z) / xi;
}

inline Sample sample_bgp(const BgpParams& p, Eigen::Index n, Rng& rng) {
  p.validate();
  Sample z = sample_bgp_standardised(p.a_T, p.b_T, n, rng);
  for (Eigen::Index i = 0; i < n; ++i) {
    z(i, 0) = bgp_margin_transform(z(i, 0), p.xi1, p.sigma1);
    z(i, 1) = bgp_margin_transform(z(i, 1), p.xi2, p.sigma2);
  }
  return z;
}

/// Training prior for the baseline estimator, bracketing the magnitudes seen
/// in threshold-exceedance applications.
struct BgpPriorConfig {
  std::pair<double, double> xi_range{0.0, 0.5};
  std::pair<double, double> sigma_range{0.0, 100.0};
  std::pair<double, double> a_range{0.1, 5.0};
  std::pair<double, double> b_range{-1.0, 1.0};
  std::pair<int, int> n_range{100, 1000};

  void validate() const {
    auto check = [](std::pair<double, double> r, const char* what) {
      if (!(r.second > r.first))
        throw std::domain_error(std::string("BgpPriorConfig: empty ") + what);
    };
    check(xi_range, "xi_range");
    check(sigma_range, "sigma_range");
    check(a_range, "a_range");
    check(b_range, "b_range");
    if (!(a_range.first > 0.0))
      throw std::domain_error("BgpPriorConfig: a_range must be positive");
    if (n_range.second < n_range.first || n_range.first < 2)
      throw std::domain_error("BgpPriorConfig: invalid n_range");
  }
};

struct BgpPriorDraw {
  std::array<double, 6> theta;  ///< (xi1, xi2, sigma1, sigma2, a_T, b_T)
  int n;
};

inline BgpPriorDraw sample_bgp_prior(const BgpPriorConfig& cfg, Rng& rng) {
  cfg.validate();
  BgpPriorDraw d{};
  const double xi1 = rng.uniform(cfg.xi_range.first, cfg.xi_range.second);
  const double xi2 = rng.uniform(cfg.xi_range.first, cfg.xi_range.second);
  double s1, s2;
  do {
    s1 = rng.uniform(cfg.sigma_range.first, cfg.sigma_range.second);
  } while (!(s1 > 0.0));
  do {
    s2 = rng.uniform(cfg.sigma_range.first, cfg.sigma_range.second);
  } while (!(s2 > 0.0));
  const double a = rng.uniform(cfg.a_range.first, cfg.a_range.second);
  const double b = rng.uniform(cfg.b_range.first, cfg.b_range.second);
  d.theta = {xi1, xi2, s1, s2, a, b};
  d.n = static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(cfg.n_range.first),
                                         static_cast<std::uint64_t>(cfg.n_range.second)));
  return d;
}

/// Train the 6-output baseline estimator (same shell, identity output on the
/// Gumbel location). The Hill penalty anchors a dependence coordinate that
/// this parameterisation does not have, so lambda must be 0.
inline TrainResult train_bgp(const BgpPriorConfig& prior, const TrainConfig& cfg, Rng& rng,
                             const NetworkWeights* warm_start = nullptr) {
  prior.validate();
  if (cfg.lambda != 0.0)
    throw std::invalid_argument("train_bgp: penalized loss is not defined for this model");
  Rng init_rng = rng.split();
  NetworkWeights w0 = warm_start ? *warm_start : init_bgp_network(init_rng);
  auto simulate = [prior](Rng& r) {
    const BgpPriorDraw d = sample_bgp_prior(prior, r);
    Sample data = sample_bgp(BgpParams::from_vector(d.theta), d.n, r);
    Eigen::VectorXd theta = Eigen::Map<const Eigen::VectorXd>(d.theta.data(), 6);
    return std::make_pair(theta, std::move(data));
  };
  return train_loop(std::move(w0), simulate, cfg, rng);
}

/// Point estimate from a trained 6-output network.
inline BgpParams fit_bgp(const Sample& data, const NetworkWeights& w) {
  if (w.out_dim() != 6) throw std::invalid_argument("fit_bgp: network must have 6 outputs");
  const Eigen::VectorXd est = forward(w, data);
  return BgpParams::from_vector({est(0), est(1), est(2), est(3), est(4), est(5)});
}

}  // namespace sbgp
