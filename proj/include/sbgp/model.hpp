// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <utility>

#include "sbgp/gp.hpp"
#include "sbgp/laws.hpp"
#include "sbgp/numeric.hpp"
#include "sbgp/rng.hpp"
#include "sbgp/sample.hpp"

namespace sbgp {

/// Natural parameters of the bivariate model
///   Y_j = beta_j * ( (w E + (1-w) E_j) / (G + G_j) - S_j ),   j = 1, 2,
/// with E, E_1, E_2 unit exponentials, G ~ Gamma(alpha, 1),
/// G_j ~ Gamma(alpha_j, 1) (the constant 0 when alpha_j = 0) and
/// (S_1, S_2) the Gaussian max-shift pair of ShiftLaw.
struct SbgpParams {
  double alpha = 1.0;
  double alpha1 = 0.0;
  double alpha2 = 0.0;
  double beta1 = 1.0;
  double beta2 = 1.0;
  double sigma_T = 0.0;
  double w = 1.0;

  void validate() const {
    if (!(alpha >= 0.0) || !(alpha1 >= 0.0) || !(alpha2 >= 0.0))
      throw std::domain_error("SbgpParams: gamma shapes must be >= 0");
    if (!(alpha + std::min(alpha1, alpha2) > 0.0))
      throw std::domain_error("SbgpParams: alpha + min(alpha1, alpha2) must be > 0");
    if (!(beta1 > 0.0) || !(beta2 > 0.0))
      throw std::domain_error("SbgpParams: scales must be > 0");
    if (!(w >= 0.0) || !(w <= 1.0)) throw std::domain_error("SbgpParams: w must be in [0,1]");
    if (!(sigma_T >= 0.0)) throw std::domain_error("SbgpParams: sigma_T must be >= 0");
  }

  double xi(int j) const { return 1.0 / (alpha + (j == 1 ? alpha1 : alpha2)); }
  double beta(int j) const { return j == 1 ? beta1 : beta2; }
  RatioLaw ratio_law(int j) const { return RatioLaw{xi(j), w}; }
  ShiftLaw shift_law() const { return ShiftLaw{sigma_T}; }
};

/// Tail indices and limiting dependence coefficients implied by the natural
/// parameters. chi > 0 only in the shared-gamma regime alpha1 = alpha2 = 0,
/// in which case eta = 1; otherwise chi = 0 and eta < 1. None of these depend
/// on sigma_T.
struct DerivedParams {
  double xi1;
  double xi2;
  double eta;
  double chi;
};

/// Dependence-first coordinates (eta, xi1, xi2) used by the prior and the
/// estimator output.
struct ReparamTriple {
  double eta;
  double xi1;
  double xi2;
};

/// GP approximation of the upper marginal tail:
/// P(Y_j > x) = gp_survival(xi, sigma)(x) * (1 - (delta + o(1))/x).
struct TailApprox {
  double xi;
  double sigma;
  double delta;
};

namespace detail {

// Limiting chi in the asymptotically dependent regime (alpha1 = alpha2 = 0).
// The generic expression has removable singularities at w = 1/3 and w = 1/2;
// the closed-form limits below come from l'Hopital.
inline double ad_chi(double alpha, double w) {
  if (std::abs(w - 0.5) < 1e-6) return (2.0 - std::exp2(-alpha)) / (alpha + 1.0);
  if (std::abs(w - 1.0 / 3.0) < 1e-6) return (alpha + 1.0) / (std::exp2(alpha + 1.0) - 1.0);
  const double a1 = alpha + 1.0;
  const double num = 2.0 * std::pow(w, a1) - std::exp2(-alpha) * std::pow(1.0 - w, a1);
  const double den = std::pow(w, a1) - std::pow(1.0 - w, a1);
  return (2.0 * w - 1.0) / (3.0 * w - 1.0) * num / den;
}

}  // namespace detail

inline DerivedParams derived_from_natural(const SbgpParams& p) {
  p.validate();
  DerivedParams d{};
  d.xi1 = p.xi(1);
  d.xi2 = p.xi(2);
  const double amax = std::max(p.alpha1, p.alpha2);
  if (amax > 0.0) {
    d.eta = (p.alpha + amax) / (p.alpha + 2.0 * amax);
    d.chi = 0.0;
  } else {
    d.eta = 1.0;
    d.chi = detail::ad_chi(p.alpha, p.w);
  }
  return d;
}

/// Invert (eta, xi1, xi2) to the gamma shapes (alpha, alpha1, alpha2).
/// Requires eta in (1/2, 1], eta <= 1 / (2 - min(xi)/max(xi)), and xi1 = xi2
/// when eta = 1. Inverse of derived_from_natural on the shape coordinates.
inline std::array<double, 3> natural_from_reparam(const ReparamTriple& t) {
  if (!(t.xi1 > 0.0) || !(t.xi2 > 0.0))
    throw std::invalid_argument("natural_from_reparam: tail indices must be > 0");
  if (!(t.eta > 0.5) || !(t.eta <= 1.0))
    throw std::invalid_argument("natural_from_reparam: eta must be in (1/2, 1]");
  const double xi_min = std::min(t.xi1, t.xi2);
  const double xi_max = std::max(t.xi1, t.xi2);
  const double bound = 1.0 / (2.0 - xi_min / xi_max);
  if (t.eta > bound * (1.0 + 1e-12))
    throw std::invalid_argument("natural_from_reparam: eta exceeds the feasibility bound");
  if (t.eta == 1.0 && t.xi1 != t.xi2)
    throw std::invalid_argument("natural_from_reparam: eta = 1 requires xi1 = xi2");
  const double alpha = (2.0 * t.eta - 1.0) / (t.eta * xi_min);
  double a1 = 1.0 / t.xi1 - alpha;
  double a2 = 1.0 / t.xi2 - alpha;
  // feasibility already checked; absorb rounding residue
  a1 = std::max(a1, 0.0);
  a2 = std::max(a2, 0.0);
  return {alpha, a1, a2};
}

/// As natural_from_reparam, but with eta clamped into the feasible interval.
/// Estimator outputs are produced coordinatewise and may land slightly outside
/// the joint constraint; this is the entry point for simulating from them.
inline std::array<double, 3> natural_from_reparam_clamped(ReparamTriple t) {
  const double xi_min = std::min(t.xi1, t.xi2);
  const double xi_max = std::max(t.xi1, t.xi2);
  double bound = 1.0 / (2.0 - xi_min / xi_max);
  if (t.xi1 != t.xi2) bound *= 1.0 - 1e-9;
  t.eta = std::clamp(t.eta, 0.5 + 1e-9, bound);
  return natural_from_reparam(t);
}

/// Assemble natural parameters from the canonical 7-vector
/// (eta, xi1, xi2, beta1, beta2, sigma_T, w), clamping eta as needed.
inline SbgpParams params_from_reparam_vector(const std::array<double, 7>& v) {
  const auto shapes = natural_from_reparam_clamped(ReparamTriple{v[0], v[1], v[2]});
  SbgpParams p;
  p.alpha = shapes[0];
  p.alpha1 = shapes[1];
  p.alpha2 = shapes[2];
  p.beta1 = v[3];
  p.beta2 = v[4];
  p.sigma_T = v[5];
  p.w = v[6];
  p.validate();
  return p;
}

inline std::array<double, 7> reparam_vector(const SbgpParams& p) {
  const DerivedParams d = derived_from_natural(p);
  return {d.eta, d.xi1, d.xi2, p.beta1, p.beta2, p.sigma_T, p.w};
}

/// Draw n iid rows from the model.
inline Sample sample(const SbgpParams& p, Eigen::Index n, Rng& rng) {
  p.validate();
  if (n < 1) throw std::domain_error("sample: n must be >= 1");
  const ShiftLaw shift{p.sigma_T};
  Sample out(n, 2);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double e = rng.exponential();
    const double e1 = rng.exponential();
    const double e2 = rng.exponential();
    const double g = p.alpha > 0.0 ? rng.gamma(p.alpha, 1.0) : 0.0;
    const double g1 = p.alpha1 > 0.0 ? rng.gamma(p.alpha1, 1.0) : 0.0;
    const double g2 = p.alpha2 > 0.0 ? rng.gamma(p.alpha2, 1.0) : 0.0;
    const auto [s1, s2] = sample_shift(shift, rng);
    out(i, 0) = p.beta1 * ((p.w * e + (1.0 - p.w) * e1) / (g + g1) - s1);
    out(i, 1) = p.beta2 * ((p.w * e + (1.0 - p.w) * e2) / (g + g2) - s2);
  }
  return out;
}

namespace detail {

inline double halfnormal_upper_limit(const ShiftLaw& shift) {
  const double cond_mean = 2.0 * shift.sigma_T / std::sqrt(M_PI);
  return cond_mean + 8.0 * std::sqrt(2.0) * shift.sigma_T;
}

inline double ratio_cdf(const RatioLaw& law, double x) {
  return x <= 0.0 ? 0.0 : 1.0 - v_survival(law, x);
}

}  // namespace detail

/// Marginal density of Y_j: a half/half mixture of the shift-free ratio
/// density and its convolution with the conditional half-normal shift,
/// evaluated by adaptive quadrature.
inline double marginal_density(const SbgpParams& p, int j, double y) {
  p.validate();
  const double beta = p.beta(j);
  const RatioLaw law = p.ratio_law(j);
  const double x = y / beta;
  if (p.sigma_T == 0.0) return v_density(law, x) / beta;
  const ShiftLaw shift = p.shift_law();
  const double lo = std::max(0.0, -x);
  const double hi = detail::halfnormal_upper_limit(shift);
  double conv = 0.0;
  if (hi > lo) {
    conv = integrate(
        [&](double s) { return v_density(law, x + s) * halfnormal_cond_pdf(shift, s); }, lo, hi,
        1e-9);
  }
  return (v_density(law, x) + conv) / (2.0 * beta);
}

/// Marginal cdf of Y_j (same mixture as marginal_density, integrated).
inline double marginal_cdf(const SbgpParams& p, int j, double y) {
  p.validate();
  const double beta = p.beta(j);
  const RatioLaw law = p.ratio_law(j);
  const double x = y / beta;
  if (p.sigma_T == 0.0) return detail::ratio_cdf(law, x);
  const ShiftLaw shift = p.shift_law();
  const double lo = std::max(0.0, -x);
  const double hi = std::max(lo, detail::halfnormal_upper_limit(shift));
  double conv = 0.0;
  if (hi > lo) {
    conv = integrate(
        [&](double s) { return detail::ratio_cdf(law, x + s) * halfnormal_cond_pdf(shift, s); },
        lo, hi, 1e-9);
  }
  conv += 1.0 - halfnormal_cond_cdf(shift, hi);  // F_V ~ 1 beyond the cut
  return 0.5 * (detail::ratio_cdf(law, x) + conv);
}

inline TailApprox gp_tail_approx(const SbgpParams& p, int j) {
  p.validate();
  const double xi = p.xi(j);
  const double beta = p.beta(j);
  const auto [c, d] = v_tail_constants(p.ratio_law(j));
  const double c_xi = std::pow(c, xi);
  const double mean_shift = p.shift_law().mean();
  return TailApprox{xi, beta * c_xi * xi, (mean_shift + d - c_xi) / (xi / beta)};
}

/// Quantile of Y_j at probability q, by bracketed root-finding on the cdf.
inline double marginal_quantile(const SbgpParams& p, int j, double q) {
  p.validate();
  if (!(q > 0.0) || !(q < 1.0))
    throw std::domain_error("marginal_quantile: q must be in (0,1)");
  const double beta = p.beta(j);
  double lo;
  if (p.sigma_T == 0.0) {
    lo = 0.0;
    if (q <= marginal_cdf(p, j, lo)) return lo;
  } else {
    lo = -beta * (detail::halfnormal_upper_limit(p.shift_law()) + 1.0);
  }
  const TailApprox tail = gp_tail_approx(p, j);
  double hi = std::max(beta, gp_quantile(GpParams{tail.xi, tail.sigma}, q) + beta);
  while (marginal_cdf(p, j, hi) < q) hi *= 2.0;
  return solve_increasing([&](double y) { return marginal_cdf(p, j, y); }, q, lo, hi, 1e-8,
                          1e-7);
}

/// Mean and variance of Y_j. The mean needs xi_j < 1, the variance xi_j < 1/2.
inline std::pair<double, double> marginal_moments(const SbgpParams& p, int j) {
  p.validate();
  const double xi = p.xi(j);
  const double beta = p.beta(j);
  if (!(xi < 1.0))
    throw std::domain_error("marginal_moments: mean undefined for xi >= 1");
  if (!(xi < 0.5))
    throw std::domain_error("marginal_moments: variance undefined for xi >= 1/2");
  const ShiftLaw shift = p.shift_law();
  const double mean = beta * (xi / (1.0 - xi) - shift.mean());
  const double w = p.w;
  const double inv = 1.0 / xi - 1.0;
  const double core =
      (w * w + (1.0 - w) * (1.0 - w) + 2.0 * xi * w * (1.0 - w)) / (inv * inv * (1.0 - 2.0 * xi));
  const double var = beta * beta * (core + shift.variance());
  return {mean, var};
}

/// Joint/marginal survival pair of the shared-gamma regime (alpha1 = alpha2 = 0):
/// s = 1 gives P(V > x), s = 2 gives P(V1 > x, V2 > x). The removable
/// singularity at w = 1/(s+1) is handled by its analytic limit.
inline double ad_survival_pair(double alpha, double w, double x, int s) {
  if (!(alpha > 0.0)) throw std::domain_error("ad_survival_pair: alpha must be > 0");
  if (!(w >= 0.0) || !(w <= 1.0)) throw std::domain_error("ad_survival_pair: w must be in [0,1]");
  if (!(x >= 0.0)) throw std::domain_error("ad_survival_pair: x must be >= 0");
  if (s != 1 && s != 2) throw std::domain_error("ad_survival_pair: s must be 1 or 2");
  const double sd = static_cast<double>(s);
  if (detail::near_edge(w))
    return w < 0.5 ? pow_survival(sd * x, alpha) : pow_survival(x, alpha);
  const double pivot = 1.0 / (sd + 1.0);
  if (std::abs(w - pivot) < 1e-6)
    return pow_survival((sd + 1.0) * x, alpha + 1.0) * (1.0 + (sd + 1.0) * (1.0 + alpha) * x);
  const double den = (sd + 1.0) * w - 1.0;
  return (sd * w * pow_survival(x / w, alpha) -
          (1.0 - w) * pow_survival(sd * x / (1.0 - w), alpha)) /
         den;
}

/// Finite-level chi(q) and eta(q) of the shared-gamma, shift-free regime,
/// from the closed-form survival pair. Returns {chi_q, eta_q}.
inline std::pair<double, double> ad_chi_at_level(double alpha, double w, double q) {
  if (!(q > 0.0) || !(q < 1.0)) throw std::domain_error("ad_chi_at_level: q must be in (0,1)");
  const double tail = 1.0 - q;
  double hi = 1.0;
  while (ad_survival_pair(alpha, w, hi, 1) > tail) hi *= 2.0;
  const double xq = solve_increasing(
      [&](double x) { return 1.0 - ad_survival_pair(alpha, w, x, 1); }, q, 0.0, hi, 1e-13);
  const double chi_q = ad_survival_pair(alpha, w, xq, 2) / tail;
  const double eta_q = std::log(tail) / (std::log(tail) + std::log(chi_q));
  return {chi_q, eta_q};
}

}  // namespace sbgp
