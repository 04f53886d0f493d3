// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <stdexcept>
#include <utility>

#include "sbgp/numeric.hpp"
#include "sbgp/rng.hpp"

namespace sbgp {

namespace detail {
// Branch switches for the weight parameter: the generic two-term formulas
// cancel catastrophically as w -> 1/2, and collapse as w -> {0, 1}.
inline bool near_half(double w) { return std::abs(2.0 * w - 1.0) < 1e-6; }
inline bool near_edge(double w) { return std::min(w, 1.0 - w) < 1e-12; }
}  // namespace detail

/// Survival function of N = w E + (1-w) E', a sum of independent exponentials
/// with scales w and 1-w (hypoexponential). Degenerates to a single unit
/// exponential at w in {0, 1} and to Gamma(2, rate 2) at w = 1/2.
///
/// Note: the survival function is normalised so that it equals 1 at u = 0;
/// some statements of the hypoexponential cdf with these rates circulate with
/// the mixing coefficients swapped, which would give total mass 2.
inline double hypoexp_survival(double w, double u) {
  if (!(w >= 0.0) || !(w <= 1.0)) throw std::domain_error("hypoexp_survival: w must be in [0,1]");
  if (!(u >= 0.0)) throw std::domain_error("hypoexp_survival: u must be >= 0");
  if (detail::near_edge(w)) return std::exp(-u);
  if (detail::near_half(w)) return (1.0 + 2.0 * u) * std::exp(-2.0 * u);
  return (w * std::exp(-u / w) - (1.0 - w) * std::exp(-u / (1.0 - w))) / (2.0 * w - 1.0);
}

/// Law of the positive latent factor V = (w E + (1-w) E') / G with
/// G ~ Gamma(1/xi, 1) independent of the exponentials. V has a GP-type tail
/// with index xi; at w in {0, 1} it is exactly GP(xi, xi).
struct RatioLaw {
  double xi;  ///< tail index, > 0 (equals 1 / gamma shape)
  double w;   ///< numerator mixture weight in [0, 1]

  void validate() const {
    if (!(xi > 0.0)) throw std::domain_error("RatioLaw: xi must be > 0");
    if (!(w >= 0.0) || !(w <= 1.0)) throw std::domain_error("RatioLaw: w must be in [0,1]");
  }
};

inline double v_survival(const RatioLaw& law, double x) {
  law.validate();
  if (!(x >= 0.0)) throw std::domain_error("v_survival: x must be >= 0");
  const double inv_xi = 1.0 / law.xi;
  const double w = law.w;
  if (detail::near_edge(w)) return pow_survival(x, inv_xi);
  if (detail::near_half(w))
    return pow_survival(2.0 * x, inv_xi + 1.0) * (1.0 + 2.0 * x * (1.0 + inv_xi));
  return (w * pow_survival(x / w, inv_xi) - (1.0 - w) * pow_survival(x / (1.0 - w), inv_xi)) /
         (2.0 * w - 1.0);
}

inline double v_density(const RatioLaw& law, double x) {
  law.validate();
  if (x < 0.0) return 0.0;
  const double inv_xi = 1.0 / law.xi;
  const double w = law.w;
  if (detail::near_edge(w)) return inv_xi * pow_survival(x, inv_xi + 1.0);
  if (detail::near_half(w))
    return 4.0 * x * inv_xi * (1.0 + inv_xi) * pow_survival(2.0 * x, inv_xi + 2.0);
  return (pow_survival(x / w, inv_xi + 1.0) - pow_survival(x / (1.0 - w), inv_xi + 1.0)) /
         (law.xi * (2.0 * w - 1.0));
}

/// Leading tail constants (C, D) in the expansion
/// P(V > x) = C x^(-1/xi) (1 - D/(xi x) + o(1/x)).
inline std::pair<double, double> v_tail_constants(const RatioLaw& law) {
  law.validate();
  const double inv_xi = 1.0 / law.xi;
  const double w = law.w;
  if (detail::near_edge(w)) return {1.0, 1.0};
  if (detail::near_half(w)) {
    const double c = std::exp(-inv_xi * std::log(2.0)) * (inv_xi + 1.0);
    const double d = (1.0 + 2.0 * law.xi) / (2.0 + 2.0 * law.xi);
    return {c, d};
  }
  const double a1 = std::pow(w, inv_xi + 1.0) - std::pow(1.0 - w, inv_xi + 1.0);
  const double a2 = std::pow(w, inv_xi + 2.0) - std::pow(1.0 - w, inv_xi + 2.0);
  return {a1 / (2.0 * w - 1.0), a2 / a1};
}

/// Draw from the ratio law directly (used as an independent oracle for the
/// closed-form survival function).
inline double sample_ratio(const RatioLaw& law, Rng& rng) {
  law.validate();
  const double numer = law.w * rng.exponential() + (1.0 - law.w) * rng.exponential();
  return numer / rng.gamma(1.0 / law.xi, 1.0);
}

/// Non-negative shift pair (S1, S2) = max(T1, T2) - (T1, T2) built from iid
/// Gaussian generators with standard deviation sigma_T. Exactly one component
/// is zero almost surely, placing the model on the L-shaped support.
struct ShiftLaw {
  double sigma_T;  ///< dispersion of the Gaussian generators, >= 0

  void validate() const {
    if (!(sigma_T >= 0.0)) throw std::domain_error("ShiftLaw: sigma_T must be >= 0");
  }

  double mean() const { return sigma_T / std::sqrt(M_PI); }
  double variance() const { return (1.0 - 1.0 / M_PI) * sigma_T * sigma_T; }
};

inline std::pair<double, double> sample_shift(const ShiftLaw& law, Rng& rng) {
  law.validate();
  if (law.sigma_T == 0.0) return {0.0, 0.0};
  const double t1 = law.sigma_T * rng.normal();
  const double t2 = law.sigma_T * rng.normal();
  const double m = std::max(t1, t2);
  return {m - t1, m - t2};
}

/// cdf of S | S > 0, a half-normal law with scale sqrt(2) sigma_T.
inline double halfnormal_cond_cdf(const ShiftLaw& law, double s) {
  law.validate();
  if (!(law.sigma_T > 0.0))
    throw std::domain_error("halfnormal_cond_cdf: conditional law degenerate at sigma_T = 0");
  if (!(s >= 0.0)) throw std::domain_error("halfnormal_cond_cdf: s must be >= 0");
  return 2.0 * norm_cdf(s / (std::sqrt(2.0) * law.sigma_T)) - 1.0;
}

/// Density of S | S > 0.
inline double halfnormal_cond_pdf(const ShiftLaw& law, double s) {
  law.validate();
  if (!(law.sigma_T > 0.0))
    throw std::domain_error("halfnormal_cond_pdf: conditional law degenerate at sigma_T = 0");
  if (s < 0.0) return 0.0;
  const double st = law.sigma_T;
  return std::exp(-s * s / (4.0 * st * st)) / (st * std::sqrt(M_PI));
}

}  // namespace sbgp
