// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <stdexcept>

#include "sbgp/numeric.hpp"

namespace sbgp {

/// Generalized Pareto parameters. Only non-negative tail indices are supported.
struct GpParams {
  double xi;     ///< tail index, >= 0
  double sigma;  ///< scale, > 0

  void validate() const {
    if (!(xi >= 0.0)) throw std::domain_error("GpParams: xi must be >= 0");
    if (!(sigma > 0.0)) throw std::domain_error("GpParams: sigma must be > 0");
  }
};

/// Survival function of GP(xi, sigma) at z >= 0.
inline double gp_survival(const GpParams& p, double z) {
  p.validate();
  if (!(z >= 0.0)) throw std::domain_error("gp_survival: z must be >= 0");
  if (p.xi == 0.0) return std::exp(-z / p.sigma);
  return pow_survival(p.xi * z / p.sigma, 1.0 / p.xi);
}

inline double gp_density(const GpParams& p, double z) {
  p.validate();
  if (z < 0.0) return 0.0;
  if (p.xi == 0.0) return std::exp(-z / p.sigma) / p.sigma;
  return pow_survival(p.xi * z / p.sigma, 1.0 / p.xi + 1.0) / p.sigma;
}

/// Quantile of GP(xi, sigma) at probability q in (0, 1).
inline double gp_quantile(const GpParams& p, double q) {
  p.validate();
  if (!(q > 0.0) || !(q < 1.0)) throw std::domain_error("gp_quantile: q must be in (0,1)");
  if (p.xi == 0.0) return -p.sigma * std::log1p(-q);
  return p.sigma / p.xi * std::expm1(-p.xi * std::log1p(-q));
}

}  // namespace sbgp
