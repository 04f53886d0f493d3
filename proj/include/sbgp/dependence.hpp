// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <vector>

#include "sbgp/model.hpp"
#include "sbgp/sample.hpp"

namespace sbgp {

/// Per-column ranks, 1 = smallest. Ties are broken by original row index.
using RankMatrix = Eigen::Matrix<Eigen::Index, Eigen::Dynamic, 2>;

inline RankMatrix ranks(const Sample& sample) {
  const Eigen::Index n = sample.rows();
  if (n < 2) throw std::domain_error("ranks: need at least 2 rows");
  RankMatrix out(n, 2);
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  for (int j = 0; j < 2; ++j) {
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](Eigen::Index a, Eigen::Index b) { return sample(a, j) < sample(b, j); });
    for (Eigen::Index r = 0; r < n; ++r) out(order[static_cast<std::size_t>(r)], j) = r + 1;
  }
  return out;
}

/// Empirical finite-level tail dependence: the proportion of rows whose ranks
/// jointly exceed (N+1)q, normalised by N(1-q). Values lie in [0, 1/(1-q)].
inline double chi_hat(const RankMatrix& rank, double q) {
  if (!(q >= 0.0) || !(q < 1.0)) throw std::domain_error("chi_hat: q must be in [0,1)");
  const Eigen::Index n = rank.rows();
  const double cut = (static_cast<double>(n) + 1.0) * q;
  Eigen::Index count = 0;
  for (Eigen::Index i = 0; i < n; ++i)
    if (static_cast<double>(rank(i, 0)) > cut && static_cast<double>(rank(i, 1)) > cut) ++count;
  return static_cast<double>(count) / (static_cast<double>(n) * (1.0 - q));
}

inline double chi_hat(const Sample& sample, double q) { return chi_hat(ranks(sample), q); }

/// Finite-level residual dependence from a finite-level chi value.
/// Empty when chi_q <= 0 (no joint exceedances observed).
inline std::optional<double> eta_from_chi(double q, double chi_q) {
  if (!(q > 0.0) || !(q < 1.0)) throw std::domain_error("eta_from_chi: q must be in (0,1)");
  if (!(chi_q > 0.0)) return std::nullopt;
  const double lt = std::log1p(-q);
  return lt / (lt + std::log(chi_q));
}

/// Hill-type estimator of the residual dependence coefficient from
/// pseudo-observations: with U_ij = R_ij/(n+1) and
/// Z_i = min((1-U_i1)^-1, (1-U_i2)^-1), averages log(Z_(n-j+1)/Z_(n-k)) over
/// the top k = floor(n/10) order statistics (k can be overridden).
inline double eta_hill(const Sample& sample, Eigen::Index k_override = 0) {
  const Eigen::Index n = sample.rows();
  if (n < 20) throw std::domain_error("eta_hill: need at least 20 rows");
  const RankMatrix rank = ranks(sample);
  std::vector<double> z(static_cast<std::size_t>(n));
  const double np1 = static_cast<double>(n) + 1.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double u1 = static_cast<double>(rank(i, 0)) / np1;
    const double u2 = static_cast<double>(rank(i, 1)) / np1;
    z[static_cast<std::size_t>(i)] = std::min(1.0 / (1.0 - u1), 1.0 / (1.0 - u2));
  }
  const Eigen::Index k = k_override > 0 ? k_override : n / 10;
  if (k < 2 || k >= n) throw std::domain_error("eta_hill: degenerate k");
  std::sort(z.begin(), z.end());
  const double z_ref = z[static_cast<std::size_t>(n - k - 1)];  // Z_(n-k)
  double acc = 0.0;
  for (Eigen::Index j = 1; j <= k; ++j)
    acc += std::log(z[static_cast<std::size_t>(n - j)] / z_ref);
  return acc / static_cast<double>(k);
}

/// A chi(q) curve on a strictly increasing grid of levels.
struct ChiCurve {
  std::vector<double> levels;
  std::vector<double> values;
};

inline ChiCurve chi_curve(const Sample& sample, const std::vector<double>& levels) {
  for (std::size_t i = 0; i < levels.size(); ++i) {
    if (!(levels[i] >= 0.0) || !(levels[i] < 1.0))
      throw std::domain_error("chi_curve: levels must lie in [0,1)");
    if (i > 0 && !(levels[i] > levels[i - 1]))
      throw std::domain_error("chi_curve: levels must be strictly increasing");
  }
  const RankMatrix rank = ranks(sample);
  ChiCurve curve;
  curve.levels = levels;
  curve.values.reserve(levels.size());
  for (double q : levels) curve.values.push_back(chi_hat(rank, q));
  return curve;
}

/// Model-implied curve: simulate one sample of size n_sim from p and apply
/// chi_curve. Defaults follow the fit-diagnostic (1e4) / reference (1e5) use.
inline ChiCurve mc_chi_curve(const SbgpParams& p, const std::vector<double>& levels,
                             Eigen::Index n_sim, Rng& rng) {
  if (n_sim < 1000) throw std::domain_error("mc_chi_curve: n_sim must be >= 1000");
  const Sample s = sample(p, n_sim, rng);
  return chi_curve(s, levels);
}

}  // namespace sbgp
