// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "sbgp/dependence.hpp"
#include "sbgp/model.hpp"
#include "sbgp/network.hpp"
#include "sbgp/parallel.hpp"

namespace sbgp {

/// Empirical quantile as a pure order statistic (index ceil(p B), clamped),
/// so percentile intervals are equivariant under monotone relabelling.
inline double order_statistic_quantile(std::vector<double> values, double p) {
  if (values.empty()) throw std::invalid_argument("order_statistic_quantile: empty input");
  std::sort(values.begin(), values.end());
  const auto n = static_cast<double>(values.size());
  auto idx = static_cast<std::ptrdiff_t>(std::ceil(p * n));
  idx = std::clamp<std::ptrdiff_t>(idx, 1, static_cast<std::ptrdiff_t>(values.size()));
  return values[static_cast<std::size_t>(idx - 1)];
}

/// Refitted parameter vectors (one replicate per row) with percentile
/// confidence intervals per coordinate.
struct BootstrapResult {
  Eigen::MatrixXd replicates;  ///< B x k
  double level = 0.95;
  std::vector<std::pair<double, double>> intervals;  ///< k pairs (lo, hi)

  void compute_intervals() {
    const double lo_p = (1.0 - level) / 2.0;
    const double hi_p = 1.0 - lo_p;
    intervals.clear();
    for (Eigen::Index j = 0; j < replicates.cols(); ++j) {
      std::vector<double> col(replicates.col(j).data(),
                              replicates.col(j).data() + replicates.rows());
      const double lo = order_statistic_quantile(col, lo_p);
      const double hi = order_statistic_quantile(std::move(col), hi_p);
      intervals.emplace_back(lo, hi);
    }
  }
};

/// Generic percentile bootstrap over independent replicate jobs; each job
/// gets its own pre-split stream and results are gathered in replicate order.
inline BootstrapResult bootstrap_generic(
    int num_replicates, const std::function<Eigen::VectorXd(int, Rng&)>& replicate, Rng& rng,
    double level = 0.95) {
  if (num_replicates < 1) throw std::domain_error("bootstrap: need at least one replicate");
  std::vector<Rng> streams;
  streams.reserve(static_cast<std::size_t>(num_replicates));
  for (int b = 0; b < num_replicates; ++b) streams.push_back(rng.split());
  std::vector<Eigen::VectorXd> rows(static_cast<std::size_t>(num_replicates));
  parallel_for(rows.size(), [&](std::size_t b) {
    rows[b] = replicate(static_cast<int>(b), streams[b]);
  });
  BootstrapResult result;
  result.level = level;
  result.replicates.resize(num_replicates, rows.front().size());
  for (std::size_t b = 0; b < rows.size(); ++b)
    result.replicates.row(static_cast<Eigen::Index>(b)) = rows[b].transpose();
  result.compute_intervals();
  return result;
}

/// Nonparametric bootstrap: resample rows with replacement, re-estimate with
/// the trained network.
inline BootstrapResult nonparam_bootstrap(const Sample& data, const NetworkWeights& w,
                                          int num_replicates, Rng& rng, double level = 0.95) {
  if (num_replicates < 2) throw std::domain_error("nonparam_bootstrap: need B >= 2");
  const Eigen::Index n = data.rows();
  auto replicate = [&](int, Rng& r) {
    Sample resampled(n, 2);
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto k =
          static_cast<Eigen::Index>(r.uniform_int(0, static_cast<std::uint64_t>(n - 1)));
      resampled.row(i) = data.row(k);
    }
    return forward(w, resampled);
  };
  return bootstrap_generic(num_replicates, replicate, rng, level);
}

/// Parametric bootstrap: simulate datasets of size n from a fitted model and
/// refit each. The simulator and refitter define the model family, so the
/// replicate width equals that family's parameter count.
inline BootstrapResult param_bootstrap(
    const std::function<Sample(Eigen::Index, Rng&)>& simulate,
    const std::function<Eigen::VectorXd(const Sample&)>& refit, Eigen::Index n,
    int num_replicates, Rng& rng, double level = 0.95) {
  auto replicate = [&](int, Rng& r) { return refit(simulate(n, r)); };
  return bootstrap_generic(num_replicates, replicate, rng, level);
}

/// Pointwise 2.5% / 97.5% envelopes of the model-implied chi(q) curves across
/// bootstrap replicates. Every replicate's curve is simulated with an
/// identical stream (common random numbers), so identical replicates produce
/// identical curves and the envelopes reflect parameter uncertainty only.
inline std::pair<ChiCurve, ChiCurve> bootstrap_chi_bands(const BootstrapResult& result,
                                                         const std::vector<double>& levels,
                                                         Eigen::Index n_mc, Rng& rng) {
  const Eigen::Index B = result.replicates.rows();
  if (B < 1 || result.replicates.cols() != 7)
    throw std::invalid_argument("bootstrap_chi_bands: expected a B x 7 replicate matrix");
  const Rng base = rng.split();
  std::vector<std::vector<double>> curves(static_cast<std::size_t>(B));
  parallel_for(curves.size(), [&](std::size_t b) {
    const auto row = result.replicates.row(static_cast<Eigen::Index>(b));
    const SbgpParams p = params_from_reparam_vector(
        {row(0), row(1), row(2), row(3), row(4), row(5), row(6)});
    Rng stream = base;
    curves[b] = mc_chi_curve(p, levels, n_mc, stream).values;
  });
  ChiCurve lower, upper;
  lower.levels = upper.levels = levels;
  for (std::size_t q = 0; q < levels.size(); ++q) {
    std::vector<double> at_level(curves.size());
    for (std::size_t b = 0; b < curves.size(); ++b) at_level[b] = curves[b][q];
    lower.values.push_back(order_statistic_quantile(at_level, 0.025));
    upper.values.push_back(order_statistic_quantile(std::move(at_level), 0.975));
  }
  return {std::move(lower), std::move(upper)};
}

}  // namespace sbgp
