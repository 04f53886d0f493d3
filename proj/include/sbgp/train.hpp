// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <atomic>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "sbgp/network.hpp"
#include "sbgp/parallel.hpp"
#include "sbgp/prior.hpp"

namespace sbgp {

/// Prior standard deviations of the canonical sbgp coordinates, used as the
/// default loss scaling matrix D.
inline std::vector<double> sbgp_scale_defaults() {
  return {0.144, 0.144, 0.144, 288.7, 288.7, 0.289, 0.289};
}

inline std::vector<double> bgp_scale_defaults() {
  return {0.144, 0.144, 28.87, 28.87, 1.41, 0.577};
}

struct TrainConfig {
  double learning_rate = 1e-4;
  int batch_size = 32;
  int num_steps = 20000;          ///< desk-scale default
  double lambda = 0.0;            ///< 0 = classical loss, 0.5 = penalized
  std::vector<double> scale_matrix_diag;  ///< empty = per-model default

  // validation monitoring
  int val_size = 100;
  int val_every = 1000;
  int patience = 20;  ///< evaluations without improvement before stopping

  void validate() const {
    if (!(learning_rate > 0.0)) throw std::domain_error("TrainConfig: learning_rate must be > 0");
    if (batch_size < 1) throw std::domain_error("TrainConfig: batch_size must be >= 1");
    if (num_steps < 0) throw std::domain_error("TrainConfig: num_steps must be >= 0");
    if (!(lambda >= 0.0)) throw std::domain_error("TrainConfig: lambda must be >= 0");
    if (val_size < 1 || val_every < 1 || patience < 1)
      throw std::domain_error("TrainConfig: validation settings must be positive");
  }
};

inline std::vector<double> resolve_scale(const TrainConfig& cfg, Eigen::Index dim) {
  if (!cfg.scale_matrix_diag.empty()) {
    if (static_cast<Eigen::Index>(cfg.scale_matrix_diag.size()) != dim)
      throw std::invalid_argument("scale_matrix_diag size does not match the output dimension");
    return cfg.scale_matrix_diag;
  }
  if (dim == 7) return sbgp_scale_defaults();
  if (dim == 6) return bgp_scale_defaults();
  throw std::invalid_argument("no default scale matrix for this output dimension");
}

/// Scaled squared-error loss with optional anchoring of the first coordinate
/// (the dependence coefficient) to its rank-based empirical estimate:
///   || D^-1 (theta - theta_hat) ||^2 + lambda D_11^-2 (theta_hat_1 - eta_emp)^2.
inline double loss_value(const Eigen::VectorXd& theta, const Eigen::VectorXd& theta_hat,
                         double eta_emp, const std::vector<double>& scale, double lambda) {
  if (theta.size() != theta_hat.size() ||
      static_cast<Eigen::Index>(scale.size()) != theta.size())
    throw std::invalid_argument("loss_value: dimension mismatch");
  double acc = 0.0;
  for (Eigen::Index j = 0; j < theta.size(); ++j) {
    const double r = (theta(j) - theta_hat(j)) / scale[static_cast<std::size_t>(j)];
    acc += r * r;
  }
  if (lambda > 0.0) {
    const double r = (theta_hat(0) - eta_emp) / scale[0];
    acc += lambda * r * r;
  }
  return acc;
}

/// Convenience overload: the empirical anchor is the Hill-type estimator of
/// the sample (only evaluated when the penalty is active).
inline double loss(const Eigen::VectorXd& theta, const Eigen::VectorXd& theta_hat,
                   const Sample& sample, const TrainConfig& cfg) {
  const std::vector<double> scale = resolve_scale(cfg, theta.size());
  const double eta_emp = cfg.lambda > 0.0 ? eta_hill(sample) : 0.0;
  return loss_value(theta, theta_hat, eta_emp, scale, cfg.lambda);
}

inline Eigen::VectorXd loss_gradient_wrt_estimate(const Eigen::VectorXd& theta,
                                                  const Eigen::VectorXd& theta_hat,
                                                  double eta_emp,
                                                  const std::vector<double>& scale,
                                                  double lambda) {
  Eigen::VectorXd g(theta.size());
  for (Eigen::Index j = 0; j < theta.size(); ++j) {
    const double d = scale[static_cast<std::size_t>(j)];
    g(j) = -2.0 * (theta(j) - theta_hat(j)) / (d * d);
  }
  if (lambda > 0.0) g(0) += 2.0 * lambda * (theta_hat(0) - eta_emp) / (scale[0] * scale[0]);
  return g;
}

/// One simulated training pair plus its precomputed empirical anchor.
struct TrainItem {
  Eigen::VectorXd theta;
  Sample data;
  double eta_emp = 0.0;
};

/// Gradient of the mean loss over a batch, by reverse-mode differentiation
/// through the network. Rank statistics (summary inputs, empirical anchor)
/// are piecewise constant in the data and carry no gradient.
inline NetworkWeights batch_gradient(const NetworkWeights& w, const std::vector<TrainItem>& batch,
                                     const TrainConfig& cfg, double* mean_loss = nullptr) {
  if (batch.empty()) throw std::invalid_argument("batch_gradient: empty batch");
  const std::vector<double> scale = resolve_scale(cfg, static_cast<Eigen::Index>(w.out_dim()));
  std::vector<NetworkWeights> grads(batch.size());
  std::vector<double> losses(batch.size(), 0.0);
  parallel_for(batch.size(), [&](std::size_t i) {
    const TrainItem& item = batch[i];
    const ForwardTrace trace = forward_trace(w, item.data);
    losses[i] = loss_value(item.theta, trace.theta, item.eta_emp, scale, cfg.lambda);
    const Eigen::VectorXd dtheta =
        loss_gradient_wrt_estimate(item.theta, trace.theta, item.eta_emp, scale, cfg.lambda);
    grads[i] = backward(w, item.data, trace, dtheta);
  });
  NetworkWeights sum = zeros_like(w);
  double total = 0.0;
  const double inv = 1.0 / static_cast<double>(batch.size());
  for (std::size_t i = 0; i < batch.size(); ++i) {
    total += losses[i];
    for (std::size_t k = 0; k < sum.psi.size(); ++k) {
      sum.psi[k].W += grads[i].psi[k].W;
      sum.psi[k].b += grads[i].psi[k].b;
    }
    for (std::size_t k = 0; k < sum.phi.size(); ++k) {
      sum.phi[k].W += grads[i].phi[k].W;
      sum.phi[k].b += grads[i].phi[k].b;
    }
  }
  for (auto* stack : {&sum.psi, &sum.phi})
    for (auto& layer : *stack) {
      layer.W *= inv;
      layer.b *= inv;
    }
  if (mean_loss) *mean_loss = total * inv;
  return sum;
}

/// Adam optimizer state (standard constants 0.9 / 0.999, epsilon 1e-8).
struct AdamState {
  NetworkWeights m;
  NetworkWeights v;
  long t = 0;

  explicit AdamState(const NetworkWeights& shape) : m(zeros_like(shape)), v(zeros_like(shape)) {}
};

inline void adam_step(NetworkWeights& w, const NetworkWeights& grad, AdamState& st, double lr) {
  constexpr double b1 = 0.9, b2 = 0.999, eps = 1e-8;
  ++st.t;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(st.t));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(st.t));
  auto update = [&](Eigen::Ref<Eigen::MatrixXd> x, const Eigen::MatrixXd& g,
                    Eigen::Ref<Eigen::MatrixXd> m, Eigen::Ref<Eigen::MatrixXd> v) {
    m = b1 * m + (1.0 - b1) * g;
    v.array() = b2 * v.array() + (1.0 - b2) * g.array().square();
    x.array() -= lr * (m.array() / c1) / ((v.array() / c2).sqrt() + eps);
  };
  for (std::size_t k = 0; k < w.psi.size(); ++k) {
    update(w.psi[k].W, grad.psi[k].W, st.m.psi[k].W, st.v.psi[k].W);
    update(w.psi[k].b, grad.psi[k].b, st.m.psi[k].b, st.v.psi[k].b);
  }
  for (std::size_t k = 0; k < w.phi.size(); ++k) {
    update(w.phi[k].W, grad.phi[k].W, st.m.phi[k].W, st.v.phi[k].W);
    update(w.phi[k].b, grad.phi[k].b, st.m.phi[k].b, st.v.phi[k].b);
  }
}

struct TrainResult {
  NetworkWeights weights;       ///< weights at the stopping step
  std::vector<int> val_steps;   ///< steps at which validation risk was recorded
  std::vector<double> val_risk;
  long redraw_count = 0;        ///< simulated datasets rejected by the overflow guard
};

/// Draws (theta, dataset) pairs, redrawing any simulation containing
/// non-finite values (heavy-tail overflow guard). Values that are finite but
/// beyond 1e50 are rejected too: squaring their gradients overflows the
/// optimizer's second-moment accumulator, which permanently freezes weight
/// coordinates, so such datasets are unusable for training.
class GuardedSimulator {
 public:
  using Fn = std::function<std::pair<Eigen::VectorXd, Sample>(Rng&)>;

  static constexpr double kMaxAbsValue = 1e50;

  GuardedSimulator(Fn fn, double lambda) : fn_(std::move(fn)), lambda_(lambda) {}

  TrainItem operator()(Rng& rng) const {
    for (int attempt = 0; attempt < 200; ++attempt) {
      auto [theta, data] = fn_(rng);
      if (theta.allFinite() && data.allFinite() &&
          data.cwiseAbs().maxCoeff() <= kMaxAbsValue) {
        TrainItem item;
        item.theta = std::move(theta);
        item.data = std::move(data);
        if (lambda_ > 0.0) item.eta_emp = eta_hill(item.data);
        return item;
      }
      ++redraws_;
    }
    throw std::runtime_error("GuardedSimulator: 200 consecutive rejected simulations");
  }

  long redraws() const { return redraws_.load(); }

 private:
  Fn fn_;
  double lambda_;
  mutable std::atomic<long> redraws_{0};
};

/// On-the-fly empirical risk minimisation: every step simulates a fresh batch
/// from the prior, takes one Adam step, and periodically evaluates the risk on
/// a fixed held-out simulated set. Training stops early when the validation
/// risk has not reached a new low for cfg.patience consecutive evaluations;
/// the returned weights are those at the stopping step. Seeded runs are
/// bit-reproducible.
inline TrainResult train_loop(NetworkWeights init, const GuardedSimulator::Fn& simulate,
                              const TrainConfig& cfg, Rng& rng) {
  cfg.validate();
  init.validate();
  init.trained_lambda = cfg.lambda;
  const std::vector<double> scale =
      resolve_scale(cfg, static_cast<Eigen::Index>(init.out_dim()));
  GuardedSimulator draw(simulate, cfg.lambda);

  Rng val_rng = rng.split();
  std::vector<TrainItem> val_set;
  val_set.reserve(static_cast<std::size_t>(cfg.val_size));
  for (int i = 0; i < cfg.val_size; ++i) val_set.push_back(draw(val_rng));

  auto validation_risk = [&](const NetworkWeights& w) {
    std::vector<double> losses(val_set.size(), 0.0);
    parallel_for(val_set.size(), [&](std::size_t i) {
      const Eigen::VectorXd est = forward(w, val_set[i].data);
      losses[i] = loss_value(val_set[i].theta, est, val_set[i].eta_emp, scale, cfg.lambda);
    });
    double total = 0.0;
    for (double l : losses) total += l;
    return total / static_cast<double>(losses.size());
  };

  TrainResult result;
  NetworkWeights current = std::move(init);
  AdamState adam(current);

  double best_risk = validation_risk(current);
  result.val_steps.push_back(0);
  result.val_risk.push_back(best_risk);
  int evals_since_best = 0;

  std::vector<TrainItem> batch(static_cast<std::size_t>(cfg.batch_size));
  std::vector<Rng> item_rngs;
  item_rngs.reserve(batch.size());
  for (int step = 1; step <= cfg.num_steps; ++step) {
    item_rngs.clear();
    for (int i = 0; i < cfg.batch_size; ++i) item_rngs.push_back(rng.split());
    parallel_for(batch.size(), [&](std::size_t i) { batch[i] = draw(item_rngs[i]); });

    double mean_loss = 0.0;
    const NetworkWeights grad = batch_gradient(current, batch, cfg, &mean_loss);
    if (!std::isfinite(mean_loss))
      throw std::runtime_error("train: non-finite loss at step " + std::to_string(step) +
                               " (diverged)");
    adam_step(current, grad, adam, cfg.learning_rate);

    if (step % cfg.val_every == 0 || step == cfg.num_steps) {
      const double risk = validation_risk(current);
      result.val_steps.push_back(step);
      result.val_risk.push_back(risk);
      if (risk < best_risk) {
        best_risk = risk;
        evals_since_best = 0;
      } else if (++evals_since_best >= cfg.patience) {
        break;
      }
    }
  }

  result.weights = std::move(current);
  result.redraw_count = draw.redraws();
  return result;
}

/// Train the estimator for the bivariate model on prior-simulated data.
/// An optional warm start replaces the fresh fan-in initialisation.
inline TrainResult train_sbgp(const PriorConfig& prior, const TrainConfig& cfg, Rng& rng,
                              const NetworkWeights* warm_start = nullptr) {
  prior.validate();
  Rng init_rng = rng.split();
  NetworkWeights w0 = warm_start ? *warm_start : init_sbgp_network(init_rng);
  auto simulate = [prior](Rng& r) {
    const PriorDraw d = sample_prior(prior, r);
    const SbgpParams p = params_from_reparam_vector(d.theta);
    Sample data = sample(p, d.n, r);
    Eigen::VectorXd theta = Eigen::Map<const Eigen::VectorXd>(d.theta.data(), 7);
    return std::make_pair(theta, std::move(data));
  };
  return train_loop(std::move(w0), simulate, cfg, rng);
}

}  // namespace sbgp
