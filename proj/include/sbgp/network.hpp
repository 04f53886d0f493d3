// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "sbgp/dependence.hpp"
#include "sbgp/numeric.hpp"
#include "sbgp/rng.hpp"
#include "sbgp/sample.hpp"

namespace sbgp {

/// Expert summary statistics fed to the inner network alongside the pooled
/// features: the empirical chi(q) values at these eight levels.
inline constexpr std::array<double, 8> kSummaryLevels = {0.50, 0.60, 0.70, 0.80,
                                                         0.85, 0.90, 0.95, 0.98};

inline Eigen::VectorXd summary_stats(const Sample& sample) {
  const RankMatrix rank = ranks(sample);
  Eigen::VectorXd s(static_cast<Eigen::Index>(kSummaryLevels.size()));
  for (std::size_t i = 0; i < kSummaryLevels.size(); ++i)
    s(static_cast<Eigen::Index>(i)) = chi_hat(rank, kSummaryLevels[i]);
  return s;
}

/// Per-coordinate output transform of the final layer.
enum class OutputTransform {
  HalfSigmoid,  ///< 1/2 + sigmoid(z)/2, range (1/2, 1)
  Sigmoid,      ///< range (0, 1)
  Softplus,     ///< range (0, inf)
  Identity,
};

namespace act {

inline double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

inline double softplus(double z) { return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z))); }

inline double apply(OutputTransform t, double z) {
  switch (t) {
    case OutputTransform::HalfSigmoid: return 0.5 + 0.5 * sigmoid(z);
    case OutputTransform::Sigmoid: return sigmoid(z);
    case OutputTransform::Softplus: return softplus(z);
    case OutputTransform::Identity: return z;
  }
  return z;
}

inline double derivative(OutputTransform t, double z) {
  const double s = sigmoid(z);
  switch (t) {
    case OutputTransform::HalfSigmoid: return 0.5 * s * (1.0 - s);
    case OutputTransform::Sigmoid: return s * (1.0 - s);
    case OutputTransform::Softplus: return s;
    case OutputTransform::Identity: return 1.0;
  }
  return 1.0;
}

}  // namespace act

struct DenseLayer {
  Eigen::MatrixXd W;  ///< out x in
  Eigen::VectorXd b;  ///< out
};

/// Weights of the permutation-invariant estimator: an outer feature map psi
/// applied to every replicate, mean aggregation, concatenation with the chi(q)
/// summary statistics, and an inner map phi to the parameter estimates.
/// All hidden activations are ReLU; the output layer applies out_transform
/// coordinatewise.
struct NetworkWeights {
  std::vector<DenseLayer> psi;
  std::vector<DenseLayer> phi;
  std::vector<OutputTransform> out_transform;
  std::vector<std::string> param_names;
  double trained_lambda = 0.0;  ///< penalty weight the network was trained with

  int out_dim() const { return static_cast<int>(phi.back().b.size()); }
  int pooled_dim() const { return static_cast<int>(psi.back().b.size()); }

  void validate() const {
    if (psi.empty() || phi.empty()) throw std::logic_error("NetworkWeights: empty layer stack");
    if (psi.front().W.cols() != 2)
      throw std::logic_error("NetworkWeights: psi must take bivariate rows");
    for (std::size_t k = 0; k + 1 < psi.size(); ++k)
      if (psi[k + 1].W.cols() != psi[k].W.rows())
        throw std::logic_error("NetworkWeights: psi layer dimension mismatch");
    const Eigen::Index summary = static_cast<Eigen::Index>(kSummaryLevels.size());
    if (phi.front().W.cols() != psi.back().W.rows() + summary)
      throw std::logic_error("NetworkWeights: phi input must be pooled dim + summary dim");
    for (std::size_t k = 0; k + 1 < phi.size(); ++k)
      if (phi[k + 1].W.cols() != phi[k].W.rows())
        throw std::logic_error("NetworkWeights: phi layer dimension mismatch");
    for (const auto* stack : {&psi, &phi})
      for (const auto& layer : *stack) {
        if (layer.b.size() != layer.W.rows())
          throw std::logic_error("NetworkWeights: bias/weight shape mismatch");
        if (!layer.W.allFinite() || !layer.b.allFinite())
          throw std::logic_error("NetworkWeights: non-finite entries");
      }
    if (static_cast<int>(out_transform.size()) != out_dim())
      throw std::logic_error("NetworkWeights: one output transform per output");
  }
};

inline std::vector<int> sbgp_psi_dims() { return {2, 64, 64, 128, 128}; }
inline std::vector<int> sbgp_phi_dims() { return {136, 128, 64, 64, 7}; }
inline std::vector<std::string> sbgp_param_names() {
  return {"eta", "xi1", "xi2", "beta1", "beta2", "sigma_T", "w"};
}
inline std::vector<OutputTransform> sbgp_out_transforms() {
  return {OutputTransform::HalfSigmoid, OutputTransform::Softplus, OutputTransform::Softplus,
          OutputTransform::Softplus,    OutputTransform::Softplus, OutputTransform::Softplus,
          OutputTransform::Sigmoid};
}

inline std::vector<int> bgp_phi_dims() { return {136, 128, 64, 64, 6}; }
inline std::vector<std::string> bgp_param_names() {
  return {"xi1", "xi2", "sigma1", "sigma2", "a_T", "b_T"};
}
inline std::vector<OutputTransform> bgp_out_transforms() {
  return {OutputTransform::Softplus, OutputTransform::Softplus, OutputTransform::Softplus,
          OutputTransform::Softplus, OutputTransform::Softplus, OutputTransform::Identity};
}

/// Symmetric uniform fan-in initialisation: U(-1/sqrt(in), 1/sqrt(in)).
inline NetworkWeights init_network(const std::vector<int>& psi_dims,
                                   const std::vector<int>& phi_dims,
                                   std::vector<OutputTransform> out,
                                   std::vector<std::string> names, Rng& rng) {
  auto build = [&rng](const std::vector<int>& dims) {
    std::vector<DenseLayer> layers;
    for (std::size_t k = 0; k + 1 < dims.size(); ++k) {
      DenseLayer layer;
      layer.W.resize(dims[k + 1], dims[k]);
      layer.b.resize(dims[k + 1]);
      const double bound = 1.0 / std::sqrt(static_cast<double>(dims[k]));
      for (Eigen::Index r = 0; r < layer.W.rows(); ++r)
        for (Eigen::Index c = 0; c < layer.W.cols(); ++c)
          layer.W(r, c) = rng.uniform(-bound, bound);
      for (Eigen::Index r = 0; r < layer.b.size(); ++r) layer.b(r) = rng.uniform(-bound, bound);
      layers.push_back(std::move(layer));
    }
    return layers;
  };
  NetworkWeights w;
  w.psi = build(psi_dims);
  w.phi = build(phi_dims);
  w.out_transform = std::move(out);
  w.param_names = std::move(names);
  w.validate();
  return w;
}

inline NetworkWeights init_sbgp_network(Rng& rng) {
  return init_network(sbgp_psi_dims(), sbgp_phi_dims(), sbgp_out_transforms(),
                      sbgp_param_names(), rng);
}

inline NetworkWeights init_bgp_network(Rng& rng) {
  return init_network(sbgp_psi_dims(), bgp_phi_dims(), bgp_out_transforms(), bgp_param_names(),
                      rng);
}

namespace detail {

// Mean over rows via order-independent exact summation, so that the pooled
// vector (and hence the whole forward pass) is bitwise invariant under row
// permutations and row duplication.
inline Eigen::VectorXd exact_row_mean(const Eigen::MatrixXd& m) {
  Eigen::VectorXd mean(m.cols());
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    ExactSum acc;
    for (Eigen::Index r = 0; r < m.rows(); ++r) acc.add(m(r, c));
    mean(c) = acc.value() / static_cast<double>(m.rows());
  }
  return mean;
}

}  // namespace detail

/// Activations retained by a forward pass for backpropagation.
struct ForwardTrace {
  std::vector<Eigen::MatrixXd> psi_act;  ///< post-ReLU activations, one per psi layer
  Eigen::VectorXd pooled;
  Eigen::VectorXd phi_in;                ///< pooled features + summary statistics
  std::vector<Eigen::VectorXd> phi_act;  ///< post-ReLU activations of hidden phi layers
  Eigen::VectorXd z_out;                 ///< pre-transform outputs
  Eigen::VectorXd theta;                 ///< transformed outputs
};

inline ForwardTrace forward_trace(const NetworkWeights& w, const Sample& sample) {
  w.validate();
  if (sample.rows() < 2) throw std::domain_error("forward: need at least 2 replicates");
  ForwardTrace t;
  const Eigen::Index n = sample.rows();
  t.psi_act.resize(w.psi.size());
  for (std::size_t k = 0; k < w.psi.size(); ++k)
    t.psi_act[k].resize(n, w.psi[k].W.rows());
  // One row at a time: each row's features depend only on its own values, so
  // together with the exact pooled mean the pass is bitwise invariant under
  // row permutation and duplication (a batched product is not, its rounding
  // depends on the blocking).
  Eigen::VectorXd v, u;
  for (Eigen::Index i = 0; i < n; ++i) {
    v = sample.row(i).transpose();
    for (std::size_t k = 0; k < w.psi.size(); ++k) {
      u.noalias() = w.psi[k].W * v;
      u += w.psi[k].b;
      v = u.cwiseMax(0.0);
      t.psi_act[k].row(i) = v.transpose();
    }
  }
  t.pooled = detail::exact_row_mean(t.psi_act.back());
  t.phi_in.resize(t.pooled.size() + static_cast<Eigen::Index>(kSummaryLevels.size()));
  t.phi_in << t.pooled, summary_stats(sample);

  Eigen::VectorXd a = t.phi_in;
  for (std::size_t k = 0; k + 1 < w.phi.size(); ++k) {
    a = (w.phi[k].W * a + w.phi[k].b).cwiseMax(0.0);
    t.phi_act.push_back(a);
  }
  t.z_out = w.phi.back().W * a + w.phi.back().b;
  t.theta.resize(t.z_out.size());
  for (Eigen::Index j = 0; j < t.z_out.size(); ++j)
    t.theta(j) = act::apply(w.out_transform[static_cast<std::size_t>(j)], t.z_out(j));
  return t;
}

/// Point estimate for a sample; permutation invariant by construction.
inline Eigen::VectorXd forward(const NetworkWeights& w, const Sample& sample) {
  return forward_trace(w, sample).theta;
}

inline NetworkWeights zeros_like(const NetworkWeights& w) {
  NetworkWeights g = w;
  for (auto* stack : {&g.psi, &g.phi})
    for (auto& layer : *stack) {
      layer.W.setZero();
      layer.b.setZero();
    }
  return g;
}

/// Exact gradient of dtheta . theta(w) with respect to all weights and biases,
/// propagated through the output transforms, phi, the mean pooling and psi.
/// The summary statistics are rank-based and piecewise constant in the data,
/// so they contribute no gradient.
inline NetworkWeights backward(const NetworkWeights& w, const Sample& sample,
                               const ForwardTrace& t, const Eigen::VectorXd& dtheta) {
  NetworkWeights grad = zeros_like(w);
  Eigen::VectorXd dz = dtheta;
  for (Eigen::Index j = 0; j < dz.size(); ++j)
    dz(j) *= act::derivative(w.out_transform[static_cast<std::size_t>(j)], t.z_out(j));

  for (std::size_t k = w.phi.size(); k-- > 0;) {
    const Eigen::VectorXd& input = k == 0 ? t.phi_in : t.phi_act[k - 1];
    grad.phi[k].W.noalias() = dz * input.transpose();
    grad.phi[k].b = dz;
    Eigen::VectorXd dinput = w.phi[k].W.transpose() * dz;
    if (k > 0) {
      for (Eigen::Index i = 0; i < dinput.size(); ++i)
        if (!(t.phi_act[k - 1](i) > 0.0)) dinput(i) = 0.0;
      dz = std::move(dinput);
    } else {
      dz = std::move(dinput);
    }
  }

  const Eigen::Index pooled_dim = t.pooled.size();
  const Eigen::VectorXd dpool = dz.head(pooled_dim) / static_cast<double>(sample.rows());
  const Eigen::Index n = sample.rows();
  Eigen::MatrixXd delta = dpool.transpose().replicate(n, 1);
  for (std::size_t k = w.psi.size(); k-- > 0;) {
    delta.array() *= (t.psi_act[k].array() > 0.0).cast<double>();
    if (k == 0)
      grad.psi[k].W.noalias() = delta.transpose() * sample;
    else
      grad.psi[k].W.noalias() = delta.transpose() * t.psi_act[k - 1];
    grad.psi[k].b = delta.colwise().sum().transpose();
    if (k > 0) delta = delta * w.psi[k].W;
  }
  return grad;
}

}  // namespace sbgp
