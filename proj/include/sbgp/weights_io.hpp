// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "sbgp/network.hpp"

namespace sbgp {

inline const char* to_string(OutputTransform t) {
  switch (t) {
    case OutputTransform::HalfSigmoid: return "half_sigmoid";
    case OutputTransform::Sigmoid: return "sigmoid";
    case OutputTransform::Softplus: return "softplus";
    case OutputTransform::Identity: return "identity";
  }
  return "identity";
}

inline OutputTransform output_transform_from_string(const std::string& s) {
  if (s == "half_sigmoid") return OutputTransform::HalfSigmoid;
  if (s == "sigmoid") return OutputTransform::Sigmoid;
  if (s == "softplus") return OutputTransform::Softplus;
  if (s == "identity") return OutputTransform::Identity;
  throw std::runtime_error("unknown output transform '" + s + "'");
}

/// Weights file: a JSON header (version, layer dims, activation spec,
/// parameter order, training penalty) followed by row-major weight and bias
/// arrays in decimal, which round-trips doubles exactly.
inline void save_weights(const NetworkWeights& w, const std::string& path) {
  w.validate();
  nlohmann::json j;
  j["version"] = 1;
  j["param_order"] = w.param_names;
  j["lambda"] = w.trained_lambda;
  nlohmann::json acts = nlohmann::json::array();
  for (OutputTransform t : w.out_transform) acts.push_back(to_string(t));
  j["activation_spec"] = {{"hidden", "relu"}, {"output", acts}};
  auto dims_of = [](const std::vector<DenseLayer>& stack) {
    std::vector<Eigen::Index> dims{stack.front().W.cols()};
    for (const auto& layer : stack) dims.push_back(layer.W.rows());
    return dims;
  };
  j["psi_dims"] = dims_of(w.psi);
  j["phi_dims"] = dims_of(w.phi);
  auto dump_stack = [](const std::vector<DenseLayer>& stack) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& layer : stack) {
      nlohmann::json lj;
      lj["rows"] = layer.W.rows();
      lj["cols"] = layer.W.cols();
      std::vector<double> wflat;
      wflat.reserve(static_cast<std::size_t>(layer.W.size()));
      for (Eigen::Index r = 0; r < layer.W.rows(); ++r)
        for (Eigen::Index c = 0; c < layer.W.cols(); ++c) wflat.push_back(layer.W(r, c));
      lj["w"] = wflat;
      lj["b"] = std::vector<double>(layer.b.data(), layer.b.data() + layer.b.size());
      arr.push_back(std::move(lj));
    }
    return arr;
  };
  j["psi"] = dump_stack(w.psi);
  j["phi"] = dump_stack(w.phi);
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << j.dump(1, '\t') << '\n';
}

inline NetworkWeights load_weights(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open weights file '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("weights file '" + path + "': invalid JSON: " + e.what());
  }
  NetworkWeights w;
  try {
    if (j.at("version").get<int>() != 1)
      throw std::runtime_error("unsupported version " + j.at("version").dump());
    w.param_names = j.at("param_order").get<std::vector<std::string>>();
    w.trained_lambda = j.at("lambda").get<double>();
    for (const auto& s : j.at("activation_spec").at("output"))
      w.out_transform.push_back(output_transform_from_string(s.get<std::string>()));
    auto load_stack = [&](const char* key) {
      std::vector<DenseLayer> stack;
      const auto& arr = j.at(key);
      for (std::size_t k = 0; k < arr.size(); ++k) {
        const auto& lj = arr[k];
        const auto where = std::string(key) + " layer " + std::to_string(k);
        DenseLayer layer;
        const Eigen::Index rows = lj.at("rows").get<Eigen::Index>();
        const Eigen::Index cols = lj.at("cols").get<Eigen::Index>();
        const auto wflat = lj.at("w").get<std::vector<double>>();
        const auto bflat = lj.at("b").get<std::vector<double>>();
        if (static_cast<Eigen::Index>(wflat.size()) != rows * cols)
          throw std::runtime_error(where + ": weight array has " +
                                   std::to_string(wflat.size()) + " values, expected " +
                                   std::to_string(rows * cols));
        if (static_cast<Eigen::Index>(bflat.size()) != rows)
          throw std::runtime_error(where + ": bias array has " + std::to_string(bflat.size()) +
                                   " values, expected " + std::to_string(rows));
        layer.W.resize(rows, cols);
        for (Eigen::Index r = 0; r < rows; ++r)
          for (Eigen::Index c = 0; c < cols; ++c)
            layer.W(r, c) = wflat[static_cast<std::size_t>(r * cols + c)];
        layer.b = Eigen::Map<const Eigen::VectorXd>(bflat.data(),
                                                    static_cast<Eigen::Index>(bflat.size()));
        stack.push_back(std::move(layer));
      }
      return stack;
    };
    w.psi = load_stack("psi");
    w.phi = load_stack("phi");
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("weights file '" + path + "': " + e.what());
  }
  try {
    w.validate();
  } catch (const std::exception& e) {
    throw std::runtime_error("weights file '" + path + "': " + e.what());
  }
  return w;
}

}  // namespace sbgp
