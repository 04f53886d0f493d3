// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <charconv>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "sbgp/bgp.hpp"
#include "sbgp/bootstrap.hpp"
#include "sbgp/dependence.hpp"
#include "sbgp/model.hpp"
#include "sbgp/sample.hpp"

namespace sbgp {

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

inline double parse_double(const std::string& s, const std::string& context) {
  double value{};
  const char* begin = s.data();
  const char* end = s.data() + s.size();
  while (begin < end && (*begin == ' ' || *begin == '\t')) ++begin;
  const auto res = std::from_chars(begin, end, value);
  if (res.ec != std::errc{})
    throw std::runtime_error(context + ": cannot parse '" + s + "' as a number");
  return value;
}

inline std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << std::setprecision(17);
  return out;
}

}  // namespace detail

inline void write_sample_csv(const std::string& path, const Sample& sample) {
  auto out = detail::open_out(path);
  out << "y1,y2\n";
  for (Eigen::Index i = 0; i < sample.rows(); ++i)
    out << sample(i, 0) << ',' << sample(i, 1) << '\n';
}

inline Sample read_sample_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open sample file '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("sample file '" + path + "' is empty");
  std::vector<std::array<double, 2>> rows;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = detail::split_csv_line(line);
    if (fields.size() < 2)
      throw std::runtime_error(path + " line " + std::to_string(line_no) +
                               ": expected two columns");
    const std::string ctx = path + " line " + std::to_string(line_no);
    rows.push_back({detail::parse_double(fields[0], ctx), detail::parse_double(fields[1], ctx)});
  }
  Sample sample(static_cast<Eigen::Index>(rows.size()), 2);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    sample(static_cast<Eigen::Index>(i), 0) = rows[i][0];
    sample(static_cast<Eigen::Index>(i), 1) = rows[i][1];
  }
  return sample;
}

/// Curve CSV with header q,chi and an optional eta column (blank entries are
/// written as nan when no joint exceedances were observed).
inline void write_chi_curve_csv(const std::string& path, const ChiCurve& curve,
                                bool with_eta = false) {
  auto out = detail::open_out(path);
  out << (with_eta ? "q,chi,eta\n" : "q,chi\n");
  for (std::size_t i = 0; i < curve.levels.size(); ++i) {
    out << curve.levels[i] << ',' << curve.values[i];
    if (with_eta) {
      const auto eta = eta_from_chi(curve.levels[i], curve.values[i]);
      out << ',' << (eta ? std::to_string(*eta) : "nan");
    }
    out << '\n';
  }
}

inline nlohmann::json sbgp_params_to_json(const SbgpParams& p) {
  const DerivedParams d = derived_from_natural(p);
  return {{"alpha", p.alpha},     {"alpha1", p.alpha1}, {"alpha2", p.alpha2},
          {"beta1", p.beta1},     {"beta2", p.beta2},   {"sigma_T", p.sigma_T},
          {"w", p.w},             {"eta", d.eta},       {"xi1", d.xi1},
          {"xi2", d.xi2},         {"chi", d.chi}};
}

/// Reads the natural parameters; derived keys (eta, xi1, xi2, chi) are
/// recomputed and ignored on input.
inline SbgpParams sbgp_params_from_json(const nlohmann::json& j) {
  SbgpParams p;
  try {
    p.alpha = j.at("alpha").get<double>();
    p.alpha1 = j.at("alpha1").get<double>();
    p.alpha2 = j.at("alpha2").get<double>();
    p.beta1 = j.at("beta1").get<double>();
    p.beta2 = j.at("beta2").get<double>();
    p.sigma_T = j.at("sigma_T").get<double>();
    p.w = j.at("w").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(std::string("parameter JSON: ") + e.what());
  }
  p.validate();
  return p;
}

inline nlohmann::json bgp_params_to_json(const BgpParams& p) {
  return {{"xi1", p.xi1},       {"xi2", p.xi2}, {"sigma1", p.sigma1},
          {"sigma2", p.sigma2}, {"a_T", p.a_T}, {"b_T", p.b_T}};
}

inline BgpParams bgp_params_from_json(const nlohmann::json& j) {
  BgpParams p;
  try {
    p.xi1 = j.at("xi1").get<double>();
    p.xi2 = j.at("xi2").get<double>();
    p.sigma1 = j.at("sigma1").get<double>();
    p.sigma2 = j.at("sigma2").get<double>();
    p.a_T = j.at("a_T").get<double>();
    p.b_T = j.at("b_T").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(std::string("parameter JSON: ") + e.what());
  }
  p.validate();
  return p;
}

/// Replicates as CSV: rep,<param names...>, one replicate per row.
inline void write_bootstrap_csv(const std::string& path, const BootstrapResult& result,
                                const std::vector<std::string>& names) {
  if (static_cast<Eigen::Index>(names.size()) != result.replicates.cols())
    throw std::invalid_argument("write_bootstrap_csv: name/column mismatch");
  auto out = detail::open_out(path);
  out << "rep";
  for (const auto& n : names) out << ',' << n;
  out << '\n';
  for (Eigen::Index b = 0; b < result.replicates.rows(); ++b) {
    out << (b + 1);
    for (Eigen::Index j = 0; j < result.replicates.cols(); ++j)
      out << ',' << result.replicates(b, j);
    out << '\n';
  }
}

inline nlohmann::json bootstrap_intervals_json(const BootstrapResult& result,
                                               const std::vector<std::string>& names) {
  nlohmann::json intervals;
  for (std::size_t j = 0; j < names.size(); ++j)
    intervals[names[j]] = {result.intervals[j].first, result.intervals[j].second};
  return {{"level", result.level},
          {"num_replicates", result.replicates.rows()},
          {"intervals", intervals}};
}

}  // namespace sbgp
