// SPDX-License-Identifier: Apache-2.0
//
// Command-line interface: simulation, estimator training and fitting,
// dependence diagnostics, bootstrap uncertainty and data ingestion.
// Exit codes: 0 ok, 1 computation failure, 2 usage error.

#include <CLI11.hpp>

#include <algorithm>
#include <array>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "sbgp/bgp.hpp"
#include "sbgp/bootstrap.hpp"
#include "sbgp/dependence.hpp"
#include "sbgp/ingest.hpp"
#include "sbgp/io.hpp"
#include "sbgp/model.hpp"
#include "sbgp/network.hpp"
#include "sbgp/parallel.hpp"
#include "sbgp/train.hpp"
#include "sbgp/weights_io.hpp"

namespace {

using nlohmann::json;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void require_readable(const std::string& path, const char* what) {
  std::ifstream in(path);
  if (!in) throw UsageError(std::string(what) + " file not found: " + path);
}

json load_json_file(const std::string& path, const char* what) {
  require_readable(path, what);
  std::ifstream in(path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw UsageError(std::string(what) + " file '" + path + "' is not valid JSON: " + e.what());
  }
  return j;
}

std::vector<double> parse_levels(const std::string& spec) {
  const auto c1 = spec.find(':');
  const auto c2 = spec.find(':', c1 == std::string::npos ? c1 : c1 + 1);
  if (c1 == std::string::npos || c2 == std::string::npos)
    throw UsageError("levels must be start:end:count, got '" + spec + "'");
  const double lo = std::stod(spec.substr(0, c1));
  const double hi = std::stod(spec.substr(c1 + 1, c2 - c1 - 1));
  const int count = std::stoi(spec.substr(c2 + 1));
  if (!(lo >= 0.0) || !(hi < 1.0) || !(hi > lo) || count < 2)
    throw UsageError("levels must satisfy 0 <= start < end < 1 and count >= 2");
  std::vector<double> levels(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i)
    levels[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (count - 1);
  return levels;
}

sbgp::PriorConfig prior_from_json(const json& j) {
  sbgp::PriorConfig cfg;
  auto range = [&](const char* key, std::pair<double, double>& target) {
    if (j.contains(key)) target = {j[key][0].get<double>(), j[key][1].get<double>()};
  };
  if (j.contains("ad_atom_prob")) cfg.ad_atom_prob = j["ad_atom_prob"].get<double>();
  range("xi1_range", cfg.xi1_range);
  range("sigma_T_range", cfg.sigma_T_range);
  range("w_range", cfg.w_range);
  range("beta_range", cfg.beta_range);
  if (j.contains("n_range"))
    cfg.n_range = {j["n_range"][0].get<int>(), j["n_range"][1].get<int>()};
  cfg.validate();
  return cfg;
}

sbgp::BgpPriorConfig bgp_prior_from_json(const json& j) {
  sbgp::BgpPriorConfig cfg;
  auto range = [&](const char* key, std::pair<double, double>& target) {
    if (j.contains(key)) target = {j[key][0].get<double>(), j[key][1].get<double>()};
  };
  range("xi_range", cfg.xi_range);
  range("sigma_range", cfg.sigma_range);
  range("a_range", cfg.a_range);
  range("b_range", cfg.b_range);
  if (j.contains("n_range"))
    cfg.n_range = {j["n_range"][0].get<int>(), j["n_range"][1].get<int>()};
  cfg.validate();
  return cfg;
}

sbgp::TrainConfig train_config_from_json(const json& j) {
  sbgp::TrainConfig cfg;
  if (j.contains("learning_rate")) cfg.learning_rate = j["learning_rate"].get<double>();
  if (j.contains("batch_size")) cfg.batch_size = j["batch_size"].get<int>();
  if (j.contains("num_steps")) cfg.num_steps = j["num_steps"].get<int>();
  if (j.contains("lambda")) cfg.lambda = j["lambda"].get<double>();
  if (j.contains("scale_matrix_diag"))
    cfg.scale_matrix_diag = j["scale_matrix_diag"].get<std::vector<double>>();
  if (j.contains("val_size")) cfg.val_size = j["val_size"].get<int>();
  if (j.contains("val_every")) cfg.val_every = j["val_every"].get<int>();
  if (j.contains("patience")) cfg.patience = j["patience"].get<int>();
  cfg.validate();
  return cfg;
}

sbgp::NetworkWeights load_weights_checked(const std::string& path, int expected_out) {
  require_readable(path, "weights");
  sbgp::NetworkWeights w = sbgp::load_weights(path);
  if (w.out_dim() != expected_out)
    throw UsageError("weights file '" + path + "' has " + std::to_string(w.out_dim()) +
                     " outputs, expected " + std::to_string(expected_out));
  return w;
}

std::array<double, 7> estimate_vector(const sbgp::NetworkWeights& w, const sbgp::Sample& data) {
  const Eigen::VectorXd est = sbgp::forward(w, data);
  return {est(0), est(1), est(2), est(3), est(4), est(5), est(6)};
}

json fit_to_json(const std::array<double, 7>& est, Eigen::Index n_rows) {
  const sbgp::SbgpParams p = sbgp::params_from_reparam_vector(est);
  json j = sbgp::sbgp_params_to_json(p);
  j["n"] = n_rows;
  return j;
}

// threshold metadata written next to exceedance CSVs
std::string meta_path_for(const std::string& csv_path) { return csv_path + ".meta.json"; }

std::array<double, 2> thresholds_for(const std::string& csv_path) {
  std::array<double, 2> u{0.0, 0.0};
  std::ifstream in(meta_path_for(csv_path));
  if (in) {
    json j;
    in >> j;
    u[0] = j.at("thresholds")[0].get<double>();
    u[1] = j.at("thresholds")[1].get<double>();
  }
  return u;
}

// conditional-on-positive marginal quantile of the fitted model
double sbgp_positive_quantile(const sbgp::SbgpParams& p, int margin, double prob) {
  const double f0 = sbgp::marginal_cdf(p, margin, 0.0);
  return sbgp::marginal_quantile(p, margin, f0 + prob * (1.0 - f0));
}

int run_simulate(const std::string& params_path, long n, std::uint64_t seed,
                 const std::string& out) {
  const sbgp::SbgpParams p = sbgp::sbgp_params_from_json(load_json_file(params_path, "params"));
  sbgp::Rng rng(seed);
  const sbgp::Sample s = sbgp::sample(p, n, rng);
  sbgp::write_sample_csv(out, s);
  std::cout << "wrote " << n << " rows to " << out << "\n";
  return 0;
}

int run_fit(const std::string& weights_path, const std::string& data_path,
            const std::string& out, bool penalized) {
  const sbgp::NetworkWeights w = load_weights_checked(weights_path, 7);
  if (penalized && w.trained_lambda <= 0.0)
    throw UsageError("--penalized given but weights were trained with lambda = 0");
  if (!penalized && w.trained_lambda > 0.0)
    std::cerr << "note: weights were trained with the penalized loss (lambda = "
              << w.trained_lambda << ")\n";
  require_readable(data_path, "data");
  const sbgp::Sample data = sbgp::read_sample_csv(data_path);
  const json j = fit_to_json(estimate_vector(w, data), data.rows());
  std::ofstream(out) << j.dump(1, '\t') << "\n";
  std::cout << "eta=" << j["eta"] << " xi1=" << j["xi1"] << " xi2=" << j["xi2"]
            << " w=" << j["w"] << " -> " << out << "\n";
  return 0;
}

int run_train(const std::string& prior_path, const std::string& config_path, std::uint64_t seed,
              const std::string& out, const std::string& model) {
  sbgp::TrainConfig cfg;
  if (!config_path.empty()) cfg = train_config_from_json(load_json_file(config_path, "config"));
  sbgp::Rng rng(seed);
  sbgp::TrainResult result;
  if (model == "sbgp") {
    sbgp::PriorConfig prior;
    if (!prior_path.empty()) prior = prior_from_json(load_json_file(prior_path, "prior"));
    result = sbgp::train_sbgp(prior, cfg, rng);
  } else if (model == "bgp") {
    sbgp::BgpPriorConfig prior;
    if (!prior_path.empty()) prior = bgp_prior_from_json(load_json_file(prior_path, "prior"));
    result = sbgp::train_bgp(prior, cfg, rng);
  } else {
    throw UsageError("--model must be sbgp or bgp");
  }
  sbgp::save_weights(result.weights, out);
  std::cout << "trained " << model << " estimator: initial risk " << result.val_risk.front()
            << ", best risk " << *std::min_element(result.val_risk.begin(), result.val_risk.end())
            << ", " << result.redraw_count << " simulations redrawn -> " << out << "\n";
  return 0;
}

int run_chi_curve(const std::string& data_path, const std::string& levels_spec,
                  const std::string& out, bool with_eta) {
  require_readable(data_path, "data");
  const sbgp::Sample data = sbgp::read_sample_csv(data_path);
  const sbgp::ChiCurve curve = sbgp::chi_curve(data, parse_levels(levels_spec));
  sbgp::write_chi_curve_csv(out, curve, with_eta);
  std::cout << "wrote " << curve.levels.size() << " levels to " << out << "\n";
  return 0;
}

int run_bootstrap(const std::string& data_path, const std::string& weights_path, int B,
                  std::uint64_t seed, double level, const std::string& out,
                  std::string out_json) {
  const sbgp::NetworkWeights w = load_weights_checked(weights_path, 7);
  require_readable(data_path, "data");
  const sbgp::Sample data = sbgp::read_sample_csv(data_path);
  sbgp::Rng rng(seed);
  const sbgp::BootstrapResult result = sbgp::nonparam_bootstrap(data, w, B, rng, level);
  sbgp::write_bootstrap_csv(out, result, w.param_names);
  if (out_json.empty()) {
    out_json = out;
    const auto dot = out_json.rfind(".csv");
    if (dot != std::string::npos) out_json.erase(dot);
    out_json += ".json";
  }
  std::ofstream(out_json) << sbgp::bootstrap_intervals_json(result, w.param_names).dump(1, '\t')
                          << "\n";
  std::cout << "wrote " << B << " replicates to " << out << ", intervals to " << out_json
            << "\n";
  return 0;
}

int run_ingest(const std::string& csv_path, const std::string& date_col,
               const std::string& cols, bool weekly, const std::string& season, double level,
               const std::string& out) {
  const auto comma = cols.find(',');
  if (comma == std::string::npos)
    throw UsageError("--cols expects two comma-separated column names");
  const std::array<std::string, 2> value_cols{cols.substr(0, comma), cols.substr(comma + 1)};
  require_readable(csv_path, "csv");
  sbgp::BivariateSeries series = sbgp::load_csv(csv_path, date_col, value_cols);
  if (weekly) series = sbgp::weekly_maxima(series);
  if (!season.empty()) {
    const auto colon = season.find(':');
    if (colon == std::string::npos) throw UsageError("--season expects MM-DD:MM-DD");
    series = sbgp::season_filter(
        series, sbgp::dates::parse_month_day(season.substr(0, colon), "--season"),
        sbgp::dates::parse_month_day(season.substr(colon + 1), "--season"));
  }
  for (const auto& note : series.notes) std::cerr << "note: " << note << "\n";
  const sbgp::ExceedanceSet set = sbgp::exceedance_set(series, level);
  sbgp::write_sample_csv(out, set.centered());
  json meta = {{"threshold_level", set.threshold_level},
               {"thresholds", {set.thresholds[0], set.thresholds[1]}},
               {"total_n", set.total_n},
               {"retained", set.rows.rows()},
               {"site_labels", {series.labels[0], series.labels[1]}},
               {"dropped_missing", series.dropped_missing},
               {"sort_warnings", series.sort_warnings}};
  std::ofstream(meta_path_for(out)) << meta.dump(1, '\t') << "\n";
  std::cout << "retained " << set.rows.rows() << " of " << set.total_n
            << " rows above thresholds (" << set.thresholds[0] << ", " << set.thresholds[1]
            << ") -> " << out << "\n";
  return 0;
}

struct SiteSeries {
  std::string label;
  std::map<long, double> by_day;
};

SiteSeries load_site_csv(const std::filesystem::path& path, const std::string& date_col) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw UsageError(path.string() + " is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = sbgp::detail::split_csv_line(line);
  std::size_t date_idx = header.size(), value_idx = header.size();
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == date_col) {
      date_idx = i;
    } else if (value_idx == header.size()) {
      value_idx = i;
    } else {
      throw UsageError(path.string() + ": expected one date and one value column");
    }
  }
  if (date_idx == header.size() || value_idx == header.size())
    throw UsageError(path.string() + ": need a '" + date_col + "' column and one value column");
  SiteSeries site;
  site.label = header[value_idx];
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = sbgp::detail::split_csv_line(line);
    const std::string ctx = path.string() + " line " + std::to_string(line_no);
    if (fields.size() <= std::max(date_idx, value_idx))
      throw std::runtime_error(ctx + ": too few columns");
    if (sbgp::detail::is_missing(fields[value_idx])) continue;
    const long day = sbgp::dates::parse_iso_date(fields[date_idx], ctx);
    site.by_day[day] = sbgp::detail::parse_double(fields[value_idx], ctx);
  }
  return site;
}

int run_batch_fit(const std::string& dir, const std::string& ref_label,
                  const std::string& date_col, double level, const std::string& weights_path,
                  const std::string& out) {
  const sbgp::NetworkWeights w = load_weights_checked(weights_path, 7);
  if (!std::filesystem::is_directory(dir))
    throw UsageError("--csv-dir is not a directory: " + dir);
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir))
    if (entry.path().extension() == ".csv") files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  if (files.empty()) throw UsageError("no .csv files in " + dir);

  std::vector<SiteSeries> sites;
  for (const auto& f : files) sites.push_back(load_site_csv(f, date_col));
  const auto ref_it = std::find_if(sites.begin(), sites.end(),
                                   [&](const SiteSeries& s) { return s.label == ref_label; });
  if (ref_it == sites.end())
    throw UsageError("no site column named '" + ref_label + "' in " + dir);
  const SiteSeries ref = *ref_it;

  std::vector<const SiteSeries*> others;
  for (const auto& s : sites)
    if (s.label != ref_label) others.push_back(&s);

  std::vector<std::string> rows(others.size());
  sbgp::parallel_for(others.size(), [&](std::size_t i) {
    const SiteSeries& site = *others[i];
    std::vector<std::array<double, 2>> joined;
    for (const auto& [day, value] : ref.by_day) {
      const auto it = site.by_day.find(day);
      if (it != site.by_day.end()) joined.push_back({value, it->second});
    }
    try {
      sbgp::BivariateSeries series;
      series.labels = {ref.label, site.label};
      series.values.resize(static_cast<Eigen::Index>(joined.size()), 2);
      for (std::size_t k = 0; k < joined.size(); ++k) {
        series.days.push_back(static_cast<long>(k));
        series.values(static_cast<Eigen::Index>(k), 0) = joined[k][0];
        series.values(static_cast<Eigen::Index>(k), 1) = joined[k][1];
      }
      const sbgp::ExceedanceSet set = sbgp::exceedance_set(series, level);
      const auto est = estimate_vector(w, set.centered());
      std::ostringstream os;
      os << std::setprecision(17) << site.label;
      for (double v : est) os << ',' << v;
      rows[i] = os.str();
    } catch (const std::exception& e) {
      std::cerr << "warning: pair (" << ref.label << ", " << site.label
                << ") skipped: " << e.what() << "\n";
    }
  });

  auto out_stream = sbgp::detail::open_out(out);
  out_stream << "site,eta,xi1,xi2,beta1,beta2,sigma_T,w\n";
  int written = 0;
  for (const auto& row : rows)
    if (!row.empty()) {
      out_stream << row << "\n";
      ++written;
    }
  std::cout << "fitted " << written << " pairs against '" << ref_label << "' -> " << out
            << "\n";
  return 0;
}

int run_compare(const std::string& data_path, const std::string& sbgp_weights_path,
                const std::string& bgp_weights_path, std::uint64_t seed,
                const std::string& out) {
  const sbgp::NetworkWeights sw = load_weights_checked(sbgp_weights_path, 7);
  const sbgp::NetworkWeights bw = load_weights_checked(bgp_weights_path, 6);
  require_readable(data_path, "data");
  const sbgp::Sample data = sbgp::read_sample_csv(data_path);
  const std::array<double, 2> thresholds = thresholds_for(data_path);

  const auto est = estimate_vector(sw, data);
  const sbgp::SbgpParams sbgp_fit = sbgp::params_from_reparam_vector(est);
  const sbgp::BgpParams bgp_fit = sbgp::fit_bgp(data, bw);

  // chi(q) curves: empirical and model-implied (simulation-based, size 1e4)
  const std::vector<double> levels = parse_levels("0.50:0.99:50");
  const sbgp::ChiCurve empirical = sbgp::chi_curve(data, levels);
  sbgp::Rng rng(seed);
  const sbgp::ChiCurve sbgp_curve = sbgp::mc_chi_curve(sbgp_fit, levels, 10000, rng);
  const sbgp::Sample bgp_sim = sbgp::sample_bgp(bgp_fit, 10000, rng);
  const sbgp::ChiCurve bgp_curve = sbgp::chi_curve(bgp_sim, levels);

  std::string stem = out;
  const auto dot = stem.rfind(".json");
  if (dot != std::string::npos) stem.erase(dot);
  const std::string chi_path = stem + "_chi.csv";
  const std::string qq_path = stem + "_qq.csv";

  {
    auto os = sbgp::detail::open_out(chi_path);
    os << "q,empirical,sbgp,bgp\n";
    for (std::size_t i = 0; i < levels.size(); ++i)
      os << levels[i] << ',' << empirical.values[i] << ',' << sbgp_curve.values[i] << ','
         << bgp_curve.values[i] << "\n";
  }
  {
    auto os = sbgp::detail::open_out(qq_path);
    os << "margin,p,empirical,sbgp,bgp\n";
    for (int j = 1; j <= 2; ++j) {
      std::vector<double> exceed;
      for (Eigen::Index i = 0; i < data.rows(); ++i)
        if (data(i, j - 1) > 0.0) exceed.push_back(data(i, j - 1));
      std::sort(exceed.begin(), exceed.end());
      const double u = thresholds[static_cast<std::size_t>(j - 1)];
      const sbgp::GpParams gp{j == 1 ? bgp_fit.xi1 : bgp_fit.xi2,
                              j == 1 ? bgp_fit.sigma1 : bgp_fit.sigma2};
      for (std::size_t i = 0; i < exceed.size(); ++i) {
        const double p = (static_cast<double>(i) + 0.5) / static_cast<double>(exceed.size());
        os << j << ',' << p << ',' << exceed[i] + u << ','
           << sbgp_positive_quantile(sbgp_fit, j, p) + u << ','
           << sbgp::gp_quantile(gp, p) + u << "\n";
      }
    }
  }
  json j = {{"sbgp", fit_to_json(est, data.rows())},
            {"bgp", sbgp::bgp_params_to_json(bgp_fit)},
            {"chi_csv", chi_path},
            {"qq_csv", qq_path}};
  std::ofstream(out) << j.dump(1, '\t') << "\n";
  std::cout << "compared fits on " << data.rows() << " exceedances -> " << out << "\n";
  return 0;
}

int run_qq(const std::string& data_path, const std::string& fit_path, const std::string& out) {
  require_readable(data_path, "data");
  const sbgp::Sample data = sbgp::read_sample_csv(data_path);
  const sbgp::SbgpParams p = sbgp::sbgp_params_from_json(load_json_file(fit_path, "fit"));
  const std::array<double, 2> thresholds = thresholds_for(data_path);
  auto os = sbgp::detail::open_out(out);
  os << "margin,p,empirical,model\n";
  for (int j = 1; j <= 2; ++j) {
    std::vector<double> exceed;
    for (Eigen::Index i = 0; i < data.rows(); ++i)
      if (data(i, j - 1) > 0.0) exceed.push_back(data(i, j - 1));
    std::sort(exceed.begin(), exceed.end());
    const double u = thresholds[static_cast<std::size_t>(j - 1)];
    for (std::size_t i = 0; i < exceed.size(); ++i) {
      const double prob = (static_cast<double>(i) + 0.5) / static_cast<double>(exceed.size());
      os << j << ',' << prob << ',' << exceed[i] + u << ','
         << sbgp_positive_quantile(p, j, prob) + u << "\n";
    }
  }
  std::cout << "wrote marginal quantile pairs to " << out << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sub-asymptotic bivariate GP toolkit"};
  app.require_subcommand(1);

  auto* sim = app.add_subcommand("simulate", "draw a sample from the model");
  std::string sim_params, sim_out;
  long sim_n = 1000;
  std::uint64_t sim_seed = 1;
  sim->add_option("--params", sim_params, "parameter JSON file")->required();
  sim->add_option("--n", sim_n, "number of rows")->required();
  sim->add_option("--seed", sim_seed, "rng seed")->required();
  sim->add_option("--out", sim_out, "output CSV")->required();

  auto* fit = app.add_subcommand("fit", "estimate parameters for a sample");
  std::string fit_weights, fit_data, fit_out;
  bool fit_penalized = false;
  fit->add_option("--weights", fit_weights, "trained weights JSON")->required();
  fit->add_option("--data", fit_data, "sample CSV")->required();
  fit->add_option("--out", fit_out, "output fit JSON")->required();
  fit->add_flag("--penalized", fit_penalized, "require weights trained with the penalized loss");

  auto* train = app.add_subcommand("train", "train the neural estimator");
  std::string train_prior, train_config, train_out, train_model = "sbgp";
  std::uint64_t train_seed = 1;
  train->add_option("--prior", train_prior, "prior JSON (defaults if omitted)");
  train->add_option("--config", train_config, "training config JSON (defaults if omitted)");
  train->add_option("--seed", train_seed, "rng seed")->required();
  train->add_option("--out", train_out, "output weights JSON")->required();
  train->add_option("--model", train_model, "sbgp or bgp");

  auto* chi = app.add_subcommand("chi-curve", "empirical chi(q) curve of a sample");
  std::string chi_data, chi_levels = "0.5:0.99:50", chi_out;
  bool chi_eta = false;
  chi->add_option("--data", chi_data, "sample CSV")->required();
  chi->add_option("--levels", chi_levels, "grid start:end:count");
  chi->add_option("--out", chi_out, "output CSV")->required();
  chi->add_flag("--eta", chi_eta, "add the eta(q) column");

  auto* boot = app.add_subcommand("bootstrap", "nonparametric bootstrap of a fit");
  std::string boot_data, boot_weights, boot_out, boot_out_json;
  int boot_B = 200;
  double boot_level = 0.95;
  std::uint64_t boot_seed = 1;
  boot->add_option("--data", boot_data, "sample CSV")->required();
  boot->add_option("--weights", boot_weights, "trained weights JSON")->required();
  boot->add_option("-B,--replicates", boot_B, "number of resamples");
  boot->add_option("--seed", boot_seed, "rng seed")->required();
  boot->add_option("--level", boot_level, "confidence level");
  boot->add_option("--out", boot_out, "output CSV")->required();
  boot->add_option("--out-json", boot_out_json, "intervals JSON (default: out with .json)");

  auto* ingest = app.add_subcommand("ingest", "CSV -> weekly maxima -> season -> exceedances");
  std::string ing_csv, ing_date = "date", ing_cols, ing_season, ing_out;
  bool ing_weekly = false;
  double ing_level = 0.7;
  ingest->add_option("--csv", ing_csv, "raw CSV file")->required();
  ingest->add_option("--date-col", ing_date, "date column name");
  ingest->add_option("--cols", ing_cols, "two value column names, comma separated")->required();
  ingest->add_flag("--weekly", ing_weekly, "collapse to weekly maxima");
  ingest->add_option("--season", ing_season, "season window MM-DD:MM-DD");
  ingest->add_option("--level", ing_level, "threshold probability level");
  ingest->add_option("--out", ing_out, "output exceedance CSV")->required();

  auto* batch = app.add_subcommand("batch-fit", "pairwise fits against a reference site");
  std::string batch_dir, batch_ref, batch_date = "date", batch_weights, batch_out;
  double batch_level = 0.7;
  batch->add_option("--csv-dir", batch_dir, "directory of per-site CSVs")->required();
  batch->add_option("--ref-col", batch_ref, "value column label of the reference site")
      ->required();
  batch->add_option("--date-col", batch_date, "date column name");
  batch->add_option("--level", batch_level, "threshold probability level");
  batch->add_option("--weights", batch_weights, "trained weights JSON")->required();
  batch->add_option("--out", batch_out, "output pairs CSV")->required();

  auto* cmp = app.add_subcommand("compare", "fit both models and emit diagnostics");
  std::string cmp_data, cmp_sw, cmp_bw, cmp_out;
  std::uint64_t cmp_seed = 1;
  cmp->add_option("--data", cmp_data, "exceedance CSV")->required();
  cmp->add_option("--sbgp-weights", cmp_sw, "7-output weights JSON")->required();
  cmp->add_option("--bgp-weights", cmp_bw, "6-output weights JSON")->required();
  cmp->add_option("--seed", cmp_seed, "rng seed for model-implied curves");
  cmp->add_option("--out", cmp_out, "output JSON (plus _chi.csv and _qq.csv)")->required();

  auto* qq = app.add_subcommand("qq", "empirical vs model marginal quantiles");
  std::string qq_data, qq_fit, qq_out;
  qq->add_option("--data", qq_data, "exceedance CSV")->required();
  qq->add_option("--fit", qq_fit, "fit JSON")->required();
  qq->add_option("--out", qq_out, "output CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*sim) return run_simulate(sim_params, sim_n, sim_seed, sim_out);
    if (*fit) return run_fit(fit_weights, fit_data, fit_out, fit_penalized);
    if (*train) return run_train(train_prior, train_config, train_seed, train_out, train_model);
    if (*chi) return run_chi_curve(chi_data, chi_levels, chi_out, chi_eta);
    if (*boot)
      return run_bootstrap(boot_data, boot_weights, boot_B, boot_seed, boot_level, boot_out,
                           boot_out_json);
    if (*ingest)
      return run_ingest(ing_csv, ing_date, ing_cols, ing_weekly, ing_season, ing_level, ing_out);
    if (*batch)
      return run_batch_fit(batch_dir, batch_ref, batch_date, batch_level, batch_weights,
                           batch_out);
    if (*cmp) return run_compare(cmp_data, cmp_sw, cmp_bw, cmp_seed, cmp_out);
    if (*qq) return run_qq(qq_data, qq_fit, qq_out);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
