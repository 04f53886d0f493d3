// SPDX-License-Identifier: Apache-2.0
// End-to-end exercises of the command-line binary: every subcommand, the
// documented exit codes and the output schemas.
#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include <json.hpp>

#include "sbgp/ingest.hpp"
#include "sbgp/io.hpp"
#include "sbgp/rng.hpp"

namespace {

const std::string kCli = SBGP_CLI_PATH;
const std::string kDataDir = SBGP_DATA_DIR;

int run(const std::string& args) {
  const std::string cmd = kCli + " " + args + " >/dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string tmp(const std::string& name) { return ::testing::TempDir() + name; }

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  return lines;
}

void write_params_json(const std::string& path) {
  std::ofstream out(path);
  out << R"({"alpha":3.0,"alpha1":0.0,"alpha2":0.0,"beta1":20.0,"beta2":30.0,)"
      << R"("sigma_T":0.1,"w":0.8})";
}

// tiny training configuration: enough steps to exercise the loop, not learn
void write_tiny_train_config(const std::string& path) {
  std::ofstream out(path);
  out << R"({"num_steps":25,"val_size":4,"val_every":10,"batch_size":8})";
}

struct CliFixtures {
  std::string params = tmp("cli_params.json");
  std::string config = tmp("cli_train.json");
  std::string weights = tmp("cli_weights.json");
  std::string bgp_weights = tmp("cli_bgp_weights.json");
  std::string sample = tmp("cli_sample.csv");

  CliFixtures() {
    write_params_json(params);
    write_tiny_train_config(config);
    EXPECT_EQ(run("train --config " + config + " --seed 11 --out " + weights), 0);
    EXPECT_EQ(run("train --model bgp --config " + config + " --seed 12 --out " + bgp_weights),
              0);
    EXPECT_EQ(run("simulate --params " + params + " --n 400 --seed 13 --out " + sample), 0);
  }
};

const CliFixtures& fixtures() {
  static CliFixtures f;
  return f;
}

}  // namespace

TEST(Cli, UsageErrors) {
  EXPECT_EQ(run(""), 2);                       // missing subcommand
  EXPECT_EQ(run("frobnicate"), 2);             // unknown subcommand
  EXPECT_EQ(run("simulate --bogus 1"), 2);     // unknown flag
  EXPECT_EQ(run("--help"), 0);
  // missing weights file
  EXPECT_EQ(run("fit --weights /nonexistent/w.json --data /dev/null --out " + tmp("f.json")),
            2);
}

TEST(Cli, SimulateWritesSchema) {
  const auto& f = fixtures();
  const auto lines = read_lines(f.sample);
  ASSERT_EQ(lines.size(), 401u);
  EXPECT_EQ(lines[0], "y1,y2");
}

TEST(Cli, FitWritesParameterJson) {
  const auto& f = fixtures();
  const std::string out = tmp("cli_fit.json");
  ASSERT_EQ(run("fit --weights " + f.weights + " --data " + f.sample + " --out " + out), 0);
  std::ifstream in(out);
  nlohmann::json j;
  in >> j;
  for (const char* key :
       {"alpha", "alpha1", "alpha2", "beta1", "beta2", "sigma_T", "w", "eta", "xi1", "xi2",
        "chi"})
    EXPECT_TRUE(j.contains(key)) << key;
  EXPECT_GT(j["eta"].get<double>(), 0.5);
  EXPECT_LT(j["eta"].get<double>(), 1.0);
  // fit json parses back as model parameters
  EXPECT_NO_THROW(sbgp::sbgp_params_from_json(j));
}

TEST(Cli, FitPenalizedFlagChecksMetadata) {
  const auto& f = fixtures();
  EXPECT_EQ(run("fit --penalized --weights " + f.weights + " --data " + f.sample + " --out " +
                tmp("cli_fit_pen.json")),
            2);  // weights were trained with lambda = 0
}

TEST(Cli, ChiCurveRowCountMatchesLevels) {
  const auto& f = fixtures();
  const std::string out = tmp("cli_curve.csv");
  ASSERT_EQ(run("chi-curve --data " + f.sample + " --levels 0.5:0.999:50 --out " + out +
                " --eta"),
            0);
  const auto lines = read_lines(out);
  ASSERT_EQ(lines.size(), 51u);
  EXPECT_EQ(lines[0], "q,chi,eta");
}

TEST(Cli, BootstrapWritesReplicatesAndIntervals) {
  const auto& f = fixtures();
  const std::string out = tmp("cli_boot.csv");
  ASSERT_EQ(run("bootstrap --data " + f.sample + " --weights " + f.weights +
                " -B 12 --seed 14 --out " + out),
            0);
  const auto lines = read_lines(out);
  ASSERT_EQ(lines.size(), 13u);
  EXPECT_EQ(lines[0], "rep,eta,xi1,xi2,beta1,beta2,sigma_T,w");
  std::ifstream in(tmp("cli_boot.json"));
  ASSERT_TRUE(in.good());
  nlohmann::json j;
  in >> j;
  EXPECT_EQ(j["num_replicates"].get<int>(), 12);
  EXPECT_TRUE(j["intervals"].contains("eta"));
}

TEST(Cli, IngestDeterministicByteIdentical) {
  const std::string out1 = tmp("cli_exc1.csv");
  const std::string out2 = tmp("cli_exc2.csv");
  const std::string base = "ingest --csv " + kDataDir + "/synthetic_rainfall.csv" +
                           " --date-col date --cols site_a,site_b --weekly" +
                           " --season 09-21:12-21 --level 0.7 --out ";
  ASSERT_EQ(run(base + out1), 0);
  ASSERT_EQ(run(base + out2), 0);
  std::ifstream a(out1), b(out2);
  std::stringstream sa, sb;
  sa << a.rdbuf();
  sb << b.rdbuf();
  EXPECT_EQ(sa.str(), sb.str());
  EXPECT_GT(sa.str().size(), 100u);
}

TEST(Cli, EndToEndPipeline) {
  const auto& f = fixtures();
  const std::string exceed = tmp("cli_pipeline_exceed.csv");
  ASSERT_EQ(run("ingest --csv " + kDataDir + "/synthetic_rainfall.csv" +
                " --date-col date --cols site_a,site_b --weekly --season 09-21:12-21" +
                " --level 0.7 --out " + exceed),
            0);
  const std::string fit_out = tmp("cli_pipeline_fit.json");
  ASSERT_EQ(run("fit --weights " + f.weights + " --data " + exceed + " --out " + fit_out), 0);
  ASSERT_EQ(run("bootstrap --data " + exceed + " --weights " + f.weights +
                " -B 8 --seed 15 --out " + tmp("cli_pipeline_boot.csv")),
            0);
  ASSERT_EQ(
      run("chi-curve --data " + exceed + " --levels 0.5:0.99:25 --out " +
          tmp("cli_pipeline_curve.csv")),
      0);
  const std::string qq_out = tmp("cli_pipeline_qq.csv");
  ASSERT_EQ(run("qq --data " + exceed + " --fit " + fit_out + " --out " + qq_out), 0);
  const auto qq_lines = read_lines(qq_out);
  ASSERT_GT(qq_lines.size(), 10u);
  EXPECT_EQ(qq_lines[0], "margin,p,empirical,model");
}

TEST(Cli, CompareEmitsCurvesAndQq) {
  const auto& f = fixtures();
  const std::string exceed = tmp("cli_cmp_exceed.csv");
  ASSERT_EQ(run("ingest --csv " + kDataDir + "/synthetic_rainfall.csv" +
                " --date-col date --cols site_a,site_b --weekly --season 09-21:12-21" +
                " --level 0.9 --out " + exceed),
            0);
  const std::string out = tmp("cli_compare.json");
  ASSERT_EQ(run("compare --data " + exceed + " --sbgp-weights " + f.weights +
                " --bgp-weights " + f.bgp_weights + " --seed 16 --out " + out),
            0);
  std::ifstream in(out);
  nlohmann::json j;
  in >> j;
  EXPECT_TRUE(j.contains("sbgp"));
  EXPECT_TRUE(j.contains("bgp"));
  const auto chi_lines = read_lines(j["chi_csv"].get<std::string>());
  ASSERT_EQ(chi_lines.size(), 51u);
  EXPECT_EQ(chi_lines[0], "q,empirical,sbgp,bgp");
  const auto qq_lines = read_lines(j["qq_csv"].get<std::string>());
  EXPECT_EQ(qq_lines[0], "margin,p,empirical,sbgp,bgp");
  EXPECT_GT(qq_lines.size(), 10u);
}

TEST(Cli, BatchFitAgainstReference) {
  const auto& f = fixtures();
  const std::string dir = tmp("cli_sites");
  std::filesystem::create_directory(dir);
  // three per-site csvs derived from one simulated panel
  sbgp::Rng rng(17);
  std::ofstream sa(dir + "/a.csv"), sb(dir + "/b.csv"), sc(dir + "/c.csv");
  sa << "date,alpha_site\n";
  sb << "date,beta_site\n";
  sc << "date,gamma_site\n";
  for (int i = 0; i < 400; ++i) {
    const std::string date = sbgp::dates::iso_string(18262 + i);
    const double z = rng.uniform(0.0, 40.0);
    sa << date << ',' << z + rng.uniform(0.0, 10.0) << "\n";
    sb << date << ',' << z + rng.uniform(0.0, 10.0) << "\n";
    sc << date << ',' << rng.uniform(0.0, 50.0) << "\n";
  }
  sa.close();
  sb.close();
  sc.close();
  const std::string out = tmp("cli_pairs.csv");
  ASSERT_EQ(run("batch-fit --csv-dir " + dir + " --ref-col alpha_site --level 0.7 --weights " +
                f.weights + " --out " + out),
            0);
  const auto lines = read_lines(out);
  ASSERT_EQ(lines.size(), 3u);  // header + two pairs
  EXPECT_EQ(lines[0], "site,eta,xi1,xi2,beta1,beta2,sigma_T,w");
  EXPECT_EQ(lines[1].substr(0, 10), "beta_site,");
  EXPECT_EQ(lines[2].substr(0, 11), "gamma_site,");
  // unknown reference label is a usage error
  EXPECT_EQ(run("batch-fit --csv-dir " + dir + " --ref-col nope --level 0.7 --weights " +
                f.weights + " --out " + out),
            2);
}
