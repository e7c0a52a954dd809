#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "commands.hpp"

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(const std::vector<std::string>& args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = phaseloss::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    rows.push_back(cells);
  }
  return rows;
}

std::map<std::string, double> bounds_table(const std::vector<std::string>& args) {
  const Result r = run(args);
  EXPECT_EQ(r.code, 0) << r.err;
  std::map<std::string, double> out;
  const auto rows = parse_csv(r.out);
  EXPECT_EQ(rows.at(0), (std::vector<std::string>{"quantity", "value", "units"}));
  for (std::size_t i = 1; i < rows.size(); ++i) out[rows[i][0]] = std::stod(rows[i][1]);
  return out;
}

std::filesystem::path temp_dir() {
  const auto dir = std::filesystem::temp_directory_path() /
                   ("phaseloss_cli_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) + "_" +
                    ::testing::UnitTest::GetInstance()->current_test_info()->name());
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace

TEST(CliFormat, ShortestRoundTrip) {
  EXPECT_EQ(phaseloss::cli::format_number(0.1), "0.1");
  EXPECT_EQ(phaseloss::cli::format_number(1e8), "1e+08");
  EXPECT_EQ(phaseloss::cli::format_number(1.0 / 3.0), "0.3333333333333333");
  EXPECT_EQ(phaseloss::cli::format_number(std::nan("")), "nan");
}

TEST(CliBounds, PracticalApplicationNumbers) {
  auto t = bounds_table({"bounds", "--eta", "0.95", "--squeeze-db", "15"});
  EXPECT_NEAR(t.at("Delta"), 12.5, 0.005 * 12.5);
  EXPECT_NEAR(t.at("Q_eta/S_eta"), 20.0, 1e-12);
  EXPECT_NEAR(t.at("sqrt(Delta/(Q_eta/S_eta))"), 0.79, 0.01);
  EXPECT_NEAR(t.at("n_sq_D"), 7.4, 0.05);
  EXPECT_NEAR(t.at("squeezing_dB"), 15.0, 1e-9);
}

TEST(CliBounds, UnsqueezedDisplacementEqualsSql) {
  const Result r = run({"bounds", "--eta", "0.95", "--n-sq", "0", "--deta", "0.3"});
  ASSERT_EQ(r.code, 0);
  const auto rows = parse_csv(r.out);
  std::map<std::string, std::string> cells;
  for (const auto& row : rows) cells[row[0]] = row[1];
  EXPECT_EQ(cells.at("D"), cells.at("S_chi"));
  for (const char* q : {"Q_chi", "S_chi", "D", "N", "Delta"}) EXPECT_TRUE(cells.count(q)) << q;
}

TEST(CliBounds, SingularTransmissivityNamesTheBound) {
  const Result r = run({"bounds", "--eta", "1"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("Q_chi"), std::string::npos) << r.err;
}

TEST(CliBounds, JsonFormatAndUsageErrors) {
  const Result j = run({"bounds", "--format", "json"});
  ASSERT_EQ(j.code, 0);
  EXPECT_TRUE(nlohmann::json::parse(j.out).is_array());
  EXPECT_EQ(run({"bounds", "--eta", "2"}).code, 2);
  EXPECT_EQ(run({"bounds", "--n-sq", "1", "--squeeze-db", "3"}).code, 2);
  EXPECT_EQ(run({"bounds", "--no-such-flag"}).code, 2);
  EXPECT_EQ(run({}).code, 2);
}

TEST(CliFigure, Fig2aShapeAndMonotonicity) {
  const Result r = run({"figure", "fig2a"});
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(r.out.find('\r'), std::string::npos);
  const auto rows = parse_csv(r.out);
  ASSERT_EQ(rows.size(), 1000u);
  ASSERT_EQ(rows[0].size(), 11u);
  EXPECT_EQ(rows[0].front(), "eta");
  EXPECT_EQ(rows[0][1], "n=1");
  EXPECT_EQ(rows[0][9], "n=1e+08");
  EXPECT_EQ(rows[0].back(), "sql");
  for (std::size_t i = 1; i < rows.size(); ++i) {
    for (std::size_t c = 1; c <= 9; ++c) {
      const double v = std::stod(rows[i][c]);
      EXPECT_GT(v, 0.0);
      EXPECT_LE(v, 1.0);
      if (c > 1) EXPECT_GE(v, std::stod(rows[i][c - 1]));
    }
  }
}

TEST(CliFigure, UnsqueezedCurvesAreTheSqlLine) {
  const auto b = parse_csv(run({"figure", "fig2b", "--coherent", "--grid-points", "99"}).out);
  ASSERT_EQ(b.size(), 100u);
  for (std::size_t i = 1; i < b.size(); ++i) {
    for (std::size_t c = 1; c + 1 < b[i].size(); ++c) EXPECT_EQ(b[i][c], b[i].back());
  }
  const auto c = parse_csv(run({"figure", "fig2c", "--db-values", "0,15"}).out);
  EXPECT_EQ(c[0], (std::vector<std::string>{"eta", "dB=0", "dB=15", "sql"}));
  for (std::size_t i = 1; i < c.size(); ++i) EXPECT_EQ(c[i][1], c[i][3]);
}

TEST(CliFigure, PhotonLevelsOverride) {
  const auto rows = parse_csv(run({"figure", "fig2b", "--n-values", "10,1000", "--grid-points", "9"}).out);
  EXPECT_EQ(rows[0], (std::vector<std::string>{"eta", "n=10", "n=1000", "sql"}));
  EXPECT_EQ(rows[1][0], "0.1");
  EXPECT_EQ(run({"figure", "fig3"}).code, 2);
}

TEST(CliMultipass, FlaggedOptimumAndIncreasingPasses) {
  const Result r = run({"multipass", "--eta", "0.99"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = parse_csv(r.out);
  EXPECT_EQ(rows[0], (std::vector<std::string>{"k", "eta_eff", "sql_k", "q_k", "fi_per_incident_photon",
                                               "fi_per_lost_photon", "k_opt"}));
  bool found = false;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    EXPECT_EQ(std::stoll(rows[i][0]), static_cast<long long>(i));
    if (rows[i][6].find("lost") != std::string::npos) {
      found = true;
      const double eta_eff = std::stod(rows[i][1]);
      EXPECT_GE(eta_eff, 0.15);
      EXPECT_LE(eta_eff, 0.25);
    }
  }
  EXPECT_TRUE(found);
}

TEST(CliMultipass, RegimeNote) {
  const Result lossy_round_trip = run({"multipass", "--eta", "0.9", "--eta-prep", "0.99", "--eta-det", "0.99",
                                       "--eta-round", "0.9", "--passes", "5"});
  ASSERT_EQ(lossy_round_trip.code, 0);
  EXPECT_NE(lossy_round_trip.err.find("does not apply"), std::string::npos) << lossy_round_trip.err;
  const Result good_round_trip = run({"multipass", "--eta", "0.9", "--eta-prep", "0.9", "--eta-det", "0.9",
                                      "--eta-round", "0.99", "--passes", "5"});
  EXPECT_NE(good_round_trip.err.find("at most about 20%"), std::string::npos) << good_round_trip.err;
  EXPECT_EQ(parse_csv(good_round_trip.out).size(), 6u);
}

TEST(CliSimulate, SameSeedSameBytes) {
  const std::vector<std::string> args = {"simulate", "--samples", "500", "--trials", "30", "--seed", "9",
                                         "--band-lo", "0", "--band-hi", "100"};
  const Result a = run(args);
  const Result b = run(args);
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
  const auto j = nlohmann::json::parse(a.out);
  EXPECT_EQ(j.at("seed"), 9);
  EXPECT_EQ(j.at("estimates").size(), 30u);
}

TEST(CliSimulate, DefaultDemoSaturates) {
  const Result r = run({"simulate"});
  EXPECT_EQ(r.code, 0) << r.err;
  const double ratio = nlohmann::json::parse(r.out).at("saturation_ratio");
  EXPECT_GE(ratio, 0.9);
  EXPECT_LE(ratio, 1.1);
}

TEST(CliSimulate, BandFailureAndUsageErrors) {
  const Result outside = run({"simulate", "--samples", "500", "--trials", "30", "--band-lo", "5", "--band-hi", "6"});
  EXPECT_EQ(outside.code, 1);
  EXPECT_EQ(run({"simulate", "--trials", "0"}).code, 2);
  EXPECT_EQ(run({"simulate", "--measurement", "intensity", "--intensity-mode", "exact-fock"}).code, 2);
}

TEST(CliSimulate, SampleDumpHasMeasurementHeader) {
  const auto dir = temp_dir();
  const auto path = (dir / "samples.csv").string();
  const Result r = run({"simulate", "--measurement", "intensity", "--deta", "1", "--dtheta", "0", "--samples", "100",
                        "--trials", "5", "--band-lo", "0", "--band-hi", "1e9", "--dump-samples", path});
  ASSERT_EQ(r.code, 0) << r.err;
  std::ifstream f(path);
  std::string header;
  std::getline(f, header);
  EXPECT_EQ(header, "intensity");
  int lines = 0;
  for (std::string line; std::getline(f, line);) ++lines;
  EXPECT_EQ(lines, 100);
  EXPECT_TRUE(nlohmann::json::parse(r.out).at("surrogate").get<bool>());
}

TEST(CliVerify, SingleCase) {
  const Result r = run({"verify", "--single", "--n-mean", "1", "--n-sq", "0.2", "--eta", "0.6", "--deta", "0.5"});
  EXPECT_EQ(r.code, 0) << r.out;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_TRUE(j.at("pass").get<bool>());
  EXPECT_EQ(j.at("cases").size(), 1u);
  EXPECT_EQ(run({"verify", "--single", "--n-mean", "5"}).code, 2);
}

TEST(CliVerify, DefaultSuitePasses) {
  const Result r = run({"verify"});
  EXPECT_EQ(r.code, 0);
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j.at("cases").size(), 24u);
  EXPECT_TRUE(j.at("pass").get<bool>());
}

TEST(CliVerify, NearUnitTransmissivityWarns) {
  const Result r = run({"verify", "--single", "--n-mean", "1", "--eta", "0.999999", "--deta", "1"});
  EXPECT_TRUE(r.code == 0 || r.code == 1);
  EXPECT_NE(r.err.find("close to 1"), std::string::npos) << r.err;
  EXPECT_TRUE(nlohmann::json::parse(r.out).contains("cases"));
}

TEST(CliConfig, FileBelowFlags) {
  const auto dir = temp_dir();
  const auto cfg = (dir / "run.conf").string();
  std::ofstream(cfg) << "eta=0.5\nn-mean=10\n";
  const Result from_file = run({"bounds", "--config", cfg});
  const Result direct = run({"bounds", "--eta", "0.5", "--n-mean", "10"});
  ASSERT_EQ(from_file.code, 0) << from_file.err;
  EXPECT_EQ(from_file.out, direct.out);
  const Result overridden = run({"bounds", "--config", cfg, "--eta", "0.7"});
  EXPECT_EQ(overridden.out, run({"bounds", "--eta", "0.7", "--n-mean", "10"}).out);
}

TEST(CliOutput, RelativePathUsesOutputDirectory) {
  const auto dir = temp_dir();
  ::setenv("PHASELOSS_OUTPUT_DIR", dir.c_str(), 1);
  const Result r = run({"figure", "fig2c", "--grid-points", "3", "--out", "c.csv"});
  ::unsetenv("PHASELOSS_OUTPUT_DIR");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(r.out.empty());
  std::ifstream f(dir / "c.csv");
  std::stringstream text;
  text << f.rdbuf();
  EXPECT_EQ(text.str(), run({"figure", "fig2c", "--grid-points", "3"}).out);
}
