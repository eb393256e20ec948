// Copyright 2026 The Dualchain Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>
#include <json.hpp>

#include "dualchain/cli.hpp"
#include "dualchain/ingest.hpp"

namespace dualchain::cli {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result call(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = dispatch(args, out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> v;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) v.push_back(l);
  return v;
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("dualchain_cli_" + std::to_string(::getpid()) + "_" +
            ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir_);
    config_ = write("c.json",
                    R"({"k": 0.05, "n_in": 2016, "n_de": 2016, "c_stick": 0,)"
                    R"( "powers": [0.25, 0.25, 0.25, 0.25]})");
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string write(const std::string& name, const std::string& text) {
    const auto p = (dir_ / name).string();
    std::ofstream(p) << text;
    return p;
  }
  std::string read(const std::string& name) {
    std::ifstream in(dir_ / name);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }
  std::string path(const std::string& name) { return (dir_ / name).string(); }

  fs::path dir_;
  std::string config_;
};

TEST_F(CliTest, EquilibriaReportsCaseOneSegment) {
  const auto r = call({"equilibria", "--config", config_, "--quiet"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = json::parse(r.out);
  EXPECT_EQ(j["case_tag"], 1);
  EXPECT_EQ(j["lack"]["kind"], "segment");
  EXPECT_DOUBLE_EQ(j["lack"]["r_f_min"].get<double>(), 0.05);
  EXPECT_TRUE(r.err.empty());
}

TEST_F(CliTest, ThresholdEqualsPriceRatio) {
  const auto r = call({"threshold", "--config", config_, "--quiet"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(json::parse(r.out), json::parse(R"({"automatic_threshold": 0.05})"));
}

TEST_F(CliTest, ZonesGridHasOneRowPerCell) {
  const auto r = call({"zones", "--grid", "10", "--config", config_, "--quiet"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = lines(r.out);
  ASSERT_EQ(rows.size(), 101u);
  EXPECT_EQ(rows[0], "r_f,r_b,zone");
  const std::set<std::string> labels{"zone1", "zone2", "zone3", "boundary13",
                                     "boundary23", "coexist_point"};
  for (std::size_t i = 1; i < rows.size(); ++i) {
    EXPECT_TRUE(labels.count(rows[i].substr(rows[i].rfind(',') + 1))) << rows[i];
  }
}

TEST_F(CliTest, JsonAndCsvCarryTheSameData) {
  const auto j = call({"zones", "--grid", "4", "--config", config_, "--quiet",
                       "--format", "json"});
  const auto c = call({"zones", "--grid", "4", "--config", config_, "--quiet",
                       "--format", "csv"});
  ASSERT_EQ(j.code, 0);
  ASSERT_EQ(c.code, 0);
  const auto arr = json::parse(j.out);
  const auto rows = lines(c.out);
  ASSERT_EQ(arr.size() + 1, rows.size());
  for (std::size_t i = 0; i < arr.size(); ++i) {
    std::istringstream row(rows[i + 1]);
    std::string rf, rb, zone;
    std::getline(row, rf, ',');
    std::getline(row, rb, ',');
    std::getline(row, zone, ',');
    EXPECT_EQ(std::stod(rf), arr[i]["r_f"].get<double>());
    EXPECT_EQ(std::stod(rb), arr[i]["r_b"].get<double>());
    EXPECT_EQ(zone, arr[i]["zone"]);
  }

  const auto pj = call({"payoff", "--config", config_, "--state", "0.2,0.1",
                        "--quiet"});
  const auto pc = call({"payoff", "--config", config_, "--state", "0.2,0.1",
                        "--quiet", "--format", "csv"});
  const auto pjv = json::parse(pj.out);
  const auto pcv = lines(pc.out);
  ASSERT_EQ(pcv.size(), 2u);
  std::istringstream row(pcv[1]);
  for (const char* key : {"r_f", "r_b", "u_f", "u_a", "u_b"}) {
    std::string cell;
    std::getline(row, cell, ',');
    EXPECT_EQ(std::stod(cell), pjv[key].get<double>()) << key;
  }
}

TEST_F(CliTest, PayoffDivergenceIsNull) {
  const auto r = call({"payoff", "--config", config_, "--state", "0,0", "--quiet"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = json::parse(r.out);
  EXPECT_TRUE(j["u_f"].is_null());
  EXPECT_TRUE(j["u_b"].is_null());
  EXPECT_EQ(j["u_a"], 1.0);
}

TEST_F(CliTest, EchoesResolvedConfigUnlessQuiet) {
  const auto r = call({"threshold", "--config", config_, "--seed", "9"});
  ASSERT_EQ(r.code, 0);
  const auto echo = json::parse(lines(r.err).at(0));
  EXPECT_EQ(echo["command"], "threshold");
  EXPECT_EQ(echo["seed"], 9);
  EXPECT_EQ(echo["config"]["k"], 0.05);
  EXPECT_EQ(echo["config"]["powers"].size(), 4u);
}

TEST_F(CliTest, UnknownFlagIsAValidationError) {
  const auto r = call({"threshold", "--config", config_, "--bogus"});
  EXPECT_EQ(r.code, kExitValidation);
  const auto j = json::parse(lines(r.err).back());
  EXPECT_TRUE(j.contains("code"));
  EXPECT_TRUE(j.contains("message"));
  EXPECT_TRUE(call({}).code == kExitValidation);
}

TEST_F(CliTest, BadConfigReportsField) {
  const auto bad = write("bad.json",
                         R"({"k": 0.05, "n_in": 2016, "n_de": 2016, "c_stick": 0,)"
                         R"( "powers": [0.5, 0.6]})");
  auto r = call({"threshold", "--config", bad});
  EXPECT_EQ(r.code, kExitValidation);
  auto j = json::parse(lines(r.err).back());
  EXPECT_EQ(j["code"], "power_sum_mismatch");
  EXPECT_EQ(j["field"], "powers");

  const auto typo = write("typo.json",
                          R"({"k": 0.05, "n_in": 2016, "n_de": 2016, "c_stick": 0,)"
                          R"( "power": [1.0]})");
  r = call({"threshold", "--config", typo});
  EXPECT_EQ(r.code, kExitValidation);
  j = json::parse(lines(r.err).back());
  EXPECT_EQ(j["field"], "power");

  r = call({"threshold", "--config", path("missing.json")});
  EXPECT_EQ(json::parse(lines(r.err).back())["code"], "io_error");
}

TEST_F(CliTest, FormatNotOfferedIsRejected) {
  const auto r = call({"equilibria", "--config", config_, "--format", "csv"});
  EXPECT_EQ(r.code, kExitValidation);
  EXPECT_EQ(json::parse(lines(r.err).back())["field"], "--format");
}

TEST_F(CliTest, SimulateWritesTrajectoryWithSchedules) {
  const auto ks = write("k.csv", "at,value\n100,0.5\n");
  const auto r = call({"simulate", "--config", config_, "--initial", "0.3,0.2",
                       "--k-schedule", ks, "--out", path("traj.csv"), "--quiet"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = lines(read("traj.csv"));
  ASSERT_GT(rows.size(), 100u);
  EXPECT_EQ(rows[0], "step,r_f,r_b,zone,k,c_stick");
  EXPECT_NE(rows.back().find(",0.5,0"), std::string::npos);

  const auto bad = write("bad.csv", "at,value\n100,0.5\n50,0.2\n");
  EXPECT_EQ(call({"simulate", "--config", config_, "--initial", "0.3,0.2",
                  "--k-schedule", bad, "--quiet"})
                .code,
            kExitValidation);
}

TEST_F(CliTest, BestResponseIsSeedReproducible) {
  std::vector<std::string> args{"best-response", "--config", config_,
                                "--assignment", "a_only,b_only,fickle,a_only",
                                "--seed", "11", "--quiet"};
  const auto a = call(args);
  const auto b = call(args);
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
  EXPECT_TRUE(json::parse(a.out)["converged"].get<bool>());
}

TEST_F(CliTest, ChainSimReplicasDoNotDependOnThreads) {
  const auto agents = write("agents.json", R"([
    {"id": "f", "power": 0.3, "policy": "fickle"},
    {"id": "b", "power": 0.1, "policy": "b_only"},
    {"id": "a", "power": 0.6, "policy": "a_only"}])");
  auto args = [&](const std::string& threads) {
    return std::vector<std::string>{
        "chain-sim", "--config", config_, "--agents", agents, "--regime-a",
        "epoch:144", "--regime-b", "window:72", "--duration", "3000",
        "--replicas", "3", "--threads", threads, "--seed", "5", "--quiet"};
  };
  const auto one = call(args("1"));
  const auto three = call(args("3"));
  ASSERT_EQ(one.code, 0) << one.err;
  EXPECT_EQ(one.out, three.out);
  EXPECT_EQ(json::parse(one.out)["replicas"].size(), 3u);
}

TEST_F(CliTest, ChainSimWritesEventLog) {
  const auto agents = write("agents.json", R"([
    {"power": 0.4, "policy": "fickle"},
    {"power": 0.1, "policy": "b_only"},
    {"power": 0.5, "policy": "a_only"}])");
  const auto r = call({"chain-sim", "--config", config_, "--agents", agents,
                       "--regime-a", "epoch:144", "--regime-b", "epoch:144",
                       "--duration", "2000", "--events", path("ev.csv"),
                       "--quiet"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = lines(read("ev.csv"));
  ASSERT_GT(rows.size(), 10u);
  EXPECT_EQ(rows[0],
            "time,chain,event_type,difficulty_a,difficulty_b,r_f_active,"
            "r_b_active");
  const auto report = json::parse(r.out);
  EXPECT_EQ(report["agents"].size(), 3u);

  const auto bad = call({"chain-sim", "--config", config_, "--agents", agents,
                         "--regime-a", "epoch:0", "--regime-b", "epoch:144",
                         "--duration", "10", "--quiet"});
  EXPECT_EQ(bad.code, kExitValidation);
  EXPECT_EQ(json::parse(lines(bad.err).back())["code"], "invalid_regime");
}

TEST_F(CliTest, ChainSimSeriesFeedsAnalyze) {
  const auto agents = write("agents.json", R"([
    {"power": 0.3, "policy": "fickle"},
    {"power": 0.1, "policy": "b_only"},
    {"power": 0.6, "policy": "a_only"}])");
  const auto sim = call({"chain-sim", "--config", config_, "--agents", agents,
                         "--regime-a", "epoch:144", "--regime-b", "epoch:144",
                         "--duration", "5000", "--sample-interval", "10",
                         "--series", path("series.csv"), "--quiet"});
  ASSERT_EQ(sim.code, 0) << sim.err;
  const auto rows = lines(read("series.csv"));
  ASSERT_GT(rows.size(), 400u);
  const auto loaded = load_series(path("series.csv"));
  EXPECT_EQ(loaded.records.size() + 1, rows.size());
  EXPECT_EQ(loaded.out_of_order, 0u);

  const auto an = call({"analyze", "--series", path("series.csv"), "--config",
                        config_, "--quiet"});
  ASSERT_EQ(an.code, 0) << an.err;
  EXPECT_EQ(json::parse(an.out)["records"].get<std::size_t>(),
            loaded.records.size());

  const auto multi = call({"chain-sim", "--config", config_, "--agents",
                           agents, "--regime-a", "epoch:144", "--regime-b",
                           "epoch:144", "--duration", "100", "--replicas", "2",
                           "--series", path("x.csv"), "--quiet"});
  EXPECT_EQ(multi.code, kExitValidation);
}

TEST_F(CliTest, AnalyzeWritesAllArtifacts) {
  std::vector<SeriesRecord> s;
  for (int i = 0; i < 120; ++i) {
    const bool gray = (i >= 30 && i < 50) || (i >= 80 && i < 95);
    const double share = gray ? 0.4 : 0.1;
    s.push_back({600 * i, 1 - share, share, 1.0, gray ? 0.1 : 0.6, 0.3});
  }
  std::ostringstream csv;
  write_series(csv, s);
  const auto series = write("series.csv", csv.str());
  const auto r = call({"analyze", "--series", series, "--config", config_,
                       "--estimates", path("est.csv"), "--zones",
                       path("zones.csv"), "--quiet"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = json::parse(r.out);
  ASSERT_EQ(j["periods"].size(), 2u);
  EXPECT_NEAR(j["periods"][0]["r_f"].get<double>(), 0.3, 1e-12);
  const auto est = lines(read("est.csv"));
  EXPECT_EQ(est[0], "timestamp,basis,share,r_f_est,r_b_est");
  EXPECT_EQ(est.size(), 121u);
  const auto zones = lines(read("zones.csv"));
  EXPECT_EQ(zones[0], "timestamp,zone,k");
  EXPECT_EQ(zones.size(), 121u);
}

}  // namespace
}  // namespace dualchain::cli
