#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>
#include <sys/wait.h>

#include "consensus_lab/cli/cli.hpp"

using consensus_lab::cli::run_cli;
using Json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out;
  std::string err;
};

Run cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  Run r;
  r.code = run_cli(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("consensus_lab_cli_" + std::to_string(::getpid()) + "_" +
            ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string write_config(const Json& j, const std::string& name = "config.json") {
    const auto path = (dir_ / name).string();
    std::ofstream(path) << j.dump(2);
    return path;
  }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  static Json small_config() {
    return Json::parse(R"({
      "n": 4,
      "process": {"kind": "arc_independent", "theta": 0.6},
      "schedule": {"kind": "power_decay", "c": 0.9, "beta": 0.5, "cap": 0.9},
      "rule": {"kind": "self_confident", "a_star": 0.6},
      "horizon": 20000, "tol": 1e-6, "trials": 30, "seed": 5, "epsilon": 0.1,
      "bounds": {"theta0": 0.6}
    })");
  }

  fs::path dir_;
};

std::string read_file(const std::string& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

Json without_timestamp(Json j) {
  j["metadata"].erase("timestamp");
  return j;
}

}  // namespace

TEST_F(CliTest, SimulateWritesParsableResult) {
  const auto cfg = write_config(small_config());
  const auto out = path("result.json");
  const auto r = cli({"--config", cfg, "--out", out, "--threads", "1", "simulate"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(r.out.empty());
  const Json j = Json::parse(read_file(out));
  for (const char* key : {"metadata", "config", "consensus", "tcom", "invariants"}) {
    EXPECT_TRUE(j.contains(key)) << key;
  }
  for (const char* key : {"spec_hash", "seed", "version", "timestamp", "initial_conditions_note"}) {
    EXPECT_TRUE(j["metadata"].contains(key)) << key;
  }
  EXPECT_EQ(j["consensus"]["per_initial_condition"].size(), 3u);
  EXPECT_EQ(j["invariants"]["violations"], 0);
}

TEST_F(CliTest, SimulateCsvSchema) {
  const auto cfg = write_config(small_config());
  const auto r = cli({"--config", cfg, "--format", "csv", "--threads", "1", "simulate"});
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream lines(r.out);
  std::string line;
  std::vector<std::string> rows;
  while (std::getline(lines, line)) rows.push_back(line);
  ASSERT_EQ(rows.size(), 5u);
  EXPECT_EQ(rows[0], "initial_condition,p_hat,ci_low,ci_high,successes,trials,t_hat,censored");
  EXPECT_EQ(rows[1].rfind("e1,", 0), 0u);
  EXPECT_EQ(rows[4].rfind("pooled,", 0), 0u);
}

TEST_F(CliTest, SimulateMatchesGoldenCsv) {
  const auto cfg = write_config(small_config());
  const auto r = cli({"--config", cfg, "--format", "csv", "--threads", "2", "simulate"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, read_file(std::string(CONSENSUS_LAB_GOLDEN_DIR) + "/simulate_small.csv"));
}

TEST_F(CliTest, DeterministicAcrossThreadCounts) {
  const auto cfg = write_config(small_config());
  std::vector<std::string> payloads;
  for (const char* t : {"1", "2", "5"}) {
    const auto r = cli({"--config", cfg, "--threads", t, "simulate"});
    ASSERT_EQ(r.code, 0) << r.err;
    payloads.push_back(without_timestamp(Json::parse(r.out)).dump());
  }
  EXPECT_EQ(payloads[0], payloads[1]);
  EXPECT_EQ(payloads[0], payloads[2]);
}

TEST_F(CliTest, SeedFlagOverridesConfig) {
  const auto cfg = write_config(small_config());
  const auto a = cli({"--config", cfg, "--seed", "99", "simulate"});
  ASSERT_EQ(a.code, 0);
  const Json j = Json::parse(a.out);
  EXPECT_EQ(j["metadata"]["seed"], 99);
  const auto b = cli({"--config", cfg, "simulate"});
  EXPECT_NE(Json::parse(b.out)["metadata"]["spec_hash"], j["metadata"]["spec_hash"]);
}

TEST_F(CliTest, ConfigErrorsExitTwo) {
  Json bad = small_config();
  bad["trials"] = 0;
  auto r = cli({"--config", write_config(bad), "simulate"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("trials"), std::string::npos);
  EXPECT_TRUE(r.out.empty());

  Json unknown = small_config();
  unknown["trails"] = 10;
  r = cli({"--config", write_config(unknown), "simulate"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("trails"), std::string::npos);

  r = cli({"--config", path("missing.json"), "simulate"});
  EXPECT_EQ(r.code, 2);

  std::ofstream(path("broken.json")) << "{ nope";
  r = cli({"--config", path("broken.json"), "simulate"});
  EXPECT_EQ(r.code, 2);

  Json no_process = small_config();
  no_process.erase("process");
  r = cli({"--config", write_config(no_process), "simulate"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("process"), std::string::npos);
}

TEST_F(CliTest, UsageErrorsExitTwo) {
  EXPECT_EQ(cli({}).code, 2);
  EXPECT_EQ(cli({"bogus"}).code, 2);
  EXPECT_EQ(cli({"--format", "xml", "simulate"}).code, 2);
  EXPECT_EQ(cli({"simulate"}).code, 2);  // no --config
  EXPECT_EQ(cli({"--help"}).code, 0);
}

TEST_F(CliTest, ThreadsEnvironmentFallback) {
  const auto cfg = write_config(small_config());
  ::setenv("CONSENSUS_LAB_THREADS", "abc", 1);
  EXPECT_EQ(cli({"--config", cfg, "simulate"}).code, 2);
  ::setenv("CONSENSUS_LAB_THREADS", "2", 1);
  const auto a = cli({"--config", cfg, "simulate"});
  ::unsetenv("CONSENSUS_LAB_THREADS");
  ASSERT_EQ(a.code, 0);
  const auto b = cli({"--config", cfg, "--threads", "1", "simulate"});
  EXPECT_EQ(without_timestamp(Json::parse(a.out)), without_timestamp(Json::parse(b.out)));
}

TEST_F(CliTest, DumpGraphs) {
  const auto cfg = write_config(small_config());
  const auto out = path("r.json");
  ASSERT_EQ(cli({"--config", cfg, "--out", out, "--dump-graphs", "simulate"}).code, 0);
  std::ifstream in(out + ".graphs.ndjson");
  std::string line;
  std::uint64_t expected_k = 0;
  while (std::getline(in, line)) {
    const Json g = Json::parse(line);
    EXPECT_EQ(g["k"], expected_k++);
    EXPECT_EQ(g["n"], 4);
  }
  EXPECT_GT(expected_k, 0u);
  EXPECT_EQ(cli({"--config", cfg, "--dump-graphs", "simulate"}).code, 2);
}

TEST_F(CliTest, SweepRows) {
  const auto cfg = write_config(small_config());
  auto r = cli({"--config", cfg, "sweep", "--param", "beta", "--values", "0.5,1.0,1.5,2.0"});
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream lines(r.out);
  std::string line;
  std::vector<std::string> rows;
  while (std::getline(lines, line)) rows.push_back(line);
  ASSERT_EQ(rows.size(), 5u);
  EXPECT_EQ(rows[0], "param_value,p_hat,ci_low,ci_high,trials,censored_fraction");
  EXPECT_EQ(rows[1].rfind("0.5,", 0), 0u);

  r = cli({"--config", cfg, "sweep", "--param", "beta", "--values", "2"});
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(std::count(r.out.begin(), r.out.end(), '\n'), 2);

  EXPECT_EQ(cli({"--config", cfg, "sweep", "--param", "beta", "--values", ""}).code, 2);
  EXPECT_EQ(cli({"--config", cfg, "sweep", "--param", "beta", "--values", "1,,2"}).code, 2);
  EXPECT_EQ(cli({"--config", cfg, "sweep", "--param", "beta", "--values", "x"}).code, 2);
  EXPECT_EQ(cli({"--config", cfg, "sweep", "--param", "gamma", "--values", "1"}).code, 2);
  EXPECT_EQ(cli({"--config", cfg, "sweep", "--param", "q", "--values", "0.5"}).code, 2);
}

TEST_F(CliTest, SweepJson) {
  const auto cfg = write_config(small_config());
  const auto r = cli({"--config", cfg, "--format", "json", "sweep", "--param", "a_star",
                      "--values", "0.9,0.6"});
  ASSERT_EQ(r.code, 0) << r.err;
  const Json j = Json::parse(r.out);
  EXPECT_EQ(j["param"], "a_star");
  ASSERT_EQ(j["rows"].size(), 2u);
  EXPECT_EQ(j["rows"][0]["param_value"], 0.6);
}

TEST_F(CliTest, Bounds) {
  const Json base = Json::parse(R"({
    "n": 3, "epsilon": 0.1, "schedule": {"kind": "constant", "p": 0.5}
  })");
  auto r = cli({"--config", write_config(base), "bounds", "--which", "thm1"});
  ASSERT_EQ(r.code, 0) << r.err;
  const Json thm1 = Json::parse(r.out);
  EXPECT_EQ(thm1["bound"], 1);
  EXPECT_TRUE(thm1["audit"].contains("threshold"));

  Json a8 = Json::parse(R"({
    "n": 2, "epsilon": 0.1, "schedule": {"kind": "constant", "p": 0.5},
    "rule": {"kind": "equal_weights"},
    "process": {"kind": "arc_independent", "theta": 1.0}
  })");
  r = cli({"--config", write_config(a8), "bounds", "--which", "eq-a8"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("theta0"), std::string::npos);
  a8["bounds"] = {{"theta0", 1.0}};
  r = cli({"--config", write_config(a8), "bounds", "--which", "eq-a8"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(Json::parse(r.out)["bound"], 222);

  Json c = base;
  c["schedule"]["p"] = 0.3;
  r = cli({"--config", write_config(c), "bounds", "--which", "conditions"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(Json::parse(r.out)["thm4_sufficient"], true);

  EXPECT_EQ(cli({"--config", write_config(base), "bounds", "--which", "thm9"}).code, 2);
  Json nonmono = base;
  nonmono["schedule"] = Json::parse(R"({"kind":"explicit_list","values":[0.1,0.5],"tail":0.2})");
  nonmono["bounds"] = {{"q", 0.5}, {"eta", 0.3}};
  EXPECT_EQ(cli({"--config", write_config(nonmono), "bounds", "--which", "thm5"}).code, 2);
}

TEST_F(CliTest, BoundsResourceLimitExitsThree) {
  const Json j = Json::parse(R"({
    "n": 3, "epsilon": 0.1, "schedule": {"kind": "constant", "p": 0.5},
    "bounds": {"q": 0.5, "eta": 0.3, "B": 5000, "max_window": 100}
  })");
  // prop1 always allows one full block, so force prop2 over a wide interval.
  Json k = j;
  k["bounds"].erase("B");
  k["bounds"]["interval_ends"] = {{"kind", "power"}, {"scale", 100000}, {"exponent", 1}};
  const auto r = cli({"--config", write_config(k), "bounds", "--which", "prop2"});
  EXPECT_EQ(r.code, 3) << r.out << r.err;
}

TEST_F(CliTest, Verify) {
  auto r = cli({"verify", "--suite", "matrix", "--cases", "1000"});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(Json::parse(r.out)["violations"], 0);
  r = cli({"verify", "--suite", "graph", "--cases", "500"});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(cli({"verify", "--suite", "nope"}).code, 2);
  EXPECT_EQ(cli({"verify", "--suite", "graph", "--cases", "0"}).code, 2);
}

TEST(CliBinary, ExitCodeAndStreams) {
  const std::string bin = CONSENSUS_LAB_BINARY;
  const auto base = fs::temp_directory_path() / ("consensus_lab_bin_" + std::to_string(::getpid()));
  const std::string out = base.string() + ".out";
  const std::string err = base.string() + ".err";
  int status = std::system((bin + " verify --suite nope >" + out + " 2>" + err).c_str());
  EXPECT_EQ(WEXITSTATUS(status), 2);
  EXPECT_TRUE(read_file(out).empty());
  EXPECT_FALSE(read_file(err).empty());
  status = std::system((bin + " verify --suite graph --cases 5 >" + out + " 2>" + err).c_str());
  EXPECT_EQ(WEXITSTATUS(status), 0);
  EXPECT_NO_THROW(Json::parse(read_file(out)));
  fs::remove(out);
  fs::remove(err);
}
