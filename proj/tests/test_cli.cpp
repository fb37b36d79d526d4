#include <gtest/gtest.h>
#include <json.hpp>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

namespace {

namespace fs = std::filesystem;

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    std::random_device rd;
    dir_ = fs::temp_directory_path() / ("sypi_cli_" + std::to_string(rd()) + std::to_string(rd()));
    fs::create_directories(dir_);
  }
  void TearDown() override {
    std::error_code ec;
    fs::remove_all(dir_, ec);
  }

  std::string file(const std::string& name) const { return (dir_ / name).string(); }

  // Exit status of the CLI; stdout goes to out.txt in the temp directory.
  int run(const std::string& args) const {
    const std::string cmd = std::string(SYPI_CLI_PATH) + " " + args + " > " + file("out.txt") + " 2> " + file("err.txt");
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }

  std::string read(const std::string& path) const {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  std::string stdout_text() const { return read(file("out.txt")); }

  fs::path dir_;
};

TEST_F(Cli, UsageErrorsExitOne) {
  EXPECT_EQ(run(""), 1);
  EXPECT_EQ(run("frobnicate"), 1);
  EXPECT_EQ(run("discover --target y"), 1);
  EXPECT_EQ(run("discover --input " + file("absent.csv") + " --target y"), 1);
  EXPECT_EQ(run("simulate --out " + file("p.csv") + " --n-obs 0"), 1);
  EXPECT_EQ(run("bench --grid " + file("absent.json") + " --out " + file("c.csv")), 1);
}

TEST_F(Cli, BadGridIsUsageError) {
  std::ofstream(file("grid.json")) << R"({"n_graphs": 2, "bogus": 1})";
  EXPECT_EQ(run("bench --grid " + file("grid.json") + " --out " + file("cells.csv")), 1);
  EXPECT_FALSE(fs::exists(file("cells.csv")));
}

TEST_F(Cli, DataErrorsExitTwo) {
  std::ofstream(file("bad.csv")) << "x,y\n1,2\nabc,3\n4,5\n";
  EXPECT_EQ(run("discover --input " + file("bad.csv") + " --target y --strict"), 2);
  EXPECT_EQ(run("discover --input " + file("bad.csv") + " --target nope"), 2);
}

TEST_F(Cli, SimulateThenDiscover) {
  ASSERT_EQ(run("simulate --n-obs 4 --n-hidden 1 --T 1500 --seed 3 --out " + file("p.csv")), 0);
  ASSERT_TRUE(fs::exists(file("p.csv")));
  ASSERT_TRUE(fs::exists(file("p.csv.spec.json")));
  const nlohmann::json sim = nlohmann::json::parse(read(file("p.csv.manifest.json")));
  EXPECT_EQ(sim["command"], "simulate");
  EXPECT_EQ(sim["seed"], 3);
  EXPECT_EQ(sim["config"]["T"], 1500);

  ASSERT_EQ(run("discover --input " + file("p.csv") + " --target Y --out " + file("r.json")), 0);
  EXPECT_NE(stdout_text().find("X1"), std::string::npos);
  const nlohmann::json report = nlohmann::json::parse(read(file("r.json")));
  EXPECT_EQ(report["format"], "sypi-report");
  EXPECT_EQ(report["candidates"].size(), 4u);
  const nlohmann::json m = nlohmann::json::parse(read(file("r.json.manifest.json")));
  EXPECT_EQ(m["format"], "sypi-manifest");
  EXPECT_EQ(m["config"]["threshold1"], 0.01);
  EXPECT_EQ(m["config"]["lag"]["target_lags"], 1);

  ASSERT_EQ(run("discover --preset real-data --threshold2 0.3 --input " + file("p.csv") + " --target Y --out " +
                file("r2.json")),
            0);
  const nlohmann::json m2 = nlohmann::json::parse(read(file("r2.json.manifest.json")));
  EXPECT_EQ(m2["config"]["threshold1"], 0.05);
  EXPECT_EQ(m2["config"]["threshold2"], 0.3);
  EXPECT_EQ(m2["config"]["lag"]["coef_threshold"], 0.0);
}

TEST_F(Cli, SimulateFromSpecIsReproducible) {
  ASSERT_EQ(run("simulate --seed 5 --out " + file("a.csv")), 0);
  ASSERT_EQ(run("simulate --seed 5 --spec " + file("a.csv.spec.json") + " --out " + file("b.csv")), 0);
  EXPECT_EQ(read(file("a.csv")), read(file("b.csv")));
}

TEST_F(Cli, FailedCommandRemovesItsArtifacts) {
  ASSERT_EQ(run("simulate --T 800 --out " + file("p.csv")), 0);
  const int rc = run("discover --input " + file("p.csv") + " --target Y --out " + file("r.json") + " --manifest " +
                     file("missing_dir/m.json"));
  EXPECT_EQ(rc, 2);
  EXPECT_FALSE(fs::exists(file("r.json")));
  EXPECT_FALSE(fs::exists(file("r.json.tmp")));
}

TEST_F(Cli, BenchIsDeterministicAcrossThreads) {
  std::ofstream(file("grid.json")) << R"({"T": 500, "n_obs": [3, 4], "n_hidden": 1, "n_graphs": 4,
    "granger": {"enabled": true}})";
  ASSERT_EQ(run("bench --grid " + file("grid.json") + " --seed 9 --out " + file("a.csv") + " --graphs-out " +
                file("ga.csv")),
            0);
  ASSERT_EQ(run("bench --grid " + file("grid.json") + " --seed 9 --threads 2 --out " + file("b.csv")), 0);
  EXPECT_EQ(read(file("a.csv")), read(file("b.csv")));
  EXPECT_TRUE(fs::exists(file("ga.csv")));
  const nlohmann::json m = nlohmann::json::parse(read(file("a.csv.manifest.json")));
  EXPECT_EQ(m["seed"], 9);
  EXPECT_EQ(m["grid"]["n_graphs"], 4);
  EXPECT_EQ(m["outputs"]["cells"], file("a.csv"));
}

TEST_F(Cli, RocWritesBothMethods) {
  std::ofstream(file("grid.json")) << R"({"T": 500, "n_obs": 3, "n_graphs": 3,
    "roc": {"threshold1_grid": [0.001, 0.01, 0.1], "lambda_grid": [0.01, 0.1]}})";
  ASSERT_EQ(run("roc --grid " + file("grid.json") + " --out " + file("roc.csv")), 0);
  const std::string csv = read(file("roc.csv"));
  EXPECT_NE(csv.find("sypi"), std::string::npos);
  EXPECT_NE(csv.find("lasso_granger"), std::string::npos);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 1 + 3 + 2);
}

TEST_F(Cli, OracleCheckPassesOnSmallSuite) {
  EXPECT_EQ(run("oracle-check --specs 20 --seed 1 --counterexamples " + file("cx") + " --manifest " + file("m.json")),
            0);
  EXPECT_NE(stdout_text().find("PASS"), std::string::npos);
  const nlohmann::json m = nlohmann::json::parse(read(file("m.json")));
  EXPECT_EQ(m["summary"]["necessity_violations"], 0);
  EXPECT_EQ(m["summary"]["soundness_violations"], 0);
  EXPECT_EQ(run("oracle-check --specs 10 --multi-lag --counterexamples " + file("cx")), 0);
}

TEST_F(Cli, OracleViolationsExitThreeAndWriteCounterexamples) {
  EXPECT_EQ(run("oracle-check --specs 200 --seed 7 --counterexamples " + file("cx")), 3);
  EXPECT_NE(stdout_text().find("FAIL"), std::string::npos);
  ASSERT_TRUE(fs::exists(file("cx")));
  EXPECT_FALSE(fs::is_empty(file("cx")));
}

TEST_F(Cli, VersionAndHelp) {
  EXPECT_EQ(run("--version"), 0);
  EXPECT_FALSE(stdout_text().empty());
  EXPECT_EQ(run("--help"), 0);
  EXPECT_NE(stdout_text().find("discover"), std::string::npos);
}

TEST_F(Cli, ConfigFileSuppliesOptions) {
  ASSERT_EQ(run("simulate --T 800 --out " + file("p.csv")), 0);
  std::ofstream(file("c.toml")) << "[discover]\ninput = \"" << file("p.csv") << "\"\ntarget = \"Y\"\n";
  EXPECT_EQ(run("--config " + file("c.toml") + " discover"), 0);
  std::ofstream(file("bad.toml")) << "[discover]\nbogus = 1\n";
  EXPECT_EQ(run("--config " + file("bad.toml") + " discover --input " + file("p.csv") + " --target Y"), 1);
}

}  // namespace
