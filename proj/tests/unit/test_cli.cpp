#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "config.hpp"
#include "erasurelab/error.hpp"
#include "run.hpp"

using namespace erasurelab;
using namespace erasurelab::cli;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "erasurelab");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = main_entry(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), {}};
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("erasurelab_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

nlohmann::json base_config() {
  return nlohmann::json::parse(R"({
    "channel": {"d": 2, "noise": [0.6, 0.4]},
    "t": 0.5, "a": 0.3, "b": 0.2,
    "n_grid": [400],
    "trials": 2000,
    "seed": 5,
    "estimators": ["e1", "e2"]
  })");
}

fs::path write_config(const fs::path& dir, nlohmann::json j) {
  const auto path = dir / "config.json";
  std::ofstream(path) << j.dump(2);
  return path;
}

}  // namespace

TEST(Config, ParsesAndValidates) {
  const auto c = parse_config(base_config());
  EXPECT_EQ(c.channel.noise.size(), 2u);
  EXPECT_EQ(c.n_grid, std::vector<std::size_t>{400});
  EXPECT_EQ(c.trials, 2000u);
  EXPECT_EQ(c.sampler, "auto");
  EXPECT_FALSE(c.timing);
}

TEST(Config, RejectsUnknownAndMissingFields) {
  auto j = base_config();
  j["trails"] = 10;
  EXPECT_THROW(parse_config(j), InvalidArgument);
  j = base_config();
  j["channel"]["noize"] = {0.5, 0.5};
  EXPECT_THROW(parse_config(j), InvalidArgument);
  j = base_config();
  j.erase("n_grid");
  EXPECT_THROW(parse_config(j), InvalidArgument);
  j = base_config();
  j["estimators"] = {"e3"};
  EXPECT_THROW(parse_config(j), InvalidArgument);
  j = base_config();
  j["t"] = "half";
  EXPECT_THROW(parse_config(j), InvalidArgument);
}

TEST(Cli, ConfigErrorExitCode) {
  const auto dir = scratch("badconfig");
  auto j = base_config();
  j["unknown_field"] = true;
  const auto r = invoke({"--config", write_config(dir, j).string(), "simulate"});
  EXPECT_EQ(r.code, kConfigError);
  EXPECT_NE(r.err.find("unknown_field"), std::string::npos);
  EXPECT_EQ(invoke({"bogus"}).code, kConfigError);
  EXPECT_EQ(invoke({}).code, kConfigError);
}

TEST(Cli, Capacity) {
  const auto r = invoke({"capacity", "--noise", "0.89,0.11"});
  ASSERT_EQ(r.code, kOk) << r.err;
  EXPECT_EQ(r.out.rfind("inputs,outputs,capacity", 0), 0u);
}

TEST(Cli, PredictAndRegimeErrors) {
  const auto r = invoke({"predict", "--noise", "0.89,0.11", "--t", "0.3", "--a", "0.8", "--b", "0.3",
                         "--n", "100,400"});
  ASSERT_EQ(r.code, kOk) << r.err;
  EXPECT_EQ(std::count(r.out.begin(), r.out.end(), '\n'), 5);
  EXPECT_EQ(invoke({"predict", "--noise", "0.6,0.4", "--t", "0.3", "--a", "0.3"}).code, kConfigError);
}

TEST(Cli, OracleMatchesLibrary) {
  const auto r = invoke({"oracle", "--noise", "0.9,0.1", "--n", "2", "--M", "2", "--T", "0.1",
                         "--scope", "ensemble"});
  ASSERT_EQ(r.code, kOk) << r.err;
  EXPECT_NE(r.out.find("forney"), std::string::npos);
  EXPECT_NE(r.out.find(",ensemble,"), std::string::npos);
  EXPECT_EQ(invoke({"oracle", "--noise", "0.9,0.1", "--n", "40", "--M", "4", "--T", "0.1"}).code,
            kBudgetExceeded);
}

TEST(Cli, OutputDirectory) {
  const auto dir = scratch("outdir");
  const auto r = invoke({"--out", dir.string(), "types", "--noise", "0.75,0.25", "--n", "4"});
  ASSERT_EQ(r.code, kOk) << r.err;
  EXPECT_TRUE(fs::exists(dir / "types.csv"));
}

TEST(Simulate, ByteIdenticalAcrossWorkers) {
  const auto dir = scratch("determinism");
  std::vector<std::string> outputs;
  for (const std::string workers : {"1", "3"}) {
    auto j = base_config();
    j["output"] = (dir / ("w" + workers)).string();
    const auto cfg = dir / ("config" + workers + ".json");
    std::ofstream(cfg) << j.dump();
    const auto r = invoke({"--config", cfg.string(), "--workers", workers, "simulate"});
    ASSERT_EQ(r.code, kOk) << r.err;
    outputs.push_back(slurp(dir / ("w" + workers) / "measurements.csv"));
    EXPECT_TRUE(fs::exists(dir / ("w" + workers) / "predictions.csv"));
    EXPECT_TRUE(fs::exists(dir / ("w" + workers) / "summary.json"));
  }
  ASSERT_FALSE(outputs[0].empty());
  EXPECT_EQ(outputs[0], outputs[1]);
  EXPECT_EQ(outputs[0].find("wall_time_ms"), std::string::npos);
}

TEST(Simulate, InfeasibleNStillRunsOthers) {
  const auto dir = scratch("infeasible");
  auto j = base_config();
  j["n_grid"] = {100, 400};
  j["output"] = dir.string();
  const auto r = invoke({"--config", write_config(dir, j).string(), "simulate"});
  EXPECT_EQ(r.code, kInfeasible);
  const auto summary = nlohmann::json::parse(slurp(dir / "summary.json"));
  EXPECT_NE(summary.dump().find("infeasible"), std::string::npos);
  EXPECT_NE(slurp(dir / "measurements.csv").find("\n400,"), std::string::npos);
}

TEST(Simulate, ExactBudget) {
  const auto dir = scratch("budget");
  auto j = base_config();
  j["estimators"] = {"exact"};
  j["output"] = dir.string();
  EXPECT_EQ(invoke({"--config", write_config(dir, j).string(), "simulate"}).code, kBudgetExceeded);
}

TEST(Simulate, Timing) {
  const auto dir = scratch("timing");
  auto j = base_config();
  j["output"] = dir.string();
  j["trials"] = 200;
  ASSERT_EQ(invoke({"--config", write_config(dir, j).string(), "simulate", "--timing"}).code, kOk);
  EXPECT_NE(slurp(dir / "measurements.csv").find("wall_time_ms"), std::string::npos);
}
