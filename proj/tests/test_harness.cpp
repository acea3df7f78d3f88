// SPDX-License-Identifier: Apache-2.0

#include "chaoscs/harness.hpp"

#include <doctest.h>
#include <json.hpp>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace chaoscs::harness;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir() {
  const fs::path dir = fs::temp_directory_path() / "chaoscs_harness_test";
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  return run_command(args, out, err);
}

nlohmann::json manifest_of(const fs::path& csv) {
  return nlohmann::json::parse(slurp(csv.string() + ".manifest.json"));
}

}  // namespace

TEST_CASE("parse_k_list") {
  const auto range = parse_k_list("1:2:29");
  REQUIRE(range.size() == 15);
  CHECK(range.front() == 1);
  CHECK(range.back() == 29);
  CHECK(parse_k_list("5,10,15") == std::vector<int>{5, 10, 15});
  CHECK(parse_k_list("7") == std::vector<int>{7});
  CHECK_THROWS_AS(parse_k_list("1:0:5"), UsageError);
  CHECK_THROWS_AS(parse_k_list("a,b"), UsageError);
}

TEST_CASE("missing required field is named") {
  try {
    parse_config({"recovery-curve", "--M", "50", "--ensemble", "gaussian", "--k", "5"});
    FAIL("expected UsageError");
  } catch (const UsageError& e) {
    CHECK(std::string(e.what()).find("N") != std::string::npos);
  }
}

TEST_CASE("flags beat the config file") {
  const auto dir = scratch_dir();
  const auto config = dir / "cfg.json";
  std::ofstream(config) << R"({"N": 40, "M": 20, "ensemble": "gaussian", "k": "2", "trials": 5, "seed": 9})";
  const auto cfg = parse_config({"recovery-curve", "--config", config.string(), "--M", "10"});
  CHECK(*cfg.n == 40);
  CHECK(*cfg.m == 10);
  CHECK(cfg.seed == 9);
  CHECK(cfg.seed_source == "config_file");
  REQUIRE(cfg.overrides.size() == 1);
  CHECK(cfg.overrides[0].key == "M");
  CHECK(cfg.overrides[0].flag_value == "10");
  CHECK(cfg.overrides[0].file_value == "20");

  const auto csv = dir / "override.csv";
  REQUIRE(run({"recovery-curve", "--config", config.string(), "--M", "10", "--out",
               csv.string()}) == kExitOk);
  const auto manifest = manifest_of(csv);
  CHECK(manifest["config"]["M"] == "10");
  CHECK(manifest["overrides"][0]["config_file"] == "20");
}

TEST_CASE("environment seed has lowest precedence") {
  ::setenv("CHAOS_CS_SEED", "77", 1);
  const std::vector<std::string> base = {"recovery-curve", "--N", "20", "--M", "10",
                                         "--ensemble", "gaussian", "--k", "1"};
  auto cfg = parse_config(base);
  CHECK(cfg.seed == 77);
  CHECK(cfg.seed_source == "env");
  auto with_flag = base;
  with_flag.insert(with_flag.end(), {"--seed", "3"});
  cfg = parse_config(with_flag);
  CHECK(cfg.seed == 3);
  CHECK(cfg.seed_source == "flag");
  ::unsetenv("CHAOS_CS_SEED");
  CHECK(parse_config(base).seed_source == "default");
}

TEST_CASE("autocorr command writes 21 lags") {
  const auto csv = scratch_dir() / "autocorr.csv";
  REQUIRE(run({"autocorr", "--system", "lorenz", "--samples", "2000", "--max-lag", "20", "--out",
               csv.string()}) == kExitOk);
  std::istringstream in(slurp(csv));
  std::string line;
  std::getline(in, line);
  CHECK(line == "lag,value");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 21);
  CHECK(fs::exists(csv.string() + ".manifest.json"));
}

TEST_CASE("recovery-curve output is reproducible") {
  const auto dir = scratch_dir();
  const std::vector<std::string> base = {"recovery-curve", "--N", "40", "--M", "20",
                                         "--ensemble", "bernoulli", "--k", "2:2:8",
                                         "--trials", "20", "--seed", "42"};
  std::vector<std::string> outputs;
  for (const char* jobs : {"1", "1", "4"}) {
    const auto csv = dir / (std::string("rc_") + jobs + std::to_string(outputs.size()) + ".csv");
    auto args = base;
    args.insert(args.end(), {"--jobs", jobs, "--out", csv.string()});
    REQUIRE(run(args) == kExitOk);
    outputs.push_back(slurp(csv));
  }
  CHECK(outputs[0] == outputs[1]);
  CHECK(outputs[0] == outputs[2]);
  CHECK(outputs[0].rfind("k,trials,failures,error_rate,solver_failures\n", 0) == 0);
}

TEST_CASE("kmax writes a single row") {
  const auto csv = scratch_dir() / "kmax.csv";
  REQUIRE(run({"kmax", "--N", "60", "--M", "30", "--ensemble", "gaussian", "--trials", "30",
               "--out", csv.string()}) == kExitOk);
  std::istringstream in(slurp(csv));
  std::string header, row, extra;
  std::getline(in, header);
  std::getline(in, row);
  CHECK(header == "N,M,ratio,k_max");
  CHECK_FALSE(std::getline(in, extra));
  const double k_max = std::stod(row.substr(row.rfind(',') + 1));
  CHECK(k_max > 0.0);
  CHECK(k_max < 30.0);
  const auto manifest = manifest_of(csv);
  CHECK(manifest["command"] == "kmax");
  CHECK(manifest["total_trials"].get<int>() > 0);
}

TEST_CASE("cli exit codes") {
  const std::string cli = CHAOSCS_CLI_PATH;
  const auto dir = scratch_dir();
  auto status = [](const std::string& cmd) {
    const int raw = std::system((cmd + " >/dev/null 2>&1").c_str());
    return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  };
  CHECK(status(cli + " --help") == 0);
  CHECK(status(cli + " recovery-curve --M 5 --ensemble gaussian --k 1") == 2);
  CHECK(status(cli + " frobnicate") == 2);
  CHECK(status(cli + " recovery-curve --N 10 --M 5 --ensemble gaussian --k 1 --trials x") == 2);
  CHECK(status(cli + " generate --system lorenz --step 0.5 --tau 0.5 --burn-in 0 --length 50 --out " +
               (dir / "diverge.csv").string()) == 1);
  CHECK_FALSE(fs::exists(dir / "diverge.csv"));
  const auto ok = dir / "gen.csv";
  CHECK(status(cli + " generate --ensemble uniform01 --length 10 --out " + ok.string()) == 0);
  CHECK(fs::exists(ok.string() + ".manifest.json"));
}
