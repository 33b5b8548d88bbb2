#include "otsm/mat_io.hpp"

#include <gtest/gtest.h>
#include <json.hpp>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

int run(const std::string& args) {
  const std::string cmd = std::string(OTSM_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

nlohmann::json read_json(const fs::path& path) {
  std::ifstream in(path);
  return nlohmann::json::parse(in);
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("otsm_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  void write(const std::string& name, const std::string& text) const { std::ofstream(dir_ / name) << text; }

  fs::path dir_;
};

}  // namespace

TEST_F(Cli, InstancePipeline) {
  const std::string inst = path("inst");
  ASSERT_EQ(run("gen --out " + inst + " --m 6 --d 4 --r 2 --sigma 0.05 --seed 3"), 0);
  for (const char* name : {"spec.json", "S.mat", "theta.mat", "W.mat"}) EXPECT_TRUE(fs::exists(fs::path(inst) / name)) << name;
  EXPECT_EQ(read_json(fs::path(inst) / "spec.json")["seed"], 3);

  ASSERT_EQ(run("solve --instance " + inst), 0);
  EXPECT_EQ(otsm::load_matrix(fs::path(inst) / "O.mat").rows(), 24);
  EXPECT_TRUE(read_json(fs::path(inst) / "solve.json").contains("trace"));

  ASSERT_EQ(run("certify --instance " + inst + " --solution " + inst + "/O.mat"), 0);
  const nlohmann::json cert = read_json(fs::path(inst) / "certificate.json");
  EXPECT_TRUE(cert.contains("assumption"));

  ASSERT_EQ(run("bounds --instance " + inst + " --solution " + inst + "/O.mat"), 0);
  const nlohmann::json bounds = read_json(fs::path(inst) / "bounds.json");
  EXPECT_TRUE(bounds.contains("discordance"));
  EXPECT_TRUE(bounds.contains("estimation_error"));

  const std::string sdp_out = path("sdp");
  ASSERT_EQ(run("sdp --instance " + inst + " --out " + sdp_out), 0);
  EXPECT_TRUE(fs::exists(fs::path(sdp_out) / "U.mat"));
  EXPECT_TRUE(fs::exists(fs::path(sdp_out) / "V.mat"));
  const nlohmann::json sdp = read_json(fs::path(sdp_out) / "sdp.json");
  EXPECT_TRUE(sdp.contains("tightness"));
  EXPECT_TRUE(sdp.contains("dual_certificate"));
}

TEST_F(Cli, GenIsDeterministic) {
  ASSERT_EQ(run("gen --out " + path("a") + " --m 4 --d 3 --r 2 --sigma 0.3 --seed 9 --model maxdiff"), 0);
  ASSERT_EQ(run("gen --out " + path("b") + " --m 4 --d 3 --r 2 --sigma 0.3 --seed 9 --model maxdiff"), 0);
  EXPECT_EQ(read_text(dir_ / "a" / "S.mat"), read_text(dir_ / "b" / "S.mat"));
  EXPECT_EQ(read_text(dir_ / "a" / "S.mat").rfind("OTSM-MAT 1 12 12\n", 0), 0u);
}

TEST_F(Cli, GridWritesResults) {
  write("cfg.json", R"({"m_list": [4, 5], "sigma_list": [0.1], "replicates": 2, "base_seed": 5})");
  const std::string out = path("out");
  ASSERT_EQ(run("grid --config " + path("cfg.json") + " --out " + out + " --workers 2 --keep-instances"), 0);
  const std::string csv = read_text(fs::path(out) / "results.csv");
  EXPECT_EQ(csv.rfind("m,sigma,replicates,", 0), 0u);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 3);
  EXPECT_EQ(read_json(fs::path(out) / "results.json")["results"].size(), 2u);
  EXPECT_TRUE(fs::exists(fs::path(out) / "instances"));

  // Flag overrides reach the run and do not depend on the worker count.
  const std::string out2 = path("out2");
  ASSERT_EQ(run("grid --config " + path("cfg.json") + " --out " + out2 + " --workers 1"), 0);
  EXPECT_EQ(read_text(fs::path(out2) / "results.csv"), csv);
  const std::string out3 = path("out3");
  ASSERT_EQ(run("grid --config " + path("cfg.json") + " --out " + out3 + " --seed 6 --model maxdiff"), 0);
  const nlohmann::json meta = read_json(fs::path(out3) / "results.json")["metadata"];
  EXPECT_EQ(meta["base_seed"], 6);
  EXPECT_EQ(meta["model"], "maxdiff");
}

TEST_F(Cli, InvalidConfigExitsTwo) {
  write("bad.json", R"({"replicates": 0})");
  EXPECT_EQ(run("grid --config " + path("bad.json") + " --out " + path("o")), 2);
  write("unknown.json", R"({"replicate": 3})");
  EXPECT_EQ(run("grid --config " + path("unknown.json") + " --out " + path("o")), 2);
  write("garbled.json", "{");
  EXPECT_EQ(run("grid --config " + path("garbled.json") + " --out " + path("o")), 2);
  EXPECT_EQ(run("grid --config " + path("missing.json") + " --out " + path("o")), 2);
  EXPECT_EQ(run("grid --out " + path("o")), 2);
  EXPECT_EQ(run("table --workers 0 --out " + path("o")), 2);
  EXPECT_EQ(run("frobnicate"), 2);
  EXPECT_EQ(run(""), 2);
}

TEST_F(Cli, StrictNonConvergenceExitsThree) {
  const std::string inst = path("inst");
  ASSERT_EQ(run("gen --out " + inst + " --m 8 --d 5 --r 3 --sigma 1.5 --seed 2"), 0);
  EXPECT_EQ(run("solve --instance " + inst + " --max-sweeps 1 --strict"), 3);
  EXPECT_EQ(run("solve --instance " + inst + " --max-sweeps 1"), 0);
  EXPECT_EQ(run("sdp --instance " + inst + " --out " + path("sdp") + " --max-iter 2 --strict"), 3);

  write("short.json", R"({"m_list": [6], "sigma_list": [1.5], "replicates": 2, "ascent": {"max_sweeps": 1}})");
  EXPECT_EQ(run("grid --config " + path("short.json") + " --out " + path("g") + " --strict"), 3);
  EXPECT_EQ(run("grid --config " + path("short.json") + " --out " + path("g2")), 0);
}
