#include <gtest/gtest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;

namespace {

int run(const std::string& args) {
  const std::string cmd = std::string(HMP_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("hmp_cli_" + name + "_" + std::to_string(::getpid()));
  fs::remove_all(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST(Cli, EvaluateWritesOutputs) {
  const auto dir = scratch("eval");
  EXPECT_EQ(run("evaluate --scenario throwing --matrix \"0.1 0.3 0.9; 0 0.2 0.9\" --out " + dir.string()), 0);
  EXPECT_TRUE(fs::exists(dir / "trajectory.csv"));
  EXPECT_TRUE(fs::exists(dir / "report.json"));
  fs::remove_all(dir);
}

TEST(Cli, BadMatrixIsInputError) {
  const auto dir = scratch("bad");
  EXPECT_EQ(run("evaluate --scenario throwing --matrix \"0.3 0.1 0.9; 0 0.2 0.9\" --out " + dir.string()), 2);
  EXPECT_EQ(run("evaluate --scenario throwing --matrix \"0.1 0.3; 0 0.2 0.9\" --out " + dir.string()), 2);
  fs::remove_all(dir);
}

TEST(Cli, UnknownScenarioAndFlags) {
  EXPECT_EQ(run("plan --scenario nowhere --out /tmp/none"), 2);
  EXPECT_EQ(run("plan --frobnicate"), 2);
  EXPECT_EQ(run("evaluate --config /nonexistent.json"), 2);
}

TEST(Cli, SweepTable) {
  const auto dir = scratch("sweep");
  ASSERT_EQ(run("sweep --out " + dir.string()), 0);
  const std::string csv = slurp(dir / "sweep.csv");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 11);  // header + 5 K + 5 D
  fs::remove_all(dir);
}

TEST(Cli, PlanIsByteReproducible) {
  const auto a = scratch("plan_a"), b = scratch("plan_b");
  const std::string args = "plan --scenario single_switch --budget 12 --seed 4 --no-oracle --out ";
  ASSERT_EQ(run(args + a.string()), 0);
  ASSERT_EQ(run(args + b.string()), 0);
  EXPECT_EQ(slurp(a / "trajectory.csv"), slurp(b / "trajectory.csv"));
  EXPECT_EQ(slurp(a / "report.json"), slurp(b / "report.json"));
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST(Cli, ConfigFileOverridesScenario) {
  const auto dir = scratch("cfg");
  fs::create_directories(dir);
  std::ofstream(dir / "s.json") << R"({"base": "rest_to_rest", "ocp": {"nodes": 21}})";
  EXPECT_EQ(run("evaluate --config " + (dir / "s.json").string() + " --out " + (dir / "o").string()), 0);
  EXPECT_NE(slurp(dir / "o" / "report.json").find("rest_to_rest"), std::string::npos);
  fs::remove_all(dir);
}
