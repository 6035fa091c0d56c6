#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"

namespace {

struct Run {
  int code;
  std::string out;
};

Run run(const std::string& args) {
  std::string cmd = std::string(KMONO_CLI) + " " + args + " 2>/dev/null";
  FILE* f = popen(cmd.c_str(), "r");
  std::string out;
  char buf[4096];
  while (std::size_t got = fread(buf, 1, sizeof buf, f)) out.append(buf, got);
  int st = pclose(f);
  return {WIFEXITED(st) ? WEXITSTATUS(st) : -1, out};
}

}  // namespace

TEST(Cli, UsageErrors) {
  EXPECT_EQ(run("").code, 2);
  EXPECT_EQ(run("nonsense").code, 2);
  EXPECT_EQ(run("weights --k 3 --n 2 --kind we0").code, 2);
  EXPECT_EQ(run("weights --k 1 --n 2 --kind bogus").code, 2);
  EXPECT_EQ(run("weights --k 1 --n 3 --kind we0 --sigma 1,1,2").code, 2);
  EXPECT_EQ(run("solve --k 1 --n 1 --z 0.3 --h -0.4 --p 0.5 --class point:1").code, 2);
  EXPECT_EQ(run("integral --k 1 --n 1 --z 0 --h 0.5 --p -1").code, 2);
  EXPECT_EQ(run("verify --suite nope").code, 2);
}

TEST(Cli, Weights) {
  auto r = run("weights --k 1 --n 2 --kind we0");
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "-1 * Z2 * T1^-1 + 1\n");
  auto j = nlohmann::json::parse(run("--json weights --k 2 --n 3 --kind weinf --eval-at 1,3 --shift H").out);
  EXPECT_EQ(j["poly"], "0");
}

TEST(Cli, TauDeterminant) {
  auto r = run("tau --k 2 --n 3 --det --json");
  EXPECT_EQ(r.code, 0);
  auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["det"], j["reference"]);
  EXPECT_TRUE(j["pass"].get<bool>());
}

TEST(Cli, SchurMatricesToFile) {
  std::string path = std::string(TEST_TMP) + "/matrices.json";
  EXPECT_EQ(run("schur-matrices --k 1 --n 2 --json --out " + path).code, 0);
  std::ifstream f(path);
  auto j = nlohmann::json::parse(f);
  EXPECT_EQ(j["M"][1][1], "1 * Z1 + 1 * Z2");
  EXPECT_EQ(j["Tinv"].size(), 2u);
  EXPECT_TRUE(j.contains("scalar_mu_inf"));
}

TEST(Cli, Solve) {
  auto r = run("solve --k 1 --n 1 --z 0.3 --h -0.4,0.1 --p -0.5,-0.1 --class point:1 --json");
  EXPECT_EQ(r.code, 0);
  auto j = nlohmann::json::parse(r.out);
  EXPECT_LE(j["truncation_order"].get<int>(), 60);
  EXPECT_LT(j["tail_estimate"].get<double>(), 1e-10);
  EXPECT_EQ(j["values"]["[1]"].size(), 2u);
}

TEST(Cli, CheckExitCodes) {
  EXPECT_EQ(run("check --name monodromy --k 1 --n 2").code, 0);
  auto r = run("--json check --name thm52 --k 1 --n 2 --seed 3");
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(nlohmann::json::parse(r.out)["failed"], 0);
}

TEST(Cli, VerifyDeterministic) {
  auto a = run("--json verify --suite symbolic --max-n 2");
  auto b = run("--json verify --suite symbolic --max-n 2 --threads 3");
  EXPECT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(nlohmann::json::parse(a.out)["failed"], 0);
  EXPECT_EQ(run("verify --suite symbolic --max-n 1").code, 0);
}
