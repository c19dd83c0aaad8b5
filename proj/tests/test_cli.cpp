#include <gtest/gtest.h>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace {

namespace fs = std::filesystem;

struct Result {
  int code = -1;
  std::string output;
};

Result run(const std::string& args) {
  const std::string cmd = std::string(UPDIST_CLI) + " " + args + " 2>&1";
  Result r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (pipe == nullptr) return r;
  std::array<char, 4096> buf{};
  while (std::fgets(buf.data(), static_cast<int>(buf.size()), pipe) != nullptr) r.output += buf.data();
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("updist_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string write(const std::string& name, const std::string& text) {
    const auto p = dir_ / name;
    std::ofstream(p) << text;
    return p.string();
  }

  fs::path dir_;
};

TEST_F(CliTest, UsageErrorsExitWithTwo) {
  EXPECT_EQ(run("").code, 2);
  EXPECT_EQ(run("frobnicate").code, 2);
  EXPECT_EQ(run("refine --out x").code, 2);
}

TEST_F(CliTest, ConfigErrorsExitWithTwoAndNameTheKey) {
  const auto cfg = write("c.json", R"({"schema_version":1,"objective":"branin","iterashuns":3})");
  const Result r = run("refine --config " + cfg + " --out " + (dir_ / "o").string());
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.output.find("iterashuns"), std::string::npos) << r.output;
  EXPECT_EQ(run("refine --config " + (dir_ / "missing.json").string() + " --out x").code, 2);
}

TEST_F(CliTest, RefineWritesValidatedOutputsDeterministically) {
  const auto cfg = write("c.json",
                         R"({"schema_version":1,"objective":"branin","n0":6,"iterations":3,"seed_count":2,)"
                         R"("pool_per_dim":50,"test_set":{"kind":"grid","n_per_axis":10}})");
  const auto out1 = dir_ / "o1";
  const auto out2 = dir_ / "o2";
  ASSERT_EQ(run("refine --config " + cfg + " --out " + out1.string()).code, 0);
  ASSERT_EQ(run("refine --config " + cfg + " --out " + out2.string() + " --jobs 2").code, 0);
  std::string files;
  for (const auto& e : fs::recursive_directory_iterator(out1)) {
    if (e.is_regular_file()) files += " " + e.path().string();
  }
  const Result v = run("validate" + files);
  EXPECT_EQ(v.code, 0) << v.output;
  for (const char* m : {"up_smart", "kriging_variance"}) {
    for (const char* s : {"seed_1", "seed_2"}) {
      EXPECT_EQ(slurp(out1 / m / s / "trace.csv"), slurp(out2 / m / s / "trace.csv"));
    }
  }
}

TEST_F(CliTest, RunFailureExitsWithOne) {
  const auto sim = write("sim.sh", "#!/bin/sh\nexit 9\n");
  fs::permissions(sim, fs::perms::owner_all);
  const auto cfg = write("c.json", R"({"schema_version":1,"external_command":[")" + sim +
                                       R"("],"bounds":[[0,1]],"n0":4,"iterations":2,"mode":"optimize"})");
  const Result r = run("external --config " + cfg + " --out " + (dir_ / "o").string());
  EXPECT_EQ(r.code, 1) << r.output;
  EXPECT_NE(r.output.find("status 9"), std::string::npos) << r.output;
  EXPECT_TRUE(fs::exists(dir_ / "o" / "up_ego" / "seed_1" / "run.json"));
}

TEST_F(CliTest, DoeAndEval) {
  const auto design = (dir_ / "d.csv").string();
  ASSERT_EQ(run("doe --n 8 --objective branin --seed 4 --out " + design).code, 0);
  EXPECT_EQ(run("validate " + design).code, 0);
  std::string text = slurp(design);
  EXPECT_EQ(text.substr(0, text.find('\n')), "x1,x2,y");
  const Result e = run("eval --design " + design + " --objective branin --at \"0,5;1,1\" --criterion '{\"criterion\":\"up_ei\"}'");
  ASSERT_EQ(e.code, 0) << e.output;
  EXPECT_EQ(e.output.substr(0, e.output.find('\n')), "x1,x2,mean,variance,up_mean,up_variance,criterion");
  EXPECT_EQ(std::count(e.output.begin(), e.output.end(), '\n'), 3);

  const auto plain = (dir_ / "p.csv").string();
  ASSERT_EQ(run("doe --n 5 --dim 3 --out " + plain).code, 0);
  EXPECT_EQ(slurp(plain).substr(0, 9), "x1,x2,x3\n");
  EXPECT_EQ(run("doe --n 5 --out " + plain).code, 2);
  EXPECT_EQ(run("eval --design " + design + " --bounds 0:1 --at 0.5").code, 2);
}

TEST_F(CliTest, ValidateFlagsBrokenFiles) {
  const auto bad = write("trace.csv", "iter,x1\n1,2\n");
  EXPECT_EQ(run("validate " + bad).code, 1);
}

}  // namespace
