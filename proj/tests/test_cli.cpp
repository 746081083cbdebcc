#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <string>

#include "adapt/io.hpp"

namespace fs = std::filesystem;
using namespace adapt;

namespace {

struct Outcome {
  int code = -1;
  std::string out;
};

Outcome run(const std::string& args) {
  const std::string cmd = std::string(ADAPT_CLI_PATH) + " " + args + " 2>/dev/null";
  Outcome r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (pipe == nullptr) return r;
  char buf[4096];
  std::size_t n = 0;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

class Cli : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = fs::temp_directory_path() / "adapt_cli_test";
    fs::remove_all(dir_);
    fs::create_directories(dir_);
    write_text(dir_ / "drift.json", R"({"dim": 5, "zero_coords": 1, "samples_per_period": 300})");
    ASSERT_EQ(run("--seed 3 --out " + (dir_ / "sim").string() + " simulate --config " +
                  (dir_ / "drift.json").string()).code, 0);
  }
  static void TearDownTestSuite() { fs::remove_all(dir_); }

  static std::string p(const std::string& rel) { return (dir_ / rel).string(); }
  static std::string sources() { return "--sources '" + p("sim/period_0[1-6].csv") + "'"; }

  static inline fs::path dir_;
};

}  // namespace

TEST_F(Cli, SimulateWritesEveryPeriodAndManifest) {
  for (int l = 1; l <= 15; ++l) {
    const std::string name = (l < 10 ? "period_0" : "period_") + std::to_string(l) + ".csv";
    const auto d = read_dataset(dir_ / "sim" / name);
    EXPECT_EQ(d.period, l);
    EXPECT_EQ(d.rows(), 300);
  }
  EXPECT_TRUE(fs::exists(dir_ / "sim" / "coefficient_path.json"));
  const json m = parse_json_file(dir_ / "sim" / "manifest.json");
  EXPECT_EQ(m.at("command"), "simulate");
  EXPECT_EQ(m.at("seed"), 3);
}

TEST_F(Cli, SimulateIsReproducible) {
  ASSERT_EQ(run("--seed 3 --out " + p("sim2") + " simulate --config " + p("drift.json")).code, 0);
  for (const char* f : {"period_01.csv", "period_15.csv", "coefficient_path.json"})
    EXPECT_EQ(read_text(dir_ / "sim" / f), read_text(dir_ / "sim2" / f)) << f;
}

TEST_F(Cli, MalformedConfigExitsTwo) {
  write_text(dir_ / "bad.json", "{\n  \"dim\": 5,\n");
  EXPECT_EQ(run("--out " + p("x") + " simulate --config " + p("bad.json")).code, 2);
  write_text(dir_ / "unknown.json", R"({"dimension": 5})");
  EXPECT_EQ(run("--out " + p("x") + " simulate --config " + p("unknown.json")).code, 2);
}

TEST_F(Cli, TargetOnlyWithoutSources) {
  EXPECT_EQ(run("--out " + p("t") + " fit target-only --target " + p("sim/period_07.csv")).code, 0);
  EXPECT_TRUE(fs::exists(dir_ / "t" / "model.json"));
  EXPECT_TRUE(fs::exists(dir_ / "t" / "diagnostics.json"));
  EXPECT_TRUE(fs::exists(dir_ / "t" / "manifest.json"));
}

TEST_F(Cli, AdaptWithoutSourcesExitsTwo) {
  EXPECT_EQ(run("--out " + p("a0") + " fit adapt --target " + p("sim/period_07.csv")).code, 2);
}

TEST_F(Cli, AdaptFitWritesDiagnostics) {
  ASSERT_EQ(run("--seed 4 --out " + p("a") + " fit adapt --target " + p("sim/period_07.csv") + " " + sources()).code, 0);
  const json d = parse_json_file(dir_ / "a" / "diagnostics.json");
  EXPECT_EQ(d.at("bank_labels").size(), 7u);
  EXPECT_TRUE(d.at("converged").get<bool>());
  EXPECT_LE(d.at("kkt_residual").get<double>(), 1e-6);
}

TEST_F(Cli, MaximinEqualsUnconstrainedZeroAnchorAdapt) {
  ASSERT_EQ(run("--seed 4 --out " + p("mm") + " fit maximin --target " + p("sim/period_07.csv") + " " + sources()).code, 0);
  ASSERT_EQ(run("--seed 4 --out " + p("mz") + " fit adapt --tau inf --anchor zero --bank sources --target " +
                p("sim/period_07.csv") + " " + sources()).code, 0);
  EXPECT_EQ(read_text(dir_ / "mm" / "model.json"), read_text(dir_ / "mz" / "model.json"));
}

TEST_F(Cli, BadArgumentsExitTwo) {
  EXPECT_EQ(run("fit").code, 2);
  EXPECT_EQ(run("--out " + p("u") + " fit lasso --target " + p("sim/period_07.csv")).code, 2);
  EXPECT_EQ(run("--out " + p("u") + " fit pooled --tau 1 --target " + p("sim/period_07.csv")).code, 2);
  EXPECT_EQ(run("frobnicate").code, 2);
}

TEST_F(Cli, MissingInputExitsThree) {
  EXPECT_EQ(run("--out " + p("m") + " fit target-only --target " + p("nope.csv")).code, 3);
}

TEST_F(Cli, EvaluateZeroModelPrintsHalf) {
  write_text(dir_ / "zero.json", R"({"intercept": 0.3, "slopes": [0, 0, 0, 0, 0], "link": "logistic"})");
  const Outcome r = run("evaluate --model " + p("zero.json") + " --data " + p("sim/period_09.csv"));
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "0.5\n");
}

TEST_F(Cli, EvaluateSingleClassExitsFive) {
  write_text(dir_ / "ones.csv", "y,x1\n1,0.5\n1,-0.5\n");
  write_text(dir_ / "one.json", R"({"intercept": 0, "slopes": [1]})");
  EXPECT_EQ(run("evaluate --model " + p("one.json") + " --data " + p("ones.csv")).code, 5);
}

TEST_F(Cli, AgingPrintsZeroForFlatTable) {
  write_text(dir_ / "flat.csv",
             "method,train_period,eval_period,rep,auc\n"
             "m,1,1,0,0.8\nm,1,2,0,0.8\nm,2,2,0,0.8\nm,1,3,0,0.7\nm,2,3,0,0.7\nm,3,3,0,0.7\n");
  const Outcome r = run("aging --results " + p("flat.csv") + " --delta 1");
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "0\n");
  EXPECT_EQ(run("aging --results " + p("flat.csv") + " --delta 2").out, "0\n");
}

TEST_F(Cli, AgingHalfDiagonalExitsFive) {
  write_text(dir_ / "half.csv", "method,train_period,eval_period,rep,auc\nm,1,2,0,0.6\nm,2,2,0,0.5\n");
  EXPECT_EQ(run("aging --results " + p("half.csv") + " --delta 1").code, 5);
}

TEST_F(Cli, BenchmarkAccountingThreadsAndResume) {
  write_text(dir_ / "exp.json",
             R"({"drift": {"dim": 4, "zero_coords": 1, "samples_per_period": 400},
                 "repetitions": 2, "eval_sample_size": 120,
                 "penalty": {"folds": 3, "grid_size": 5}})");
  const std::string base = " benchmark --sweep rho --config " + p("exp.json");
  ASSERT_EQ(run("--threads 1 --out " + p("b1") + base).code, 0);
  ASSERT_EQ(run("--threads 8 --out " + p("b8") + base).code, 0);
  EXPECT_EQ(read_text(dir_ / "b1" / "results.csv"), read_text(dir_ / "b8" / "results.csv"));

  // 4 rho values x 4 methods x 9 evaluation periods.
  EXPECT_EQ(read_text(dir_ / "b1" / "failures.csv"), "grid_index,rep,method,message\n");
  const std::string summary = read_text(dir_ / "b1" / "summary.csv");
  EXPECT_EQ(std::count(summary.begin(), summary.end(), '\n'), 1 + 4 * 4 * 9);

  fs::remove(dir_ / "b1" / "cells" / "rho_g2_r1.failures.csv");
  fs::remove(dir_ / "b1" / "results.csv");
  ASSERT_EQ(run("--threads 1 --out " + p("b1") + base).code, 0);
  EXPECT_EQ(read_text(dir_ / "b1" / "results.csv"), read_text(dir_ / "b8" / "results.csv"));
  EXPECT_EQ(run("--out " + p("b2") + " benchmark --sweep sideways --config " + p("exp.json")).code, 2);
}
