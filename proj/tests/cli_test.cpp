#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "equilib/cli.hpp"

using namespace equilib;
using io::json;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
  json doc() const { return json::parse(out); }
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string problem(const std::string& name) { return std::string(EQUILIB_PROBLEMS_DIR) + "/" + name; }

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class CliFiles : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("equilib_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  std::string write(const std::string& name, const json& j) const {
    std::ofstream(path(name)) << j.dump();
    return path(name);
  }

  fs::path dir_;
};

const std::vector<std::string> kSamples = {
    "solve-circle.json",   "solve-segment.json",     "relax.json",          "zero-centered.json",
    "extend.json",         "certify-gap.json",       "certify-gap-trivial.json", "certify-gap-circle.json",
    "check-monotone.json", "gap-ratio.json",         "detect-period.json",  "residuals.json",
    "diff-field.json",     "blaschke.json",          "reconstruct.json"};

std::string task_of(const std::string& file) {
  return json::parse(slurp(problem(file)))["task"].get<std::string>();
}

}  // namespace

TEST(Cli, SolveCircleFromFlags) {
  const auto r = run({"solve-circle", "--n", "4", "--law", "inverse_power:2", "--seed", "7"});
  ASSERT_EQ(r.code, 0) << r.out;
  const auto d = r.doc();
  EXPECT_TRUE(d["converged"].get<bool>());
  const auto angles = d["output"]["config"]["angles"].get<std::vector<double>>();
  ASSERT_EQ(angles.size(), 4u);
  for (int k = 0; k < 4; ++k) EXPECT_NEAR(angles[k], k * std::numbers::pi / 2, 1e-8);
  EXPECT_EQ(d["input"]["options"]["rng_seed"], 7);
  EXPECT_LE(d["output"]["residual_report"]["max_abs_net"].get<double>(), 1e-10);
}

TEST(Cli, CertifyTrivialConfigurationIsInapplicable) {
  const auto r = run({"certify-gap", "--problem", problem("certify-gap-trivial.json")});
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_EQ(r.doc()["output"]["certificate"]["verdict"], "inapplicable");
}

TEST(Cli, CertifySampleLayoutPasses) {
  const auto r = run({"certify-gap", "--problem", problem("certify-gap.json")});
  ASSERT_EQ(r.code, 0) << r.out;
  const auto c = r.doc()["output"]["certificate"];
  EXPECT_EQ(c["verdict"], "pass");
  EXPECT_FALSE(c["evidence"].empty());
  for (const auto& row : c["evidence"]) EXPECT_TRUE(row["holds"].get<bool>());
}

TEST(Cli, MissingLawIsAValidationError) {
  const auto r = run({"residuals", "--problem", problem("residuals-missing-law.json")});
  EXPECT_EQ(r.code, 2);
  const auto d = r.doc();
  EXPECT_EQ(d["error"]["message"], "law: required");
  EXPECT_EQ(d["error"]["kind"], "invalid_input");
}

TEST(Cli, UsageAndSchemaErrors) {
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"bogus"}).code, 2);
  EXPECT_EQ(run({"residuals", "--frobnicate"}).code, 2);
  EXPECT_EQ(run({"residuals", "--problem", "/nonexistent/problem.json"}).doc()["error"]["kind"], "io_error");
  const auto wrong = run({"gap-ratio", "--problem", problem("residuals.json")});
  EXPECT_EQ(wrong.code, 2);
  EXPECT_NE(wrong.doc()["error"]["message"].get<std::string>().find("task"), std::string::npos);
  EXPECT_EQ(run({"solve-circle", "--n", "4", "--law", "inverse_power:1"}).code, 2);
  EXPECT_EQ(run({"solve-circle", "--law", "inverse_power:2"}).doc()["error"]["message"], "params.n: required");
  EXPECT_EQ(run({"solve-circle", "--n", "4", "--law", "exp:1", "--tol", "-1"}).code, 2);
}

TEST(Cli, HelpExitsCleanly) {
  const auto r = run({"--help"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("solve-circle"), std::string::npos);
}

TEST_F(CliFiles, MalformedAndVersionedProblems) {
  std::ofstream(path("bad.json")) << "{\"schema_version\": 1, ";
  EXPECT_EQ(run({"residuals", "--problem", path("bad.json")}).code, 2);
  const auto v2 = write("v2.json", {{"schema_version", 2}, {"task", "residuals"}});
  const auto r = run({"residuals", "--problem", v2});
  EXPECT_EQ(r.code, 2);
  EXPECT_EQ(r.doc()["error"]["message"], "schema_version: must be 1");
}

TEST_F(CliFiles, NoConvergenceExitsThreeWithResult) {
  const auto f = write("slow.json", {{"schema_version", 1},
                                     {"task", "relax"},
                                     {"law", {{"kind", "inverse_power"}, {"k", 2}}},
                                     {"config", {{"window", {-0.1, 1, 2, 3, 4, 5}}}},
                                     {"params", {{"sweeps", 1}}}});
  const auto r = run({"relax", "--problem", f});
  EXPECT_EQ(r.code, 3);
  const auto d = r.doc();
  EXPECT_FALSE(d["converged"].get<bool>());
  EXPECT_EQ(d["iterations"], 1);
  EXPECT_EQ(d["output"]["config"]["window"].size(), 6u);
}

TEST_F(CliFiles, CircleIterationBudgetExhausted) {
  const auto f = write("budget.json", {{"schema_version", 1},
                                       {"task", "solve-circle"},
                                       {"law", "inverse_power:2"},
                                       {"options", {{"max_outer_iters", 1}, {"rng_seed", 3}}},
                                       {"params", {{"n", 9}}}});
  const auto r = run({"solve-circle", "--problem", f});
  EXPECT_EQ(r.code, 3);
  EXPECT_FALSE(r.doc()["converged"].get<bool>());
}

TEST_F(CliFiles, OutWritesFileInsteadOfStdout) {
  const auto r = run({"gap-ratio", "--problem", problem("gap-ratio.json"), "--out", path("r.json")});
  EXPECT_EQ(r.code, 0);
  EXPECT_TRUE(r.out.empty());
  EXPECT_EQ(json::parse(slurp(path("r.json")))["output"]["max_ratio"], 3.0);
}

TEST_F(CliFiles, CsvAndSvgArtifacts) {
  const auto r = run({"check-monotone", "--problem", problem("check-monotone.json"), "--csv", path("m.csv"), "--svg",
                      path("m.svg")});
  ASSERT_EQ(r.code, 0) << r.out;
  const auto d = r.doc();
  EXPECT_EQ(d["output"]["certificate"]["verdict"], "fail");
  EXPECT_EQ(d["output"]["certificate"]["violation"], (json{1, 2}));
  const auto csv = slurp(path("m.csv"));
  EXPECT_EQ(csv.substr(0, csv.find(',')), "kind");
  const auto svg = slurp(path("m.svg"));
  EXPECT_EQ(svg.rfind("<svg", 0), 0u);
  EXPECT_NE(svg.find("class=\"force\""), std::string::npos);
}

TEST_F(CliFiles, SvgUnavailableForFieldTasks) {
  const auto r = run({"blaschke", "--problem", problem("blaschke.json"), "--svg", path("b.svg")});
  EXPECT_EQ(r.code, 2);
  EXPECT_FALSE(fs::exists(path("b.svg")));
}

TEST_F(CliFiles, BlaschkeCsvRows) {
  const auto r = run({"blaschke", "--problem", problem("blaschke.json"), "--csv", path("b.csv")});
  ASSERT_EQ(r.code, 0) << r.out;
  const auto csv = slurp(path("b.csv"));
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "n,w_n,z_n,one_minus_z_n,cumulative");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 102);
  EXPECT_TRUE(r.doc()["output"]["dominates"].get<bool>());
}

TEST(Cli, TableRendering) {
  const auto r = run({"certify-gap", "--problem", problem("certify-gap.json"), "--table"});
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("verdict:     pass"), std::string::npos);
  EXPECT_NE(r.out.find("termwise"), std::string::npos);
  EXPECT_EQ(run({"gap-ratio", "--problem", problem("gap-ratio.json"), "--table"}).code, 2);
}

TEST(Cli, LogLevelFromEnvironment) {
  ::setenv("EQUILIB_LOG", "info", 1);
  const auto r = run({"solve-circle", "--n", "3", "--law", "exp:1"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.err.find("[info] solve-circle"), std::string::npos);
  ::setenv("EQUILIB_LOG", "loud", 1);
  EXPECT_EQ(run({"solve-circle", "--n", "3", "--law", "exp:1"}).code, 2);
  ::unsetenv("EQUILIB_LOG");
  EXPECT_TRUE(run({"solve-circle", "--n", "3", "--law", "exp:1"}).err.empty());
}

TEST(Cli, FlagsOverrideProblemFile) {
  const auto r = run({"zero-centered", "--problem", problem("zero-centered.json"), "--a", "-0.5", "--n", "2"});
  ASSERT_EQ(r.code, 0) << r.out;
  const auto d = r.doc();
  const auto w = d["output"]["config"]["window"].get<std::vector<double>>();
  ASSERT_EQ(w.size(), 5u);
  EXPECT_NEAR(w[1], -0.5, 1e-8);
  EXPECT_NEAR(w[3], 2.0, 1e-8);
}

TEST_F(CliFiles, EverySampleIsByteIdenticalAcrossRuns) {
  for (const auto& file : kSamples) {
    const auto task = task_of(file);
    std::vector<std::string> args = {task, "--problem", problem(file), "--csv", path("a.csv")};
    const bool plots = task != "diff-field" && task != "blaschke";
    if (plots) {
      args.push_back("--svg");
      args.push_back(path("a.svg"));
    }
    const auto first = run(args);
    ASSERT_EQ(first.code, 0) << file << ": " << first.out;
    const auto csv1 = slurp(path("a.csv"));
    const auto svg1 = plots ? slurp(path("a.svg")) : "";
    const auto second = run(args);
    EXPECT_EQ(first.out, second.out) << file;
    EXPECT_EQ(csv1, slurp(path("a.csv"))) << file;
    if (plots) {
      EXPECT_EQ(svg1, slurp(path("a.svg"))) << file;
    }
  }
}

TEST(Cli, EveryOutputRoundTripsThroughTheParser) {
  for (const auto& file : kSamples) {
    const auto r = run({task_of(file), "--problem", problem(file)});
    ASSERT_EQ(r.code, 0) << file;
    const auto d = r.doc();
    EXPECT_EQ(d["schema_version"], 1);
    const auto& input = d["input"];
    EXPECT_EQ(io::to_json(io::parse_problem(input)), input) << file;
    EXPECT_EQ(io::to_json(io::parse_options(d["options"])), d["options"]) << file;
    if (d["output"].contains("config")) {
      const auto cfg = io::parse_config(d["output"]["config"]);
      EXPECT_EQ(io::to_json(cfg), d["output"]["config"]) << file;
    }
    // Rerunning the echoed input reproduces the document.
    std::ostringstream out, err;
    const auto p = io::parse_problem(input);
    const auto again = cli::detail::dispatch(p, cli::Logger(cli::LogLevel::error, err));
    EXPECT_EQ(again.output, d["output"]) << file;
  }
}
