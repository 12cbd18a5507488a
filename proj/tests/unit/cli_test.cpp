#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "cli.hpp"
#include "poolsim/trec_io.hpp"

namespace poolsim {
namespace {

namespace fs = std::filesystem;

const fs::path kGolden = fs::path(POOLSIM_TEST_DATA) / "golden";

struct Result {
  int status;
  std::string out;
  std::string err;
};

Result run_cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  int status = cli::run(args, out, err);
  return {status, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("poolsim_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::vector<std::string> golden_inputs(bool with_qrels = true) const {
    std::vector<std::string> args{"--runs", (kGolden / "runs").string()};
    if (with_qrels) {
      args.push_back("--qrels");
      args.push_back((kGolden / "qrels.txt").string());
    }
    for (const char* flag : {"--queries", "--term-stats"}) args.push_back(flag);
    args.insert(args.end() - 1, (kGolden / "queries.tsv").string());
    args.push_back((kGolden / "term_stats.txt").string());
    return args;
  }

  fs::path dir_;
};

std::vector<std::string> concat(std::vector<std::string> a, const std::vector<std::string>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

TEST_F(CliTest, QppWritesOneRowPerPair) {
  auto r = run_cli(concat({"qpp", "--dmin", "1", "--dmax", "3"}, golden_inputs(false)));
  ASSERT_EQ(r.status, 0) << r.err;
  EXPECT_EQ(std::count(r.out.begin(), r.out.end(), '\n'), 7);
  EXPECT_EQ(r.out.substr(0, r.out.find('\n')), "query_id,system_tag,raw,normalized");

  auto to_file = run_cli(concat({"qpp", "--dmin", "1", "--dmax", "3", "--out", dir_.string()}, golden_inputs(false)));
  ASSERT_EQ(to_file.status, 0) << to_file.err;
  EXPECT_EQ(read_file(dir_ / "qpp.csv"), r.out);
}

TEST_F(CliTest, MissingQrelsPathNamesThePath) {
  auto args = golden_inputs(false);
  args.insert(args.begin(), "simulate");
  args.push_back("--qrels");
  args.push_back((dir_ / "nope.txt").string());
  auto r = run_cli(args);
  EXPECT_EQ(r.status, 2);
  EXPECT_NE(r.err.find((dir_ / "nope.txt").string()), std::string::npos);
  EXPECT_EQ(r.err.rfind("poolsim: error: ", 0), 0u);
  EXPECT_EQ(std::count(r.err.begin(), r.err.end(), '\n'), 1);
}

TEST_F(CliTest, DepthBoundsChecked) {
  auto r = run_cli(concat({"simulate", "--dmin", "50", "--dmax", "10"}, golden_inputs()));
  EXPECT_EQ(r.status, 2);
  EXPECT_NE(r.err.find("d_min must not exceed d_max"), std::string::npos);
}

TEST_F(CliTest, PoolCdpOneIsUnionOfTopDocs) {
  auto r = run_cli({"pool", "--runs", (kGolden / "runs").string(), "--policy", "cdp:1", "--out",
                    dir_.string()});
  ASSERT_EQ(r.status, 0) << r.err;
  EXPECT_EQ(read_file(dir_ / "pool.txt"), "q1 d1\nq1 d2\nq1 d8\nq2 d5\nq2 d6\nq2 d9\n");
  auto depths = read_file(dir_ / "depths.csv");
  EXPECT_EQ(std::count(depths.begin(), depths.end(), '\n'), 7);
}

TEST_F(CliTest, PoolVdpNeedsQppInputsOrFallback) {
  auto r = run_cli({"pool", "--runs", (kGolden / "runs").string(), "--policy", "vdp-l", "--dmin",
                    "1", "--dmax", "3", "--out", dir_.string()});
  EXPECT_EQ(r.status, 2);

  auto fallback = run_cli({"pool", "--runs", (kGolden / "runs").string(), "--policy", "vdp-l",
                           "--dmin", "1", "--dmax", "3", "--denominator", "mean-abs", "--out",
                           dir_.string()});
  EXPECT_EQ(fallback.status, 0) << fallback.err;
}

TEST_F(CliTest, PoolIsByteIdenticalOnRerun) {
  auto args = concat({"pool", "--policy", "vdp-il", "--dmin", "1", "--dmax", "3", "--out",
                      (dir_ / "a").string()},
                     golden_inputs());
  ASSERT_EQ(run_cli(args).status, 0);
  args[8] = (dir_ / "b").string();
  ASSERT_EQ(run_cli(args).status, 0);
  EXPECT_EQ(read_file(dir_ / "a" / "pool.txt"), read_file(dir_ / "b" / "pool.txt"));
  EXPECT_EQ(read_file(dir_ / "a" / "depths.csv"), read_file(dir_ / "b" / "depths.csv"));
}

TEST_F(CliTest, SimulateGoldenReport) {
  auto r = run_cli(concat({"simulate", "--dmin", "1", "--dmax", "3", "--format", "csv"}, golden_inputs()));
  ASSERT_EQ(r.status, 0) << r.err;
  EXPECT_EQ(r.out, read_file(kGolden / "expected_report.csv"));

  auto table = run_cli(concat({"simulate", "--dmin", "1", "--dmax", "3", "--out", dir_.string()},
                              golden_inputs()));
  ASSERT_EQ(table.status, 0) << table.err;
  EXPECT_EQ(read_file(dir_ / "report.txt"), read_file(kGolden / "expected_report.txt"));

  auto json = run_cli(concat({"simulate", "--dmin", "1", "--dmax", "3", "--format", "structured"},
                             golden_inputs()));
  ASSERT_EQ(json.status, 0);
  EXPECT_NE(json.out.find("\"decisions\""), std::string::npos);
}

TEST_F(CliTest, PolicySubset) {
  auto r = run_cli(concat({"simulate", "--dmin", "1", "--dmax", "3", "--format", "csv", "--policies",
                           "cdp-min,vdp-l"},
                          golden_inputs()));
  ASSERT_EQ(r.status, 0) << r.err;
  EXPECT_EQ(std::count(r.out.begin(), r.out.end(), '\n'), 3);
}

TEST_F(CliTest, EmptyRunsDirectory) {
  fs::create_directories(dir_ / "empty");
  auto args = golden_inputs();
  args[1] = (dir_ / "empty").string();
  auto r = run_cli(concat({"simulate"}, args));
  EXPECT_EQ(r.status, 2);
  EXPECT_NE(r.err.find("no run files"), std::string::npos);
}

TEST_F(CliTest, ParseErrorsAreSingleLine) {
  fs::create_directories(dir_ / "runs");
  std::ofstream(dir_ / "runs" / "bad.run") << "q1 Q0 d1 1 1.0 s\nq1 Q0 d2 two 0.5 s\n";
  auto r = run_cli({"pool", "--runs", (dir_ / "runs").string(), "--policy", "cdp-min", "--out",
                    dir_.string()});
  EXPECT_EQ(r.status, 2);
  EXPECT_NE(r.err.find("bad.run:2"), std::string::npos);
  EXPECT_EQ(std::count(r.err.begin(), r.err.end(), '\n'), 1);

  auto unknown = run_cli({"simulate", "--no-such-flag"});
  EXPECT_EQ(unknown.status, 2);
  EXPECT_EQ(unknown.err.rfind("poolsim: error: ", 0), 0u);
  EXPECT_EQ(run_cli({}).status, 2);
}

TEST_F(CliTest, HelpDocumentsEveryFlag) {
  const std::map<std::string, std::vector<std::string>> flags{
      {"qpp", {"--runs", "--queries", "--term-stats", "--dmin", "--dmax", "--qpp-k", "--norm-scope",
               "--denominator", "--out", "--threads", "--verbose"}},
      {"pool", {"--runs", "--qrels", "--queries", "--term-stats", "--dmin", "--dmax", "--qpp-k",
                "--norm-scope", "--denominator", "--policy", "--out", "--threads"}},
      {"simulate", {"--runs", "--qrels", "--queries", "--term-stats", "--dmin", "--dmax",
                    "--rel-threshold", "--policies", "--qpp-k", "--norm-scope", "--denominator",
                    "--format", "--out", "--threads"}},
      {"gen-synthetic", {"--out", "--seed", "--systems", "--num-queries", "--documents",
                         "--run-depth", "--judged-depth", "--easy-fraction", "--relevant-grade"}},
  };
  for (const auto& [cmd, expected] : flags) {
    auto r = run_cli({cmd, "--help"});
    EXPECT_EQ(r.status, 0);
    for (const auto& flag : expected) EXPECT_NE(r.out.find(flag), std::string::npos) << cmd << " " << flag;
  }
}

TEST_F(CliTest, ConfigFileWithFlagOverride) {
  std::ofstream(dir_ / "poolsim.ini") << "[simulate]\ndmin=1\ndmax=3\nformat=csv\npolicies=cdp-min,cdp-max\n";
  auto r = run_cli(concat({"--config", (dir_ / "poolsim.ini").string(), "simulate"}, golden_inputs()));
  ASSERT_EQ(r.status, 0) << r.err;
  EXPECT_EQ(std::count(r.out.begin(), r.out.end(), '\n'), 3);
  EXPECT_NE(r.out.find("constant(3)"), std::string::npos);

  auto overridden = run_cli(concat({"--config", (dir_ / "poolsim.ini").string(), "simulate",
                                    "--policies", "vdp-l"},
                                   golden_inputs()));
  ASSERT_EQ(overridden.status, 0) << overridden.err;
  EXPECT_EQ(std::count(overridden.out.begin(), overridden.out.end(), '\n'), 2);
  EXPECT_NE(overridden.out.find("VDP-L"), std::string::npos);
}

TEST_F(CliTest, GenSyntheticIsDeterministic) {
  std::vector<std::string> base{"gen-synthetic", "--seed", "9", "--systems", "3", "--num-queries",
                                "4", "--documents", "300", "--run-depth", "20", "--judged-depth", "10"};
  ASSERT_EQ(run_cli(concat(base, {"--out", (dir_ / "a").string()})).status, 0);
  ASSERT_EQ(run_cli(concat(base, {"--out", (dir_ / "b").string()})).status, 0);
  for (const char* f : {"qrels.txt", "queries.tsv", "term_stats.txt", "runs/sys00.run"}) {
    EXPECT_EQ(read_file(dir_ / "a" / f), read_file(dir_ / "b" / f)) << f;
  }
  auto sim = run_cli({"simulate", "--runs", (dir_ / "a" / "runs").string(), "--qrels",
                      (dir_ / "a" / "qrels.txt").string(), "--queries",
                      (dir_ / "a" / "queries.tsv").string(), "--term-stats",
                      (dir_ / "a" / "term_stats.txt").string(), "--dmin", "1", "--dmax", "5"});
  EXPECT_EQ(sim.status, 0) << sim.err;
}

}  // namespace
}  // namespace poolsim
