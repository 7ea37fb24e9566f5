// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "simjoin/cli/commands.hpp"
#include "simjoin/grid_index.hpp"

namespace simjoin::cli {
namespace {

namespace fs = std::filesystem;

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("simjoin_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path path(const std::string& name) const { return dir_ / name; }

  static std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
  }

  fs::path generate(std::size_t count, std::size_t dims, std::uint64_t seed, const std::string& name) {
    GenerateOptions g;
    g.count = count;
    g.dims = dims;
    g.seed = seed;
    g.out = path(name);
    std::ostringstream sink;
    EXPECT_EQ(cmd_generate(g, sink), 0);
    return g.out;
  }

  static int run_cli(const std::string& args) {
    const std::string cmd = std::string(SIMJOIN_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
  }

  fs::path dir_;
};

std::vector<std::string> lines_of(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

std::vector<std::string> fields_of(const std::string& row) {
  std::vector<std::string> out;
  std::istringstream in(row);
  for (std::string f; std::getline(in, f, ',');) out.push_back(f);
  return out;
}

TEST_F(CliTest, GenerateIsByteIdenticalForSameSeed) {
  const auto a = generate(5000, 2, 7, "a.csv");
  const auto b = generate(5000, 2, 7, "b.csv");
  EXPECT_EQ(slurp(a), slurp(b));
  EXPECT_EQ(lines_of(slurp(a)).size(), 5000u);
  EXPECT_EQ(load_csv(a, 2), generate_uniform(5000, 2, 0, 100, 7));
}

TEST_F(CliTest, GenerateRejectsInvertedBounds) {
  GenerateOptions g;
  g.count = 10;
  g.lo = 100;
  g.hi = 0;
  g.out = path("x.csv");
  std::ostringstream sink;
  EXPECT_THROW(cmd_generate(g, sink), UsageError);
  EXPECT_EQ(run_cli("generate --count 10 --dims 2 --lo 100 --hi 0 --out " + path("y.csv").string()), 2);
}

TEST_F(CliTest, JoinReportRowIsConsistent) {
  const auto input = generate(20000, 2, 3, "in.csv");
  std::map<std::string, std::string> pairs_by_mode;
  for (const char* mode : {"baseline", "unicomp"}) {
    JoinOptions opts;
    opts.input = input;
    opts.dims = 2;
    opts.eps = 1.0;
    opts.mode = *parse_mode(mode);
    opts.count_only = true;
    std::ostringstream out;
    ASSERT_EQ(cmd_join(opts, out), 0);
    const auto lines = lines_of(out.str());
    ASSERT_EQ(lines.size(), 2u);
    EXPECT_EQ(lines[0], report_header());
    const auto f = fields_of(lines[1]);
    ASSERT_EQ(f.size(), 14u);
    EXPECT_EQ(f[2], "20000");
    EXPECT_EQ(f[5], mode);

    const Dataset d = load_csv(input, 2);
    const GridIndex index = GridIndex::build(d, 1.0);
    JoinConfig cfg;
    cfg.eps = 1.0;
    cfg.mode = opts.mode;
    EXPECT_EQ(f[11], std::to_string(count_only_join(d, index, cfg).total_pairs));
    pairs_by_mode[mode] = f[11];
    EXPECT_NEAR(std::stod(f[12]), std::stod(f[11]) / 20000.0, 1e-6);
  }
  EXPECT_EQ(pairs_by_mode["baseline"], pairs_by_mode["unicomp"]);
}

TEST_F(CliTest, JoinWritesPairFile) {
  const auto input = generate(500, 3, 4, "in.csv");
  JoinOptions opts;
  opts.input = input;
  opts.dims = 3;
  opts.eps = 10.0;
  opts.out = path("pairs.csv");
  std::ostringstream out;
  ASSERT_EQ(cmd_join(opts, out), 0);
  const auto f = fields_of(lines_of(out.str())[1]);
  EXPECT_EQ(lines_of(slurp(*opts.out)).size(), std::stoul(f[11]));
  EXPECT_EQ(f[13], "3");
}

TEST_F(CliTest, JoinRejectsZeroEps) {
  const auto input = generate(10, 2, 4, "in.csv");
  JoinOptions opts;
  opts.input = input;
  opts.eps = 0.0;
  std::ostringstream out;
  EXPECT_THROW(cmd_join(opts, out), UsageError);
  EXPECT_EQ(run_cli("join --input " + input.string() + " --dims 2 --eps 0"), 2);
  EXPECT_EQ(run_cli("join --input " + input.string() + " --dims 2 --eps 1 --count-only"), 0);
}

TEST_F(CliTest, ValidatePassesForBothModes) {
  const auto input = generate(3000, 3, 5, "in.csv");
  for (JoinMode mode : {JoinMode::baseline, JoinMode::unicomp}) {
    ValidateOptions v;
    v.input = input;
    v.dims = 3;
    v.eps = 6.0;
    v.mode = mode;
    v.engine_pairs_out = path("engine.txt");
    v.oracle_pairs_out = path("oracle.txt");
    std::ostringstream out;
    EXPECT_EQ(cmd_validate(v, out), 0) << out.str();
    EXPECT_EQ(out.str().substr(0, 4), "PASS");
    EXPECT_EQ(slurp(*v.engine_pairs_out), slurp(*v.oracle_pairs_out));
  }
  EXPECT_EQ(run_cli("validate --input " + input.string() + " --dims 3 --eps 6 --mode unicomp"), 0);
}

TEST_F(CliTest, ValidateReportsDivergenceForCorruptedEngine) {
  const auto input = generate(3000, 2, 6, "in.csv");
  ValidateOptions v;
  v.input = input;
  v.eps = 2.0;
  v.perturb_eps = 0.05;
  std::ostringstream out;
  EXPECT_EQ(cmd_validate(v, out), 1);
  EXPECT_EQ(out.str().substr(0, 4), "FAIL");
  EXPECT_NE(out.str().find("first divergence at position"), std::string::npos) << out.str();
  EXPECT_EQ(run_cli("validate --input " + input.string() + " --dims 2 --eps 2 --perturb-eps -0.05"), 1);
}

TEST_F(CliTest, ValidateSinglePoint) {
  const auto input = path("one.csv");
  std::ofstream(input) << "1.5,2.5\n";
  ValidateOptions v;
  v.input = input;
  v.eps = 1.0;
  std::ostringstream out;
  EXPECT_EQ(cmd_validate(v, out), 0);
  EXPECT_EQ(out.str(), "PASS engine_pairs=1 oracle_pairs=1\n");
}

TEST_F(CliTest, ValidateRefusesOversizeDataset) {
  const Dataset d = generate_uniform(100001, 2, 0, 100, 1);
  ValidateOptions v;
  v.eps = 1.0;
  EXPECT_THROW(validate(d, v), UsageError);
}

TEST(ComparePairsTest, ReportsExtraPairs) {
  const std::vector<ResultPair> a{{0, 0}, {0, 1}};
  const std::vector<ResultPair> b{{0, 0}};
  const Verdict v = compare_pairs(a, b);
  EXPECT_FALSE(v.pass);
  EXPECT_EQ(v.divergence, "first divergence at position 1: engine has extra pair (0,1)");
  EXPECT_TRUE(compare_pairs(a, a).pass);
}

TEST(BenchSpecTest, ParsesKeyValues) {
  const BenchSpec s = parse_bench_spec(
      "# sweep\nlabel = fig1\ndims = 2, 3,4\neps = 0.5,1\nmodes = baseline,unicomp\n"
      "trials = 3\ncount = 1000\nseed = 9\ncount_only = false\n");
  EXPECT_EQ(s.label, "fig1");
  EXPECT_EQ(s.dims, (std::vector<std::size_t>{2, 3, 4}));
  EXPECT_EQ(s.eps, (std::vector<double>{0.5, 1.0}));
  EXPECT_EQ(s.modes.size(), 2u);
  EXPECT_EQ(s.trials, 3u);
  EXPECT_EQ(s.count, 1000u);
  EXPECT_FALSE(s.count_only);
  EXPECT_THROW(parse_bench_spec("colour = blue\n"), UsageError);
  EXPECT_THROW(parse_bench_spec("trials = x\n"), UsageError);
  EXPECT_THROW(parse_bench_spec("modes = fast\n"), UsageError);
  EXPECT_THROW(parse_bench_spec("input = a.csv\ndims = 2,3\n"), UsageError);
}

TEST_F(CliTest, BenchSweepRowsAndRatios) {
  const auto spec_path = path("sweep.txt");
  std::ofstream(spec_path) << "label = desk\ncount = 20000\ndims = 2,3\neps = 2\n"
                              "modes = baseline,unicomp\ntrials = 3\nseed = 4\n";
  std::ostringstream out;
  ASSERT_EQ(cmd_bench(spec_path, out), 0);
  const auto lines = lines_of(out.str());
  ASSERT_EQ(lines.size(), 5u);
  EXPECT_EQ(lines[0], bench_header());
  double previous_mean = 1e300;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto f = fields_of(lines[i]);
    ASSERT_GE(f.size(), 17u);
    EXPECT_EQ(f[14], "3");
    EXPECT_FALSE(f[15].empty());
    EXPECT_FALSE(f[16].empty());
    if (f[5] == "baseline") {
      EXPECT_EQ(f[15], "1.000000");
      const double mean = std::stod(f[12]);
      EXPECT_LT(mean, previous_mean);
      previous_mean = mean;
    } else {
      EXPECT_LT(std::stod(f[15]), 1.0);
    }
  }
}

TEST_F(CliTest, BenchRecordsFailuresInRow) {
  const auto spec_path = path("bad.txt");
  std::ofstream(spec_path) << "count = 100\ndims = 2,7\neps = 5\nmodes = baseline\ntrials = 1\n";
  std::ostringstream out;
  ASSERT_EQ(cmd_bench(spec_path, out), 0);
  const auto lines = lines_of(out.str());
  ASSERT_EQ(lines.size(), 3u);
  EXPECT_TRUE(lines[1].ends_with(","));
  EXPECT_NE(lines[2].find("outside supported range"), std::string::npos) << lines[2];
}

TEST(RunBenchTest, TrialTimesAreMeans) {
  BenchSpec spec;
  spec.count = 2000;
  spec.dims = {2};
  spec.eps = {3.0};
  spec.trials = 3;
  const auto rows = run_bench(spec);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].trials, 3u);
  EXPECT_TRUE(rows[0].error.empty());
  EXPECT_GE(rows[0].report.join_s, 0.0);
}

}  // namespace
}  // namespace simjoin::cli
