#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>
#include <json.hpp>

#include "cli.hpp"

namespace annulus::cli {
namespace {

namespace fs = std::filesystem;

struct Result {
  int code = 0;
  std::string out;
  std::string err;
};

Result run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "annulus");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = main_entry(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::vector<json> json_lines(const std::string& s) {
  std::vector<json> v;
  std::istringstream in(s);
  for (std::string line; std::getline(in, line);) {
    if (!line.empty()) v.push_back(json::parse(line));
  }
  return v;
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("annulus_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string write(const std::string& name, const std::string& body) {
    const fs::path p = dir_ / name;
    std::ofstream(p) << body;
    return p.string();
  }

  std::string read(const std::string& path) {
    std::ifstream in(path);
    return {std::istreambuf_iterator<char>(in), {}};
  }

  fs::path dir_;
};

const char* kSingular = R"({"dim": 2, "entries": [[[0,0],[1,0]],[[0,0],[0,0]]]})";
const char* kMisraT =
    R"({"dim": 2, "entries": [[[0.91,0],[0.171533982,0]],[[0,0],[0.91,0]]]})";

TEST_F(Cli, ClassifySingularIsBetaOut) {
  const std::string m = write("m.json", kSingular);
  const Result r = run_cli({"classify", "--matrix", m, "--r", "0.5", "--jsonl"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  bool saw = false;
  for (const auto& line : json_lines(r.out)) {
    if (line.value("class", "") == "C_beta") {
      saw = true;
      EXPECT_EQ(line["result"]["verdict"], "OUT");
    }
  }
  EXPECT_TRUE(saw);
}

TEST_F(Cli, ClassifyMisraReport) {
  const std::string m = write("m.json", kMisraT);
  const std::string out = (dir_ / "rep.json").string();
  const Result r = run_cli({"classify", "--matrix", m, "--r", "0.35", "--out", out});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const json rep = json::parse(read(out))["report"];
  EXPECT_EQ(rep["C_1r"]["verdict"], "IN");
  EXPECT_EQ(rep["C_alpha"]["verdict"], "OUT");
  EXPECT_EQ(rep["C_alpha*"]["verdict"], "OUT");
  EXPECT_TRUE(rep["chain_consistent"].get<bool>());
  EXPECT_FALSE(r.out.empty());
}

TEST_F(Cli, ReproduceMisraAnchor) {
  const Result r = run_cli({"reproduce", "misra", "--r", "0.35", "--w", "0.91", "--jsonl"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto recs = json_lines(r.out);
  ASSERT_EQ(recs.size(), 1u);
  EXPECT_TRUE(recs[0]["pass"].get<bool>());
  bool saw = false;
  for (const auto& c : recs[0]["checks"]) {
    if (c["name"] == "a_8_decimals") {
      saw = true;
      EXPECT_NEAR(c["computed"].get<double>(), 0.12129264, 5e-9);
    }
  }
  EXPECT_TRUE(saw);
}

TEST_F(Cli, ReproduceEg5Default) {
  const Result r = run_cli({"reproduce", "eg5", "--jsonl"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto recs = json_lines(r.out);
  ASSERT_EQ(recs.size(), 1u);
  EXPECT_NEAR(recs[0]["checks"][0]["computed"].get<double>(), -0.0625, 1e-12);
}

TEST_F(Cli, ReproduceAllAndFilter) {
  const Result all = run_cli({"reproduce", "all", "--jsonl"});
  ASSERT_EQ(all.code, kExitOk) << all.err;
  const auto recs = json_lines(all.out);
  EXPECT_EQ(recs.size(), 8u);
  for (const auto& rec : recs) EXPECT_TRUE(rec["pass"].get<bool>()) << rec.dump();
  const Result f = run_cli({"reproduce", "all", "--filter", "misra", "--jsonl"});
  ASSERT_EQ(f.code, kExitOk);
  const auto fr = json_lines(f.out);
  ASSERT_EQ(fr.size(), 2u);
  for (const auto& rec : fr) EXPECT_EQ(rec["example"], "misra");
}

TEST_F(Cli, ReproduceParameters) {
  const Result ok = run_cli({"reproduce", "misra", "--r", "0.52", "--w", "0.93", "--jsonl"});
  EXPECT_EQ(ok.code, kExitOk) << ok.err;
  // |lambda| >= r is outside the admissible centers.
  const Result bad = run_cli({"reproduce", "mobius", "--r", "0.5", "--lambda", "0.6,0"});
  EXPECT_EQ(bad.code, kExitUsage);
}

TEST_F(Cli, DeterministicOutputFile) {
  const std::string m = write("m.json", kMisraT);
  const std::string a = (dir_ / "a.json").string();
  const std::string b = (dir_ / "b.json").string();
  ASSERT_EQ(run_cli({"vn-search", "--matrix", m, "--r", "0.35", "--seed", "7", "--out", a}).code, kExitOk);
  ASSERT_EQ(run_cli({"vn-search", "--matrix", m, "--r", "0.35", "--seed", "7", "--out", b}).code, kExitOk);
  EXPECT_EQ(read(a), read(b));
  EXPECT_FALSE(read(a).empty());
}

TEST_F(Cli, VnSearchReportsLowerBound) {
  const std::string m = write("m.json", R"({"dim": 1, "entries": [[[0.7,0]]]})");
  const Result r = run_cli({"vn-search", "--matrix", m, "--r", "0.5", "--degree", "4", "--restarts",
                            "4", "--jsonl"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto recs = json_lines(r.out);
  ASSERT_EQ(recs.size(), 1u);
  EXPECT_LE(recs[0]["result"]["k_lower"].get<double>(), 1.0 + 1e-9);
}

TEST_F(Cli, MalformedMatrixNamesTheEntry) {
  const std::string m = write("m.json", R"({"dim": 2, "entries": [[[1,0],[0,0]],[["x",0],[1,0]]]})");
  const Result r = run_cli({"classify", "--matrix", m, "--r", "0.5"});
  EXPECT_EQ(r.code, kExitUsage);
  EXPECT_NE(r.err.find("row 1, column 0"), std::string::npos) << r.err;
}

TEST_F(Cli, UsageErrors) {
  const std::string m = write("m.json", kSingular);
  EXPECT_EQ(run_cli({}).code, kExitUsage);
  EXPECT_EQ(run_cli({"classify", "--matrix", m, "--r", "1.5"}).code, kExitUsage);
  EXPECT_EQ(run_cli({"classify", "--matrix", m}).code, kExitUsage);
  EXPECT_EQ(run_cli({"classify", "--matrix", (dir_ / "missing.json").string(), "--r", "0.5"}).code,
            kExitUsage);
  EXPECT_EQ(run_cli({"reproduce", "eg7"}).code, kExitUsage);
  EXPECT_EQ(run_cli({"decompose", "--matrix", m, "--r", "0.5", "--tol", "0"}).code, kExitUsage);
  EXPECT_EQ(run_cli({"variety", "classify-point", "--z", "0,0", "--r", "0.5"}).code, kExitUsage);
  EXPECT_EQ(run_cli({"variety", "classify-point", "--z", "abc", "--r", "0.5"}).code, kExitUsage);
}

TEST_F(Cli, DilateVerifyPassAndFail) {
  const std::string good = write("good.json", R"({
    "T": {"dim": 2, "entries": [[[0.5,0],[0,0]],[[0,0],[1,0]]]},
    "A": [[[0,0],[0,0]],[[0,0],[0,0]]],
    "B": {"dim": 2, "entries": [[[1,0],[0,0]],[[0,0],[0.5,0]]]}})");
  const Result ok = run_cli({"dilate-verify", "--data", good, "--r", "0.5", "--jsonl"});
  EXPECT_EQ(ok.code, kExitOk) << ok.err << ok.out;
  const std::string bad = write("bad.json", R"({
    "T": {"dim": 2, "entries": [[[0.5,0],[0,0]],[[0,0],[1,0]]]},
    "A": [[[0.001,0],[0,0]],[[0,0],[0,0]]],
    "B": {"dim": 2, "entries": [[[1,0],[0,0]],[[0,0],[0.5,0]]]}})");
  const Result no = run_cli({"dilate-verify", "--data", bad, "--r", "0.5", "--jsonl"});
  EXPECT_EQ(no.code, kExitCheckFailed) << no.err << no.out;
}

TEST_F(Cli, DecomposeAndVarietyPoint) {
  const std::string m = write("m.json", R"({"dim": 2, "entries": [[[0.5,0],[0,0]],[[0,0],[0.7,0]]]})");
  const Result d = run_cli({"decompose", "--matrix", m, "--r", "0.5", "--jsonl"});
  ASSERT_EQ(d.code, kExitOk) << d.err;
  EXPECT_EQ(json_lines(d.out).at(0)["unitary_rank"], 1);
  const Result v = run_cli({"variety", "classify-point", "--z", "1,0", "--r", "0.5", "--jsonl"});
  ASSERT_EQ(v.code, kExitOk) << v.err;
  EXPECT_EQ(json_lines(v.out).at(0)["class"], "DISTINGUISHED_BOUNDARY");
  const Result q =
      run_cli({"variety", "classify-point", "--z", "0.7,0", "--r", "0.5", "--quantum", "--jsonl"});
  ASSERT_EQ(q.code, kExitOk) << q.err;
  EXPECT_EQ(json_lines(q.out).at(0)["class"], "INTERIOR");
}

// Random byte corruptions of a valid matrix file never crash and never pass as input.
TEST_F(Cli, CorruptedInputsAreRejected) {
  std::mt19937_64 g(5);
  const std::string base = kSingular;
  const std::string junk = "[]{},:\"x-e9 ";
  int rejected = 0;
  for (int trial = 0; trial < 60; ++trial) {
    std::string s = base;
    const std::size_t pos = g() % s.size();
    s[pos] = junk[g() % junk.size()];
    const std::string m = write("c.json", s);
    const Result r = run_cli({"decompose", "--matrix", m, "--r", "0.5"});
    EXPECT_TRUE(r.code == kExitOk || r.code == kExitUsage || r.code == kExitCheckFailed);
    if (r.code == kExitUsage) {
      ++rejected;
      EXPECT_FALSE(r.err.empty());
    }
  }
  EXPECT_GT(rejected, 20);
}

#ifdef ANNULUS_CLI_PATH
TEST_F(Cli, BinaryExitCodes) {
  const std::string bin = ANNULUS_CLI_PATH;
  const auto status = [](const std::string& cmd) {
    const int s = std::system((cmd + " > /dev/null 2>&1").c_str());
    return WEXITSTATUS(s);
  };
  EXPECT_EQ(status(bin + " reproduce all"), kExitOk);
  EXPECT_EQ(status(bin + " classify --r 0.5"), kExitUsage);
}
#endif

}  // namespace
}  // namespace annulus::cli
