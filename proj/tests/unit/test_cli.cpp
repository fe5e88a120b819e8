#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <nlohmann/json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>
#include <unistd.h>

#include "thermalscatter/io.hpp"
#include "thermalscatter/operators.hpp"
#include "thermalscatter_cli/cli.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "thermalscatter");
  std::ostringstream out, err;
  const int code = ts::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::size_t line_count(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("thermalscatter_cli_" + std::to_string(::getpid()) + "_" +
            ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir_);
    ::unsetenv("THERMALSCATTER_CONFIG");
  }
  void TearDown() override {
    ::unsetenv("THERMALSCATTER_CONFIG");
    fs::remove_all(dir_);
  }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  // A small grid keeps each command well under a second.
  std::vector<std::string> small(std::vector<std::string> rest) const {
    std::vector<std::string> a = {"--grid", "20:64", "--output-dir", dir_.string()};
    a.insert(a.end(), rest.begin(), rest.end());
    return a;
  }

  fs::path dir_;
};

}  // namespace

TEST_F(Cli, HelpAndUsageErrors) {
  const auto help = run({"--help"});
  EXPECT_EQ(help.code, ts::cli::exit_ok);
  EXPECT_NE(help.out.find("verify-bounds"), std::string::npos);

  const auto bogus = run({"--bogus"});
  EXPECT_EQ(bogus.code, ts::cli::exit_precondition);
  EXPECT_TRUE(bogus.out.empty());
  EXPECT_EQ(bogus.err.rfind("error: usage:", 0), 0u);
  EXPECT_EQ(line_count(bogus.err), 1u);

  EXPECT_EQ(run(small({"--set", "no.such.key=1", "verify-bounds"})).code, ts::cli::exit_precondition);
  EXPECT_EQ(run(small({"--set", "grid.n_per_side", "verify-bounds"})).code, ts::cli::exit_precondition);
  EXPECT_EQ(run({"--grid", "20", "verify-bounds"}).code, ts::cli::exit_precondition);
}

TEST_F(Cli, ProcessExitCodes) {
  const std::string exe = THERMALSCATTER_EXE;
  const std::string quiet = " > \"" + path("o.txt") + "\" 2> \"" + path("e.txt") + "\"";
  int status = std::system(("\"" + exe + "\" --bogus" + quiet).c_str());
  ASSERT_TRUE(WIFEXITED(status));
  EXPECT_EQ(WEXITSTATUS(status), 2);
  EXPECT_TRUE(slurp(path("o.txt")).empty());
  status = std::system(("\"" + exe + "\" specfun-eval --fn j0 --x 0" + quiet).c_str());
  ASSERT_TRUE(WIFEXITED(status));
  EXPECT_EQ(WEXITSTATUS(status), 0);
}

TEST_F(Cli, SpecfunEval) {
  const auto r = run({"specfun-eval", "--fn", "j0,ber", "--x", "0,1"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out.rfind("function,argument,value,est_error\n", 0), 0u);
  EXPECT_EQ(line_count(r.out), 5u);
  EXPECT_NE(r.out.find("j0,0,1,"), std::string::npos);

  const auto pole = run({"specfun-eval", "--fn", "ker", "--x", "0"});
  EXPECT_EQ(pole.code, ts::cli::exit_precondition);
  EXPECT_TRUE(pole.out.empty());
  EXPECT_EQ(pole.err.rfind("error: domain:", 0), 0u);
}

TEST_F(Cli, ConfigPrecedence) {
  std::ofstream(path("env.cfg")) << "# environment layer\ngrid.n_per_side = 24\nseed = 5\n";
  std::ofstream(path("file.cfg")) << "grid.n_per_side = 28\n";
  ::setenv("THERMALSCATTER_CONFIG", path("env.cfg").c_str(), 1);
  auto n_of = [&](std::vector<std::string> extra) {
    std::vector<std::string> a = {"--cutoff", "20", "--output-dir", dir_.string()};
    a.insert(a.end(), extra.begin(), extra.end());
    a.insert(a.end(), {"verify-bounds", "--seeds", "1", "--checks", "l1"});
    const auto r = run(a);
    EXPECT_EQ(r.code, 0) << r.err;
    const json j = json::parse(r.out);
    EXPECT_EQ(j["config"]["seed"], 5);
    return j["config"]["grid"]["n_per_side"].get<int>();
  };
  EXPECT_EQ(n_of({}), 24);
  EXPECT_EQ(n_of({"--config", path("file.cfg")}), 28);
  EXPECT_EQ(n_of({"--config", path("file.cfg"), "--n-per-side", "32"}), 32);
  EXPECT_EQ(n_of({"--config", path("file.cfg"), "--n-per-side", "32", "--set", "grid.n_per_side=36"}), 36);

  std::ofstream(path("bad.cfg")) << "grid.n_per_side 24\n";
  EXPECT_EQ(run(small({"--config", path("bad.cfg"), "verify-bounds"})).code, ts::cli::exit_precondition);
}

TEST_F(Cli, VerifyBoundsOnThreeSeeds) {
  const auto r = run(small({"verify-bounds", "--seeds", "3"}));
  ASSERT_EQ(r.code, 0) << r.err;
  const json j = json::parse(r.out);
  EXPECT_EQ(j["schema"], "thermalscatter.report/1");
  EXPECT_EQ(j["command"], "verify-bounds");
  ASSERT_EQ(j["checks"].size(), 4u);
  for (const auto& c : j["checks"]) {
    EXPECT_EQ(c["pass_count"], 3) << c["check"];
    EXPECT_GE(c["worst_margin"].get<double>(), 0.0) << c["check"];
  }
  const std::string csv = slurp(path("verify_bounds_samples.csv"));
  EXPECT_EQ(line_count(csv), 1u + 3u * 4u);
}

TEST_F(Cli, OutputIsDeterministic) {
  const auto a = run(small({"verify-bounds", "--seeds", "2"}));
  const auto b = run(small({"--threads", "3", "verify-bounds", "--seeds", "2"}));
  ASSERT_EQ(a.code, 0);
  ASSERT_EQ(b.code, 0);
  json ja = json::parse(a.out), jb = json::parse(b.out);
  ja["config"].erase("threads");
  jb["config"].erase("threads");
  EXPECT_EQ(ja, jb);
  EXPECT_EQ(run(small({"verify-bounds", "--seeds", "2"})).out, a.out);
}

TEST_F(Cli, ScatterRejectsSlowDecay) {
  const auto r = run(small({"scatter", "--w", "wr:r=0.2"}));
  EXPECT_EQ(r.code, ts::cli::exit_precondition);
  EXPECT_TRUE(r.out.empty());
  EXPECT_EQ(r.err.rfind("error: precondition:", 0), 0u);
}

TEST_F(Cli, KernelsDumpWritesEveryNodePair) {
  const auto r = run(small({"kernels-dump", "--which", "B", "--out", path("b.csv")}));
  ASSERT_EQ(r.code, 0) << r.err;
  const std::string csv = slurp(path("b.csv"));
  EXPECT_EQ(csv.rfind("x,y,re,im\n", 0), 0u);
  EXPECT_EQ(line_count(csv), 1u + 128u * 128u);
  EXPECT_EQ(run(small({"kernels-dump", "--which", "Q"})).code, ts::cli::exit_precondition);
}

TEST_F(Cli, EvolveRoundTripsThroughCsv) {
  const auto grid = ts::build_grid(20.0, 64);
  const auto f = ts::SampledFunction::sample(grid, [](double x) { return ts::cplx(std::exp(-(x - 2.0) * (x - 2.0)), 0.0); });
  ts::write_csv(path("in.csv"), f);
  const auto r = run(small({"evolve", "--w", "wr:r=1", "--t", "1", "--steps", "20", "--in", path("in.csv"), "--out",
                            path("out.csv")}));
  ASSERT_EQ(r.code, 0) << r.err;
  const auto g = ts::read_csv(path("out.csv"), grid);
  EXPECT_NEAR(ts::norm_l2(g), ts::norm_l2(f), 1e-10);
  const json j = json::parse(r.out);
  EXPECT_EQ(j["command"], "evolve");

  ts::write_csv(path("other.csv"), ts::SampledFunction(ts::build_grid(21.0, 64)));
  EXPECT_EQ(run(small({"evolve", "--t", "1", "--in", path("other.csv"), "--out", path("x.csv")})).code,
            ts::cli::exit_precondition);
}

TEST_F(Cli, HsNormAndKato) {
  const auto hs = run(small({"hs-norm", "--w", "wr:r=1", "--z", "i", "--no-refine"}));
  ASSERT_EQ(hs.code, 0) << hs.err;
  const json h = json::parse(hs.out);
  EXPECT_GT(h["norm_sq"].get<double>(), 0.0);
  EXPECT_EQ(run(small({"hs-norm", "--w", "wr:r=0.1"})).code, ts::cli::exit_precondition);

  const auto ka = run(small({"kato", "--v1", "gauss:amp=1,width=1,centre=0", "--eps", "1,0.1", "--samples", "3"}));
  ASSERT_EQ(ka.code, 0) << ka.err;
  const json k = json::parse(ka.out);
  ASSERT_EQ(k["bounds"].size(), 2u);
  for (const auto& b : k["bounds"]) EXPECT_EQ(b["violations"], 0);
}
