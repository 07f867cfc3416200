#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <sstream>
#include <sys/wait.h>

#include "cli/commands.hpp"
#include "cli/run_config.hpp"
#include "qleague/csv.hpp"
#include "qleague/error.hpp"

using namespace qleague;
namespace fs = std::filesystem;

namespace {

const fs::path kData = QLEAGUE_TEST_DATA;

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "qleague_cli_test";
  fs::create_directories(dir);
  fs::remove(dir / name);
  return dir / name;
}

int shell(const std::string& args) {
  const std::string cmd = std::string("\"") + QLEAGUE_CLI + "\" " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST(RunConfig, TextRoundTrip) {
  for (const char* name : {"example_clt.toml", "basketball.toml", "ranking.toml"}) {
    const cli::RunConfig c = cli::load_run_config(kData / name);
    EXPECT_EQ(cli::parse_run_config(cli::to_text(c)), c) << name;
  }
}

TEST(RunConfig, ParsesSections) {
  const cli::RunConfig c = cli::load_run_config(kData / "example_clt.toml");
  EXPECT_EQ(c.command, "validate-clt");
  EXPECT_EQ(c.seed, 202u);
  EXPECT_EQ(c.two_n, 2000);
  EXPECT_EQ(c.replicas, 5000);
  EXPECT_DOUBLE_EQ(c.s, 0.5);
  EXPECT_EQ(c.process, TiltingProcess(MarkovTilting::two_state(0.5, 2.0, 0.4, 0.4)));
  const cli::RunConfig b = cli::load_run_config(kData / "basketball.toml");
  EXPECT_EQ(fs::path(b.data), kData / "basketball.csv");
}

TEST(RunConfig, UnknownKeySuggests) {
  try {
    cli::parse_run_config("command = \"simulate\"\n[run]\nreplica = 3\n");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("did you mean 'run.replicas'"), std::string::npos) << e.what();
  }
  EXPECT_THROW(cli::parse_run_config("[bogus]\nx = 1\n"), ConfigError);
}

TEST(RunConfig, ValidateNamesField) {
  cli::RunConfig c;
  c.seed = 1;
  c.two_n = 7;
  try {
    cli::validate(c);
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("run.two_n"), std::string::npos) << e.what();
  }
  c.two_n = 10;
  c.seed.reset();
  EXPECT_THROW(cli::validate(c), ConfigError);
  c.command = "analytic-curve";
  EXPECT_NO_THROW(cli::validate(c));
  c.command = "nonsense";
  EXPECT_THROW(cli::validate(c), ConfigError);
}

TEST(Run, OddTwoNIsConfigError) {
  cli::RunConfig c;
  c.seed = 1;
  c.two_n = 7;
  std::ostringstream out, err;
  EXPECT_EQ(cli::run(c, out, err), cli::kConfigError);
  EXPECT_NE(err.str().find("two_n"), std::string::npos);
}

TEST(Run, AnalyticCurve) {
  cli::RunConfig c;
  c.command = "analytic-curve";
  c.output = scratch("curve.csv").string();
  std::ostringstream out, err;
  ASSERT_EQ(cli::run(c, out, err), cli::kPass) << err.str();
  const std::vector<csv::Row> rows = csv::read(c.output);
  ASSERT_EQ(rows.size(), 21u);
  EXPECT_EQ(csv::join(rows[0]), "s,ell,sigma2,rho2,total_var,trunc_bound");
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const double ell = std::stod(rows[i][1]);
    EXPECT_GE(ell, 0.0);
    EXPECT_LE(ell, 1.0);
  }
  EXPECT_FALSE(fs::exists(c.output + ".tmp"));
}

TEST(Run, SimulateWritesReplicas) {
  cli::RunConfig c;
  c.seed = 5;
  c.two_n = 20;
  c.replicas = 7;
  c.output = scratch("sim.csv").string();
  std::ostringstream out, err;
  ASSERT_EQ(cli::run(c, out, err), cli::kPass) << err.str();
  const std::vector<csv::Row> rows = csv::read(c.output);
  ASSERT_EQ(rows.size(), 8u);
  EXPECT_EQ(csv::join(rows[0]), "replica,wins");
  std::ostringstream out2, err2;
  const std::string first = csv::join(rows[3]);
  ASSERT_EQ(cli::run(c, out2, err2), cli::kPass);
  EXPECT_EQ(csv::join(csv::read(c.output)[3]), first);
}

TEST(Run, Calibrate) {
  cli::RunConfig c = cli::load_run_config(kData / "basketball.toml");
  c.multistart = 2;
  c.max_evals = 300;
  c.output = scratch("fit.csv").string();
  c.params_out = scratch("fit.toml").string();
  std::ostringstream out, err;
  EXPECT_EQ(cli::run(c, out, err), cli::kPass) << err.str();
  EXPECT_EQ(csv::read(c.output).size(), 17u);
  EXPECT_TRUE(fs::exists(c.params_out));
}

TEST(Binary, ExitCodes) {
  EXPECT_EQ(shell("--version"), 0);
  EXPECT_EQ(shell("simulate --seed 1 --two-n 7"), 2);
  EXPECT_EQ(shell("simulate --two-n 8"), 2);
  EXPECT_EQ(shell("analytic-curve -o " + scratch("bin_curve.csv").string()), 0);
  EXPECT_EQ(shell("simulate -c " + (kData / "missing.toml").string()), 2);
}
