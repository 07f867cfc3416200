#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "qleague/config.hpp"
#include "qleague/csv.hpp"
#include "qleague/error.hpp"

using namespace qleague;
namespace fs = std::filesystem;

namespace {

const fs::path kData = QLEAGUE_TEST_DATA;

std::string error_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.what();
  }
  return {};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST(ConfigMeasure, Kinds) {
  EXPECT_EQ(config::parse_measure(R"({kind="uniform", lo=0.1, hi=0.9})"), Measure::uniform(0.1, 0.9));
  EXPECT_EQ(config::parse_measure(R"({kind="discrete", atoms=[[0.5, 0.25], [2.0, 0.75]]})"),
            Measure::discrete({{0.5, 0.25}, {2.0, 0.75}}));
  EXPECT_EQ(config::parse_measure(R"({kind="discrete", atoms=[[0.25, 0.6], [1.3, 0.9]], normalize=true})"),
            Measure::discrete_normalized({{0.25, 0.6}, {1.3, 0.9}}));
  EXPECT_EQ(config::parse_measure(R"({kind="empirical", samples=[3, 1, 2]})"),
            Measure::empirical({3, 1, 2}));
}

TEST(ConfigMeasure, EmpiricalFromFile) {
  const Measure m = config::parse_measure(R"({kind="empirical", path="samples.csv"})", kData);
  EXPECT_EQ(m, Measure::empirical({1, 2, 3}));
  EXPECT_DOUBLE_EQ(m.mean(), 2.0);
}

TEST(ConfigMeasure, RoundTrip) {
  for (const Measure& m : {Measure::uniform(0.0, 1.0), Measure::discrete_normalized({{0.25, 0.6}, {1.3, 0.9}}),
                           Measure::empirical({0.1, 0.7, 0.30000000000000004})})
    EXPECT_EQ(config::parse_measure(config::to_text(m)), m) << config::to_text(m);
}

TEST(ConfigMeasure, Errors) {
  EXPECT_NE(error_of([] { config::parse_measure(R"({kind="uniform", lo=0.0, hgh=1.0})"); }).find("did you mean 'hi'"),
            std::string::npos);
  EXPECT_THROW(config::parse_measure(R"({kind="gaussian"})"), ConfigError);
  EXPECT_THROW(config::parse_measure(R"({kind="uniform", lo=1.0, hi=0.0})"), ConfigError);
  EXPECT_THROW(config::parse_measure(R"({kind="discrete", atoms=[[1.0, 0.6]]})"), ConfigError);
  EXPECT_THROW(config::parse_measure(R"({kind="uniform", lo="a", hi=1.0})"), ConfigError);
  EXPECT_THROW(config::parse_measure("{kind="), ConfigError);
}

TEST(ConfigProcess, Kinds) {
  EXPECT_EQ(config::parse_process(R"({kind="markov2", a=0.5, b=2.0, pa=0.4, pb=0.3})"),
            TiltingProcess(MarkovTilting::two_state(0.5, 2.0, 0.4, 0.3)));
  Eigen::MatrixXd p(3, 3);
  p << 0.5, 0.25, 0.25, 0.1, 0.8, 0.1, 0.3, 0.3, 0.4;
  EXPECT_EQ(config::parse_process(R"({kind="markov", states=[0.5, 1, 2], rows=[[0.5, 0.25, 0.25], [0.1, 0.8, 0.1], [0.3, 0.3, 0.4]]})"),
            TiltingProcess(MarkovTilting({0.5, 1, 2}, p)));
  EXPECT_EQ(config::parse_process(R"({kind="iid", marginal={kind="uniform", lo=1, hi=2}})"),
            TiltingProcess(IIDTilting{Measure::uniform(1, 2)}));
}

TEST(ConfigProcess, RoundTripAndErrors) {
  for (const TiltingProcess& p : {TiltingProcess(MarkovTilting::two_state(0.5, 2.0, 0.92, 0.1)),
                                  TiltingProcess(IIDTilting{Measure::point(1.0)})})
    EXPECT_EQ(config::parse_process(config::to_text(p)), p) << config::to_text(p);
  EXPECT_THROW(config::parse_process(R"({kind="markov2", a=0.5, b=2.0, pa=1.4, pb=0.3})"), ConfigError);
  EXPECT_THROW(config::parse_process(R"({kind="markov", states=[1, 2], rows=[[0.5, 0.6], [0.5, 0.5]]})"), ConfigError);
}

TEST(ConfigWin, KindsAndTable) {
  EXPECT_EQ(config::parse_win(R"({kind="ratio"})"), WinFunction::ratio());
  EXPECT_EQ(config::parse_win(R"({kind="const_half"})"), WinFunction::const_half());
  EXPECT_EQ(config::parse_win(R"({kind="transformed_ratio", c1=1.3, c2=0.999})"),
            WinFunction::transformed_ratio(1.3, 0.999));
  const WinFunction t = config::parse_win(R"({kind="table", path="half_table.csv"})", kData);
  EXPECT_DOUBLE_EQ(t(1.0, 0.0), 0.75);
  EXPECT_DOUBLE_EQ(t(0.5, 0.5), 0.5);
  EXPECT_EQ(config::parse_win(config::to_text(t)), t);
  EXPECT_EQ(t, csv::read_table(kData / "half_table.csv"));
  EXPECT_THROW(config::parse_win(R"({kind="transformed_ratio", c1=1.3, c2=1.5})"), ConfigError);
  EXPECT_THROW(config::parse_win(R"({kind="table", path="missing.csv"})", kData), Error);
}

TEST(NearestKey, Suggestion) {
  const std::string_view keys[] = {"two_n", "replicas", "seed"};
  EXPECT_EQ(config::nearest_key("replica", keys), "replicas");
  EXPECT_EQ(config::nearest_key("tw_n", keys), "two_n");
  EXPECT_EQ(config::nearest_key("x", std::span<const std::string_view>{}), "");
}

TEST(Csv, ReadColumn) {
  EXPECT_EQ(csv::read_column(kData / "samples.csv", "x"), (std::vector<double>{1, 2, 3}));
  EXPECT_EQ(csv::read_column(kData / "samples.csv"), (std::vector<double>{1, 2, 3}));
  EXPECT_EQ(csv::read_column(kData / "basketball.csv", "mean_points").size(), 16u);
  EXPECT_THROW(csv::read_column(kData / "samples.csv", "y"), Error);
}

TEST(Csv, FormatRoundTrips) {
  for (double v : {0.1, 1.0 / 3.0, 1e-300, 12345.678, -0.0})
    EXPECT_EQ(std::stod(csv::format(v)), v);
  EXPECT_EQ(csv::format(0.5), "0.5");
  EXPECT_EQ(csv::join({"a", "b", "c"}), "a,b,c");
}

TEST(Csv, AtomicWrite) {
  const fs::path dir = fs::temp_directory_path() / "qleague_csv_test";
  fs::create_directories(dir);
  const fs::path p = dir / "out.csv";
  fs::remove(p);
  {
    csv::AtomicWriter w(p);
    w.row({"x", "y"});
    EXPECT_FALSE(fs::exists(p));
  }
  EXPECT_FALSE(fs::exists(p));
  {
    csv::AtomicWriter w(p);
    w.row({"x", "y"});
    w.row({"1", "2"});
    w.commit();
  }
  EXPECT_EQ(slurp(p), "x,y\n1,2\n");
  EXPECT_FALSE(fs::exists(dir / "out.csv.tmp"));
  csv::write_atomic(p, "z\n");
  EXPECT_EQ(slurp(p), "z\n");
  fs::remove_all(dir);
}
