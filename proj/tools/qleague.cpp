#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string_view>
#include <utility>

#include "cli/commands.hpp"
#include "cli/run_config.hpp"
#include "qleague/config.hpp"
#include "qleague/error.hpp"
#include "qleague/version.hpp"

namespace {

struct Overrides {
  std::optional<std::string> config;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
  std::optional<long> two_n;
  std::optional<double> s;
  std::optional<long> replicas;
  std::optional<std::string> mode;
  std::optional<std::string> calendar;
  std::optional<double> tol;
  std::optional<std::string> output;
  std::optional<std::string> env_in;
  std::optional<std::string> env_out;
  std::optional<std::string> calendar_out;
  std::optional<std::string> win;
  std::optional<std::string> mu;
  std::optional<std::string> process;
  std::optional<std::string> data;
  std::optional<long> matches_per_team;
  std::optional<double> points_per_win;
  std::optional<std::string> params_out;
  std::optional<long> max_lag;
  bool print_config = false;
};

void add_flags(CLI::App& sub, Overrides& o) {
  sub.add_option("-c,--config", o.config, "Config file (TOML)");
  sub.add_option("--seed", o.seed, "Master seed");
  sub.add_option("--threads", o.threads, "Worker thread cap");
  sub.add_option("--two-n", o.two_n, "Number of teams 2n");
  sub.add_option("--s", o.s, "Focal strength");
  sub.add_option("--replicas", o.replicas, "Replica count");
  sub.add_option("--mode", o.mode, "focal or full");
  sub.add_option("--calendar", o.calendar, "circle or canonical");
  sub.add_option("--tol", o.tol, "Quadrature tolerance");
  sub.add_option("-o,--output", o.output, "Output CSV");
  sub.add_option("--env-in", o.env_in, "Import frozen strengths (team_index,strength)");
  sub.add_option("--env-out", o.env_out, "Export frozen strengths");
  sub.add_option("--calendar-out", o.calendar_out, "Export the calendar");
  sub.add_option("--win", o.win, "Win function inline table");
  sub.add_option("--mu", o.mu, "Strength measure inline table");
  sub.add_option("--process", o.process, "Tilting process inline table");
  sub.add_option("--data", o.data, "Ranking CSV with a mean_points column");
  sub.add_option("--matches-per-team", o.matches_per_team, "Matches per team in the data");
  sub.add_option("--points-per-win", o.points_per_win, "Points awarded per win");
  sub.add_option("--params-out", o.params_out, "Fitted-parameter block output");
  sub.add_option("--max-lag", o.max_lag, "Largest lag for mixing tables");
  sub.add_flag("--print-config", o.print_config, "Print the resolved config and exit");
}

constexpr std::pair<std::string_view, std::string_view> kDescriptions[] = {
    {"simulate", "Play replicas of a quenched league and write win counts"},
    {"analytic-curve", "Tabulate ell, sigma2 and rho2 over a grid of focal strengths"},
    {"validate-lln", "Compare mean win fractions with ell(s)"},
    {"validate-clt", "KS and variance check of standardized focal wins"},
    {"validate-gsum", "KS and variance check of a tilting-kernel sum"},
    {"ranking", "Simulated ranking curve against ell of the strength quantiles"},
    {"mixing", "Exact alpha coefficients and tail bounds per lag"},
    {"blocks", "Block-size conditions on a grid of league sizes"},
    {"calibrate", "Fit f, mu and nu to an observed ranking"},
    {"appendix-check", "Uniform deviation of shifted sums of an i.i.d. sample"},
};

template <class T, class U>
void override_with(const std::optional<T>& flag, U& field) {
  if (flag) field = *flag;
}

}  // namespace

int main(int argc, char** argv) {
  using namespace qleague;
  CLI::App app{"Quenched league simulator, limit-theory calculator and calibrator"};
  app.set_version_flag("--version", std::string("qleague ") + kVersion + " (" + kBuildInfo + ")");
  app.require_subcommand(1);
  Overrides o;
  for (auto [cmd, text] : kDescriptions) add_flags(*app.add_subcommand(std::string(cmd), std::string(text)), o);
  CLI11_PARSE(app, argc, argv);

  cli::RunConfig config;
  try {
    if (o.config) config = cli::load_run_config(*o.config);
    config.command = app.get_subcommands().front()->get_name();
    override_with(o.seed, config.seed);
    override_with(o.threads, config.threads);
    override_with(o.two_n, config.two_n);
    override_with(o.s, config.s);
    override_with(o.replicas, config.replicas);
    override_with(o.mode, config.mode);
    override_with(o.calendar, config.calendar);
    override_with(o.tol, config.tol);
    override_with(o.output, config.output);
    override_with(o.env_out, config.env_out);
    override_with(o.calendar_out, config.calendar_out);
    override_with(o.matches_per_team, config.matches_per_team);
    override_with(o.points_per_win, config.points_per_win);
    override_with(o.params_out, config.params_out);
    override_with(o.max_lag, config.max_lag);
    if (o.env_in) config.env_in = std::filesystem::absolute(*o.env_in).lexically_normal().string();
    if (o.data) config.data = std::filesystem::absolute(*o.data).lexically_normal().string();
    if (o.win) config.win = qleague::config::parse_win(*o.win);
    if (o.mu) config.mu = qleague::config::parse_measure(*o.mu);
    if (o.process) config.process = qleague::config::parse_process(*o.process);
    if (config.threads == 0) throw ConfigError("threads must be >= 1");
  } catch (const InvalidArgument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return cli::kConfigError;
  }
  if (o.print_config) {
    std::cout << cli::to_text(config);
    return cli::kPass;
  }
  return cli::run(config, std::cout, std::cerr);
}
