#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qleague/match_model.hpp"
#include "qleague/measures.hpp"
#include "qleague/processes.hpp"

namespace qleague::cli {

inline constexpr std::string_view kCommands[] = {
    "simulate", "analytic-curve", "validate-lln", "validate-clt", "validate-gsum",
    "ranking",  "mixing",         "blocks",       "calibrate",    "appendix-check"};

struct RunConfig {
  std::string command = "simulate";
  std::optional<std::uint64_t> seed;
  unsigned threads = 1;

  // [model]
  WinFunction win = WinFunction::ratio();
  Measure mu = Measure::uniform(0.0, 1.0);
  TiltingProcess process = MarkovTilting::two_state(0.5, 2.0, 0.5, 0.5);

  // [run]
  long two_n = 2000;
  double s = 1.0;
  long replicas = 200;
  std::string mode = "focal";
  std::string calendar = "circle";
  double tol = 1e-9;
  double var_tol = 0.1;
  /// validate-lln: allowed |mean(W/2n) - ell(s)|; ranking: allowed sup distance.
  double lln_tol = 0.02;
  double ranking_tol = 0.05;
  std::string output;
  std::string env_in;
  std::string env_out;
  std::string calendar_out;

  // [curve]
  double s_min = 0.05;
  double s_max = 1.0;
  double s_step = 0.05;

  // [gsum]
  double gsum_s = 0.5;

  // [mixing]
  long max_lag = 20;
  std::vector<long> block_grid = {100, 10000, 1000000, 100000000, 10000000000, 1000000000000};

  // [calibrate]
  std::string data;
  long matches_per_team = 30;
  double points_per_win = 2.0;
  std::vector<std::string> free_params = {"mu_lo", "mu_hi", "nu_logit_0"};
  long multistart = 6;
  long max_evals = 1500;
  std::string params_out;

  // [appendix]
  long appendix_two_n = 20000;
  long appendix_runs = 100;
  double delta = 0.01;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

/// Parses config text; input file paths resolve against `base_dir`.
RunConfig parse_run_config(std::string_view text, const std::filesystem::path& base_dir = {});
RunConfig load_run_config(const std::filesystem::path& path);

/// Throws ConfigError naming the offending field.
void validate(const RunConfig& config);

/// Canonical text that parses back to an equal RunConfig.
std::string to_text(const RunConfig& config);

bool needs_seed(std::string_view command);

}  // namespace qleague::cli
