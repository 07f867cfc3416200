#pragma once

#include <iosfwd>

#include "cli/run_config.hpp"

namespace qleague::cli {

enum ExitCode : int { kPass = 0, kStatFail = 1, kConfigError = 2, kRuntimeError = 3 };

/// Validates, dispatches and writes declared outputs. Summaries go to `out`,
/// errors to `err`.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

}  // namespace qleague::cli
