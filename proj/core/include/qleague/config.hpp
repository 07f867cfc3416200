#pragma once

// Model objects from inline-table config text such as
//   {kind="uniform", lo=0.0, hi=1.0}
// and back. Relative paths resolve against `base_dir`.

#include <filesystem>
#include <span>
#include <string>
#include <string_view>

#include "qleague/match_model.hpp"
#include "qleague/measures.hpp"
#include "qleague/processes.hpp"

namespace qleague::config {

Measure parse_measure(std::string_view text, const std::filesystem::path& base_dir = {});
TiltingProcess parse_process(std::string_view text, const std::filesystem::path& base_dir = {});
WinFunction parse_win(std::string_view text, const std::filesystem::path& base_dir = {});

/// Canonical inline tables; file-backed objects are written out inline, so
/// the result never references a path.
std::string to_text(const Measure& m);
std::string to_text(const TiltingProcess& p);
std::string to_text(const WinFunction& w);

/// Valid key with the smallest edit distance to `key` (empty if none given).
std::string nearest_key(std::string_view key, std::span<const std::string_view> valid);

}  // namespace qleague::config
