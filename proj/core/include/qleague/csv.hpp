#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "qleague/match_model.hpp"

namespace qleague::csv {

using Row = std::vector<std::string>;

/// Comma-separated rows with surrounding whitespace trimmed; blank lines and
/// lines starting with '#' are skipped.
std::vector<Row> read(const std::filesystem::path& path);

/// Numeric column `name` (or the only column when `name` is empty). A first
/// row that does not parse as a number is treated as a header.
std::vector<double> read_column(const std::filesystem::path& path, std::string_view name = {});

/// Grid CSV for WinFunction::table: the header row holds the y-values after
/// an ignored corner cell; every further row is x followed by f(x, y_j).
WinFunction read_table(const std::filesystem::path& path);

/// Shortest form that parses back to the same double.
std::string format(double value);

std::string join(const Row& cells);

/// Collects the file in memory, then writes `path.tmp` and renames it over
/// `path` on commit(). Nothing is left at `path` if commit() is never reached.
class AtomicWriter {
 public:
  explicit AtomicWriter(std::filesystem::path path);
  AtomicWriter(const AtomicWriter&) = delete;
  AtomicWriter& operator=(const AtomicWriter&) = delete;
  ~AtomicWriter();

  void row(const Row& cells);
  void line(std::string_view text);
  void commit();

 private:
  std::filesystem::path path_;
  std::string buffer_;
  bool committed_ = false;
};

void write_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace qleague::csv
