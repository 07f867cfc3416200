#include "qleague/csv.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <system_error>

#include "qleague/error.hpp"

namespace qleague::csv {
namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

bool parse_double(const std::string& s, double& out) {
  if (s.empty()) return false;
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc() && ptr == end;
}

double require_double(const std::string& s, const std::filesystem::path& path, std::size_t line) {
  double v = 0.0;
  if (!parse_double(s, v))
    throw ConfigError(path.string() + ":" + std::to_string(line) + ": not a number: '" + s + "'");
  return v;
}

}  // namespace

std::vector<Row> read(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open CSV file " + path.string());
  std::vector<Row> rows;
  std::string line;
  while (std::getline(in, line)) {
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    Row row;
    std::size_t start = 0;
    while (true) {
      const auto comma = t.find(',', start);
      row.push_back(trim(std::string_view(t).substr(start, comma - start)));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<double> read_column(const std::filesystem::path& path, std::string_view name) {
  const auto rows = read(path);
  if (rows.empty()) throw ConfigError("CSV file " + path.string() + " is empty");
  double probe = 0.0;
  const bool has_header = !parse_double(rows.front().front(), probe);
  std::size_t col = 0;
  if (!name.empty()) {
    if (!has_header) throw ConfigError("CSV file " + path.string() + " has no header");
    const Row& header = rows.front();
    col = header.size();
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) col = i;
    if (col == header.size())
      throw ConfigError("CSV file " + path.string() + " has no column '" + std::string(name) + "'");
  } else if (rows.front().size() != 1) {
    throw ConfigError("CSV file " + path.string() + " must have a single column");
  }
  std::vector<double> out;
  for (std::size_t r = has_header ? 1 : 0; r < rows.size(); ++r) {
    if (col >= rows[r].size())
      throw ConfigError(path.string() + ":" + std::to_string(r + 1) + ": missing column");
    out.push_back(require_double(rows[r][col], path, r + 1));
  }
  if (out.empty()) throw ConfigError("CSV file " + path.string() + " has no data rows");
  return out;
}

WinFunction read_table(const std::filesystem::path& path) {
  const auto rows = read(path);
  if (rows.size() < 2) throw ConfigError("table CSV " + path.string() + " needs a header and data");
  std::vector<double> ys;
  for (std::size_t j = 1; j < rows[0].size(); ++j) ys.push_back(require_double(rows[0][j], path, 1));
  std::vector<double> xs;
  std::vector<std::vector<double>> values;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (rows[r].size() != ys.size() + 1)
      throw ConfigError(path.string() + ":" + std::to_string(r + 1) + ": wrong number of cells");
    xs.push_back(require_double(rows[r][0], path, r + 1));
    std::vector<double> row;
    for (std::size_t j = 1; j < rows[r].size(); ++j) row.push_back(require_double(rows[r][j], path, r + 1));
    values.push_back(std::move(row));
  }
  return WinFunction::table(std::move(xs), std::move(ys), std::move(values));
}

std::string format(double value) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  (void)ec;
  return std::string(buf, ptr);
}

std::string join(const Row& cells) {
  std::string out;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out += ',';
    out += cells[i];
  }
  return out;
}

AtomicWriter::AtomicWriter(std::filesystem::path path) : path_(std::move(path)) {}

AtomicWriter::~AtomicWriter() = default;

void AtomicWriter::row(const Row& cells) {
  buffer_ += join(cells);
  buffer_ += '\n';
}

void AtomicWriter::line(std::string_view text) {
  buffer_ += text;
  buffer_ += '\n';
}

void AtomicWriter::commit() {
  if (committed_) return;
  write_atomic(path_, buffer_);
  committed_ = true;
}

void write_atomic(const std::filesystem::path& path, std::string_view content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open " + tmp.string() + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) {
      out.close();
      std::filesystem::remove(tmp);
      throw Error("failed writing " + tmp.string());
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw Error("cannot rename " + tmp.string() + " to " + path.string() + ": " + ec.message());
  }
}

}  // namespace qleague::csv
