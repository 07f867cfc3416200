#include "qleague/config.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#define TOML_EXCEPTIONS 1
#include <toml.hpp>

#include "qleague/csv.hpp"
#include "qleague/error.hpp"

namespace qleague::config {
namespace {

using Keys = std::initializer_list<std::string_view>;

std::size_t edit_distance(std::string_view a, std::string_view b) {
  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  std::iota(prev.begin(), prev.end(), 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j)
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (a[i - 1] != b[j - 1])});
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

// Wraps a bare inline table so it parses as a document.
toml::table parse_table(std::string_view text, std::string_view what) {
  const auto first = text.find_first_not_of(" \t\r\n");
  try {
    if (first != std::string_view::npos && text[first] == '{') {
      std::string doc = "v = ";
      doc += text;
      toml::table root = toml::parse(doc);
      if (auto* t = root["v"].as_table()) return std::move(*t);
      throw ConfigError(std::string(what) + ": expected an inline table");
    }
    return toml::parse(text);
  } catch (const toml::parse_error& e) {
    throw ConfigError(std::string(what) + ": " + std::string(e.description()));
  }
}

void check_keys(const toml::table& t, Keys valid, std::string_view what) {
  const std::vector<std::string_view> list(valid);
  for (const auto& [key, node] : t) {
    (void)node;
    if (std::find(list.begin(), list.end(), key.str()) != list.end()) continue;
    std::string msg = std::string(what) + ": unknown key '" + std::string(key.str()) + "'";
    const std::string near = nearest_key(key.str(), list);
    if (!near.empty()) msg += " (did you mean '" + near + "'?)";
    throw ConfigError(msg);
  }
}

std::string get_kind(const toml::table& t, std::string_view what) {
  auto kind = t["kind"].value<std::string>();
  if (!kind) throw ConfigError(std::string(what) + ": missing string field 'kind'");
  return *kind;
}

double get_number(const toml::node* node, std::string_view what, std::string_view key) {
  if (node) {
    if (auto v = node->value<double>()) return *v;
  }
  throw ConfigError(std::string(what) + ": field '" + std::string(key) + "' must be a number");
}

double require(const toml::table& t, std::string_view key, std::string_view what) {
  const toml::node* node = t.get(key);
  if (!node) throw ConfigError(std::string(what) + ": missing field '" + std::string(key) + "'");
  return get_number(node, what, key);
}

std::vector<double> number_array(const toml::node* node, std::string_view what, std::string_view key) {
  const toml::array* arr = node ? node->as_array() : nullptr;
  if (!arr) throw ConfigError(std::string(what) + ": field '" + std::string(key) + "' must be an array");
  std::vector<double> out;
  for (const auto& el : *arr) out.push_back(get_number(&el, what, key));
  return out;
}

std::vector<std::vector<double>> number_matrix(const toml::node* node, std::string_view what,
                                               std::string_view key) {
  const toml::array* arr = node ? node->as_array() : nullptr;
  if (!arr) throw ConfigError(std::string(what) + ": field '" + std::string(key) + "' must be an array of arrays");
  std::vector<std::vector<double>> out;
  for (const auto& el : *arr) out.push_back(number_array(&el, what, key));
  return out;
}

std::filesystem::path resolve(const toml::table& t, const std::filesystem::path& base,
                              std::string_view what) {
  auto path = t["path"].value<std::string>();
  if (!path) throw ConfigError(std::string(what) + ": missing string field 'path'");
  std::filesystem::path p(*path);
  if (p.is_relative() && !base.empty()) p = base / p;
  if (!std::filesystem::exists(p))
    throw ConfigError(std::string(what) + ": file not found: " + p.string());
  return p;
}

// Rethrows construction failures as configuration errors carrying context.
template <class F>
auto build(std::string_view what, F&& f) {
  try {
    return f();
  } catch (const ConfigError&) {
    throw;
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string(what) + ": " + e.what());
  }
}

Measure measure_from(const toml::table& t, const std::filesystem::path& base, std::string_view what) {
  const std::string kind = get_kind(t, what);
  if (kind == "discrete") {
    check_keys(t, {"kind", "atoms", "normalize"}, what);
    const auto pairs = number_matrix(t.get("atoms"), what, "atoms");
    std::vector<Atom> atoms;
    for (const auto& p : pairs) {
      if (p.size() != 2) throw ConfigError(std::string(what) + ": each atom must be [value, weight]");
      atoms.push_back({p[0], p[1]});
    }
    const bool normalize = t["normalize"].value_or(false);
    return build(what, [&] {
      return normalize ? Measure::discrete_normalized(atoms) : Measure::discrete(atoms);
    });
  }
  if (kind == "uniform") {
    check_keys(t, {"kind", "lo", "hi"}, what);
    const double lo = require(t, "lo", what);
    const double hi = require(t, "hi", what);
    return build(what, [&] { return Measure::uniform(lo, hi); });
  }
  if (kind == "empirical") {
    check_keys(t, {"kind", "path", "samples"}, what);
    if (t.contains("samples")) {
      auto samples = number_array(t.get("samples"), what, "samples");
      return build(what, [&] { return Measure::empirical(samples); });
    }
    const auto path = resolve(t, base, what);
    return build(what, [&] { return Measure::empirical(csv::read_column(path)); });
  }
  throw ConfigError(std::string(what) + ": unknown measure kind '" + kind +
                    "' (expected discrete, uniform or empirical)");
}

TiltingProcess process_from(const toml::table& t, const std::filesystem::path& base,
                            std::string_view what) {
  const std::string kind = get_kind(t, what);
  if (kind == "markov2") {
    check_keys(t, {"kind", "a", "b", "pa", "pb"}, what);
    const double a = require(t, "a", what), b = require(t, "b", what);
    const double pa = require(t, "pa", what), pb = require(t, "pb", what);
    return build(what, [&] { return TiltingProcess(MarkovTilting::two_state(a, b, pa, pb)); });
  }
  if (kind == "markov") {
    check_keys(t, {"kind", "states", "rows"}, what);
    const auto states = number_array(t.get("states"), what, "states");
    const auto rows = number_matrix(t.get("rows"), what, "rows");
    if (rows.size() != states.size())
      throw ConfigError(std::string(what) + ": 'rows' must have one row per state");
    Eigen::MatrixXd p(states.size(), states.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].size() != states.size())
        throw ConfigError(std::string(what) + ": transition row " + std::to_string(i) + " has the wrong length");
      for (std::size_t j = 0; j < rows[i].size(); ++j)
        p(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    }
    return build(what, [&] { return TiltingProcess(MarkovTilting(states, p)); });
  }
  if (kind == "iid") {
    check_keys(t, {"kind", "marginal"}, what);
    const toml::table* m = t["marginal"].as_table();
    if (!m) throw ConfigError(std::string(what) + ": 'marginal' must be a measure table");
    return TiltingProcess(IIDTilting{measure_from(*m, base, std::string(what) + ".marginal")});
  }
  throw ConfigError(std::string(what) + ": unknown process kind '" + kind +
                    "' (expected markov2, markov or iid)");
}

WinFunction win_from(const toml::table& t, const std::filesystem::path& base, std::string_view what) {
  const std::string kind = get_kind(t, what);
  if (kind == "ratio") {
    check_keys(t, {"kind"}, what);
    return WinFunction::ratio();
  }
  if (kind == "const_half") {
    check_keys(t, {"kind"}, what);
    return WinFunction::const_half();
  }
  if (kind == "transformed_ratio") {
    check_keys(t, {"kind", "c1", "c2"}, what);
    const double c1 = require(t, "c1", what), c2 = require(t, "c2", what);
    return build(what, [&] { return WinFunction::transformed_ratio(c1, c2); });
  }
  if (kind == "table") {
    check_keys(t, {"kind", "path", "xs", "ys", "values"}, what);
    if (t.contains("values")) {
      auto xs = number_array(t.get("xs"), what, "xs");
      auto ys = number_array(t.get("ys"), what, "ys");
      auto values = number_matrix(t.get("values"), what, "values");
      return build(what, [&] { return WinFunction::table(xs, ys, values); });
    }
    const auto path = resolve(t, base, what);
    return build(what, [&] { return csv::read_table(path); });
  }
  throw ConfigError(std::string(what) + ": unknown win function kind '" + kind +
                    "' (expected ratio, transformed_ratio, const_half or table)");
}

std::string array_text(std::span<const double> v) {
  std::string out = "[";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    out += csv::format(v[i]);
  }
  return out + "]";
}

}  // namespace

std::string nearest_key(std::string_view key, std::span<const std::string_view> valid) {
  std::string best;
  std::size_t best_d = std::string::npos;
  for (std::string_view v : valid) {
    const std::size_t d = edit_distance(key, v);
    if (d < best_d) {
      best_d = d;
      best = std::string(v);
    }
  }
  return best;
}

Measure parse_measure(std::string_view text, const std::filesystem::path& base_dir) {
  return measure_from(parse_table(text, "measure"), base_dir, "measure");
}

TiltingProcess parse_process(std::string_view text, const std::filesystem::path& base_dir) {
  return process_from(parse_table(text, "process"), base_dir, "process");
}

WinFunction parse_win(std::string_view text, const std::filesystem::path& base_dir) {
  return win_from(parse_table(text, "win"), base_dir, "win");
}

std::string to_text(const Measure& m) {
  switch (m.kind()) {
    case Measure::Kind::uniform:
      return "{kind=\"uniform\", lo=" + csv::format(m.lo()) + ", hi=" + csv::format(m.hi()) + "}";
    case Measure::Kind::empirical:
      return "{kind=\"empirical\", samples=" + array_text(m.samples()) + "}";
    case Measure::Kind::discrete: {
      std::string out = "{kind=\"discrete\", atoms=[";
      const auto atoms = m.atoms();
      for (std::size_t i = 0; i < atoms.size(); ++i) {
        if (i) out += ", ";
        out += "[" + csv::format(atoms[i].value) + ", " + csv::format(atoms[i].weight) + "]";
      }
      return out + "]}";
    }
  }
  return {};
}

std::string to_text(const TiltingProcess& p) {
  if (const IIDTilting* iid = p.iid()) return "{kind=\"iid\", marginal=" + to_text(iid->marginal) + "}";
  const MarkovTilting& chain = *p.markov();
  std::string out = "{kind=\"markov\", states=" + array_text(chain.states()) + ", rows=[";
  const Eigen::MatrixXd& t = chain.transition();
  for (Eigen::Index i = 0; i < t.rows(); ++i) {
    if (i) out += ", ";
    std::vector<double> row(t.cols());
    for (Eigen::Index j = 0; j < t.cols(); ++j) row[static_cast<std::size_t>(j)] = t(i, j);
    out += array_text(row);
  }
  return out + "]}";
}

std::string to_text(const WinFunction& w) {
  switch (w.kind()) {
    case WinFunction::Kind::ratio: return "{kind=\"ratio\"}";
    case WinFunction::Kind::const_half: return "{kind=\"const_half\"}";
    case WinFunction::Kind::transformed_ratio:
      return "{kind=\"transformed_ratio\", c1=" + csv::format(w.c1()) + ", c2=" + csv::format(w.c2()) + "}";
    case WinFunction::Kind::table: {
      std::string out = "{kind=\"table\", xs=" + array_text(w.table_xs()) +
                        ", ys=" + array_text(w.table_ys()) + ", values=[";
      for (std::size_t i = 0; i < w.table_values().size(); ++i) {
        if (i) out += ", ";
        out += array_text(w.table_values()[i]);
      }
      return out + "]}";
    }
  }
  return {};
}

}  // namespace qleague::config
