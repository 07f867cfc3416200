#include "cli/run_config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#define TOML_EXCEPTIONS 1
#include <toml.hpp>

#include "qleague/config.hpp"
#include "qleague/csv.hpp"
#include "qleague/error.hpp"

namespace qleague::cli {
namespace {

using config::nearest_key;

void check_keys(const toml::table& t, std::initializer_list<std::string_view> valid,
                const std::string& where) {
  const std::vector<std::string_view> list(valid);
  for (const auto& [key, node] : t) {
    (void)node;
    if (std::find(list.begin(), list.end(), key.str()) != list.end()) continue;
    std::string msg = "unknown key '" + where + std::string(key.str()) + "'";
    const std::string near = nearest_key(key.str(), list);
    if (!near.empty()) msg += " (did you mean '" + where + near + "'?)";
    throw ConfigError(msg);
  }
}

// Formats a node back to inline-table text for the model parsers.
std::string node_text(const toml::node& node) {
  const toml::table* t = node.as_table();
  if (!t) throw ConfigError("must be an inline table such as {kind=\"...\"}");
  toml::table copy = *t;
  copy.is_inline(true);
  std::ostringstream os;
  os << copy;
  return os.str();
}

class Section {
 public:
  Section(const toml::table* t, std::string name) : t_(t), name_(std::move(name)) {}

  template <class T>
  void get(std::string_view key, T& out) const {
    if (!t_) return;
    const toml::node* node = t_->get(key);
    if (!node) return;
    if constexpr (std::is_same_v<T, double>) {
      auto v = node->value<double>();
      if (!v) fail(key, "must be a number");
      out = *v;
    } else if constexpr (std::is_same_v<T, long>) {
      auto v = node->value<std::int64_t>();
      if (!v || !node->is_integer()) fail(key, "must be an integer");
      out = static_cast<long>(*v);
    } else if constexpr (std::is_same_v<T, std::string>) {
      auto v = node->value<std::string>();
      if (!v) fail(key, "must be a string");
      out = *v;
    } else if constexpr (std::is_same_v<T, std::vector<long>>) {
      const toml::array* arr = node->as_array();
      if (!arr) fail(key, "must be an array of integers");
      out.clear();
      for (const auto& el : *arr) {
        if (!el.is_integer()) fail(key, "must be an array of integers");
        out.push_back(static_cast<long>(*el.value<std::int64_t>()));
      }
    } else if constexpr (std::is_same_v<T, std::vector<std::string>>) {
      const toml::array* arr = node->as_array();
      if (!arr) fail(key, "must be an array of strings");
      out.clear();
      for (const auto& el : *arr) {
        auto v = el.value<std::string>();
        if (!v) fail(key, "must be an array of strings");
        out.push_back(*v);
      }
    }
  }

  const toml::node* node(std::string_view key) const { return t_ ? t_->get(key) : nullptr; }
  std::string field(std::string_view key) const { return name_ + std::string(key); }

  [[noreturn]] void fail(std::string_view key, std::string_view why) const {
    throw ConfigError(field(key) + " " + std::string(why));
  }

 private:
  const toml::table* t_;
  std::string name_;
};

std::string resolve_input(const std::string& path, const std::filesystem::path& base) {
  if (path.empty()) return path;
  std::filesystem::path p(path);
  if (p.is_relative() && !base.empty()) p = base / p;
  return std::filesystem::absolute(p).lexically_normal().string();
}

std::string quoted(const std::string& s) {
  std::ostringstream os;
  os << toml::value<std::string>(s);
  return os.str();
}

template <class T>
std::string list_text(const std::vector<T>& v) {
  std::string out = "[";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    if constexpr (std::is_same_v<T, std::string>) out += quoted(v[i]);
    else out += std::to_string(v[i]);
  }
  return out + "]";
}

}  // namespace

RunConfig parse_run_config(std::string_view text, const std::filesystem::path& base_dir) {
  toml::table root;
  try {
    root = toml::parse(text);
  } catch (const toml::parse_error& e) {
    std::ostringstream os;
    os << "config: " << e.description() << " at line " << e.source().begin.line;
    throw ConfigError(os.str());
  }
  check_keys(root, {"command", "seed", "threads", "model", "run", "curve", "gsum", "mixing",
                    "calibrate", "appendix"},
             "");
  RunConfig c;
  if (const toml::node* n = root.get("command")) {
    auto v = n->value<std::string>();
    if (!v) throw ConfigError("command must be a string");
    c.command = *v;
  }
  if (const toml::node* n = root.get("seed")) {
    auto v = n->value<std::int64_t>();
    if (!v || !n->is_integer() || *v < 0) throw ConfigError("seed must be a nonnegative integer");
    c.seed = static_cast<std::uint64_t>(*v);
  }
  if (const toml::node* n = root.get("threads")) {
    auto v = n->value<std::int64_t>();
    if (!v || !n->is_integer() || *v < 1) throw ConfigError("threads must be an integer >= 1");
    c.threads = static_cast<unsigned>(*v);
  }

  auto table = [&](std::string_view name) -> const toml::table* {
    const toml::node* n = root.get(name);
    if (!n) return nullptr;
    if (!n->is_table()) throw ConfigError(std::string(name) + " must be a table");
    return n->as_table();
  };

  if (const toml::table* t = table("model")) {
    check_keys(*t, {"win", "mu", "process"}, "model.");
    auto wrap = [](const std::string& field, auto&& f) {
      try {
        return f();
      } catch (const ConfigError& e) {
        throw ConfigError(field + ": " + e.what());
      }
    };
    if (const toml::node* n = t->get("win"))
      c.win = wrap("model.win", [&] { return config::parse_win(node_text(*n), base_dir); });
    if (const toml::node* n = t->get("mu"))
      c.mu = wrap("model.mu", [&] { return config::parse_measure(node_text(*n), base_dir); });
    if (const toml::node* n = t->get("process"))
      c.process = wrap("model.process", [&] { return config::parse_process(node_text(*n), base_dir); });
  }
  if (const toml::table* t = table("run")) {
    check_keys(*t, {"two_n", "s", "replicas", "mode", "calendar", "tol", "var_tol", "lln_tol",
                    "ranking_tol", "output", "env_in", "env_out", "calendar_out"},
               "run.");
    Section r(t, "run.");
    r.get("two_n", c.two_n);
    r.get("s", c.s);
    r.get("replicas", c.replicas);
    r.get("mode", c.mode);
    r.get("calendar", c.calendar);
    r.get("tol", c.tol);
    r.get("var_tol", c.var_tol);
    r.get("lln_tol", c.lln_tol);
    r.get("ranking_tol", c.ranking_tol);
    r.get("output", c.output);
    r.get("env_in", c.env_in);
    c.env_in = resolve_input(c.env_in, base_dir);
    r.get("env_out", c.env_out);
    r.get("calendar_out", c.calendar_out);
  }
  if (const toml::table* t = table("curve")) {
    check_keys(*t, {"s_min", "s_max", "s_step"}, "curve.");
    Section r(t, "curve.");
    r.get("s_min", c.s_min);
    r.get("s_max", c.s_max);
    r.get("s_step", c.s_step);
  }
  if (const toml::table* t = table("gsum")) {
    check_keys(*t, {"s"}, "gsum.");
    Section(t, "gsum.").get("s", c.gsum_s);
  }
  if (const toml::table* t = table("mixing")) {
    check_keys(*t, {"max_lag", "block_grid"}, "mixing.");
    Section r(t, "mixing.");
    r.get("max_lag", c.max_lag);
    r.get("block_grid", c.block_grid);
  }
  if (const toml::table* t = table("calibrate")) {
    check_keys(*t, {"data", "matches_per_team", "points_per_win", "free", "multistart",
                    "max_evals", "params_out"},
               "calibrate.");
    Section r(t, "calibrate.");
    r.get("data", c.data);
    c.data = resolve_input(c.data, base_dir);
    r.get("matches_per_team", c.matches_per_team);
    r.get("points_per_win", c.points_per_win);
    r.get("free", c.free_params);
    r.get("multistart", c.multistart);
    r.get("max_evals", c.max_evals);
    r.get("params_out", c.params_out);
  }
  if (const toml::table* t = table("appendix")) {
    check_keys(*t, {"two_n", "runs", "delta"}, "appendix.");
    Section r(t, "appendix.");
    r.get("two_n", c.appendix_two_n);
    r.get("runs", c.appendix_runs);
    r.get("delta", c.delta);
  }
  return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_run_config(ss.str(), path.parent_path());
}

bool needs_seed(std::string_view command) {
  return command == "simulate" || command == "validate-lln" || command == "validate-clt" ||
         command == "validate-gsum" || command == "ranking" || command == "appendix-check";
}

void validate(const RunConfig& c) {
  if (std::find(std::begin(kCommands), std::end(kCommands), c.command) == std::end(kCommands)) {
    const std::vector<std::string_view> list(std::begin(kCommands), std::end(kCommands));
    throw ConfigError("command: unknown command '" + c.command + "' (did you mean '" +
                      nearest_key(c.command, list) + "'?)");
  }
  if (needs_seed(c.command) && !c.seed)
    throw ConfigError("seed: required for '" + c.command + "' (no automatic seeding)");
  if (c.two_n < 2 || c.two_n % 2 != 0)
    throw ConfigError("run.two_n must be an even integer >= 2 (got " + std::to_string(c.two_n) + ")");
  if (!(c.s >= 0.0)) throw ConfigError("run.s must be >= 0");
  if (c.replicas < 1) throw ConfigError("run.replicas must be >= 1");
  if (c.mode != "focal" && c.mode != "full") throw ConfigError("run.mode must be 'focal' or 'full'");
  if (c.calendar != "circle" && c.calendar != "canonical")
    throw ConfigError("run.calendar must be 'circle' or 'canonical'");
  auto positive = [](double v, const char* field) {
    if (!(v > 0.0)) throw ConfigError(std::string(field) + " must be > 0");
  };
  positive(c.tol, "run.tol");
  positive(c.var_tol, "run.var_tol");
  positive(c.lln_tol, "run.lln_tol");
  positive(c.ranking_tol, "run.ranking_tol");
  positive(c.s_step, "curve.s_step");
  positive(c.points_per_win, "calibrate.points_per_win");
  positive(c.delta, "appendix.delta");
  if (!(c.s_min >= 0.0) || !(c.s_max >= c.s_min))
    throw ConfigError("curve.s_min and curve.s_max must satisfy 0 <= s_min <= s_max");
  if (!(c.gsum_s >= 0.0)) throw ConfigError("gsum.s must be >= 0");
  if (c.max_lag < 1) throw ConfigError("mixing.max_lag must be >= 1");
  if (c.matches_per_team < 1) throw ConfigError("calibrate.matches_per_team must be >= 1");
  if (c.multistart < 1) throw ConfigError("calibrate.multistart must be >= 1");
  if (c.max_evals < 1) throw ConfigError("calibrate.max_evals must be >= 1");
  if (c.appendix_two_n < 4 || c.appendix_two_n % 2 != 0)
    throw ConfigError("appendix.two_n must be an even integer >= 4");
  if (c.appendix_runs < 1) throw ConfigError("appendix.runs must be >= 1");
  if (!c.env_in.empty() && !std::filesystem::exists(c.env_in))
    throw ConfigError("run.env_in: file not found: " + c.env_in);
  if (c.command == "calibrate") {
    if (c.data.empty()) throw ConfigError("calibrate.data: required for 'calibrate'");
    if (!std::filesystem::exists(c.data)) throw ConfigError("calibrate.data: file not found: " + c.data);
  }
}

std::string to_text(const RunConfig& c) {
  using csv::format;
  std::ostringstream os;
  os << "command = " << quoted(c.command) << '\n';
  if (c.seed) os << "seed = " << *c.seed << '\n';
  os << "threads = " << c.threads << "\n\n";
  os << "[model]\n"
     << "win = " << config::to_text(c.win) << '\n'
     << "mu = " << config::to_text(c.mu) << '\n'
     << "process = " << config::to_text(c.process) << "\n\n";
  os << "[run]\n"
     << "two_n = " << c.two_n << '\n'
     << "s = " << format(c.s) << '\n'
     << "replicas = " << c.replicas << '\n'
     << "mode = " << quoted(c.mode) << '\n'
     << "calendar = " << quoted(c.calendar) << '\n'
     << "tol = " << format(c.tol) << '\n'
     << "var_tol = " << format(c.var_tol) << '\n'
     << "lln_tol = " << format(c.lln_tol) << '\n'
     << "ranking_tol = " << format(c.ranking_tol) << '\n'
     << "output = " << quoted(c.output) << '\n'
     << "env_in = " << quoted(c.env_in) << '\n'
     << "env_out = " << quoted(c.env_out) << '\n'
     << "calendar_out = " << quoted(c.calendar_out) << "\n\n";
  os << "[curve]\n"
     << "s_min = " << format(c.s_min) << '\n'
     << "s_max = " << format(c.s_max) << '\n'
     << "s_step = " << format(c.s_step) << "\n\n";
  os << "[gsum]\ns = " << format(c.gsum_s) << "\n\n";
  os << "[mixing]\nmax_lag = " << c.max_lag << "\nblock_grid = " << list_text(c.block_grid)
     << "\n\n";
  os << "[calibrate]\n"
     << "data = " << quoted(c.data) << '\n'
     << "matches_per_team = " << c.matches_per_team << '\n'
     << "points_per_win = " << format(c.points_per_win) << '\n'
     << "free = " << list_text(c.free_params) << '\n'
     << "multistart = " << c.multistart << '\n'
     << "max_evals = " << c.max_evals << '\n'
     << "params_out = " << quoted(c.params_out) << "\n\n";
  os << "[appendix]\n"
     << "two_n = " << c.appendix_two_n << '\n'
     << "runs = " << c.appendix_runs << '\n'
     << "delta = " << format(c.delta) << '\n';
  return os.str();
}

}  // namespace qleague::cli
