#pragma once

// Run configuration: a JSON document whose keys are the RunConfig field
// names. Parsing is strict (unknown keys and wrong types are errors) and
// serialisation writes every field, so serialize(parse(s)) is stable.

#include <array>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "broadwell/params.hpp"

namespace broadwell {

class ConfigError : public std::runtime_error {
public:
  ConfigError(const std::string &what, int line = 0, int column = 0)
      : std::runtime_error(line > 0 ? what + " (line " + std::to_string(line) + ", column " +
                                          std::to_string(column) + ")"
                                    : what),
        line_(line), column_(column) {}

  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }

private:
  int line_;
  int column_;
};

enum class BoundaryKind { constant, step, power, random, file };

inline const char *to_string(BoundaryKind k) noexcept {
  switch (k) {
  case BoundaryKind::constant: return "constant";
  case BoundaryKind::step: return "step";
  case BoundaryKind::power: return "power";
  case BoundaryKind::random: return "random";
  case BoundaryKind::file: return "file";
  }
  return "constant";
}

/// How the four inflow profiles are produced. Only the fields of the chosen
/// kind are read or written:
///   constant: values[c]
///   step:     low[c] below `at`, high[c] from `at` on (in the face coordinate)
///   power:    scale[c] * t^exponent
///   random:   uniform samples rescaled so that component c has mass mass[c]
///   file:     CSV at `path` with header t,fb1,fb2,fb3,fb4 and one row per cell
struct BoundarySpec {
  BoundaryKind kind = BoundaryKind::constant;
  std::array<double, 4> values{0.5, 0.5, 0.5, 0.5};
  std::array<double, 4> low{0.0, 0.0, 0.0, 0.0};
  std::array<double, 4> high{1.0, 1.0, 1.0, 1.0};
  double at = 0.5;
  double exponent = 1.0;
  std::array<double, 4> scale{1.0, 1.0, 1.0, 1.0};
  std::array<double, 4> mass{0.25, 0.25, 0.25, 0.25};
  std::string path;

  bool operator==(const BoundarySpec &) const = default;
};

struct EmitFlags {
  bool fields = true;
  bool report = true;
  bool moduli = true;

  bool operator==(const EmitFlags &) const = default;
};

struct RunConfig {
  int grid = 16;
  std::vector<double> k_schedule{8.0};
  std::vector<double> alpha_schedule{};
  double tol_inner = 1e-12;
  double tol_outer = 1e-10;
  double tol_bracket = 1e-12;
  int max_inner = 2000;
  int max_outer = 500;
  int max_bracket = 2000;
  std::string cell_rule = "midpoint";
  BoundarySpec boundary;
  std::uint64_t seed = 0;
  std::string out_dir = "out";
  EmitFlags emit;
  double epsilon = 0.5;
  double lambda = 2.0;
  std::vector<int> shifts{1, 2, 4};

  bool operator==(const RunConfig &) const = default;

  SolverParams solver_params() const {
    SolverParams p;
    p.k = k_schedule.empty() ? 8.0 : k_schedule.front();
    p.tol_inner = tol_inner;
    p.tol_outer = tol_outer;
    p.tol_bracket = tol_bracket;
    p.max_inner = max_inner;
    p.max_outer = max_outer;
    p.max_bracket = max_bracket;
    p.k_schedule = k_schedule;
    p.alpha_schedule = alpha_schedule;
    p.cell_rule = cell_rule_from_string(cell_rule);
    return p;
  }

  /// Semantic checks beyond what the JSON types enforce.
  void validate() const {
    if (grid < 2) throw ConfigError("grid must be >= 2");
    if (k_schedule.empty()) throw ConfigError("k_schedule must not be empty");
    try {
      solver_params().validate();
    } catch (const std::exception &e) {
      throw ConfigError(e.what());
    }
    if (!(epsilon > 0.0) || !(lambda > 0.0)) throw ConfigError("epsilon and lambda must be > 0");
    for (int s : shifts)
      if (s < 1) throw ConfigError("shifts must be >= 1");
    if (boundary.kind == BoundaryKind::step && !(boundary.at >= 0.0 && boundary.at <= 1.0))
      throw ConfigError("boundary.at must lie in [0, 1]");
    if (boundary.kind == BoundaryKind::file && boundary.path.empty())
      throw ConfigError("boundary.path is required for kind 'file'");
  }
};

// ---------------------------------------------------------------------------
// JSON mapping
// ---------------------------------------------------------------------------

namespace config_detail {

using json = nlohmann::ordered_json;

inline std::array<double, 4> quad(const json &j, const std::string &key) {
  if (!j.is_array() || j.size() != 4) throw ConfigError("'" + key + "' must be an array of 4 numbers");
  std::array<double, 4> a{};
  for (int i = 0; i < 4; ++i) {
    if (!j[i].is_number()) throw ConfigError("'" + key + "' must be an array of 4 numbers");
    a[i] = j[i].get<double>();
  }
  return a;
}

template <class T> T get(const json &obj, const std::string &key, const std::string &where) {
  try {
    return obj.at(key).get<T>();
  } catch (const nlohmann::json::exception &) {
    throw ConfigError("'" + where + key + "' has the wrong type");
  }
}

inline void reject_unknown(const json &obj, std::initializer_list<const char *> known,
                           const std::string &where) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool ok = false;
    for (const char *k : known) ok = ok || it.key() == k;
    if (!ok) throw ConfigError("unknown key '" + where + it.key() + "'");
  }
}

/// 1-based line and column of a byte offset into `text`.
inline std::pair<int, int> locate(const std::string &text, std::size_t byte) {
  int line = 1, column = 1;
  for (std::size_t i = 0; i + 1 < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return {line, column};
}

} // namespace config_detail

inline nlohmann::ordered_json to_json(const BoundarySpec &b) {
  nlohmann::ordered_json j;
  j["kind"] = to_string(b.kind);
  switch (b.kind) {
  case BoundaryKind::constant: j["values"] = b.values; break;
  case BoundaryKind::step:
    j["low"] = b.low;
    j["high"] = b.high;
    j["at"] = b.at;
    break;
  case BoundaryKind::power:
    j["exponent"] = b.exponent;
    j["scale"] = b.scale;
    break;
  case BoundaryKind::random: j["mass"] = b.mass; break;
  case BoundaryKind::file: j["path"] = b.path; break;
  }
  return j;
}

inline BoundarySpec boundary_from_json(const nlohmann::ordered_json &j) {
  using namespace config_detail;
  if (!j.is_object()) throw ConfigError("'boundary' must be an object");
  BoundarySpec b;
  const std::string kind = get<std::string>(j, "kind", "boundary.");
  auto q = [&](const char *key, std::array<double, 4> &dst) {
    if (j.contains(key)) dst = quad(j.at(key), std::string("boundary.") + key);
  };
  if (kind == "constant") {
    b.kind = BoundaryKind::constant;
    reject_unknown(j, {"kind", "values"}, "boundary.");
    q("values", b.values);
  } else if (kind == "step") {
    b.kind = BoundaryKind::step;
    reject_unknown(j, {"kind", "low", "high", "at"}, "boundary.");
    q("low", b.low);
    q("high", b.high);
    if (j.contains("at")) b.at = get<double>(j, "at", "boundary.");
  } else if (kind == "power") {
    b.kind = BoundaryKind::power;
    reject_unknown(j, {"kind", "exponent", "scale"}, "boundary.");
    if (j.contains("exponent")) b.exponent = get<double>(j, "exponent", "boundary.");
    q("scale", b.scale);
  } else if (kind == "random") {
    b.kind = BoundaryKind::random;
    reject_unknown(j, {"kind", "mass"}, "boundary.");
    q("mass", b.mass);
  } else if (kind == "file") {
    b.kind = BoundaryKind::file;
    reject_unknown(j, {"kind", "path"}, "boundary.");
    b.path = get<std::string>(j, "path", "boundary.");
  } else {
    throw ConfigError("unknown boundary kind '" + kind + "'");
  }
  return b;
}

inline nlohmann::ordered_json to_json(const RunConfig &c) {
  nlohmann::ordered_json j;
  j["grid"] = c.grid;
  j["k_schedule"] = c.k_schedule;
  j["alpha_schedule"] = c.alpha_schedule;
  j["tol_inner"] = c.tol_inner;
  j["tol_outer"] = c.tol_outer;
  j["tol_bracket"] = c.tol_bracket;
  j["max_inner"] = c.max_inner;
  j["max_outer"] = c.max_outer;
  j["max_bracket"] = c.max_bracket;
  j["cell_rule"] = c.cell_rule;
  j["boundary"] = to_json(c.boundary);
  j["seed"] = c.seed;
  j["out_dir"] = c.out_dir;
  std::vector<std::string> emit;
  if (c.emit.fields) emit.push_back("fields");
  if (c.emit.report) emit.push_back("report");
  if (c.emit.moduli) emit.push_back("moduli");
  j["emit"] = emit;
  j["epsilon"] = c.epsilon;
  j["lambda"] = c.lambda;
  j["shifts"] = c.shifts;
  return j;
}

/// Parses a comma-separated or listed emit selection.
inline EmitFlags emit_from_names(const std::vector<std::string> &names) {
  EmitFlags e{false, false, false};
  for (const auto &n : names) {
    if (n == "fields") e.fields = true;
    else if (n == "report") e.report = true;
    else if (n == "moduli") e.moduli = true;
    else throw ConfigError("unknown emit target '" + n + "'");
  }
  return e;
}

inline RunConfig config_from_json(const nlohmann::ordered_json &j) {
  using namespace config_detail;
  if (!j.is_object()) throw ConfigError("configuration must be a JSON object");
  reject_unknown(j,
                 {"grid", "k_schedule", "alpha_schedule", "tol_inner", "tol_outer", "tol_bracket",
                  "max_inner", "max_outer", "max_bracket", "cell_rule", "boundary", "seed",
                  "out_dir", "emit", "epsilon", "lambda", "shifts"},
                 "");
  RunConfig c;
  auto opt = [&](const char *key, auto &dst) {
    if (j.contains(key)) dst = get<std::decay_t<decltype(dst)>>(j, key, "");
  };
  opt("grid", c.grid);
  opt("k_schedule", c.k_schedule);
  opt("alpha_schedule", c.alpha_schedule);
  opt("tol_inner", c.tol_inner);
  opt("tol_outer", c.tol_outer);
  opt("tol_bracket", c.tol_bracket);
  opt("max_inner", c.max_inner);
  opt("max_outer", c.max_outer);
  opt("max_bracket", c.max_bracket);
  opt("cell_rule", c.cell_rule);
  if (j.contains("boundary")) c.boundary = boundary_from_json(j.at("boundary"));
  opt("seed", c.seed);
  opt("out_dir", c.out_dir);
  if (j.contains("emit")) c.emit = emit_from_names(get<std::vector<std::string>>(j, "emit", ""));
  opt("epsilon", c.epsilon);
  opt("lambda", c.lambda);
  opt("shifts", c.shifts);
  try {
    (void)cell_rule_from_string(c.cell_rule);
  } catch (const std::invalid_argument &e) {
    throw ConfigError(e.what());
  }
  return c;
}

/// Parses configuration text; syntax errors carry line and column.
inline RunConfig parse_config(const std::string &text) {
  nlohmann::ordered_json j;
  try {
    j = nlohmann::ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error &e) {
    const auto [line, column] = config_detail::locate(text, e.byte);
    throw ConfigError("malformed JSON", line, column);
  }
  return config_from_json(j);
}

inline RunConfig load_config(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open configuration file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

inline std::string serialize_config(const RunConfig &c) { return to_json(c).dump(2) + "\n"; }

} // namespace broadwell
