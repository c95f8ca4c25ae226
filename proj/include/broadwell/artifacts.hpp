#pragma once

// On-disk artifacts of a run and their readers.
//
//   fields.csv  header i_x,i_y,x,y,F1,F2,F3,F4; one row per cell, x fastest
//   moduli.csv  header component,axis,h,raw,renormalized
//   report.json configuration echo plus solve and diagnostics reports per k
//
// Reals are written with 17 significant digits so that a file read back
// reproduces the in-memory doubles exactly.

#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "broadwell/config.hpp"
#include "broadwell/continuation.hpp"
#include "broadwell/diagnostics.hpp"
#include "broadwell/grid.hpp"

namespace broadwell {

inline std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string k_directory_name(double k) { return "k=" + format_k(k); }

inline const char *fields_csv_header() { return "i_x,i_y,x,y,F1,F2,F3,F4"; }
inline const char *moduli_csv_header() { return "component,axis,h,raw,renormalized"; }

namespace artifact_detail {

inline std::vector<std::string> split(const std::string &line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  return out;
}

inline double to_real(const std::string &s, const std::string &where) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception &) {
    throw std::runtime_error(where + ": bad number '" + s + "'");
  }
}

inline std::ifstream open_with_header(const std::string &path, const char *header) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::string first;
  std::getline(in, first);
  if (first != header) throw std::runtime_error(path + ": unexpected header '" + first + "'");
  return in;
}

} // namespace artifact_detail

inline void write_fields_csv(std::ostream &out, const FieldQuartet &f) {
  const Grid &g = f.grid();
  out << fields_csv_header() << '\n';
  for (int iy = 0; iy < g.n_cells(); ++iy)
    for (int ix = 0; ix < g.n_cells(); ++ix) {
      out << ix << ',' << iy << ',' << format_real(g.center(ix)) << ','
          << format_real(g.center(iy));
      for (int c = 0; c < 4; ++c) out << ',' << format_real(f[c](ix, iy));
      out << '\n';
    }
}

inline FieldQuartet read_fields_csv(const std::string &path) {
  auto in = artifact_detail::open_with_header(path, fields_csv_header());
  struct Row {
    int ix, iy;
    std::array<double, 4> v;
  };
  std::vector<Row> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cols = artifact_detail::split(line);
    if (cols.size() != 8) throw std::runtime_error(path + ": expected 8 columns");
    Row r{std::stoi(cols[0]), std::stoi(cols[1]), {}};
    for (int c = 0; c < 4; ++c) r.v[c] = artifact_detail::to_real(cols[4 + c], path);
    rows.push_back(r);
  }
  const int n = static_cast<int>(std::lround(std::sqrt(static_cast<double>(rows.size()))));
  if (n < 2 || static_cast<std::size_t>(n) * n != rows.size())
    throw std::runtime_error(path + ": row count is not a square grid");
  FieldQuartet f{Grid(n)};
  for (const auto &r : rows) {
    if (r.ix < 0 || r.iy < 0 || r.ix >= n || r.iy >= n)
      throw std::runtime_error(path + ": cell index out of range");
    for (int c = 0; c < 4; ++c) f[c](r.ix, r.iy) = r.v[c];
  }
  return f;
}

inline void write_moduli_csv(std::ostream &out, const std::vector<ModulusEntry> &moduli) {
  out << moduli_csv_header() << '\n';
  for (const auto &m : moduli)
    out << m.component << ',' << to_string(m.axis) << ',' << format_real(m.h) << ','
        << format_real(m.raw) << ',' << format_real(m.renormalized) << '\n';
}

/// Reads a moduli table. shift_cells is recovered from h and `spacing`
/// when given, otherwise left at 0.
inline std::vector<ModulusEntry> read_moduli_csv(const std::string &path, double spacing = 0.0) {
  auto in = artifact_detail::open_with_header(path, moduli_csv_header());
  std::vector<ModulusEntry> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cols = artifact_detail::split(line);
    if (cols.size() != 5) throw std::runtime_error(path + ": expected 5 columns");
    ModulusEntry m;
    m.component = std::stoi(cols[0]);
    if (cols[1] != "x" && cols[1] != "y") throw std::runtime_error(path + ": bad axis");
    m.axis = cols[1] == "x" ? Axis::x : Axis::y;
    m.h = artifact_detail::to_real(cols[2], path);
    m.raw = artifact_detail::to_real(cols[3], path);
    m.renormalized = artifact_detail::to_real(cols[4], path);
    if (spacing > 0.0) m.shift_cells = static_cast<int>(std::lround(m.h / spacing));
    out.push_back(m);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Report
// ---------------------------------------------------------------------------

inline nlohmann::ordered_json to_json(const StageReport &s) {
  // wall time is left out on purpose: reports must be reproducible byte for byte
  return {{"name", s.name},
          {"iterations", s.iterations},
          {"increment", s.increment},
          {"converged", s.converged}};
}

inline nlohmann::ordered_json to_json(const SolveReport &r) {
  nlohmann::ordered_json stages = nlohmann::ordered_json::array();
  for (const auto &s : r.stages) stages.push_back(to_json(s));
  return {{"k", r.k},
          {"alpha", r.alpha},
          {"path", r.path},
          {"stages", stages},
          {"mild_residual", r.mild_residual},
          {"final_increment", r.final_increment},
          {"bracket_sweeps", r.bracket_sweeps},
          {"max_bracket_width", r.max_bracket_width},
          {"converged", r.converged}};
}

inline nlohmann::ordered_json to_json(const DiagnosticsReport &d) {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  for (const auto &[key, value] : d.flatten()) j[key] = value;
  j["exceptional_lines_x"] = d.exceptional_x.lines;
  j["exceptional_lines_y"] = d.exceptional_y.lines;
  return j;
}

inline nlohmann::ordered_json to_json(const ContinuationStep &s) {
  nlohmann::ordered_json damped = nlohmann::ordered_json::array();
  for (const auto &d : s.damped) {
    nlohmann::ordered_json e{{"alpha", d.alpha}, {"solve", to_json(d.report)}};
    e["gap_to_previous"] =
        d.gap_to_previous ? nlohmann::ordered_json(*d.gap_to_previous) : nlohmann::ordered_json();
    damped.push_back(std::move(e));
  }
  nlohmann::ordered_json j{{"k", s.k}, {"directory", k_directory_name(s.k)}};
  j["converged"] = s.converged();
  j["cauchy_increment"] =
      s.cauchy_increment ? nlohmann::ordered_json(*s.cauchy_increment) : nlohmann::ordered_json();
  j["damped_gap"] = s.damped_gap ? nlohmann::ordered_json(*s.damped_gap) : nlohmann::ordered_json();
  j["damped_stages"] = damped;
  j["solve"] = to_json(s.report);
  j["diagnostics"] = to_json(s.diagnostics);
  return j;
}

inline nlohmann::ordered_json make_report(const RunConfig &config,
                                          const std::vector<ContinuationStep> &steps,
                                          const std::string &error = {}) {
  nlohmann::ordered_json j;
  // the output location is left out so that runs into different directories
  // produce identical reports
  j["config"] = to_json(config);
  j["config"].erase("out_dir");
  bool all = !steps.empty() && error.empty();
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto &s : steps) {
    all = all && s.converged();
    arr.push_back(to_json(s));
  }
  j["converged"] = all;
  j["error"] = error;
  j["steps"] = arr;
  return j;
}

inline nlohmann::ordered_json read_report(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  return nlohmann::ordered_json::parse(in);
}

} // namespace broadwell
