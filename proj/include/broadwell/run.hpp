#pragma once

#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "broadwell/artifacts.hpp"
#include "broadwell/boundary.hpp"
#include "broadwell/config.hpp"
#include "broadwell/continuation.hpp"

namespace broadwell {

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int failure = 1;
inline constexpr int config_error = 2;
inline constexpr int not_converged = 3;
} // namespace exit_code

namespace run_detail {

inline void write_file(const std::filesystem::path &path, const std::string &content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << content;
  if (!out) throw std::runtime_error("write to '" + path.string() + "' failed");
}

} // namespace run_detail

/// Runs the continuation described by `config` and writes its artifacts
/// under config.out_dir. Returns 0 when every stage converged, 2 on a bad
/// configuration or boundary, 3 when a stage stopped at its iteration cap
/// (artifacts are still written and flagged), 1 on any other failure.
inline int run(const RunConfig &config, std::ostream &log) {
  namespace fs = std::filesystem;
  BoundaryTrace fb = BoundaryTrace::constant(Grid(2), {0, 0, 0, 0});
  try {
    config.validate();
    fb = make_boundary(config.boundary, Grid(config.grid), config.seed);
  } catch (const ConfigError &e) {
    log << "configuration error: " << e.what() << '\n';
    return exit_code::config_error;
  } catch (const std::exception &e) {
    log << "configuration error: " << e.what() << '\n';
    return exit_code::config_error;
  }

  DiagnosticsOptions diag;
  diag.epsilon = config.epsilon;
  diag.lambda = config.lambda;
  diag.shifts = config.shifts;

  std::vector<ContinuationStep> steps;
  std::string error;
  int status = exit_code::ok;
  try {
    steps = continuation(fb, config.solver_params(), diag);
  } catch (const SolverError &e) {
    error = e.what();
    status = e.kind() == ErrorKind::iteration_cap ? exit_code::not_converged : exit_code::failure;
  } catch (const std::exception &e) {
    error = e.what();
    status = exit_code::failure;
  }
  if (status == exit_code::ok)
    for (const auto &s : steps)
      if (!s.converged()) status = exit_code::not_converged;

  try {
    const fs::path root(config.out_dir);
    fs::create_directories(root);
    for (const auto &s : steps) {
      const fs::path dir = root / k_directory_name(s.k);
      if (config.emit.fields || config.emit.moduli) fs::create_directories(dir);
      if (config.emit.fields) {
        std::ostringstream os;
        write_fields_csv(os, s.field);
        run_detail::write_file(dir / "fields.csv", os.str());
      }
      if (config.emit.moduli) {
        std::ostringstream os;
        write_moduli_csv(os, s.diagnostics.translation_moduli);
        run_detail::write_file(dir / "moduli.csv", os.str());
      }
    }
    if (config.emit.report)
      run_detail::write_file(root / "report.json", make_report(config, steps, error).dump(2) + "\n");
  } catch (const std::exception &e) {
    log << "error writing artifacts: " << e.what() << '\n';
    return exit_code::failure;
  }

  for (const auto &s : steps)
    log << "k = " << format_k(s.k) << ": " << (s.converged() ? "converged" : "NOT converged")
        << " after " << (s.report.stages.empty() ? 0 : s.report.stages.back().iterations)
        << " outer iterations, flux deviation " << format_real(s.diagnostics.flux.deviation)
        << '\n';
  if (!error.empty()) log << "solver error: " << error << '\n';
  return status;
}

} // namespace broadwell
