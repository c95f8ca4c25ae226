// Batch driver: reads a JSON run configuration, applies command-line
// overrides, runs the k-continuation and writes fields, moduli and report.

#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "broadwell/run.hpp"

namespace {

std::vector<std::string> split_commas(const std::string &s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Stationary Broadwell solver: k-continuation with diagnostics"};
  std::string config_path;
  std::string out_dir;
  int grid = 0;
  std::string k_list;
  std::uint64_t seed = 0;
  std::string emit;
  bool print_config = false;
  app.add_option("--config", config_path, "JSON run configuration")->required();
  app.add_option("--out", out_dir, "output directory (overrides out_dir)");
  app.add_option("--grid", grid, "cells per side (overrides grid)")->check(CLI::Range(2, 1 << 14));
  app.add_option("--k", k_list, "comma-separated k schedule (overrides k_schedule)");
  auto *seed_opt = app.add_option("--seed", seed, "seed for random boundary data");
  app.add_option("--emit", emit, "comma-separated subset of fields,report,moduli");
  app.add_flag("--print-config", print_config, "print the effective configuration and exit");
  CLI11_PARSE(app, argc, argv);

  broadwell::RunConfig config;
  try {
    config = broadwell::load_config(config_path);
    if (!out_dir.empty()) config.out_dir = out_dir;
    if (grid > 0) config.grid = grid;
    if (!k_list.empty()) {
      config.k_schedule.clear();
      for (const auto &item : split_commas(k_list)) {
        std::size_t used = 0;
        double k = 0.0;
        try {
          k = std::stod(item, &used);
        } catch (const std::exception &) {
          used = 0;
        }
        if (used != item.size()) throw broadwell::ConfigError("--k: bad value '" + item + "'");
        config.k_schedule.push_back(k);
      }
    }
    if (*seed_opt) config.seed = seed;
    if (!emit.empty()) config.emit = broadwell::emit_from_names(split_commas(emit));
  } catch (const broadwell::ConfigError &e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return broadwell::exit_code::config_error;
  }

  if (print_config) {
    std::cout << broadwell::serialize_config(config);
    return 0;
  }
  return broadwell::run(config, std::cerr);
}
