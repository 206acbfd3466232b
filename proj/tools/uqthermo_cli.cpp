/*
 * This code is part of uqthermo.
 *
 * Licensed under the Apache License, Version 2.0; you may obtain a copy
 * at http://www.apache.org/licenses/LICENSE-2.0.
 */

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <sstream>

#include "uqthermo/report.hpp"
#include "uqthermo/version.hpp"

int main(int argc, char** argv) {
  CLI::App app{"uqthermo: one-shot work extraction and formation under equilibrium uncertainty"};
  app.set_version_flag("--version", UQTHERMO_VERSION);

  std::string config_path;
  std::string out_path;
  double m_cap = 0.0;
  double tol = 0.0;
  int grid = 0;
  int jobs = 1;

  app.add_option("--config", config_path, "job configuration (JSON)")->required();
  app.add_option("--out", out_path, "report destination (JSON or CSV; default stdout)");
  app.add_option("--jobs", jobs, "parallel rows for sweeps")->check(CLI::PositiveNumber);
  app.add_option("--m-cap", m_cap, "override the segment-search capacity cap");
  app.add_option("--grid", grid, "override sampler grid sizes");
  app.add_option("--tol", tol, "override the certified duality-gap tolerance");

  CLI11_PARSE(app, argc, argv);

  std::ifstream in(config_path);
  if (!in) {
    std::cerr << "cannot read config " << config_path << "\n";
    return 2;
  }
  std::stringstream buffer;
  buffer << in.rdbuf();

  uqthermo::CliOverrides overrides;
  if (!out_path.empty()) overrides.out_path = out_path;
  if (m_cap > 0.0) overrides.m_cap = m_cap;
  if (tol > 0.0) overrides.tol = tol;
  if (grid > 0) overrides.grid = grid;
  overrides.jobs = jobs;

  const uqthermo::JobOutcome outcome = uqthermo::run_job_text(buffer.str(), overrides);
  if (outcome.out_path.empty()) {
    std::cout << outcome.output;
  } else {
    std::ofstream out(outcome.out_path);
    if (!out) {
      std::cerr << "cannot write " << outcome.out_path << "\n";
      return 2;
    }
    out << outcome.output;
  }
  if (outcome.exit_code != 0) {
    std::cerr << "job finished with exit code " << outcome.exit_code << "\n";
  }
  return outcome.exit_code;
}
