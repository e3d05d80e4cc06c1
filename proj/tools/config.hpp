#pragma once

#include <string>
#include <vector>

#include "radcav/bifurcation.hpp"
#include "radcav/cavity_solver.hpp"
#include "radcav/scalar_model.hpp"

namespace radcav::cli {

// Full run configuration; defaults reproduce the figure configuration
// (g = x^2/2, h = (x-1) ln x, d = 3, stress-free cavity).
struct RunConfig {
  int d = 3;
  ScalarModel g = ScalarModel::quadratic(0.5);
  ScalarModel h = ScalarModel::log_entropy(1.0);
  BoundaryCondition boundary;
  SweepOptions solver;
  double v0_override = 0.0;  // cmd_inner reference volume; 0 derives V(0)
  double s0_override = 0.0;

  double phi0_min = 0.05;
  double phi0_max = 2.7;
  int phi0_count = 12;
  bool log_spacing = false;
  double tau = 2.0;

  std::string out_dir = "out";
  bool svg = true;
  int threads = 0;  // 0: hardware concurrency

  std::vector<double> phi0_grid() const;
};

// Parse the INI-style config at path; throws ConfigError on malformed
// input, unknown keys, or out-of-range values.
RunConfig load_config(const std::string& path);

// Parse a scalar-family value string, e.g. "quadratic 0.5",
// "power_sum 1 1.5 0", "inverse_power_sum 0 1 1 1".
ScalarModel parse_scalar_model(const std::string& text);

}  // namespace radcav::cli
