#pragma once

#include <limits>
#include <string>
#include <vector>

#include "radcav/cavity_solver.hpp"
#include "radcav/inner_limit.hpp"
#include "radcav/stored_energy.hpp"

namespace radcav {

struct SweepOptions {
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  double s0_factor = 1e-3;
  double eps_Q_rel = 1e-8;
  double eps_ab = 1e-9;
  double t_max_factor = 100.0;
  double max_sample_spacing = 0.0;
  double xi_max = 1e4;  // inner reference run
  double bracket_tol = 1e-5;
  double inner_s0_factor = 1e-3;
  double inner_max_sample_spacing = 2e-4;
  int threads = 1;
  long max_steps = 2000000;
};

struct DynamicPoint {
  double phi0 = std::numeric_limits<double>::quiet_NaN();
  double v0 = std::numeric_limits<double>::quiet_NaN();
  double Lambda = std::numeric_limits<double>::quiet_NaN();
  double sigma = std::numeric_limits<double>::quiet_NaN();
  double jump = std::numeric_limits<double>::quiet_NaN();
  ConnectionKind kind = ConnectionKind::shock;
  double T = std::numeric_limits<double>::quiet_NaN();
  std::string status;  // "ok" or the error text

  bool ok() const { return status == "ok"; }
};

struct BifurcationCurve {
  const StoredEnergy* energy = nullptr;
  BoundaryCondition boundary;
  SweepOptions options;
  std::vector<DynamicPoint> dynamic;               // ascending phi0
  std::vector<EquilibriumCurvePoint> equilibrium;  // lambda NaN on failure
  InnerSolution inner;                             // at v0 = V(0)
  double sigma0 = std::numeric_limits<double>::quiet_NaN();  // sqrt(Phi11(L0,L0))

  size_t n_ok() const;
};

BifurcationCurve sweep(const StoredEnergy& E, const BoundaryCondition& boundary,
                       const std::vector<double>& phi0_grid, const SweepOptions& opts = {});

struct LimitCheck {
  std::string name;
  bool ok = false;
  double margin = std::numeric_limits<double>::quiet_NaN();
  std::string detail;
};

struct LimitReport {
  std::vector<LimitCheck> checks;
  std::vector<double> tail_phi0;  // descending
  double richardson_lambda = std::numeric_limits<double>::quiet_NaN();
  double sigma0 = std::numeric_limits<double>::quiet_NaN();

  bool all_ok() const;
  std::string text() const;
};

// Checks the phi0 -> 0 limit statements along the curve's tail (phi0 <= 0.2,
// at least four points), re-solving those points without the contact stop.
LimitReport verify_limits(const BifurcationCurve& curve);

struct RescalingReport {
  double tau = 0.0;
  std::vector<double> phi0;
  std::vector<double> sup_sq;  // sup over [0,tau] of (psi-psi0)^2 + (delta-delta0)^2
  double fitted_order = std::numeric_limits<double>::quiet_NaN();

  std::string text() const;
};

RescalingReport verify_rescaling(const StoredEnergy& E, const BoundaryCondition& boundary,
                                 double tau, const std::vector<double>& phi0_grid,
                                 const SweepOptions& opts = {});

}  // namespace radcav
