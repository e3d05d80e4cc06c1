#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "radcav/bifurcation.hpp"
#include "radcav/cavity_solver.hpp"
#include "radcav/inner_limit.hpp"

namespace radcav {

// Decimal form with 17 significant digits; round-trips a double exactly.
std::string format_g17(double x);

// Columns: s, phi, v, a, b, Q, p, T_rad.
void write_trajectory_csv(std::ostream& os, const CavityTrajectory& traj);
// Same, with one interpolated row inserted at the connection abscissa.
void write_trajectory_csv(std::ostream& os, const CavityTrajectory& traj,
                          const ConnectionResult& conn);

// Columns: xi, psi0, delta0, a0, b0.
void write_inner_csv(std::ostream& os, const InnerSolution& sol);

// Columns: phi0, Lambda, sigma, jump, kind, status.
void write_dynamic_curve_csv(std::ostream& os, const BifurcationCurve& curve);

// Columns: phi0, lambda.
void write_equilibrium_csv(std::ostream& os, const std::vector<EquilibriumCurvePoint>& pts);

}  // namespace radcav
