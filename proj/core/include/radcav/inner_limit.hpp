#pragma once

#include <cstddef>
#include <limits>

#include "radcav/cavity_solver.hpp"
#include "radcav/ode_engine.hpp"
#include "radcav/stored_energy.hpp"

namespace radcav {

struct InnerOptions {
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  double bracket_tol = 1e-5;  // stop once b0-a0 <= bracket_tol; 0 integrates to xi_max
  double s0_factor = 1e-3;    // hand-off xi0 = s0_factor*min(1, nu)
  double xi0_override = 0.0;
  double max_sample_spacing = 2e-4;
  long max_steps = 2000000;
};

// Solution of the limiting (equilibrium) system with psi0(0)=1, delta0(0)=v0;
// a0 = psi0', b0 = psi0/xi sandwich the critical stretch.
struct InnerSolution {
  const StoredEnergy* energy = nullptr;
  double v0 = 0.0;
  double c0 = 0.0;
  double xi0 = 0.0;
  double xi_end = 0.0;
  SampledArc arc;  // y = (a0, b0, psi0) against xi
  double bracket_lo = 0.0;  // a0(end) - eps_cert
  double bracket_hi = 0.0;  // b0(end) + eps_cert
  double lambda0 = 0.0;     // bracket midpoint
  bool slow_convergence = false;

  size_t size() const { return arc.size(); }
  double xi(size_t i) const { return arc.t[i]; }
  double a0(size_t i) const { return arc.state(i)[0]; }
  double b0(size_t i) const { return arc.state(i)[1]; }
  double psi0(size_t i) const { return arc.state(i)[2]; }
  double delta0(size_t i) const { return a0(i) * powi(b0(i), energy->dim() - 1); }
};

InnerSolution solve_inner(const StoredEnergy& E, double v0, double xi_max = 1e4,
                          const InnerOptions& opts = {});

// Quadrature value with its reported tail uncertainty, both in stretch units.
struct ReprResult {
  double value = std::numeric_limits<double>::quiet_NaN();
  double tail = std::numeric_limits<double>::quiet_NaN();
};

// Lambda0 = (v0 + int_0^inf (1-d) D0/(psi0 f0) dxi)^{1/d}
ReprResult lambda0_repr1(const InnerSolution& sol, const StoredEnergy& E);

// Lambda0 = chi^{-1}(h'(v0) + int_0^inf W dxi); requires H6.
ReprResult lambda0_repr2(const InnerSolution& sol, const StoredEnergy& E);

struct EquilibriumCurvePoint {
  double phi0 = 0.0;
  double lambda = 0.0;  // boundary stretch b(1)
};

// Full equilibrium trajectory on (s0, 1]; the curve point is lambda = b(1).
struct EquilibriumSolution {
  const StoredEnergy* energy = nullptr;
  double phi0 = 0.0;
  double v0 = 0.0;
  double c0 = 0.0;
  double s0 = 0.0;
  SampledArc arc;  // y = (a, b, phi) against s
  double lambda = 0.0;
};

EquilibriumSolution solve_equilibrium_full(const StoredEnergy& E, double phi0,
                                           const BoundaryCondition& boundary = {},
                                           const InnerOptions& opts = {});

EquilibriumCurvePoint solve_equilibrium(const StoredEnergy& E, double phi0,
                                        const BoundaryCondition& boundary = {},
                                        const InnerOptions& opts = {});

// Worst margins of the certified bounds over the sampled inner arc:
// max(1, L*xi) < psi0 < 1 + L*xi, 0 < a0 < L < b0, and the width decay
// (b0-a0)(xi) <= (b0-a0)(1)/xi for xi >= 1.
struct InnerBoundMargins {
  double psi_lower = 0.0;   // min psi0 - max(1, L*xi)
  double psi_upper = 0.0;   // min 1 + L*xi - psi0
  double a_below = 0.0;     // min L - a0
  double b_above = 0.0;     // min b0 - L
  double decay = 0.0;       // min (b0-a0)(1)/xi - (b0-a0)(xi), xi >= 1
  double min() const;
};

InnerBoundMargins inner_bound_margins(const InnerSolution& sol);

}  // namespace radcav
