#pragma once

#include <cmath>
#include <cstddef>

#include "radcav/ode_engine.hpp"
#include "radcav/stored_energy.hpp"

namespace radcav {

enum class BoundaryKind { stress_free, with_content };

// Radial traction at the cavity surface: T_rad(0) = 0 for stress_free,
// T_rad(0) = G(phi0) for with_content, with G affine and clipped positive.
struct BoundaryCondition {
  BoundaryKind kind = BoundaryKind::stress_free;
  double G0 = 0.0;
  double G1 = 0.0;
  static constexpr double kGFloor = 1e-8;

  double traction(double phi0) const {
    if (kind == BoundaryKind::stress_free) return 0.0;
    return std::fmax(G0 + G1 * phi0, kGFloor);
  }
};

struct CavityConfig {
  const StoredEnergy* E = nullptr;
  double phi0 = 1.0;
  BoundaryCondition boundary;
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  double s0_factor = 1e-3;      // s0 = s0_factor*min(1, phi0, nu)
  double s0_override = 0.0;     // used verbatim when > 0
  double t_max_factor = 100.0;  // horizon t_max_factor*max(1, phi0)
  double eps_Q_rel = 1e-8;      // sonic stop when Q >= -eps_Q_rel*Phi11(b,b)
  double eps_ab = 1e-9;         // contact stop when b-a <= eps_ab*max(1,b); 0 disables
  double max_sample_spacing = 0.0;
  long max_steps = 2000000;

  // H for stress_free, h'^{-1}(G(phi0)) otherwise.
  double resolved_v0() const;
  double resolved_s0() const;
  void validate() const;
};

// Start values at the hand-off point s0, from the two-term series
// phi^d(s) ~ phi0^d + v0 s^d + (d/(d+1)) c0 s^{d+1}.
struct SeriesStart {
  double s0 = 0.0;
  double a = 0.0;
  double b = 0.0;
  double phi = 0.0;
  double v = 0.0;  // v0 + c0*s0
  double c0 = 0.0;
};

enum class StopKind { sonic_event, contact_event, step_underflow, step_budget, reached_end };

// Cavitating arc in the variables (a, b, phi) against the self-similar
// abscissa s; v, Q, p, T_rad are derived per sample.
struct CavityTrajectory {
  const StoredEnergy* energy = nullptr;
  CavityConfig config;
  double v0 = 0.0;
  double c0 = 0.0;
  double s0 = 0.0;
  SampledArc arc;
  StopKind stop = StopKind::reached_end;
  double T = 0.0;  // stop abscissa (last sample)
  double Q_at_stop = 0.0;
  double width_at_stop = 0.0;  // (b - a) at the stop

  size_t size() const { return arc.size(); }
  double s(size_t i) const { return arc.t[i]; }
  double a(size_t i) const { return arc.state(i)[0]; }
  double b(size_t i) const { return arc.state(i)[1]; }
  double phi(size_t i) const { return arc.state(i)[2]; }
  // v = a*(phi/s)^{d-1}; the stored b is kept as an independent consistency witness.
  double v(size_t i) const;
  double Q(size_t i) const;
  double p(size_t i) const;  // Rankine-Hugoniot residual R(a, b, s)
  double radial_stress(size_t i) const;

  RadialState state_at(double si) const;
  double phi_at(double si) const;
  double p_at(double si) const;
};

SeriesStart series_start(const CavityConfig& cfg);

// Same series at explicit (phi0, v0, s0); the limiting and equilibrium
// systems start from it as well.
SeriesStart series_start_at(const StoredEnergy& E, double phi0, double v0, double s0);

CavityTrajectory solve_cavity(const CavityConfig& cfg);

enum class ConnectionKind { shock, sonic };

struct ConnectionResult {
  double sigma = 0.0;
  double Lambda = 0.0;   // b(sigma)
  double a_minus = 0.0;  // a(sigma-)
  double jump = 0.0;     // Lambda - a_minus
  ConnectionKind kind = ConnectionKind::shock;
  bool lax_ok = false;
  double residual = 0.0;         // |p(sigma)|
  double lax_margin_low = 0.0;   // sigma^2 - Phi11(Lambda, Lambda)
  double lax_margin_high = 0.0;  // Phi11(a_minus, Lambda) - sigma^2
  double p_slope = 0.0;          // dp/ds near sigma
  double T = 0.0;                // stop abscissa of the source trajectory
};

ConnectionResult find_connection(const CavityTrajectory& traj);

// Interpolated radial Cauchy stress at s; throws OutOfRange outside the arc.
double cauchy_stress(const CavityTrajectory& traj, double s);

// Smallest normalized margins of the monotonicity suite over the sampled arc:
// a increasing, b decreasing, (a-b) increasing, b-a > 0, Q < 0 in the interior.
struct MonotonicityMargins {
  double a_increase = 0.0;
  double b_decrease = 0.0;
  double width_increase = 0.0;  // of a-b
  double width_positive = 0.0;  // of b-a
  double q_negative = 0.0;      // of -Q on the interior
  double min() const;
};

MonotonicityMargins monotonicity_margins(const CavityTrajectory& traj);

}  // namespace radcav
