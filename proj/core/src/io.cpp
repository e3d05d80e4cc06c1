#include "radcav/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

namespace radcav {

namespace {

void trajectory_row(std::ostream& os, const CavityTrajectory& traj, double s, const double* y) {
  const StoredEnergy& E = *traj.energy;
  const double a = y[0], b = y[1], phi = y[2];
  const double bb = phi / s;
  const double v = a * powi(bb, E.dim() - 1);
  os << format_g17(s) << "," << format_g17(phi) << "," << format_g17(v) << ","
     << format_g17(a) << "," << format_g17(b) << "," << format_g17(E.eval_Q({a, b}, s)) << ","
     << format_g17(E.eval_R({a, b}, s)) << "," << format_g17(E.radial_stress({a, bb})) << "\n";
}

std::string sanitize(const std::string& s) {
  std::string out = s;
  std::replace(out.begin(), out.end(), ',', ';');
  std::replace(out.begin(), out.end(), '\n', ' ');
  return out;
}

}  // namespace

std::string format_g17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_trajectory_csv(std::ostream& os, const CavityTrajectory& traj) {
  os << "s,phi,v,a,b,Q,p,T_rad\n";
  for (size_t i = 0; i < traj.size(); ++i)
    trajectory_row(os, traj, traj.s(i), traj.arc.state(i));
}

void write_trajectory_csv(std::ostream& os, const CavityTrajectory& traj,
                          const ConnectionResult& conn) {
  os << "s,phi,v,a,b,Q,p,T_rad\n";
  bool inserted = false;
  for (size_t i = 0; i < traj.size(); ++i) {
    const double s = traj.s(i);
    if (!inserted && s >= conn.sigma) {
      if (std::fabs(s - conn.sigma) > 1e-15 * std::fmax(1.0, conn.sigma)) {
        double buf[3];
        traj.arc.eval(conn.sigma, buf);
        trajectory_row(os, traj, conn.sigma, buf);
      }
      inserted = true;
    }
    trajectory_row(os, traj, s, traj.arc.state(i));
  }
  if (!inserted) {
    double buf[3];
    traj.arc.eval(conn.sigma, buf);
    trajectory_row(os, traj, conn.sigma, buf);
  }
}

void write_inner_csv(std::ostream& os, const InnerSolution& sol) {
  os << "xi,psi0,delta0,a0,b0\n";
  for (size_t i = 0; i < sol.size(); ++i)
    os << format_g17(sol.xi(i)) << "," << format_g17(sol.psi0(i)) << ","
       << format_g17(sol.delta0(i)) << "," << format_g17(sol.a0(i)) << ","
       << format_g17(sol.b0(i)) << "\n";
}

void write_dynamic_curve_csv(std::ostream& os, const BifurcationCurve& curve) {
  os << "phi0,Lambda,sigma,jump,kind,status\n";
  for (const auto& pt : curve.dynamic)
    os << format_g17(pt.phi0) << "," << format_g17(pt.Lambda) << "," << format_g17(pt.sigma)
       << "," << format_g17(pt.jump) << ","
       << (pt.kind == ConnectionKind::shock ? "shock" : "sonic") << "," << sanitize(pt.status)
       << "\n";
}

void write_equilibrium_csv(std::ostream& os, const std::vector<EquilibriumCurvePoint>& pts) {
  os << "phi0,lambda\n";
  for (const auto& pt : pts)
    os << format_g17(pt.phi0) << "," << format_g17(pt.lambda) << "\n";
}

}  // namespace radcav
