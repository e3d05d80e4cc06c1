#include "radcav/cavity_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include "radcav/errors.hpp"

namespace radcav {

namespace {

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(12);
  os << x;
  return os.str();
}

}  // namespace

double CavityConfig::resolved_v0() const {
  if (E == nullptr) throw ConfigError("CavityConfig: energy not set");
  if (boundary.kind == BoundaryKind::stress_free) {
    const double H = E->natural_stretch();
    if (!std::isfinite(H)) throw HypothesisViolation("natural stretch h'^{-1}(0) unavailable");
    return H;
  }
  return E->h_prime_inverse(boundary.traction(phi0));
}

double CavityConfig::resolved_s0() const {
  if (s0_override > 0.0) return s0_override;
  if (E == nullptr) throw ConfigError("CavityConfig: energy not set");
  return s0_factor * std::fmin(1.0, std::fmin(phi0, E->nu()));
}

void CavityConfig::validate() const {
  if (E == nullptr) throw ConfigError("CavityConfig: energy not set");
  if (!(phi0 > 0.0) || !std::isfinite(phi0))
    throw ConfigError("CavityConfig: phi0 must be positive and finite");
  if (!(rel_tol > 0.0) || !(abs_tol > 0.0)) throw ConfigError("CavityConfig: tolerances must be positive");
  if (!(s0_factor > 0.0) && !(s0_override > 0.0))
    throw ConfigError("CavityConfig: s0 rule must be positive");
  if (!(eps_Q_rel > 0.0)) throw ConfigError("CavityConfig: eps_Q_rel must be positive");
  if (eps_ab < 0.0) throw ConfigError("CavityConfig: eps_ab must be nonnegative");
  E->require_solvable();
}

double CavityTrajectory::v(size_t i) const {
  const double bb = phi(i) / s(i);
  return a(i) * powi(bb, energy->dim() - 1);
}

double CavityTrajectory::Q(size_t i) const {
  return energy->eval_Q({a(i), b(i)}, s(i));
}

double CavityTrajectory::p(size_t i) const {
  return energy->eval_R({a(i), b(i)}, s(i));
}

double CavityTrajectory::radial_stress(size_t i) const {
  const double bb = phi(i) / s(i);
  return energy->radial_stress({a(i), bb});
}

RadialState CavityTrajectory::state_at(double si) const {
  double buf[3];
  arc.eval(si, buf);
  return {buf[0], buf[1]};
}

double CavityTrajectory::phi_at(double si) const { return arc.eval(si, 2); }

double CavityTrajectory::p_at(double si) const {
  double buf[3];
  arc.eval(si, buf);
  return energy->eval_R({buf[0], buf[1]}, si);
}

SeriesStart series_start_at(const StoredEnergy& E, double phi0, double v0, double s0) {
  const int d = E.dim();
  const double hpp = E.h().d2(v0);
  if (!(hpp > 0.0)) throw DomainError("series_start: h''(v0) must be positive");
  SeriesStart out;
  out.s0 = s0;
  out.c0 = (d - 1) * E.gamma0() / (phi0 * hpp);
  const double phid = powi(phi0, d) + v0 * powi(s0, d) +
                      (static_cast<double>(d) / (d + 1)) * out.c0 * powi(s0, d + 1);
  out.phi = std::pow(phid, 1.0 / d);
  out.b = out.phi / s0;
  out.a = (v0 * powi(s0, d - 1) + out.c0 * powi(s0, d)) * std::pow(out.phi, 1.0 - d);
  out.v = v0 + out.c0 * s0;
  return out;
}

SeriesStart series_start(const CavityConfig& cfg) {
  cfg.validate();
  return series_start_at(*cfg.E, cfg.phi0, cfg.resolved_v0(), cfg.resolved_s0());
}

CavityTrajectory solve_cavity(const CavityConfig& cfg) {
  const SeriesStart start = series_start(cfg);
  const StoredEnergy& E = *cfg.E;
  const int d = E.dim();

  CavityTrajectory traj;
  traj.energy = cfg.E;
  traj.config = cfg;
  traj.v0 = cfg.resolved_v0();
  traj.c0 = start.c0;
  traj.s0 = start.s0;

  IvpProblem p;
  p.dim = 3;
  p.rhs = [&E, d](double s, const double* y, double* dy) {
    // Trial stages may overshoot the admissible cone; report them as
    // non-finite so the step controller rejects and shrinks.
    if (!(y[0] > 0.0) || !(y[1] > 0.0) || !std::isfinite(y[0]) || !std::isfinite(y[1])) {
      dy[0] = dy[1] = dy[2] = std::numeric_limits<double>::quiet_NaN();
      return;
    }
    const RadialState st{y[0], y[1]};
    const double Q = E.eval_Q(st, s);
    const double P = E.eval_P(st);
    dy[0] = ((d - 1) / s) * (y[0] - y[1]) * P / Q;
    dy[1] = (y[0] - y[1]) / s;
    dy[2] = y[0];
  };
  p.t0 = start.s0;
  p.y0 = {start.a, start.b, start.phi};
  p.t_max = cfg.t_max_factor * std::fmax(1.0, cfg.phi0);
  p.controls.rel_tol = cfg.rel_tol;
  p.controls.abs_tol = cfg.abs_tol;
  p.controls.max_steps = cfg.max_steps;
  p.controls.max_sample_spacing = cfg.max_sample_spacing;

  EventSpec evQ;
  evQ.fn = [&E, eps = cfg.eps_Q_rel](double s, const double* y) {
    if (!(y[0] > 0.0) || !(y[1] > 0.0)) return std::numeric_limits<double>::quiet_NaN();
    return E.eval_Q({y[0], y[1]}, s) + eps * E.Phi11(y[1], y[1]);
  };
  evQ.direction = 1;
  evQ.terminal = true;
  p.events.push_back(evQ);

  if (cfg.eps_ab > 0.0) {
    EventSpec evAB;
    evAB.fn = [eps = cfg.eps_ab](double, const double* y) {
      return (y[1] - y[0]) - eps * std::fmax(1.0, y[1]);
    };
    evAB.direction = -1;
    evAB.terminal = true;
    p.events.push_back(evAB);
  }

  traj.arc = integrate(p);

  // A singular approach that dies by underflow ends in micro-step chatter
  // around the closest sonic approach. Samples within the terminal event
  // resolution of the stop abscissa form one numerical instant; represent
  // them by the closest-approach member and drop the rest.
  if (traj.arc.termination == Termination::step_underflow && traj.arc.size() > 2) {
    const double t_end = traj.arc.t.back();
    const double cell = 1e-12 * std::fmax(1.0, std::fabs(t_end));
    size_t first = traj.arc.size() - 1;
    while (first > 1 && t_end - traj.arc.t[first - 1] <= cell) --first;
    size_t best = first;
    double best_evq = -std::numeric_limits<double>::infinity();
    for (size_t i = first; i < traj.arc.size(); ++i) {
      const double* yi = traj.arc.state(i);
      const double evq = E.eval_Q({yi[0], yi[1]}, traj.arc.t[i]) +
                         cfg.eps_Q_rel * E.Phi11(yi[1], yi[1]);
      if (evq > best_evq) {
        best_evq = evq;
        best = i;
      }
    }
    if (best != first) {
      traj.arc.t[first] = traj.arc.t[best];
      for (int c = 0; c < 3; ++c) {
        traj.arc.y[first * 3 + c] = traj.arc.y[best * 3 + c];
        traj.arc.f[first * 3 + c] = traj.arc.f[best * 3 + c];
      }
    }
    const size_t keep = first + 1;
    if (keep < traj.arc.size()) {
      traj.arc.t.resize(keep);
      traj.arc.y.resize(keep * 3);
      traj.arc.f.resize(keep * 3);
    }
  }

  const size_t last = traj.arc.size() - 1;
  traj.T = traj.arc.t[last];
  traj.Q_at_stop = traj.Q(last);
  traj.width_at_stop = traj.b(last) - traj.a(last);

  switch (traj.arc.termination) {
    case Termination::event:
      traj.stop = traj.arc.event_index == 0 ? StopKind::sonic_event : StopKind::contact_event;
      break;
    case Termination::reached_t_max:
      traj.stop = StopKind::reached_end;
      break;
    case Termination::step_budget:
      traj.stop = StopKind::step_budget;
      break;
    case Termination::step_underflow: {
      const double eps_abs = cfg.eps_Q_rel * E.Phi11(traj.b(last), traj.b(last));
      if (std::fabs(traj.Q_at_stop) > 100.0 * eps_abs)
        throw StepUnderflow("solve_cavity: step underflow at s=" + fmt(traj.T) +
                            " with Q=" + fmt(traj.Q_at_stop) + ", far from the sonic set");
      traj.stop = StopKind::step_underflow;
      break;
    }
  }

  // Interlock against structural violations; tolerance-level noise from long
  // b-contraction phases (wide s0 overrides) stays well above this gate.
  const MonotonicityMargins m = monotonicity_margins(traj);
  if (m.min() < -1e-6)
    throw HypothesisViolation("solve_cavity: monotonicity invariant breached, margin " +
                              fmt(m.min()));
  return traj;
}

MonotonicityMargins monotonicity_margins(const CavityTrajectory& traj) {
  MonotonicityMargins m;
  const size_t n = traj.size();
  m.a_increase = m.b_decrease = m.width_increase = m.width_positive = m.q_negative =
      std::numeric_limits<double>::infinity();
  for (size_t i = 0; i + 1 < n; ++i) {
    const double a0 = traj.a(i), a1 = traj.a(i + 1);
    const double b0 = traj.b(i), b1 = traj.b(i + 1);
    m.a_increase = std::fmin(m.a_increase, (a1 - a0) / std::fmax(1.0, std::fabs(a0)));
    m.b_decrease = std::fmin(m.b_decrease, (b0 - b1) / std::fmax(1.0, std::fabs(b0)));
    m.width_increase =
        std::fmin(m.width_increase, ((a1 - b1) - (a0 - b0)) / std::fmax(1.0, std::fabs(b0)));
    m.q_negative = std::fmin(m.q_negative, -traj.Q(i) / std::fmax(1.0, traj.s(i) * traj.s(i)));
  }
  for (size_t i = 0; i < n; ++i)
    m.width_positive =
        std::fmin(m.width_positive, (traj.b(i) - traj.a(i)) / std::fmax(1.0, traj.b(i)));
  return m;
}

double MonotonicityMargins::min() const {
  return std::fmin(std::fmin(a_increase, b_decrease),
                   std::fmin(width_increase, std::fmin(width_positive, q_negative)));
}

ConnectionResult find_connection(const CavityTrajectory& traj) {
  const StoredEnergy& E = *traj.energy;
  const size_t n = traj.size();
  if (n < 2) throw NoConnection("find_connection: trajectory has too few samples");

  std::vector<double> pv(n);
  for (size_t i = 0; i < n; ++i) pv[i] = traj.p(i);

  // p(s) -> +inf as s -> 0; the connection is its first downward crossing.
  size_t cross = n;
  int sign_changes = 0;
  auto pos = [](double x) { return x > 0.0; };
  for (size_t i = 0; i + 1 < n; ++i) {
    if (pos(pv[i]) != pos(pv[i + 1])) {
      ++sign_changes;
      if (cross == n) cross = i;
    }
  }
  if (sign_changes > 1)
    throw MultipleRoots("find_connection: " + std::to_string(sign_changes) +
                        " sign changes of the connection residual");

  ConnectionResult out;
  out.T = traj.T;

  if (sign_changes == 1 && pos(pv[cross])) {
    const double lo = traj.s(cross), hi = traj.s(cross + 1);
    out.sigma = refine_root([&traj](double s) { return traj.p_at(s); }, lo, hi);
    const RadialState st = traj.state_at(out.sigma);
    out.a_minus = st.a;
    out.Lambda = st.b;
    out.kind = ConnectionKind::shock;
  } else if (sign_changes == 0) {
    const size_t last = n - 1;
    const double width = traj.b(last) - traj.a(last);
    const double eps_abs = traj.config.eps_Q_rel * E.Phi11(traj.b(last), traj.b(last));
    const bool contact = width <= traj.config.eps_ab * std::fmax(1.0, traj.b(last));
    const bool sonic = std::fabs(traj.Q_at_stop) <= 100.0 * eps_abs;
    if (!contact && !sonic)
      throw NoConnection("find_connection: residual keeps its sign and the arc ends at width " +
                         fmt(width) + ", Q=" + fmt(traj.Q_at_stop));
    out.sigma = traj.T;
    out.a_minus = traj.a(last);
    out.Lambda = traj.b(last);
    out.kind = ConnectionKind::sonic;
  } else {
    // A single upward crossing contradicts p(0+) = +inf.
    throw NoConnection("find_connection: residual starts nonpositive at the hand-off");
  }

  out.jump = out.Lambda - out.a_minus;
  out.residual = std::fabs(E.eval_R({out.a_minus, out.Lambda}, out.sigma));
  out.lax_margin_low = out.sigma * out.sigma - E.Phi11(out.Lambda, out.Lambda);
  out.lax_margin_high = E.Phi11(out.a_minus, out.Lambda) - out.sigma * out.sigma;
  out.lax_ok = out.kind == ConnectionKind::sonic ||
               (out.lax_margin_low > 0.0 && out.lax_margin_high > 0.0);

  // One-sided slope when sigma sits at the stop abscissa.
  const double hstep = 1e-6 * std::fmax(1.0, out.sigma);
  const double smax = traj.T, smin = traj.s0;
  const double sp = std::fmin(out.sigma + hstep, smax);
  const double sm = std::fmax(out.sigma - hstep, smin);
  out.p_slope = (traj.p_at(sp) - traj.p_at(sm)) / (sp - sm);
  return out;
}

double cauchy_stress(const CavityTrajectory& traj, double s) {
  double buf[3];
  traj.arc.eval(s, buf);
  const double bb = buf[2] / s;
  return traj.energy->radial_stress({buf[0], bb});
}

}  // namespace radcav
