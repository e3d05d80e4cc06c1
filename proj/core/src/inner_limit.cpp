#include "radcav/inner_limit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "radcav/errors.hpp"

namespace radcav {

namespace {

// Equilibrium right-hand side in (a, b, psi): the dynamic system with
// s^2 - Phi11 replaced by -Phi11.
auto equilibrium_rhs(const StoredEnergy& E) {
  const int d = E.dim();
  return [&E, d](double xi, const double* y, double* dy) {
    // Trial stages may overshoot the admissible cone; report them as
    // non-finite so the step controller rejects and shrinks.
    if (!(y[0] > 0.0) || !(y[1] > 0.0) || !std::isfinite(y[0]) || !std::isfinite(y[1])) {
      dy[0] = dy[1] = dy[2] = std::numeric_limits<double>::quiet_NaN();
      return;
    }
    const RadialState st{y[0], y[1]};
    const double P = E.eval_P(st);
    const double F = E.Phi11(y[0], y[1]);
    dy[0] = -((d - 1) / xi) * (y[0] - y[1]) * P / F;
    dy[1] = (y[0] - y[1]) / xi;
    dy[2] = y[0];
  };
}

// Composite trapezoid cumulative over (x, w) with a prepended node (0, w0).
std::vector<double> cumtrapz(double w0, const std::vector<double>& x,
                             const std::vector<double>& w) {
  std::vector<double> cum(x.size());
  double acc = 0.5 * (w0 + w[0]) * x[0];
  cum[0] = acc;
  for (size_t i = 1; i < x.size(); ++i) {
    acc += 0.5 * (w[i - 1] + w[i]) * (x[i] - x[i - 1]);
    cum[i] = acc;
  }
  return cum;
}

// Fit the remaining integral beyond xe as c/xe, with c the median of
// (cum_end - cum)/(1/x - 1/xe) over the last decade of samples.
double tail_integral(const std::vector<double>& x, const std::vector<double>& w,
                     const std::vector<double>& cum) {
  const double xe = x.back();
  const double cend = cum.back();
  std::vector<double> cs;
  for (size_t i = 0; i + 1 < x.size(); ++i) {
    if (x[i] < 0.1 * xe) continue;
    const double den = 1.0 / x[i] - 1.0 / xe;
    if (den <= 0.0) continue;
    cs.push_back((cend - cum[i]) / den);
  }
  if (cs.size() < 3) return std::fabs(w.back()) * xe;
  const size_t mid = cs.size() / 2;
  std::nth_element(cs.begin(), cs.begin() + static_cast<long>(mid), cs.end());
  return std::fabs(cs[mid]) / xe;
}

}  // namespace

InnerSolution solve_inner(const StoredEnergy& E, double v0, double xi_max,
                          const InnerOptions& opts) {
  E.require_solvable();
  if (!(v0 > 0.0) || !std::isfinite(v0)) throw ConfigError("solve_inner: v0 must be positive");
  if (!(xi_max > 0.0)) throw ConfigError("solve_inner: xi_max must be positive");
  const double xi0 = opts.xi0_override > 0.0 ? opts.xi0_override
                                             : opts.s0_factor * std::fmin(1.0, E.nu());
  const SeriesStart start = series_start_at(E, 1.0, v0, xi0);

  InnerSolution sol;
  sol.energy = &E;
  sol.v0 = v0;
  sol.c0 = start.c0;
  sol.xi0 = xi0;

  IvpProblem p;
  p.dim = 3;
  p.rhs = equilibrium_rhs(E);
  p.t0 = xi0;
  p.y0 = {start.a, start.b, start.phi};
  p.t_max = xi_max;
  p.controls.rel_tol = opts.rel_tol;
  p.controls.abs_tol = opts.abs_tol;
  p.controls.max_steps = opts.max_steps;
  p.controls.max_sample_spacing = opts.max_sample_spacing;

  if (opts.bracket_tol > 0.0) {
    EventSpec width;
    width.fn = [tol = opts.bracket_tol](double, const double* y) {
      return (y[1] - y[0]) - tol;
    };
    width.direction = -1;
    width.terminal = true;
    p.events.push_back(width);
  }

  sol.arc = integrate(p);
  if (sol.arc.termination == Termination::step_underflow)
    throw StepUnderflow("solve_inner: step underflow at xi=" + std::to_string(sol.arc.t.back()));

  const size_t last = sol.arc.size() - 1;
  sol.xi_end = sol.arc.t[last];
  const double a_end = sol.a0(last), b_end = sol.b0(last);
  const double eps_cert = 100.0 * opts.rel_tol * std::fmax(1.0, std::fabs(b_end));
  sol.bracket_lo = a_end - eps_cert;
  sol.bracket_hi = b_end + eps_cert;
  sol.lambda0 = 0.5 * (sol.bracket_lo + sol.bracket_hi);
  sol.slow_convergence =
      sol.arc.termination != Termination::event &&
      (opts.bracket_tol > 0.0 ? (b_end - a_end) > opts.bracket_tol
                              : sol.arc.termination == Termination::step_budget);
  return sol;
}

ReprResult lambda0_repr1(const InnerSolution& sol, const StoredEnergy& E) {
  const int d = E.dim();
  const size_t n = sol.size();
  std::vector<double> x(n), w(n);
  for (size_t i = 0; i < n; ++i) {
    const double a = sol.a0(i), b = sol.b0(i), psi = sol.psi0(i);
    const double delta = a * powi(b, d - 1);
    const double f0 = E.h().d2(delta) + E.g().d2(a) / powi(b, 2 * d - 2);
    const double D0 =
        (-a * (a - b) * E.g().d2(a) + b * (E.g().d1(a) - E.g().d1(b))) / powi(b, d - 1);
    x[i] = sol.xi(i);
    w[i] = (1 - d) * D0 / (psi * f0);
  }
  const std::vector<double> cum = cumtrapz(sol.c0, x, w);
  const double total = cum.back();
  ReprResult out;
  const double radicand = sol.v0 + total;
  if (!(radicand > 0.0)) throw DomainError("lambda0_repr1: nonpositive radicand");
  out.value = std::pow(radicand, 1.0 / d);
  const double tail_I = tail_integral(x, w, cum);
  out.tail = tail_I * std::pow(radicand, 1.0 / d - 1.0) / d;
  return out;
}

ReprResult lambda0_repr2(const InnerSolution& sol, const StoredEnergy& E) {
  if (!E.check_hypotheses().pass(6))
    throw HypothesisViolation("lambda0_repr2 requires H6 (chi strictly increasing)");
  const int d = E.dim();
  const size_t n = sol.size();
  std::vector<double> x(n), w(n);
  for (size_t i = 0; i < n; ++i) {
    const double a = sol.a0(i), b = sol.b0(i), psi = sol.psi0(i);
    x[i] = sol.xi(i);
    w[i] = (d - 1) / psi * std::pow(b, 2.0 - d) * (E.g().d1(b) - (a / b) * E.g().d1(a));
  }
  const std::vector<double> cum = cumtrapz((d - 1) * E.gamma(), x, w);
  ReprResult out;
  out.value = E.chi_inverse(E.h().d1(sol.v0) + cum.back());
  const double tail_I = tail_integral(x, w, cum);
  out.tail = tail_I / E.chi_prime(out.value);
  return out;
}

EquilibriumSolution solve_equilibrium_full(const StoredEnergy& E, double phi0,
                                           const BoundaryCondition& boundary,
                                           const InnerOptions& opts) {
  E.require_solvable();
  if (!(phi0 > 0.0) || !std::isfinite(phi0))
    throw ConfigError("solve_equilibrium: phi0 must be positive");
  double v0;
  if (boundary.kind == BoundaryKind::stress_free) {
    v0 = E.natural_stretch();
    if (!std::isfinite(v0)) throw HypothesisViolation("natural stretch h'^{-1}(0) unavailable");
  } else {
    v0 = E.h_prime_inverse(boundary.traction(phi0));
  }
  const double s0 = opts.xi0_override > 0.0
                        ? opts.xi0_override
                        : opts.s0_factor * std::fmin(1.0, std::fmin(phi0, E.nu()));
  const SeriesStart start = series_start_at(E, phi0, v0, s0);

  EquilibriumSolution sol;
  sol.energy = &E;
  sol.phi0 = phi0;
  sol.v0 = v0;
  sol.c0 = start.c0;
  sol.s0 = s0;

  IvpProblem p;
  p.dim = 3;
  p.rhs = equilibrium_rhs(E);
  p.t0 = s0;
  p.y0 = {start.a, start.b, start.phi};
  p.t_max = 1.0;
  p.controls.rel_tol = opts.rel_tol;
  p.controls.abs_tol = opts.abs_tol;
  p.controls.max_steps = opts.max_steps;
  p.controls.max_sample_spacing = opts.max_sample_spacing;

  sol.arc = integrate(p);
  if (sol.arc.termination != Termination::reached_t_max)
    throw StepUnderflow("solve_equilibrium: integration stopped before s=1");
  sol.lambda = sol.arc.state(sol.arc.size() - 1)[1];
  return sol;
}

EquilibriumCurvePoint solve_equilibrium(const StoredEnergy& E, double phi0,
                                        const BoundaryCondition& boundary,
                                        const InnerOptions& opts) {
  const EquilibriumSolution sol = solve_equilibrium_full(E, phi0, boundary, opts);
  return {phi0, sol.lambda};
}

InnerBoundMargins inner_bound_margins(const InnerSolution& sol) {
  InnerBoundMargins m;
  const double L = sol.lambda0;
  const double inf = std::numeric_limits<double>::infinity();
  m.psi_lower = m.psi_upper = m.a_below = m.b_above = m.decay = inf;
  double width_at_1 = inf;
  const bool have_unit = sol.xi_end >= 1.0 && sol.xi0 <= 1.0;
  if (have_unit) {
    double buf[3];
    sol.arc.eval(1.0, buf);
    width_at_1 = buf[1] - buf[0];
  }
  for (size_t i = 0; i < sol.size(); ++i) {
    const double xi = sol.xi(i), a = sol.a0(i), b = sol.b0(i), psi = sol.psi0(i);
    m.psi_lower = std::fmin(m.psi_lower, psi - std::fmax(1.0, L * xi));
    m.psi_upper = std::fmin(m.psi_upper, 1.0 + L * xi - psi);
    m.a_below = std::fmin(m.a_below, L - a);
    m.b_above = std::fmin(m.b_above, b - L);
    if (have_unit && xi >= 1.0) m.decay = std::fmin(m.decay, width_at_1 / xi - (b - a));
  }
  return m;
}

double InnerBoundMargins::min() const {
  return std::fmin(std::fmin(psi_lower, psi_upper),
                   std::fmin(a_below, std::fmin(b_above, decay)));
}

}  // namespace radcav
