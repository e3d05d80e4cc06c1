#include "radcav/bifurcation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <sstream>
#include <thread>

#include "radcav/errors.hpp"

namespace radcav {

namespace {

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(12);
  os << x;
  return os.str();
}

double reference_v0(const StoredEnergy& E, const BoundaryCondition& boundary) {
  if (boundary.kind == BoundaryKind::stress_free) {
    const double H = E.natural_stretch();
    if (!std::isfinite(H)) throw HypothesisViolation("natural stretch h'^{-1}(0) unavailable");
    return H;
  }
  return E.h_prime_inverse(boundary.traction(0.0));
}

CavityConfig make_config(const StoredEnergy& E, const BoundaryCondition& boundary, double phi0,
                         const SweepOptions& o) {
  CavityConfig c;
  c.E = &E;
  c.phi0 = phi0;
  c.boundary = boundary;
  c.rel_tol = o.rel_tol;
  c.abs_tol = o.abs_tol;
  c.s0_factor = o.s0_factor;
  c.t_max_factor = o.t_max_factor;
  c.eps_Q_rel = o.eps_Q_rel;
  c.eps_ab = o.eps_ab;
  c.max_sample_spacing = o.max_sample_spacing;
  c.max_steps = o.max_steps;
  return c;
}

InnerOptions make_inner_options(const SweepOptions& o) {
  InnerOptions io;
  io.rel_tol = o.rel_tol;
  io.abs_tol = o.abs_tol;
  io.bracket_tol = o.bracket_tol;
  io.s0_factor = o.inner_s0_factor;
  io.max_sample_spacing = o.inner_max_sample_spacing;
  io.max_steps = o.max_steps;
  return io;
}

// Aitken extrapolation of the last three terms; falls back to the last term
// when the difference ratio degenerates.
double aitken(double x0, double x1, double x2) {
  const double den = (x2 - x1) - (x1 - x0);
  if (den == 0.0 || !std::isfinite(den)) return x2;
  return x2 - (x2 - x1) * (x2 - x1) / den;
}

// Least-squares slope of log(y) against log(x).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const size_t n = x.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < n; ++i) {
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace

size_t BifurcationCurve::n_ok() const {
  size_t k = 0;
  for (const auto& pt : dynamic)
    if (pt.ok()) ++k;
  return k;
}

BifurcationCurve sweep(const StoredEnergy& E, const BoundaryCondition& boundary,
                       const std::vector<double>& phi0_grid, const SweepOptions& opts) {
  if (phi0_grid.empty()) throw ConfigError("sweep: empty phi0 grid");
  E.require_solvable();
  if (!E.check_hypotheses().pass(5))
    throw HypothesisViolation("sweep: H5 (uniform rank-one bound) required");

  BifurcationCurve curve;
  curve.energy = &E;
  curve.boundary = boundary;
  curve.options = opts;

  curve.inner = solve_inner(E, reference_v0(E, boundary), opts.xi_max, make_inner_options(opts));
  curve.sigma0 = std::sqrt(E.Phi11(curve.inner.lambda0, curve.inner.lambda0));

  std::vector<double> grid = phi0_grid;
  std::sort(grid.begin(), grid.end());
  const size_t n = grid.size();
  curve.dynamic.resize(n);
  curve.equilibrium.resize(n);

  auto run_point = [&](size_t i) {
    DynamicPoint& pt = curve.dynamic[i];
    pt.phi0 = grid[i];
    try {
      const CavityConfig cfg = make_config(E, boundary, grid[i], opts);
      pt.v0 = cfg.resolved_v0();
      const CavityTrajectory traj = solve_cavity(cfg);
      const ConnectionResult conn = find_connection(traj);
      pt.Lambda = conn.Lambda;
      pt.sigma = conn.sigma;
      pt.jump = conn.jump;
      pt.kind = conn.kind;
      pt.T = conn.T;
      pt.status = "ok";
    } catch (const std::exception& e) {
      pt.status = e.what();
    }
    EquilibriumCurvePoint& eq = curve.equilibrium[i];
    eq.phi0 = grid[i];
    eq.lambda = std::numeric_limits<double>::quiet_NaN();
    try {
      InnerOptions io = make_inner_options(opts);
      io.s0_factor = opts.s0_factor;
      io.max_sample_spacing = 0.0;
      eq.lambda = solve_equilibrium(E, grid[i], boundary, io).lambda;
    } catch (const std::exception&) {
    }
  };

  const int workers = std::max(1, std::min<int>(opts.threads, static_cast<int>(n)));
  if (workers <= 1) {
    for (size_t i = 0; i < n; ++i) run_point(i);
  } else {
    std::atomic<size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(workers));
    for (int w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) run_point(i);
      });
    for (auto& th : pool) th.join();
  }
  return curve;
}

bool LimitReport::all_ok() const {
  for (const auto& c : checks)
    if (!c.ok) return false;
  return true;
}

std::string LimitReport::text() const {
  std::ostringstream os;
  os << "limit checks along phi0 ->";
  for (double p : tail_phi0) os << " " << fmt(p);
  os << "\n";
  os << "sigma0 = " << fmt(sigma0)
     << ", Richardson Lambda = " << fmt(richardson_lambda) << "\n";
  for (const auto& c : checks) {
    os << "  " << (c.ok ? "pass" : "FAIL") << "  " << c.name << "  margin=" << fmt(c.margin);
    if (!c.detail.empty()) os << "  [" << c.detail << "]";
    os << "\n";
  }
  return os.str();
}

LimitReport verify_limits(const BifurcationCurve& curve) {
  const StoredEnergy& E = *curve.energy;
  const int d = E.dim();

  std::vector<double> tail;
  for (const auto& pt : curve.dynamic)
    if (pt.ok() && pt.phi0 <= 0.2) tail.push_back(pt.phi0);
  std::sort(tail.begin(), tail.end(), std::greater<double>());
  if (tail.size() < 4)
    throw ConfigError("verify_limits: needs at least four ok samples with phi0 <= 0.2");

  LimitReport rep;
  rep.tail_phi0 = tail;
  rep.sigma0 = curve.sigma0;
  const double L0 = curve.inner.lambda0;
  const double L0d = std::pow(L0, d);

  // Re-solve the tail without the contact stop so sigma is not clipped by
  // the width event receding from the connection as phi0 shrinks.
  std::vector<CavityTrajectory> trajs;
  std::vector<ConnectionResult> conns;
  for (double p : tail) {
    CavityConfig cfg = make_config(E, curve.boundary, p, curve.options);
    cfg.eps_ab = 0.0;
    trajs.push_back(solve_cavity(cfg));
    conns.push_back(find_connection(trajs.back()));
  }
  const size_t m = tail.size();

  {
    LimitCheck c;
    c.name = "shock speed |sigma - sigma0| decreasing";
    c.margin = std::numeric_limits<double>::infinity();
    std::string vals;
    for (size_t k = 0; k + 1 < m; ++k) {
      const double e0 = std::fabs(conns[k].sigma - curve.sigma0);
      const double e1 = std::fabs(conns[k + 1].sigma - curve.sigma0);
      c.margin = std::fmin(c.margin, e0 - e1);
    }
    for (size_t k = 0; k < m; ++k)
      vals += (k ? ", " : "") + fmt(std::fabs(conns[k].sigma - curve.sigma0));
    c.ok = c.margin > 0.0;
    c.detail = vals;
    rep.checks.push_back(c);
  }

  {
    LimitCheck c;
    c.name = "stretch |Lambda - Lambda0| decreasing";
    c.margin = std::numeric_limits<double>::infinity();
    for (size_t k = 0; k + 1 < m; ++k) {
      const double e0 = std::fabs(conns[k].Lambda - L0);
      const double e1 = std::fabs(conns[k + 1].Lambda - L0);
      c.margin = std::fmin(c.margin, e0 - e1);
    }
    c.ok = c.margin > 0.0;
    rep.checks.push_back(c);
  }

  {
    LimitCheck c;
    c.name = "Richardson Lambda inside bracket +- 1e-3";
    rep.richardson_lambda =
        aitken(conns[m - 3].Lambda, conns[m - 2].Lambda, conns[m - 1].Lambda);
    const double lo = curve.inner.bracket_lo - 1e-3, hi = curve.inner.bracket_hi + 1e-3;
    c.margin = std::fmin(rep.richardson_lambda - lo, hi - rep.richardson_lambda);
    c.ok = c.margin > 0.0;
    c.detail = "extrapolant " + fmt(rep.richardson_lambda) + " vs bracket [" +
               fmt(curve.inner.bracket_lo) + ", " + fmt(curve.inner.bracket_hi) + "]";
    rep.checks.push_back(c);
  }

  {
    // Shock strengths near the limit sit at the integration noise floor, so
    // the decrease is asserted with an absolute slack.
    constexpr double kJumpSlack = 1e-9;
    LimitCheck c;
    c.name = "jump nonincreasing to zero";
    c.margin = std::numeric_limits<double>::infinity();
    std::string vals;
    for (size_t k = 0; k + 1 < m; ++k)
      c.margin = std::fmin(c.margin, conns[k].jump + kJumpSlack - conns[k + 1].jump);
    c.margin = std::fmin(c.margin, kJumpSlack - conns[m - 1].jump);
    for (size_t k = 0; k < m; ++k) vals += (k ? ", " : "") + fmt(conns[k].jump);
    c.ok = c.margin > 0.0;
    c.detail = vals;
    rep.checks.push_back(c);
  }

  {
    LimitCheck c;
    c.name = "envelope 0 < phi/s - Lambda < phi0/s and 0 < phi/s - a < phi0/s";
    const CavityTrajectory& tr = trajs[m - 1];
    const ConnectionResult& cn = conns[m - 1];
    const double cap = cn.sigma * (1.0 - 1e-3);
    c.margin = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < tr.size() && tr.s(i) <= cap; ++i) {
      const double s = tr.s(i);
      const double bb = tr.phi(i) / s;
      c.margin = std::fmin(c.margin, bb - cn.Lambda);
      c.margin = std::fmin(c.margin, tail[m - 1] - s * (bb - cn.Lambda));
      c.margin = std::fmin(c.margin, bb - tr.a(i));
      c.margin = std::fmin(c.margin, tail[m - 1] - s * (bb - tr.a(i)));
    }
    c.ok = c.margin > 0.0;
    c.detail = "phi0 = " + fmt(tail[m - 1]) + ", samples to s = " + fmt(cap);
    rep.checks.push_back(c);
  }

  {
    LimitCheck c;
    c.name = "v(s) -> Lambda0^d pointwise";
    c.margin = std::numeric_limits<double>::infinity();
    std::string det;
    for (double sp : {0.2, 0.5, 1.0}) {
      if (sp >= curve.sigma0) continue;
      bool usable = true;
      for (size_t k = 0; k < m; ++k)
        if (sp <= trajs[k].s0 || sp >= conns[k].sigma) usable = false;
      if (!usable) continue;
      double prev = std::numeric_limits<double>::quiet_NaN();
      for (size_t k = 0; k < m; ++k) {
        double buf[3];
        trajs[k].arc.eval(sp, buf);
        const double v = buf[0] * powi(buf[2] / sp, d - 1);
        const double err = std::fabs(v - L0d);
        if (k > 0) c.margin = std::fmin(c.margin, prev - err);
        prev = err;
      }
      det += (det.empty() ? "s probes:" : "") + std::string(" ") + fmt(sp);
    }
    c.ok = c.margin > 0.0;
    c.detail = det;
    rep.checks.push_back(c);
  }

  return rep;
}

std::string RescalingReport::text() const {
  std::ostringstream os;
  os << "rescaling distance on [0, " << fmt(tau) << "]\n";
  for (size_t i = 0; i < phi0.size(); ++i)
    os << "  phi0 = " << fmt(phi0[i]) << "  sup^2 = " << fmt(sup_sq[i]) << "\n";
  os << "fitted order in phi0: " << fmt(fitted_order) << "\n";
  return os.str();
}

RescalingReport verify_rescaling(const StoredEnergy& E, const BoundaryCondition& boundary,
                                 double tau, const std::vector<double>& phi0_grid,
                                 const SweepOptions& opts) {
  if (!(tau > 0.0)) throw ConfigError("verify_rescaling: tau must be positive");
  if (phi0_grid.empty()) throw ConfigError("verify_rescaling: empty phi0 grid");
  const int d = E.dim();

  InnerOptions io = make_inner_options(opts);
  io.bracket_tol = 0.0;  // integrate the reference through [0, tau] unconditionally
  const double v00 = reference_v0(E, boundary);
  const InnerSolution inner = solve_inner(E, v00, tau, io);

  auto series_psi = [d](double v0, double k, double xi) {
    return std::pow(1.0 + v0 * powi(xi, d) + (static_cast<double>(d) / (d + 1)) * k * powi(xi, d + 1),
                    1.0 / d);
  };

  RescalingReport rep;
  rep.tau = tau;
  const int M = 2000;

  for (double p : phi0_grid) {
    const CavityConfig cfg = make_config(E, boundary, p, opts);
    const CavityTrajectory traj = solve_cavity(cfg);
    if (tau * p >= traj.T)
      throw GridViolation("verify_rescaling: tau*phi0 = " + fmt(tau * p) +
                          " exceeds the trajectory span T = " + fmt(traj.T));
    const double k_dyn = traj.c0 * p;  // series slope in the rescaled variable
    const double xi_lo_dyn = traj.s0 / p;
    double sup = 0.0;
    for (int j = 0; j <= M; ++j) {
      const double xi = tau * j / M;
      double psi, delta;
      if (xi <= xi_lo_dyn) {
        psi = series_psi(traj.v0, k_dyn, xi);
        delta = traj.v0 + k_dyn * xi;
      } else {
        double buf[3];
        traj.arc.eval(xi * p, buf);
        psi = buf[2] / p;
        delta = buf[0] * powi(buf[2] / (xi * p), d - 1);
      }
      double psi0, delta0;
      if (xi <= inner.xi0) {
        psi0 = series_psi(inner.v0, inner.c0, xi);
        delta0 = inner.v0 + inner.c0 * xi;
      } else {
        double buf[3];
        inner.arc.eval(xi, buf);
        psi0 = buf[2];
        delta0 = buf[0] * powi(buf[1], d - 1);
      }
      const double dpsi = psi - psi0, ddel = delta - delta0;
      sup = std::fmax(sup, dpsi * dpsi + ddel * ddel);
    }
    rep.phi0.push_back(p);
    rep.sup_sq.push_back(sup);
  }

  if (rep.phi0.size() >= 2) {
    std::vector<double> dist(rep.sup_sq.size());
    for (size_t i = 0; i < dist.size(); ++i) dist[i] = std::sqrt(rep.sup_sq[i]);
    rep.fitted_order = loglog_slope(rep.phi0, dist);
  }
  return rep;
}

}  // namespace radcav
