#include "app.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>
#include <vector>

#include "config.hpp"
#include "radcav/bifurcation.hpp"
#include "radcav/cavity_solver.hpp"
#include "radcav/errors.hpp"
#include "radcav/inner_limit.hpp"
#include "radcav/io.hpp"
#include "radcav/stored_energy.hpp"
#include "svg.hpp"

namespace fs = std::filesystem;

namespace radcav::cli {

namespace {

std::string short_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream f(path);
  if (!f) throw Error("cannot open '" + path.string() + "' for writing");
  return f;
}

CavityConfig make_cavity_config(const RunConfig& rc, const StoredEnergy& E, double phi0) {
  CavityConfig c;
  c.E = &E;
  c.phi0 = phi0;
  c.boundary = rc.boundary;
  c.rel_tol = rc.solver.rel_tol;
  c.abs_tol = rc.solver.abs_tol;
  c.s0_factor = rc.solver.s0_factor;
  c.s0_override = rc.s0_override;
  c.t_max_factor = rc.solver.t_max_factor;
  c.eps_Q_rel = rc.solver.eps_Q_rel;
  c.eps_ab = rc.solver.eps_ab;
  c.max_sample_spacing = rc.solver.max_sample_spacing;
  c.max_steps = rc.solver.max_steps;
  return c;
}

InnerOptions make_inner_options(const RunConfig& rc) {
  InnerOptions io;
  io.rel_tol = rc.solver.rel_tol;
  io.abs_tol = rc.solver.abs_tol;
  io.bracket_tol = rc.solver.bracket_tol;
  io.s0_factor = rc.solver.inner_s0_factor;
  io.xi0_override = rc.s0_override;
  io.max_sample_spacing = rc.solver.inner_max_sample_spacing;
  io.max_steps = rc.solver.max_steps;
  return io;
}

// Reference specific volume at phi0 = 0: h'^{-1}(T_rad(0)).
double reference_v0(const RunConfig& rc, const StoredEnergy& E) {
  if (rc.v0_override > 0.0) return rc.v0_override;
  return E.h_prime_inverse(rc.boundary.traction(0.0));
}

// Index subsample keeping first and last points; the SVG does not need
// every integrator sample.
template <typename Get>
std::vector<double> thin(size_t n, size_t max_n, Get get) {
  std::vector<double> out;
  if (n == 0) return out;
  const size_t stride = std::max<size_t>(1, n / max_n);
  for (size_t i = 0; i < n; i += stride) out.push_back(get(i));
  if ((n - 1) % stride != 0) out.push_back(get(n - 1));
  return out;
}

std::string kind_name(ConnectionKind k) {
  return k == ConnectionKind::shock ? "shock" : "sonic";
}

void write_cavity_summary(std::ostream& os,
                          const std::vector<std::pair<double, ConnectionResult>>& rows) {
  os << "phi0,sigma,Lambda,a_minus,jump,kind,lax,residual,T\n";
  for (const auto& [phi0, c] : rows) {
    os << format_g17(phi0) << ',' << format_g17(c.sigma) << ',' << format_g17(c.Lambda)
       << ',' << format_g17(c.a_minus) << ',' << format_g17(c.jump) << ','
       << kind_name(c.kind) << ',' << (c.lax_ok ? "ok" : "fail") << ','
       << format_g17(c.residual) << ',' << format_g17(c.T) << '\n';
  }
}

int do_check(const RunConfig& rc, const StoredEnergy& E) {
  const HypothesisReport& rep = E.check_hypotheses();
  const std::string text = rep.summary();
  std::cout << text;
  fs::create_directories(rc.out_dir);
  open_out(fs::path(rc.out_dir) / "hypotheses.txt") << text;
  return rep.solvable() ? 0 : 1;
}

int do_cavity(const RunConfig& rc, const StoredEnergy& E, double phi0_flag) {
  fs::create_directories(rc.out_dir);
  const std::vector<double> grid =
      phi0_flag > 0.0 ? std::vector<double>{phi0_flag} : rc.phi0_grid();

  SvgFigure fig("Specific volume along self-similar trajectories", "s", "v");
  std::vector<std::pair<double, ConnectionResult>> summary;
  std::vector<double> mark_x, mark_y;

  for (double phi0 : grid) {
    const CavityConfig cc = make_cavity_config(rc, E, phi0);
    const CavityTrajectory traj = solve_cavity(cc);
    const ConnectionResult conn = find_connection(traj);
    summary.emplace_back(phi0, conn);

    const std::string name = grid.size() == 1
                                 ? "trajectory.csv"
                                 : "trajectory_phi0_" + short_num(phi0) + ".csv";
    auto f = open_out(fs::path(rc.out_dir) / name);
    write_trajectory_csv(f, traj, conn);

    if (rc.svg) {
      const size_t n = traj.size();
      std::vector<double> xs, ys;
      for (size_t i = 0; i < n; i += std::max<size_t>(1, n / 1200)) {
        if (traj.s(i) > conn.sigma) break;
        xs.push_back(traj.s(i));
        ys.push_back(traj.v(i));
      }
      const RadialState st = traj.state_at(conn.sigma);
      xs.push_back(conn.sigma);
      ys.push_back(st.a * powi(st.b, E.dim() - 1));
      fig.add_polyline(xs, ys, "phi0=" + short_num(phi0));
      mark_x.push_back(conn.sigma);
      mark_y.push_back(ys.back());
    }

    std::cout << "phi0=" << short_num(phi0) << "  sigma=" << format_g17(conn.sigma)
              << "  Lambda=" << format_g17(conn.Lambda) << "  jump=" << format_g17(conn.jump)
              << "  kind=" << kind_name(conn.kind)
              << "  residual=" << format_g17(conn.residual) << '\n';
  }

  auto fsum = open_out(fs::path(rc.out_dir) / "cavity_summary.csv");
  write_cavity_summary(fsum, summary);
  if (rc.svg) {
    fig.add_markers(mark_x, mark_y, grid.size() == 1 ? "sigma" : "");
    fig.write((fs::path(rc.out_dir) / "cavity.svg").string());
  }
  return 0;
}

int do_bifurcation(const RunConfig& rc, const StoredEnergy& E, int threads) {
  fs::create_directories(rc.out_dir);
  const std::vector<double> grid = rc.phi0_grid();
  SweepOptions opts = rc.solver;
  opts.threads = threads;
  const BifurcationCurve curve = sweep(E, rc.boundary, grid, opts);

  {
    auto f = open_out(fs::path(rc.out_dir) / "dynamic.csv");
    write_dynamic_curve_csv(f, curve);
  }
  {
    auto f = open_out(fs::path(rc.out_dir) / "equilibrium.csv");
    write_equilibrium_csv(f, curve.equilibrium);
  }

  size_t ok_points = 0;
  std::ostringstream rep;
  rep << "bifurcation sweep over " << grid.size() << " boundary stretches\n";
  rep << "  Lambda0 bracket [" << format_g17(curve.inner.bracket_lo) << ", "
      << format_g17(curve.inner.bracket_hi) << "], midpoint "
      << format_g17(curve.inner.lambda0) << '\n';
  rep << "  sigma0 = " << format_g17(curve.sigma0) << '\n';
  for (size_t i = 0; i < curve.dynamic.size(); ++i) {
    const DynamicPoint& p = curve.dynamic[i];
    const bool eq_ok = std::isfinite(curve.equilibrium[i].lambda);
    if (p.ok() && eq_ok) ++ok_points;
    if (!p.ok())
      rep << "  phi0=" << short_num(p.phi0) << " dynamic failed: " << p.status << '\n';
    if (!eq_ok) rep << "  phi0=" << short_num(p.phi0) << " equilibrium failed\n";
  }
  rep << "  " << ok_points << "/" << grid.size() << " points ok\n";

  size_t tail_ok = 0;
  for (const DynamicPoint& p : curve.dynamic)
    if (p.ok() && p.phi0 <= 0.2) ++tail_ok;
  if (tail_ok >= 4) {
    const LimitReport lim = verify_limits(curve);
    rep << '\n' << lim.text();
  }

  const std::string text = rep.str();
  std::cout << text;
  open_out(fs::path(rc.out_dir) / "bifurcation.txt") << text;

  if (rc.svg) {
    SvgFigure fig("Bifurcation diagram", "phi0", "boundary stretch");
    std::vector<double> dx, dy, ex, ey;
    for (const DynamicPoint& p : curve.dynamic)
      if (p.ok()) {
        dx.push_back(p.phi0);
        dy.push_back(p.Lambda);
      }
    for (const EquilibriumCurvePoint& p : curve.equilibrium)
      if (std::isfinite(p.lambda)) {
        ex.push_back(p.phi0);
        ey.push_back(p.lambda);
      }
    fig.add_polyline(dx, dy, "dynamic Lambda");
    fig.add_polyline(ex, ey, "equilibrium lambda");
    fig.add_hline(curve.inner.lambda0, "Lambda0");
    fig.write((fs::path(rc.out_dir) / "bifurcation.svg").string());
  }

  return 10 * ok_points >= 9 * grid.size() ? 0 : 1;
}

int do_inner(const RunConfig& rc, const StoredEnergy& E) {
  fs::create_directories(rc.out_dir);
  const double v0 = reference_v0(rc, E);
  const InnerOptions io = make_inner_options(rc);
  const InnerSolution sol = solve_inner(E, v0, rc.solver.xi_max, io);

  {
    auto f = open_out(fs::path(rc.out_dir) / "inner.csv");
    write_inner_csv(f, sol);
  }

  std::ostringstream rep;
  rep << "limiting cavity profile, v0 = " << format_g17(v0) << ", c0 = "
      << format_g17(sol.c0) << '\n';
  rep << "  integrated xi in [" << short_num(sol.xi0) << ", " << short_num(sol.xi_end)
      << "], " << sol.size() << " samples\n";
  rep << "  Lambda0 bracket [" << format_g17(sol.bracket_lo) << ", "
      << format_g17(sol.bracket_hi) << "]\n";
  rep << "  Lambda0 midpoint " << format_g17(sol.lambda0) << " (width "
      << short_num(sol.bracket_hi - sol.bracket_lo) << ")\n";

  const ReprResult r1 = lambda0_repr1(sol, E);
  rep << "  volume representation:  " << format_g17(r1.value) << " (tail ~ "
      << short_num(r1.tail) << ")\n";
  try {
    const ReprResult r2 = lambda0_repr2(sol, E);
    rep << "  traction representation: " << format_g17(r2.value) << " (tail ~ "
        << short_num(r2.tail) << ")\n";
  } catch (const HypothesisViolation& e) {
    rep << "  traction representation: not applicable (" << e.what() << ")\n";
  }

  const InnerBoundMargins bm = inner_bound_margins(sol);
  auto verdict = [](double m) { return m > 0.0 ? "ok" : "VIOLATED"; };
  rep << "  bounds: psi0 > max(1, L*xi)       " << verdict(bm.psi_lower) << " (margin "
      << short_num(bm.psi_lower) << ")\n";
  rep << "          psi0 < 1 + L*xi           " << verdict(bm.psi_upper) << " (margin "
      << short_num(bm.psi_upper) << ")\n";
  rep << "          a0 < Lambda0 < b0         "
      << verdict(std::min(bm.a_below, bm.b_above)) << " (margins " << short_num(bm.a_below)
      << ", " << short_num(bm.b_above) << ")\n";
  rep << "          width decay past xi = 1   " << verdict(bm.decay) << " (margin "
      << short_num(bm.decay) << ")\n";

  const double vol_floor = std::pow(v0, 1.0 / E.dim());
  rep << "  Lambda0 - v0^(1/d) = " << short_num(sol.lambda0 - vol_floor) << " ("
      << verdict(sol.lambda0 - vol_floor) << ")\n";
  try {
    const double chi_floor = E.chi_inverse(E.h().d1(v0));
    rep << "  Lambda0 - chi^{-1}(h'(v0)) = " << short_num(sol.lambda0 - chi_floor) << " ("
        << verdict(sol.lambda0 - chi_floor) << ")\n";
  } catch (const Error&) {
    rep << "  Lambda0 - chi^{-1}(h'(v0)): chi not invertible for this energy\n";
  }

  const std::string text = rep.str();
  std::cout << text;
  open_out(fs::path(rc.out_dir) / "inner_report.txt") << text;
  if (sol.slow_convergence)
    std::cerr << "warning: bracket did not reach the requested width; "
                 "the reported enclosure is still certified\n";

  if (rc.svg) {
    SvgFigure fig("Limiting profile stretches", "log10 xi", "stretch");
    const size_t n = sol.size();
    auto lx = thin(n, 1500, [&](size_t i) { return std::log10(sol.xi(i)); });
    fig.add_polyline(lx, thin(n, 1500, [&](size_t i) { return sol.a0(i); }), "a0");
    fig.add_polyline(lx, thin(n, 1500, [&](size_t i) { return sol.b0(i); }), "b0");
    fig.add_hline(sol.lambda0, "Lambda0");
    fig.write((fs::path(rc.out_dir) / "inner.svg").string());
  }
  return 0;
}

int do_equilibrium(const RunConfig& rc, const StoredEnergy& E, double phi0_flag) {
  fs::create_directories(rc.out_dir);
  InnerOptions io = make_inner_options(rc);
  io.s0_factor = rc.solver.s0_factor;
  io.max_sample_spacing = 0.0;

  const std::vector<double> grid =
      phi0_flag > 0.0 ? std::vector<double>{phi0_flag} : rc.phi0_grid();
  std::vector<EquilibriumCurvePoint> pts;
  bool all_ok = true;
  for (double phi0 : grid) {
    try {
      pts.push_back(solve_equilibrium(E, phi0, rc.boundary, io));
      std::cout << "phi0=" << short_num(phi0)
                << "  lambda=" << format_g17(pts.back().lambda) << '\n';
    } catch (const Error& e) {
      all_ok = false;
      pts.push_back({phi0, std::numeric_limits<double>::quiet_NaN()});
      std::cerr << "phi0=" << short_num(phi0) << " failed: " << e.what() << '\n';
    }
  }

  auto f = open_out(fs::path(rc.out_dir) / "equilibrium.csv");
  write_equilibrium_csv(f, pts);

  if (rc.svg) {
    SvgFigure fig("Equilibrium boundary stretch", "phi0", "lambda");
    std::vector<double> xs, ys;
    for (const auto& p : pts)
      if (std::isfinite(p.lambda)) {
        xs.push_back(p.phi0);
        ys.push_back(p.lambda);
      }
    fig.add_polyline(xs, ys, "equilibrium lambda");
    fig.write((fs::path(rc.out_dir) / "equilibrium.svg").string());
  }
  return all_ok ? 0 : 1;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"Self-similar cavitation in radial isotropic elastodynamics"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  double phi0_flag = 0.0;
  std::string out_flag;
  int threads_flag = -1;
  bool svg_on = false, svg_off = false;
  app.add_option("--config", config_path, "Configuration file (INI sections)");
  app.add_option("--phi0", phi0_flag, "Single boundary stretch (overrides the sweep grid)")
      ->check(CLI::PositiveNumber);
  app.add_option("--out", out_flag, "Output directory");
  app.add_flag("--svg", svg_on, "Write SVG figures");
  app.add_flag("--no-svg", svg_off, "Skip SVG figures");
  app.add_option("--threads", threads_flag, "Worker threads (0: hardware concurrency)")
      ->check(CLI::NonNegativeNumber);

  CLI::App* c_check = app.add_subcommand("check", "Verify the constitutive hypotheses");
  CLI::App* c_cavity =
      app.add_subcommand("cavity", "Solve cavitating trajectories and locate the shock");
  CLI::App* c_bif = app.add_subcommand(
      "bifurcation", "Sweep the dynamic and equilibrium bifurcation curves");
  CLI::App* c_inner =
      app.add_subcommand("inner", "Solve the limiting profile and certify Lambda0");
  CLI::App* c_eq = app.add_subcommand("equilibrium", "Sweep the equilibrium curve");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    RunConfig rc = config_path.empty() ? RunConfig{} : load_config(config_path);
    if (!out_flag.empty()) rc.out_dir = out_flag;
    if (svg_on) rc.svg = true;
    if (svg_off) rc.svg = false;
    if (threads_flag >= 0) rc.threads = threads_flag;
    int threads = rc.threads;
    if (threads == 0) threads = static_cast<int>(std::thread::hardware_concurrency());
    if (threads < 1) threads = 1;

    const StoredEnergy E(rc.g, rc.h, rc.d);

    if (*c_check) return do_check(rc, E);
    if (*c_cavity) return do_cavity(rc, E, phi0_flag);
    if (*c_bif) return do_bifurcation(rc, E, threads);
    if (*c_inner) return do_inner(rc, E);
    if (*c_eq) return do_equilibrium(rc, E, phi0_flag);
    return 2;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace radcav::cli
