// Acceptance harness: one PASS/FAIL line per criterion, nonzero exit on any
// failure. Criteria run against the reference configuration g = x^2/2,
// h = (x-1) ln x, d = 3, stress-free, plus the bounded d = 2 family where a
// second dimension is required.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "app.hpp"
#include "radcav/bifurcation.hpp"
#include "radcav/cavity_solver.hpp"
#include "radcav/errors.hpp"
#include "radcav/inner_limit.hpp"
#include "radcav/stored_energy.hpp"

using namespace radcav;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void report(int idx, const std::string& name, bool pass, double secs,
            const std::string& detail) {
  if (!pass) ++g_failures;
  std::printf("criterion %d %-4s %6.2fs  %s%s%s\n", idx, pass ? "PASS" : "FAIL", secs,
              name.c_str(), detail.empty() ? "" : ": ", detail.c_str());
  std::fflush(stdout);
}

void run_criterion(int idx, const std::string& name,
                   const std::function<std::pair<bool, std::string>()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  bool pass = false;
  std::string detail;
  try {
    std::tie(pass, detail) = body();
  } catch (const std::exception& e) {
    pass = false;
    detail = std::string("exception: ") + e.what();
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  report(idx, name, pass, secs, detail);
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

const StoredEnergy& ref3() {
  static const StoredEnergy E(ScalarModel::quadratic(0.5), ScalarModel::log_entropy(1.0), 3);
  return E;
}

const StoredEnergy& bounded2() {
  static const StoredEnergy E(ScalarModel::inverse_power_sum(0.0, {{1.0, 1.0, 1.0}}),
                              ScalarModel::log_entropy(1.0), 2);
  return E;
}

double phi_of(const StoredEnergy& E, double a, double b) {
  const int d = E.dim();
  return E.g().f(a) + (d - 1) * E.g().f(b) + E.h().f(a * powi(b, d - 1));
}

double rel_err(double got, double want) {
  return std::fabs(got - want) / std::fmax(1.0, std::fabs(want));
}

// ---- criterion 1: derivative oracle ---------------------------------------

std::pair<bool, std::string> c1_derivative_oracle() {
  const StoredEnergy& E = ref3();
  std::mt19937 rng(137);
  std::uniform_real_distribution<double> U(0.2, 3.0);
  double worst1 = 0.0, worst2 = 0.0;
  for (int k = 0; k < 1000; ++k) {
    const double a = U(rng), b = U(rng);
    const double ha = 1e-6 * std::fmax(1.0, a), hb = 1e-6 * std::fmax(1.0, b);
    const double h2a = 1e-4 * std::fmax(1.0, a), h2b = 1e-4 * std::fmax(1.0, b);
    const DerivativeSet ds = E.eval_derivatives({a, b});

    // First order: central differences of the energy itself.
    const double fd1a = (phi_of(E, a + ha, b) - phi_of(E, a - ha, b)) / (2 * ha);
    const double fd1b =
        (phi_of(E, a, b + hb) - phi_of(E, a, b - hb)) / (2 * hb) / (E.dim() - 1);
    worst1 = std::fmax(worst1, rel_err(ds.Phi1, fd1a));
    worst1 = std::fmax(worst1, rel_err(ds.Phi2, fd1b));

    // Second order: second differences of the energy.
    const double fd11 =
        (phi_of(E, a + h2a, b) - 2 * phi_of(E, a, b) + phi_of(E, a - h2a, b)) /
        (h2a * h2a);
    const double fd12 = (phi_of(E, a + h2a, b + h2b) - phi_of(E, a + h2a, b - h2b) -
                         phi_of(E, a - h2a, b + h2b) + phi_of(E, a - h2a, b - h2b)) /
                        (4 * h2a * h2b) / (E.dim() - 1);
    worst2 = std::fmax(worst2, rel_err(ds.Phi11, fd11));
    worst2 = std::fmax(worst2, rel_err(ds.Phi12, fd12));

    // Third row, differenced from the analytic second derivatives.
    const double fd111 = (E.eval_derivatives({a + ha, b}).Phi11 -
                          E.eval_derivatives({a - ha, b}).Phi11) /
                         (2 * ha);
    const double fd112 = (E.eval_derivatives({a, b + hb}).Phi11 -
                          E.eval_derivatives({a, b - hb}).Phi11) /
                         (2 * hb) / (E.dim() - 1);
    worst2 = std::fmax(worst2, rel_err(ds.Phi111, fd111));
    worst2 = std::fmax(worst2, rel_err(ds.Phi112, fd112));
  }
  const bool ok = worst1 <= 1e-6 && worst2 <= 1e-5;
  return {ok, "first order " + fmt(worst1) + ", second order " + fmt(worst2)};
}

// ---- criterion 2: trajectory oracle ----------------------------------------

std::pair<bool, std::string> c2_trajectory_oracle() {
  CavityConfig cfg;
  cfg.E = &ref3();
  cfg.phi0 = 1.0;
  cfg.max_sample_spacing = 1e-3;
  const CavityTrajectory traj = solve_cavity(cfg);

  const int d = ref3().dim();
  auto rhs = [&, d](double s, const double* y, double* dy) {
    const RadialState st{y[0], y[1]};
    const double P = ref3().eval_P(st);
    const double Q = ref3().eval_Q(st, s);
    dy[0] = ((d - 1) / s) * (y[0] - y[1]) * P / Q;
    dy[1] = (y[0] - y[1]) / s;
    dy[2] = y[0];
  };

  const SeriesStart st = series_start(cfg);
  double y[3] = {st.a, st.b, st.phi};
  double s = st.s0;
  const double s_end = 0.95 * traj.T;
  const double h = 1e-6;
  double k1[3], k2[3], k3[3], k4[3], tmp[3];
  auto rk4_to = [&](double target) {
    while (s < target) {
      const double hs = std::fmin(h, target - s);
      rhs(s, y, k1);
      for (int i = 0; i < 3; ++i) tmp[i] = y[i] + 0.5 * hs * k1[i];
      rhs(s + 0.5 * hs, tmp, k2);
      for (int i = 0; i < 3; ++i) tmp[i] = y[i] + 0.5 * hs * k2[i];
      rhs(s + 0.5 * hs, tmp, k3);
      for (int i = 0; i < 3; ++i) tmp[i] = y[i] + hs * k3[i];
      rhs(s + hs, tmp, k4);
      for (int i = 0; i < 3; ++i)
        y[i] += hs / 6.0 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
      s += hs;
    }
  };
  // Deviation is taken at the recorded samples: between them the dense
  // record carries its own interpolation error, which is not the solver's.
  double sup = 0.0;
  for (size_t k = 1; k < traj.arc.size() && traj.arc.t[k] <= s_end; ++k) {
    rk4_to(traj.arc.t[k]);
    const double* yk = traj.arc.state(k);
    for (int i = 0; i < 3; ++i) sup = std::fmax(sup, std::fabs(yk[i] - y[i]));
  }
  return {sup <= 1e-6, "sup deviation " + fmt(sup) + " over (s0, 0.95T)"};
}

// ---- criteria 3 and 4: structure and shock theorems ------------------------

struct CaseSpec {
  const StoredEnergy* E;
  BoundaryCondition bc;
  double phi0;
  std::string label;
};

std::vector<CaseSpec> twenty_cases() {
  std::vector<CaseSpec> cases;
  BoundaryCondition sf;
  BoundaryCondition wc3;
  wc3.kind = BoundaryKind::with_content;
  wc3.G0 = 0.5;
  BoundaryCondition wc2;
  wc2.kind = BoundaryKind::with_content;
  wc2.G0 = 0.3;
  wc2.G1 = 0.2;
  for (double p : {1.0, 1.3, 1.7, 2.1, 2.4, 2.7})
    cases.push_back({&ref3(), sf, p, "d3 sf phi0=" + fmt(p)});
  for (double p : {1.2, 1.5, 1.9, 2.3, 2.7})
    cases.push_back({&ref3(), wc3, p, "d3 wc phi0=" + fmt(p)});
  for (double p : {0.05, 0.2, 0.5, 0.8, 1.4})
    cases.push_back({&bounded2(), sf, p, "d2 sf phi0=" + fmt(p)});
  for (double p : {0.05, 0.2, 0.5, 0.8})
    cases.push_back({&bounded2(), wc2, p, "d2 wc phi0=" + fmt(p)});
  return cases;
}

std::vector<CavityTrajectory> g_trajectories;

std::pair<bool, std::string> c3_structure_invariants() {
  const std::vector<CaseSpec> cases = twenty_cases();
  g_trajectories.clear();
  double worst_margin = HUGE_VAL, worst_vcons = 0.0, worst_q = 0.0;
  std::string bad;
  for (const CaseSpec& cs : cases) {
    CavityConfig cfg;
    cfg.E = cs.E;
    cfg.boundary = cs.bc;
    cfg.phi0 = cs.phi0;
    const CavityTrajectory traj = solve_cavity(cfg);

    const MonotonicityMargins m = monotonicity_margins(traj);
    worst_margin = std::fmin(worst_margin, m.min());
    if (m.min() <= -1e-9 && bad.empty()) bad = cs.label + " monotonicity";

    // Volume consistency v = a b^{d-1} between the propagated transverse
    // stretch and phi/s.
    const int d = cs.E->dim();
    for (size_t i = 0; i < traj.size(); ++i) {
      const double v_b = traj.a(i) * powi(traj.b(i), d - 1);
      const double v_phi = traj.v(i);
      const double err = std::fabs(v_b - v_phi) / std::fmax(1.0, std::fabs(v_phi));
      worst_vcons = std::fmax(worst_vcons, err);
      if (err > 1e-9 && bad.empty()) bad = cs.label + " volume consistency";
    }

    // Q -> 0 at the stop abscissa.
    const double b_end = traj.b(traj.size() - 1);
    const double eps_abs = cfg.eps_Q_rel * cs.E->Phi11(b_end, b_end);
    const double qn = std::fabs(traj.Q_at_stop) / (100.0 * eps_abs);
    worst_q = std::fmax(worst_q, qn);
    if (qn > 1.0 && bad.empty()) bad = cs.label + " Q at stop";
    if (traj.stop == StopKind::reached_end || traj.stop == StopKind::step_budget)
      if (bad.empty()) bad = cs.label + " no sonic approach";

    g_trajectories.push_back(std::move(traj));
  }
  const bool ok = bad.empty();
  return {ok, ok ? "20 configurations, min margin " + fmt(worst_margin) +
                       ", max volume drift " + fmt(worst_vcons) + ", max |Q(T)| at " +
                       fmt(worst_q) + " of allowance"
                 : bad};
}

std::pair<bool, std::string> c4_shock_theorems() {
  if (g_trajectories.size() != 20) return {false, "criterion 3 did not populate runs"};
  std::string bad;
  double min_jump = HUGE_VAL, worst_lax = HUGE_VAL;
  const std::vector<CaseSpec> cases = twenty_cases();
  for (size_t c = 0; c < g_trajectories.size(); ++c) {
    const CavityTrajectory& traj = g_trajectories[c];
    const std::string& label = cases[c].label;
    ConnectionResult conn;
    try {
      conn = find_connection(traj);
    } catch (const Error& e) {
      if (bad.empty()) bad = label + ": " + e.what();
      continue;
    }
    if (conn.kind != ConnectionKind::shock) {
      if (bad.empty()) bad = label + " not a shock";
      continue;
    }

    // Exhaustive scan: exactly one sign change of the connection residual.
    const int n = 10000;
    const double lo = traj.s0 * (1 + 1e-12), hi = traj.T * (1 - 1e-12);
    int changes = 0;
    double prev = traj.p_at(lo);
    for (int i = 1; i <= n; ++i) {
      const double cur = traj.p_at(lo + (hi - lo) * i / n);
      if ((prev > 0.0) != (cur > 0.0)) ++changes;
      prev = cur;
    }
    if (changes != 1 && bad.empty()) bad = label + " sign changes " + std::to_string(changes);

    if (!(conn.sigma > traj.s0 && conn.sigma < traj.T) && bad.empty())
      bad = label + " sigma outside (0, T)";
    if (!(conn.jump > 0.0) && bad.empty()) bad = label + " nonpositive jump";
    if (!(conn.lax_margin_low > 0.0 && conn.lax_margin_high > 0.0) && bad.empty())
      bad = label + " Lax margin";
    if (!(conn.p_slope < 0.0) && bad.empty()) bad = label + " residual slope";
    min_jump = std::fmin(min_jump, conn.jump);
    worst_lax = std::fmin(worst_lax, std::fmin(conn.lax_margin_low, conn.lax_margin_high));
  }
  const bool ok = bad.empty();
  return {ok, ok ? "20 shocks, min jump " + fmt(min_jump) + ", min Lax margin " +
                       fmt(worst_lax)
                 : bad};
}

// ---- criterion 5: inner certification --------------------------------------

std::pair<bool, std::string> c5_inner_certification() {
  InnerOptions opts;
  opts.xi0_override = 1e-5;
  opts.bracket_tol = 0.0;
  opts.max_sample_spacing = 2e-4;
  const InnerSolution sol = solve_inner(ref3(), 1.0, 1e4, opts);

  const double width = sol.bracket_hi - sol.bracket_lo;
  std::string bad;
  if (!(width <= 1e-4)) bad = "bracket width " + fmt(width);

  const InnerBoundMargins m = inner_bound_margins(sol);
  if (bad.empty() && !(m.psi_lower > 0 && m.psi_upper > 0 && m.a_below > 0 &&
                       m.b_above > 0))
    bad = "pointwise bounds violated, min margin " + fmt(m.min());
  if (bad.empty() && !(m.decay > 0)) bad = "width decay margin " + fmt(m.decay);

  const ReprResult r1 = lambda0_repr1(sol, ref3());
  const double allow1 = width + r1.tail;
  if (bad.empty() && !(std::fabs(r1.value - sol.lambda0) <= allow1))
    bad = "volume representation off by " + fmt(std::fabs(r1.value - sol.lambda0)) +
          " > " + fmt(allow1);
  const ReprResult r2 = lambda0_repr2(sol, ref3());
  const double allow2 = width + r2.tail;
  if (bad.empty() && !(std::fabs(r2.value - sol.lambda0) <= allow2))
    bad = "traction representation off by " + fmt(std::fabs(r2.value - sol.lambda0)) +
          " > " + fmt(allow2);

  // Strict lower bounds; H6, H7, H8 all hold for the reference energy.
  const double floor1 = ref3().chi_inverse(ref3().h().d1(sol.v0));
  const double floor2 = std::pow(sol.v0, 1.0 / 3.0);
  if (bad.empty() && !(sol.lambda0 > floor1))
    bad = "traction floor margin " + fmt(sol.lambda0 - floor1);
  if (bad.empty() && !(sol.lambda0 > floor2))
    bad = "volume floor margin " + fmt(sol.lambda0 - floor2);

  const bool ok = bad.empty();
  return {ok, ok ? "width " + fmt(width) + ", repr offsets " +
                       fmt(std::fabs(r1.value - sol.lambda0)) + "/" +
                       fmt(std::fabs(r2.value - sol.lambda0)) + ", floors " +
                       fmt(sol.lambda0 - floor1) + "/" + fmt(sol.lambda0 - floor2)
                 : bad};
}

// ---- criterion 6: limit theorems along the tail ----------------------------

std::pair<bool, std::string> c6_limit_theorems() {
  const std::vector<double> grid = {0.025, 0.05, 0.1, 0.2};
  const BifurcationCurve curve = sweep(ref3(), {}, grid);
  if (curve.n_ok() != grid.size()) return {false, "tail sweep had failures"};
  const LimitReport rep = verify_limits(curve);
  std::string detail;
  for (const LimitCheck& c : rep.checks) {
    if (!c.ok) {
      detail = c.name + " failed (" + c.detail + ")";
      break;
    }
  }
  if (!detail.empty()) return {false, detail};
  return {true, std::to_string(rep.checks.size()) + " checks, Richardson " +
                    fmt(rep.richardson_lambda)};
}

// ---- criterion 7: rescaling order ------------------------------------------

std::pair<bool, std::string> c7_rescaling_order() {
  const RescalingReport rep = verify_rescaling(ref3(), {}, 2.0, {0.025, 0.05, 0.1, 0.2});
  const bool ok = rep.fitted_order >= 1.7 && rep.fitted_order <= 2.3;
  return {ok, "fitted order " + fmt(rep.fitted_order)};
}

// ---- criteria 8 and 9: figure reproduction and intercept -------------------

int run_cli_args(std::vector<std::string> args) {
  std::vector<const char*> argv = {"radcav"};
  for (const std::string& a : args) argv.push_back(a.c_str());
  return radcav::cli::run_cli(static_cast<int>(argv.size()), argv.data());
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
  std::ifstream f(p);
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(f, line)) {
    std::vector<std::string> cells;
    std::istringstream is(line);
    std::string cell;
    while (std::getline(is, cell, ',')) cells.push_back(cell);
    rows.push_back(std::move(cells));
  }
  return rows;
}

std::pair<bool, std::string> c8_figures() {
  const fs::path dir = fs::temp_directory_path() / "radcav_acceptance";
  fs::remove_all(dir);
  fs::create_directories(dir);

  // Fig. 1 family: trajectories over the caption range of cavity speeds.
  const std::vector<double> family = {0.05, 0.4, 0.75, 1.1, 1.45, 1.8, 2.15, 2.5};
  {
    std::ofstream ini(dir / "family.ini");
    ini << "[sweep]\nphi0_min = 0.05\nphi0_max = 2.5\ncount = 8\n";
  }
  if (run_cli_args({"cavity", "--config", (dir / "family.ini").string(), "--out",
                    (dir / "fig1").string()}) != 0)
    return {false, "cavity family run failed"};

  double prev_rise = HUGE_VAL;
  for (double phi0 : family) {
    char name[64];
    std::snprintf(name, sizeof name, "trajectory_phi0_%g.csv", phi0);
    const auto rows = read_csv(dir / "fig1" / name);
    if (rows.size() < 3) return {false, std::string(name) + " too short"};
    double prev_v = 0.0, v_005 = -1.0, v_first = 0.0;
    for (size_t i = 1; i < rows.size(); ++i) {
      const double s = std::strtod(rows[i][0].c_str(), nullptr);
      const double v = std::strtod(rows[i][2].c_str(), nullptr);
      if (i == 1) v_first = v;
      if (v < prev_v - 1e-9)
        return {false, std::string(name) + " v not increasing at s=" + fmt(s)};
      prev_v = v;
      if (v_005 < 0.0 && s >= 0.05) v_005 = v;
    }
    if (v_005 < 0.0) return {false, std::string(name) + " has no sample past s=0.05"};
    // The family steepens into a step at s = 0 as phi0 shrinks, so the rise
    // v(0.05) - v(0+) grows when phi0 decreases; the grid here ascends.
    const double rise = v_005 - v_first;
    if (!(rise < prev_rise))
      return {false, std::string(name) + " rise " + fmt(rise) + " not decreasing"};
    prev_rise = rise;
  }

  // Fig. 2: dynamic and equilibrium curves with the common intercept.
  {
    std::ofstream ini(dir / "curves.ini");
    ini << "[sweep]\nphi0_min = 0.05\nphi0_max = 2.5\ncount = 6\n";
  }
  if (run_cli_args({"bifurcation", "--config", (dir / "curves.ini").string(), "--out",
                    (dir / "fig2").string(), "--threads", "4"}) != 0)
    return {false, "bifurcation run failed"};

  const auto dyn = read_csv(dir / "fig2" / "dynamic.csv");
  const auto eq = read_csv(dir / "fig2" / "equilibrium.csv");
  if (dyn.size() != 7 || eq.size() != 7) return {false, "curve CSVs incomplete"};
  double prev_L = 0.0, prev_l = 0.0;
  for (size_t i = 1; i < dyn.size(); ++i) {
    const double L = std::strtod(dyn[i][1].c_str(), nullptr);
    const double l = std::strtod(eq[i][1].c_str(), nullptr);
    if (!(L > prev_L) || !(l > prev_l))
      return {false, "curves not monotone at row " + std::to_string(i)};
    prev_L = L;
    prev_l = l;
  }

  // Intercepts against the certified bracket, parsed from the run report.
  std::ifstream rep(dir / "fig2" / "bifurcation.txt");
  std::string line;
  double blo = 0.0, bhi = 0.0;
  while (std::getline(rep, line)) {
    const size_t at = line.find("Lambda0 bracket [");
    if (at != std::string::npos) {
      std::sscanf(line.c_str() + at, "Lambda0 bracket [%lf, %lf]", &blo, &bhi);
      break;
    }
  }
  if (!(bhi > 0.0)) return {false, "bracket missing from report"};
  const double L005 = std::strtod(dyn[1][1].c_str(), nullptr);
  const double l005 = std::strtod(eq[1][1].c_str(), nullptr);
  if (!(L005 > blo - 1e-3 && L005 < bhi + 1e-3))
    return {false, "dynamic intercept " + fmt(L005) + " outside bracket"};
  if (!(l005 > blo - 1e-3 && l005 < bhi + 1e-3))
    return {false, "equilibrium intercept " + fmt(l005) + " outside bracket"};

  return {true, "family rise " + fmt(prev_rise) + " at phi0=2.5, intercepts " +
                    fmt(L005) + "/" + fmt(l005) + " in bracket"};
}

std::pair<bool, std::string> c9_intercept_identity() {
  const double l1 = solve_equilibrium(ref3(), 0.1).lambda;
  const double l2 = solve_equilibrium(ref3(), 0.05).lambda;
  const double l3 = solve_equilibrium(ref3(), 0.025).lambda;
  const double d1 = l2 - l1, d2 = l3 - l2;
  const double extrapolated = l3 - d2 * d2 / (d2 - d1);
  const InnerSolution sol = solve_inner(ref3(), 1.0);
  const double err = std::fabs(extrapolated - sol.lambda0);
  return {err <= 1e-3, "|lambda(0+) - Lambda0| = " + fmt(err)};
}

}  // namespace

int main() {
  run_criterion(1, "derivative oracle", c1_derivative_oracle);
  run_criterion(2, "trajectory oracle", c2_trajectory_oracle);
  run_criterion(3, "structure invariants", c3_structure_invariants);
  run_criterion(4, "shock theorems", c4_shock_theorems);
  run_criterion(5, "inner certification", c5_inner_certification);
  run_criterion(6, "limit theorems", c6_limit_theorems);
  run_criterion(7, "rescaling order", c7_rescaling_order);
  run_criterion(8, "figure reproduction", c8_figures);
  run_criterion(9, "intercept identity", c9_intercept_identity);
  std::printf("%d of 9 criteria passed\n", 9 - g_failures);
  return g_failures == 0 ? 0 : 1;
}
