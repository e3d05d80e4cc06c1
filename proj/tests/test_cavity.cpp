#include <doctest.h>

#include <cmath>
#include <vector>

#include "radcav/cavity_solver.hpp"
#include "radcav/errors.hpp"
#include "radcav/stored_energy.hpp"

using namespace radcav;

namespace {

const StoredEnergy& ref3() {
  static const StoredEnergy E(ScalarModel::quadratic(0.5), ScalarModel::log_entropy(1.0), 3);
  return E;
}

CavityConfig ref_config(double phi0) {
  CavityConfig cfg;
  cfg.E = &ref3();
  cfg.phi0 = phi0;
  return cfg;
}

}  // namespace

TEST_CASE("series start constants at phi0 = 1") {
  const CavityConfig cfg = ref_config(1.0);
  CHECK(cfg.resolved_v0() == doctest::Approx(1.0));
  CHECK(cfg.resolved_s0() == doctest::Approx(1e-3));
  const SeriesStart st = series_start(cfg);
  // c0 = (d-1) gamma0 / (phi0 h''(v0)) with gamma0 = 1 and h''(1) = 2.
  CHECK(st.c0 == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(st.s0 == doctest::Approx(1e-3));
  const double phid = 1.0 + 1e-9 + 0.75 * 1e-12;
  CHECK(st.phi == doctest::Approx(std::cbrt(phid)).epsilon(1e-15));
  CHECK(st.b == doctest::Approx(st.phi / st.s0).epsilon(1e-15));
  CHECK(st.a ==
        doctest::Approx((1e-6 + 1e-9) * std::pow(st.phi, -2.0)).epsilon(1e-13));
  CHECK(st.v == doctest::Approx(1.0 + 1e-3).epsilon(1e-14));
  // The start state is volume-consistent: v = a b^{d-1}.
  CHECK(st.a * st.b * st.b == doctest::Approx(st.v).epsilon(1e-12));
}

TEST_CASE("series start truncation shows second order under s0 halving") {
  // Truncation of v = v0 + c0 s at the hand-off, measured against a run
  // started 32x earlier and read back at the same abscissa.
  auto start_error = [&](double s0) {
    CavityConfig fine = ref_config(1.0);
    fine.s0_override = s0 / 32.0;
    const CavityTrajectory traj = solve_cavity(fine);
    const SeriesStart st = series_start_at(ref3(), 1.0, 1.0, s0);
    const RadialState got = traj.state_at(s0);
    const double bb = traj.phi_at(s0) / s0;
    return std::fabs(got.a * bb * bb - st.v);
  };
  const double e1 = start_error(4e-3);
  const double e2 = start_error(2e-3);
  const double e3 = start_error(1e-3);
  CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.25));
  CHECK(e2 / e3 == doctest::Approx(4.0).epsilon(0.25));
}

TEST_CASE("reference trajectory satisfies the structure theorem margins") {
  const CavityTrajectory traj = solve_cavity(ref_config(1.0));
  CHECK(traj.v0 == doctest::Approx(1.0));
  CHECK(traj.c0 == doctest::Approx(1.0));
  REQUIRE(traj.size() > 10);

  const MonotonicityMargins m = monotonicity_margins(traj);
  CHECK(m.a_increase > 0.0);
  // Event-refined samples near the stop can sit closer than one ulp of b.
  CHECK(m.b_decrease >= 0.0);
  CHECK(m.width_increase > 0.0);
  CHECK(m.width_positive > 0.0);
  CHECK(m.q_negative > 0.0);

  // The arc terminates on the sonic set: Q -> 0 from below.
  CHECK(traj.Q_at_stop < 0.0);
  CHECK(std::fabs(traj.Q_at_stop) < 1e-6);
  CHECK(traj.stop != StopKind::reached_end);
  CHECK(traj.stop != StopKind::step_budget);

  // Stored transverse stretch agrees with phi/s at every sample.
  for (size_t i = 0; i < traj.size(); i += 97) {
    CHECK(traj.b(i) ==
          doctest::Approx(traj.phi(i) / traj.s(i)).epsilon(1e-9));
    CHECK(traj.v(i) ==
          doctest::Approx(traj.a(i) * traj.b(i) * traj.b(i)).epsilon(1e-8));
  }
}

TEST_CASE("reference connection at phi0 = 1") {
  const CavityTrajectory traj = solve_cavity(ref_config(1.0));
  const ConnectionResult conn = find_connection(traj);
  CHECK(conn.kind == ConnectionKind::shock);
  CHECK(conn.sigma == doctest::Approx(1.702091).epsilon(1e-4));
  CHECK(conn.sigma > traj.s0);
  CHECK(conn.sigma < traj.T);
  CHECK(conn.jump > 4.8e-6);
  CHECK(conn.jump < 6.5e-6);
  CHECK(conn.jump == doctest::Approx(conn.Lambda - conn.a_minus).epsilon(1e-12));
  CHECK(conn.residual <= 1e-9);
  CHECK(conn.lax_ok);
  CHECK(conn.lax_margin_low > 0.0);
  CHECK(conn.lax_margin_high > 0.0);
  CHECK(conn.p_slope > -7.6);
  CHECK(conn.p_slope < -6.2);

  // Interpolated state at sigma is the reported connection state.
  const RadialState at = traj.state_at(conn.sigma);
  CHECK(at.b == doctest::Approx(conn.Lambda).epsilon(1e-10));
  CHECK(at.a == doctest::Approx(conn.a_minus).epsilon(1e-10));
}

TEST_CASE("exhaustive residual scan brackets the reported shock") {
  const CavityTrajectory traj = solve_cavity(ref_config(1.0));
  const ConnectionResult conn = find_connection(traj);
  const int n = 3000;
  const double lo = traj.s0 * (1 + 1e-12), hi = traj.T * (1 - 1e-12);
  int changes = 0;
  double cell_lo = 0.0, cell_hi = 0.0;
  double prev = traj.p_at(lo);
  for (int i = 1; i <= n; ++i) {
    const double s = lo + (hi - lo) * i / n;
    const double cur = traj.p_at(s);
    if ((prev > 0.0) != (cur > 0.0)) {
      ++changes;
      cell_lo = lo + (hi - lo) * (i - 1) / n;
      cell_hi = s;
    }
    prev = cur;
  }
  CHECK(changes == 1);
  CHECK(conn.sigma >= cell_lo);
  CHECK(conn.sigma <= cell_hi);
}

TEST_CASE("cauchy stress approaches the boundary traction near the cavity") {
  const CavityTrajectory traj = solve_cavity(ref_config(1.0));
  CHECK(std::fabs(cauchy_stress(traj, traj.s0)) < 5e-3);
  CHECK_THROWS_AS(cauchy_stress(traj, traj.T * 2.0), OutOfRange);

  CavityConfig wc = ref_config(1.0);
  wc.boundary.kind = BoundaryKind::with_content;
  wc.boundary.G0 = 0.5;
  const CavityTrajectory tc = solve_cavity(wc);
  CHECK(tc.v0 == doctest::Approx(ref3().h_prime_inverse(0.5)).epsilon(1e-12));
  CHECK(cauchy_stress(tc, tc.s0) == doctest::Approx(0.5).epsilon(1e-2));
}

TEST_CASE("short horizon yields no connection") {
  CavityConfig cfg = ref_config(1.0);
  cfg.t_max_factor = 1.4;  // below the shock abscissa
  const CavityTrajectory traj = solve_cavity(cfg);
  CHECK(traj.stop == StopKind::reached_end);
  CHECK_THROWS_AS(find_connection(traj), NoConnection);
}

TEST_CASE("configuration validation") {
  CavityConfig cfg;
  cfg.phi0 = 1.0;
  CHECK_THROWS_AS(solve_cavity(cfg), ConfigError);  // no energy
  cfg.E = &ref3();
  cfg.phi0 = -1.0;
  CHECK_THROWS_AS(solve_cavity(cfg), ConfigError);
  cfg.phi0 = 1.0;
  cfg.rel_tol = 0.0;
  CHECK_THROWS_AS(solve_cavity(cfg), ConfigError);
  cfg.rel_tol = 1e-10;
  cfg.eps_ab = -1.0;
  CHECK_THROWS_AS(solve_cavity(cfg), ConfigError);
}

TEST_CASE("unsolvable energies are rejected up front") {
  const StoredEnergy bad(ScalarModel::quadratic(0.5), ScalarModel::log_entropy(1.0), 2);
  CavityConfig cfg;
  cfg.E = &bad;
  cfg.phi0 = 1.0;
  CHECK_THROWS_AS(solve_cavity(cfg), HypothesisViolation);
}

TEST_CASE("boundary stretch scales the hand-off point") {
  CavityConfig cfg = ref_config(0.2);
  CHECK(cfg.resolved_s0() == doctest::Approx(0.2e-3));
  const CavityTrajectory traj = solve_cavity(cfg);
  // At small phi0 the arc collapses onto the sonic-diagonal corner: the
  // residual stays positive and the contact stop fires first.
  CHECK(traj.stop == StopKind::contact_event);
  CHECK(traj.width_at_stop <= cfg.eps_ab * std::fmax(1.0, traj.b(traj.size() - 1)) * 1.5);
  const ConnectionResult conn = find_connection(traj);
  CHECK(conn.kind == ConnectionKind::sonic);
  CHECK(conn.sigma == traj.T);
  CHECK(conn.jump > 0.0);
  CHECK(conn.jump < 3e-9);
  CHECK(conn.lax_ok);
  CHECK(monotonicity_margins(traj).min() > -1e-9);

  // Disabling the contact stop runs to the sonic event with the same verdict.
  cfg.eps_ab = 0.0;
  const CavityTrajectory traj2 = solve_cavity(cfg);
  CHECK(traj2.stop == StopKind::sonic_event);
  const ConnectionResult conn2 = find_connection(traj2);
  CHECK(conn2.kind == ConnectionKind::sonic);
  CHECK(conn2.jump < conn.jump);

  // Well away from the corner the same boundary family yields a real shock.
  CavityConfig big = ref_config(2.0);
  const ConnectionResult conn3 = find_connection(solve_cavity(big));
  CHECK(conn3.kind == ConnectionKind::shock);
  CHECK(conn3.jump > 0.1);
  CHECK(conn3.sigma < conn3.T);
}

TEST_CASE("with-content traction floor clips nonpositive tractions") {
  BoundaryCondition bc;
  bc.kind = BoundaryKind::with_content;
  bc.G0 = -0.3;
  bc.G1 = 0.1;
  CHECK(bc.traction(1.0) == doctest::Approx(BoundaryCondition::kGFloor));
  CHECK(bc.traction(4.0) == doctest::Approx(0.1));
}
