#pragma once

#include <array>
#include <string>

#include "radcav/scalar_model.hpp"

namespace radcav {

// Principal stretches (a, b, ..., b) of a radial deformation;
// a is the longitudinal stretch, b the transverse one.
struct RadialState {
  double a = 1.0;
  double b = 1.0;
};

struct DerivativeSet {
  double Phi1;
  double Phi2;
  double Phi11;
  double Phi12;
  double Phi111;
  double Phi112;
};

enum class Verdict { pass, fail, not_applicable };

struct HypothesisCheck {
  Verdict verdict = Verdict::not_applicable;
  std::string witness;
};

// Structural checks H0..H8 on (g, h, d):
//   H0  g in C^3[0,inf), h in C^3(0,inf)        (finite evaluation)
//   H1  g'' > 0, h'' > 0, h coercive at 0 and inf
//   H2  g''' <= 0, h''' < 0
//   H3  g'(x)/x^{d-2} -> gamma >= 0
//   H4  h'(0+) = -inf, h'(inf) = +inf
//   H5  Phi11(x,x) >= nu^2 > 0
//   H6  chi'(x) > 0 and limsup_{x->0} x h'(x) < 0
//   H7  (g'(x) x)' > 0
//   H8  (g''(x) x)' >= 0
// Closed forms are used where a family admits them; the rest is sampled on a
// logarithmic grid over [grid_lo, grid_hi] with the failing sample reported.
struct HypothesisReport {
  std::array<HypothesisCheck, 9> H;
  double gamma = 0.0;
  double gamma0 = 0.0;
  double nu = 0.0;
  double natural_stretch = 0.0;  // h'^{-1}(0)
  double grid_lo = 1e-6;
  double grid_hi = 1e6;
  int grid_points = 241;

  bool pass(int i) const { return H[static_cast<size_t>(i)].verdict == Verdict::pass; }
  // Minimum required by the trajectory solvers.
  bool solvable() const {
    return pass(0) && pass(1) && pass(2) && pass(3) && pass(4);
  }
  std::string summary() const;
};

// Separable stored energy Phi(v_1,..,v_d) = sum_i g(v_i) + h(prod_i v_i),
// evaluated on radial states (a, b, ..., b) with v = a b^{d-1}.
// Immutable after construction; all members are pure.
class StoredEnergy {
 public:
  StoredEnergy(ScalarModel g, ScalarModel h, int d);

  int dim() const { return d_; }
  const ScalarModel& g() const { return g_; }
  const ScalarModel& h() const { return h_; }

  double gamma() const { return report_.gamma; }
  double gamma0() const { return report_.gamma0; }
  double nu() const { return report_.nu; }
  double natural_stretch() const { return report_.natural_stretch; }

  const HypothesisReport& check_hypotheses() const { return report_; }
  // Throws HypothesisViolation unless H0..H4 pass.
  void require_solvable() const;

  DerivativeSet eval_derivatives(RadialState st) const;

  // Phi11(a,b) = g''(a) + b^{2d-2} h''(a b^{d-1})
  double Phi11(double a, double b) const;

  // P(a,b) = (g'(a)-g'(b))/(a-b) + a b^{2d-3} h''(a b^{d-1});
  // near the diagonal the quotient is replaced by g''(b).
  double eval_P(RadialState st) const;

  // Q(a,b,s) = s^2 - Phi11(a,b)
  double eval_Q(RadialState st, double s) const;

  // R(a,b,s) = (g'(a)-g'(b))/(a-b)
  //          + b^{2d-2} (h'(a b^{d-1}) - h'(b^d)) / (b^{d-1}(a-b)) - s^2;
  // on the diagonal R = Phi11(b,b) - s^2.
  double eval_R(RadialState st, double s) const;

  // T_rad(a,b) = b^{1-d} g'(a) + h'(a b^{d-1})
  double radial_stress(RadialState st) const;

  double h_prime_inverse(double y) const;

  // chi(x) = h'(x^d) + g'(x) x^{1-d}
  double chi(double x) const;
  double chi_prime(double x) const;
  double chi_inverse(double y) const;

  // |a-b| < kDiagonalSwitch*max(1,b) selects the diagonal formulas in P and R.
  static constexpr double kDiagonalSwitch = 1e-7;

 private:
  ScalarModel g_;
  ScalarModel h_;
  int d_;
  HypothesisReport report_;

  double domain_v(RadialState st) const;
  void build_report();
};

// x^n by binary exponentiation for small nonnegative integer n.
double powi(double x, int n);

}  // namespace radcav
