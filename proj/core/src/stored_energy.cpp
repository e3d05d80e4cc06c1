#include "radcav/stored_energy.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "radcav/errors.hpp"
#include "radcav/ode_engine.hpp"

namespace radcav {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

bool finite(double x) { return std::isfinite(x); }

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(12);
  os << x;
  return os.str();
}

}  // namespace

double powi(double x, int n) {
  double r = 1.0;
  double base = x;
  for (; n > 0; n >>= 1) {
    if (n & 1) r *= base;
    base *= base;
  }
  return r;
}

StoredEnergy::StoredEnergy(ScalarModel g, ScalarModel h, int d)
    : g_(std::move(g)), h_(std::move(h)), d_(d) {
  if (d_ < 2) throw DomainError("StoredEnergy: dimension must be >= 2");
  build_report();
}

void StoredEnergy::require_solvable() const {
  if (report_.solvable()) return;
  std::string bad;
  for (int i = 0; i <= 4; ++i) {
    if (!report_.pass(i)) {
      bad += " H" + std::to_string(i);
      bad += "(" + report_.H[static_cast<size_t>(i)].witness + ")";
    }
  }
  throw HypothesisViolation("energy fails required hypotheses:" + bad);
}

double StoredEnergy::domain_v(RadialState st) const {
  if (!(st.a > 0.0) || !(st.b > 0.0) || !finite(st.a) || !finite(st.b))
    throw DomainError("radial state requires finite a > 0, b > 0");
  return st.a * powi(st.b, d_ - 1);
}

DerivativeSet StoredEnergy::eval_derivatives(RadialState st) const {
  const double a = st.a, b = st.b;
  const double v = domain_v(st);
  const double bd1 = powi(b, d_ - 1);
  const double bd2 = powi(b, d_ - 2);
  const double h1 = h_.d1(v), h2 = h_.d2(v), h3 = h_.d3(v);
  DerivativeSet r;
  r.Phi1 = g_.d1(a) + bd1 * h1;
  r.Phi2 = g_.d1(b) + a * bd2 * h1;
  r.Phi11 = g_.d2(a) + bd1 * bd1 * h2;
  r.Phi12 = bd2 * h1 + a * bd1 * bd2 * h2;
  r.Phi111 = g_.d3(a) + bd1 * bd1 * bd1 * h3;
  r.Phi112 = bd1 * bd2 * (2.0 * h2 + v * h3);
  return r;
}

double StoredEnergy::Phi11(double a, double b) const {
  const double v = domain_v({a, b});
  const double bd1 = powi(b, d_ - 1);
  return g_.d2(a) + bd1 * bd1 * h_.d2(v);
}

double StoredEnergy::eval_P(RadialState st) const {
  const double a = st.a, b = st.b;
  const double v = domain_v(st);
  const double quot = (std::abs(a - b) < kDiagonalSwitch * std::fmax(1.0, b))
                          ? g_.d2(b)
                          : (g_.d1(a) - g_.d1(b)) / (a - b);
  return quot + a * powi(b, 2 * d_ - 3) * h_.d2(v);
}

double StoredEnergy::eval_Q(RadialState st, double s) const {
  return s * s - Phi11(st.a, st.b);
}

double StoredEnergy::eval_R(RadialState st, double s) const {
  const double a = st.a, b = st.b;
  const double v = domain_v(st);
  if (std::abs(a - b) < kDiagonalSwitch * std::fmax(1.0, b))
    return Phi11(b, b) - s * s;
  const double bd1 = powi(b, d_ - 1);
  const double gq = (g_.d1(a) - g_.d1(b)) / (a - b);
  // v - b^d = b^{d-1}(a - b), kept in product form.
  const double hq = (h_.d1(v) - h_.d1(b * bd1)) / (bd1 * (a - b));
  return gq + bd1 * bd1 * hq - s * s;
}

double StoredEnergy::radial_stress(RadialState st) const {
  const double v = domain_v(st);
  return g_.d1(st.a) / powi(st.b, d_ - 1) + h_.d1(v);
}

double StoredEnergy::h_prime_inverse(double y) const {
  double lo = 0.5, hi = 2.0;
  double flo = h_.d1(lo) - y, fhi = h_.d1(hi) - y;
  int grow = 0;
  while (flo * fhi > 0.0) {
    if (++grow > 200)
      throw BracketError("h_prime_inverse: no sign change within expansion limit");
    if (flo > 0.0) {
      lo *= 0.5;
      flo = h_.d1(lo) - y;
    } else {
      hi *= 2.0;
      fhi = h_.d1(hi) - y;
    }
  }
  return refine_root([&](double x) { return h_.d1(x) - y; }, lo, hi);
}

double StoredEnergy::chi(double x) const {
  return h_.d1(powi(x, d_)) + g_.d1(x) * std::pow(x, 1.0 - d_);
}

double StoredEnergy::chi_prime(double x) const {
  const double xd = powi(x, d_);
  return d_ * powi(x, d_ - 1) * h_.d2(xd) + g_.d2(x) * std::pow(x, 1.0 - d_) +
         (1.0 - d_) * std::pow(x, -static_cast<double>(d_)) * g_.d1(x);
}

double StoredEnergy::chi_inverse(double y) const {
  double lo = 0.5, hi = 2.0;
  double flo = chi(lo) - y, fhi = chi(hi) - y;
  int grow = 0;
  while (flo * fhi > 0.0) {
    if (++grow > 200) throw BracketError("chi_inverse: no sign change within expansion limit");
    if (flo > 0.0) {
      lo *= 0.5;
      flo = chi(lo) - y;
    } else {
      hi *= 2.0;
      fhi = chi(hi) - y;
    }
  }
  if (!(chi_prime(lo) > 0.0) || !(chi_prime(hi) > 0.0) ||
      !(chi_prime(0.5 * (lo + hi)) > 0.0))
    throw HypothesisViolation("chi_inverse: chi' <= 0 on the inversion bracket (H6)");
  return refine_root([&](double x) { return chi(x) - y; }, lo, hi);
}

void StoredEnergy::build_report() {
  HypothesisReport& rep = report_;
  const int n = rep.grid_points;
  std::vector<double> grid(static_cast<size_t>(n));
  const double l0 = std::log(rep.grid_lo), l1 = std::log(rep.grid_hi);
  for (int i = 0; i < n; ++i)
    grid[static_cast<size_t>(i)] = std::exp(l0 + (l1 - l0) * i / (n - 1));

  auto& H = rep.H;

  // H0: finite C^3 evaluation, g on {0} + grid, h on the grid.
  {
    Verdict v = Verdict::pass;
    std::string w = "finite on the sampled domain";
    auto bad_g = [&](double x) {
      return !(finite(g_.f(x)) && finite(g_.d1(x)) && finite(g_.d2(x)) && finite(g_.d3(x)));
    };
    auto bad_h = [&](double x) {
      return !(finite(h_.f(x)) && finite(h_.d1(x)) && finite(h_.d2(x)) && finite(h_.d3(x)));
    };
    if (bad_g(0.0)) {
      v = Verdict::fail;
      w = "g not C^3 at x=0";
    }
    for (double x : grid) {
      if (v == Verdict::fail) break;
      if (bad_g(x)) {
        v = Verdict::fail;
        w = "g not finite at x=" + fmt(x);
      } else if (bad_h(x)) {
        v = Verdict::fail;
        w = "h not finite at x=" + fmt(x);
      }
    }
    H[0] = {v, w};
  }
  const bool h0 = rep.pass(0);

  // H1: g'' > 0 on {0}+grid, h'' > 0 on grid, h coercive toward 0 and inf.
  if (h0) {
    Verdict v = Verdict::pass;
    std::string w;
    if (!(g_.d2(0.0) > 0.0)) {
      v = Verdict::fail;
      w = "g''(0) = " + fmt(g_.d2(0.0));
    }
    for (double x : grid) {
      if (v == Verdict::fail) break;
      if (!(g_.d2(x) > 0.0)) {
        v = Verdict::fail;
        w = "g''(" + fmt(x) + ") = " + fmt(g_.d2(x));
      } else if (!(h_.d2(x) > 0.0)) {
        v = Verdict::fail;
        w = "h''(" + fmt(x) + ") = " + fmt(h_.d2(x));
      }
    }
    if (v == Verdict::pass) {
      size_t imin = 0;
      for (size_t i = 1; i < grid.size(); ++i)
        if (h_.f(grid[i]) < h_.f(grid[imin])) imin = i;
      if (imin == 0 || imin + 1 == grid.size()) {
        v = Verdict::fail;
        w = "h not coercive: grid minimum at boundary x=" + fmt(grid[imin]);
      } else {
        w = "g''>0, h''>0; h coercive, interior minimum near x=" + fmt(grid[imin]);
      }
    }
    H[1] = {v, w};
  } else {
    H[1] = {Verdict::not_applicable, "requires H0"};
  }

  // H2: g''' <= 0 on {0}+grid, h''' < 0 on grid.
  if (h0) {
    Verdict v = Verdict::pass;
    std::string w = "g'''<=0, h'''<0 on the grid";
    if (!(g_.d3(0.0) <= 0.0)) {
      v = Verdict::fail;
      w = "g'''(0) = " + fmt(g_.d3(0.0));
    }
    for (double x : grid) {
      if (v == Verdict::fail) break;
      if (!(g_.d3(x) <= 0.0)) {
        v = Verdict::fail;
        w = "g'''(" + fmt(x) + ") = " + fmt(g_.d3(x));
      } else if (!(h_.d3(x) < 0.0)) {
        v = Verdict::fail;
        w = "h'''(" + fmt(x) + ") = " + fmt(h_.d3(x));
      }
    }
    H[2] = {v, w};
  } else {
    H[2] = {Verdict::not_applicable, "requires H0"};
  }

  // H3: closed-form growth limit per family.
  {
    const double gamma = g_.gamma_limit(d_);
    if (std::isnan(gamma)) {
      H[3] = {Verdict::fail, "g'(x)/x^{d-2} has no finite nonnegative limit"};
      rep.gamma = kNaN;
    } else {
      H[3] = {Verdict::pass, "gamma = " + fmt(gamma)};
      rep.gamma = gamma;
    }
    rep.gamma0 = rep.gamma;
    if (d_ == 2 && !std::isnan(rep.gamma)) {
      const double g1z = g_.d1_limit_zero();
      rep.gamma0 = finite(g1z) ? rep.gamma - g1z : kNaN;
    }
  }

  // H4: closed-form one-sided limits of h'.
  {
    const double z = h_.d1_limit_zero();
    const double i = h_.d1_limit_inf();
    if (z == -std::numeric_limits<double>::infinity() &&
        i == std::numeric_limits<double>::infinity()) {
      H[4] = {Verdict::pass, "h'(" + fmt(rep.grid_lo) + ") = " + fmt(h_.d1(rep.grid_lo)) +
                                 ", h'(" + fmt(rep.grid_hi) + ") = " + fmt(h_.d1(rep.grid_hi))};
    } else {
      H[4] = {Verdict::fail, "h'(0+) limit " + fmt(z) + ", h'(inf) limit " + fmt(i)};
    }
  }

  // Natural stretch h'^{-1}(0), available once H1+H4 hold.
  rep.natural_stretch = kNaN;
  if (rep.pass(1) && rep.pass(4)) {
    try {
      rep.natural_stretch = h_prime_inverse(0.0);
    } catch (const Error&) {
    }
  }

  // H5: nu^2 <= Phi11(x,x); closed form sqrt(g'') for quadratic g,
  // otherwise grid minimum floored at 1e-8.
  if (h0) {
    double mn = std::numeric_limits<double>::infinity();
    double at = grid.front();
    for (double x : grid) {
      const double q = Phi11(x, x);
      if (q < mn) {
        mn = q;
        at = x;
      }
    }
    if (g_.kind() == ScalarKind::quadratic && mn > 0.0) {
      rep.nu = std::sqrt(g_.d2(1.0));
      H[5] = {Verdict::pass,
              "closed form nu = sqrt(g'') = " + fmt(rep.nu) + "; grid min Phi11(x,x) = " + fmt(mn)};
    } else if (mn > 0.0) {
      rep.nu = std::fmax(std::sqrt(mn), 1e-8);
      H[5] = {Verdict::pass, "grid min Phi11(x,x) = " + fmt(mn) + " at x=" + fmt(at)};
    } else {
      rep.nu = 1e-8;
      H[5] = {Verdict::fail, "Phi11(" + fmt(at) + "," + fmt(at) + ") = " + fmt(mn)};
    }
  } else {
    rep.nu = 1e-8;
    H[5] = {Verdict::not_applicable, "requires H0"};
  }

  // H6: chi' > 0 on the grid and limsup_{x->0} x h'(x) < 0.
  if (h0) {
    double mn = std::numeric_limits<double>::infinity();
    double at = grid.front();
    for (double x : grid) {
      const double c = chi_prime(x);
      if (c < mn) {
        mn = c;
        at = x;
      }
    }
    const double xlim = h_.x_d1_limit_zero();
    if (mn > 0.0 && xlim < 0.0) {
      H[6] = {Verdict::pass, "min chi' = " + fmt(mn) + " at x=" + fmt(at) +
                                 "; lim x h'(x) = " + fmt(xlim)};
    } else {
      H[6] = {Verdict::fail, "min chi' = " + fmt(mn) + " at x=" + fmt(at) +
                                 "; lim x h'(x) = " + fmt(xlim)};
    }
  } else {
    H[6] = {Verdict::not_applicable, "requires H0"};
  }

  // H7: (g'(x)x)' = g''(x)x + g'(x) > 0 on the grid.
  if (h0) {
    double mn = std::numeric_limits<double>::infinity();
    double at = grid.front();
    for (double x : grid) {
      const double e = g_.d2(x) * x + g_.d1(x);
      if (e < mn) {
        mn = e;
        at = x;
      }
    }
    H[7] = {mn > 0.0 ? Verdict::pass : Verdict::fail,
            "min (g'x)' = " + fmt(mn) + " at x=" + fmt(at)};
  } else {
    H[7] = {Verdict::not_applicable, "requires H0"};
  }

  // H8: (g''(x)x)' = g'''(x)x + g''(x) >= 0 on {0}+grid.
  if (h0) {
    double mn = g_.d2(0.0);
    double at = 0.0;
    for (double x : grid) {
      const double e = g_.d3(x) * x + g_.d2(x);
      if (e < mn) {
        mn = e;
        at = x;
      }
    }
    H[8] = {mn >= 0.0 ? Verdict::pass : Verdict::fail,
            "min (g''x)' = " + fmt(mn) + " at x=" + fmt(at)};
  } else {
    H[8] = {Verdict::not_applicable, "requires H0"};
  }
}

std::string HypothesisReport::summary() const {
  static const char* names[9] = {
      "H0 smoothness",          "H1 convexity",        "H2 softening",
      "H3 growth limit",        "H4 h' range",         "H5 uniform rank-one bound",
      "H6 chi monotonicity",    "H7 (g'x)' sign",      "H8 (g''x)' sign"};
  std::ostringstream os;
  for (int i = 0; i < 9; ++i) {
    const auto& c = H[static_cast<size_t>(i)];
    os << names[i] << ": "
       << (c.verdict == Verdict::pass ? "pass"
                                       : c.verdict == Verdict::fail ? "FAIL" : "n/a");
    if (!c.witness.empty()) os << "  [" << c.witness << "]";
    os << "\n";
  }
  os << "gamma = " << fmt(gamma) << ", gamma0 = " << fmt(gamma0) << ", nu = " << fmt(nu)
     << ", natural stretch H = " << fmt(natural_stretch) << "\n";
  os << "sampled grid: " << grid_points << " log points on [" << fmt(grid_lo) << ", "
     << fmt(grid_hi) << "]\n";
  return os.str();
}

}  // namespace radcav
