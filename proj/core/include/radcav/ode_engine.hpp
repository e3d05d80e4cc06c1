#pragma once

#include <functional>
#include <vector>

namespace radcav {

struct OdeControls {
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  double max_step = 0.0;   // 0: span of integration
  double min_step = 0.0;   // 0: 4*eps*max(1,|t|)
  long max_steps = 2000000;
  // When positive, stored samples are at most max_sample_spacing*max(1,|t|)
  // apart; interior points come from the dense interpolant.
  double max_sample_spacing = 0.0;
};

// Scalar event g(t,y); integration stops at the refined crossing time when
// terminal, otherwise the crossing is recorded and integration continues.
// direction: +1 fires on g crossing from negative to nonnegative,
// -1 on positive to nonpositive, 0 on any sign change.
struct EventSpec {
  std::function<double(double, const double*)> fn;
  int direction = 0;
  bool terminal = true;
};

struct IvpProblem {
  int dim = 0;
  std::function<void(double, const double*, double*)> rhs;
  double t0 = 0.0;
  std::vector<double> y0;
  double t_max = 0.0;
  std::vector<EventSpec> events;
  OdeControls controls;
};

enum class Termination { reached_t_max, event, step_underflow, step_budget };

// Integration record: stored samples (t_i, y_i, f_i) with t strictly
// increasing, plus the piecewise cubic Hermite interpolant over them.
struct SampledArc {
  int dim = 0;
  std::vector<double> t;
  std::vector<double> y;  // row-major, size()*dim
  std::vector<double> f;  // rhs at each sample
  Termination termination = Termination::reached_t_max;
  int event_index = -1;
  std::vector<std::pair<int, double>> marks;  // nonterminal event crossings
  long n_accepted = 0;
  long n_rejected = 0;
  // Sum of accepted local error estimates, in solution units.
  double error_estimate = 0.0;

  size_t size() const { return t.size(); }
  const double* state(size_t i) const { return y.data() + i * dim; }
  void eval(double ti, double* out) const;
  double eval(double ti, int comp) const;
};

// Explicit Dormand-Prince 5(4) pair with PI step control; event times are
// located by bisection on the dense interpolant to |dt| <= 1e-12*max(1,|t|).
SampledArc integrate(const IvpProblem& p);

struct RootOptions {
  double f_tol = 0.0;
  double x_tol = 1e-13;  // width <= x_tol*max(1,|lo|,|hi|)
  int max_iter = 200;
};

// Bisection with secant acceleration on a sign-changing bracket.
double refine_root(const std::function<double(double)>& f, double lo, double hi,
                   RootOptions opt = {});

}  // namespace radcav
