#include "radcav/ode_engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "radcav/errors.hpp"

namespace radcav {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                 b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
// Dense-output weights.
constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                 d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                 d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

bool all_finite(const double* v, int n) {
  for (int i = 0; i < n; ++i)
    if (!std::isfinite(v[i])) return false;
  return true;
}

// Quartic continuous extension of one accepted step.
struct StepDense {
  int dim = 0;
  double t0 = 0.0, h = 0.0;
  std::vector<double> r;  // 5 blocks of dim

  void build(int n, double t, double hh, const double* y0, const double* y1,
             const double* k1, const double* k3, const double* k4, const double* k5,
             const double* k6, const double* k7) {
    dim = n;
    t0 = t;
    h = hh;
    r.resize(static_cast<size_t>(5 * n));
    for (int i = 0; i < n; ++i) {
      const double dy = y1[i] - y0[i];
      const double bspl = hh * k1[i] - dy;
      r[static_cast<size_t>(i)] = y0[i];
      r[static_cast<size_t>(n + i)] = dy;
      r[static_cast<size_t>(2 * n + i)] = bspl;
      r[static_cast<size_t>(3 * n + i)] = dy - hh * k7[i] - bspl;
      r[static_cast<size_t>(4 * n + i)] =
          hh * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] + d6 * k6[i] + d7 * k7[i]);
    }
  }

  void eval(double t, double* out) const {
    const double th = (t - t0) / h;
    const double th1 = 1.0 - th;
    for (int i = 0; i < dim; ++i) {
      out[i] = r[static_cast<size_t>(i)] +
               th * (r[static_cast<size_t>(dim + i)] +
                     th1 * (r[static_cast<size_t>(2 * dim + i)] +
                            th * (r[static_cast<size_t>(3 * dim + i)] +
                                  th1 * r[static_cast<size_t>(4 * dim + i)])));
    }
  }
};

double rms(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s / static_cast<double>(v.size()));
}

// Locate an event crossing inside (tl, th] on the dense interpolant.
// polarity +1: g goes negative -> nonnegative; -1: positive -> nonpositive.
double bisect_event(const EventSpec& ev, int polarity, const StepDense& dense, double tl,
                    double th, std::vector<double>& scratch) {
  for (int it = 0; it < 200; ++it) {
    if (th - tl <= 1e-12 * std::fmax(1.0, std::fabs(th))) break;
    const double tm = 0.5 * (tl + th);
    dense.eval(tm, scratch.data());
    double gm = ev.fn(tm, scratch.data());
    if (!std::isfinite(gm)) {
      th = tm;
      continue;
    }
    if ((polarity > 0 && gm < 0.0) || (polarity < 0 && gm > 0.0))
      tl = tm;
    else
      th = tm;
  }
  return th;
}

}  // namespace

void SampledArc::eval(double ti, double* out) const {
  if (t.empty()) throw OutOfRange("SampledArc::eval on empty arc");
  const double slack = 1e-12 * std::fmax(1.0, std::fabs(ti));
  if (ti < t.front() - slack || ti > t.back() + slack)
    throw OutOfRange("SampledArc::eval outside the sampled range");
  const double tq = std::clamp(ti, t.front(), t.back());
  size_t j = static_cast<size_t>(std::upper_bound(t.begin(), t.end(), tq) - t.begin());
  if (j == 0) j = 1;
  if (j >= t.size()) j = t.size() - 1;
  const size_t i = j - 1;
  const double h = t[j] - t[i];
  const double th = (tq - t[i]) / h;
  const double th1 = 1.0 - th;
  const double h00 = (1.0 + 2.0 * th) * th1 * th1;
  const double h10 = th * th1 * th1;
  const double h01 = th * th * (3.0 - 2.0 * th);
  const double h11 = th * th * (th - 1.0);
  const double* yi = y.data() + i * static_cast<size_t>(dim);
  const double* yj = y.data() + j * static_cast<size_t>(dim);
  const double* fi = f.data() + i * static_cast<size_t>(dim);
  const double* fj = f.data() + j * static_cast<size_t>(dim);
  for (int c = 0; c < dim; ++c)
    out[c] = h00 * yi[c] + h * h10 * fi[c] + h01 * yj[c] + h * h11 * fj[c];
}

double SampledArc::eval(double ti, int comp) const {
  std::vector<double> buf(static_cast<size_t>(dim));
  eval(ti, buf.data());
  return buf[static_cast<size_t>(comp)];
}

SampledArc integrate(const IvpProblem& p) {
  if (p.dim <= 0 || p.y0.size() != static_cast<size_t>(p.dim))
    throw DomainError("integrate: dim and y0 size disagree");
  if (!(p.t_max >= p.t0)) throw DomainError("integrate: t_max must be >= t0");

  const int n = p.dim;
  const double rtol = p.controls.rel_tol, atol = p.controls.abs_tol;
  const double span = p.t_max - p.t0;
  const double hmax = p.controls.max_step > 0.0 ? p.controls.max_step
                                                : (span > 0.0 ? span : 1.0);
  auto hmin_at = [&](double t) {
    return p.controls.min_step > 0.0 ? p.controls.min_step
                                     : 4.0 * kEps * std::fmax(1.0, std::fabs(t));
  };

  SampledArc arc;
  arc.dim = n;

  std::vector<double> y = p.y0;
  std::vector<double> k1(static_cast<size_t>(n)), k2(static_cast<size_t>(n)),
      k3(static_cast<size_t>(n)), k4(static_cast<size_t>(n)), k5(static_cast<size_t>(n)),
      k6(static_cast<size_t>(n)), k7(static_cast<size_t>(n)), yt(static_cast<size_t>(n)),
      ynew(static_cast<size_t>(n)), scratch(static_cast<size_t>(n)),
      werr(static_cast<size_t>(n));

  double t = p.t0;
  p.rhs(t, y.data(), k1.data());
  if (!all_finite(k1.data(), n))
    throw NonfiniteRhs("integrate: rhs not finite at the initial state");

  auto push_sample = [&](double ts, const double* ys, const double* fs) {
    arc.t.push_back(ts);
    arc.y.insert(arc.y.end(), ys, ys + n);
    arc.f.insert(arc.f.end(), fs, fs + n);
  };
  push_sample(t, y.data(), k1.data());

  std::vector<double> g_prev(p.events.size());
  for (size_t k = 0; k < p.events.size(); ++k) g_prev[k] = p.events[k].fn(t, y.data());

  if (span == 0.0) {
    arc.termination = Termination::reached_t_max;
    return arc;
  }

  // Initial step size by the standard two-stage estimate.
  double h;
  {
    for (int i = 0; i < n; ++i)
      werr[static_cast<size_t>(i)] =
          y[static_cast<size_t>(i)] / (atol + rtol * std::fabs(y[static_cast<size_t>(i)]));
    const double d0 = rms(werr);
    for (int i = 0; i < n; ++i)
      werr[static_cast<size_t>(i)] =
          k1[static_cast<size_t>(i)] / (atol + rtol * std::fabs(y[static_cast<size_t>(i)]));
    const double d1n = rms(werr);
    double h0 = (d0 < 1e-5 || d1n < 1e-5) ? 1e-6 : 0.01 * d0 / d1n;
    h0 = std::fmin(h0, span);
    for (int i = 0; i < n; ++i)
      yt[static_cast<size_t>(i)] = y[static_cast<size_t>(i)] + h0 * k1[static_cast<size_t>(i)];
    p.rhs(t + h0, yt.data(), k2.data());
    double h1;
    if (all_finite(k2.data(), n)) {
      for (int i = 0; i < n; ++i)
        werr[static_cast<size_t>(i)] =
            (k2[static_cast<size_t>(i)] - k1[static_cast<size_t>(i)]) /
            (atol + rtol * std::fabs(y[static_cast<size_t>(i)]));
      const double d2 = rms(werr) / h0;
      const double dm = std::fmax(d1n, d2);
      h1 = dm <= 1e-15 ? std::fmax(1e-6, h0 * 1e-3) : std::pow(0.01 / dm, 0.2);
    } else {
      h1 = 1e-6 * span;
    }
    h = std::fmin(std::fmin(100.0 * h0, h1), std::fmin(hmax, span));
  }

  double errold = 1e-4;
  bool last_rejected = false;
  StepDense dense;

  while (true) {
    if (t >= p.t_max) {
      arc.termination = Termination::reached_t_max;
      break;
    }
    if (arc.n_accepted + arc.n_rejected >= p.controls.max_steps) {
      arc.termination = Termination::step_budget;
      break;
    }
    h = std::fmin(h, hmax);
    bool landing = false;
    if (t + h >= p.t_max) {
      h = p.t_max - t;
      landing = true;
    }
    if (!landing && h < hmin_at(t)) {
      arc.termination = Termination::step_underflow;
      break;
    }

    // Stages.
    for (int i = 0; i < n; ++i) yt[i] = y[i] + h * a21 * k1[i];
    p.rhs(t + c2 * h, yt.data(), k2.data());
    for (int i = 0; i < n; ++i) yt[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
    p.rhs(t + c3 * h, yt.data(), k3.data());
    for (int i = 0; i < n; ++i) yt[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
    p.rhs(t + c4 * h, yt.data(), k4.data());
    for (int i = 0; i < n; ++i)
      yt[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
    p.rhs(t + c5 * h, yt.data(), k5.data());
    for (int i = 0; i < n; ++i)
      yt[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
    p.rhs(t + h, yt.data(), k6.data());
    for (int i = 0; i < n; ++i)
      ynew[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
    p.rhs(t + h, ynew.data(), k7.data());

    bool finite_step = all_finite(k2.data(), n) && all_finite(k3.data(), n) &&
                       all_finite(k4.data(), n) && all_finite(k5.data(), n) &&
                       all_finite(k6.data(), n) && all_finite(ynew.data(), n) &&
                       all_finite(k7.data(), n);

    double err = std::numeric_limits<double>::infinity();
    double err_raw = 0.0;
    if (finite_step) {
      for (int i = 0; i < n; ++i) {
        const double ei = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] +
                               e6 * k6[i] + e7 * k7[i]);
        const double sc = atol + rtol * std::fmax(std::fabs(y[i]), std::fabs(ynew[i]));
        werr[static_cast<size_t>(i)] = ei / sc;
        err_raw += ei * ei;
      }
      err = rms(werr);
      err_raw = std::sqrt(err_raw / n);
    }

    if (!finite_step || !(err <= 1.0)) {
      ++arc.n_rejected;
      last_rejected = true;
      const double fac =
          finite_step ? std::clamp(0.9 * std::pow(std::fmax(err, 1e-10), -0.2), 0.2, 1.0) : 0.5;
      h *= fac;
      if (h < hmin_at(t)) {
        arc.termination = Termination::step_underflow;
        break;
      }
      continue;
    }

    // Accepted.
    ++arc.n_accepted;
    arc.error_estimate += err_raw;
    const double t_new = landing ? p.t_max : t + h;
    dense.build(n, t, h, y.data(), ynew.data(), k1.data(), k3.data(), k4.data(), k5.data(),
                k6.data(), k7.data());

    // Events.
    double t_stop = t_new;
    int hit = -1;
    std::vector<std::pair<int, double>> step_marks;
    for (size_t k = 0; k < p.events.size(); ++k) {
      const EventSpec& ev = p.events[k];
      const double g0 = g_prev[k];
      const double g1 = ev.fn(t_new, ynew.data());
      int polarity = 0;
      if ((ev.direction >= 0) && g0 < 0.0 && g1 >= 0.0) polarity = 1;
      if ((ev.direction <= 0) && g0 > 0.0 && g1 <= 0.0) polarity = -1;
      if (polarity != 0) {
        double te = bisect_event(ev, polarity, dense, t, t_new, scratch);
        te = std::clamp(te, t + 4.0 * kEps * std::fmax(1.0, std::fabs(t)), t_new);
        if (ev.terminal) {
          // te == t_new must register: steps narrower than the bisection
          // tolerance return the right endpoint verbatim.
          if (hit < 0 || te < t_stop) {
            t_stop = te;
            hit = static_cast<int>(k);
          }
        } else {
          step_marks.emplace_back(static_cast<int>(k), te);
        }
      }
      g_prev[k] = g1;
    }
    for (const auto& m : step_marks)
      if (m.second <= t_stop) arc.marks.push_back(m);

    // Interior samples under the spacing cap.
    if (p.controls.max_sample_spacing > 0.0) {
      const double cap = p.controls.max_sample_spacing * std::fmax(1.0, std::fabs(t));
      const double seg = t_stop - t;
      if (seg > cap) {
        const long m = static_cast<long>(seg / cap);
        for (long j = 1; j <= m; ++j) {
          const double tj = t + seg * static_cast<double>(j) / static_cast<double>(m + 1);
          dense.eval(tj, yt.data());
          p.rhs(tj, yt.data(), k2.data());
          if (!all_finite(k2.data(), n))
            throw NonfiniteRhs("integrate: rhs not finite at an interior sample");
          push_sample(tj, yt.data(), k2.data());
        }
      }
    }

    if (hit >= 0) {
      dense.eval(t_stop, yt.data());
      p.rhs(t_stop, yt.data(), k2.data());
      if (!all_finite(k2.data(), n))
        throw NonfiniteRhs("integrate: rhs not finite at the event point");
      push_sample(t_stop, yt.data(), k2.data());
      arc.termination = Termination::event;
      arc.event_index = hit;
      break;
    }

    push_sample(t_new, ynew.data(), k7.data());
    t = t_new;
    y = ynew;
    k1 = k7;

    double fac = 0.9 * std::pow(std::fmax(err, 1e-10), -0.14) * std::pow(errold, 0.08);
    fac = std::clamp(fac, 0.2, 10.0);
    if (last_rejected) fac = std::fmin(fac, 1.0);
    last_rejected = false;
    errold = std::fmax(err, 1e-4);
    h *= fac;
  }

  return arc;
}

double refine_root(const std::function<double(double)>& f, double lo, double hi,
                   RootOptions opt) {
  if (!(lo < hi)) std::swap(lo, hi);
  double flo = f(lo), fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if (!std::isfinite(flo) || !std::isfinite(fhi) || flo * fhi > 0.0)
    throw BracketError("refine_root: endpoints do not bracket a sign change");
  int side = 0;
  for (int it = 0; it < opt.max_iter; ++it) {
    const double w = hi - lo;
    if (w <= opt.x_tol * std::fmax(1.0, std::fmax(std::fabs(lo), std::fabs(hi)))) break;
    double xm = (lo * fhi - hi * flo) / (fhi - flo);
    if (!std::isfinite(xm) || xm <= lo || xm >= hi) xm = 0.5 * (lo + hi);
    const double fm = f(xm);
    if (fm == 0.0 || (opt.f_tol > 0.0 && std::isfinite(fm) && std::fabs(fm) <= opt.f_tol))
      return xm;
    if (!std::isfinite(fm)) {
      hi = xm;  // retreat toward the known-finite low end
      fhi = flo * -1.0;
      side = 0;
      continue;
    }
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = xm;
      flo = fm;
      if (side == -1) fhi *= 0.5;
      side = -1;
    } else {
      hi = xm;
      fhi = fm;
      if (side == 1) flo *= 0.5;
      side = 1;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace radcav
