#include "ghostsim/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "ghostsim/errors.hpp"

namespace ghostsim {

namespace {

// Kronrod 15-point nodes/weights on [-1,1] with the embedded Gauss 7 rule.
constexpr double kXgk[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769, 0.741531185599394,
    0.586087235467691, 0.405845151377397, 0.207784955007898, 0.000000000000000};
constexpr double kWgk[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250, 0.140653259715525,
    0.169004726639267, 0.190350578064785, 0.204432940075298, 0.209482141084728};
constexpr double kWg[4] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119, 0.417959183673469};

struct Panel {
  double a, b;
};

struct GkEval {
  Complex integral;
  double error;
};

GkEval gk15(const Integrand& f, double a, double b) {
  const double h = 0.5 * (b - a);
  const double c = 0.5 * (a + b);
  Complex fv[15];
  for (int i = 0; i < 7; ++i) {
    fv[i] = f(c - h * kXgk[i]);
    fv[14 - i] = f(c + h * kXgk[i]);
  }
  fv[7] = f(c);

  Complex resk{0.0, 0.0}, resg{0.0, 0.0};
  for (int i = 0; i < 7; ++i) resk += kWgk[i] * (fv[i] + fv[14 - i]);
  resk += kWgk[7] * fv[7];
  for (int i = 0; i < 3; ++i) resg += kWg[i] * (fv[2 * i + 1] + fv[13 - 2 * i]);
  resg += kWg[3] * fv[7];

  GkEval out;
  out.integral = resk * h;
  out.error = std::abs(resk - resg) * h;
  return out;
}

}  // namespace

QuadResult integrate_oscillatory(const Integrand& f, double a, double b, const PhaseRate& rate,
                                 double tol_abs, int panels_per_period, long max_evals) {
  QuadResult res;
  if (!(b > a)) return res;
  const double total = b - a;
  const double min_width = total * 1e-13;

  std::vector<Panel> stack{{a, b}};
  while (!stack.empty()) {
    Panel p = stack.back();
    stack.pop_back();
    const double w = p.b - p.a;

    if (rate && w > min_width) {
      // Phase-rate bounds here are convex piecewise-linear, so endpoints and
      // midpoint bound the panel.
      const double r = std::max({rate(p.a), rate(p.b), rate(0.5 * (p.a + p.b))});
      if (w * r > 2.0 * std::numbers::pi / panels_per_period) {
        stack.push_back({p.a, 0.5 * (p.a + p.b)});
        stack.push_back({0.5 * (p.a + p.b), p.b});
        continue;
      }
    }

    const GkEval e = gk15(f, p.a, p.b);
    res.evals += 15;
    if (res.evals > max_evals) {
      res.converged = false;
      res.value += e.integral;
      res.abs_error += e.error;
      res.abs_scale += std::abs(e.integral);
      continue;
    }
    if (e.error > tol_abs * (w / total) && w > min_width) {
      stack.push_back({p.a, 0.5 * (p.a + p.b)});
      stack.push_back({0.5 * (p.a + p.b), p.b});
      continue;
    }
    res.value += e.integral;
    res.abs_error += e.error;
    res.abs_scale += std::abs(e.integral);
  }
  if (res.abs_error > tol_abs * 4.0) res.converged = false;
  return res;
}

QuadResult integrate_expanding(const Integrand& f, double r0, const PhaseRate& rate,
                               double tol_abs, int panels_per_period, double max_range_factor,
                               const TailBound& tail, double stop_tol) {
  if (stop_tol <= 0.0) stop_tol = tol_abs;
  QuadResult res = integrate_oscillatory(f, -r0, r0, rate, tol_abs, panels_per_period);
  double r = r0;
  int quiet_shells = 0;
  while (true) {
    if (tail) {
      const double bound = tail(r);
      if (bound < stop_tol) break;
      if (r > r0 * max_range_factor) {
        res.converged = false;
        res.abs_error += bound;
        break;
      }
    } else {
      if (quiet_shells >= 2) break;
      if (r > r0 * max_range_factor) {
        res.converged = false;
        break;
      }
    }
    const double r_next = 2.0 * r;
    // the refinement loop still polices accuracy, so shells can start from
    // whole-period panels
    const int ppp_shell = std::max(2, panels_per_period / 4);
    QuadResult left = integrate_oscillatory(f, -r_next, -r, rate, tol_abs, ppp_shell);
    QuadResult right = integrate_oscillatory(f, r, r_next, rate, tol_abs, ppp_shell);
    res += left;
    res += right;
    const double shell = std::abs(left.value) + std::abs(right.value);
    quiet_shells = shell < stop_tol ? quiet_shells + 1 : 0;
    r = r_next;
  }
  if (tail) res.abs_error += std::min(tail(r), stop_tol);
  return res;
}

}  // namespace ghostsim
