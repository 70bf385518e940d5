#pragma once

#include <functional>

#include "ghostsim/axis.hpp"

namespace ghostsim {

struct QuadResult {
  Complex value{0.0, 0.0};
  double abs_error = 0.0;
  double abs_scale = 0.0;  // sum of |panel integral|, a cancellation-free scale
  long evals = 0;
  bool converged = true;

  QuadResult& operator+=(const QuadResult& o) {
    value += o.value;
    abs_error += o.abs_error;
    abs_scale += o.abs_scale;
    evals += o.evals;
    converged = converged && o.converged;
    return *this;
  }
};

using Integrand = std::function<Complex(double)>;
/// Upper bound on |d(phase)/du| of the integrand at u; used to size panels.
using PhaseRate = std::function<double(double)>;
/// Upper bound on |integral of f| outside [-r, r].
using TailBound = std::function<double(double)>;

/// Adaptive Gauss-Kronrod (G7,K15) over [a,b]. Panels are pre-split so that
/// each spans at most 1/panels_per_period of the local oscillation period
/// implied by `rate` (pass nullptr for smooth integrands), then refined until
/// the panel error fits its share of tol_abs.
QuadResult integrate_oscillatory(const Integrand& f, double a, double b, const PhaseRate& rate,
                                 double tol_abs, int panels_per_period = 8,
                                 long max_evals = 80000000);

/// Integral over the whole line for integrands that decay: starts on
/// [-r0, r0] and doubles the range until the analytic tail bound (when given)
/// drops under stop_tol, or two consecutive shells contribute less than
/// stop_tol each. stop_tol defaults to tol_abs; the residual tail bound is
/// folded into abs_error. Reported unconverged past r0 * max_range_factor.
QuadResult integrate_expanding(const Integrand& f, double r0, const PhaseRate& rate,
                               double tol_abs, int panels_per_period = 8,
                               double max_range_factor = 4096.0,
                               const TailBound& tail = {}, double stop_tol = 0.0);

}  // namespace ghostsim
