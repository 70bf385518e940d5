#pragma once

#include "ghostsim/axis.hpp"

namespace ghostsim {

/// Fresnel integrals C(x) = integral_0^x cos(pi t^2 / 2) dt and the matching
/// S(x), accurate to ~1e-9 over the full double range (odd in x).
struct FresnelCS {
  double c, s;
};
FresnelCS fresnel_cs(double x);

/// integral_a^b exp(i (alpha u^2 - gamma u)) du for alpha > 0, in closed form
/// by completing the square.
Complex chirped_interval_transform(double a, double b, double alpha, double gamma);

}  // namespace ghostsim
