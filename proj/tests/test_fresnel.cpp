#include <doctest.h>

#include <cmath>
#include <numbers>

#include "ghostsim/fresnel.hpp"
#include "ghostsim/quadrature.hpp"

using namespace ghostsim;

namespace {

Complex reference_cs(double x) {
  auto f = [](double t) {
    const double ph = 0.5 * std::numbers::pi * t * t;
    return Complex{std::cos(ph), std::sin(ph)};
  };
  auto rate = [](double t) { return std::numbers::pi * std::abs(t); };
  const double lo = std::min(0.0, x), hi = std::max(0.0, x);
  QuadResult r = integrate_oscillatory(f, lo, hi, rate, 1e-13, 8);
  return x >= 0.0 ? r.value : -r.value;
}

}  // namespace

TEST_CASE("fresnel C and S against direct quadrature, both regimes") {
  for (double x : {0.1, 0.7, 1.0, 2.3, 4.9, 5.999, 6.001, 7.5, 11.0, 25.0}) {
    const Complex ref = reference_cs(x);
    const FresnelCS v = fresnel_cs(x);
    CHECK(std::abs(v.c - ref.real()) < 2e-9);
    CHECK(std::abs(v.s - ref.imag()) < 2e-9);
    // odd symmetry
    const FresnelCS m = fresnel_cs(-x);
    CHECK(m.c == -v.c);
    CHECK(m.s == -v.s);
  }
  // classic spot value
  const FresnelCS one = fresnel_cs(1.0);
  CHECK(one.c == doctest::Approx(0.7798934).epsilon(1e-6));
  CHECK(one.s == doctest::Approx(0.4382591).epsilon(1e-6));
  // both tend to 1/2
  const FresnelCS big = fresnel_cs(2000.0);
  CHECK(big.c == doctest::Approx(0.5).epsilon(1e-3));
  CHECK(big.s == doctest::Approx(0.5).epsilon(1e-3));
}

TEST_CASE("chirped interval transform agrees with quadrature across gamma") {
  const double a = 122.5e-6, b = 207.5e-6;
  for (double alpha : {2.6e8, 7.4e7}) {
    for (double gamma : {0.0, 3.1e4, -8.8e4, 6.4e5, -2.9e6, 4.0e7}) {
      auto f = [&](double u) { return std::polar(1.0, alpha * u * u - gamma * u); };
      auto rate = [&](double u) { return std::abs(2.0 * alpha * u - gamma); };
      const QuadResult ref = integrate_oscillatory(f, a, b, rate, 1e-13 * (b - a), 8);
      const Complex closed = chirped_interval_transform(a, b, alpha, gamma);
      CHECK(std::abs(closed - ref.value) < 1e-8 * (b - a));
    }
  }
}
