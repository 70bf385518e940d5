#include <doctest.h>

#include <cmath>
#include <numbers>

#include "ghostsim/axis.hpp"
#include "ghostsim/errors.hpp"

using namespace ghostsim;

TEST_CASE("make_axis centers the grid for both parities") {
  const Axis even = make_axis(4, 1e-6, 0.0);
  CHECK(even.coord(0) == doctest::Approx(-1.5e-6).epsilon(1e-12));
  CHECK(even.coord(1) == doctest::Approx(-0.5e-6).epsilon(1e-12));
  CHECK(even.coord(2) == doctest::Approx(0.5e-6).epsilon(1e-12));
  CHECK(even.coord(3) == doctest::Approx(1.5e-6).epsilon(1e-12));

  const Axis odd = make_axis(3, 2e-6, 10e-6);
  CHECK(odd.coord(0) == doctest::Approx(8e-6).epsilon(1e-12));
  CHECK(odd.coord(1) == doctest::Approx(10e-6).epsilon(1e-12));
  CHECK(odd.coord(2) == doctest::Approx(12e-6).epsilon(1e-12));

  const Axis tiny = make_axis(2, 1e-6, 0.0);
  CHECK(tiny.coord(0) == doctest::Approx(-0.5e-6).epsilon(1e-12));
  CHECK(tiny.coord(1) == doctest::Approx(0.5e-6).epsilon(1e-12));
}

TEST_CASE("make_axis rejects degenerate grids") {
  CHECK_THROWS_AS(make_axis(1, 1e-6, 0.0), ValidationError);
  CHECK_THROWS_AS(make_axis(16, 0.0, 0.0), ValidationError);
  CHECK_THROWS_AS(make_axis(16, -1e-6, 0.0), ValidationError);
}

TEST_CASE("axis coordinates are uniformly spaced") {
  const Axis a = make_axis(257, 3.7e-7, 1.3e-4);
  for (int i = 0; i + 1 < a.n; ++i)
    CHECK(a.coord(i + 1) - a.coord(i) == doctest::Approx(a.dx).epsilon(1e-12));
  CHECK(a.nearest_index(a.coord(77)) == 77);
  CHECK(a.nearest_index(a.coord(77) + 0.4 * a.dx) == 77);
  CHECK(a.nearest_index(-1.0) == 0);
  CHECK(a.nearest_index(1.0) == a.n - 1);
}

TEST_CASE("fourier dual axis satisfies n dx dq = 2 pi") {
  const Axis a = make_axis(4, 1e-6, 0.0);
  const Axis qa = fourier_dual_axis(a);
  CHECK(qa.n == a.n);
  CHECK(qa.center == 0.0);
  CHECK(qa.dx == doctest::Approx(0.5 * std::numbers::pi * 1e6).epsilon(1e-12));

  const Axis b = make_axis(1024, 4e-6, 0.0);
  const Axis qb = fourier_dual_axis(b);
  CHECK(qb.dx == doctest::Approx(1.53398e3).epsilon(1e-4));
  CHECK(std::abs(b.n * b.dx * qb.dx - 2.0 * std::numbers::pi) <
        1e-12 * 2.0 * std::numbers::pi);

  // dual of the dual restores pitch and extent (centering resets to zero)
  const Axis bb = fourier_dual_axis(qb);
  CHECK(bb.dx == doctest::Approx(b.dx).epsilon(1e-12));
  CHECK(bb.extent() == doctest::Approx(b.extent()).epsilon(1e-12));
}

TEST_CASE("power sums |E|^2 dx and is phase invariant") {
  const Axis a = make_axis(8, 1.0, 0.0);
  ComplexField f(a);
  CHECK(power(f) == 0.0);

  f.values[3] = Complex{1.0, 0.0};
  CHECK(power(f) == doctest::Approx(1.0).epsilon(1e-15));

  ComplexField g(a);
  for (int i = 0; i < a.n; ++i) g.values[static_cast<size_t>(i)] = Complex{0.3 * i, -0.1 * i};
  const double p = power(g);
  ComplexField scaled = g;
  for (auto& v : scaled.values) v *= Complex{2.0, 0.0};
  CHECK(power(scaled) == doctest::Approx(4.0 * p).epsilon(1e-13));

  ComplexField rotated = g;
  for (auto& v : rotated.values) v *= std::polar(1.0, 1.234);
  CHECK(power(rotated) == doctest::Approx(p).epsilon(1e-13));
}

TEST_CASE("field length must match its axis") {
  const Axis a = make_axis(8, 1.0, 0.0);
  CHECK_THROWS_AS(ComplexField(a, std::vector<Complex>(5)), ValidationError);
}
