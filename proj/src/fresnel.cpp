#include "ghostsim/fresnel.hpp"

#include <cmath>
#include <mutex>
#include <numbers>
#include <vector>

#include "ghostsim/quadrature.hpp"

namespace ghostsim {

namespace {

// C + iS tabulated on [0, kTableMax] by cumulative Gauss-Kronrod segments,
// cubic-interpolated; the standard asymptotic auxiliary series takes over
// beyond, where it is accurate to ~1e-11.
constexpr double kTableMax = 6.0;
constexpr int kTableN = 6145;  // pitch 1/1024

struct FresnelTable {
  std::vector<double> c, s;
  double dx = kTableMax / (kTableN - 1);

  FresnelTable() {
    c.resize(kTableN);
    s.resize(kTableN);
    c[0] = s[0] = 0.0;
    auto f = [](double t) {
      const double ph = 0.5 * std::numbers::pi * t * t;
      return Complex{std::cos(ph), std::sin(ph)};
    };
    for (int i = 1; i < kTableN; ++i) {
      const QuadResult seg =
          integrate_oscillatory(f, (i - 1) * dx, i * dx, nullptr, 1e-15, 8);
      c[static_cast<size_t>(i)] = c[static_cast<size_t>(i - 1)] + seg.value.real();
      s[static_cast<size_t>(i)] = s[static_cast<size_t>(i - 1)] + seg.value.imag();
    }
  }

  double interp(const std::vector<double>& v, double x) const {
    const double ft = x / dx;
    long idx = static_cast<long>(std::floor(ft));
    idx = std::max<long>(1, std::min<long>(idx, kTableN - 3));
    const double t = ft - static_cast<double>(idx);
    const double p0 = v[static_cast<size_t>(idx - 1)], p1 = v[static_cast<size_t>(idx)],
                 p2 = v[static_cast<size_t>(idx + 1)], p3 = v[static_cast<size_t>(idx + 2)];
    return 0.5 * (2.0 * p1 + (p2 - p0) * t + (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3) * t * t +
                  (-p0 + 3.0 * p1 - 3.0 * p2 + p3) * t * t * t);
  }
};

const FresnelTable& table() {
  static FresnelTable t;
  return t;
}

}  // namespace

FresnelCS fresnel_cs(double xxa) {
  const double x = std::abs(xxa);
  double cc, ss;
  if (x <= kTableMax) {
    const FresnelTable& t = table();
    cc = t.interp(t.c, x);
    ss = t.interp(t.s, x);
  } else {
    // asymptotic auxiliary series: C = 1/2 + f sin - g cos, S = 1/2 - f cos - g sin
    const double u = 1.0 / (std::numbers::pi * x * x);
    const double u2 = u * u;
    double f = 0.0, g = 0.0, term = 1.0;
    // (4k-1)!! u^{2k} and (4k+1)!! u^{2k+1}, truncated where they stop helping
    double dblfac = 1.0;
    for (int k = 0; k < 8; ++k) {
      const double fterm = (k % 2 == 0 ? 1.0 : -1.0) * dblfac * term;
      f += fterm;
      const double gfac = dblfac * (4.0 * k + 1.0);
      g += (k % 2 == 0 ? 1.0 : -1.0) * gfac * term * u;
      dblfac *= (4.0 * k + 1.0) * (4.0 * k + 3.0);
      term *= u2;
      if (dblfac * term < 1e-16) break;
    }
    f /= std::numbers::pi * x;
    g /= std::numbers::pi * x;
    const double ph = 0.5 * std::numbers::pi * x * x;
    const double cph = std::cos(ph), sph = std::sin(ph);
    cc = 0.5 + f * sph - g * cph;
    ss = 0.5 - f * cph - g * sph;
  }
  if (xxa < 0.0) {
    cc = -cc;
    ss = -ss;
  }
  return {cc, ss};
}

Complex chirped_interval_transform(double a, double b, double alpha, double gamma) {
  // alpha u^2 - gamma u = alpha (u - gamma/(2 alpha))^2 - gamma^2/(4 alpha)
  const double shift = 0.5 * gamma / alpha;
  const double scale = std::sqrt(2.0 * alpha / std::numbers::pi);
  const FresnelCS fb = fresnel_cs((b - shift) * scale);
  const FresnelCS fa = fresnel_cs((a - shift) * scale);
  const Complex diff{fb.c - fa.c, fb.s - fa.s};
  const double mag = std::sqrt(0.5 * std::numbers::pi / alpha);
  return std::polar(1.0, -0.25 * gamma * gamma / alpha) * mag * diff;
}

}  // namespace ghostsim
