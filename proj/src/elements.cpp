#include "ghostsim/elements.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "ghostsim/errors.hpp"
#include "ghostsim/fft.hpp"

namespace ghostsim {

void ApertureSpec::validate() const {
  if (kind == ApertureKind::custom) {
    if (custom_axis.n < 2 || static_cast<int>(custom_profile.size()) != custom_axis.n)
      throw ValidationError("custom aperture profile does not match its axis");
    for (double t : custom_profile)
      if (!(t >= 0.0 && t <= 1.0)) throw ValidationError("transmission values must lie in [0,1]");
    return;
  }
  if (!(slit_width > 0.0)) throw ValidationError("slit width must be positive");
  if (!(slit_separation > slit_width))
    throw ValidationError("slits overlap: need slit separation d > slit width b");
  if (kind == ApertureKind::incomplete_double_slit &&
      !(retained_fraction > 0.0 && retained_fraction <= 1.0))
    throw ValidationError("retained fraction must lie in (0, 1]");
}

std::vector<std::pair<double, double>> ApertureSpec::open_intervals() const {
  validate();
  const double b = slit_width, d = slit_separation;
  switch (kind) {
    case ApertureKind::double_slit:
      return {{-d / 2 - b / 2, -d / 2 + b / 2}, {d / 2 - b / 2, d / 2 + b / 2}};
    case ApertureKind::single_slit:
      return {{d / 2 - b / 2, d / 2 + b / 2}};
    case ApertureKind::incomplete_double_slit:
      return {{-d / 2 + b / 2 - retained_fraction * b, -d / 2 + b / 2},
              {d / 2 - b / 2, d / 2 + b / 2}};
    case ApertureKind::custom:
      break;
  }
  throw ValidationError("custom aperture has no closed-form intervals");
}

double ApertureSpec::smallest_feature() const {
  if (kind == ApertureKind::custom) return custom_axis.dx;
  double w = std::numeric_limits<double>::infinity();
  for (const auto& [lo, hi] : open_intervals()) w = std::min(w, hi - lo);
  return w;
}

double ApertureSpec::open_area() const {
  if (kind == ApertureKind::custom) {
    double a = 0.0;
    for (double t : custom_profile) a += t;
    return a * custom_axis.dx;
  }
  double a = 0.0;
  for (const auto& [lo, hi] : open_intervals()) a += hi - lo;
  return a;
}

ApertureSpec ApertureSpec::double_slit(double b, double d) {
  ApertureSpec s;
  s.kind = ApertureKind::double_slit;
  s.slit_width = b;
  s.slit_separation = d;
  s.validate();
  return s;
}

ApertureSpec ApertureSpec::single_slit(double b, double d) {
  ApertureSpec s = double_slit(b, d);
  s.kind = ApertureKind::single_slit;
  return s;
}

ApertureSpec ApertureSpec::incomplete_double_slit(double b, double d, double rf) {
  ApertureSpec s = double_slit(b, d);
  s.kind = ApertureKind::incomplete_double_slit;
  s.retained_fraction = rf;
  s.validate();
  return s;
}

ApertureSpec ApertureSpec::custom(const Axis& axis, std::vector<double> profile) {
  ApertureSpec s;
  s.kind = ApertureKind::custom;
  s.custom_axis = axis;
  s.custom_profile = std::move(profile);
  s.validate();
  return s;
}

ComplexField mask_profile(const ApertureSpec& spec, const Axis& axis) {
  spec.validate();
  ComplexField out(axis);

  if (spec.kind == ApertureKind::custom) {
    // Resample by nearest cell; tests use matching axes.
    for (int i = 0; i < axis.n; ++i) {
      const int j = spec.custom_axis.nearest_index(axis.coord(i));
      out.values[static_cast<size_t>(i)] = spec.custom_profile[static_cast<size_t>(j)];
    }
    return out;
  }

  const auto intervals = spec.open_intervals();
  if (spec.smallest_feature() < 4.0 * axis.dx)
    throw ValidationError("grid pitch too coarse: smallest open feature " +
                          std::to_string(spec.smallest_feature()) + " m needs >= 4 samples");
  double lo_edge = intervals.front().first, hi_edge = intervals.back().second;
  if (lo_edge < axis.front() - 0.5 * axis.dx || hi_edge > axis.back() + 0.5 * axis.dx)
    throw ValidationError("axis narrower than the mask support");

  // Cell [x - dx/2, x + dx/2] gets its covered-area fraction; fully covered
  // and fully dark cells stay exactly 1 and 0.
  for (int i = 0; i < axis.n; ++i) {
    const double cell_lo = axis.coord(i) - 0.5 * axis.dx;
    const double cell_hi = axis.coord(i) + 0.5 * axis.dx;
    double t = 0.0;
    for (const auto& [lo, hi] : intervals) {
      if (lo <= cell_lo && cell_hi <= hi) {
        t = 1.0;
        break;
      }
      t += std::max(0.0, std::min(hi, cell_hi) - std::max(lo, cell_lo)) / axis.dx;
    }
    // snap rounding dust so grid-aligned edges stay exactly binary
    if (t > 1.0 - 1e-12) t = 1.0;
    if (t < 1e-12) t = 0.0;
    out.values[static_cast<size_t>(i)] = t;
  }
  return out;
}

ComplexField apply_mask(const ComplexField& f, const ApertureSpec& spec) {
  const ComplexField t = mask_profile(spec, f.axis);
  ComplexField out(f.axis);
  for (size_t i = 0; i < out.values.size(); ++i) out.values[i] = f.values[i] * t.values[i];
  return out;
}

ChirpGuard fresnel_sampling_check(const Axis& axis, double z, double wavelength) {
  const double k = 2.0 * std::numbers::pi / wavelength;
  const double dq = 2.0 * std::numbers::pi / (axis.n * axis.dx);
  const double q_edge = std::numbers::pi / axis.dx;
  ChirpGuard g;
  g.edge_phase_step = q_edge * dq * z / k;
  g.q_safe = std::numbers::pi * k / (z * dq);  // = k * extent / (2 z)
  g.ok = g.edge_phase_step <= std::numbers::pi;
  if (!g.ok) {
    g.message = "free propagation over z=" + std::to_string(z) +
                " m: spectral chirp exceeds Nyquist beyond |q|=" + std::to_string(g.q_safe) +
                " rad/m (grid edge " + std::to_string(q_edge) +
                "); diffraction past the window wraps around";
  }
  return g;
}

ComplexField propagate_fresnel(const ComplexField& f, double z, double wavelength,
                               bool strict) {
  if (!(z > 0.0)) throw ValidationError("propagation distance must be positive");
  if (!(wavelength > 0.0)) throw ValidationError("wavelength must be positive");
  if (strict) {
    const ChirpGuard g = fresnel_sampling_check(f.axis, z, wavelength);
    if (!g.ok) throw ValidationError(g.message);
  }

  const Axis& a = f.axis;
  const double k = 2.0 * std::numbers::pi / wavelength;
  std::vector<Complex> v = f.values;
  fft_inplace(v, -1);
  const double kz = k * z;
  for (int m = 0; m < a.n; ++m) {
    const double q = fft_bin_frequency(a, m);
    v[static_cast<size_t>(m)] *= std::polar(1.0, kz - 0.5 * q * q * z / k);
  }
  fft_inplace(v, +1);
  const double inv_n = 1.0 / a.n;
  for (Complex& c : v) c *= inv_n;
  return ComplexField(a, std::move(v));
}

std::vector<Complex> propagate_kernel_matrix(const Axis& axis_in, const Axis& axis_out,
                                             double z, double wavelength) {
  if (!(z > 0.0)) throw ValidationError("propagation distance must be positive");
  if (axis_in.n > 512 || axis_out.n > 512)
    throw ValidationError("kernel matrix is the slow reference path, n <= 512");
  const double k = 2.0 * std::numbers::pi / wavelength;
  const double amp = std::sqrt(k / (2.0 * std::numbers::pi * z)) * axis_in.dx;
  const double phase0 = k * z - 0.25 * std::numbers::pi;  // sqrt(1/i) = e^{-i pi/4}
  std::vector<Complex> m(static_cast<size_t>(axis_out.n) * static_cast<size_t>(axis_in.n));
  for (int j = 0; j < axis_out.n; ++j) {
    const double xo = axis_out.coord(j);
    for (int i = 0; i < axis_in.n; ++i) {
      const double u = xo - axis_in.coord(i);
      m[static_cast<size_t>(j) * static_cast<size_t>(axis_in.n) + static_cast<size_t>(i)] =
          std::polar(amp, phase0 + 0.5 * k * u * u / z);
    }
  }
  return m;
}

std::vector<Complex> apply_kernel_matrix(const std::vector<Complex>& matrix,
                                         const Axis& axis_out, const ComplexField& f) {
  const size_t n_in = f.values.size();
  const size_t n_out = static_cast<size_t>(axis_out.n);
  if (matrix.size() != n_in * n_out) throw ValidationError("kernel matrix shape mismatch");
  std::vector<Complex> out(n_out, Complex{0.0, 0.0});
  for (size_t j = 0; j < n_out; ++j) {
    Complex acc{0.0, 0.0};
    const Complex* row = matrix.data() + j * n_in;
    for (size_t i = 0; i < n_in; ++i) acc += row[i] * f.values[i];
    out[j] = acc;
  }
  return out;
}

std::pair<ComplexField, ComplexField> split_beam(const ComplexField& f) {
  constexpr double inv_sqrt2 = 0.70710678118654752440;
  ComplexField a(f.axis), b(f.axis);
  for (size_t i = 0; i < f.values.size(); ++i) {
    a.values[i] = f.values[i] * inv_sqrt2;
    b.values[i] = a.values[i];
  }
  return {std::move(a), std::move(b)};
}

PathElement PathElement::free_space(double z) {
  PathElement e;
  e.kind = Kind::free_space;
  e.distance = z;
  return e;
}

PathElement PathElement::masked(const ApertureSpec& spec) {
  PathElement e;
  e.kind = Kind::mask;
  e.aperture = spec;
  return e;
}

double PathSpec::total_distance() const {
  double z = 0.0;
  for (const auto& e : elements)
    if (e.kind == PathElement::Kind::free_space) z += e.distance;
  return z;
}

void PathSpec::validate() const {
  for (const auto& e : elements) {
    if (e.kind == PathElement::Kind::free_space) {
      if (!(e.distance > 0.0)) throw ValidationError("free segment needs a positive distance");
    } else {
      e.aperture.validate();
    }
  }
}

ComplexField run_path(const ComplexField& source, const PathSpec& path, double wavelength,
                      bool strict) {
  path.validate();
  ComplexField f = source;
  for (const auto& e : path.elements) {
    if (e.kind == PathElement::Kind::free_space)
      f = propagate_fresnel(f, e.distance, wavelength, strict);
    else
      f = apply_mask(f, e.aperture);
  }
  return f;
}

}  // namespace ghostsim
