#pragma once

#include <complex>
#include <vector>

namespace ghostsim {

using Complex = std::complex<double>;

/// Uniform 1D sample grid. Sample i sits at center + (i - (n-1)/2) * dx, so the
/// grid is symmetric about `center` for both parities of n (odd n puts a sample
/// exactly at the center, even n straddles it).
struct Axis {
  int n = 0;
  double dx = 0.0;
  double center = 0.0;

  double coord(int i) const { return center + (i - 0.5 * (n - 1)) * dx; }
  double extent() const { return n * dx; }
  double front() const { return coord(0); }
  double back() const { return coord(n - 1); }

  /// Index of the sample closest to x, clamped to [0, n-1].
  int nearest_index(double x) const;

  std::vector<double> coords() const;

  bool operator==(const Axis&) const = default;
};

/// Builds a validated axis. Throws ValidationError for n < 2 or dx <= 0.
Axis make_axis(int n, double dx, double center = 0.0);

/// Spatial-frequency axis conjugate to `a`: n samples, pitch dq = 2pi/(n dx),
/// centered at q = 0 with the same centering convention as Axis.
Axis fourier_dual_axis(const Axis& a);

/// Complex amplitudes sampled on an axis (square-root-intensity units).
struct ComplexField {
  Axis axis;
  std::vector<Complex> values;

  ComplexField() = default;
  explicit ComplexField(const Axis& a) : axis(a), values(a.n, Complex{0.0, 0.0}) {}
  ComplexField(const Axis& a, std::vector<Complex> v);

  int size() const { return axis.n; }
};

/// Total power sum |E_i|^2 dx.
double power(const ComplexField& f);

/// Per-sample intensities |E_i|^2.
std::vector<double> intensity(const ComplexField& f);

void require_same_axis(const Axis& a, const Axis& b, const char* what);

}  // namespace ghostsim
