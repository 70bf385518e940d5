#include "ghostsim/axis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "ghostsim/errors.hpp"

namespace ghostsim {

int Axis::nearest_index(double x) const {
  const double fi = (x - center) / dx + 0.5 * (n - 1);
  const int i = static_cast<int>(std::lround(fi));
  return std::clamp(i, 0, n - 1);
}

std::vector<double> Axis::coords() const {
  std::vector<double> xs(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) xs[static_cast<size_t>(i)] = coord(i);
  return xs;
}

Axis make_axis(int n, double dx, double center) {
  if (n < 2) throw ValidationError("axis needs at least 2 samples, got n=" + std::to_string(n));
  if (!(dx > 0.0) || !std::isfinite(dx))
    throw ValidationError("axis pitch must be positive and finite");
  if (!std::isfinite(center)) throw ValidationError("axis center must be finite");
  return Axis{n, dx, center};
}

Axis fourier_dual_axis(const Axis& a) {
  const double dq = 2.0 * std::numbers::pi / (a.n * a.dx);
  return Axis{a.n, dq, 0.0};
}

ComplexField::ComplexField(const Axis& a, std::vector<Complex> v)
    : axis(a), values(std::move(v)) {
  if (static_cast<int>(values.size()) != axis.n)
    throw ValidationError("field length does not match its axis");
}

double power(const ComplexField& f) {
  double acc = 0.0;
  for (const Complex& v : f.values) acc += std::norm(v);
  return acc * f.axis.dx;
}

std::vector<double> intensity(const ComplexField& f) {
  std::vector<double> out(f.values.size());
  for (size_t i = 0; i < f.values.size(); ++i) out[i] = std::norm(f.values[i]);
  return out;
}

void require_same_axis(const Axis& a, const Axis& b, const char* what) {
  if (!(a == b)) throw ValidationError(std::string("axis mismatch in ") + what);
}

}  // namespace ghostsim
