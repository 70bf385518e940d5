#include "ghostsim/speckle.hpp"

#include <cmath>
#include <numbers>

#include "ghostsim/errors.hpp"
#include "ghostsim/fft.hpp"

namespace ghostsim {

namespace {

double sinc(double u) {
  if (std::abs(u) < 1e-8) return 1.0 - u * u / 6.0;
  return std::sin(u) / u;
}

}  // namespace

double SpectrumModel::value(double q) const {
  if (broadband()) return w0;
  if (kind == SpectrumKind::gaussian) {
    const double u = q / sigma_q;
    return w0 * std::exp(-u * u);
  }
  return std::abs(q) <= q_max ? w0 : 0.0;
}

double SpectrumModel::correlation(double x) const {
  if (broadband())
    throw ValidationError("W_tilde is a delta distribution in the broadband limit");
  if (kind == SpectrumKind::gaussian) {
    // (2pi)^-1 integral w0 exp(-q^2/sigma^2) e^{iqx} dq
    const double u = 0.5 * sigma_q * x;
    return w0 * sigma_q / (2.0 * std::sqrt(std::numbers::pi)) * std::exp(-u * u);
  }
  return w0 * q_max / std::numbers::pi * sinc(q_max * x);
}

bool SpectrumModel::broadband() const {
  const double width = kind == SpectrumKind::gaussian ? sigma_q : q_max;
  return std::isinf(width);
}

double SpectrumModel::envelope_amplitude(double x) const {
  if (std::isinf(envelope_width)) return 1.0;
  const double u = x / envelope_width;
  return std::exp(-0.5 * u * u);
}

void SpectrumModel::validate() const {
  if (!(w0 >= 0.0) || !std::isfinite(w0)) throw ValidationError("spectral amplitude w0 must be finite and >= 0");
  const double width = kind == SpectrumKind::gaussian ? sigma_q : q_max;
  if (!(width > 0.0)) throw ValidationError("spectral width must be positive");
  if (!(envelope_width > 0.0)) throw ValidationError("envelope width must be positive");
}

SpectrumModel SpectrumModel::gaussian_spectrum(double w0, double sigma_q, double envelope) {
  SpectrumModel s;
  s.kind = SpectrumKind::gaussian;
  s.w0 = w0;
  s.sigma_q = sigma_q;
  s.envelope_width = envelope;
  s.validate();
  return s;
}

SpectrumModel SpectrumModel::flat_top_spectrum(double w0, double q_max, double envelope) {
  SpectrumModel s;
  s.kind = SpectrumKind::flat_top;
  s.w0 = w0;
  s.q_max = q_max;
  s.envelope_width = envelope;
  s.validate();
  return s;
}

SpectrumModel SpectrumModel::from_coherence_length(double w0, double lc, double envelope) {
  if (!(lc > 0.0)) throw ValidationError("coherence length must be positive");
  return gaussian_spectrum(w0, 2.0 / lc, envelope);
}

SpectrumModel SpectrumModel::broadband_limit(double w0) {
  SpectrumModel s;
  s.kind = SpectrumKind::gaussian;
  s.w0 = w0;
  s.sigma_q = std::numeric_limits<double>::infinity();
  return s;
}

double coherence_length(const SpectrumModel& spec) {
  spec.validate();
  if (spec.broadband()) return 0.0;
  if (spec.kind == SpectrumKind::gaussian) return 2.0 / spec.sigma_q;
  // |sinc(q_max x)| first drops to 1/e inside (0, pi); bisect.
  const double target = 1.0 / std::numbers::e;
  double lo = 1e-12, hi = std::numbers::pi;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (sinc(mid) > target ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi) / spec.q_max;
}

ComplexField sample_speckle(const SpectrumModel& spec, const Axis& axis, SeedSpec seed,
                            SpeckleFlags* flags) {
  spec.validate();
  if (axis.n < 2) throw ValidationError("speckle axis needs at least 2 samples");
  const double lc = coherence_length(spec);
  if (axis.dx > lc)
    throw ValidationError("grid pitch " + std::to_string(axis.dx) +
                          " m cannot resolve coherence length " + std::to_string(lc) + " m");
  if (flags) *flags = SpeckleFlags{};
  if (flags && axis.dx > 0.5 * lc) flags->marginal_resolution = true;

  RealizationRng rng(seed);
  const int n = axis.n;
  const double dq = 2.0 * std::numbers::pi / (n * axis.dx);
  const double scale = dq / (2.0 * std::numbers::pi);

  std::vector<Complex> v(static_cast<size_t>(n));
  bool all_zero = true;
  for (int m = 0; m < n; ++m) {
    const double q = fft_bin_frequency(axis, m);
    const double amp2 = spec.value(q) * scale;
    const Complex g = rng.circular_gaussian();  // always consume the stream
    if (amp2 > 0.0) {
      v[static_cast<size_t>(m)] = std::sqrt(amp2) * g;
      all_zero = false;
    }
  }
  if (all_zero) {
    if (flags) flags->degenerate_spectrum = true;
    return ComplexField(axis);
  }

  fft_inplace(v, +1);

  if (!std::isinf(spec.envelope_width)) {
    for (int j = 0; j < n; ++j)
      v[static_cast<size_t>(j)] *= spec.envelope_amplitude(axis.coord(j));
  }
  return ComplexField(axis, std::move(v));
}

FirstOrderEstimate estimate_first_order(const std::vector<ComplexField>& ensemble) {
  if (ensemble.size() < 2)
    throw ValidationError("first-order estimate needs at least 2 realizations");
  const Axis axis = ensemble.front().axis;
  if (axis.n > 1024) throw ValidationError("first-order estimate limited to n <= 1024");
  for (const auto& f : ensemble) require_same_axis(axis, f.axis, "estimate_first_order");

  const size_t n = static_cast<size_t>(axis.n);
  const long count = static_cast<long>(ensemble.size());

  // Welford update per entry keeps the variance stable when realizations are
  // (nearly) identical.
  std::vector<Complex> mean(n * n, Complex{0.0, 0.0});
  std::vector<double> m2(n * n, 0.0);
  long k = 0;
  for (const auto& f : ensemble) {
    ++k;
    const double inv_k = 1.0 / static_cast<double>(k);
    for (size_t i = 0; i < n; ++i) {
      const Complex ci = std::conj(f.values[i]);
      for (size_t j = 0; j < n; ++j) {
        const Complex z = ci * f.values[j];
        const size_t cell = i * n + j;
        const Complex d_old = z - mean[cell];
        mean[cell] += d_old * inv_k;
        m2[cell] += (d_old * std::conj(z - mean[cell])).real();
      }
    }
  }

  FirstOrderEstimate est;
  est.axis = axis;
  est.count = count;
  est.mean = std::move(mean);
  est.stderr_.resize(n * n);
  const double denom = static_cast<double>(count) * static_cast<double>(count - 1);
  for (size_t cell = 0; cell < n * n; ++cell)
    est.stderr_[cell] = std::sqrt(std::max(0.0, m2[cell]) / denom);
  return est;
}

}  // namespace ghostsim
