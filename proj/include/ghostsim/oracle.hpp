#pragma once

#include <memory>
#include <utility>
#include <vector>

#include "ghostsim/elements.hpp"
#include "ghostsim/fringe.hpp"
#include "ghostsim/quadrature.hpp"
#include "ghostsim/speckle.hpp"

namespace ghostsim {

/// Fourier transform of the transmission profile under the convention
/// T~(q) = (2pi)^(-1/2) integral T(x) e^{-iqx} dx with sinc(u) = sin(u)/u.
/// Closed form (sum of rectangle transforms) for the binary kinds, discrete
/// sum for custom profiles.
Complex aperture_spectrum(const ApertureSpec& spec, double q);

/// Open intervals shared by two binary apertures (the product mask T1 T2).
std::vector<std::pair<double, double>> overlap_intervals(const ApertureSpec& a,
                                                         const ApertureSpec& b);

Complex intervals_spectrum(const std::vector<std::pair<double, double>>& intervals, double q);

/// Symmetric two-arm geometry in the delta-correlated limit: equal
/// source-to-mask and mask-to-detector distances in both arms.
struct ClosedFormCase {
  ApertureSpec test_aperture;
  ApertureSpec ref_aperture;
  double z = 0.0;  // mask to detector
  double k = 0.0;  // 2 pi / wavelength
  double w0 = 1.0;

  void validate() const;
};

/// Normalized correlation 1 + |P~(k (x1-x2)/z)|^2 / (T1~(0) T2~(0)), with P
/// the product mask. For the nested slit pairs used here P~ reduces to the
/// reference-aperture spectrum.
double closed_form_g2(const ClosedFormCase& c, double x1, double x2);

/// Unnormalized <I1 I2> including the k^2 w0^2 / (2 pi z^2) prefactor.
double closed_form_intensity_correlation(const ClosedFormCase& c, double x1, double x2);

/// Expected fringe period of the g2 delta curve: lambda z over the separation
/// of the outermost product-mask interval centers (falls back to the test
/// aperture separation when the product has a single interval).
double fringe_period_hint(const ClosedFormCase& c);

std::vector<double> closed_form_delta_curve(const ClosedFormCase& c,
                                            const std::vector<double>& delta);

/// Fringe metrics extracted from a densely sampled closed-form delta curve
/// (128 samples per hinted period over +-3 periods).
FringeMetrics predicted_visibility(const ClosedFormCase& c);

struct QuadratureOptions {
  double rel_tol = 1e-6;
  int panels_per_period = 8;
  double envelope_cut_sigmas = 5.0;
  double inner_range_sigmas = 6.0;
  double max_range_factor = 4096.0;
  /// Certified relative truncation of the slowly decaying edge-diffraction
  /// tails on unbounded source integrals. The bound assumes no cancellation,
  /// so the true truncation error is usually far smaller; tightening it makes
  /// the integration range (and cost) grow linearly.
  double tail_rel = 2e-4;
};

namespace oracledetail {

struct CanonicalArm {
  bool has_mask = false;
  double z_total = 0.0;                 // maskless
  double z0 = 0.0, z = 0.0;             // masked: source->mask, mask->detector
  std::vector<std::pair<double, double>> intervals;
  double alpha = 0.0;                   // k (1/z0 + 1/z) / 2
  double u_abs_max = 0.0;
  double open_area = 0.0;
  int edge_count = 0;
};

/// M(gamma) = integral T(u) exp(i alpha u^2) exp(-i gamma u) du over the open
/// intervals. eval() uses the Fresnel-integral closed form; quadrature() is
/// the slow independent route kept for cross-checks.
class MaskChirpTransform {
 public:
  MaskChirpTransform(std::vector<std::pair<double, double>> intervals, double alpha);
  Complex eval(double gamma) const;
  Complex quadrature(double gamma) const;

 private:
  std::vector<std::pair<double, double>> intervals_;
  double alpha_;
};

}  // namespace oracledetail

/// Numeric evaluation of the two-arm field cross-correlation
///   <E1*(x1) E2(x2)> = (2 pi)^-1 double-integral over (x0', x0) of
///   h1*(x1,x0') h2(x2,x0) env(x0') env(x0) W~(x0' - x0),
/// with oscillation-aware adaptive panels and closed-form chirped-aperture
/// transforms. The broadband limit collapses the inner integral to a single
/// source-plane integral; a stationary source (unbounded envelope) with a
/// finite spectrum is evaluated in the spatial-frequency domain instead,
/// where the double integral factorizes. The remaining general case nests
/// the two quadratures and is the slowest path. Not thread-safe (caches
/// mean intensities).
class CrossCorrelationEvaluator {
 public:
  CrossCorrelationEvaluator(const PathSpec& path1, const PathSpec& path2,
                            const SpectrumModel& spectrum, double wavelength,
                            QuadratureOptions opts = {});
  ~CrossCorrelationEvaluator();

  QuadResult correlation(double x1, double x2);
  QuadResult mean_intensity(int arm, double x);  // arm 1 or 2
  /// 1 + |corr|^2 / (<I1><I2>); mean intensities are cached per coordinate.
  double g2(double x1, double x2);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

QuadResult quadrature_cross_correlation(const PathSpec& path1, const PathSpec& path2,
                                        const SpectrumModel& spectrum, double wavelength,
                                        double x1, double x2,
                                        const QuadratureOptions& opts = {});

}  // namespace ghostsim
