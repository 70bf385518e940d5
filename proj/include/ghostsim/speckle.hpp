#pragma once

#include <limits>
#include <vector>

#include "ghostsim/axis.hpp"
#include "ghostsim/rng.hpp"

namespace ghostsim {

enum class SpectrumKind { gaussian, flat_top };

/// Power spectrum W(q) of the stochastic source plus its real intensity
/// envelope. Width parameters may be infinite to denote the delta-correlated
/// (broadband) limit; that limit is usable by the analytic/quadrature layer
/// but not by the sampler, whose grid cannot resolve a zero coherence length.
struct SpectrumModel {
  SpectrumKind kind = SpectrumKind::gaussian;
  double w0 = 1.0;       // spectral amplitude
  double sigma_q = 0.0;  // gaussian: W(q) = w0 exp(-(q/sigma_q)^2)
  double q_max = 0.0;    // flat_top: W(q) = w0 for |q| <= q_max
  double envelope_width = std::numeric_limits<double>::infinity();  // intensity 1/e half-width

  double value(double q) const;        // W(q)
  double correlation(double x) const;  // W_tilde(x) = (2pi)^-1 integral W(q) e^{iqx} dq
  bool broadband() const;
  double envelope_amplitude(double x) const;  // field factor, |.|^2 has 1/e half-width envelope_width

  void validate() const;

  static SpectrumModel gaussian_spectrum(double w0, double sigma_q,
                                         double envelope = std::numeric_limits<double>::infinity());
  static SpectrumModel flat_top_spectrum(double w0, double q_max,
                                         double envelope = std::numeric_limits<double>::infinity());
  /// Gaussian spectrum specified by its coherence length (1/e half-width of
  /// |W_tilde|), the more natural configuration knob.
  static SpectrumModel from_coherence_length(double w0, double coherence_length,
                                             double envelope = std::numeric_limits<double>::infinity());
  /// Delta-correlated limit, W_tilde(x) -> sqrt(2 pi) w0 delta(x).
  static SpectrumModel broadband_limit(double w0);
};

/// 1/e half-width of |W_tilde|. Closed form 2/sigma_q for the gaussian kind,
/// numeric root-find for flat_top, 0 in the broadband limit.
double coherence_length(const SpectrumModel& spec);

struct SpeckleFlags {
  bool degenerate_spectrum = false;  // zero-valued spectrum, field is all zero
  bool marginal_resolution = false;  // dx > coherence_length / 2
};

/// One realization of a circular complex Gaussian field with first-order
/// correlation W_tilde: white noise on the spatial-frequency grid, filtered by
/// sqrt(W(q) dq / 2pi), transformed to x space, then multiplied by the
/// envelope. Deterministic in `seed`. Throws if the grid cannot resolve the
/// coherence length (the 1/e full width 2 lc must span at least two samples,
/// i.e. dx <= lc).
ComplexField sample_speckle(const SpectrumModel& spec, const Axis& axis, SeedSpec seed,
                            SpeckleFlags* flags = nullptr);

/// Ensemble estimate of <E*(x) E(x')> with a per-entry standard error.
struct FirstOrderEstimate {
  Axis axis;
  std::vector<Complex> mean;    // row-major (x index, x' index)
  std::vector<double> stderr_;  // standard error of the complex mean
  long count = 0;

  const Complex& at(int i, int j) const { return mean[static_cast<size_t>(i) * static_cast<size_t>(axis.n) + static_cast<size_t>(j)]; }
  double se_at(int i, int j) const { return stderr_[static_cast<size_t>(i) * static_cast<size_t>(axis.n) + static_cast<size_t>(j)]; }
};

FirstOrderEstimate estimate_first_order(const std::vector<ComplexField>& ensemble);

}  // namespace ghostsim
