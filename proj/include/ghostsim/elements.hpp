#pragma once

#include <string>
#include <utility>
#include <vector>

#include "ghostsim/axis.hpp"

namespace ghostsim {

enum class ApertureKind { double_slit, single_slit, incomplete_double_slit, custom };

/// Real transmission mask T(x) in [0,1]. The binary kinds are built from slit
/// width b and center separation d; the incomplete kind keeps, of the slit at
/// -d/2, only the retained fraction adjacent to its inner edge, so the open
/// sub-slit is [-d/2 + b/2 - rf*b, -d/2 + b/2].
struct ApertureSpec {
  ApertureKind kind = ApertureKind::double_slit;
  double slit_width = 0.0;        // b
  double slit_separation = 0.0;   // d, center to center
  double retained_fraction = 1.0; // incomplete kind only
  Axis custom_axis;               // custom kind only
  std::vector<double> custom_profile;

  void validate() const;

  /// Open intervals [lo, hi] for the binary kinds (throws for custom).
  std::vector<std::pair<double, double>> open_intervals() const;
  double smallest_feature() const;
  double open_area() const;

  static ApertureSpec double_slit(double b, double d);
  static ApertureSpec single_slit(double b, double d);
  static ApertureSpec incomplete_double_slit(double b, double d, double retained_fraction);
  static ApertureSpec custom(const Axis& axis, std::vector<double> profile);
};

/// Transmission sampled on the axis. Cells cut by a slit edge get the exact
/// covered-area fraction, so power ratios through grid-misaligned masks stay
/// accurate. Requires the smallest open feature to span >= 4 samples and the
/// axis to cover the full mask support.
ComplexField mask_profile(const ApertureSpec& spec, const Axis& axis);

ComplexField apply_mask(const ComplexField& f, const ApertureSpec& spec);

/// Transfer-function sampling diagnostic for free propagation over z: the
/// quadratic spectral phase advances by `edge_phase_step` radians between
/// adjacent frequency samples at the grid edge. Components beyond `q_safe`
/// violate the Nyquist bound on that chirp and alias across the periodic
/// window. Statistically stationary speckle tolerates this (the periodic
/// ensemble is propagated exactly); deterministic beams should keep their
/// spectrum inside q_safe.
struct ChirpGuard {
  bool ok = true;
  double q_safe = 0.0;
  double edge_phase_step = 0.0;
  std::string message;
};

ChirpGuard fresnel_sampling_check(const Axis& axis, double z, double wavelength);

/// Fresnel free-space propagation over distance z (spectral transfer-function
/// form, exact for the periodic band-limited field). The overall exp(ikz)
/// phase is retained. strict = true turns the chirp guard into an error.
ComplexField propagate_fresnel(const ComplexField& f, double z, double wavelength,
                               bool strict = false);

/// Direct quadrature discretization of the free-space kernel
///   sqrt(k/(2 pi i z)) exp(ikz) exp(ik (x - x0)^2 / (2z)) dx,
/// row-major over (out sample, in sample). Slow reference path, n <= 512.
std::vector<Complex> propagate_kernel_matrix(const Axis& axis_in, const Axis& axis_out,
                                             double z, double wavelength);

std::vector<Complex> apply_kernel_matrix(const std::vector<Complex>& matrix,
                                         const Axis& axis_out, const ComplexField& f);

/// Lossless 50/50 split: two copies scaled by 1/sqrt(2).
std::pair<ComplexField, ComplexField> split_beam(const ComplexField& f);

struct PathElement {
  enum class Kind { free_space, mask };
  Kind kind = Kind::free_space;
  double distance = 0.0;  // free_space
  ApertureSpec aperture;  // mask

  static PathElement free_space(double z);
  static PathElement masked(const ApertureSpec& spec);
};

enum class ArmLabel { test, reference };

/// Ordered optical elements of one arm, applied source to detector.
struct PathSpec {
  std::vector<PathElement> elements;
  ArmLabel arm = ArmLabel::test;

  double total_distance() const;
  void validate() const;
};

ComplexField run_path(const ComplexField& source, const PathSpec& path, double wavelength,
                      bool strict = false);

}  // namespace ghostsim
