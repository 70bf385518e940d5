#include "ghostsim/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

#include "ghostsim/errors.hpp"
#include "ghostsim/fresnel.hpp"

namespace ghostsim {

namespace {

constexpr double kSqrt2Pi = 2.50662827463100050242;

double sinc(double u) {
  if (std::abs(u) < 1e-8) return 1.0 - u * u / 6.0;
  return std::sin(u) / u;
}

}  // namespace

Complex intervals_spectrum(const std::vector<std::pair<double, double>>& intervals, double q) {
  Complex acc{0.0, 0.0};
  for (const auto& [lo, hi] : intervals) {
    const double w = hi - lo;
    const double c = 0.5 * (lo + hi);
    acc += (w / kSqrt2Pi) * sinc(0.5 * q * w) * std::polar(1.0, -q * c);
  }
  return acc;
}

Complex aperture_spectrum(const ApertureSpec& spec, double q) {
  if (spec.kind == ApertureKind::custom) {
    Complex acc{0.0, 0.0};
    for (int i = 0; i < spec.custom_axis.n; ++i)
      acc += spec.custom_profile[static_cast<size_t>(i)] *
             std::polar(1.0, -q * spec.custom_axis.coord(i));
    return acc * (spec.custom_axis.dx / kSqrt2Pi);
  }
  return intervals_spectrum(spec.open_intervals(), q);
}

std::vector<std::pair<double, double>> overlap_intervals(const ApertureSpec& a,
                                                         const ApertureSpec& b) {
  std::vector<std::pair<double, double>> out;
  for (const auto& [a_lo, a_hi] : a.open_intervals()) {
    for (const auto& [b_lo, b_hi] : b.open_intervals()) {
      const double lo = std::max(a_lo, b_lo);
      const double hi = std::min(a_hi, b_hi);
      if (hi > lo) out.emplace_back(lo, hi);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

void ClosedFormCase::validate() const {
  if (test_aperture.kind == ApertureKind::custom || ref_aperture.kind == ApertureKind::custom)
    throw ValidationError("closed forms cover the binary aperture kinds only");
  test_aperture.validate();
  ref_aperture.validate();
  if (!(z > 0.0) || !(k > 0.0)) throw ValidationError("closed-form case needs z > 0 and k > 0");
}

double closed_form_g2(const ClosedFormCase& c, double x1, double x2) {
  c.validate();
  const double q = c.k * (x1 - x2) / c.z;
  const auto product = overlap_intervals(c.test_aperture, c.ref_aperture);
  const double t1 = intervals_spectrum(c.test_aperture.open_intervals(), 0.0).real();
  const double t2 = intervals_spectrum(c.ref_aperture.open_intervals(), 0.0).real();
  return 1.0 + std::norm(intervals_spectrum(product, q)) / (t1 * t2);
}

double closed_form_intensity_correlation(const ClosedFormCase& c, double x1, double x2) {
  c.validate();
  const double q = c.k * (x1 - x2) / c.z;
  const auto product = overlap_intervals(c.test_aperture, c.ref_aperture);
  const double t1 = intervals_spectrum(c.test_aperture.open_intervals(), 0.0).real();
  const double t2 = intervals_spectrum(c.ref_aperture.open_intervals(), 0.0).real();
  const double pref = c.k * c.k * c.w0 * c.w0 / (2.0 * std::numbers::pi * c.z * c.z);
  return pref * (t1 * t2 + std::norm(intervals_spectrum(product, q)));
}

double fringe_period_hint(const ClosedFormCase& c) {
  c.validate();
  const auto product = overlap_intervals(c.test_aperture, c.ref_aperture);
  double separation = 0.0;
  if (product.size() >= 2) {
    const double c_lo = 0.5 * (product.front().first + product.front().second);
    const double c_hi = 0.5 * (product.back().first + product.back().second);
    separation = c_hi - c_lo;
  } else {
    separation = c.test_aperture.slit_separation;
  }
  return 2.0 * std::numbers::pi * c.z / (c.k * separation);
}

std::vector<double> closed_form_delta_curve(const ClosedFormCase& c,
                                            const std::vector<double>& delta) {
  std::vector<double> out(delta.size());
  for (size_t i = 0; i < delta.size(); ++i) out[i] = closed_form_g2(c, delta[i], 0.0);
  return out;
}

FringeMetrics predicted_visibility(const ClosedFormCase& c) {
  const double hint = fringe_period_hint(c);
  const int per_period = 128;
  const int half = 3 * per_period;
  std::vector<double> delta(static_cast<size_t>(2 * half + 1));
  for (int i = -half; i <= half; ++i)
    delta[static_cast<size_t>(i + half)] = hint * i / per_period;
  const std::vector<double> curve = closed_form_delta_curve(c, delta);
  return extract_fringe_metrics(delta, curve, hint);
}

// ---------------------------------------------------------------------------
// Quadrature route
// ---------------------------------------------------------------------------
// ---------------------------------------------------------------------------

namespace oracledetail {

MaskChirpTransform::MaskChirpTransform(std::vector<std::pair<double, double>> intervals,
                                       double alpha)
    : intervals_(std::move(intervals)), alpha_(alpha) {}

Complex MaskChirpTransform::eval(double gamma) const {
  Complex acc{0.0, 0.0};
  for (const auto& [lo, hi] : intervals_)
    acc += chirped_interval_transform(lo, hi, alpha_, gamma);
  return acc;
}

Complex MaskChirpTransform::quadrature(double gamma) const {
  QuadResult acc;
  for (const auto& [lo, hi] : intervals_) {
    const double width = hi - lo;
    auto f = [&](double u) { return std::polar(1.0, alpha_ * u * u - gamma * u); };
    auto rate = [&](double u) { return std::abs(2.0 * alpha_ * u - gamma); };
    acc += integrate_oscillatory(f, lo, hi, rate, 1e-12 * width, 4);
  }
  return acc.value;
}

}  // namespace oracledetail

using oracledetail::CanonicalArm;
using oracledetail::MaskChirpTransform;

namespace {

CanonicalArm canonicalize(const PathSpec& path, double k) {
  path.validate();
  CanonicalArm arm;
  std::vector<PathElement> merged;
  for (const auto& e : path.elements) {
    if (e.kind == PathElement::Kind::free_space && !merged.empty() &&
        merged.back().kind == PathElement::Kind::free_space)
      merged.back().distance += e.distance;
    else
      merged.push_back(e);
  }
  if (merged.size() == 1 && merged[0].kind == PathElement::Kind::free_space) {
    arm.z_total = merged[0].distance;
    return arm;
  }
  if (merged.size() == 3 && merged[0].kind == PathElement::Kind::free_space &&
      merged[1].kind == PathElement::Kind::mask &&
      merged[2].kind == PathElement::Kind::free_space) {
    const ApertureSpec& ap = merged[1].aperture;
    if (ap.kind == ApertureKind::custom)
      throw ValidationError("quadrature route supports the binary aperture kinds only");
    arm.has_mask = true;
    arm.z0 = merged[0].distance;
    arm.z = merged[2].distance;
    arm.intervals = ap.open_intervals();
    arm.alpha = 0.5 * k * (1.0 / arm.z0 + 1.0 / arm.z);
    arm.open_area = ap.open_area();
    arm.edge_count = 2 * static_cast<int>(arm.intervals.size());
    for (const auto& [lo, hi] : arm.intervals)
      arm.u_abs_max = std::max({arm.u_abs_max, std::abs(lo), std::abs(hi)});
    return arm;
  }
  throw ValidationError(
      "quadrature route supports free paths and free-mask-free paths only");
}

}  // namespace

struct CrossCorrelationEvaluator::Impl {
  CanonicalArm arm1, arm2;
  std::unique_ptr<MaskChirpTransform> mask1, mask2;
  SpectrumModel spec;
  double k = 0.0;
  double lc = 0.0;
  QuadratureOptions opts;
  std::map<std::pair<int, double>, double> intensity_cache;

  // h_j(x, x0) with every phase written out; masks through the closed-form
  // chirped transform.
  Complex arm_response(const CanonicalArm& arm, const MaskChirpTransform* mask, double x,
                       double x0) const {
    if (!arm.has_mask) {
      const double u = x - x0;
      const double amp = std::sqrt(k / (2.0 * std::numbers::pi * arm.z_total));
      const double ph = k * arm.z_total - 0.25 * std::numbers::pi +
                        0.5 * k * u * u / arm.z_total;
      return std::polar(amp, ph);
    }
    const double amp = k / (2.0 * std::numbers::pi * std::sqrt(arm.z0 * arm.z));
    const double ph = k * (arm.z0 + arm.z) - 0.5 * std::numbers::pi +
                      0.5 * k * (x * x / arm.z + x0 * x0 / arm.z0);
    const double gamma = k * (x / arm.z + x0 / arm.z0);
    return std::polar(amp, ph) * mask->eval(gamma);
  }

  // Plane-wave response a_j(x, q) for the spatial-frequency route.
  Complex arm_response_q(const CanonicalArm& arm, const MaskChirpTransform* mask, double x,
                         double q) const {
    if (!arm.has_mask) {
      const double ph = k * arm.z_total - 0.5 * q * q * arm.z_total / k + q * x;
      return std::polar(1.0, ph);
    }
    const double amp = std::sqrt(k / (2.0 * std::numbers::pi * arm.z));
    const double ph = k * (arm.z0 + arm.z) - 0.25 * std::numbers::pi +
                      0.5 * k * x * x / arm.z - 0.5 * q * q * arm.z0 / k;
    return std::polar(amp, ph) * mask->eval(k * x / arm.z - q);
  }

  double arm_rate(const CanonicalArm& arm, double x, double x0) const {
    if (!arm.has_mask) return k * std::abs(x - x0) / arm.z_total;
    return k * (std::abs(x0) + arm.u_abs_max) / arm.z0;
  }

  double amp_scale(const CanonicalArm& arm) const {
    if (!arm.has_mask) return std::sqrt(k / (2.0 * std::numbers::pi * arm.z_total));
    return k * arm.open_area / (2.0 * std::numbers::pi * std::sqrt(arm.z0 * arm.z));
  }

  // Phase bookkeeping of h(x, x0) as exp(i k c x0^2 / 2) exp(i lin x0) times a
  // factor oscillating no faster than u_rate. The x0^2 chirps of the two arms
  // cancel in conj(h1) h2 when the source-side distances match, which is what
  // makes these integrals tractable; the panel sizing must see that
  // cancellation or it will subdivide millions of times.
  struct ArmPhase {
    double c = 0.0;       // x0^2 coefficient as c * k / 2
    double lin = 0.0;     // linear x0 phase
    double u_rate = 0.0;  // residual oscillation bound
  };

  ArmPhase phase_of(const CanonicalArm& arm, double x) const {
    if (!arm.has_mask) return {1.0 / arm.z_total, -k * x / arm.z_total, 0.0};
    return {1.0 / arm.z0, 0.0, arm.u_abs_max * k / arm.z0};
  }

  double outer_range(const CanonicalArm& a1, const CanonicalArm& a2, double x1,
                     double x2) const {
    if (!std::isinf(spec.envelope_width))
      return opts.envelope_cut_sigmas * spec.envelope_width * std::numbers::sqrt2;
    auto arm_reach = [&](const CanonicalArm& arm, double x) {
      if (arm.has_mask) {
        double feature = std::numeric_limits<double>::infinity();
        for (const auto& [lo, hi] : arm.intervals) feature = std::min(feature, hi - lo);
        // gamma span covering ~12 diffraction lobes of the narrowest slit
        return arm.z0 / k * (12.0 * 2.0 * std::numbers::pi / feature) + std::abs(x);
      }
      const double qw = spec.kind == SpectrumKind::gaussian ? 4.0 * spec.sigma_q : spec.q_max;
      return std::isinf(qw) ? 0.0 : arm.z_total / k * qw + std::abs(x);
    };
    const double r = std::max(arm_reach(a1, x1), arm_reach(a2, x2));
    if (r <= 0.0)
      throw ValidationError(
          "cross-correlation quadrature needs an envelope, a mask, or a finite spectrum");
    return r;
  }

  double inner_range() const {
    if (spec.broadband()) return 0.0;
    if (spec.kind == SpectrumKind::gaussian) return opts.inner_range_sigmas * lc;
    return std::max(opts.inner_range_sigmas * lc, 300.0 / spec.q_max);
  }

  /// Bound on |integral beyond r| of conj(h1) h2. Past the stationary band
  /// every aperture edge contributes ~ z0 / (k x0); pairs of edges at
  /// different positions beat against each other and integrate away, but
  /// pairs at the same position (shared edges, including every edge against
  /// itself in an intensity integral) decay like a bare 1/x0^2, and that is
  /// what survives at large range.
  TailBound edge_tail_bound(const CanonicalArm& a1, const CanonicalArm& a2,
                            double prefactor) const {
    if (!a1.has_mask || !a2.has_mask) return {};
    double shared_pairs = 0.0;
    for (const auto& [lo1, hi1] : a1.intervals)
      for (const auto& [lo2, hi2] : a2.intervals)
        for (double e1 : {lo1, hi1})
          for (double e2 : {lo2, hi2})
            if (std::abs(e1 - e2) < 1e-12) shared_pairs += 1.0;
    const double pairs = std::max(shared_pairs, 1.0);
    const double coef = 8.0 * prefactor * pairs * (a1.z0 / k) * (a2.z0 / k);
    return [coef](double r) { return coef / r; };
  }

  /// Two-pass driver: a cheap bulk-only coarse pass pins the tolerance scale;
  /// the fine pass delivers the value, expanding over an unbounded source
  /// until the certified tail bound is below tail_rel of that scale.
  QuadResult two_pass(const Integrand& f, const PhaseRate& rate, double r_outer,
                      double scale_floor, const TailBound& tail) const {
    const QuadResult coarse = integrate_oscillatory(
        f, -r_outer, r_outer, rate, std::numeric_limits<double>::max(), 2);
    const double scale =
        std::max({std::abs(coarse.value), 1e-3 * coarse.abs_scale, scale_floor});
    const double tol = opts.rel_tol * scale;
    QuadResult fine;
    if (!std::isinf(spec.envelope_width)) {
      fine = integrate_oscillatory(f, -r_outer, r_outer, rate, tol, opts.panels_per_period);
    } else {
      const double stop_tol = std::max(tol, opts.tail_rel * scale);
      fine = integrate_expanding(f, r_outer, rate, tol, opts.panels_per_period,
                                 opts.max_range_factor, tail, stop_tol);
    }
    fine.evals += coarse.evals;
    return fine;
  }

  QuadResult correlate_broadband(CanonicalArm& a1, MaskChirpTransform* m1, CanonicalArm& a2,
                                 MaskChirpTransform* m2, double x1, double x2) const {
    const double pref = spec.w0 / kSqrt2Pi;
    auto f = [&](double x0) -> Complex {
      const double env0 = spec.envelope_amplitude(x0);
      if (env0 == 0.0) return {0.0, 0.0};
      return pref * env0 * env0 * std::conj(arm_response(a1, m1, x1, x0)) *
             arm_response(a2, m2, x2, x0);
    };
    const ArmPhase p1 = phase_of(a1, x1);
    const ArmPhase p2 = phase_of(a2, x2);
    const double net_quad = k * (p2.c - p1.c);
    const double net_lin = p2.lin - p1.lin;
    const double residual = p1.u_rate + p2.u_rate;
    auto rate = [=](double x0) { return std::abs(net_quad * x0 + net_lin) + residual; };

    const double r_outer = outer_range(a1, a2, x1, x2);
    const double scale_floor =
        1e-6 * pref * amp_scale(a1) * amp_scale(a2) * std::min(r_outer, 1e-2);
    const TailBound tail = edge_tail_bound(a1, a2, pref * amp_scale(a1) * amp_scale(a2) /
                                                       (a1.open_area * a2.open_area));
    return two_pass(f, rate, r_outer, scale_floor, tail);
  }

  QuadResult correlate_stationary(CanonicalArm& a1, MaskChirpTransform* m1, CanonicalArm& a2,
                                  MaskChirpTransform* m2, double x1, double x2) const {
    // (2 pi)^-2 integral W(q) conj(a1(x1,q)) a2(x2,q) dq over the spectrum
    const double inv_4pi2 = 1.0 / (4.0 * std::numbers::pi * std::numbers::pi);
    auto f = [&](double q) -> Complex {
      const double w = spec.value(q);
      if (w == 0.0) return {0.0, 0.0};
      return inv_4pi2 * w * std::conj(arm_response_q(a1, m1, x1, q)) *
             arm_response_q(a2, m2, x2, q);
    };
    const double c1 = (a1.has_mask ? a1.z0 : a1.z_total) / k;
    const double c2 = (a2.has_mask ? a2.z0 : a2.z_total) / k;
    const double residual = a1.u_abs_max + a2.u_abs_max + std::abs(x1) + std::abs(x2);
    auto rate = [=](double q) { return std::abs(q) * std::abs(c1 - c2) + residual; };

    const double q_lim = spec.kind == SpectrumKind::gaussian
                             ? 5.3 * spec.sigma_q
                             : spec.q_max;
    const double scale_floor = 1e-6 * inv_4pi2 * spec.w0 *
                               (a1.has_mask ? amp_scale(a1) : 1.0) *
                               (a2.has_mask ? amp_scale(a2) : 1.0) * 2.0 * q_lim;
    QuadResult coarse =
        integrate_oscillatory(f, -q_lim, q_lim, rate, std::max(1e-3 * scale_floor, 1e-300), 2);
    const double scale =
        std::max({std::abs(coarse.value), 1e-3 * coarse.abs_scale, scale_floor});
    QuadResult fine = integrate_oscillatory(f, -q_lim, q_lim, rate, opts.rel_tol * scale,
                                            opts.panels_per_period);
    fine.evals += coarse.evals;
    return fine;
  }

  QuadResult correlate_nested(CanonicalArm& a1, MaskChirpTransform* m1, CanonicalArm& a2,
                              MaskChirpTransform* m2, double x1, double x2) const {
    const double s_max = inner_range();
    const double inner_pseudo_rate =
        spec.kind == SpectrumKind::flat_top ? spec.q_max : 4.0 / lc;
    const double inner_scale = spec.correlation(0.0) * lc * amp_scale(a1);

    auto f = [&](double x0) -> Complex {
      const double env0 = spec.envelope_amplitude(x0);
      if (env0 == 0.0) return {0.0, 0.0};
      auto inner = [&](double s) -> Complex {
        return spec.correlation(s) * spec.envelope_amplitude(x0 + s) *
               std::conj(arm_response(a1, m1, x1, x0 + s));
      };
      auto inner_rate = [&](double s) {
        return arm_rate(a1, x1, x0 + s) + inner_pseudo_rate;
      };
      const QuadResult in =
          integrate_oscillatory(inner, -s_max, s_max, inner_rate,
                                opts.rel_tol * inner_scale, opts.panels_per_period);
      return (1.0 / (2.0 * std::numbers::pi)) * env0 * in.value *
             arm_response(a2, m2, x2, x0);
    };
    const ArmPhase p1 = phase_of(a1, x1);
    const ArmPhase p2 = phase_of(a2, x2);
    const double net_quad = k * (p2.c - p1.c);
    const double net_lin = p2.lin - p1.lin;
    const double residual = p1.u_rate + p2.u_rate + k * p1.c * s_max;
    auto rate = [=](double x0) { return std::abs(net_quad * x0 + net_lin) + residual; };

    const double r_outer = outer_range(a1, a2, x1, x2);
    const double pref = spec.correlation(0.0) * lc / (2.0 * std::numbers::pi);
    const double scale_floor =
        1e-6 * pref * amp_scale(a1) * amp_scale(a2) * std::min(r_outer, 1e-2);
    const TailBound tail = edge_tail_bound(a1, a2, pref * amp_scale(a1) * amp_scale(a2) /
                                                       (a1.open_area * a2.open_area));
    return two_pass(f, rate, r_outer, scale_floor, tail);
  }

  QuadResult correlate(CanonicalArm& a1, MaskChirpTransform* m1, CanonicalArm& a2,
                       MaskChirpTransform* m2, double x1, double x2) const {
    if (spec.broadband()) return correlate_broadband(a1, m1, a2, m2, x1, x2);
    if (std::isinf(spec.envelope_width))
      return correlate_stationary(a1, m1, a2, m2, x1, x2);
    return correlate_nested(a1, m1, a2, m2, x1, x2);
  }
};

CrossCorrelationEvaluator::CrossCorrelationEvaluator(const PathSpec& path1,
                                                     const PathSpec& path2,
                                                     const SpectrumModel& spectrum,
                                                     double wavelength, QuadratureOptions opts)
    : impl_(std::make_unique<Impl>()) {
  spectrum.validate();
  if (!(wavelength > 0.0)) throw ValidationError("wavelength must be positive");
  impl_->k = 2.0 * std::numbers::pi / wavelength;
  impl_->arm1 = canonicalize(path1, impl_->k);
  impl_->arm2 = canonicalize(path2, impl_->k);
  impl_->spec = spectrum;
  impl_->lc = coherence_length(spectrum);
  impl_->opts = opts;
  if (impl_->arm1.has_mask)
    impl_->mask1 = std::make_unique<MaskChirpTransform>(impl_->arm1.intervals, impl_->arm1.alpha);
  if (impl_->arm2.has_mask)
    impl_->mask2 = std::make_unique<MaskChirpTransform>(impl_->arm2.intervals, impl_->arm2.alpha);
  if (spectrum.broadband() && std::isinf(spectrum.envelope_width) &&
      !impl_->arm1.has_mask && !impl_->arm2.has_mask)
    throw ValidationError(
        "broadband limit with two bare arms and no envelope is a delta distribution; "
        "use a finite spectrum or envelope");
}

CrossCorrelationEvaluator::~CrossCorrelationEvaluator() = default;

QuadResult CrossCorrelationEvaluator::correlation(double x1, double x2) {
  return impl_->correlate(impl_->arm1, impl_->mask1.get(), impl_->arm2, impl_->mask2.get(),
                          x1, x2);
}

QuadResult CrossCorrelationEvaluator::mean_intensity(int arm, double x) {
  if (arm != 1 && arm != 2) throw ValidationError("arm index must be 1 or 2");
  if (arm == 1)
    return impl_->correlate(impl_->arm1, impl_->mask1.get(), impl_->arm1, impl_->mask1.get(),
                            x, x);
  return impl_->correlate(impl_->arm2, impl_->mask2.get(), impl_->arm2, impl_->mask2.get(),
                          x, x);
}

double CrossCorrelationEvaluator::g2(double x1, double x2) {
  auto cached_intensity = [&](int arm, double x) {
    const auto key = std::make_pair(arm, x);
    auto it = impl_->intensity_cache.find(key);
    if (it != impl_->intensity_cache.end()) return it->second;
    const double v = mean_intensity(arm, x).value.real();
    impl_->intensity_cache.emplace(key, v);
    return v;
  };
  const double i1 = cached_intensity(1, x1);
  const double i2 = cached_intensity(2, x2);
  const QuadResult c = correlation(x1, x2);
  return 1.0 + std::norm(c.value) / (i1 * i2);
}

QuadResult quadrature_cross_correlation(const PathSpec& path1, const PathSpec& path2,
                                        const SpectrumModel& spectrum, double wavelength,
                                        double x1, double x2, const QuadratureOptions& opts) {
  CrossCorrelationEvaluator eval(path1, path2, spectrum, wavelength, opts);
  return eval.correlation(x1, x2);
}

}  // namespace ghostsim
