#include <doctest.h>

#include <cmath>
#include <numbers>

#include "ghostsim/errors.hpp"
#include "ghostsim/speckle.hpp"

using namespace ghostsim;

TEST_CASE("coherence length closed form and limits") {
  const SpectrumModel g = SpectrumModel::gaussian_spectrum(1.0, 4e5);
  CHECK(coherence_length(g) == doctest::Approx(5e-6).epsilon(1e-12));

  const SpectrumModel g2 = SpectrumModel::gaussian_spectrum(1.0, 8e5);
  CHECK(coherence_length(g2) == doctest::Approx(0.5 * coherence_length(g)).epsilon(1e-12));

  // flat top: |sinc| falls to 1/e inside its first lobe (zero at pi/q_max)
  const SpectrumModel ft = SpectrumModel::flat_top_spectrum(1.0, 1e5);
  const double lc = coherence_length(ft);
  CHECK(lc > 0.0);
  CHECK(lc < std::numbers::pi / 1e5);
  const double u = 1e5 * lc;
  CHECK(std::sin(u) / u == doctest::Approx(1.0 / std::numbers::e).epsilon(1e-6));

  CHECK(coherence_length(SpectrumModel::broadband_limit(1.0)) == 0.0);
}

TEST_CASE("sampling is deterministic in the seed") {
  const Axis a = make_axis(64, 1e-6, 0.0);
  const SpectrumModel spec = SpectrumModel::from_coherence_length(1.0, 5e-6);
  const ComplexField f1 = sample_speckle(spec, a, SeedSpec{123, 9});
  const ComplexField f2 = sample_speckle(spec, a, SeedSpec{123, 9});
  REQUIRE(f1.values.size() == f2.values.size());
  for (size_t i = 0; i < f1.values.size(); ++i) CHECK(f1.values[i] == f2.values[i]);

  const ComplexField g = sample_speckle(spec, a, SeedSpec{123, 10});
  double diff = 0.0;
  for (size_t i = 0; i < g.values.size(); ++i) diff += std::abs(g.values[i] - f1.values[i]);
  CHECK(diff > 0.0);
}

TEST_CASE("zero spectrum gives a flagged zero field") {
  const Axis a = make_axis(32, 1e-6, 0.0);
  SpectrumModel spec = SpectrumModel::from_coherence_length(0.0, 5e-6);
  SpeckleFlags flags;
  const ComplexField f = sample_speckle(spec, a, SeedSpec{1, 0}, &flags);
  CHECK(flags.degenerate_spectrum);
  CHECK(power(f) == 0.0);
}

TEST_CASE("under-resolved coherence length is rejected") {
  const Axis a = make_axis(32, 6e-6, 0.0);
  const SpectrumModel spec = SpectrumModel::from_coherence_length(1.0, 5e-6);
  CHECK_THROWS_AS(sample_speckle(spec, a, SeedSpec{1, 0}), ValidationError);

  // marginal but legal: dx between lc/2 and lc
  const Axis b = make_axis(32, 4e-6, 0.0);
  SpeckleFlags flags;
  sample_speckle(spec, b, SeedSpec{1, 0}, &flags);
  CHECK(flags.marginal_resolution);
}

TEST_CASE("ensemble first-order correlation matches the spectrum transform") {
  // oracle: quadrature Fourier transform of the closed-form spectrum
  const Axis a = make_axis(48, 2e-6, 0.0);
  const double lc = 8e-6;
  const SpectrumModel spec = SpectrumModel::from_coherence_length(2.0, lc);

  const int realizations = 10000;
  std::vector<ComplexField> ensemble;
  ensemble.reserve(realizations);
  for (int r = 0; r < realizations; ++r)
    ensemble.push_back(sample_speckle(spec, a, SeedSpec{777, static_cast<std::uint64_t>(r)}));

  const FirstOrderEstimate est = estimate_first_order(ensemble);

  // W_tilde by direct quadrature of W(q); the sampled ensemble realizes the
  // window-periodized correlation, so sum the neighboring images too.
  const double dq = 2.0 * std::numbers::pi / (a.n * a.dx);
  const double q_lim = 0.5 * a.n * dq;
  auto w_tilde_single = [&](double x) {
    const int steps = 4000;
    double acc = 0.0;
    const double h = 2.0 * q_lim / steps;
    for (int i = 0; i < steps; ++i) {
      const double q = -q_lim + (i + 0.5) * h;
      acc += spec.value(q) * std::cos(q * x);
    }
    return acc * h / (2.0 * std::numbers::pi);
  };
  auto w_tilde = [&](double x) {
    return w_tilde_single(x - a.extent()) + w_tilde_single(x) + w_tilde_single(x + a.extent());
  };

  int checked = 0;
  for (int i = 0; i < a.n; i += 7) {
    for (int j = 0; j < a.n; j += 7) {
      const double expect = w_tilde(a.coord(j) - a.coord(i));
      const double se = est.se_at(i, j);
      REQUIRE(se > 0.0);
      CHECK(std::abs(est.at(i, j) - expect) < 5.0 * se);
      ++checked;
    }
  }
  CHECK(checked > 20);

  // diagonal entries are real non-negative mean intensities
  for (int i = 0; i < a.n; i += 5) {
    CHECK(est.at(i, i).imag() == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(est.at(i, i).real() >= 0.0);
  }
}

TEST_CASE("identical deterministic fields give zero-variance estimate") {
  const Axis a = make_axis(8, 1e-6, 0.0);
  ComplexField f(a);
  for (int i = 0; i < a.n; ++i)
    f.values[static_cast<size_t>(i)] = Complex{1.0 + 0.1 * i, -0.2 * i};
  const FirstOrderEstimate est = estimate_first_order({f, f, f});
  for (int i = 0; i < a.n; ++i)
    for (int j = 0; j < a.n; ++j) {
      CHECK(std::abs(est.at(i, j) -
                     std::conj(f.values[static_cast<size_t>(i)]) *
                         f.values[static_cast<size_t>(j)]) < 1e-12);
      CHECK(est.se_at(i, j) == doctest::Approx(0.0).epsilon(1e-12));
    }
}

TEST_CASE("envelope-free statistics are translation invariant") {
  const Axis a = make_axis(32, 2e-6, 0.0);
  const SpectrumModel spec = SpectrumModel::from_coherence_length(1.0, 10e-6);
  std::vector<ComplexField> ensemble;
  for (int r = 0; r < 4000; ++r)
    ensemble.push_back(sample_speckle(spec, a, SeedSpec{31337, static_cast<std::uint64_t>(r)}));
  const FirstOrderEstimate est = estimate_first_order(ensemble);
  // same separation, different anti-diagonals
  for (int off : {1, 3, 6}) {
    for (int i = 4; i + off < a.n - 4; i += 9) {
      const Complex v1 = est.at(i, i + off);
      const Complex v2 = est.at(i + 3, i + 3 + off);
      const double se = std::hypot(est.se_at(i, i + off), est.se_at(i + 3, i + 3 + off));
      CHECK(std::abs(v1 - v2) < 5.0 * se);
    }
  }
}

TEST_CASE("estimate rejects mismatched axes and tiny ensembles") {
  const Axis a = make_axis(8, 1e-6, 0.0);
  const Axis b = make_axis(8, 2e-6, 0.0);
  CHECK_THROWS_AS(estimate_first_order({ComplexField(a)}), ValidationError);
  CHECK_THROWS_AS(estimate_first_order({ComplexField(a), ComplexField(b)}), ValidationError);
}
