#include "ghostsim/fringe.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

#include "ghostsim/errors.hpp"

namespace ghostsim {

namespace {

struct Refined {
  double pos;
  double value;
};

/// Parabola through the discrete minimum and its neighbors; falls back to the
/// raw sample at window boundaries.
Refined refine_minimum(const std::vector<double>& x, const std::vector<double>& v, int i,
                       int lo, int hi) {
  if (i <= lo || i >= hi) return {x[static_cast<size_t>(i)], v[static_cast<size_t>(i)]};
  const double vm = v[static_cast<size_t>(i - 1)], v0 = v[static_cast<size_t>(i)],
               vp = v[static_cast<size_t>(i + 1)];
  const double denom = vm - 2.0 * v0 + vp;
  if (denom <= 0.0) return {x[static_cast<size_t>(i)], v0};
  const double s = 0.5 * (vm - vp) / denom;  // in units of the step
  const double step = x[static_cast<size_t>(i + 1)] - x[static_cast<size_t>(i)];
  return {x[static_cast<size_t>(i)] + s * step, v0 - 0.25 * (vm - vp) * s};
}

}  // namespace

FringeMetrics extract_fringe_metrics(const std::vector<double>& delta,
                                     const std::vector<double>& values, double period_hint) {
  if (delta.size() != values.size() || delta.size() < 8)
    throw ValidationError("fringe curve too short");
  const int n = static_cast<int>(delta.size());
  const double step = delta[1] - delta[0];
  if (!(step > 0.0)) throw ValidationError("fringe curve must be sampled in ascending delta");
  if (!(period_hint > 4.0 * step))
    throw ValidationError("period hint must exceed 4 grid steps");
  if (delta.back() - delta.front() < 2.0 * period_hint)
    throw ValidationError("fringe curve too short: needs to span >= 2 hinted periods");

  // Curve value at delta = 0 is the central maximum.
  int i0 = 0;
  for (int i = 1; i < n; ++i)
    if (std::abs(delta[static_cast<size_t>(i)]) < std::abs(delta[static_cast<size_t>(i0)])) i0 = i;
  if (std::abs(delta[static_cast<size_t>(i0)]) > step)
    throw ValidationError("fringe curve does not cover delta = 0");

  FringeMetrics out;
  out.central_max = values[static_cast<size_t>(i0)];

  const double window = 1.5 * period_hint;
  int right_lo = i0 + 1, right_hi = i0;
  while (right_hi + 1 < n && delta[static_cast<size_t>(right_hi + 1)] - delta[static_cast<size_t>(i0)] <= window)
    ++right_hi;
  int left_hi = i0 - 1, left_lo = i0;
  while (left_lo - 1 >= 0 && delta[static_cast<size_t>(i0)] - delta[static_cast<size_t>(left_lo - 1)] <= window)
    --left_lo;
  if (right_lo > right_hi || left_lo > left_hi)
    throw ValidationError("no samples to search for flanking minima");

  // Periodic curves repeat the same minimum value at 0.5 and 1.5 hinted
  // periods, so a bare window argmin is ill-posed there (and noise would
  // break the tie at random). Take the innermost basin instead: enter where
  // the curve first comes within 10% of the window minimum (relative to the
  // peak-to-min swing), leave once it has climbed 35% back up.
  auto basin_min = [&](int lo, int hi, int step) {
    int gmin = lo;
    for (int i = lo; step > 0 ? i <= hi : i >= hi; i += step)
      if (values[static_cast<size_t>(i)] < values[static_cast<size_t>(gmin)]) gmin = i;
    const double vmin = values[static_cast<size_t>(gmin)];
    const double swing = out.central_max - vmin;
    const double enter = vmin + 0.10 * std::max(swing, 0.0);
    const double leave = vmin + 0.35 * std::max(swing, 0.0);
    int i = lo;
    while ((step > 0 ? i <= hi : i >= hi) && values[static_cast<size_t>(i)] > enter) i += step;
    if (step > 0 ? i > hi : i < hi) return gmin;
    int best = i;
    for (int j = i; step > 0 ? j <= hi : j >= hi; j += step) {
      if (values[static_cast<size_t>(j)] > leave) break;
      if (values[static_cast<size_t>(j)] < values[static_cast<size_t>(best)]) best = j;
    }
    return best;
  };
  const int ir = basin_min(right_lo, right_hi, +1);
  const int il = basin_min(left_hi, left_lo, -1);

  const Refined rr = refine_minimum(delta, values, ir, right_lo, right_hi);
  const Refined rl = refine_minimum(delta, values, il, left_lo, left_hi);
  out.min_right = rr.value;
  out.min_left = rl.value;
  out.min_right_pos = rr.pos;
  out.min_left_pos = rl.pos;

  const double min_avg = 0.5 * (rr.value + rl.value);
  const double denom = out.central_max + min_avg;
  out.visibility = denom != 0.0 ? (out.central_max - min_avg) / denom : 0.0;
  out.period = rr.pos - rl.pos;

  // Discrete projection on the hinted frequency over the whole curve.
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= n;
  std::complex<double> proj{0.0, 0.0};
  for (int i = 0; i < n; ++i) {
    const double ph = 2.0 * std::numbers::pi * delta[static_cast<size_t>(i)] / period_hint;
    proj += (values[static_cast<size_t>(i)] - mean) * std::polar(1.0, -ph);
  }
  const double amplitude = 2.0 * std::abs(proj) / n;
  out.modulation_ratio = mean > 0.0 ? amplitude / mean : (amplitude > 0.0 ? 1e9 : 0.0);
  out.is_fringe = out.modulation_ratio > 0.05;
  return out;
}

}  // namespace ghostsim
