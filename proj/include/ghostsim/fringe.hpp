#pragma once

#include <vector>

namespace ghostsim {

struct FringeMetrics {
  double visibility = 0.0;
  double period = 0.0;
  bool is_fringe = false;
  double modulation_ratio = 0.0;  // projection amplitude at the hinted frequency / curve mean
  double central_max = 0.0;
  double min_left = 0.0, min_right = 0.0;
  double min_left_pos = 0.0, min_right_pos = 0.0;
};

/// Fringe metrics of a curve sampled uniformly in delta = x1 - x2.
/// Central maximum is the curve value at delta = 0; the flanking minima are
/// searched within 1.5 hinted periods on each side and refined by parabolic
/// interpolation; visibility = (max - mean of minima) / (max + mean);
/// period = distance between the two refined minima; is_fringe tests the
/// discrete projection onto the hinted frequency against 0.05 of the mean.
/// Requires the curve to span >= 2 hinted periods and the hint to exceed
/// 4 grid steps.
FringeMetrics extract_fringe_metrics(const std::vector<double>& delta,
                                     const std::vector<double>& values,
                                     double period_hint);

}  // namespace ghostsim
