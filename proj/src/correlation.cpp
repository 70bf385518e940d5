#include "ghostsim/correlation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ghostsim/errors.hpp"
#include "ghostsim/fft.hpp"
#include "ghostsim/thread_pool.hpp"

namespace ghostsim {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();
constexpr double kDarkFloorRatio = 1e-9;

void add_into(std::vector<double>& a, const std::vector<double>& b) {
  if (a.empty()) a.assign(b.size(), 0.0);
  for (size_t i = 0; i < b.size(); ++i) a[i] += b[i];
}

void add_into(std::vector<Complex>& a, const std::vector<Complex>& b) {
  if (a.empty()) a.assign(b.size(), Complex{0.0, 0.0});
  for (size_t i = 0; i < b.size(); ++i) a[i] += b[i];
}

void sub_from(std::vector<double>& a, const std::vector<double>& b) {
  for (size_t i = 0; i < b.size(); ++i) a[i] -= b[i];
}

void sub_from(std::vector<Complex>& a, const std::vector<Complex>& b) {
  for (size_t i = 0; i < b.size(); ++i) a[i] -= b[i];
}

/// Maps pooled circular offsets onto a signed-delta axis.
Axis delta_axis_for(const Axis& a) {
  const double center = (a.n % 2 == 0) ? -0.5 * a.dx : 0.0;
  return Axis{a.n, a.dx, center};
}

int delta_output_to_offset(int t, int n) {
  const int shift = n / 2;
  int m = shift - t;  // delta = x1 - x2 = -(offset) * dx
  m %= n;
  if (m < 0) m += n;
  return m;
}

}  // namespace

void AccumulatorLayout::validate() const {
  if (axis1.n < 1 || axis2.n < 1) throw ValidationError("accumulator needs detector axes");
  if (block_size < 1) throw ValidationError("block size must be >= 1");
  if (row_fixed_index >= axis1.n || col_fixed_index >= axis2.n)
    throw ValidationError("fixed slice index outside the detector axis");
  if (pooled_delta && (axis1.n != axis2.n || axis1.dx != axis2.dx))
    throw ValidationError("pooled delta curve needs matching detector grids");
  if (surface_blocks && !surface) throw ValidationError("surface_blocks requires surface");
}

CorrelationAccumulator::CorrelationAccumulator(AccumulatorLayout layout)
    : layout_(std::move(layout)) {
  layout_.validate();
  if (layout_.surface && !layout_.surface_blocks) {
    const size_t cells = static_cast<size_t>(layout_.axis1.n) * static_cast<size_t>(layout_.axis2.n);
    surf_.assign(cells, 0.0);
    surf_e_.assign(cells, Complex{0.0, 0.0});
  }
}

BlockSums& CorrelationAccumulator::block_for(std::int64_t global_index) {
  const std::int64_t id = global_index / layout_.block_size;
  if (!blocks_.empty() && blocks_.back().block_id == id) return blocks_.back();
  BlockSums b;
  b.block_id = id;
  const size_t n1 = static_cast<size_t>(layout_.axis1.n);
  const size_t n2 = static_cast<size_t>(layout_.axis2.n);
  b.i1.assign(n1, 0.0);
  b.i2.assign(n2, 0.0);
  if (layout_.row_fixed_index >= 0) {
    b.row.assign(n2, 0.0);
    b.row_e.assign(n2, Complex{0.0, 0.0});
  }
  if (layout_.col_fixed_index >= 0) {
    b.col.assign(n1, 0.0);
    b.col_e.assign(n1, Complex{0.0, 0.0});
  }
  if (layout_.pooled_delta) {
    b.delta.assign(n1, 0.0);
    b.delta_e.assign(n1, Complex{0.0, 0.0});
  }
  if (layout_.surface_blocks) {
    b.surf.assign(n1 * n2, 0.0);
    b.surf_e.assign(n1 * n2, Complex{0.0, 0.0});
  }
  blocks_.push_back(std::move(b));
  return blocks_.back();
}

void CorrelationAccumulator::accumulate(const ComplexField& e1, const ComplexField& e2,
                                        int workers) {
  require_same_axis(e1.axis, layout_.axis1, "accumulate (arm 1)");
  require_same_axis(e2.axis, layout_.axis2, "accumulate (arm 2)");

  const size_t n1 = static_cast<size_t>(layout_.axis1.n);
  const size_t n2 = static_cast<size_t>(layout_.axis2.n);
  const std::vector<double> i1 = intensity(e1);
  const std::vector<double> i2 = intensity(e2);

  BlockSums& blk = block_for(layout_.start_index + count_);
  ++blk.count;
  ++count_;

  for (size_t i = 0; i < n1; ++i) blk.i1[i] += i1[i];
  for (size_t j = 0; j < n2; ++j) blk.i2[j] += i2[j];

  if (layout_.row_fixed_index >= 0) {
    const size_t i0 = static_cast<size_t>(layout_.row_fixed_index);
    const double s = i1[i0];
    const Complex c = std::conj(e1.values[i0]);
    for (size_t j = 0; j < n2; ++j) {
      blk.row[j] += s * i2[j];
      blk.row_e[j] += c * e2.values[j];
    }
  }
  if (layout_.col_fixed_index >= 0) {
    const size_t j0 = static_cast<size_t>(layout_.col_fixed_index);
    const double s = i2[j0];
    const Complex c = e2.values[j0];
    for (size_t i = 0; i < n1; ++i) {
      blk.col[i] += i1[i] * s;
      blk.col_e[i] += std::conj(e1.values[i]) * c;
    }
  }
  if (layout_.pooled_delta) {
    const std::vector<double> xci = circular_cross_correlation(i1, i2);
    const std::vector<Complex> xce = circular_cross_correlation(e1.values, e2.values);
    for (size_t m = 0; m < n1; ++m) {
      blk.delta[m] += xci[m];
      blk.delta_e[m] += xce[m];
    }
  }

  if (layout_.surface) {
    double* surf = layout_.surface_blocks ? blk.surf.data() : surf_.data();
    Complex* surf_e = layout_.surface_blocks ? blk.surf_e.data() : surf_e_.data();
    parallel_for(workers, 0, static_cast<std::int64_t>(n1), [&](std::int64_t lo, std::int64_t hi) {
      for (std::int64_t i = lo; i < hi; ++i) {
        const double s = i1[static_cast<size_t>(i)];
        const Complex c = std::conj(e1.values[static_cast<size_t>(i)]);
        double* row = surf + static_cast<size_t>(i) * n2;
        Complex* row_e = surf_e + static_cast<size_t>(i) * n2;
        for (size_t j = 0; j < n2; ++j) {
          row[j] += s * i2[j];
          row_e[j] += c * e2.values[j];
        }
      }
    });
  }
}

void CorrelationAccumulator::merge_from(const CorrelationAccumulator& other) {
  if (!(layout_.axis1 == other.layout_.axis1 && layout_.axis2 == other.layout_.axis2))
    throw ValidationError("merge: accumulator axes differ");
  if (layout_.block_size != other.layout_.block_size ||
      layout_.surface != other.layout_.surface ||
      layout_.surface_blocks != other.layout_.surface_blocks ||
      layout_.row_fixed_index != other.layout_.row_fixed_index ||
      layout_.col_fixed_index != other.layout_.col_fixed_index ||
      layout_.pooled_delta != other.layout_.pooled_delta)
    throw ValidationError("merge: accumulator layouts differ");

  std::vector<BlockSums> merged;
  merged.reserve(blocks_.size() + other.blocks_.size());
  size_t a = 0, b = 0;
  while (a < blocks_.size() || b < other.blocks_.size()) {
    if (b >= other.blocks_.size() ||
        (a < blocks_.size() && blocks_[a].block_id < other.blocks_[b].block_id)) {
      merged.push_back(std::move(blocks_[a++]));
    } else if (a >= blocks_.size() || other.blocks_[b].block_id < blocks_[a].block_id) {
      merged.push_back(other.blocks_[b++]);
    } else {
      BlockSums combined = std::move(blocks_[a++]);
      const BlockSums& rhs = other.blocks_[b++];
      combined.count += rhs.count;
      add_into(combined.i1, rhs.i1);
      add_into(combined.i2, rhs.i2);
      add_into(combined.row, rhs.row);
      add_into(combined.row_e, rhs.row_e);
      add_into(combined.col, rhs.col);
      add_into(combined.col_e, rhs.col_e);
      add_into(combined.delta, rhs.delta);
      add_into(combined.delta_e, rhs.delta_e);
      add_into(combined.surf, rhs.surf);
      add_into(combined.surf_e, rhs.surf_e);
      merged.push_back(std::move(combined));
    }
  }
  blocks_ = std::move(merged);
  if (layout_.surface && !layout_.surface_blocks) {
    add_into(surf_, other.surf_);
    add_into(surf_e_, other.surf_e_);
  }
  count_ += other.count_;
}

CorrelationAccumulator merge(const CorrelationAccumulator& a, const CorrelationAccumulator& b) {
  CorrelationAccumulator out = a;
  out.merge_from(b);
  return out;
}

BlockSums CorrelationAccumulator::totals() const {
  BlockSums t;
  t.block_id = -1;
  for (const BlockSums& b : blocks_) {
    t.count += b.count;
    add_into(t.i1, b.i1);
    add_into(t.i2, b.i2);
    add_into(t.row, b.row);
    add_into(t.row_e, b.row_e);
    add_into(t.col, b.col);
    add_into(t.col_e, b.col_e);
    add_into(t.delta, b.delta);
    add_into(t.delta_e, b.delta_e);
    add_into(t.surf, b.surf);
    add_into(t.surf_e, b.surf_e);
  }
  return t;
}

namespace {

/// Leave-one-block-out jackknife SE of a per-cell statistic. `stat` maps
/// aggregated sums to the statistic vector.
template <typename Stat>
std::vector<double> jackknife_se(const std::vector<BlockSums>& blocks, const BlockSums& totals,
                                 size_t cells, Stat&& stat) {
  std::vector<double> se(cells, kNan);
  if (blocks.size() < 2) return se;
  const size_t nb = blocks.size();
  std::vector<double> sum(cells, 0.0), sum2(cells, 0.0);
  BlockSums loo;
  for (const BlockSums& b : blocks) {
    loo = totals;
    loo.count = totals.count - b.count;
    sub_from(loo.i1, b.i1);
    sub_from(loo.i2, b.i2);
    sub_from(loo.row, b.row);
    sub_from(loo.row_e, b.row_e);
    sub_from(loo.col, b.col);
    sub_from(loo.col_e, b.col_e);
    sub_from(loo.delta, b.delta);
    sub_from(loo.delta_e, b.delta_e);
    sub_from(loo.surf, b.surf);
    sub_from(loo.surf_e, b.surf_e);
    const std::vector<double> theta = stat(loo);
    for (size_t k = 0; k < cells; ++k) {
      sum[k] += theta[k];
      sum2[k] += theta[k] * theta[k];
    }
  }
  const double nbd = static_cast<double>(nb);
  for (size_t k = 0; k < cells; ++k) {
    const double mean = sum[k] / nbd;
    const double var = std::max(0.0, sum2[k] / nbd - mean * mean);
    se[k] = std::sqrt((nbd - 1.0) * var);
  }
  return se;
}

std::vector<double> ratio_g2(const std::vector<double>& num, const std::vector<double>& i1,
                             const std::vector<double>& i2, std::int64_t count, bool row_mode,
                             int fixed_index, double floor1, double floor2) {
  // row_mode: num[j] = sum I1(fixed) I2(j); else num[i] = sum I1(i) I2(fixed).
  std::vector<double> g(num.size(), kNan);
  const double c = static_cast<double>(count);
  for (size_t k = 0; k < num.size(); ++k) {
    const double m1 = row_mode ? i1[static_cast<size_t>(fixed_index)] / c : i1[k] / c;
    const double m2 = row_mode ? i2[k] / c : i2[static_cast<size_t>(fixed_index)] / c;
    if (m1 <= floor1 || m2 <= floor2) continue;
    g[k] = (num[k] / c) / (m1 * m2);
  }
  return g;
}

std::vector<double> pooled_delta_g2(const BlockSums& t, int n, double floor_product) {
  // g2(offset m) = pooled numerator / circular correlation of the mean intensities.
  const double c = static_cast<double>(t.count);
  std::vector<double> m1(t.i1.size()), m2(t.i2.size());
  for (size_t i = 0; i < m1.size(); ++i) m1[i] = t.i1[i] / c;
  for (size_t j = 0; j < m2.size(); ++j) m2[j] = t.i2[j] / c;
  const std::vector<double> den = circular_cross_correlation(m1, m2);
  std::vector<double> g(static_cast<size_t>(n), kNan);
  for (int m = 0; m < n; ++m) {
    const double d = den[static_cast<size_t>(m)];
    if (d <= floor_product * n) continue;
    g[static_cast<size_t>(m)] = (t.delta[static_cast<size_t>(m)] / c) / d;
  }
  return g;
}

}  // namespace

CorrelationResult finalize(const CorrelationAccumulator& acc) {
  const AccumulatorLayout& lay = acc.layout();
  if (acc.count() < 2) throw ValidationError("finalize needs at least 2 realizations");

  const size_t n1 = static_cast<size_t>(lay.axis1.n);
  const size_t n2 = static_cast<size_t>(lay.axis2.n);
  BlockSums t = acc.totals();
  const double c = static_cast<double>(t.count);

  CorrelationResult res;
  res.axis1 = lay.axis1;
  res.axis2 = lay.axis2;
  res.count = t.count;

  res.mean_i1.resize(n1);
  res.mean_i2.resize(n2);
  for (size_t i = 0; i < n1; ++i) res.mean_i1[i] = t.i1[i] / c;
  for (size_t j = 0; j < n2; ++j) res.mean_i2[j] = t.i2[j] / c;
  const double peak1 = *std::max_element(res.mean_i1.begin(), res.mean_i1.end());
  const double peak2 = *std::max_element(res.mean_i2.begin(), res.mean_i2.end());
  if (peak1 <= 0.0 || peak2 <= 0.0) throw ValidationError("all-dark detector region");
  res.floor1 = kDarkFloorRatio * peak1;
  res.floor2 = kDarkFloorRatio * peak2;

  const auto& blocks = acc.blocks();
  res.se_i1 = jackknife_se(blocks, t, n1, [&](const BlockSums& s) {
    std::vector<double> v(n1);
    for (size_t i = 0; i < n1; ++i) v[i] = s.i1[i] / static_cast<double>(s.count);
    return v;
  });
  res.se_i2 = jackknife_se(blocks, t, n2, [&](const BlockSums& s) {
    std::vector<double> v(n2);
    for (size_t j = 0; j < n2; ++j) v[j] = s.i2[j] / static_cast<double>(s.count);
    return v;
  });

  if (lay.row_fixed_index >= 0) {
    res.has_row = true;
    SliceCurve& sc = res.row;
    sc.name = "row";
    sc.axis = lay.axis2;
    sc.fixed_position = lay.axis1.coord(lay.row_fixed_index);
    sc.g2 = ratio_g2(t.row, t.i1, t.i2, t.count, true, lay.row_fixed_index, res.floor1, res.floor2);
    sc.se = jackknife_se(blocks, t, n2, [&](const BlockSums& s) {
      return ratio_g2(s.row, s.i1, s.i2, s.count, true, lay.row_fixed_index, res.floor1, res.floor2);
    });
    sc.g1sq.resize(n2, kNan);
    sc.flags.assign(n2, static_cast<std::uint8_t>(SampleFlag::ok));
    const double m1 = res.mean_i1[static_cast<size_t>(lay.row_fixed_index)];
    for (size_t j = 0; j < n2; ++j) {
      if (std::isnan(sc.g2[j])) {
        sc.flags[j] = static_cast<std::uint8_t>(SampleFlag::dark);
        continue;
      }
      sc.g1sq[j] = std::norm(t.row_e[j] / c) / (m1 * res.mean_i2[j]);
    }
  }

  if (lay.col_fixed_index >= 0) {
    res.has_col = true;
    SliceCurve& sc = res.col;
    sc.name = "col";
    sc.axis = lay.axis1;
    sc.fixed_position = lay.axis2.coord(lay.col_fixed_index);
    sc.g2 = ratio_g2(t.col, t.i1, t.i2, t.count, false, lay.col_fixed_index, res.floor1, res.floor2);
    sc.se = jackknife_se(blocks, t, n1, [&](const BlockSums& s) {
      return ratio_g2(s.col, s.i1, s.i2, s.count, false, lay.col_fixed_index, res.floor1, res.floor2);
    });
    sc.g1sq.resize(n1, kNan);
    sc.flags.assign(n1, static_cast<std::uint8_t>(SampleFlag::ok));
    const double m2 = res.mean_i2[static_cast<size_t>(lay.col_fixed_index)];
    for (size_t i = 0; i < n1; ++i) {
      if (std::isnan(sc.g2[i])) {
        sc.flags[i] = static_cast<std::uint8_t>(SampleFlag::dark);
        continue;
      }
      sc.g1sq[i] = std::norm(t.col_e[i] / c) / (res.mean_i1[i] * m2);
    }
  }

  if (lay.pooled_delta) {
    res.has_delta = true;
    SliceCurve& sc = res.delta;
    sc.name = "delta";
    sc.axis = delta_axis_for(lay.axis1);
    const int n = lay.axis1.n;
    const double floor_product = res.floor1 * res.floor2;
    const std::vector<double> g_off = pooled_delta_g2(t, n, floor_product);
    const std::vector<double> se_off = jackknife_se(blocks, t, static_cast<size_t>(n),
        [&](const BlockSums& s) { return pooled_delta_g2(s, n, floor_product); });
    sc.g2.resize(static_cast<size_t>(n));
    sc.se.resize(static_cast<size_t>(n));
    sc.g1sq.resize(static_cast<size_t>(n), kNan);
    sc.flags.assign(static_cast<size_t>(n), static_cast<std::uint8_t>(SampleFlag::ok));
    std::vector<double> md1(n1), md2(n2);
    for (size_t i = 0; i < n1; ++i) md1[i] = res.mean_i1[i];
    for (size_t j = 0; j < n2; ++j) md2[j] = res.mean_i2[j];
    const std::vector<double> den = circular_cross_correlation(md1, md2);
    for (int tt = 0; tt < n; ++tt) {
      const int m = delta_output_to_offset(tt, n);
      sc.g2[static_cast<size_t>(tt)] = g_off[static_cast<size_t>(m)];
      sc.se[static_cast<size_t>(tt)] = se_off[static_cast<size_t>(m)];
      if (std::isnan(sc.g2[static_cast<size_t>(tt)]))
        sc.flags[static_cast<size_t>(tt)] = static_cast<std::uint8_t>(SampleFlag::dark);
      else
        sc.g1sq[static_cast<size_t>(tt)] =
            std::norm(t.delta_e[static_cast<size_t>(m)] / c) / den[static_cast<size_t>(m)];
    }
  }

  if (lay.surface) {
    res.has_surface = true;
    const size_t cells = n1 * n2;
    const std::vector<double>& surf = lay.surface_blocks ? t.surf : acc.surface_sums();
    const std::vector<Complex>& surf_e = lay.surface_blocks ? t.surf_e : acc.surface_e_sums();
    res.g2_surface.assign(cells, kNan);
    res.g1sq_surface.assign(cells, kNan);
    res.flags_surface.assign(cells, static_cast<std::uint8_t>(SampleFlag::ok));
    bool any_live = false;
    for (size_t i = 0; i < n1; ++i) {
      for (size_t j = 0; j < n2; ++j) {
        const size_t k = i * n2 + j;
        if (res.mean_i1[i] <= res.floor1 || res.mean_i2[j] <= res.floor2) {
          res.flags_surface[k] = static_cast<std::uint8_t>(SampleFlag::dark);
          continue;
        }
        const double den = res.mean_i1[i] * res.mean_i2[j];
        res.g2_surface[k] = (surf[k] / c) / den;
        res.g1sq_surface[k] = std::norm(surf_e[k] / c) / den;
        any_live = true;
      }
    }
    if (!any_live) throw ValidationError("all-dark detector region");

    if (lay.surface_blocks) {
      res.se_surface = jackknife_se(blocks, t, cells, [&](const BlockSums& s) {
        std::vector<double> g(cells, kNan);
        const double sc = static_cast<double>(s.count);
        for (size_t i = 0; i < n1; ++i) {
          const double m1 = s.i1[i] / sc;
          if (m1 <= res.floor1) continue;
          for (size_t j = 0; j < n2; ++j) {
            const double m2 = s.i2[j] / sc;
            if (m2 <= res.floor2) continue;
            g[i * n2 + j] = (s.surf[i * n2 + j] / sc) / (m1 * m2);
          }
        }
        return g;
      });

      // Siegert diagnostic: jackknife the residual g2 - 1 - g1sq per cell.
      const auto residual = [&](const BlockSums& s) {
        std::vector<double> r(cells, kNan);
        const double sc = static_cast<double>(s.count);
        for (size_t i = 0; i < n1; ++i) {
          const double m1 = s.i1[i] / sc;
          if (m1 <= res.floor1) continue;
          for (size_t j = 0; j < n2; ++j) {
            const double m2 = s.i2[j] / sc;
            if (m2 <= res.floor2) continue;
            const size_t k = i * n2 + j;
            const double den = m1 * m2;
            r[k] = (s.surf[k] / sc) / den - 1.0 - std::norm(s.surf_e[k] / sc) / den;
          }
        }
        return r;
      };
      const std::vector<double> r_se = jackknife_se(blocks, t, cells, residual);
      const std::vector<double> r_val = residual(t);
      double max_units = 0.0;
      long live = 0;
      for (size_t k = 0; k < cells; ++k) {
        if (std::isnan(r_val[k]) || std::isnan(r_se[k])) continue;
        if (r_se[k] <= 0.0) continue;  // degenerate (zero-variance) cell
        max_units = std::max(max_units, std::abs(r_val[k]) / r_se[k]);
        ++live;
      }
      res.has_siegert = true;
      res.siegert_degenerate = (live == 0);
      res.siegert_max_se_units = res.siegert_degenerate ? kNan : max_units;
    }
  }

  return res;
}

double siegert_residual(const CorrelationResult& res) {
  if (!res.has_siegert)
    throw ValidationError("Siegert residual needs the blocked (x1,x2) surface");
  return res.siegert_max_se_units;
}

}  // namespace ghostsim
