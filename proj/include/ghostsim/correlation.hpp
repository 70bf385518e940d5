#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ghostsim/axis.hpp"

namespace ghostsim {

/// What a CorrelationAccumulator maintains. Slices and intensities are always
/// tracked per realization block (jackknife units); the full (x1,x2) surface
/// is stored once (blocked too only when surface_blocks is set, which costs
/// blocks * n1 * n2 memory and is meant for small grids).
struct AccumulatorLayout {
  Axis axis1, axis2;
  bool surface = false;
  bool surface_blocks = false;
  int row_fixed_index = -1;   // slice I1(x1 fixed) vs x2
  int col_fixed_index = -1;   // slice vs x1 at I2(x2 fixed)
  bool pooled_delta = false;  // circularly pooled over the common grid; axes must share n, dx
  int block_size = 100;
  std::int64_t start_index = 0;  // global index of the first realization fed here

  void validate() const;
};

struct BlockSums {
  std::int64_t block_id = 0;
  std::int64_t count = 0;
  std::vector<double> i1, i2;
  std::vector<double> row;
  std::vector<Complex> row_e;
  std::vector<double> col;
  std::vector<Complex> col_e;
  std::vector<double> delta;
  std::vector<Complex> delta_e;
  std::vector<double> surf;
  std::vector<Complex> surf_e;
};

/// Running ensemble sums of <I1>, <I2>, <I1 I2>, <E1* E2> between two arms.
/// Feeding is sequential (realization order); worker parallelism lives inside
/// one accumulation (disjoint row stripes), so the sums are bit-identical for
/// any worker count. merge() combines accumulators that covered disjoint
/// realization ranges; blocks are keyed by global realization index, making
/// the merge associative and commutative.
class CorrelationAccumulator {
 public:
  explicit CorrelationAccumulator(AccumulatorLayout layout);

  void accumulate(const ComplexField& e1, const ComplexField& e2, int workers = 1);
  void merge_from(const CorrelationAccumulator& other);

  const AccumulatorLayout& layout() const { return layout_; }
  std::int64_t count() const { return count_; }
  const std::vector<BlockSums>& blocks() const { return blocks_; }
  const std::vector<double>& surface_sums() const { return surf_; }
  const std::vector<Complex>& surface_e_sums() const { return surf_e_; }

  /// Grand totals folded over blocks in ascending id order.
  BlockSums totals() const;

 private:
  BlockSums& block_for(std::int64_t global_index);
  AccumulatorLayout layout_;
  std::int64_t count_ = 0;
  std::vector<BlockSums> blocks_;   // sorted by block_id
  std::vector<double> surf_;        // direct surface sums when !surface_blocks
  std::vector<Complex> surf_e_;
};

CorrelationAccumulator merge(const CorrelationAccumulator& a, const CorrelationAccumulator& b);

enum class SampleFlag : std::uint8_t { ok = 0, dark = 1 };

struct SliceCurve {
  std::string name;
  Axis axis;  // coordinate of the scanned detector, or the delta offset
  std::vector<double> g2;
  std::vector<double> se;    // NaN where unavailable
  std::vector<double> g1sq;  // |<E1* E2>|^2 / (<I1><I2>) along the slice
  std::vector<std::uint8_t> flags;
  double fixed_position = 0.0;
};

struct CorrelationResult {
  Axis axis1, axis2;
  std::int64_t count = 0;

  std::vector<double> mean_i1, mean_i2;
  std::vector<double> se_i1, se_i2;
  double floor1 = 0.0, floor2 = 0.0;

  bool has_surface = false;
  std::vector<double> g2_surface;    // row-major (x1, x2); NaN where dark
  std::vector<double> g1sq_surface;
  std::vector<double> se_surface;    // empty unless blocked surface was kept
  std::vector<std::uint8_t> flags_surface;

  bool has_row = false, has_col = false, has_delta = false;
  SliceCurve row, col, delta;

  // Siegert diagnostic, available when the blocked surface was kept:
  // max over live cells of |g2 - 1 - g1sq| in local jackknife-SE units.
  bool has_siegert = false;
  double siegert_max_se_units = 0.0;
  bool siegert_degenerate = false;

  std::uint64_t master_seed = 0;
  std::string config_hash;

  double g2_at(int i, int j) const {
    return g2_surface[static_cast<size_t>(i) * static_cast<size_t>(axis2.n) + static_cast<size_t>(j)];
  }
  double se_at(int i, int j) const {
    return se_surface[static_cast<size_t>(i) * static_cast<size_t>(axis2.n) + static_cast<size_t>(j)];
  }
};

/// Normalizes the accumulated sums; standard errors by leave-one-block-out
/// jackknife wherever per-block sums exist. Requires count >= 2 and at least
/// one live (not dark) cell.
CorrelationResult finalize(const CorrelationAccumulator& acc);

/// NaN when the ensemble was degenerate (zero variance everywhere). Throws if
/// the result carries no Siegert diagnostic.
double siegert_residual(const CorrelationResult& res);

}  // namespace ghostsim
