#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "ghostsim/correlation.hpp"
#include "ghostsim/elements.hpp"
#include "ghostsim/speckle.hpp"

namespace ghostsim {

enum class Scheme { A, B };

struct GridSpec {
  int n = 2048;
  double dx = 4e-6;
};

struct FixedDetector {
  int arm = 1;  // 1 or 2
  double position = 0.0;
};

enum class SurfacePolicy { automatic, always, never };

struct SchemeBGeometry {
  double source_to_mask = 0.02;
  double mask_to_detector = 0.40;
};

struct SchemeAGeometry {
  double source_to_mask = 0.10;
  double mask_to_ccd1 = 0.20;  // mask to detector in the test arm
  double source_to_ccd2 = 0.10;
  double source_to_ccd3 = 0.44;
};

/// One reproducible experiment description.
struct ScenarioConfig {
  Scheme scheme = Scheme::B;
  double wavelength = 632.8e-9;
  GridSpec grid;
  SpectrumModel spectrum = SpectrumModel::from_coherence_length(1.0, 5e-6, 2e-3);
  std::int64_t ensemble_size = 5000;
  std::uint64_t master_seed = 12345;
  SchemeBGeometry scheme_b;
  SchemeAGeometry scheme_a;
  double slit_width = 85e-6;
  double slit_separation = 330e-6;
  ApertureKind ref_kind = ApertureKind::double_slit;
  double retained_fraction = 0.25;
  FixedDetector fixed_detector;
  SurfacePolicy surface = SurfacePolicy::automatic;
  int block_size = 100;

  double wavenumber() const;
  ApertureSpec test_aperture() const;
  ApertureSpec ref_aperture() const;
  void validate() const;
};

struct Pairing {
  std::string name;
  int arm_a = 0, arm_b = 1;  // indices into SimulationPlan::arms
  AccumulatorLayout layout;
};

struct SimulationPlan {
  Axis grid_axis;
  std::vector<PathSpec> arms;
  std::vector<std::string> arm_names;
  std::vector<double> arm_scales;  // beamsplitter amplitude factor per arm
  std::vector<Pairing> pairings;
  std::vector<std::string> warnings;
};

SimulationPlan build_scheme_A(const ScenarioConfig& cfg);
SimulationPlan build_scheme_B(const ScenarioConfig& cfg);
SimulationPlan build_plan(const ScenarioConfig& cfg);

struct RunOutput {
  std::vector<std::string> pairing_names;
  std::vector<CorrelationResult> results;
  std::vector<std::string> warnings;
  double seconds = 0.0;
};

using ProgressFn = std::function<void(std::int64_t done, std::int64_t total)>;

/// Monte Carlo ensemble over realization indices 0..ensemble_size-1: per
/// realization, generate the source speckle from (master_seed, index), apply
/// the beamsplitter scalings, run every arm, feed every pairing. Realizations
/// are processed in index order and workers only split the per-realization
/// accumulation across disjoint stripes, so the output is bit-identical for
/// any worker count.
RunOutput run_plan(const SimulationPlan& plan, const ScenarioConfig& cfg, int workers = 1,
                   const ProgressFn& progress = {});

/// g2 row/column through a fixed detector position (snapped to the nearest
/// sample). Uses the jackknifed slice when the position matches the
/// accumulated one, otherwise falls back to the stored surface.
SliceCurve scan_slice(const CorrelationResult& res, int fixed_arm, double fixed_position);

}  // namespace ghostsim
