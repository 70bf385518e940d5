#include "ghostsim/scenario.hpp"

#include <chrono>
#include <cmath>
#include <numbers>

#include "ghostsim/errors.hpp"

namespace ghostsim {

namespace {

constexpr std::int64_t kSurfaceCellLimit = std::int64_t{1} << 22;
constexpr std::int64_t kBlockedSurfaceCellLimit = std::int64_t{1} << 18;
constexpr double kBlockedSurfaceMemoryBudget = 1.5e9;  // bytes

constexpr double kInvSqrt2 = 0.70710678118654752440;

bool want_surface(const ScenarioConfig& cfg, std::int64_t cells) {
  switch (cfg.surface) {
    case SurfacePolicy::never:
      return false;
    case SurfacePolicy::always:
    case SurfacePolicy::automatic:
      return cells <= kSurfaceCellLimit;
  }
  return false;
}

bool want_surface_blocks(const ScenarioConfig& cfg, std::int64_t cells) {
  if (cells > kBlockedSurfaceCellLimit) return false;
  const std::int64_t blocks = (cfg.ensemble_size + cfg.block_size - 1) / cfg.block_size;
  const double bytes = static_cast<double>(blocks) * static_cast<double>(cells) * 24.0;
  return bytes <= kBlockedSurfaceMemoryBudget;
}

void collect_chirp_warnings(const ScenarioConfig& cfg, const SimulationPlan& plan,
                            std::vector<std::string>& warnings) {
  for (size_t a = 0; a < plan.arms.size(); ++a) {
    for (const auto& e : plan.arms[a].elements) {
      if (e.kind != PathElement::Kind::free_space) continue;
      const ChirpGuard g = fresnel_sampling_check(plan.grid_axis, e.distance, cfg.wavelength);
      if (!g.ok) warnings.push_back(plan.arm_names[a] + ": " + g.message);
    }
  }
}

}  // namespace

double ScenarioConfig::wavenumber() const { return 2.0 * std::numbers::pi / wavelength; }

ApertureSpec ScenarioConfig::test_aperture() const {
  return ApertureSpec::double_slit(slit_width, slit_separation);
}

ApertureSpec ScenarioConfig::ref_aperture() const {
  switch (ref_kind) {
    case ApertureKind::double_slit:
      return ApertureSpec::double_slit(slit_width, slit_separation);
    case ApertureKind::single_slit:
      return ApertureSpec::single_slit(slit_width, slit_separation);
    case ApertureKind::incomplete_double_slit:
      return ApertureSpec::incomplete_double_slit(slit_width, slit_separation, retained_fraction);
    case ApertureKind::custom:
      break;
  }
  throw ValidationError("reference aperture must be double, single, or incomplete");
}

void ScenarioConfig::validate() const {
  if (!(wavelength > 0.0)) throw ValidationError("wavelength must be positive");
  if (grid.n < 2 || !(grid.dx > 0.0)) throw ValidationError("grid needs n >= 2 and dx > 0");
  spectrum.validate();
  if (ensemble_size < 2) throw ValidationError("ensemble size must be >= 2");
  if (block_size < 1) throw ValidationError("block size must be >= 1");
  if (fixed_detector.arm != 1 && fixed_detector.arm != 2)
    throw ValidationError("fixed detector arm must be 1 or 2");
  test_aperture();
  ref_aperture();
  if (scheme == Scheme::B) {
    if (!(scheme_b.source_to_mask > 0.0) || !(scheme_b.mask_to_detector > 0.0))
      throw ValidationError("scheme B distances must be positive");
  } else {
    if (!(scheme_a.source_to_mask > 0.0) || !(scheme_a.mask_to_ccd1 > 0.0) ||
        !(scheme_a.source_to_ccd2 > 0.0) || !(scheme_a.source_to_ccd3 > 0.0))
      throw ValidationError("scheme A distances must be positive");
  }
}

SimulationPlan build_scheme_B(const ScenarioConfig& cfg) {
  cfg.validate();
  if (cfg.scheme != Scheme::B) throw ValidationError("config is not a scheme B description");

  SimulationPlan plan;
  plan.grid_axis = make_axis(cfg.grid.n, cfg.grid.dx, 0.0);

  PathSpec test;
  test.arm = ArmLabel::test;
  test.elements = {PathElement::free_space(cfg.scheme_b.source_to_mask),
                   PathElement::masked(cfg.test_aperture()),
                   PathElement::free_space(cfg.scheme_b.mask_to_detector)};
  PathSpec ref;
  ref.arm = ArmLabel::reference;
  ref.elements = {PathElement::free_space(cfg.scheme_b.source_to_mask),
                  PathElement::masked(cfg.ref_aperture()),
                  PathElement::free_space(cfg.scheme_b.mask_to_detector)};
  plan.arms = {test, ref};
  plan.arm_names = {"ccd1", "ccd2"};
  plan.arm_scales = {kInvSqrt2, kInvSqrt2};

  // Masks must resolve on the working grid before any ensemble work starts.
  mask_profile(cfg.test_aperture(), plan.grid_axis);
  mask_profile(cfg.ref_aperture(), plan.grid_axis);

  Pairing p;
  p.name = "ccd1_ccd2";
  p.arm_a = 0;
  p.arm_b = 1;
  p.layout.axis1 = plan.grid_axis;
  p.layout.axis2 = plan.grid_axis;
  const double row_pos = cfg.fixed_detector.arm == 1 ? cfg.fixed_detector.position : 0.0;
  const double col_pos = cfg.fixed_detector.arm == 2 ? cfg.fixed_detector.position : 0.0;
  p.layout.row_fixed_index = plan.grid_axis.nearest_index(row_pos);
  p.layout.col_fixed_index = plan.grid_axis.nearest_index(col_pos);
  p.layout.pooled_delta = true;
  const std::int64_t cells = std::int64_t{cfg.grid.n} * cfg.grid.n;
  p.layout.surface = want_surface(cfg, cells);
  p.layout.surface_blocks = p.layout.surface && want_surface_blocks(cfg, cells);
  p.layout.block_size = cfg.block_size;
  plan.pairings = {p};

  collect_chirp_warnings(cfg, plan, plan.warnings);
  return plan;
}

SimulationPlan build_scheme_A(const ScenarioConfig& cfg) {
  cfg.validate();
  if (cfg.scheme != Scheme::A) throw ValidationError("config is not a scheme A description");

  SimulationPlan plan;
  plan.grid_axis = make_axis(cfg.grid.n, cfg.grid.dx, 0.0);

  PathSpec test;
  test.arm = ArmLabel::test;
  test.elements = {PathElement::free_space(cfg.scheme_a.source_to_mask),
                   PathElement::masked(cfg.test_aperture()),
                   PathElement::free_space(cfg.scheme_a.mask_to_ccd1)};
  PathSpec ref2;
  ref2.arm = ArmLabel::reference;
  ref2.elements = {PathElement::free_space(cfg.scheme_a.source_to_ccd2)};
  PathSpec ref3;
  ref3.arm = ArmLabel::reference;
  ref3.elements = {PathElement::free_space(cfg.scheme_a.source_to_ccd3)};
  plan.arms = {test, ref2, ref3};
  plan.arm_names = {"ccd1", "ccd2", "ccd3"};
  // BS1 reflects the test beam, BS2 splits the transmitted beam again.
  plan.arm_scales = {kInvSqrt2, 0.5, 0.5};

  mask_profile(cfg.test_aperture(), plan.grid_axis);

  const double fixed_pos = cfg.fixed_detector.arm == 1 ? cfg.fixed_detector.position : 0.0;
  const int fixed_index = plan.grid_axis.nearest_index(fixed_pos);
  const std::int64_t cells = std::int64_t{cfg.grid.n} * cfg.grid.n;

  auto make_pairing = [&](const std::string& name, int arm_b) {
    Pairing p;
    p.name = name;
    p.arm_a = 0;
    p.arm_b = arm_b;
    p.layout.axis1 = plan.grid_axis;
    p.layout.axis2 = plan.grid_axis;
    p.layout.row_fixed_index = fixed_index;
    p.layout.surface = cfg.surface == SurfacePolicy::always && cells <= kSurfaceCellLimit;
    p.layout.surface_blocks = p.layout.surface && want_surface_blocks(cfg, cells);
    p.layout.block_size = cfg.block_size;
    return p;
  };
  plan.pairings = {make_pairing("ccd1_ccd2", 1), make_pairing("ccd1_ccd3", 2)};

  collect_chirp_warnings(cfg, plan, plan.warnings);
  return plan;
}

SimulationPlan build_plan(const ScenarioConfig& cfg) {
  return cfg.scheme == Scheme::B ? build_scheme_B(cfg) : build_scheme_A(cfg);
}

RunOutput run_plan(const SimulationPlan& plan, const ScenarioConfig& cfg, int workers,
                   const ProgressFn& progress) {
  const auto t0 = std::chrono::steady_clock::now();
  if (plan.arms.empty() || plan.pairings.empty())
    throw ValidationError("plan has no arms or pairings");
  for (const auto& p : plan.pairings)
    if (p.arm_a < 0 || p.arm_b < 0 || p.arm_a >= static_cast<int>(plan.arms.size()) ||
        p.arm_b >= static_cast<int>(plan.arms.size()))
      throw ValidationError("pairing references a missing arm");
  for (const auto& arm : plan.arms) arm.validate();

  std::vector<CorrelationAccumulator> accs;
  accs.reserve(plan.pairings.size());
  for (const auto& p : plan.pairings) accs.emplace_back(p.layout);

  std::vector<ComplexField> arm_fields(plan.arms.size());
  for (std::int64_t r = 0; r < cfg.ensemble_size; ++r) {
    ComplexField src = sample_speckle(cfg.spectrum, plan.grid_axis,
                                      SeedSpec{cfg.master_seed, static_cast<std::uint64_t>(r)});
    for (size_t a = 0; a < plan.arms.size(); ++a) {
      ComplexField in = src;
      const double s = plan.arm_scales.empty() ? 1.0 : plan.arm_scales[a];
      if (s != 1.0)
        for (Complex& v : in.values) v *= s;
      arm_fields[a] = run_path(in, plan.arms[a], cfg.wavelength);
    }
    for (size_t p = 0; p < plan.pairings.size(); ++p)
      accs[p].accumulate(arm_fields[static_cast<size_t>(plan.pairings[p].arm_a)],
                         arm_fields[static_cast<size_t>(plan.pairings[p].arm_b)], workers);
    if (progress && (r + 1) % 250 == 0) progress(r + 1, cfg.ensemble_size);
  }

  RunOutput out;
  out.warnings = plan.warnings;
  for (size_t p = 0; p < plan.pairings.size(); ++p) {
    out.pairing_names.push_back(plan.pairings[p].name);
    CorrelationResult res = finalize(accs[p]);
    res.master_seed = cfg.master_seed;
    out.results.push_back(std::move(res));
  }
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

SliceCurve scan_slice(const CorrelationResult& res, int fixed_arm, double fixed_position) {
  if (fixed_arm != 1 && fixed_arm != 2) throw ValidationError("fixed arm must be 1 or 2");
  const Axis& fixed_axis = fixed_arm == 1 ? res.axis1 : res.axis2;
  if (fixed_position < fixed_axis.front() - 0.5 * fixed_axis.dx ||
      fixed_position > fixed_axis.back() + 0.5 * fixed_axis.dx)
    throw ValidationError("fixed position outside the detector axis");
  const int idx = fixed_axis.nearest_index(fixed_position);
  const double snapped = fixed_axis.coord(idx);

  if (fixed_arm == 1 && res.has_row && res.row.fixed_position == snapped) return res.row;
  if (fixed_arm == 2 && res.has_col && res.col.fixed_position == snapped) return res.col;

  if (!res.has_surface)
    throw ValidationError("no accumulated slice at that position and no surface to scan");

  SliceCurve sc;
  sc.name = fixed_arm == 1 ? "row" : "col";
  sc.axis = fixed_arm == 1 ? res.axis2 : res.axis1;
  sc.fixed_position = snapped;
  const int n = sc.axis.n;
  sc.g2.resize(static_cast<size_t>(n));
  sc.se.resize(static_cast<size_t>(n), std::numeric_limits<double>::quiet_NaN());
  sc.g1sq.resize(static_cast<size_t>(n));
  sc.flags.resize(static_cast<size_t>(n));
  const bool have_se = !res.se_surface.empty();
  for (int t = 0; t < n; ++t) {
    const int i = fixed_arm == 1 ? idx : t;
    const int j = fixed_arm == 1 ? t : idx;
    const size_t cell = static_cast<size_t>(i) * static_cast<size_t>(res.axis2.n) +
                        static_cast<size_t>(j);
    sc.g2[static_cast<size_t>(t)] = res.g2_surface[cell];
    sc.g1sq[static_cast<size_t>(t)] = res.g1sq_surface[cell];
    sc.flags[static_cast<size_t>(t)] = res.flags_surface[cell];
    if (have_se) sc.se[static_cast<size_t>(t)] = res.se_surface[cell];
  }
  return sc;
}

}  // namespace ghostsim
