#include <doctest.h>

#include <cmath>

#include "ghostsim/config.hpp"
#include "ghostsim/csvio.hpp"
#include "ghostsim/errors.hpp"
#include "ghostsim/scenario.hpp"

using namespace ghostsim;

namespace {

/// Reduced-size scheme B description that still resolves the masks.
ScenarioConfig small_scheme_b() {
  ScenarioConfig cfg;
  cfg.scheme = Scheme::B;
  cfg.grid = {256, 8e-6};
  cfg.spectrum = SpectrumModel::from_coherence_length(1.0, 9e-6, 0.5e-3);
  cfg.ensemble_size = 60;
  cfg.master_seed = 4242;
  cfg.block_size = 20;
  return cfg;
}

}  // namespace

TEST_CASE("scheme B plan: symmetric arms, both slices, pooled delta") {
  const ScenarioConfig cfg = small_scheme_b();
  const SimulationPlan plan = build_scheme_B(cfg);
  REQUIRE(plan.arms.size() == 2);
  CHECK(plan.arms[0].total_distance() == doctest::Approx(0.42));
  CHECK(plan.arms[1].total_distance() == doctest::Approx(0.42));
  // slit planes symmetric about the splitter: equal source-to-mask distances
  CHECK(plan.arms[0].elements[0].distance == plan.arms[1].elements[0].distance);
  REQUIRE(plan.pairings.size() == 1);
  const AccumulatorLayout& lay = plan.pairings[0].layout;
  CHECK(lay.row_fixed_index == plan.grid_axis.nearest_index(0.0));
  CHECK(lay.col_fixed_index == plan.grid_axis.nearest_index(0.0));
  CHECK(lay.pooled_delta);
  CHECK(lay.surface);
}

TEST_CASE("scheme A plan: three arms, two pairings, fixed test detector") {
  ScenarioConfig cfg;
  cfg.scheme = Scheme::A;
  cfg.grid = {256, 8e-6};
  cfg.ensemble_size = 50;
  const SimulationPlan plan = build_scheme_A(cfg);
  REQUIRE(plan.arms.size() == 3);
  // source to CCD1 through the mask totals 30 cm
  CHECK(plan.arms[0].total_distance() == doctest::Approx(0.30));
  // CCD2 sits at the mask-symmetric distance
  CHECK(plan.arms[1].total_distance() == doctest::Approx(cfg.scheme_a.source_to_mask));
  CHECK(plan.arms[2].total_distance() == doctest::Approx(0.44));
  REQUIRE(plan.pairings.size() == 2);
  CHECK(plan.pairings[0].name == "ccd1_ccd2");
  CHECK(plan.pairings[1].name == "ccd1_ccd3");
  for (const auto& p : plan.pairings) {
    CHECK(p.arm_a == 0);
    CHECK(p.layout.row_fixed_index == plan.grid_axis.nearest_index(0.0));
  }

  ScenarioConfig bad = cfg;
  bad.scheme_a.source_to_ccd3 = -0.1;
  CHECK_THROWS_AS(build_scheme_A(bad), ValidationError);
}

TEST_CASE("run_plan output is bit-identical across worker counts") {
  const ScenarioConfig cfg = small_scheme_b();
  const SimulationPlan plan = build_scheme_B(cfg);

  const RunOutput r1 = run_plan(plan, cfg, 1);
  const RunOutput r4 = run_plan(plan, cfg, 4);
  const RunOutput r8 = run_plan(plan, cfg, 8);

  const std::map<std::string, std::string> meta = {{"seed", "4242"}};
  const std::string csv1 = slice_csv_text(r1.results[0].row, {}, meta);
  const std::string csv4 = slice_csv_text(r4.results[0].row, {}, meta);
  const std::string csv8 = slice_csv_text(r8.results[0].row, {}, meta);
  CHECK(csv1 == csv4);
  CHECK(csv1 == csv8);

  const std::string d1 = slice_csv_text(r1.results[0].delta, {}, meta);
  const std::string d8 = slice_csv_text(r8.results[0].delta, {}, meta);
  CHECK(d1 == d8);
}

TEST_CASE("a two-realization ensemble runs and carries wide errors") {
  ScenarioConfig cfg = small_scheme_b();
  cfg.ensemble_size = 2;
  const RunOutput out = run_plan(build_scheme_B(cfg), cfg, 1);
  REQUIRE(out.results.size() == 1);
  CHECK(out.results[0].count == 2);
  // jackknife over a single block cannot produce errors: flagged as NaN
  bool any_nan_se = false;
  for (double se : out.results[0].row.se) any_nan_se |= std::isnan(se);
  CHECK(any_nan_se);
}

TEST_CASE("scheme A single pass feeds both pairings from the same realizations") {
  ScenarioConfig cfg;
  cfg.scheme = Scheme::A;
  cfg.grid = {256, 8e-6};
  cfg.spectrum = SpectrumModel::from_coherence_length(1.0, 9e-6, 0.5e-3);
  cfg.ensemble_size = 40;
  cfg.master_seed = 7;
  const SimulationPlan plan = build_scheme_A(cfg);
  const RunOutput out = run_plan(plan, cfg, 2);
  REQUIRE(out.results.size() == 2);
  CHECK(out.results[0].count == out.results[1].count);
  // arm 1 is shared: identical mean intensity at the fixed detector
  for (size_t i = 0; i < out.results[0].mean_i1.size(); ++i)
    CHECK(out.results[0].mean_i1[i] == out.results[1].mean_i1[i]);
}

TEST_CASE("scan_slice returns stored slices and surface fallbacks") {
  const ScenarioConfig cfg = small_scheme_b();
  const RunOutput out = run_plan(build_scheme_B(cfg), cfg, 2);
  const CorrelationResult& res = out.results[0];

  const SliceCurve row = scan_slice(res, 1, 0.0);
  CHECK(row.fixed_position == res.row.fixed_position);
  CHECK(row.g2 == res.row.g2);
  CHECK(row.se == res.row.se);  // jackknifed slice

  // off the accumulated position: served from the surface, no per-point SE
  const SliceCurve off = scan_slice(res, 1, 12 * cfg.grid.dx);
  CHECK(off.fixed_position == doctest::Approx(12 * cfg.grid.dx));
  bool all_nan = true;
  for (double se : off.se) all_nan &= std::isnan(se);
  CHECK(all_nan);
  // consistent with the surface row
  const int i = res.axis1.nearest_index(12 * cfg.grid.dx);
  for (int j = 0; j < res.axis2.n; j += 17)
    CHECK(off.g2[static_cast<size_t>(j)] == res.g2_at(i, j));

  CHECK_THROWS_AS(scan_slice(res, 1, 1.0), ValidationError);
  CHECK_THROWS_AS(scan_slice(res, 3, 0.0), ValidationError);

  // symmetric double/double: the two slice directions mirror within errors
  const SliceCurve col = scan_slice(res, 2, 0.0);
  const int n = res.axis1.n;
  for (int j = 4; j < n - 4; j += 13) {
    const double se = std::hypot(res.row.se[static_cast<size_t>(j)],
                                 col.se[static_cast<size_t>(j)]);
    if (!std::isfinite(se)) continue;
    CHECK(std::abs(res.row.g2[static_cast<size_t>(j)] - col.g2[static_cast<size_t>(j)]) <
          6.0 * se);
  }
}

TEST_CASE("pooled delta slice is even for the symmetric configuration") {
  ScenarioConfig cfg = small_scheme_b();
  cfg.ensemble_size = 300;
  const RunOutput out = run_plan(build_scheme_B(cfg), cfg, 2);
  const SliceCurve& delta = out.results[0].delta;
  const int n = delta.axis.n;
  // compare +offset against -offset bins
  for (int t = n / 2 + 4; t < n - 8; t += 11) {
    const int mirrored = n - t - (n % 2 == 0 ? 0 : 1);
    if (mirrored < 0 || mirrored >= n) continue;
    const double a = delta.g2[static_cast<size_t>(t)];
    const double b = delta.g2[static_cast<size_t>(mirrored)];
    const double se = std::hypot(delta.se[static_cast<size_t>(t)],
                                 delta.se[static_cast<size_t>(mirrored)]);
    if (!std::isfinite(se) || se == 0.0) continue;
    CHECK(std::abs(a - b) < 6.0 * se);
  }
}
