#include <doctest.h>

#include <cmath>

#include "ghostsim/correlation.hpp"
#include "ghostsim/errors.hpp"
#include "ghostsim/speckle.hpp"

using namespace ghostsim;

namespace {

AccumulatorLayout small_layout(const Axis& a, bool surface = true) {
  AccumulatorLayout lay;
  lay.axis1 = a;
  lay.axis2 = a;
  lay.surface = surface;
  lay.surface_blocks = surface;
  lay.row_fixed_index = a.nearest_index(0.0);
  lay.col_fixed_index = a.nearest_index(0.0);
  lay.pooled_delta = true;
  lay.block_size = 25;
  return lay;
}

ComplexField speckle_at(const Axis& a, std::uint64_t seed, std::uint64_t index) {
  const SpectrumModel spec = SpectrumModel::from_coherence_length(1.0, 6e-6);
  return sample_speckle(spec, a, SeedSpec{seed, index});
}

}  // namespace

TEST_CASE("accumulating zero fields changes only the count") {
  const Axis a = make_axis(16, 2e-6, 0.0);
  CorrelationAccumulator acc(small_layout(a));
  acc.accumulate(ComplexField(a), ComplexField(a));
  CHECK(acc.count() == 1);
  const BlockSums t = acc.totals();
  for (double v : t.i1) CHECK(v == 0.0);
  for (double v : t.row) CHECK(v == 0.0);
}

TEST_CASE("single accumulation reproduces the raw product") {
  const Axis a = make_axis(16, 2e-6, 0.0);
  AccumulatorLayout lay = small_layout(a);
  CorrelationAccumulator acc(lay);
  const ComplexField e1 = speckle_at(a, 11, 0);
  const ComplexField e2 = speckle_at(a, 11, 1);
  acc.accumulate(e1, e2);
  const BlockSums t = acc.totals();
  const size_t i0 = static_cast<size_t>(lay.row_fixed_index);
  for (int j = 0; j < a.n; ++j)
    CHECK(t.row[static_cast<size_t>(j)] ==
          doctest::Approx(std::norm(e1.values[i0]) * std::norm(e2.values[static_cast<size_t>(j)]))
              .epsilon(1e-12));
}

TEST_CASE("accumulation order only reassociates sums") {
  const Axis a = make_axis(16, 2e-6, 0.0);
  CorrelationAccumulator fwd(small_layout(a));
  CorrelationAccumulator rev(small_layout(a));
  std::vector<ComplexField> fields;
  for (int r = 0; r < 10; ++r) fields.push_back(speckle_at(a, 5, static_cast<std::uint64_t>(r)));
  for (int r = 0; r < 5; ++r) fwd.accumulate(fields[static_cast<size_t>(2 * r)],
                                             fields[static_cast<size_t>(2 * r + 1)]);
  for (int r = 4; r >= 0; --r) rev.accumulate(fields[static_cast<size_t>(2 * r)],
                                              fields[static_cast<size_t>(2 * r + 1)]);
  const BlockSums tf = fwd.totals();
  const BlockSums tr = rev.totals();
  for (size_t k = 0; k < tf.surf.size(); ++k) {
    const double scale = std::abs(tf.surf[k]) + 1e-300;
    CHECK(std::abs(tf.surf[k] - tr.surf[k]) / scale < 1e-12);
  }
}

TEST_CASE("merge is a commutative monoid over disjoint realization ranges") {
  const Axis a = make_axis(12, 2e-6, 0.0);
  AccumulatorLayout lay = small_layout(a);
  lay.block_size = 4;

  // serial reference over 11 realizations
  CorrelationAccumulator serial(lay);
  for (int r = 0; r < 11; ++r)
    serial.accumulate(speckle_at(a, 7, static_cast<std::uint64_t>(2 * r)),
                      speckle_at(a, 7, static_cast<std::uint64_t>(2 * r + 1)));

  // three chunks with matching global start offsets
  auto chunk = [&](std::int64_t start, std::int64_t count) {
    AccumulatorLayout l = lay;
    l.start_index = start;
    CorrelationAccumulator acc(l);
    for (std::int64_t r = start; r < start + count; ++r)
      acc.accumulate(speckle_at(a, 7, static_cast<std::uint64_t>(2 * r)),
                     speckle_at(a, 7, static_cast<std::uint64_t>(2 * r + 1)));
    return acc;
  };
  CorrelationAccumulator c0 = chunk(0, 3), c1 = chunk(3, 5), c2 = chunk(8, 3);

  const CorrelationAccumulator left = merge(merge(c0, c1), c2);
  const CorrelationAccumulator right = merge(c0, merge(c1, c2));
  const CorrelationAccumulator swapped = merge(merge(c2, c0), c1);
  CHECK(left.count() == 11);
  CHECK(right.count() == 11);

  const BlockSums ts = serial.totals();
  for (const CorrelationAccumulator* m : {&left, &right, &swapped}) {
    const BlockSums tm = m->totals();
    REQUIRE(tm.count == ts.count);
    for (size_t k = 0; k < ts.surf.size(); ++k) {
      const double scale = std::abs(ts.surf[k]) + 1e-300;
      CHECK(std::abs(tm.surf[k] - ts.surf[k]) / scale < 1e-12);
    }
    // identical block partitioning as the serial feed
    REQUIRE(m->blocks().size() == serial.blocks().size());
    for (size_t b = 0; b < serial.blocks().size(); ++b)
      CHECK(m->blocks()[b].count == serial.blocks()[b].count);
  }

  // merge with an empty accumulator is the identity
  const CorrelationAccumulator empty{lay};
  const CorrelationAccumulator same = merge(serial, empty);
  CHECK(same.count() == serial.count());
}

TEST_CASE("worker count does not change the accumulated bits") {
  const Axis a = make_axis(64, 2e-6, 0.0);
  AccumulatorLayout lay = small_layout(a);
  CorrelationAccumulator w1(lay), w4(lay);
  for (int r = 0; r < 8; ++r) {
    const ComplexField e1 = speckle_at(a, 3, static_cast<std::uint64_t>(2 * r));
    const ComplexField e2 = speckle_at(a, 3, static_cast<std::uint64_t>(2 * r + 1));
    w1.accumulate(e1, e2, 1);
    w4.accumulate(e1, e2, 4);
  }
  const BlockSums t1 = w1.totals();
  const BlockSums t4 = w4.totals();
  for (size_t k = 0; k < t1.surf.size(); ++k) CHECK(t1.surf[k] == t4.surf[k]);
  for (size_t k = 0; k < t1.surf_e.size(); ++k) CHECK(t1.surf_e[k] == t4.surf_e[k]);
}

TEST_CASE("independent arms normalize to g2 = 1, identical arms to 2 at x1 = x2") {
  const Axis a = make_axis(24, 3e-6, 0.0);
  AccumulatorLayout lay = small_layout(a);
  lay.block_size = 100;

  CorrelationAccumulator indep(lay), ident(lay);
  const int n_real = 6000;
  for (int r = 0; r < n_real; ++r) {
    const ComplexField e1 = speckle_at(a, 100, static_cast<std::uint64_t>(r));
    const ComplexField e2 = speckle_at(a, 200, static_cast<std::uint64_t>(r));
    indep.accumulate(e1, e2);
    ident.accumulate(e1, e1);
  }

  const CorrelationResult ri = finalize(indep);
  for (int i = 0; i < a.n; i += 5)
    for (int j = 0; j < a.n; j += 5) {
      const double se = ri.se_at(i, j);
      REQUIRE(se > 0.0);
      CHECK(std::abs(ri.g2_at(i, j) - 1.0) < 5.0 * se);
    }

  const CorrelationResult rs = finalize(ident);
  for (int i = 0; i < a.n; i += 5) {
    const double se = rs.se_at(i, i);
    CHECK(std::abs(rs.g2_at(i, i) - 2.0) < 5.0 * se);
  }

  // swapping identical arms mirrors the surface
  for (int i = 0; i < a.n; i += 7)
    for (int j = 0; j < a.n; j += 7)
      CHECK(rs.g2_at(i, j) == doctest::Approx(rs.g2_at(j, i)).epsilon(1e-12));
}

TEST_CASE("g2 is invariant under a global intensity scale") {
  const Axis a = make_axis(16, 2e-6, 0.0);
  AccumulatorLayout lay = small_layout(a);
  CorrelationAccumulator base(lay), scaled(lay);
  const double c = 3.7;
  for (int r = 0; r < 300; ++r) {
    ComplexField e1 = speckle_at(a, 8, static_cast<std::uint64_t>(2 * r));
    ComplexField e2 = speckle_at(a, 8, static_cast<std::uint64_t>(2 * r + 1));
    base.accumulate(e1, e2);
    for (auto& v : e1.values) v *= c;
    for (auto& v : e2.values) v *= c;
    scaled.accumulate(e1, e2);
  }
  const CorrelationResult rb = finalize(base);
  const CorrelationResult rc = finalize(scaled);
  for (int i = 0; i < a.n; ++i)
    for (int j = 0; j < a.n; ++j)
      CHECK(std::abs(rc.g2_at(i, j) - rb.g2_at(i, j)) < 1e-12 * std::abs(rb.g2_at(i, j)));
}

TEST_CASE("finalize rejects starved or dark inputs") {
  const Axis a = make_axis(8, 2e-6, 0.0);
  CorrelationAccumulator acc(small_layout(a));
  acc.accumulate(speckle_at(a, 1, 0), speckle_at(a, 1, 1));
  CHECK_THROWS_AS(finalize(acc), ValidationError);  // count < 2

  CorrelationAccumulator dark(small_layout(a));
  dark.accumulate(ComplexField(a), ComplexField(a));
  dark.accumulate(ComplexField(a), ComplexField(a));
  CHECK_THROWS_AS(finalize(dark), ValidationError);  // all-dark
}

TEST_CASE("siegert residual is small for gaussian ensembles and NaN for degenerate input") {
  const Axis a = make_axis(16, 2e-6, 0.0);
  AccumulatorLayout lay = small_layout(a);
  lay.block_size = 50;
  CorrelationAccumulator acc(lay);
  for (int r = 0; r < 4000; ++r) {
    const ComplexField e = speckle_at(a, 55, static_cast<std::uint64_t>(r));
    acc.accumulate(e, e);
  }
  const CorrelationResult res = finalize(acc);
  REQUIRE(res.has_siegert);
  CHECK(siegert_residual(res) <= 5.0);

  // deterministic constant fields: zero variance, flagged rather than scored
  CorrelationAccumulator degen(lay);
  ComplexField c(a);
  for (auto& v : c.values) v = Complex{1.0, 0.5};
  for (int r = 0; r < 200; ++r) degen.accumulate(c, c);
  const CorrelationResult rd = finalize(degen);
  REQUIRE(rd.has_siegert);
  CHECK(rd.siegert_degenerate);
  CHECK(std::isnan(siegert_residual(rd)));
}

TEST_CASE("axis mismatch is rejected") {
  const Axis a = make_axis(16, 2e-6, 0.0);
  const Axis b = make_axis(16, 3e-6, 0.0);
  CorrelationAccumulator acc(small_layout(a));
  CHECK_THROWS_AS(acc.accumulate(ComplexField(b), ComplexField(a)), ValidationError);

  AccumulatorLayout other = small_layout(b);
  CorrelationAccumulator acc_b(other);
  CHECK_THROWS_AS(merge(acc, acc_b), ValidationError);
}
