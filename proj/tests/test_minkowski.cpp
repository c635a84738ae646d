#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "stokeslab/counterexample.hpp"
#include "stokeslab/minkowski.hpp"

using namespace stokeslab;

namespace {

Current unit_square(int multiplicity = 1) { return cube_current(CubeSet<2>::full(), multiplicity); }

ExceptionalSet<3> midline() { return ExceptionalSet<3>::segment({0.5, 0.0, 0.0}, {0.5, 1.0, 0.0}); }

}  // namespace

TEST(Content, InteriorSegmentIsBoundedByItsLength) {
  // the tube of radius r around the midline meets the square in a 2r x 1 band
  const auto p = intrinsic_content(unit_square(), midline(), 0.4, 0.5, 12);
  EXPECT_EQ(p.trend, ContentTrend::Bounded);
  for (double v : p.values) EXPECT_NEAR(v, 1.0, 1e-3);
  EXPECT_NEAR(p.sup, 1.0, 1e-3);
  EXPECT_TRUE(hausdorff_comparison_check(p, 1.0).holds);
}

TEST(Content, EdgeSegmentSeesOneSide) {
  const auto e = ExceptionalSet<3>::segment({0.0, 0.0, 0.0}, {0.0, 1.0, 0.0});
  const auto p = intrinsic_content(unit_square(), e, 0.4, 0.5, 10);
  EXPECT_EQ(p.trend, ContentTrend::Bounded);
  for (double v : p.values) EXPECT_NEAR(v, 0.5, 1e-3);
}

TEST(Content, PointVanishes) {
  const auto p = intrinsic_content(unit_square(), ExceptionalSet<3>::point({0.5, 0.5, 0.0}), 0.4, 0.5, 12);
  EXPECT_EQ(p.trend, ContentTrend::Vanishing);
  // disc of radius r: pi r^2 / (2 r)
  for (std::size_t i = 0; i < p.values.size(); ++i) {
    EXPECT_NEAR(p.values[i], std::numbers::pi * p.radii[i] / 2.0, 1e-9) << i;
  }
}

TEST(Content, NeighbourhoodMassIsMonotoneInRadius) {
  const auto e = ExceptionalSet<3>::box({0.2, 0.3, 0.0}, {0.4, 0.3, 0.0});
  double prev = 0.0;
  for (int i = 1; i <= 40; ++i) {
    const double m = neighborhood_mass(unit_square(), e, 0.01 * i).value;
    EXPECT_GE(m, prev - 1e-12);
    prev = m;
  }
}

TEST(Content, ScalesWithMultiplicity) {
  const auto one = intrinsic_content(unit_square(1), midline(), 0.3, 0.5, 6);
  const auto three = intrinsic_content(unit_square(-3), midline(), 0.3, 0.5, 6);
  for (std::size_t i = 0; i < one.values.size(); ++i) EXPECT_NEAR(three.values[i], 3.0 * one.values[i], 1e-12);
}

TEST(Content, RejectsBadGrids) {
  EXPECT_THROW(intrinsic_content(unit_square(), midline(), 0.4, 1.0, 5), DomainError);
  EXPECT_THROW(intrinsic_content(unit_square(), midline(), -1.0, 0.5, 5), DomainError);
  EXPECT_THROW(intrinsic_content(unit_square(), midline(), 5.0, 0.5, 5), DomainError);
}

TEST(Content, EmptySetIsDisposable) {
  const auto d = disposability_evidence(unit_square(), ExceptionalSet<3>{});
  EXPECT_TRUE(d.certified);
}

TEST(Content, OscillatingSurfaceDivergesAtTheDerivedRate) {
  const auto m = std::make_shared<const SurfaceModel>(SurfaceParams{});
  const Current t = surface_of(m);
  const auto e = m->singular_set();
  const auto p3 = intrinsic_content(t, e, 0.4, 1.0 / 3.0, 18);
  // 14 steps keep the 1/5 grid above the truncation scale y_inf - y_K
  const auto p5 = intrinsic_content(t, e, 0.4, 0.2, 14);
  EXPECT_EQ(p3.trend, ContentTrend::Divergent);
  EXPECT_EQ(p5.trend, ContentTrend::Divergent);
  // strip areas shrink by a h / lambda while the radii shrink by a
  const SurfaceParams sp;
  const double oracle = 1.0 - std::log(sp.a * sp.h * sp.inv_lambda) / std::log(sp.a);
  EXPECT_NEAR(p3.exponent, oracle, 0.1 * oracle);
  EXPECT_NEAR(p5.exponent, oracle, 0.1 * oracle);
  EXPECT_NEAR(p3.exponent, p5.exponent, 0.1 * p3.exponent);
  const auto d = disposability_evidence(t, e);
  EXPECT_FALSE(d.certified);
}
