#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "stokeslab/circulation.hpp"
#include "stokeslab/currents.hpp"

using namespace stokeslab;

namespace {

constexpr double pi = std::numbers::pi;

Current unit_square() { return cube_current(CubeSet<2>::full()); }

ExceptionalSet<3> left_edge() { return ExceptionalSet<3>::segment({0.0, 0.0, 0.0}, {0.0, 1.0, 0.0}); }
ExceptionalSet<3> center_point() { return ExceptionalSet<3>::point({0.5, 0.5, 0.0}); }

std::shared_ptr<const HeightField> flat() { return std::make_shared<FlatHeight>(); }
std::shared_ptr<const HeightField> tilted() { return std::make_shared<QuadraticHeight>(0, 1, 0, 0, 0, 0); }

// Length of the quarter-disc-free part of a circle of radius r around the
// center of the unit square (r < 1/2 keeps it inside).
double circle(double r) { return 2.0 * pi * r; }

}  // namespace

TEST(Mass, Examples) {
  EXPECT_EQ(mass(unit_square()).value, 1.0);
  const auto flat_graph = surface_current({0.0, pi, 0.0, 0.5}, flat());
  EXPECT_NEAR(mass(flat_graph).value, pi * 0.5, 1e-14);
  const auto plane = chart_current(CubeSet<2>::full(), tilted());
  const auto m = mass(plane);
  EXPECT_NEAR(m.value, std::sqrt(2.0), 1e-12);
  EXPECT_LE(m.error, 1e-10);
}

TEST(Mass, QuadraticGraphAgainstPolarClosedForm) {
  // psi = (x^2 + y^2) / 2 over the square [-1/2,1/2]^2 is hard in closed form,
  // so compare a paraboloid of revolution over a disc-shaped union instead:
  // check instead the inscribed square bound sqrt(1+|grad|^2) <= L+.
  RootBox<2> root = RootBox<2>::cube({-0.5, -0.5}, 1.0);
  const auto t = chart_current(CubeSet<2>::full(root), std::make_shared<QuadraticHeight>(0, 0, 0, 0.5, 0, 0.5));
  // Independent oracle: fine midpoint rule.
  const int n = 800;
  double s = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double x = -0.5 + (i + 0.5) / n, y = -0.5 + (j + 0.5) / n;
      s += std::sqrt(1.0 + x * x + y * y);
    }
  }
  s /= n * n;
  EXPECT_NEAR(mass(t).value, s, 1e-6);
}

TEST(BoundaryMass, Examples) {
  EXPECT_EQ(boundary_mass(unit_square()).value, 4.0);
  EXPECT_NEAR(boundary_mass(surface_current({0.0, pi, 0.0, 0.5}, flat())).value, 2.0 * pi + 1.0, 1e-13);
  // Tilted plane over the unit square: two edges of length sqrt(2), two of length 1.
  EXPECT_NEAR(boundary_mass(chart_current(CubeSet<2>::full(), tilted())).value, 2.0 + 2.0 * std::sqrt(2.0), 1e-12);
}

TEST(Restrict, Examples) {
  const auto left = CubeSet<2>::full().clip(0, 0.5, true);
  const auto t = restrict(unit_square(), left);
  EXPECT_EQ(mass(t).value, 0.5);
  EXPECT_EQ(boundary_mass(t).value, 3.0);
  EXPECT_EQ(mass(restrict(unit_square(), CubeSet<2>::full())).value, 1.0);
  EXPECT_TRUE(is_zero(restrict(unit_square(), CubeSet<2>())));
  EXPECT_EQ(mass(restrict(unit_square(), CubeSet<2>())).value, 0.0);
}

TEST(Restrict, HalfSpaceAtNonDyadicHeight) {
  const auto t = restrict(unit_square(), HalfSpace{1, 1.0 / 3.0, true});
  EXPECT_NEAR(mass(t).value, 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(boundary_mass(t).value, 2.0 + 2.0 / 3.0, 1e-15);
}

TEST(Restrict, TransitivityOnCubeSets) {
  std::mt19937_64 rng(12);
  auto random_set = [&] {
    std::vector<DyadicCube<2>> cubes;
    for (int i = 0; i < 8; ++i) {
      const int g = std::uniform_int_distribution<int>(1, 4)(rng);
      std::uniform_int_distribution<std::int64_t> c(0, (1 << g) - 1);
      cubes.push_back(make_cube<2>(g, {c(rng), c(rng)}));
    }
    return CubeSet<2>(RootBox<2>::unit(), cubes);
  };
  for (int i = 0; i < 50; ++i) {
    const auto a = random_set();
    const auto b = random_set();
    const auto lhs = restrict(restrict(unit_square(), a), b);
    const auto rhs = restrict(unit_square(), a.intersect(b));
    EXPECT_EQ(domain_of(lhs), domain_of(rhs));
    EXPECT_EQ(mass(lhs).value, mass(rhs).value);
    // boundary additivity: M(d(S + S')) <= M(dS) + M(dS')
    const auto [s, r] = split(unit_square(), a);
    EXPECT_LE(boundary_mass(unit_square()).value, boundary_mass(s).value + boundary_mass(r).value);
  }
}

TEST(MassAdditivity, Examples) {
  EXPECT_TRUE(mass_additivity_check(unit_square(), CubeSet<2>::full().clip(0, 0.5, true)).holds);
  EXPECT_TRUE(mass_additivity_check(unit_square(), CubeSet<2>()).holds);
  const auto q = chart_current(CubeSet<2>::full(), std::make_shared<QuadraticHeight>(0, 0.3, -0.2, 1.0, 0.5, -0.7));
  EXPECT_TRUE(mass_additivity_check(q, HalfSpace{1, 0.37, true}).holds);
}

TEST(Pushforward, Bounds) {
  const auto f = pushforward_mass_bounds(chart_current(CubeSet<2>::full(), flat()));
  EXPECT_EQ(f.lower, 1.0);
  EXPECT_EQ(f.upper, 1.0);
  EXPECT_TRUE(f.holds);
  const auto t = pushforward_mass_bounds(chart_current(CubeSet<2>::full(), tilted()));
  EXPECT_NEAR(t.lower, 1.0, 1e-15);
  EXPECT_NEAR(t.upper, 2.0, 1e-15);
  EXPECT_TRUE(t.holds);
  const auto tripled = pushforward_mass_bounds(chart_current(CubeSet<2>::full(), tilted(), 3));
  EXPECT_NEAR(tripled.mass.value, 3.0 * t.mass.value, 1e-12);
  EXPECT_NEAR(tripled.upper, 3.0 * t.upper, 1e-15);
}

TEST(Orientation, TiltedPlaneUnitNormal) {
  const auto t = Current{chart_current(CubeSet<2>::full(), tilted())};
  const auto o = orientation(t, {0.3, 0.3});
  EXPECT_NEAR(o.norm(), 1.0, 1e-15);
  // (1,0,1) ^ (0,1,0) = e12 - e23 (basis e12, e13, e23), normalised
  EXPECT_NEAR(o[0], 1.0 / std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(o[2], -1.0 / std::sqrt(2.0), 1e-15);
  // restriction inherits the orientation
  const auto r = restrict(t, HalfSpace{0, 0.5, true});
  EXPECT_EQ(orientation(r, {0.3, 0.3}), o);
}

TEST(Diameter, ChartBoundsBracketTruth) {
  const auto t = chart_current(CubeSet<2>::full(), tilted());
  const auto d = diameter_bounds(t);
  EXPECT_LE(d.lower, std::sqrt(3.0) + 1e-12);
  EXPECT_GE(d.upper, std::sqrt(3.0));
  EXPECT_NEAR(d.lower, std::sqrt(3.0), 1e-12);
}

TEST(Slice, LeftEdgeIsVerticalSegment) {
  const auto s = slice(unit_square(), left_edge(), 0.5);
  EXPECT_NEAR(s.mass.value, 1.0, 1e-14);
  EXPECT_EQ(s.radius, 0.5);
}

TEST(Slice, CenterPointCircleAndClippedArcs) {
  EXPECT_NEAR(slice(unit_square(), center_point(), 0.3).mass.value, circle(0.3), 1e-12);
  // r = 0.6: four arcs inside the square, each of angle pi/2 - 2 acos(0.5/0.6).
  const double r = 0.6;
  const double inside = 4.0 * r * (pi / 2.0 - 2.0 * std::acos(0.5 / r));
  EXPECT_NEAR(slice(unit_square(), center_point(), r).mass.value, inside, 1e-12);
  EXPECT_EQ(slice(unit_square(), center_point(), 2.0).mass.value, 0.0);
}

TEST(Slice, NonRegularRadiusIsPerturbed) {
  // dist from the center to a corner is sqrt(1/2): a vertex lies on the level set.
  const auto s = slice(unit_square(), center_point(), std::sqrt(0.5));
  EXPECT_NE(s.radius, s.requested);
  EXPECT_NEAR(s.radius, s.requested, 1e-6);
}

TEST(Slice, SubcurrentSlicesAdd) {
  const auto a = CubeSet<2>::full().clip(0, 0.25, false).clip(1, 0.5, true);
  const auto [s, r] = split(unit_square(), a);
  for (double rad : {0.13, 0.31, 0.47, 0.66}) {
    const double whole = slice(unit_square(), center_point(), rad).mass.value;
    const double parts = slice(s, center_point(), rad).mass.value + slice(r, center_point(), rad).mass.value;
    EXPECT_NEAR(parts, whole, 1e-9) << rad;
  }
}

TEST(Slice, ZAxisSegmentActsThroughThePlane) {
  // E = vertical segment above the center at height >= 0.1: level sets are
  // circles of radius sqrt(r^2 - 0.01).
  const auto e = ExceptionalSet<3>::segment({0.5, 0.5, 0.1}, {0.5, 0.5, 1.0});
  EXPECT_NEAR(slice(unit_square(), e, 0.2).mass.value, 2.0 * pi * std::sqrt(0.03), 1e-12);
  EXPECT_EQ(slice(unit_square(), e, 0.05).mass.value, 0.0);
}

TEST(Neighborhood, AreasMatchClosedForms) {
  EXPECT_NEAR(neighborhood_mass(unit_square(), center_point(), 0.3).value, pi * 0.09, 1e-11);
  EXPECT_NEAR(neighborhood_mass(unit_square(), left_edge(), 0.25).value, 0.25, 1e-12);
  const auto mid = ExceptionalSet<3>::segment({0.5, 0.0, 0.0}, {0.5, 1.0, 0.0});
  EXPECT_NEAR(neighborhood_mass(unit_square(), mid, 0.1).value, 0.2, 1e-12);
  // Disc clipped by the square: r = 0.6 around the center.
  const double r = 0.6, c = 0.5;
  const double t = std::acos(c / r);
  const double segment = r * r * (t - std::sin(t) * std::cos(t));  // area beyond one side
  EXPECT_NEAR(neighborhood_mass(unit_square(), center_point(), r).value, pi * r * r - 4.0 * segment, 1e-11);
}

TEST(Coarea, ThreeFlatExamples) {
  std::vector<double> radii;
  for (int i = 0; i <= 200; ++i) radii.push_back(1e-3 + 0.998 * i / 200.0);
  const auto edge = coarea_slice_check(unit_square(), left_edge(), radii);
  EXPECT_TRUE(edge.holds);
  EXPECT_NEAR(edge.integral, 0.998, 1e-9);
  const auto pt = coarea_slice_check(unit_square(), center_point(), radii);
  EXPECT_TRUE(pt.holds);
  EXPECT_NEAR(pt.integral, 1.0, 2e-3);
}

TEST(Excision, MassAndBoundary) {
  CubeCurrent c = cube_current(CubeSet<2>::full());
  c.excision = Excision{center_point(), 0.15};
  const Current t = c;
  EXPECT_NEAR(mass(t).value, 1.0 - pi * 0.0225, 1e-11);
  EXPECT_NEAR(boundary_mass(t).value, 4.0 + 2.0 * pi * 0.15, 1e-12);
}

TEST(Circulation, Examples) {
  const auto xdy = x_dy<3>();
  EXPECT_NEAR(circulation(xdy, unit_square()).value, 1.0, 1e-14);
  FormField<3> dy;
  dy.eval = [](const Point3&) { return KCovector<3>::unit(1); };
  EXPECT_NEAR(circulation(dy, unit_square()).value, 0.0, 1e-14);
  // Excised square: Green gives area(A) - area(disc).
  CubeCurrent c = cube_current(CubeSet<2>::full());
  c.excision = Excision{center_point(), 0.2};
  EXPECT_NEAR(circulation(xdy, c).value, 1.0 - pi * 0.04, 1e-12);
  // Negative multiplicity flips the sign.
  EXPECT_NEAR(circulation(xdy, cube_current(CubeSet<2>::full(), -2)).value, -2.0, 1e-14);
}

TEST(Circulation, ChartMatchesSurfaceIntegralOfDifferential) {
  // omega = x dy + z dx on the graph of psi = x y over the unit square:
  // the pull-back is x dy + x y dx, whose differential is (1 - x) dx ^ dy.
  std::array<std::vector<Monomial>, 3> c{};
  c[0] = {{1.0, {0, 0, 1}}};
  c[1] = {{1.0, {1, 0, 0}}};
  const auto omega = polynomial_one_form<3>(c);
  const auto t = chart_current(CubeSet<2>::full(), std::make_shared<QuadraticHeight>(0, 0, 0, 0, 1, 0));
  EXPECT_NEAR(circulation(omega, t).value, 0.5, 1e-12);
}

TEST(Circulation, BoundedBySupTimesBoundaryMass) {
  const auto xdy = x_dy<3>();
  const auto t = restrict(unit_square(), CubeSet<2>::full().clip(1, 0.75, true));
  EXPECT_LE(std::abs(circulation(xdy, t).value), boundary_sup_norm(xdy, t) * boundary_mass(t).value);
}
