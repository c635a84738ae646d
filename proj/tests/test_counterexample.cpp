#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "stokeslab/counterexample.hpp"
#include "stokeslab/cylindrical.hpp"

using namespace stokeslab;

namespace {

constexpr double pi = std::numbers::pi;

std::shared_ptr<const SurfaceModel> model(SurfaceParams p = {}) { return std::make_shared<const SurfaceModel>(p); }

// Length of x -> (x, B sin(n x) / n) over [0, pi] for integer n: the
// substitution u = n x folds it onto one copy of int_0^pi sqrt(1 + B^2 cos^2 u).
double sine_length(double b) { return 2.0 * std::sqrt(1.0 + b * b) * std::comp_ellint_2(b / std::sqrt(1.0 + b * b)); }

double dot3(const Point3& a, const Point3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

}  // namespace

TEST(SurfaceParams, DefaultsSatisfyAllConditions) {
  const SurfaceParams p;
  EXPECT_TRUE(p.area_flag());
  EXPECT_TRUE(p.length_flag());
  EXPECT_TRUE(p.continuity_flag());
  EXPECT_TRUE(p.violations().empty());
  EXPECT_NEAR(p.y_inf(), 0.5, 1e-15);
  EXPECT_NEAR(p.y(1), 1.0 / 3.0, 1e-15);
  EXPECT_EQ(p.truncation(), 25);
}

TEST(SurfaceParams, HalfFrequencyViolatesAndIsRefused) {
  SurfaceParams p;
  p.inv_lambda = 2;
  EXPECT_FALSE(p.length_flag());
  EXPECT_FALSE(p.continuity_flag());
  EXPECT_TRUE(p.area_flag());
  EXPECT_EQ(p.violations().size(), 2u);
  const auto r = verify_failure(model(p));
  EXPECT_TRUE(r.refused);
  EXPECT_FALSE(r.failure_shown);
  CylindricalModel cyl(p);
  EXPECT_TRUE(verify_cylindrical(cyl, 10).refused);
}

TEST(SurfaceParams, InvalidInputsThrow) {
  EXPECT_THROW(SurfaceModel(SurfaceParams{1.0, 0.3, 4, 0}), DomainError);
  EXPECT_THROW(SurfaceModel(SurfaceParams{0.3, 1.0, 4, 0}), DomainError);
  EXPECT_THROW(SurfaceModel(SurfaceParams{0.3, 0.3, 1, 0}), DomainError);
  EXPECT_THROW(SurfaceModel(SurfaceParams{0.3, 0.3, 4, 61}), DomainError);
}

TEST(Transition, StepProperties) {
  EXPECT_EQ(TransitionFn::step(0.0), 0.0);
  EXPECT_EQ(TransitionFn::step(1.0), 1.0);
  double prev = 0.0;
  for (int i = 1; i < 1000; ++i) {
    const double t = i / 1000.0;
    const double v = TransitionFn::step(t);
    EXPECT_GE(v, prev);
    EXPECT_NEAR(v + TransitionFn::step(1.0 - t), 1.0, 1e-14);
    prev = v;
  }
  const TransitionFn phi;
  for (double s : {0.0, 0.05, 0.125}) EXPECT_EQ(phi(s), 0.0);
  for (double s : {0.875, 0.9, 1.0}) EXPECT_EQ(phi(s), 1.0);
  EXPECT_NEAR(phi(0.5), 0.5, 1e-15);
  EXPECT_LE(phi.max_derivative(), SurfaceModel::kTransitionSlope);
}

TEST(Transition, DerivativeMatchesDifferenceQuotient) {
  const TransitionFn phi;
  for (double s : {0.2, 0.35, 0.5, 0.61, 0.8}) {
    const double h = 1e-6;
    EXPECT_NEAR(phi.derivative(s), (phi(s + h) - phi(s - h)) / (2 * h), 1e-7) << s;
  }
}

TEST(Transition, Cutoff) {
  for (double s : {-1.0, -0.4, 0.0, 0.7, 1.0}) EXPECT_EQ(cutoff(s), 1.0);
  for (double s : {-3.0, -2.0, 2.0, 2.5}) EXPECT_EQ(cutoff(s), 0.0);
  EXPECT_GT(cutoff(1.5), 0.0);
  EXPECT_LT(cutoff(1.5), 1.0);
  EXPECT_NEAR(cutoff(1.5), cutoff(-1.5), 0.0);
}

TEST(Surface, ContinuousAcrossStripBoundaries) {
  const auto m = model();
  for (int k = 1; k < 10; ++k) {
    const double y = m->y_k(k);
    for (double x : {0.1, 0.77, 2.0, 3.0}) {
      const double below = m->value(x, std::nextafter(y, 0.0));
      const double above = m->value(x, y);
      EXPECT_NEAR(below, above, 1e-12 * std::pow(1.0 / 3.0, k - 1) + 1e-15) << k;
      EXPECT_NEAR(above, std::pow(1.0 / 3.0, k) * std::sin(x * std::pow(4.0, k)), 1e-14);
    }
  }
}

TEST(Surface, HeightAndSlopeBounds) {
  const auto m = model();
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> ux(0.0, pi), us(0.0, 1.0);
  for (int i = 0; i < 2000; ++i) {
    const int k = i % 12;
    const double y = m->y_k(k) + us(rng) * m->strip_width(k);
    const double x = ux(rng);
    EXPECT_LE(std::abs(m->value(x, y)), 2.0 * std::pow(1.0 / 3.0, k) + 1e-15);
    EXPECT_LE(std::abs(m->dx(x, y)), m->slope_x_bound(k) * (1 + 1e-12));
    EXPECT_LE(std::abs(m->dy(x, y)), m->slope_y_bound(k) * (1 + 1e-12));
  }
  EXPECT_EQ(m->value(1.0, m->y_inf()), 0.0);
}

TEST(Surface, PartialsMatchDifferenceQuotients) {
  const auto m = model();
  for (int k = 0; k < 6; ++k) {
    const double y = m->y_k(k) + 0.37 * m->strip_width(k);
    const double x = 0.9;
    const double hx = 1e-4 * std::pow(0.25, k), hy = 1e-4 * m->strip_width(k);
    const double fx = (m->value(x + hx, y) - m->value(x - hx, y)) / (2 * hx);
    const double fy = (m->value(x, y + hy) - m->value(x, y - hy)) / (2 * hy);
    EXPECT_NEAR(m->dx(x, y), fx, 1e-6 * (1 + std::abs(fx))) << k;
    EXPECT_NEAR(m->dy(x, y), fy, 1e-6 * (1 + std::abs(fy))) << k;
  }
}

TEST(ArcLength, SectionLengthsMatchEllipticIntegrals) {
  const auto m = model();
  EXPECT_NEAR(section_length(*m, 0.0).value, pi, 1e-13);
  EXPECT_NEAR(section_length(*m, m->y_inf()).value, pi, 1e-13);
  for (int k = 1; k <= 8; ++k) {
    const double b = std::pow(4.0 / 3.0, k);
    const double oracle = sine_length(b);
    EXPECT_NEAR(section_length(*m, m->y_k(k)).value, oracle, 1e-9 * oracle) << k;
    EXPECT_NEAR(m->u_and_du(1.0, m->y_k(k)).length, oracle, 1e-9 * oracle) << k;
  }
  EXPECT_NEAR(sine_length(4.0 / 3.0), 4.2545, 1e-4);
}

TEST(ArcLength, LengthsGrowLikeTheFloor) {
  const auto m = model();
  for (int k = 1; k <= 10; ++k) {
    // 2 sqrt(1 + B^2) E >= 2 B since E >= 1
    EXPECT_GE(section_length(*m, m->y_k(k)).value, 2.0 * std::pow(4.0 / 3.0, k)) << k;
  }
}

TEST(NormalisedArcLength, EndpointsMonotoneAndBottomEdge) {
  const auto m = model();
  for (double y : {0.0, 0.1, 0.3, 0.4, 0.45}) {
    EXPECT_NEAR(m->u_and_du(0.0, y).u, 0.0, 1e-14);
    EXPECT_NEAR(m->u_and_du(pi, y).u, 1.0, 1e-12);
    double prev = -1.0;
    for (int i = 0; i <= 200; ++i) {
      const double u = m->u_and_du(pi * i / 200, y).u;
      EXPECT_GT(u, prev);
      prev = u;
    }
  }
  const auto d = m->u_and_du(1.3, 0.0);
  EXPECT_NEAR(d.du[0], 1.0 / pi, 1e-15);
  EXPECT_NEAR(d.du[1], 0.0, 1e-15);
}

TEST(NormalisedArcLength, DifferentialIsConsistentAndClosed) {
  const auto m = model();
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> ux(0.2, 2.9), us(0.05, 0.95);
  for (int i = 0; i < 60; ++i) {
    const int k = i % 4;
    const double y = m->y_k(k) + us(rng) * m->strip_width(k);
    const double x = ux(rng);
    const double hy = 1e-4 * m->strip_width(k);
    const double hx = 1e-4 * std::pow(0.25, k + 1);
    const auto d = m->u_and_du(x, y);
    const double uy = (m->u_and_du(x, y + hy).u - m->u_and_du(x, y - hy).u) / (2 * hy);
    EXPECT_NEAR(d.du[1], uy, 1e-5 * (1 + std::abs(uy)));
    // d(du) = 0: d_y u_x = d_x u_y
    const double uxy = (m->u_and_du(x, y + hy).du[0] - m->u_and_du(x, y - hy).du[0]) / (2 * hy);
    const double uyx = (m->u_and_du(x + hx, y).du[1] - m->u_and_du(x - hx, y).du[1]) / (2 * hx);
    EXPECT_NEAR(uxy, uyx, 1e-4 * (1 + std::abs(uxy))) << k;
  }
}

TEST(Form, FrameIsOrthonormalAndPositive) {
  const auto m = model();
  for (int k = 0; k < 6; ++k) {
    const double y = m->y_k(k) + 0.5 * m->strip_width(k);
    const auto f = m->tangent_frame(0.7, y);
    EXPECT_NEAR(dot3(f.t1, f.t1), 1.0, 1e-13);
    EXPECT_NEAR(dot3(f.t2, f.t2), 1.0, 1e-13);
    EXPECT_NEAR(dot3(f.t3, f.t3), 1.0, 1e-13);
    EXPECT_NEAR(dot3(f.t1, f.t2), 0.0, 1e-13);
    EXPECT_NEAR(dot3(f.t1, f.t3), 0.0, 1e-13);
    EXPECT_NEAR(dot3(f.t2, f.t3), 0.0, 1e-13);
    EXPECT_NEAR(dot3(cross(f.t1, f.t2), f.t3), 1.0, 1e-13);
  }
}

TEST(Form, VanishesOnTheSingularSetAndPairsWithTheSection) {
  const auto m = model();
  for (double x : {0.0, 1.0, pi}) {
    for (double z : {-0.5, 0.0, 0.5}) EXPECT_EQ(m->omega({x, m->y_inf(), z}).norm(), 0.0);
  }
  EXPECT_EQ(m->omega({1.0, m->y_k(m->strips()), 0.0}).norm(), 0.0);
  // <omega, tau1> = 1 / L(y): the form measures normalised arclength
  for (int k = 0; k < 8; ++k) {
    const double y = m->y_k(k) + 0.3 * m->strip_width(k);
    const double x = 1.1;
    const auto w = m->omega(m->chart(x, y));
    const auto f = m->tangent_frame(x, y);
    EXPECT_NEAR(w[0] * f.t1[0] + w[1] * f.t1[1] + w[2] * f.t1[2], 1.0 / section_length(*m, y).value, 1e-9) << k;
  }
  const auto w0 = m->omega({0.4, 0.0, 0.0});
  EXPECT_NEAR(w0[0], 1.0 / pi, 1e-15);
}

TEST(Form, SectionCirculationIsOne) {
  const auto m = model();
  for (double y : {0.2, m->y_k(3) + 0.5 * m->strip_width(3)}) {
    const int k = m->strip(y);
    const auto br = panel_breaks(0.0, pi, m->length_period(k) / 4);
    const auto r = integrate(
        [&](double x) {
          const auto w = m->omega(m->chart(x, y));
          return w[0] + w[2] * m->dx(x, y);
        },
        br, {1e-9, 1e-10, 400000});
    EXPECT_NEAR(r.value, 1.0, 1e-7) << y;
  }
}

TEST(Area, StripAreasBelowBoundsAndFlatCase) {
  const auto m = model();
  for (int k = 0; k < 10; ++k) {
    const auto a = strip_area(*m, k);
    EXPECT_LE(a.area.value, a.bound);
    EXPECT_GE(a.area.value, pi * m->strip_width(k));  // graph over the strip
  }
  EXPECT_TRUE(std::isfinite(m->tail_area_bound(10)));

  SurfaceParams flat;
  flat.h = 0.0;
  flat.k_max = 12;
  const auto f = model(flat);
  EXPECT_FALSE(flat.length_flag());
  for (int k = 0; k < 12; ++k) EXPECT_NEAR(f->strip_area(k).value, pi * std::pow(1.0 / 3.0, k + 1), 1e-12);
}

TEST(Failure, FullReport) {
  const auto m = model();
  const auto r = verify_failure(m);
  EXPECT_FALSE(r.refused);
  EXPECT_NEAR(r.circulation.value, 1.0, 1e-4);
  EXPECT_LE(r.tangential_max, 1e-3);
  EXPECT_EQ(r.tangential_samples, 1000);
  EXPECT_TRUE(r.sup_decreasing);
  EXPECT_TRUE(r.within_envelope);
  EXPECT_GT(r.envelope_constant, 0.0);
  EXPECT_EQ(r.content.trend, ContentTrend::Divergent);
  for (const auto& row : r.mass_table) EXPECT_LE(row.area, row.bound);
  EXPECT_LT(r.mass.value, 3.1);
  EXPECT_NEAR(r.boundary_mass.value, 2 * pi + 1.0, 1e-6);
  EXPECT_NEAR(r.expected_boundary_mass, 2 * pi + 1.0, 1e-12);
  EXPECT_TRUE(r.failure_shown);
}

TEST(Cylindrical, ExperimentalVariantShowsTheSameFailure) {
  CylindricalModel m(SurfaceParams{});
  const auto r = verify_cylindrical(m, 200, 1);
  EXPECT_TRUE(r.experimental);
  EXPECT_FALSE(r.refused);
  EXPECT_NEAR(r.circulation.value, 1.0, 1e-4);
  EXPECT_LE(r.tangential_max, 1e-3);
  EXPECT_TRUE(r.sup_decreasing);
  for (const auto& row : r.rings) {
    EXPECT_GE(row.length, row.length_floor) << row.k;
    EXPECT_LE(row.area, row.bound) << row.k;
  }
  EXPECT_TRUE(std::isfinite(r.tail_bound));
  EXPECT_TRUE(r.failure_shown);
}

TEST(Cylindrical, RingsAndCore) {
  CylindricalModel m(SurfaceParams{});
  EXPECT_EQ(m.ring(1.5), -1);
  EXPECT_EQ(m.ring(0.9), 0);
  EXPECT_NEAR(m.r_k(2), 1.0 / 9.0, 1e-15);
  EXPECT_EQ(m.omega({0.0, 0.0, 0.0}).norm(), 0.0);
  // u(theta = 0) = 0 and u(2 pi) = 1 on a ring
  const double r = m.r_k(2) - 0.4 * m.ring_width(1);
  EXPECT_NEAR(m.du(r, 0.0).u, 0.0, 1e-12);
  EXPECT_NEAR(m.du(r, 2 * pi * (1 - 1e-15)).u, 1.0, 1e-9);
}
