#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "stokeslab/quadrature.hpp"

using namespace stokeslab;

TEST(GaussLegendre, WeightsSumToTwo) {
  const auto& rule = GaussLegendreRule<12>::get();
  double s = 0.0;
  for (double w : rule.weights) s += w;
  EXPECT_NEAR(s, 2.0, 1e-14);
}

TEST(GaussLegendre, ExactForDegree23) {
  // x^22 integrates to 2/23 on [-1,1]; a 12-point rule is exact up to degree 23.
  const double v = gauss_legendre<12>([](double x) { return std::pow(x, 22) + std::pow(x, 23); }, -1.0, 1.0);
  EXPECT_NEAR(v, 2.0 / 23.0, 1e-14);
}

TEST(AdaptiveQuadrature, SmoothIntegrand) {
  const auto r = integrate([](double x) { return std::exp(x); }, 0.0, 1.0);
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.value, std::numbers::e - 1.0, 1e-13);
}

TEST(AdaptiveQuadrature, OscillatoryIntegrandWithBreaks) {
  const auto br = panel_breaks(0.0, std::numbers::pi, std::numbers::pi / 64.0);
  const auto r = integrate([](double x) { return std::sin(256.0 * x) * std::sin(256.0 * x); }, br);
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.value, std::numbers::pi / 2.0, 1e-10);
}

TEST(AdaptiveQuadrature, KinkRefinesLocally) {
  const auto r = integrate([](double x) { return std::abs(x - 0.3); }, 0.0, 1.0);
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.value, 0.5 * (0.09 + 0.49), 1e-10);
}

TEST(AdaptiveQuadrature, CertifiedThrowsWhenBudgetTooSmall) {
  QuadratureOptions opt;
  opt.max_panels = 2;
  const auto r = integrate([](double x) { return std::sin(1000.0 * x); }, 0.0, 1.0, opt);
  EXPECT_FALSE(r.converged);
  EXPECT_THROW(r.certified(), CertificateError);
}

TEST(AdaptiveQuadrature2D, Polynomial) {
  const std::vector<double> xb{0.0, 1.0};
  const std::vector<double> yb{0.0, 2.0};
  const auto r = integrate_2d([](double x, double y) { return x * x * y; }, xb, yb);
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.value, 2.0 / 3.0, 1e-13);
}

TEST(AdaptiveQuadrature2D, Gaussian) {
  const std::vector<double> b{-4.0, 4.0};
  const auto r = integrate_2d([](double x, double y) { return std::exp(-x * x - y * y); }, b, b);
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.value, std::numbers::pi * std::pow(std::erf(4.0), 2), 1e-10);
}

TEST(PanelBreaks, MergesExtraPoints) {
  const std::vector<double> extra{0.25, 2.0, 0.5};
  const auto br = panel_breaks(0.0, 1.0, 0.5, extra);
  EXPECT_EQ(br, (std::vector<double>{0.0, 0.25, 0.5, 1.0}));
}
