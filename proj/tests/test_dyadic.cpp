#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <set>

#include "stokeslab/dyadic.hpp"
#include "stokeslab/exceptional_set.hpp"

using namespace stokeslab;

namespace {

CubeSet<2> unit_square() { return CubeSet<2>::full(); }

CubeSet<2> random_complex(std::mt19937_64& rng, int max_gen, int count) {
  std::vector<DyadicCube<2>> cubes;
  for (int i = 0; i < count; ++i) {
    const int g = std::uniform_int_distribution<int>(0, max_gen)(rng);
    const std::int64_t n = std::int64_t{1} << g;
    std::uniform_int_distribution<std::int64_t> c(0, n - 1);
    cubes.push_back(make_cube<2>(g, {c(rng), c(rng)}));
  }
  return CubeSet<2>(RootBox<2>::unit(), cubes);
}

// Perimeter oracle: rasterize at generation g and count unit edges between
// an inside cell and an outside cell (or the outside of the root box).
double raster_perimeter(const CubeSet<2>& a, int g) {
  const std::int64_t n = std::int64_t{1} << g;
  std::vector<char> in(n * n, 0);
  for (const auto& c : a.refined(g)) in[c.corner[1] * n + c.corner[0]] = 1;
  auto at = [&](std::int64_t x, std::int64_t y) {
    return x >= 0 && y >= 0 && x < n && y < n && in[y * n + x];
  };
  std::int64_t edges = 0;
  for (std::int64_t y = 0; y < n; ++y) {
    for (std::int64_t x = 0; x < n; ++x) {
      if (!at(x, y)) continue;
      edges += !at(x - 1, y) + !at(x + 1, y) + !at(x, y - 1) + !at(x, y + 1);
    }
  }
  return std::ldexp(static_cast<double>(edges), -g);
}

}  // namespace

TEST(Measure, Examples) {
  EXPECT_EQ(unit_square().measure(), 1.0);
  EXPECT_EQ(unit_square().subtract(CubeSet<2>(RootBox<2>::unit(), {make_cube<2>(2, {1, 2})})).measure(), 15.0 / 16.0);
  EXPECT_EQ(CubeSet<2>().measure(), 0.0);
}

TEST(Perimeter, Examples) {
  EXPECT_EQ(unit_square().perimeter(), 4.0);
  const RootBox<2> big = RootBox<2>::cube({0.0, 0.0}, 2.0);
  const CubeSet<2> rect(big, {make_cube<2>(1, {0, 0}, big), make_cube<2>(1, {1, 0}, big)});
  EXPECT_EQ(rect.perimeter(), 6.0);
  const CubeSet<2> ell = unit_square().subtract(CubeSet<2>(RootBox<2>::unit(), {make_cube<2>(1, {1, 1})}));
  EXPECT_EQ(ell.perimeter(), 4.0);
  EXPECT_EQ(ell.perimeter(), raster_perimeter(ell, 3));
}

TEST(Perimeter, OneDimensionalCountsEndpoints) {
  const CubeSet<1> two(RootBox<1>::unit(), {make_cube<1>(2, {0}), make_cube<1>(2, {2})});
  EXPECT_EQ(two.perimeter(), 4.0);
  const CubeSet<1> joined(RootBox<1>::unit(), {make_cube<1>(2, {0}), make_cube<1>(2, {1})});
  EXPECT_EQ(joined.perimeter(), 2.0);
}

TEST(Perimeter, ThreeDimensionalCube) {
  EXPECT_EQ(CubeSet<3>::full().perimeter(), 6.0);
  EXPECT_EQ(CubeSet<3>::uniform(RootBox<3>::unit(), 2).perimeter(), 6.0);
}

TEST(Perimeter, MatchesRasterOracleOnRandomComplexes) {
  std::mt19937_64 rng(2024);
  for (int t = 0; t < 100; ++t) {
    const auto a = random_complex(rng, 5, 12);
    EXPECT_EQ(a.perimeter(), raster_perimeter(a, 5)) << "trial " << t;
  }
}

TEST(Perimeter, SubadditiveOnDisjointInteriors) {
  std::mt19937_64 rng(99);
  for (int t = 0; t < 500; ++t) {
    const auto a = random_complex(rng, 4, 6);
    const auto b = random_complex(rng, 4, 6).subtract(a);
    EXPECT_LE(a.unite(b).perimeter(), a.perimeter() + b.perimeter() + 1e-12);
  }
}

TEST(Perimeter, IsoperimetricOnRectangles) {
  const RootBox<2> root = RootBox<2>::cube({0.0, 0.0}, 8.0);
  for (int w = 1; w <= 8; ++w) {
    for (int h = 1; h <= 8; ++h) {
      std::vector<DyadicCube<2>> cubes;
      for (int i = 0; i < w; ++i) {
        for (int j = 0; j < h; ++j) cubes.push_back(make_cube<2>(3, {i, j}, root));
      }
      const CubeSet<2> r(root, cubes);
      EXPECT_GE(r.perimeter(), 4.0 * std::sqrt(r.measure()) - 1e-12);
      if (w == h) {
        EXPECT_DOUBLE_EQ(r.perimeter(), 4.0 * std::sqrt(r.measure()));
      }
    }
  }
}

TEST(Diameter, Examples) {
  EXPECT_DOUBLE_EQ(unit_square().diameter(), std::sqrt(2.0));
  const auto q = make_cube<3>(3, {1, 2, 3});
  EXPECT_DOUBLE_EQ(CubeSet<3>(RootBox<3>::unit(), {q}).diameter(), 0.125 * std::sqrt(3.0));
  const RootBox<2> root = RootBox<2>::cube({0.0, 0.0}, 4.0);
  const CubeSet<2> two(root, {make_cube<2>(2, {0, 0}, root), make_cube<2>(2, {3, 0}, root)});
  EXPECT_DOUBLE_EQ(two.diameter(), std::sqrt(17.0));
  EXPECT_THROW(CubeSet<2>().diameter(), DomainError);
}

TEST(Diameter, HullMatchesAllPairs) {
  std::mt19937_64 rng(8);
  for (int t = 0; t < 50; ++t) {
    const auto a = random_complex(rng, 4, 10);
    double best = 0.0;
    for (const auto& p : a.cubes()) {
      for (const auto& q : a.cubes()) {
        for (const auto& u : p.vertices()) {
          for (const auto& v : q.vertices()) best = std::max(best, distance(u, v));
        }
      }
    }
    EXPECT_DOUBLE_EQ(a.diameter(), best);
  }
}

TEST(Subdivide, ChildrenAndDepth) {
  const auto kids = subdivide(make_cube<2>(0, {0, 0}));
  ASSERT_EQ(kids.size(), 4u);
  double m = 0.0;
  for (const auto& k : kids) {
    EXPECT_EQ(k.side(0), 0.5);
    m += k.measure();
  }
  EXPECT_EQ(m, 1.0);
  EXPECT_EQ(subdivide(make_cube<1>(0, {0})).size(), 2u);
  EXPECT_EQ(subdivide(kids[3])[0].side(1), 0.25);
  EXPECT_THROW(subdivide(make_cube<2>(40, {0, 0})), DepthError);
  EXPECT_THROW(subdivide(make_cube<2>(3, {0, 0}), 3), DepthError);
}

TEST(Canonical, MergesSiblingsAndIsIdempotent) {
  const auto quarters = subdivide(make_cube<2>(0, {0, 0}));
  const CubeSet<2> merged(RootBox<2>::unit(), quarters);
  EXPECT_EQ(merged, unit_square());
  std::mt19937_64 rng(1);
  for (int t = 0; t < 100; ++t) {
    const auto a = random_complex(rng, 5, 20);
    const CubeSet<2> again(a.root(), a.cubes());
    EXPECT_EQ(again, a);
    const CubeSet<2> refined(a.root(), a.refined(6));
    EXPECT_EQ(refined, a);
  }
}

TEST(SetAlgebra, TransitivityAndComplement) {
  std::mt19937_64 rng(77);
  for (int t = 0; t < 100; ++t) {
    const auto a = random_complex(rng, 4, 8);
    const auto b = random_complex(rng, 4, 8);
    const auto ab = a.intersect(b);
    EXPECT_EQ(ab, b.intersect(a));
    EXPECT_EQ(a.subtract(b).measure() + ab.measure(), a.measure());
    EXPECT_EQ(a.complement().measure() + a.measure(), 1.0);
    EXPECT_EQ(a.complement().complement(), a);
    EXPECT_EQ(a.unite(b).measure(), a.measure() + b.measure() - ab.measure());
  }
}

TEST(SetAlgebra, ClipOnGridLine) {
  const auto left = unit_square().clip(0, 0.5, true);
  EXPECT_EQ(left.measure(), 0.5);
  EXPECT_EQ(left.perimeter(), 3.0);
  EXPECT_THROW(unit_square().clip(0, 1.0 / 3.0, true), StructuralError);
}

TEST(SetAlgebra, DifferentRootsRejected) {
  const CubeSet<2> other = CubeSet<2>::full(RootBox<2>::cube({0.0, 0.0}, 2.0));
  EXPECT_THROW(unit_square().unite(other), StructuralError);
}

TEST(Anisotropic, RectangleRoot) {
  RootBox<2> root;
  root.side = {3.0, 0.5};
  const auto r = CubeSet<2>::full(root);
  EXPECT_DOUBLE_EQ(r.measure(), 1.5);
  EXPECT_DOUBLE_EQ(r.perimeter(), 7.0);
  EXPECT_DOUBLE_EQ(CubeSet<2>::uniform(root, 3).perimeter(), 7.0);
}

TEST(ExceptionalSetTest, NeighbourhoodExamples) {
  const auto origin = ExceptionalSet<2>::point({0.0, 0.0});
  EXPECT_TRUE(origin.neighborhood_indicator(1.0, {0.5, 0.0}));
  EXPECT_FALSE(origin.neighborhood_indicator(1.0, {1.0, 0.0}));
  const double yinf = 0.5;
  const auto seg = ExceptionalSet<3>::box({0.0, yinf, -1.0}, {std::acos(-1.0), yinf, 1.0});
  EXPECT_FALSE(seg.neighborhood_indicator(0.2, {1.0, yinf - 0.3, 0.0}));
  EXPECT_NEAR(seg.distance({1.0, yinf - 0.3, 0.0}), 0.3, 1e-15);
  EXPECT_THROW(origin.neighborhood_indicator(0.0, {0.0, 0.0}), DomainError);
  EXPECT_THROW(ExceptionalSet<2>::segment({0.0, 0.0}, {1.0, 1.0}), StructuralError);
}

TEST(ExceptionalSetTest, DistanceIsOneLipschitz) {
  ExceptionalSet<3> e;
  e.add_point({0.3, -0.2, 0.1});
  e.add_segment({0.0, 0.5, -1.0}, {0.0, 0.5, 1.0});
  e.add_box({1.0, 1.0, 0.0}, {2.0, 1.5, 0.0});
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int i = 0; i < 1000; ++i) {
    const Point3 x{u(rng), u(rng), u(rng)};
    const Point3 y{u(rng), u(rng), u(rng)};
    EXPECT_LE(std::abs(e.distance(x) - e.distance(y)), distance(x, y) + 1e-12);
  }
}
