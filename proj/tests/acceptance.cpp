// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "stokeslab/stokeslab.hpp"

using namespace stokeslab;

namespace {

constexpr double pi = std::numbers::pi;

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [violated: " << what << "]";
    }
  }
};

int failures = 0;

void criterion(int id, const char* title, const std::function<void(Outcome&)>& body) {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    body(o);
  } catch (const std::exception& e) {
    o.pass = false;
    o.detail << " [exception: " << e.what() << "]";
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (!o.pass) ++failures;
  std::printf("%s %2d %s:%s (%.1fs)\n", o.pass ? "PASS" : "FAIL", id, title, o.detail.str().c_str(), secs);
  std::fflush(stdout);
}

Current unit_square() { return cube_current(CubeSet<2>::full()); }

// int_a^b x^p dx
double power_integral(int p, double a, double b) { return (std::pow(b, p + 1) - std::pow(a, p + 1)) / (p + 1); }

}  // namespace

int main() {
  std::printf("stokeslab acceptance\n");

  criterion(1, "dyadic cube regularity", [](Outcome& o) {
    // a cube of side s: s^m / (2 m s^(m-1) * sqrt(m) s)
    const double r2 = cell_regularity(RootBox<2>::unit()), r3 = cell_regularity(RootBox<3>::unit());
    const double want2 = 1.0 / (2.0 * 2.0 * std::sqrt(2.0)), want3 = 1.0 / (2.0 * 3.0 * std::sqrt(3.0));
    o.require(std::abs(r2 - want2) <= 4 * std::numeric_limits<double>::epsilon() * want2, "planar value");
    o.require(std::abs(r3 - want3) <= 4 * std::numeric_limits<double>::epsilon() * want3, "spatial value");
    for (int g = 0; g <= 12; g += 3) {
      const auto c = cube_current(CubeSet<2>(RootBox<2>::unit(), {make_cube<2>(g, {0, 0})}));
      o.require(std::abs(regularity(c) - want2) <= 1e-15, "generation " + std::to_string(g));
    }
    o.detail << " m=2 " << r2 << ", m=3 " << r3;
  });

  criterion(2, "Cousin tiling for 50 random gauges", [](Outcome& o) {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const auto dom = CubeSet<2>::full();
    std::size_t pieces = 0;
    for (int i = 0; i < 50; ++i) {
      const Point3 c{u(rng), u(rng), 0.0};
      const auto g = Gauge::distance_plus(c, 0.01 + 0.3 * u(rng), 2.0 * u(rng));
      const auto fam = cousin_decompose(make_cube<2>(0, {0, 0}), g, 0.05);
      const auto rep = check_cousin(dom, fam, [&](const Point2& p) { return g({p[0], p[1], 0.0}); });
      double total = 0.0;
      for (const auto& tc : fam) total += tc.cube.measure();
      pieces += fam.size();
      const auto tag = "gauge " + std::to_string(i);
      o.require(rep.tag_failures == 0 && rep.fineness_failures == 0 && rep.overlaps == 0 && rep.tiles, tag);
      // dyadic measures are exact in binary floating point
      o.require(total == 1.0, tag + " measure sum");
    }
    o.detail << " " << pieces << " pieces in total";
  });

  criterion(3, "Stokes holds on smooth data", [](Outcome& o) {
    const auto flat = stokes_check(surface_current({0.0, 1.0, 0.0, 1.0}, std::make_shared<FlatHeight>()), x_dy<3>(), {});
    o.require(flat.verdict == Verdict::Holds && std::abs(flat.gap) < 1e-9, "flat square");
    // y z dx + (x^2 - z/2) dy + x y dz on a quadratic graph
    const auto w = polynomial_one_form<3>({std::vector<Monomial>{{1.0, {0, 1, 1}}},
                                           std::vector<Monomial>{{1.0, {2, 0, 0}}, {-0.5, {0, 0, 1}}},
                                           std::vector<Monomial>{{1.0, {1, 1, 0}}}});
    const auto bowl = surface_current({0.0, 1.0, 0.0, 1.0}, std::make_shared<QuadraticHeight>(0, 0.2, -0.1, 0.5, 0.3, -0.4));
    const auto graph = stokes_check(bowl, w, {});
    o.require(graph.verdict == Verdict::Holds && std::abs(graph.gap) < 1e-6, "smooth graph");
    o.detail << " flat gap " << flat.gap << ", graph gap " << graph.gap;
  });

  const auto model = std::make_shared<const SurfaceModel>(SurfaceParams{});
  std::optional<FailureReport> failure;
  const auto run_failure = [&]() -> const FailureReport& {
    if (!failure) failure = verify_failure(model);
    return *failure;
  };

  criterion(4, "oscillating surface breaks Stokes", [&](Outcome& o) {
    const auto& r = run_failure();
    o.require(!r.refused, "parameters accepted");
    o.require(std::abs(r.circulation.value - 1.0) <= 1e-4, "circulation 1");
    o.require(r.tangential_samples == 1000 && r.tangential_max <= 1e-3, "tangential differential small");
    StokesOptions opt;
    opt.schedule = {0.4};
    const auto w = omega_field(model);
    opt.lhs_oracle = [&] { return tangential_integral(*model, w).total(); };
    opt.rhs_oracle = [&] { return r.circulation; };
    const auto rep = stokes_check(surface_of(model), w, model->singular_set(), opt);
    o.require(std::abs(std::abs(rep.gap) - 1.0) <= 2e-3, "gap magnitude 1");
    o.require(rep.verdict == Verdict::Fails, "verdict FAILS");
    o.detail << " circulation " << r.circulation.value << ", tangential max " << r.tangential_max << ", gap "
             << rep.gap << ", " << to_string(rep.verdict);
  });

  criterion(5, "boundary mass of the oscillating surface", [&](Outcome& o) {
    const auto& r = run_failure();
    // the two x-edges have length y_inf each, the y-edges are half circles of length pi
    const double want = 2.0 * pi + 2.0 * 0.5;
    o.require(std::abs(r.boundary_mass.value - want) <= 1e-6, "2 pi + 1");
    o.detail << " " << num(r.boundary_mass.value) << " vs " << num(want);
  });

  criterion(6, "section length blow-up", [&](Outcome& o) {
    for (int k = 1; k <= 8; ++k) {
      const double l = section_length(*model, model->y_k(k)).value;
      o.require(l >= 2.0 * std::pow(4.0 / 3.0, k), "k=" + std::to_string(k));
      if (k == 8) o.detail << " L(y_8) " << l << " >= " << 2.0 * std::pow(4.0 / 3.0, 8);
    }
    const double l_inf = section_length(*model, model->y_inf()).value;
    o.require(std::abs(l_inf - pi) <= 1e-9, "flat top section");
    o.detail << ", L(y_inf) - pi " << l_inf - pi;
  });

  criterion(7, "strip areas are summable", [&](Outcome& o) {
    const auto& r = run_failure();
    for (const auto& row : r.mass_table) o.require(row.area <= row.bound, "A_" + std::to_string(row.k) + " bound");
    const auto& t = r.mass_table;
    // the tail after K majorizes every later increment of the partial sums
    for (std::size_t i = 0; i < t.size(); ++i) {
      const double tail = model->tail_area_bound(static_cast<int>(i) + 1);
      for (std::size_t j = i + 1; j < t.size(); ++j) {
        o.require(t[j].partial_sum - t[i].partial_sum <= tail * (1 + 1e-12), "Cauchy " + std::to_string(i));
      }
    }
    o.require(std::isfinite(r.tail_bound) && r.tail_bound < 1e-6, "truncated tail");
    o.detail << " " << t.size() << " strips, sum " << t.back().partial_sum << ", tail " << num(r.tail_bound);
  });

  criterion(8, "form decay along the strips", [&](Outcome& o) {
    const auto& r = run_failure();
    o.require(r.sup_table.size() == 9 && r.sup_table.front().k == 2, "rows k=2..10");
    o.require(r.sup_decreasing, "decreasing");
    o.require(r.within_envelope, "below 10x the fitted envelope");
    o.detail << " sup " << num(r.sup_table.front().sup) << " -> " << num(r.sup_table.back().sup) << ", fitted K "
             << num(r.envelope_constant);
  });

  criterion(9, "intrinsic Minkowski content", [&](Outcome& o) {
    const auto& r = run_failure();
    const Current s = surface_of(model);
    const auto fifth = intrinsic_content(s, model->singular_set(), 0.4, 0.2, 14);
    o.require(r.content.trend == ContentTrend::Divergent, "divergent on the 1/3 grid");
    o.require(fifth.trend == ContentTrend::Divergent, "divergent on the 1/5 grid");
    // strip areas shrink by a h / lambda per step while radii shrink by a
    const auto& p = model->params();
    const double derived = 1.0 - std::log(p.a * p.h * p.inv_lambda) / std::log(p.a);
    o.require(std::abs(r.content.exponent - fifth.exponent) <= 0.1 * r.content.exponent, "grids agree");
    o.require(std::abs(r.content.exponent - derived) <= 0.1 * derived, "matches derived exponent");
    const auto mid = intrinsic_content(unit_square(), ExceptionalSet<3>::segment({0.5, 0, 0}, {0.5, 1, 0}), 0.4, 0.5, 12);
    bool near_one = true;
    for (double v : mid.values) near_one = near_one && std::abs(v - 1.0) <= 1e-3;
    o.require(mid.trend == ContentTrend::Bounded && near_one, "flat midline bounded at 1");
    o.detail << " exponents " << r.content.exponent << " / " << fifth.exponent << " (derived " << derived
             << "), midline " << mid.sup;
  });

  criterion(10, "coarea slice bound", [&](Outcome& o) {
    std::vector<double> flat_radii;
    for (int i = 0; i <= 200; ++i) flat_radii.push_back(1e-3 + 0.998 * i / 200.0);
    const auto edge = coarea_slice_check(unit_square(), ExceptionalSet<3>::segment({0, 0, 0}, {0, 1, 0}), flat_radii);
    const auto point = coarea_slice_check(unit_square(), ExceptionalSet<3>::point({0.5, 0.5, 0}), flat_radii);
    const auto ok = [](const CoareaReport& c) { return c.integral <= c.mass.value * (1 + 1e-3); };
    o.require(ok(edge), "square and edge");
    o.require(ok(point), "square and point");
    // slices of the oscillating surface at distance r from E are sections at y_inf - r
    std::vector<double> radii;
    for (int i = 0; i <= 40; ++i) radii.push_back(0.01 + 0.48 * i / 40.0);
    const auto osc = coarea_slice_check(surface_of(model), model->singular_set(), radii);
    o.require(ok(osc), "oscillating surface");
    for (std::size_t i = 0; i < radii.size(); i += 10) {
      const double l = section_length(*model, model->y_inf() - osc.radii[i]).value;
      o.require(std::abs(osc.slice_mass[i] - l) <= 1e-6 * l, "slice is a section");
    }
    o.detail << " ratios " << edge.integral / edge.mass.value << ", " << point.integral / point.mass.value << ", "
             << osc.integral / osc.mass.value;
  });

  criterion(11, "Saks-Henstock convergence", [&](Outcome& o) {
    // an L-shaped set with a finer cube in the missing quadrant
    const CubeSet<2> ell(RootBox<2>::unit(), {make_cube<2>(1, {0, 0}), make_cube<2>(1, {1, 0}),
                                              make_cube<2>(1, {0, 1}), make_cube<2>(2, {2, 2})});
    const Current t = cube_current(ell);
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<int> pw(0, 4);
    double worst = 0.0;
    for (int i = 0; i < 10; ++i) {
      const int p = pw(rng), q = pw(rng);
      const ScalarField f = [p, q](const Point3& x) { return std::pow(x[0], p) * std::pow(x[1], q); };
      double exact = 0.0, area = 0.0;
      for (const auto& c : ell.cubes()) {
        exact += power_integral(p, c.lo(0), c.hi(0)) * power_integral(q, c.lo(1), c.hi(1));
        area += c.measure();
      }
      // |grad f| <= sqrt(p^2 + q^2) on the unit square; diam < 2^-j
      const double lip = std::sqrt(double(p * p + q * q));
      const auto rule = i % 2 ? TagRule::LowerCorner : TagRule::Center;
      const auto rep = saks_henstock_test(f, t, 1e-3, 7, rule);
      const auto tag = "x^" + std::to_string(p) + " y^" + std::to_string(q);
      o.require(std::abs(rep.oracle.value - exact) <= 1e-13, tag + " oracle");
      for (const auto& row : rep.rows) {
        const double c = lip * area;
        o.require(std::abs(row.riemann_sum - exact) <= c * std::ldexp(1.0, -row.j) + 1e-14, tag + " j=" + std::to_string(row.j));
        if (c > 0) worst = std::max(worst, std::abs(row.riemann_sum - exact) / (c * std::ldexp(1.0, -row.j)));
      }
    }
    o.detail << " worst error / (C 2^-j) " << worst;
  });

  criterion(12, "pushforward mass bounds", [&](Outcome& o) {
    std::vector<std::pair<std::string, ChartCurrent>> charts{
        {"flat", surface_current({0.0, 2.0, 0.0, 1.0}, std::make_shared<FlatHeight>())},
        {"tilted x3", chart_current(CubeSet<2>::full(), std::make_shared<QuadraticHeight>(0, 1, 0, 0, 0, 0), 3)},
        {"bowl", surface_current({0.0, 1.0, 0.0, 1.0}, std::make_shared<QuadraticHeight>(0, 0.2, -0.1, 0.5, 0.3, -0.4))},
        {"bowl on L", chart_current(CubeSet<2>(RootBox<2>::unit(), {make_cube<2>(1, {0, 0}), make_cube<2>(1, {1, 0}),
                                                                    make_cube<2>(1, {0, 1})}),
                                    std::make_shared<QuadraticHeight>(0, 0.2, -0.1, 0.5, 0.3, -0.4), -2)},
    };
    for (int k = 0; k < 4; ++k) charts.emplace_back("strip " + std::to_string(k), strip_current(model, k));
    for (const auto& [name, c] : charts) {
      const auto b = pushforward_mass_bounds(c);
      o.require(b.holds && b.lower <= b.mass.value && b.mass.value <= b.upper, name);
    }
    // the tilted plane z = x has area sqrt 2 per unit, Lipschitz constants sqrt 2 and 1
    const auto tilted = pushforward_mass_bounds(charts[1].second);
    o.require(std::abs(tilted.mass.value - 3.0 * std::sqrt(2.0)) <= 1e-12, "tilted closed form");
    o.detail << " " << charts.size() << " charts";
  });

  std::printf("%d of 12 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
