#pragma once

// Two-dimensional integral currents in R^3: multiplicity-weighted cube
// complexes in the plane z = 0, and graph charts theta * phi#(E^2 _ A) with
// phi(x, y) = (x, y, psi(x, y)).  Scalars (mass, boundary mass, slices) are
// recomputed on demand and carry a quadrature error bound.

#include <algorithm>
#include <cmath>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "stokeslab/dyadic.hpp"
#include "stokeslab/error.hpp"
#include "stokeslab/exceptional_set.hpp"
#include "stokeslab/forms.hpp"
#include "stokeslab/planar.hpp"
#include "stokeslab/quadrature.hpp"

namespace stokeslab {

/// Height function of a graph chart.
class HeightField {
 public:
  virtual ~HeightField() = default;

  virtual double value(double x, double y) const = 0;
  virtual double dx(double x, double y) const = 0;
  virtual double dy(double x, double y) const = 0;

  /// Upper bound of sqrt(1 + |grad psi|^2) on the rectangle; may be +inf.
  virtual double slope_bound(const Rect& r) const = 0;

  /// Upper bound of |psi| on the rectangle.
  virtual double height_bound(const Rect& r) const {
    const double s = slope_bound(r);
    const double c = std::abs(value(0.5 * (r.x0 + r.x1), 0.5 * (r.y0 + r.y1)));
    return c + std::sqrt(std::max(s * s - 1.0, 0.0)) * 0.5 * std::hypot(r.x1 - r.x0, r.y1 - r.y0);
  }

  /// Heights in (y0, y1) across which psi is only piecewise smooth.
  virtual std::vector<double> y_breaks(double /*y0*/, double /*y1*/) const { return {}; }

  /// Oscillation length in x over the band y0 <= y <= y1 (+inf if none).
  virtual double x_period(double /*y0*/, double /*y1*/) const { return kInf; }

  /// Graph area over the rectangle.
  virtual QuadratureResult area(const Rect& r, const QuadratureOptions& opt) const {
    const auto xb = panel_breaks(r.x0, r.x1, x_period(r.y0, r.y1) / 8.0);
    const auto yextra = y_breaks(r.y0, r.y1);
    const auto yb = panel_breaks(r.y0, r.y1, kInf, yextra);
    return integrate_2d(
        [this](double x, double y) {
          const double gx = dx(x, y), gy = dy(x, y);
          return std::sqrt(1.0 + gx * gx + gy * gy);
        },
        xb, yb, opt);
  }

  /// Length of the graph over the horizontal segment [x0, x1] x {y}.
  virtual QuadratureResult section_length(double x0, double x1, double y, const QuadratureOptions& opt) const {
    const auto br = panel_breaks(x0, x1, x_period(y, y) / 8.0);
    return integrate(
        [this, y](double x) {
          const double g = dx(x, y);
          return std::sqrt(1.0 + g * g);
        },
        br, opt);
  }

  virtual std::string name() const = 0;
};

/// psi = 0.
class FlatHeight final : public HeightField {
 public:
  double value(double, double) const override { return 0.0; }
  double dx(double, double) const override { return 0.0; }
  double dy(double, double) const override { return 0.0; }
  double slope_bound(const Rect&) const override { return 1.0; }
  double height_bound(const Rect&) const override { return 0.0; }
  QuadratureResult area(const Rect& r, const QuadratureOptions&) const override {
    return {r.area(), 0.0, 1, true};
  }
  QuadratureResult section_length(double x0, double x1, double, const QuadratureOptions&) const override {
    return {x1 - x0, 0.0, 1, true};
  }
  std::string name() const override { return "flat"; }
};

/// psi = c0 + cx x + cy y + cxx x^2 + cxy x y + cyy y^2.
class QuadraticHeight final : public HeightField {
 public:
  double c0 = 0.0, cx = 0.0, cy = 0.0, cxx = 0.0, cxy = 0.0, cyy = 0.0;

  QuadraticHeight() = default;
  QuadraticHeight(double c0, double cx, double cy, double cxx, double cxy, double cyy)
      : c0(c0), cx(cx), cy(cy), cxx(cxx), cxy(cxy), cyy(cyy) {}

  double value(double x, double y) const override {
    return c0 + cx * x + cy * y + cxx * x * x + cxy * x * y + cyy * y * y;
  }
  double dx(double x, double y) const override { return cx + 2.0 * cxx * x + cxy * y; }
  double dy(double x, double y) const override { return cy + cxy * x + 2.0 * cyy * y; }
  /// |grad psi|^2 is a convex function of (x, y), so its maximum on a
  /// rectangle is attained at a vertex.
  double slope_bound(const Rect& r) const override {
    double m = 0.0;
    for (double x : {r.x0, r.x1}) {
      for (double y : {r.y0, r.y1}) m = std::max(m, dx(x, y) * dx(x, y) + dy(x, y) * dy(x, y));
    }
    return std::sqrt(1.0 + m);
  }
  std::string name() const override { return "quadratic"; }
};

/// Graph chart phi(x, y) = (x, y, psi(x, y)) with Lipschitz bounds on a
/// rectangle.  Lip(phi^-1) = 1 because the inverse is a projection.
struct ChartMap {
  std::shared_ptr<const HeightField> field;
  double lip_plus = 1.0;
  double lip_minus = 1.0;

  /// Chart over `r` with L+ from the field's analytic bound, cross-checked
  /// on a sample grid.
  static ChartMap over(std::shared_ptr<const HeightField> f, const Rect& r) {
    ChartMap c;
    c.field = std::move(f);
    c.lip_plus = c.field->slope_bound(r);
    if (std::isfinite(c.lip_plus)) {
      constexpr int n = 33;
      for (int i = 0; i <= n; ++i) {
        for (int j = 0; j <= n; ++j) {
          const double x = r.x0 + (r.x1 - r.x0) * i / n;
          const double y = r.y0 + (r.y1 - r.y0) * j / n;
          const double gx = c.field->dx(x, y), gy = c.field->dy(x, y);
          if (std::sqrt(1.0 + gx * gx + gy * gy) > c.lip_plus * (1.0 + 1e-12)) {
            throw InvariantError("Lipschitz bound of chart '" + c.field->name() + "' violated at a sample point");
          }
        }
      }
    }
    return c;
  }

  Point3 operator()(const Point2& p) const { return {p[0], p[1], field->value(p[0], p[1])}; }
  /// D phi applied to a planar vector v at p.
  Point3 push(const Point2& p, const Point2& v) const {
    return {v[0], v[1], field->dx(p[0], p[1]) * v[0] + field->dy(p[0], p[1]) * v[1]};
  }
};

/// Half-space {x_axis <= t} (below) or {x_axis >= t} of the parameter plane.
struct HalfSpace {
  int axis = 1;
  double t = 0.0;
  bool below = true;

  Rect window() const {
    Rect w;
    double& lo = axis == 0 ? w.x0 : w.y0;
    double& hi = axis == 0 ? w.x1 : w.y1;
    (below ? hi : lo) = t;
    return w;
  }
  HalfSpace opposite() const { return {axis, t, !below}; }
};

/// Removal of the open neighbourhood B(set, radius).
struct Excision {
  ExceptionalSet<3> set;
  double radius = 0.0;
};

/// theta * E^2 _ ((A cap window) minus B(E, r)) in the plane z = 0.
struct CubeCurrent {
  int multiplicity = 1;
  CubeSet<2> domain;
  Rect window{};
  std::optional<Excision> excision;
};

/// theta * phi#(E^2 _ (A cap window)).
struct ChartCurrent {
  int multiplicity = 1;
  CubeSet<2> domain;
  Rect window{};
  ChartMap chart;
};

using Current = std::variant<CubeCurrent, ChartCurrent>;

inline CubeCurrent cube_current(CubeSet<2> a, int multiplicity = 1) {
  if (multiplicity == 0) throw StructuralError("multiplicity must be a nonzero integer");
  return {multiplicity, std::move(a), {}, std::nullopt};
}

inline ChartCurrent chart_current(CubeSet<2> a, std::shared_ptr<const HeightField> field, int multiplicity = 1) {
  if (multiplicity == 0) throw StructuralError("multiplicity must be a nonzero integer");
  Rect bbox{};
  if (!a.empty()) {
    const auto [lo, hi] = a.bounds();
    bbox = {lo[0], hi[0], lo[1], hi[1]};
  } else {
    bbox = {0.0, 0.0, 0.0, 0.0};
  }
  ChartCurrent c{multiplicity, std::move(a), {}, ChartMap::over(std::move(field), bbox)};
  return c;
}

/// Graph current over a rectangle (a single anisotropic root cube).
inline ChartCurrent surface_current(const Rect& r, std::shared_ptr<const HeightField> field, int multiplicity = 1) {
  RootBox<2> root;
  root.corner = {r.x0, r.y0};
  root.side = {r.x1 - r.x0, r.y1 - r.y0};
  return chart_current(CubeSet<2>::full(root), std::move(field), multiplicity);
}

inline const CubeSet<2>& domain_of(const Current& t) {
  return std::visit([](const auto& c) -> const CubeSet<2>& { return c.domain; }, t);
}
inline const Rect& window_of(const Current& t) {
  return std::visit([](const auto& c) -> const Rect& { return c.window; }, t);
}
inline int multiplicity_of(const Current& t) {
  return std::visit([](const auto& c) { return c.multiplicity; }, t);
}

/// Rectangles carrying the current in the parameter plane.
inline std::vector<Rect> carrier_rects(const Current& t) { return clipped_rects(domain_of(t), window_of(t)); }

inline bool is_zero(const Current& t) { return carrier_rects(t).empty(); }

inline QuadratureOptions default_mass_options() { return {1e-10, 1e-12, 400000}; }

/// Mass with certified error; exact for plain cube currents.
inline Certified mass(const Current& t, const QuadratureOptions& opt = default_mass_options()) {
  const double th = std::abs(multiplicity_of(t));
  if (const auto* c = std::get_if<CubeCurrent>(&t)) {
    Certified m{0.0, 0.0};
    const auto rects = carrier_rects(t);
    for (const auto& r : rects) m.value += r.area();
    if (c->excision) {
      const auto q = neighborhood_area(rects, planar_components(c->excision->set), c->excision->radius);
      m = m - q.certified("neighbourhood area");
    }
    return th * m;
  }
  const auto& ch = std::get<ChartCurrent>(t);
  Certified m{0.0, 0.0};
  for (const auto& r : carrier_rects(t)) m += ch.chart.field->area(r, opt).certified("chart area");
  return th * m;
}

/// Oriented boundary in the parameter plane (region on the left).
inline std::vector<CurvePiece> boundary_pieces(const Current& t) {
  const auto rects = carrier_rects(t);
  if (const auto* c = std::get_if<CubeCurrent>(&t); c && c->excision) {
    return excised_boundary(rects, planar_components(c->excision->set), c->excision->radius);
  }
  return boundary_edges(rects);
}

/// Length of phi(piece) for a segment piece of the parameter plane.
inline QuadratureResult chart_length(const ChartMap& chart, const CurvePiece& piece, const QuadratureOptions& opt) {
  if (piece.kind != CurvePiece::Kind::Segment) throw StructuralError("chart boundaries are made of segments");
  const auto& f = *chart.field;
  const Point2 a = piece.a, b = piece.b;
  if (a[1] == b[1]) {
    const double x0 = std::min(a[0], b[0]), x1 = std::max(a[0], b[0]);
    return f.section_length(x0, x1, a[1], opt);
  }
  std::vector<double> extra;
  for (double y : f.y_breaks(std::min(a[1], b[1]), std::max(a[1], b[1]))) extra.push_back((y - a[1]) / (b[1] - a[1]));
  double width = kInf;
  if (a[0] != b[0]) width = f.x_period(std::min(a[1], b[1]), std::max(a[1], b[1])) / 8.0 / std::abs(b[0] - a[0]);
  const auto br = panel_breaks(0.0, 1.0, width, extra);
  return integrate(
      [&](double s) {
        const Point2 p = piece.point(s);
        const Point2 v = piece.velocity(s);
        const double dz = f.dx(p[0], p[1]) * v[0] + f.dy(p[0], p[1]) * v[1];
        return std::sqrt(v[0] * v[0] + v[1] * v[1] + dz * dz);
      },
      br, opt);
}

/// Boundary mass with certified error; exact for plain cube currents.
inline Certified boundary_mass(const Current& t, const QuadratureOptions& opt = default_mass_options()) {
  const double th = std::abs(multiplicity_of(t));
  if (const auto* c = std::get_if<CubeCurrent>(&t)) {
    if (!c->excision && c->window == Rect{}) return {th * c->domain.perimeter(), 0.0};
    const auto pieces = boundary_pieces(t);
    return {th * total_length(pieces), th * 1e-14 * static_cast<double>(pieces.size())};
  }
  const auto& ch = std::get<ChartCurrent>(t);
  Certified m{0.0, 0.0};
  for (const auto& p : boundary_pieces(t)) m += chart_length(ch.chart, p, opt).certified("boundary length");
  return th * m;
}

/// T _ A' for a cube set on the same dyadic grid.
inline Current restrict(const Current& t, const CubeSet<2>& a) {
  return std::visit(
      [&](auto c) -> Current {
        c.domain = c.domain.intersect(a);
        return c;
      },
      t);
}

/// T _ H for a coordinate half-space of the parameter plane.
inline Current restrict(const Current& t, const HalfSpace& h) {
  return std::visit(
      [&](auto c) -> Current {
        c.window = c.window.intersect(h.window());
        return c;
      },
      t);
}

/// (T _ A', T - T _ A').
inline std::pair<Current, Current> split(const Current& t, const CubeSet<2>& a) {
  return {restrict(t, a), restrict(t, domain_of(t).subtract(a))};
}

inline std::pair<Current, Current> split(const Current& t, const HalfSpace& h) {
  return {restrict(t, h), restrict(t, h.opposite())};
}

/// Report of M(S) + M(T - S) against M(T).
struct AdditivityReport {
  Certified whole, part, rest;
  double defect = 0.0;
  bool holds = false;
};

template <class Region>
AdditivityReport mass_additivity_check(const Current& t, const Region& region) {
  const auto [s, r] = split(t, region);
  AdditivityReport rep;
  rep.whole = mass(t);
  rep.part = mass(s);
  rep.rest = mass(r);
  rep.defect = std::abs(rep.part.value + rep.rest.value - rep.whole.value);
  rep.holds = rep.defect <= rep.whole.error + rep.part.error + rep.rest.error + 1e-14 * std::abs(rep.whole.value);
  return rep;
}

/// Mass bounds for a chart current from the Lipschitz constants:
/// |theta| (L-)^-2 |A| <= M <= |theta| (L+)^2 |A|.
struct PushforwardBounds {
  double lower = 0.0, upper = 0.0;
  Certified mass;
  bool holds = false;
};

inline PushforwardBounds pushforward_mass_bounds(const ChartCurrent& t) {
  PushforwardBounds b;
  double area = 0.0;
  for (const auto& r : carrier_rects(t)) area += r.area();
  const double th = std::abs(t.multiplicity);
  b.lower = th * area / (t.chart.lip_minus * t.chart.lip_minus);
  b.upper = th * area * t.chart.lip_plus * t.chart.lip_plus;
  b.mass = mass(Current{t});
  b.holds = b.mass.value + b.mass.error >= b.lower && b.mass.value - b.mass.error <= b.upper;
  return b;
}

/// Point of the support in R^3 for a parameter-plane point.
inline Point3 embed(const Current& t, const Point2& p) {
  if (const auto* c = std::get_if<ChartCurrent>(&t)) return c->chart(p);
  return lift(p);
}

/// Unit tangent 2-vector of the current (orientation times sign of theta).
inline KVector<3> orientation(const Current& t, const Point2& p) {
  KVector<3> u(2);
  if (const auto* c = std::get_if<ChartCurrent>(&t)) {
    const Point3 a = c->chart.push(p, {1.0, 0.0});
    const Point3 b = c->chart.push(p, {0.0, 1.0});
    u = wedge(as_vector<3>(a), as_vector<3>(b));
    u *= 1.0 / u.norm();
  } else {
    u[0] = 1.0;
  }
  if (multiplicity_of(t) < 0) u *= -1.0;
  return u;
}

/// Lower and upper bounds of diam spt T.
struct DiameterBounds {
  double lower = 0.0, upper = 0.0;
};

inline DiameterBounds diameter_bounds(const Current& t) {
  const auto rects = carrier_rects(t);
  if (rects.empty()) return {};
  std::vector<Point2> corners;
  for (const auto& r : rects) {
    for (const Point2 v : {Point2{r.x0, r.y0}, Point2{r.x1, r.y0}, Point2{r.x0, r.y1}, Point2{r.x1, r.y1}})
      corners.push_back(v);
  }
  auto max_pair = [](const auto& pts) {
    double best = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      for (std::size_t j = i + 1; j < pts.size(); ++j) best = std::max(best, distance(pts[i], pts[j]));
    }
    return best;
  };
  if (const auto* c = std::get_if<CubeCurrent>(&t)) {
    const double d = max_pair(corners);
    if (!c->excision) return {d, d};
    std::vector<Point2> pts;
    for (const auto& piece : boundary_pieces(t)) {
      for (int i = 0; i <= 8; ++i) pts.push_back(piece.point(i / 8.0));
    }
    return {max_pair(pts), d};
  }
  const auto& ch = std::get<ChartCurrent>(t);
  constexpr int n = 16;
  std::vector<Point3> pts;
  double spacing = 0.0;
  Rect box{kInf, -kInf, kInf, -kInf};
  for (const auto& r : rects) {
    for (int i = 0; i <= n; ++i) {
      for (int j = 0; j <= n; ++j) {
        pts.push_back(ch.chart({r.x0 + (r.x1 - r.x0) * i / n, r.y0 + (r.y1 - r.y0) * j / n}));
      }
    }
    spacing = std::max(spacing, std::hypot(r.x1 - r.x0, r.y1 - r.y0) / n);
    box = {std::min(box.x0, r.x0), std::max(box.x1, r.x1), std::min(box.y0, r.y0), std::max(box.y1, r.y1)};
  }
  if (pts.size() > 4000) {  // keep the pairwise scan affordable
    std::vector<Point3> thinned;
    const std::size_t stride = pts.size() / 2000 + 1;
    for (std::size_t i = 0; i < pts.size(); i += stride) thinned.push_back(pts[i]);
    pts = std::move(thinned);
    spacing = kInf;
  }
  const double lower = max_pair(pts);
  // Every point of phi(Q) is within L+ * spacing / 2 of a sampled image point.
  double upper = lower + ch.chart.lip_plus * spacing;
  const double hb = ch.chart.field->height_bound(box);
  upper = std::min(upper, std::sqrt(std::pow(max_pair(corners), 2) + 4.0 * hb * hb));
  // L+ bounds the gradient on the hull of the chart rectangle
  upper = std::min(upper, ch.chart.lip_plus * max_pair(corners));
  return {lower, upper};
}

/// Regularity M(S) / (M(dS) diam spt S), using the diameter upper bound so
/// that the value never overstates the true regularity by more than the
/// quadrature error.  +inf when the boundary mass vanishes.
inline double regularity(const Current& s) {
  const double m = mass(s).value;
  const double b = boundary_mass(s).value;
  if (m == 0.0) return 0.0;
  if (b == 0.0) return kInf;
  return m / (b * diameter_bounds(s).upper);
}

/// Exact regularity of a cube complex in R^M.
template <int M>
double regularity(const CubeSet<M>& a) {
  return a.measure() / (a.perimeter() * a.diameter());
}

/// Height y_E when dist(phi(p), E) = y_E - y on the whole chart domain,
/// i.e. E is one box at height y_E spanning the domain in x and the graph
/// in z, with the domain below it.
inline std::optional<double> level_height(const ChartCurrent& t, const ExceptionalSet<3>& e) {
  if (e.components().size() != 1 || t.domain.empty()) return std::nullopt;
  const auto& b = e.components().front();
  if (b.lo[1] != b.hi[1]) return std::nullopt;
  const auto [lo, hi] = t.domain.bounds();
  const Rect box = Rect{lo[0], hi[0], lo[1], hi[1]}.intersect(t.window);
  const double h = t.chart.field->height_bound(box);
  if (b.lo[0] > box.x0 || b.hi[0] < box.x1 || box.y1 > b.lo[1] || b.lo[2] > -h || b.hi[2] < h) return std::nullopt;
  return b.lo[1];
}

inline std::optional<double> level_height(const Current& t, const ExceptionalSet<3>& e) {
  if (const auto* c = std::get_if<ChartCurrent>(&t)) return level_height(*c, e);
  return std::nullopt;
}

/// Slice <T, dist(., E), r> as oriented pieces of the parameter plane.
struct Slice {
  double requested = 0.0;  // radius asked for
  double radius = 0.0;     // regular radius actually used
  std::vector<CurvePiece> pieces;
  Certified mass;
};

namespace detail {

inline bool regular_for(const Current& t, const ExceptionalSet<3>& e, double r) {
  const auto rects = carrier_rects(t);
  if (std::holds_alternative<CubeCurrent>(t)) return is_regular_radius(rects, planar_components(e), r);
  const auto yl = level_height(t, e);
  if (!yl) throw StructuralError("slicing a chart current is supported only by distance to a level box");
  const double y = *yl - r;
  const auto& ch = std::get<ChartCurrent>(t);
  for (const auto& rc : rects) {
    if (std::abs(y - rc.y0) < 1e-9 || std::abs(y - rc.y1) < 1e-9) return false;
    for (double b : ch.chart.field->y_breaks(rc.y0, rc.y1)) {
      if (std::abs(y - b) < 1e-9) return false;
    }
  }
  return true;
}

}  // namespace detail

/// Nearest regular radius from the deterministic perturbation sequence
/// r, r(1 + 1e-7), r(1 - 1e-7), r(1 + 2e-7), ...
inline double regular_radius(const Current& t, const ExceptionalSet<3>& e, double r) {
  for (int k = 0; k <= 64; ++k) {
    const int step = (k + 1) / 2 * (k % 2 ? 1 : -1);
    const double rr = r * (1.0 + 1e-7 * step);
    if (detail::regular_for(t, e, rr)) return rr;
  }
  throw BudgetError("no regular radius near " + std::to_string(r));
}

inline Slice slice(const Current& t, const ExceptionalSet<3>& e, double r,
                   const QuadratureOptions& opt = default_mass_options()) {
  if (!(r > 0.0)) throw DomainError("slice radius must be positive");
  if (const auto* c = std::get_if<CubeCurrent>(&t); c && c->excision) {
    throw StructuralError("slicing an excised current is not supported");
  }
  Slice s;
  s.requested = r;
  s.radius = regular_radius(t, e, r);
  const double th = std::abs(multiplicity_of(t));
  const auto rects = carrier_rects(t);
  if (std::holds_alternative<CubeCurrent>(t)) {
    s.pieces = level_pieces(rects, planar_components(e), s.radius);
    s.mass = {th * total_length(s.pieces), th * 1e-14 * static_cast<double>(s.pieces.size())};
    return s;
  }
  const auto& ch = std::get<ChartCurrent>(t);
  const double y = *level_height(t, e) - s.radius;
  std::vector<detail::Interval> ivs;
  for (const auto& rc : rects) {
    if (rc.y0 < y && y < rc.y1) ivs.push_back({rc.x0, rc.x1});
  }
  std::sort(ivs.begin(), ivs.end(), [](const auto& a, const auto& b) { return a.lo < b.lo; });
  s.mass = {0.0, 0.0};
  for (std::size_t i = 0; i < ivs.size();) {
    double lo = ivs[i].lo, hi = ivs[i].hi;
    std::size_t j = i + 1;
    while (j < ivs.size() && ivs[j].lo == hi) hi = ivs[j++].hi;
    // clockwise around E, which lies above: traverse in -x
    s.pieces.push_back(CurvePiece::segment({hi, y}, {lo, y}));
    s.mass += ch.chart.field->section_length(lo, hi, y, opt).certified("section length");
    i = j;
  }
  s.mass = th * s.mass;
  return s;
}

/// ||T||(B(E, r)).
inline Certified neighborhood_mass(const Current& t, const ExceptionalSet<3>& e, double r,
                                   const QuadratureOptions& opt = default_mass_options()) {
  if (!(r > 0.0)) throw DomainError("neighbourhood radius must be positive");
  const double th = std::abs(multiplicity_of(t));
  const auto rects = carrier_rects(t);
  if (const auto* c = std::get_if<CubeCurrent>(&t)) {
    if (c->excision) throw StructuralError("neighbourhoods of an excised current are not supported");
    const auto q = neighborhood_area(rects, planar_components(e), r);
    return th * q.certified("neighbourhood area");
  }
  const auto& ch = std::get<ChartCurrent>(t);
  const auto yl = level_height(t, e);
  if (!yl) throw StructuralError("chart neighbourhoods are supported only for a level box");
  Certified m{0.0, 0.0};
  for (const auto& rc : rects) {
    const Rect part = rc.intersect(Rect{-kInf, kInf, *yl - r, kInf});
    if (!part.empty()) m += ch.chart.field->area(part, opt).certified("neighbourhood area");
  }
  return th * m;
}

/// Trapezoid check of the coarea inequality int M<T, f, r> dr <= M(T).
struct CoareaReport {
  std::vector<double> radii;
  std::vector<double> slice_mass;
  double integral = 0.0;
  Certified mass;
  bool holds = false;
};

inline CoareaReport coarea_slice_check(const Current& t, const ExceptionalSet<3>& e, const std::vector<double>& radii,
                                       double rel_tol = 1e-3) {
  CoareaReport rep;
  rep.radii = radii;
  for (double r : radii) rep.slice_mass.push_back(slice(t, e, r).mass.value);
  for (std::size_t i = 0; i + 1 < radii.size(); ++i) {
    rep.integral += 0.5 * (rep.slice_mass[i] + rep.slice_mass[i + 1]) * (radii[i + 1] - radii[i]);
  }
  rep.mass = mass(t);
  rep.holds = rep.integral <= rep.mass.value * (1.0 + rel_tol);
  return rep;
}

}  // namespace stokeslab
