#pragma once

// Planar geometry behind cube-set currents: oriented boundaries of unions of
// rectangles, level curves of the distance to an exceptional set, and the
// area of its neighbourhoods.  Level curves of the distance to a box are
// rounded rectangles, so everything reduces to segments and circular arcs.

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <vector>

#include "stokeslab/dyadic.hpp"
#include "stokeslab/exceptional_set.hpp"
#include "stokeslab/quadrature.hpp"
#include "stokeslab/vec.hpp"

namespace stokeslab {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Closed rectangle [x0,x1] x [y0,y1]; infinite sides allowed for windows.
struct Rect {
  double x0 = -kInf, x1 = kInf, y0 = -kInf, y1 = kInf;

  bool empty() const { return !(x1 > x0 && y1 > y0); }
  double area() const { return empty() ? 0.0 : (x1 - x0) * (y1 - y0); }
  bool contains(const Point2& p) const { return p[0] >= x0 && p[0] <= x1 && p[1] >= y0 && p[1] <= y1; }
  Rect intersect(const Rect& o) const {
    return {std::max(x0, o.x0), std::min(x1, o.x1), std::max(y0, o.y0), std::min(y1, o.y1)};
  }
  bool bounded() const { return std::isfinite(x0) && std::isfinite(x1) && std::isfinite(y0) && std::isfinite(y1); }
  bool operator==(const Rect&) const = default;
};

inline Rect cube_rect(const DyadicCube<2>& c) { return {c.lo(0), c.hi(0), c.lo(1), c.hi(1)}; }

/// The rectangles of A clipped to a window (empty pieces dropped).
inline std::vector<Rect> clipped_rects(const CubeSet<2>& a, const Rect& window) {
  std::vector<Rect> out;
  for (const auto& c : a.cubes()) {
    const Rect r = cube_rect(c).intersect(window);
    if (!r.empty()) out.push_back(r);
  }
  return out;
}

/// Oriented segment or circular arc parametrised over s in [0, 1].
struct CurvePiece {
  enum class Kind { Segment, Arc };
  Kind kind = Kind::Segment;
  Point2 a{}, b{};           // segment endpoints
  Point2 center{};           // arc center
  double radius = 0.0;       // arc radius
  double t0 = 0.0, t1 = 0.0; // arc angles, traversed from t0 to t1

  static CurvePiece segment(Point2 a, Point2 b) {
    CurvePiece p;
    p.a = a;
    p.b = b;
    return p;
  }
  static CurvePiece arc(Point2 c, double radius, double t0, double t1) {
    CurvePiece p;
    p.kind = Kind::Arc;
    p.center = c;
    p.radius = radius;
    p.t0 = t0;
    p.t1 = t1;
    return p;
  }

  Point2 point(double s) const {
    if (kind == Kind::Segment) return {a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1])};
    const double t = t0 + s * (t1 - t0);
    return {center[0] + radius * std::cos(t), center[1] + radius * std::sin(t)};
  }
  /// Derivative of point(s).
  Point2 velocity(double s) const {
    if (kind == Kind::Segment) return b - a;
    const double t = t0 + s * (t1 - t0);
    const double w = t1 - t0;
    return {-radius * w * std::sin(t), radius * w * std::cos(t)};
  }
  double length() const {
    return kind == Kind::Segment ? distance(a, b) : radius * std::abs(t1 - t0);
  }
  CurvePiece reversed() const {
    CurvePiece p = *this;
    std::swap(p.a, p.b);
    std::swap(p.t0, p.t1);
    return p;
  }
  CurvePiece sub(double s0, double s1) const {
    if (kind == Kind::Segment) return segment(point(s0), point(s1));
    return arc(center, radius, t0 + s0 * (t1 - t0), t0 + s1 * (t1 - t0));
  }

  /// Parameters in [0, 1] where the piece meets the line {x_axis = c}.
  void cut_line(int axis, double c, std::vector<double>& out) const {
    if (kind == Kind::Segment) {
      const double d = b[axis] - a[axis];
      if (d != 0.0) push(out, (c - a[axis]) / d);
      return;
    }
    const double q = (c - center[axis]) / radius;
    if (std::abs(q) > 1.0) return;
    const double base = axis == 0 ? std::acos(q) : std::asin(q);
    if (axis == 0) {
      push_angle(out, base);
      push_angle(out, -base);
    } else {
      push_angle(out, base);
      push_angle(out, std::numbers::pi - base);
    }
  }

  /// Parameters where the piece meets the circle |p - q| = rho.
  void cut_circle(const Point2& q, double rho, std::vector<double>& out) const {
    if (kind == Kind::Segment) {
      const Point2 d = b - a;
      const Point2 f = a - q;
      const double A = dot(d, d);
      const double B = 2.0 * dot(f, d);
      const double C = dot(f, f) - rho * rho;
      const double disc = B * B - 4.0 * A * C;
      if (A == 0.0 || disc < 0.0) return;
      const double sq = std::sqrt(disc);
      push(out, (-B - sq) / (2.0 * A));
      push(out, (-B + sq) / (2.0 * A));
      return;
    }
    const Point2 d = q - center;
    const double dist = norm(d);
    if (dist == 0.0 || dist > radius + rho || dist < std::abs(radius - rho)) return;
    const double base = std::atan2(d[1], d[0]);
    const double cosang = std::clamp((radius * radius + dist * dist - rho * rho) / (2.0 * radius * dist), -1.0, 1.0);
    const double ang = std::acos(cosang);
    push_angle(out, base + ang);
    push_angle(out, base - ang);
  }

 private:
  static void push(std::vector<double>& out, double s) {
    if (s > 0.0 && s < 1.0) out.push_back(s);
  }
  void push_angle(std::vector<double>& out, double theta) const {
    const double w = t1 - t0;
    if (w == 0.0) return;
    constexpr double two_pi = 2.0 * std::numbers::pi;
    double rel = std::fmod((theta - t0) * (w > 0 ? 1.0 : -1.0), two_pi);
    if (rel < 0.0) rel += two_pi;
    push(out, rel / std::abs(w));
  }
};

/// Component of an exceptional set seen from the plane z = 0: a planar box
/// and its vertical offset, so that dist^2 = d_plane^2 + dz^2.
struct PlanarComponent {
  Box<2> box;
  double dz = 0.0;

  double distance(const Point2& p) const {
    const double d = box.distance(p);
    return std::sqrt(d * d + dz * dz);
  }
  /// Planar radius of the level set {dist = r}; negative when empty.
  double planar_radius(double r) const { return r > dz ? std::sqrt(r * r - dz * dz) : -1.0; }
};

inline std::vector<PlanarComponent> planar_components(const ExceptionalSet<2>& e) {
  std::vector<PlanarComponent> out;
  for (const auto& b : e.components()) out.push_back({b, 0.0});
  return out;
}

/// Components of a set in R^3 as seen from the plane z = 0.
inline std::vector<PlanarComponent> planar_components(const ExceptionalSet<3>& e) {
  std::vector<PlanarComponent> out;
  for (const auto& b : e.components()) {
    Box<2> p{{b.lo[0], b.lo[1]}, {b.hi[0], b.hi[1]}};
    out.push_back({p, std::max({b.lo[2], 0.0, -b.hi[2]})});
  }
  return out;
}

inline double planar_distance(const std::vector<PlanarComponent>& comps, const Point2& p) {
  double d = kInf;
  for (const auto& c : comps) d = std::min(d, c.distance(p));
  return d;
}

/// Counter-clockwise boundary {dist = rho} of the planar box, as pieces.
inline std::vector<CurvePiece> rounded_rect(const Box<2>& b, double rho) {
  constexpr double pi = std::numbers::pi;
  const double x0 = b.lo[0], x1 = b.hi[0], y0 = b.lo[1], y1 = b.hi[1];
  std::vector<CurvePiece> out;
  auto seg = [&](Point2 p, Point2 q) {
    if (p != q) out.push_back(CurvePiece::segment(p, q));
  };
  seg({x0, y0 - rho}, {x1, y0 - rho});
  out.push_back(CurvePiece::arc({x1, y0}, rho, -pi / 2, 0.0));
  seg({x1 + rho, y0}, {x1 + rho, y1});
  out.push_back(CurvePiece::arc({x1, y1}, rho, 0.0, pi / 2));
  seg({x1, y1 + rho}, {x0, y1 + rho});
  out.push_back(CurvePiece::arc({x0, y1}, rho, pi / 2, pi));
  seg({x0 - rho, y1}, {x0 - rho, y0});
  out.push_back(CurvePiece::arc({x0, y0}, rho, pi, 3 * pi / 2));
  return out;
}

namespace detail {

struct Interval {
  double lo, hi;
};

/// a \ b for sorted, disjoint interval lists.
inline std::vector<Interval> interval_difference(std::vector<Interval> a, std::vector<Interval> b) {
  auto by_lo = [](const Interval& u, const Interval& v) { return u.lo < v.lo; };
  std::sort(a.begin(), a.end(), by_lo);
  std::sort(b.begin(), b.end(), by_lo);
  std::vector<Interval> out;
  std::size_t j = 0;
  for (auto iv : a) {
    double cur = iv.lo;
    while (j < b.size() && b[j].hi <= cur) ++j;
    std::size_t k = j;
    while (k < b.size() && b[k].lo < iv.hi) {
      if (b[k].lo > cur) out.push_back({cur, b[k].lo});
      cur = std::max(cur, b[k].hi);
      ++k;
    }
    if (cur < iv.hi) out.push_back({cur, iv.hi});
  }
  // merge touching intervals
  std::vector<Interval> merged;
  for (const auto& iv : out) {
    if (!merged.empty() && merged.back().hi == iv.lo) {
      merged.back().hi = iv.hi;
    } else {
      merged.push_back(iv);
    }
  }
  return merged;
}

/// Append the breakpoints of `piece` against every piece boundary of the
/// level set of `comps` at radius r and against the given axis lines.
inline void level_cuts(const CurvePiece& piece, const std::vector<PlanarComponent>& comps, double r,
                       std::vector<double>& cuts) {
  for (const auto& c : comps) {
    const double rho = c.planar_radius(r);
    if (rho <= 0.0) continue;
    piece.cut_line(0, c.box.lo[0] - rho, cuts);
    piece.cut_line(0, c.box.hi[0] + rho, cuts);
    piece.cut_line(1, c.box.lo[1] - rho, cuts);
    piece.cut_line(1, c.box.hi[1] + rho, cuts);
    piece.cut_line(0, c.box.lo[0], cuts);
    piece.cut_line(0, c.box.hi[0], cuts);
    piece.cut_line(1, c.box.lo[1], cuts);
    piece.cut_line(1, c.box.hi[1], cuts);
    for (int corner = 0; corner < 4; ++corner) {
      const Point2 q{(corner & 1) ? c.box.hi[0] : c.box.lo[0], (corner & 2) ? c.box.hi[1] : c.box.lo[1]};
      piece.cut_circle(q, rho, cuts);
    }
  }
}

inline void rect_cuts(const CurvePiece& piece, const std::vector<Rect>& rects, std::vector<double>& cuts) {
  for (const auto& r : rects) {
    piece.cut_line(0, r.x0, cuts);
    piece.cut_line(0, r.x1, cuts);
    piece.cut_line(1, r.y0, cuts);
    piece.cut_line(1, r.y1, cuts);
  }
}

/// Split `piece` at the cuts and keep maximal runs whose midpoints satisfy keep().
template <class Keep>
void keep_runs(const CurvePiece& piece, std::vector<double> cuts, Keep&& keep, std::vector<CurvePiece>& out) {
  cuts.push_back(0.0);
  cuts.push_back(1.0);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  double run_start = -1.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double s0 = cuts[i], s1 = cuts[i + 1];
    if (s1 - s0 < 1e-14) continue;
    const bool k = keep(piece.point(0.5 * (s0 + s1)));
    if (k && run_start < 0.0) run_start = s0;
    if (!k && run_start >= 0.0) {
      out.push_back(piece.sub(run_start, s0));
      run_start = -1.0;
    }
  }
  if (run_start >= 0.0) out.push_back(piece.sub(run_start, 1.0));
}

inline bool in_rects(const std::vector<Rect>& rects, const Point2& p) {
  for (const auto& r : rects) {
    if (r.contains(p)) return true;
  }
  return false;
}

}  // namespace detail

/// Boundary of a union of interior-disjoint rectangles, oriented counter-
/// clockwise (the region on the left).  Shared facets cancel exactly when
/// the adjoining rectangles carry bitwise-equal coordinates.
inline std::vector<CurvePiece> boundary_edges(const std::vector<Rect>& rects) {
  using detail::Interval;
  std::vector<CurvePiece> out;
  for (int axis = 0; axis < 2; ++axis) {
    // plane coordinate -> (facets with the region below, facets with the region above)
    std::map<double, std::pair<std::vector<Interval>, std::vector<Interval>>> planes;
    for (const auto& r : rects) {
      const double lo = axis == 0 ? r.x0 : r.y0;
      const double hi = axis == 0 ? r.x1 : r.y1;
      const Interval t = axis == 0 ? Interval{r.y0, r.y1} : Interval{r.x0, r.x1};
      planes[hi].first.push_back(t);
      planes[lo].second.push_back(t);
    }
    for (const auto& [c, sides] : planes) {
      const auto only_below = detail::interval_difference(sides.first, sides.second);
      const auto only_above = detail::interval_difference(sides.second, sides.first);
      for (const auto& iv : only_below) {
        // region on the low side: outward normal +axis
        if (axis == 0) {
          out.push_back(CurvePiece::segment({c, iv.lo}, {c, iv.hi}));
        } else {
          out.push_back(CurvePiece::segment({iv.hi, c}, {iv.lo, c}));
        }
      }
      for (const auto& iv : only_above) {
        if (axis == 0) {
          out.push_back(CurvePiece::segment({c, iv.hi}, {c, iv.lo}));
        } else {
          out.push_back(CurvePiece::segment({iv.lo, c}, {iv.hi, c}));
        }
      }
    }
  }
  return out;
}

inline std::vector<CurvePiece> boundary_edges(const CubeSet<2>& a, const Rect& window = {}) {
  return boundary_edges(clipped_rects(a, window));
}

inline double total_length(const std::vector<CurvePiece>& pieces) {
  double s = 0.0;
  for (const auto& p : pieces) s += p.length();
  return s;
}

/// Pieces of the level set {dist(., E) = r} inside the closed union of
/// rects, oriented clockwise around E (so that the region farther than r
/// from E lies on the left).
inline std::vector<CurvePiece> level_pieces(const std::vector<Rect>& rects, const std::vector<PlanarComponent>& comps,
                                            double r) {
  std::vector<CurvePiece> out;
  for (std::size_t j = 0; j < comps.size(); ++j) {
    const double rho = comps[j].planar_radius(r);
    if (rho <= 0.0) continue;
    for (const auto& piece : rounded_rect(comps[j].box, rho)) {
      std::vector<double> cuts;
      detail::level_cuts(piece, comps, r, cuts);
      detail::rect_cuts(piece, rects, cuts);
      auto keep = [&](const Point2& p) {
        if (!detail::in_rects(rects, p)) return false;
        for (std::size_t k = 0; k < comps.size(); ++k) {
          if (k == j) continue;
          const double d = comps[k].distance(p);
          // Coincident level curves of two components are kept once.
          if (k < j ? d <= r * (1.0 + 1e-12) : d < r * (1.0 - 1e-12)) return false;
        }
        return true;
      };
      std::vector<CurvePiece> kept;
      detail::keep_runs(piece, cuts, keep, kept);
      for (const auto& k : kept) out.push_back(k.reversed());
    }
  }
  return out;
}

/// Oriented boundary of (union of rects) minus the open neighbourhood B(E, r).
inline std::vector<CurvePiece> excised_boundary(const std::vector<Rect>& rects,
                                                const std::vector<PlanarComponent>& comps, double r) {
  std::vector<CurvePiece> out;
  for (const auto& edge : boundary_edges(rects)) {
    std::vector<double> cuts;
    detail::level_cuts(edge, comps, r, cuts);
    detail::keep_runs(edge, cuts, [&](const Point2& p) { return planar_distance(comps, p) >= r; }, out);
  }
  const auto level = level_pieces(rects, comps, r);
  out.insert(out.end(), level.begin(), level.end());
  return out;
}

/// Area of (union of rects) minus B(E, r) complement, i.e. of the part of
/// the rects within distance < r of E.  Integrates the exact vertical
/// section length in x with adaptive quadrature.
inline QuadratureResult neighborhood_area(const std::vector<Rect>& rects, const std::vector<PlanarComponent>& comps,
                                          double r, const QuadratureOptions& opt = {1e-13, 1e-12, 400000}) {
  QuadratureResult total;
  total.converged = true;
  std::vector<double> xs;
  for (const auto& c : comps) {
    const double rho = c.planar_radius(r);
    if (rho <= 0.0) continue;
    for (double v : {c.box.lo[0] - rho, c.box.lo[0], c.box.hi[0], c.box.hi[0] + rho}) xs.push_back(v);
  }
  for (const auto& rect : rects) {
    auto section = [&](double x) {
      std::vector<detail::Interval> ivs;
      for (const auto& c : comps) {
        const double rho = c.planar_radius(r);
        if (rho <= 0.0) continue;
        const double dx = std::max({c.box.lo[0] - x, 0.0, x - c.box.hi[0]});
        if (dx >= rho) continue;
        const double h = std::sqrt(rho * rho - dx * dx);
        const double lo = std::max(c.box.lo[1] - h, rect.y0);
        const double hi = std::min(c.box.hi[1] + h, rect.y1);
        if (hi > lo) ivs.push_back({lo, hi});
      }
      std::sort(ivs.begin(), ivs.end(), [](const auto& u, const auto& v) { return u.lo < v.lo; });
      double len = 0.0, cur = -kInf;
      for (const auto& iv : ivs) {
        const double lo = std::max(iv.lo, cur);
        if (iv.hi > lo) len += iv.hi - lo;
        cur = std::max(cur, iv.hi);
      }
      return len;
    };
    std::vector<double> br{rect.x0, rect.x1};
    for (double v : xs) {
      if (v > rect.x0 && v < rect.x1) br.push_back(v);
    }
    std::sort(br.begin(), br.end());
    br.erase(std::unique(br.begin(), br.end()), br.end());
    const auto q = integrate(section, br, opt);
    total.value += q.value;
    total.error += q.error;
    total.panels += q.panels;
    total.converged = total.converged && q.converged;
  }
  return total;
}

/// A radius is regular when the level set passes within `tol` of no rect
/// vertex and no straight piece of it runs along a rect edge.
inline bool is_regular_radius(const std::vector<Rect>& rects, const std::vector<PlanarComponent>& comps, double r,
                              double tol = 1e-9) {
  for (const auto& rect : rects) {
    for (const Point2 v : {Point2{rect.x0, rect.y0}, Point2{rect.x1, rect.y0}, Point2{rect.x0, rect.y1},
                           Point2{rect.x1, rect.y1}}) {
      if (std::abs(planar_distance(comps, v) - r) < tol) return false;
    }
    for (const auto& c : comps) {
      const double rho = c.planar_radius(r);
      if (rho <= 0.0) continue;
      for (double x : {c.box.lo[0] - rho, c.box.hi[0] + rho}) {
        if (std::abs(x - rect.x0) < tol || std::abs(x - rect.x1) < tol) return false;
      }
      for (double y : {c.box.lo[1] - rho, c.box.hi[1] + rho}) {
        if (std::abs(y - rect.y0) < tol || std::abs(y - rect.y1) < tol) return false;
      }
    }
  }
  return true;
}

}  // namespace stokeslab
