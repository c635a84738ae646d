#pragma once

// Gauges, regularity functions, Cousin's lemma on dyadic cubes and the
// Howard-Cousin decomposition of cube and chart currents.

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "stokeslab/circulation.hpp"
#include "stokeslab/currents.hpp"
#include "stokeslab/dyadic.hpp"
#include "stokeslab/error.hpp"
#include "stokeslab/exceptional_set.hpp"
#include "stokeslab/forms.hpp"
#include "stokeslab/minkowski.hpp"

namespace stokeslab {

/// offset + scale * dist(x, anchor); the anchor defaults to the zero set.
struct GaugeTerm {
  double offset = 0.0;
  double scale = 0.0;
  std::optional<ExceptionalSet<3>> anchor;
};

/// Terms active on a closed box (everywhere when `region` is empty).
struct GaugePiece {
  std::optional<Box<3>> region;
  std::vector<GaugeTerm> terms;
};

/// delta(x) = min over the pieces whose region holds x of the min of their
/// terms, and 0 on Z.  Each piece is continuous on a closed set, so the
/// minimum is lower semicontinuous.
class Gauge {
 public:
  Gauge(ExceptionalSet<3> zero, std::vector<GaugePiece> pieces) : zero_(std::move(zero)), pieces_(std::move(pieces)) {
    bool global = false;
    for (const auto& p : pieces_) {
      global = global || !p.region;
      if (p.terms.empty()) throw StructuralError("gauge piece without terms");
      for (const auto& t : p.terms) {
        if (!(t.offset >= 0.0) || !(t.scale >= 0.0) || !(t.offset + t.scale > 0.0)) {
          throw DomainError("gauge terms need offset >= 0, scale >= 0 and a positive sum");
        }
        if (t.offset == 0.0 && t.anchor) {
          throw StructuralError("a term without offset may only measure distance to the zero set");
        }
      }
    }
    if (!global) throw StructuralError("gauge needs a piece without region so that it is defined everywhere");
  }

  static Gauge constant(double c) { return Gauge({}, {GaugePiece{std::nullopt, {{c, 0.0, std::nullopt}}}}); }

  /// min(cap, scale * dist(x, Z)).
  static Gauge distance_to(ExceptionalSet<3> z, double scale = 1.0, double cap = kInf) {
    std::vector<GaugeTerm> terms{{0.0, scale, std::nullopt}};
    if (std::isfinite(cap)) terms.push_back({cap, 0.0, std::nullopt});
    return Gauge(std::move(z), {GaugePiece{std::nullopt, terms}});
  }

  /// offset + scale * dist(x, p).
  static Gauge distance_plus(const Point3& p, double offset, double scale = 1.0) {
    return Gauge({}, {GaugePiece{std::nullopt, {{offset, scale, ExceptionalSet<3>::point(p)}}}});
  }

  double operator()(const Point3& x) const {
    if (!zero_.empty() && zero_.contains(x)) return 0.0;
    double v = kInf;
    for (const auto& p : pieces_) {
      if (p.region && p.region->distance(x) > 0.0) continue;
      for (const auto& t : p.terms) {
        const double d = t.scale == 0.0 ? 0.0 : (t.anchor ? t.anchor->distance(x) : zero_.distance(x));
        v = std::min(v, t.offset + t.scale * d);
      }
    }
    return v;
  }

  /// Pointwise multiple f * delta for f in (0, 1].
  Gauge scaled(double f) const {
    if (!(f > 0.0 && f <= 1.0)) throw DomainError("gauge scale factor must lie in (0, 1]");
    Gauge g = *this;
    for (auto& p : g.pieces_) {
      for (auto& t : p.terms) {
        t.offset *= f;
        t.scale *= f;
      }
    }
    return g;
  }

  const ExceptionalSet<3>& zero_set() const { return zero_; }
  const std::vector<GaugePiece>& pieces() const { return pieces_; }

 private:
  ExceptionalSet<3> zero_;
  std::vector<GaugePiece> pieces_;
};

/// Regularity of the cells obtained by subdividing `root`: all of them are
/// similar, so this is also the regularity of each one.
template <int M>
double cell_regularity(const RootBox<M>& root) {
  DyadicCube<M> c;
  c.root = root;
  return c.measure() / (c.perimeter() * c.diameter());
}

/// eta_T on a graph chart: (L+ L-)^{-m} times the cell regularity.
inline double chart_eta_bound(const Current& t) {
  const double cell = cell_regularity(domain_of(t).root());
  if (const auto* c = std::get_if<ChartCurrent>(&t)) {
    return cell / std::pow(c->chart.lip_plus * c->chart.lip_minus, 2);
  }
  return cell;
}

/// Constant eta, or a fixed fraction of eta_T on each chart.
struct RegularityFn {
  enum class Kind { Constant, FractionOfBound };
  Kind kind = Kind::FractionOfBound;
  double value = 0.5;

  static RegularityFn constant(double c) {
    if (!(c >= 0.0)) throw DomainError("regularity constant must be nonnegative");
    return {Kind::Constant, c};
  }
  static RegularityFn fraction(double f) {
    if (!(f > 0.0 && f < 1.0)) throw DomainError("regularity fraction must lie in (0, 1)");
    return {Kind::FractionOfBound, f};
  }

  /// eta on a chart whose bound is `eta_t`; DomainError unless eta < eta_t.
  double on_chart(double eta_t) const {
    const double eta = kind == Kind::Constant ? value : value * eta_t;
    if (!(eta < eta_t)) {
      throw DomainError("regularity function " + std::to_string(eta) + " is not below the chart bound " +
                        std::to_string(eta_t));
    }
    return eta;
  }
};

/// Continuous subadditive function on subcurrents.
class SubadditiveFn {
 public:
  enum class Kind { Mass, AbsCirculation, MaxOf };

  static SubadditiveFn mass() { return SubadditiveFn(Kind::Mass); }
  static SubadditiveFn abs_circulation(FormField<3> omega) {
    SubadditiveFn f(Kind::AbsCirculation);
    f.omega_ = std::make_shared<FormField<3>>(std::move(omega));
    return f;
  }
  static SubadditiveFn max_of(std::vector<SubadditiveFn> parts) {
    if (parts.empty()) throw StructuralError("max of an empty family");
    SubadditiveFn f(Kind::MaxOf);
    f.parts_ = std::move(parts);
    return f;
  }

  double operator()(const Current& s) const {
    if (is_zero(s)) return 0.0;
    switch (kind_) {
      case Kind::Mass: return stokeslab::mass(s).value;
      case Kind::AbsCirculation: return std::abs(circulation(*omega_, s).value);
      case Kind::MaxOf: {
        double v = 0.0;
        for (const auto& p : parts_) v = std::max(v, p(s));
        return v;
      }
    }
    return 0.0;
  }

  Kind kind() const { return kind_; }
  std::string name() const {
    switch (kind_) {
      case Kind::Mass: return "mass";
      case Kind::AbsCirculation: return "|circulation(" + omega_->name + ")|";
      case Kind::MaxOf: {
        std::string s = "max(";
        for (std::size_t i = 0; i < parts_.size(); ++i) s += (i ? ", " : "") + parts_[i].name();
        return s + ")";
      }
    }
    return "?";
  }

 private:
  explicit SubadditiveFn(Kind k) : kind_(k) {}
  Kind kind_;
  std::shared_ptr<const FormField<3>> omega_;
  std::vector<SubadditiveFn> parts_;
};

template <int M>
struct TaggedCube {
  Point<M> tag{};
  DyadicCube<M> cube;
};

/// Cousin's lemma: a delta-fine partition of the domain into dyadic cubes,
/// each tagged at the first of (center, vertices) where delta > diam.
template <int M, class Delta>
std::vector<TaggedCube<M>> cousin_decompose(const CubeSet<M>& domain, Delta&& delta, double eta,
                                            int max_generation = 30) {
  const double cell = cell_regularity(domain.root());
  if (!(eta >= 0.0 && eta < cell)) {
    throw DomainError("eta must lie below the cube regularity " + std::to_string(cell));
  }
  std::vector<TaggedCube<M>> out;
  std::vector<DyadicCube<M>> stack(domain.cubes().rbegin(), domain.cubes().rend());
  while (!stack.empty()) {
    const DyadicCube<M> q = stack.back();
    stack.pop_back();
    const double d = q.diameter();
    std::optional<Point<M>> tag;
    if (delta(q.center()) > d) tag = q.center();
    if (!tag) {
      for (const auto& v : q.vertices()) {
        if (delta(v) > d) {
          tag = v;
          break;
        }
      }
    }
    if (tag) {
      out.push_back({*tag, q});
      continue;
    }
    const auto kids = subdivide(q, max_generation);
    stack.insert(stack.end(), kids.rbegin(), kids.rend());
  }
  return out;
}

template <int M>
std::vector<TaggedCube<M>> cousin_decompose(const DyadicCube<M>& root, const Gauge& delta, double eta,
                                            int max_generation = 30) {
  if (!delta.zero_set().empty()) throw StructuralError("Cousin's lemma needs a gauge without zeros");
  CubeSet<M> dom(root.root, {root});
  auto g = [&](const Point<M>& p) {
    if constexpr (M == 3) {
      return delta(p);
    } else {
      Point3 x{};
      for (int i = 0; i < M; ++i) x[i] = p[i];
      return delta(x);
    }
  };
  return cousin_decompose<M>(dom, g, eta, max_generation);
}

/// One tagged piece with the values recorded by the builder.
struct TaggedPiece {
  Point3 tag{};
  Point2 param_tag{};
  Current piece;
  int chart = 0;
  DyadicCube<2> cube;
  double diameter = 0.0;
  double mass = 0.0;
  double boundary_mass = 0.0;
  double regularity = 0.0;
  double gauge = 0.0;
  double eta = 0.0;
};

struct TaggedFamily {
  std::vector<TaggedPiece> pieces;
  /// The decomposed charts and what each leaves uncovered.
  std::vector<Current> charts;
  std::vector<Current> remainders;
  std::vector<double> chart_eta;
  double epsilon = 0.0;
  /// Radius of the discarded neighbourhood of E_T (0 when E_T is empty).
  double radius = 0.0;
  double remainder_mass = 0.0;
  /// Sum over charts of G(T_j - [P_j]), an upper bound of G(T - [P]).
  double remainder_g = 0.0;
  std::string g_name;
  std::string evidence;

  double body_mass() const {
    double m = 0.0;
    for (const auto& p : pieces) m += p.mass;
    return m;
  }
  double max_diameter() const {
    double d = 0.0;
    for (const auto& p : pieces) d = std::max(d, p.diameter);
    return d;
  }
  double min_regularity() const {
    double r = kInf;
    for (const auto& p : pieces) r = std::min(r, p.regularity);
    return r;
  }
};

struct ExcisionResult {
  Current current;
  double radius = 0.0;
  Certified removed_mass;
  Certified slice_mass;
  double slice_bound = 0.0;
  int tried = 0;
};

/// T_eps = T _ B(E, r)^c for a radius r in (r0/2, r0) whose slice obeys the
/// mean-value bound (2/r0) ||T||(B(E, r0)).
inline ExcisionResult excise(const Current& t, const ExceptionalSet<3>& e, double eps, double r0, int budget = 64) {
  if (!(r0 > 0.0) || !(eps > 0.0)) throw DomainError("excision needs eps > 0 and r0 > 0");
  ExcisionResult out;
  const Certified near = e.empty() ? Certified{0.0, 0.0} : neighborhood_mass(t, e, r0);
  if (!(near.value + near.error < eps)) {
    throw DomainError("||T||(B(E, r0)) = " + num(near.value) + " is not below eps " + num(eps));
  }
  out.slice_bound = 2.0 / r0 * (near.value + near.error);
  if (near.value == 0.0) {
    out.current = t;
    out.radius = 0.75 * r0;
    out.removed_mass = {0.0, 0.0};
    out.slice_mass = {0.0, 0.0};
    return out;
  }
  double best = kInf;
  for (int i = 0; i < budget; ++i) {
    // 3/4 first, then a van der Corput walk through (1/2, 1)
    double u = 0.5;
    if (i > 0) {
      u = 0.0;
      double base = 0.5;
      for (int n = i; n > 0; n >>= 1, base *= 0.5) u += (n & 1) * base;
    }
    const double r = r0 * (0.5 + 0.5 * u);
    if (!(r > 0.5 * r0 && r < r0)) continue;
    ++out.tried;
    Slice s;
    try {
      s = slice(t, e, r);
    } catch (const DomainError&) {
      continue;
    }
    best = std::min(best, s.mass.value);
    if (s.mass.value > out.slice_bound) continue;
    out.radius = s.radius;
    out.slice_mass = s.mass;
    out.removed_mass = neighborhood_mass(t, e, s.radius);
    if (const auto* c = std::get_if<CubeCurrent>(&t)) {
      if (c->excision) throw StructuralError("current is already excised");
      CubeCurrent k = *c;
      k.excision = Excision{e, s.radius};
      out.current = k;
    } else {
      const auto lv = level_height(t, e);
      if (!lv) throw StructuralError("chart excision needs E at one height y above the chart");
      out.current = restrict(t, HalfSpace{1, *lv - s.radius, true});
    }
    return out;
  }
  throw BudgetError("no radius in (r0/2, r0) met the slice bound after " + std::to_string(out.tried) +
                    " samples; smallest slice mass " + std::to_string(best));
}

struct HowardCousinOptions {
  int max_generation = 24;
  /// Extra halvings of the discard radius before giving up.
  int retries = 8;
  ContentBudget content;
};

namespace detail {

/// Lower bound of the distance from phi(rect) to E using the planar shadow
/// of each component.
inline double shadow_distance(const Rect& r, const ExceptionalSet<3>& e) {
  double d = kInf;
  for (const auto& b : e.components()) {
    const double dx = std::max({b.lo[0] - r.x1, 0.0, r.x0 - b.hi[0]});
    const double dy = std::max({b.lo[1] - r.y1, 0.0, r.y0 - b.hi[1]});
    d = std::min(d, std::hypot(dx, dy));
  }
  return d;
}

inline double lip_of(const Current& t) {
  if (const auto* c = std::get_if<ChartCurrent>(&t)) return c->chart.lip_plus;
  return 1.0;
}

struct ChartRun {
  std::vector<TaggedPiece> pieces;
  CubeSet<2> rest;
};

/// Decompose one chart; cubes near E or cut by the window go to `rest`
/// once they reach `floor` generations.
inline ChartRun decompose_chart(const Current& t, int index, const ExceptionalSet<3>& e, const Gauge& delta,
                                double eta, double r, int floor, int max_generation) {
  const double lip = lip_of(t);
  if (!std::isfinite(lip)) throw StructuralError("chart without a finite Lipschitz bound");
  const Rect window = window_of(t);
  ChartRun run;
  std::vector<DyadicCube<2>> rest;
  std::vector<DyadicCube<2>> stack(domain_of(t).cubes().rbegin(), domain_of(t).cubes().rend());
  auto pulled = [&](const Point2& p) { return delta(embed(t, p)) / lip; };
  while (!stack.empty()) {
    const auto q = stack.back();
    stack.pop_back();
    const Rect rect = cube_rect(q);
    const Rect inside = rect.intersect(window);
    if (inside.empty()) continue;
    const bool cut = !(inside == rect);
    const bool near = !e.empty() && shadow_distance(rect, e) < r;
    auto descend = [&] {
      if (q.generation >= floor) {
        rest.push_back(q);
      } else {
        const auto kids = subdivide(q, max_generation);
        stack.insert(stack.end(), kids.rbegin(), kids.rend());
      }
    };
    if (near) {
      descend();
      continue;
    }
    // tag candidates: center, then vertices, of the carried rectangle
    const double d = std::hypot(inside.x1 - inside.x0, inside.y1 - inside.y0);
    std::optional<Point2> tag;
    for (const Point2 v : {Point2{0.5 * (inside.x0 + inside.x1), 0.5 * (inside.y0 + inside.y1)},
                           Point2{inside.x0, inside.y0}, Point2{inside.x1, inside.y0}, Point2{inside.x0, inside.y1},
                           Point2{inside.x1, inside.y1}}) {
      if (pulled(v) > d) {
        tag = v;
        break;
      }
    }
    if (!tag) {
      if (cut) {
        descend();
      } else {
        const auto kids = subdivide(q, max_generation);
        stack.insert(stack.end(), kids.rbegin(), kids.rend());
      }
      continue;
    }
    TaggedPiece p;
    p.param_tag = *tag;
    p.tag = embed(t, *tag);
    p.cube = q;
    p.chart = index;
    p.piece = restrict(t, CubeSet<2>(q.root, {q}));
    p.mass = mass(p.piece).value;
    p.boundary_mass = boundary_mass(p.piece).value;
    // L+ times the parameter diagonal: the bound the fineness test used
    p.diameter = lip * d;
    p.regularity = p.mass / (p.boundary_mass * p.diameter);
    p.gauge = delta(p.tag);
    p.eta = eta;
    if (!(p.regularity > eta)) {
      // a sliver cut by the window: refine it; a whole cell never fails
      if (cut) {
        descend();
        continue;
      }
      throw InvariantError("piece regularity " + std::to_string(p.regularity) + " does not exceed eta " +
                           std::to_string(eta));
    }
    run.pieces.push_back(std::move(p));
  }
  run.rest = CubeSet<2>(domain_of(t).root(), rest);
  return run;
}

}  // namespace detail

/// Howard-Cousin decomposition of a list of nonoverlapping charts: a
/// delta-fine, eta-regular family with G(T - [P]) < eps.
inline TaggedFamily howard_cousin(const std::vector<Current>& charts, const ExceptionalSet<3>& e_t,
                                  const Gauge& delta, const RegularityFn& eta, const SubadditiveFn& g, double eps,
                                  const HowardCousinOptions& opt = {}) {
  if (!(eps > 0.0)) throw DomainError("fullness budget eps must be positive");
  if (charts.empty()) throw StructuralError("nothing to decompose");
  for (const auto& t : charts) {
    if (const auto* c = std::get_if<CubeCurrent>(&t); c && c->excision) {
      throw StructuralError("decompose the unexcised current; E_T is excised by the decomposition");
    }
  }
  if (!delta.zero_set().subset_of(e_t)) throw StructuralError("gauge vanishes outside the singular set E_T");

  TaggedFamily fam;
  fam.epsilon = eps;
  fam.charts = charts;
  fam.g_name = g.name();

  // disposability and the starting discard radius
  double r = 0.0;
  if (!e_t.empty()) {
    double c = 0.0;
    double total = 0.0;
    for (const auto& t : charts) {
      const auto ev = disposability_evidence(t, e_t, opt.content);
      if (!ev.certified) throw RefusalError("E_T is not certified disposable: " + ev.reason);
      c = std::max(c, ev.constant);
      total += mass(t).value;
    }
    fam.evidence = "content bounded by C = " + std::to_string(c);
    // ||T||(B(E, 2r)) <= 4 C r, inside the budget eps / 2
    r = std::min(opt.content.r0, eps / (8.0 * (c + 1e-3) * static_cast<double>(charts.size()) + 1e-300));
    (void)total;
  } else {
    fam.evidence = "empty singular set";
  }

  for (const auto& t : charts) fam.chart_eta.push_back(eta.on_chart(chart_eta_bound(t)));

  for (int attempt = 0; attempt <= opt.retries; ++attempt) {
    fam.pieces.clear();
    fam.remainders.clear();
    fam.remainder_mass = 0.0;
    fam.remainder_g = 0.0;
    fam.radius = r;
    for (std::size_t j = 0; j < charts.size(); ++j) {
      const auto& t = charts[j];
      const DyadicCube<2> root{0, {}, domain_of(t).root()};
      const double lip = detail::lip_of(t);
      const double root_diam = root.diameter() * lip;
      // near E the discard layer has cells of diameter below r; along a
      // window the slivers left over have total area about perimeter * side
      const double scale = e_t.empty() ? eps / (2.0 * root.perimeter() * lip * lip) * root_diam : r;
      int floor = static_cast<int>(std::ceil(std::log2(std::max(1.0, root_diam / scale)))) + attempt;
      floor = std::min(floor, opt.max_generation);
      auto run = detail::decompose_chart(t, static_cast<int>(j), e_t, delta, fam.chart_eta[j], r, floor,
                                         opt.max_generation);
      const Current rest = restrict(t, run.rest);
      fam.remainders.push_back(rest);
      fam.remainder_mass += is_zero(rest) ? 0.0 : mass(rest).value;
      fam.remainder_g += g(rest);
      for (auto& p : run.pieces) fam.pieces.push_back(std::move(p));
    }
    if (fam.remainder_g < eps) return fam;
    if (!e_t.empty()) r *= 0.5;
  }
  throw BudgetError("remainder " + fam.g_name + " = " + num(fam.remainder_g) +
                    " stays above eps = " + num(eps) + " after " + std::to_string(opt.retries) +
                    " refinements");
}

inline TaggedFamily howard_cousin(const Current& t, const ExceptionalSet<3>& e_t, const Gauge& delta,
                                  const RegularityFn& eta, const SubadditiveFn& g, double eps,
                                  const HowardCousinOptions& opt = {}) {
  return howard_cousin(std::vector<Current>{t}, e_t, delta, eta, g, eps, opt);
}

}  // namespace stokeslab
