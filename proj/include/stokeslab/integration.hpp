#pragma once

// Riemann sums over tagged families, the Saks-Henstock and differentiation
// tests, and the end-to-end Stokes verdict for a (current, form) pair.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "stokeslab/circulation.hpp"
#include "stokeslab/cousin.hpp"
#include "stokeslab/currents.hpp"
#include "stokeslab/forms.hpp"
#include "stokeslab/quadrature.hpp"

namespace stokeslab {

using ScalarField = std::function<double(const Point3&)>;

/// sigma(f, P) = sum f(x) M(S).
inline double riemann_sum(const ScalarField& f, const TaggedFamily& fam) {
  double s = 0.0;
  for (const auto& p : fam.pieces) s += f(p.tag) * p.mass;
  return s;
}

/// sigma(<d omega, T>, P): the integrand depends on the tangent plane, so
/// it is evaluated per piece at the parameter tag.
inline double riemann_sum(const std::function<double(const TaggedPiece&)>& f, const TaggedFamily& fam) {
  double s = 0.0;
  for (const auto& p : fam.pieces) s += f(p) * p.mass;
  return s;
}

namespace detail {

inline std::vector<double> x_breaks_for(const Current& t, const Rect& r) {
  double width = kInf;
  if (const auto* c = std::get_if<ChartCurrent>(&t)) width = c->chart.field->x_period(r.y0, r.y1) / 4.0;
  return panel_breaks(r.x0, r.x1, width);
}

inline std::vector<double> y_breaks_for(const Current& t, const Rect& r) {
  std::vector<double> extra;
  if (const auto* c = std::get_if<ChartCurrent>(&t)) extra = c->chart.field->y_breaks(r.y0, r.y1);
  return panel_breaks(r.y0, r.y1, kInf, extra);
}

/// int over the carrier rectangles of g(p) dp with certificate.
template <class G>
Certified integrate_parameter(const Current& t, G&& g, const QuadratureOptions& opt) {
  Certified total{0.0, 0.0};
  for (const auto& r : carrier_rects(t)) {
    const auto xb = x_breaks_for(t, r);
    const auto yb = y_breaks_for(t, r);
    total += integrate_2d([&](double x, double y) { return g(Point2{x, y}); }, xb, yb, opt).certified("area integral");
  }
  return total;
}

}  // namespace detail

/// Reference value of int f d||T|| by adaptive tensor Gauss-Legendre.
inline Certified integrate_measure(const ScalarField& f, const Current& t,
                                   const QuadratureOptions& opt = default_mass_options()) {
  const double th = std::abs(multiplicity_of(t));
  if (const auto* c = std::get_if<CubeCurrent>(&t); c && c->excision) {
    throw StructuralError("reference integrals over excised cube currents are not supported");
  }
  const auto* ch = std::get_if<ChartCurrent>(&t);
  return th * detail::integrate_parameter(
                  t,
                  [&](const Point2& p) {
                    if (!ch) return f(lift(p));
                    const auto& fld = *ch->chart.field;
                    const double gx = fld.dx(p[0], p[1]), gy = fld.dy(p[0], p[1]);
                    return f(ch->chart(p)) * std::sqrt(1.0 + gx * gx + gy * gy);
                  },
                  opt);
}

/// <d omega(x), T(x)> at the parameter point p (orientation includes the
/// sign of the multiplicity).
inline double tangential_dw(const FormField<3>& omega, const Current& t, const Point2& p) {
  return pair(differential(omega, embed(t, p)), orientation(t, p));
}

/// int <d omega, T> d||T|| = theta int <d omega(phi), phi_x ^ phi_y> dp.
inline Certified stokes_lhs(const FormField<3>& omega, const Current& t,
                            const QuadratureOptions& opt = default_mass_options()) {
  if (omega.degree != 1) throw StructuralError("Stokes pairing needs a 1-form on a 2-current");
  if (const auto* c = std::get_if<CubeCurrent>(&t); c && c->excision) {
    throw StructuralError("reference integrals over excised cube currents are not supported");
  }
  const auto* ch = std::get_if<ChartCurrent>(&t);
  const double th = multiplicity_of(t);
  return th * detail::integrate_parameter(
                  t,
                  [&](const Point2& p) {
                    if (!ch) {
                      KVector<3> e12(2);
                      e12[0] = 1.0;
                      return pair(differential(omega, lift(p)), e12);
                    }
                    const auto a = as_vector<3>(ch->chart.push(p, {1.0, 0.0}));
                    const auto b = as_vector<3>(ch->chart.push(p, {0.0, 1.0}));
                    return pair(differential(omega, ch->chart(p)), wedge(a, b));
                  },
                  opt);
}

// ---------------------------------------------------------------- Saks-Henstock

enum class TagRule { Center, LowerCorner };

struct ErrorCurveRow {
  int j = 0;
  double max_diameter = 0.0;
  double riemann_sum = 0.0;
  double oracle = 0.0;
  double abs_error = 0.0;
  std::size_t pieces = 0;
};

struct SaksHenstockReport {
  Certified oracle;
  std::vector<ErrorCurveRow> rows;
  /// First refinement with error below eps1, if any.
  std::optional<int> first_j;
  double tau = 0.0;
  std::string note;
};

/// Riemann sums over full families for the uniform gauges 2^-j against the
/// reference integral of f.
inline SaksHenstockReport saks_henstock_test(const ScalarField& f, const Current& t, double eps1, int max_j = 8,
                                             TagRule rule = TagRule::Center, double sup_f = kInf) {
  if (!(eps1 > 0.0)) throw DomainError("eps1 must be positive");
  SaksHenstockReport rep;
  rep.oracle = integrate_measure(f, t);
  if (!std::isfinite(sup_f)) {
    sup_f = 0.0;
    for (const auto& r : carrier_rects(t)) {
      for (int i = 0; i <= 16; ++i) {
        for (int k = 0; k <= 16; ++k) {
          const Point2 p{r.x0 + (r.x1 - r.x0) * i / 16, r.y0 + (r.y1 - r.y0) * k / 16};
          sup_f = std::max(sup_f, std::abs(f(embed(t, p))));
        }
      }
    }
  }
  rep.tau = eps1 / (2.0 * sup_f + 1.0);
  for (int j = 1; j <= max_j; ++j) {
    auto fam = howard_cousin(t, {}, Gauge::constant(std::ldexp(1.0, -j)), RegularityFn::fraction(0.5),
                             SubadditiveFn::mass(), rep.tau);
    if (rule == TagRule::LowerCorner) {
      for (auto& p : fam.pieces) {
        const Rect r = carrier_rects(p.piece).front();
        p.param_tag = {r.x0, r.y0};
        p.tag = embed(p.piece, p.param_tag);
      }
    }
    ErrorCurveRow row;
    row.j = j;
    row.max_diameter = fam.max_diameter();
    row.riemann_sum = riemann_sum(f, fam);
    row.oracle = rep.oracle.value;
    row.abs_error = std::abs(row.riemann_sum - row.oracle);
    row.pieces = fam.pieces.size();
    rep.rows.push_back(row);
    if (!rep.first_j && row.abs_error < eps1) rep.first_j = j;
  }
  if (!rep.first_j) rep.note = "error bound not reached by generation " + std::to_string(max_j);
  return rep;
}

// ------------------------------------------------------------- differentiation

struct DifferentiationRow {
  double side = 0.0;
  double diameter = 0.0;
  double regularity = 0.0;
  double mass = 0.0;
  double circulation = 0.0;
  double predicted = 0.0;
  /// |<d omega(x), T(x)> M(S) - Theta(S)| / M(S)
  double gap_ratio = 0.0;
};

struct DifferentiationReport {
  bool applicable = true;
  double tangential = 0.0;
  std::vector<DifferentiationRow> rows;
  /// Diameter from which every smaller piece met eps2.
  std::optional<double> threshold;
  /// Slope of log gap_ratio against log diameter.
  double order = 0.0;
  std::string note;
};

/// Shrinking squares centred at the parameter point p, pushed through the
/// chart, compared with the differential at x = phi(p).
inline DifferentiationReport differentiation_test(const FormField<3>& omega, const Current& t, const Point2& p,
                                                  double eta, double eps2, double shrink = 0.5, double s0 = 0.25,
                                                  int steps = 10) {
  if (!(shrink > 0.0 && shrink < 1.0)) throw DomainError("shrink factor must lie in (0, 1)");
  DifferentiationReport rep;
  const Point3 x = embed(t, p);
  if (!omega.singular.empty() && omega.singular.distance(x) == 0.0) {
    rep.applicable = false;
    rep.note = "omega is not differentiable at the requested point (it lies on the singular set)";
    return rep;
  }
  rep.tangential = tangential_dw(omega, t, p);
  double s = s0;
  std::vector<double> ld, lg;
  for (int i = 0; i < steps; ++i, s *= shrink) {
    Current piece = t;
    piece = restrict(piece, HalfSpace{0, p[0] - 0.5 * s, false});
    piece = restrict(piece, HalfSpace{0, p[0] + 0.5 * s, true});
    piece = restrict(piece, HalfSpace{1, p[1] - 0.5 * s, false});
    piece = restrict(piece, HalfSpace{1, p[1] + 0.5 * s, true});
    if (is_zero(piece)) break;
    DifferentiationRow row;
    row.side = s;
    row.mass = mass(piece).value;
    row.diameter = diameter_bounds(piece).upper;
    row.regularity = row.mass / (boundary_mass(piece).value * row.diameter);
    if (!(row.regularity > eta)) {
      rep.note = "piece of side " + std::to_string(s) + " is not eta-regular";
      continue;
    }
    row.circulation = circulation(omega, piece).value;
    row.predicted = rep.tangential * row.mass;
    row.gap_ratio = std::abs(row.predicted - row.circulation) / row.mass;
    rep.rows.push_back(row);
    if (row.gap_ratio > 0.0) {
      ld.push_back(std::log(row.diameter));
      lg.push_back(std::log(row.gap_ratio));
    }
  }
  for (std::size_t i = rep.rows.size(); i-- > 0;) {
    if (!(rep.rows[i].gap_ratio < eps2)) break;
    rep.threshold = rep.rows[i].diameter;
  }
  rep.order = fitted_slope(ld, lg);
  if (!rep.threshold) rep.note = "gap never fell below eps2 on the shrinking sequence";
  return rep;
}

// ------------------------------------------------------------------- Stokes

enum class Verdict { Holds, Fails, UndecidedByDecomposition };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Holds: return "HOLDS";
    case Verdict::Fails: return "FAILS";
    case Verdict::UndecidedByDecomposition: return "UNDECIDED_BY_DECOMPOSITION";
  }
  return "?";
}

struct StokesOptions {
  /// NaN selects 1e-6 with an analytic d omega and 1e-3 otherwise.
  double tol = std::numeric_limits<double>::quiet_NaN();
  /// Uniform gauge values for the Riemann-sum path.
  std::vector<double> schedule{0.4, 0.2, 0.1};
  /// Fullness budget of each family.
  double eps = 1e-3;
  bool riemann = true;
  /// Replaces the tensor-quadrature lhs (used for oscillatory surfaces).
  std::function<Certified()> lhs_oracle;
  /// Replaces the boundary-quadrature rhs.
  std::function<Certified()> rhs_oracle;
  QuadratureOptions quadrature = default_mass_options();
  HowardCousinOptions cousin;
};

struct RiemannRow {
  double gauge = 0.0;
  std::size_t pieces = 0;
  double max_diameter = 0.0;
  double min_regularity = 0.0;
  double remainder_g = 0.0;
  double riemann_sum = 0.0;
  double gap_to_rhs = 0.0;
};

struct StokesReport {
  Certified lhs;
  Certified rhs;
  double gap = 0.0;
  double tol = 0.0;
  bool analytic_differential = false;
  std::vector<RiemannRow> riemann;
  Verdict verdict = Verdict::Holds;
  std::string note;
};

/// Both sides of the Stokes identity for (T, omega), by direct quadrature
/// and by Riemann sums over Howard-Cousin families.
inline StokesReport stokes_check(const Current& t, const FormField<3>& omega, const ExceptionalSet<3>& e_t,
                                 const StokesOptions& opt = {}) {
  StokesReport rep;
  rep.analytic_differential = omega.has_differential();
  rep.tol = std::isnan(opt.tol) ? (rep.analytic_differential ? 1e-6 : 1e-3) : opt.tol;
  if (!(rep.tol > 0.0)) throw DomainError("tolerance must be positive");
  rep.lhs = opt.lhs_oracle ? opt.lhs_oracle() : stokes_lhs(omega, t, opt.quadrature);
  rep.rhs = opt.rhs_oracle ? opt.rhs_oracle() : circulation(omega, t);
  rep.gap = rep.lhs.value - rep.rhs.value;

  bool refused = false;
  if (opt.riemann) {
    const auto g = SubadditiveFn::max_of({SubadditiveFn::mass(), SubadditiveFn::abs_circulation(omega)});
    for (double d : opt.schedule) {
      TaggedFamily fam;
      try {
        fam = howard_cousin(t, e_t, Gauge::constant(d), RegularityFn::fraction(0.5), g, opt.eps, opt.cousin);
      } catch (const RefusalError& err) {
        refused = true;
        rep.note = std::string("decomposition refused: ") + err.what();
        break;
      }
      RiemannRow row;
      row.gauge = d;
      row.pieces = fam.pieces.size();
      row.max_diameter = fam.max_diameter();
      row.min_regularity = fam.min_regularity();
      row.remainder_g = fam.remainder_g;
      row.riemann_sum = riemann_sum(
          std::function<double(const TaggedPiece&)>(
              [&](const TaggedPiece& p) { return tangential_dw(omega, p.piece, p.param_tag); }),
          fam);
      row.gap_to_rhs = row.riemann_sum - rep.rhs.value;
      rep.riemann.push_back(row);
    }
  }
  // a gap beyond tolerance is a failure whatever the decomposition says
  if (std::abs(rep.gap) > rep.tol) {
    rep.verdict = Verdict::Fails;
  } else if (refused) {
    rep.verdict = Verdict::UndecidedByDecomposition;
  } else {
    rep.verdict = Verdict::Holds;
  }
  return rep;
}

}  // namespace stokeslab
