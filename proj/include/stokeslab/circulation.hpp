#pragma once

#include <cmath>
#include <vector>

#include "stokeslab/currents.hpp"
#include "stokeslab/forms.hpp"
#include "stokeslab/quadrature.hpp"

namespace stokeslab {

/// Line integral of a 1-form along phi(piece) (phi = identity into z = 0 for
/// cube currents).
inline QuadratureResult piece_circulation(const FormField<3>& omega, const Current& t, const CurvePiece& piece,
                                          const QuadratureOptions& opt) {
  if (omega.degree != 1) throw StructuralError("circulation needs a 1-form on a 2-current");
  const auto* ch = std::get_if<ChartCurrent>(&t);
  std::vector<double> breaks{0.0, 1.0};
  if (ch && piece.kind == CurvePiece::Kind::Segment) {
    const auto& f = *ch->chart.field;
    const double ylo = std::min(piece.a[1], piece.b[1]), yhi = std::max(piece.a[1], piece.b[1]);
    std::vector<double> extra;
    if (piece.a[1] != piece.b[1]) {
      for (double y : f.y_breaks(ylo, yhi)) extra.push_back((y - piece.a[1]) / (piece.b[1] - piece.a[1]));
    }
    double width = kInf;
    if (piece.a[0] != piece.b[0]) width = f.x_period(ylo, yhi) / 8.0 / std::abs(piece.b[0] - piece.a[0]);
    breaks = panel_breaks(0.0, 1.0, width, extra);
  }
  return integrate(
      [&](double s) {
        const Point2 p = piece.point(s);
        const Point2 v = piece.velocity(s);
        if (ch) return pair(omega(ch->chart(p)), as_vector<3>(ch->chart.push(p, v)));
        return pair(omega(lift(p)), as_vector<3>(Point3{v[0], v[1], 0.0}));
      },
      breaks, opt);
}

/// Theta_omega(T) = int <omega, orientation of dT> d||dT||.
inline Certified circulation(const FormField<3>& omega, const Current& t,
                             const QuadratureOptions& opt = {1e-11, 1e-12, 400000}) {
  Certified c{0.0, 0.0};
  for (const auto& piece : boundary_pieces(t)) c += piece_circulation(omega, t, piece, opt).certified("circulation");
  return static_cast<double>(multiplicity_of(t)) * c;
}

/// Sup of |omega| sampled on the boundary; with the boundary mass this bounds
/// |Theta_omega(T)|.
inline double boundary_sup_norm(const FormField<3>& omega, const Current& t, int samples_per_piece = 64) {
  double m = 0.0;
  for (const auto& piece : boundary_pieces(t)) {
    for (int i = 0; i <= samples_per_piece; ++i) {
      const Point2 p = piece.point(static_cast<double>(i) / samples_per_piece);
      m = std::max(m, omega(embed(t, p)).norm());
    }
  }
  return m;
}

}  // namespace stokeslab
