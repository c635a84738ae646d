#pragma once

// Independent re-verification of a tagged family.  Masses, lengths and
// diameters are recomputed here with a separate Gauss rule and separate
// geometry; only the input data (charts, gauge, eta) is shared.

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "stokeslab/cousin.hpp"

namespace stokeslab {

struct CertificateReport {
  std::size_t pieces = 0;
  std::size_t tag_failures = 0;
  std::size_t fineness_failures = 0;
  std::size_t regularity_failures = 0;
  std::size_t overlaps = 0;
  bool tiles = false;
  double remainder_mass = 0.0;
  double remainder_g = 0.0;
  bool full = false;
  double min_regularity = kInf;
  double max_diameter = 0.0;
  std::vector<std::string> problems;

  bool ok() const {
    return tag_failures == 0 && fineness_failures == 0 && regularity_failures == 0 && overlaps == 0 && tiles && full;
  }
};

namespace check {

// 5-point Gauss-Legendre on [-1, 1]
inline constexpr std::array<double, 5> kNode{-0.9061798459386640, -0.5384693101056831, 0.0, 0.5384693101056831,
                                             0.9061798459386640};
inline constexpr std::array<double, 5> kWeight{0.2369268850561891, 0.4786286704993665, 0.5688888888888889,
                                               0.4786286704993665, 0.2369268850561891};

template <class F>
double rule_1d(F&& f, double a, double b, int n) {
  double s = 0.0;
  const double h = (b - a) / n;
  for (int p = 0; p < n; ++p) {
    const double m = a + (p + 0.5) * h;
    for (int i = 0; i < 5; ++i) s += kWeight[i] * f(m + 0.5 * h * kNode[i]);
  }
  return 0.5 * h * s;
}

template <class F>
double rule_2d(F&& f, const Rect& r, int n) {
  return rule_1d([&](double y) { return rule_1d([&](double x) { return f(x, y); }, r.x0, r.x1, n); }, r.y0, r.y1, n);
}

/// Panel doubling until two successive values agree; returns {value, gap}.
template <class Rule>
std::pair<double, double> converge(Rule&& rule, double tol) {
  double prev = rule(2);
  for (int n = 4; n <= 512; n *= 2) {
    const double v = rule(n);
    if (std::abs(v - prev) <= tol * (1.0 + std::abs(v))) return {v, std::abs(v - prev)};
    prev = v;
  }
  return {prev, kInf};
}

struct Measured {
  double mass = 0.0, length = 0.0, diameter = 0.0;
  double error = 0.0;
};

inline Measured measure(const Current& t) {
  Measured m;
  const int th = std::abs(multiplicity_of(t));
  std::vector<Rect> rects;
  for (const auto& c : domain_of(t).cubes()) {
    const Rect r{c.lo(0), c.hi(0), c.lo(1), c.hi(1)};
    const Rect k{std::max(r.x0, window_of(t).x0), std::min(r.x1, window_of(t).x1), std::max(r.y0, window_of(t).y0),
                 std::min(r.y1, window_of(t).y1)};
    if (k.x1 > k.x0 && k.y1 > k.y0) rects.push_back(k);
  }
  if (rects.size() != 1) throw StructuralError("checker expects single-rectangle pieces");
  const Rect r = rects.front();
  const double diag = std::hypot(r.x1 - r.x0, r.y1 - r.y0);
  if (const auto* c = std::get_if<ChartCurrent>(&t)) {
    const auto& f = *c->chart.field;
    const auto area = converge(
        [&](int n) {
          return rule_2d([&](double x, double y) { return std::sqrt(1.0 + std::pow(f.dx(x, y), 2) + std::pow(f.dy(x, y), 2)); },
                         r, n);
        },
        1e-10);
    auto edge = [&](bool horizontal, double fixed, double a, double b) {
      return converge(
          [&](int n) {
            return rule_1d(
                [&](double s) {
                  const double g = horizontal ? f.dx(s, fixed) : f.dy(fixed, s);
                  return std::sqrt(1.0 + g * g);
                },
                a, b, n);
          },
          1e-10);
    };
    const auto e1 = edge(true, r.y0, r.x0, r.x1), e2 = edge(true, r.y1, r.x0, r.x1);
    const auto e3 = edge(false, r.x0, r.y0, r.y1), e4 = edge(false, r.x1, r.y0, r.y1);
    m.mass = th * area.first;
    m.length = th * (e1.first + e2.first + e3.first + e4.first);
    m.error = th * (area.second + e1.second + e2.second + e3.second + e4.second);
    m.diameter = c->chart.lip_plus * diag;
  } else {
    m.mass = th * (r.x1 - r.x0) * (r.y1 - r.y0);
    m.length = th * 2.0 * ((r.x1 - r.x0) + (r.y1 - r.y0));
    m.diameter = diag;
  }
  return m;
}

inline double parameter_area(const Current& t) {
  double a = 0.0;
  for (const auto& c : domain_of(t).cubes()) {
    const Rect& w = window_of(t);
    const double dx = std::min(c.hi(0), w.x1) - std::max(c.lo(0), w.x0);
    const double dy = std::min(c.hi(1), w.y1) - std::max(c.lo(1), w.y0);
    if (dx > 0.0 && dy > 0.0) a += dx * dy;
  }
  return a;
}

}  // namespace check

/// Re-verifies fineness, regularity, tag membership, nonoverlap and
/// fullness of `fam` against the gauge and regularity function.
inline CertificateReport check_certificates(const TaggedFamily& fam, const Gauge& delta, const RegularityFn& eta,
                                            const SubadditiveFn& g) {
  CertificateReport rep;
  rep.pieces = fam.pieces.size();
  auto note = [&](const std::string& s) {
    if (rep.problems.size() < 20) rep.problems.push_back(s);
  };

  std::vector<double> chart_eta;
  for (const auto& t : fam.charts) {
    const auto& root = domain_of(t).root();
    const double a = root.side[0], b = root.side[1];
    double cell = a * b / (2.0 * (a + b) * std::hypot(a, b));
    if (const auto* c = std::get_if<ChartCurrent>(&t)) cell /= std::pow(c->chart.lip_plus * c->chart.lip_minus, 2);
    chart_eta.push_back(eta.kind == RegularityFn::Kind::Constant ? eta.value : eta.value * cell);
  }

  struct Tagged {
    Rect r;
    int chart;
  };
  std::vector<Tagged> all;
  std::vector<double> piece_area(fam.charts.size(), 0.0);

  for (std::size_t i = 0; i < fam.pieces.size(); ++i) {
    const auto& p = fam.pieces[i];
    const std::string id = "piece " + std::to_string(i);
    if (p.chart < 0 || static_cast<std::size_t>(p.chart) >= fam.charts.size()) {
      ++rep.tag_failures;
      note(id + ": unknown chart");
      continue;
    }
    const auto m = check::measure(p.piece);
    const Rect r = carrier_rects(p.piece).front();
    all.push_back({r, p.chart});
    piece_area[p.chart] += (r.x1 - r.x0) * (r.y1 - r.y0);

    const Point2 q = p.param_tag;
    const bool in_rect = q[0] >= r.x0 && q[0] <= r.x1 && q[1] >= r.y0 && q[1] <= r.y1;
    double zq = 0.0;
    if (const auto* c = std::get_if<ChartCurrent>(&p.piece)) zq = c->chart.field->value(q[0], q[1]);
    const double off = std::hypot(p.tag[0] - q[0], p.tag[1] - q[1], p.tag[2] - zq);
    if (!in_rect || off > 1e-12 * (1.0 + std::abs(zq))) {
      ++rep.tag_failures;
      note(id + ": tag outside the support");
    }

    const double d = delta(p.tag);
    if (!(m.diameter < d)) {
      ++rep.fineness_failures;
      note(id + ": diameter " + std::to_string(m.diameter) + " >= gauge " + std::to_string(d));
    }
    const double reg = (m.mass - m.error) / ((m.length + m.error) * m.diameter);
    rep.min_regularity = std::min(rep.min_regularity, reg);
    rep.max_diameter = std::max(rep.max_diameter, m.diameter);
    if (!(reg > chart_eta[p.chart])) {
      ++rep.regularity_failures;
      note(id + ": regularity " + std::to_string(reg) + " <= eta " + std::to_string(chart_eta[p.chart]));
    }
  }

  // pieces and remainders must have pairwise disjoint interiors
  std::vector<double> rest_area(fam.charts.size(), 0.0);
  for (std::size_t j = 0; j < fam.remainders.size() && j < fam.charts.size(); ++j) {
    for (const auto& r : carrier_rects(fam.remainders[j])) {
      all.push_back({r, static_cast<int>(j)});
      rest_area[j] += (r.x1 - r.x0) * (r.y1 - r.y0);
    }
  }
  std::sort(all.begin(), all.end(), [](const Tagged& a, const Tagged& b) { return a.r.x0 < b.r.x0; });
  for (std::size_t i = 0; i < all.size(); ++i) {
    for (std::size_t j = i + 1; j < all.size() && all[j].r.x0 < all[i].r.x1; ++j) {
      const double w = std::min(all[i].r.x1, all[j].r.x1) - std::max(all[i].r.x0, all[j].r.x0);
      const double h = std::min(all[i].r.y1, all[j].r.y1) - std::max(all[i].r.y0, all[j].r.y0);
      if (w > 0.0 && h > 0.0) {
        ++rep.overlaps;
        note("overlapping rectangles at x = " + std::to_string(all[i].r.x0));
      }
    }
  }

  // pieces plus remainder exhaust each chart
  rep.tiles = fam.remainders.size() == fam.charts.size();
  for (std::size_t j = 0; j < fam.charts.size(); ++j) {
    const double whole = check::parameter_area(fam.charts[j]);
    if (std::abs(piece_area[j] + rest_area[j] - whole) > 1e-12 * (1.0 + whole)) {
      rep.tiles = false;
      note("chart " + std::to_string(j) + ": pieces and remainder do not tile the domain");
    }
  }

  for (const auto& rest : fam.remainders) {
    if (is_zero(rest)) continue;
    double m = 0.0;
    for (const auto& c : domain_of(rest).cubes()) {
      m += check::measure(restrict(rest, CubeSet<2>(domain_of(rest).root(), {c}))).mass;
    }
    rep.remainder_mass += m;
    rep.remainder_g += g.kind() == SubadditiveFn::Kind::Mass ? m : g(rest);
  }
  rep.full = rep.remainder_g < fam.epsilon;
  if (!rep.full) note("remainder " + num(rep.remainder_g) + " >= eps " + num(fam.epsilon));
  return rep;
}

/// Certificates for a bare Cousin partition of a cube set.
template <int M, class Delta>
CertificateReport check_cousin(const CubeSet<M>& domain, const std::vector<TaggedCube<M>>& family, Delta&& delta) {
  CertificateReport rep;
  rep.pieces = family.size();
  double total = 0.0;
  std::vector<DyadicCube<M>> cubes;
  for (const auto& tc : family) {
    const auto& q = tc.cube;
    double vol = 1.0, diam2 = 0.0, faces = 0.0;
    bool inside = true;
    for (int i = 0; i < M; ++i) {
      const double s = std::ldexp(domain.root().side[i], -q.generation);
      const double lo = domain.root().corner[i] + s * static_cast<double>(q.corner[i]);
      vol *= s;
      diam2 += s * s;
      faces += 2.0 / s;
      inside = inside && tc.tag[i] >= lo && tc.tag[i] <= lo + s;
    }
    total += vol;
    rep.min_regularity = std::min(rep.min_regularity, 1.0 / (faces * std::sqrt(diam2)));
    if (!inside) ++rep.tag_failures;
    if (!(std::sqrt(diam2) < delta(tc.tag))) ++rep.fineness_failures;
    rep.max_diameter = std::max(rep.max_diameter, std::sqrt(diam2));
    cubes.push_back(q);
  }
  // distinct dyadic cubes overlap iff one contains the other
  std::sort(cubes.begin(), cubes.end(), [](const auto& a, const auto& b) { return a.generation < b.generation; });
  for (std::size_t i = 0; i < cubes.size(); ++i) {
    for (std::size_t j = i + 1; j < cubes.size(); ++j) {
      const int shift = cubes[j].generation - cubes[i].generation;
      bool nested = true;
      for (int k = 0; k < M; ++k) nested = nested && (cubes[j].corner[k] >> shift) == cubes[i].corner[k];
      if (nested) ++rep.overlaps;
    }
  }
  rep.tiles = total == domain.measure();
  rep.full = rep.tiles;
  return rep;
}

}  // namespace stokeslab
