#pragma once

// Experimental one-point variant of the oscillating surface: a graph over
// the unit disk whose oscillations live on the annuli a^{k+1} <= r <= a^k
// and collapse onto the axis {(0, 0)} x [-1, 1].  The form is the
// differential of the normalised arclength along circles.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "stokeslab/counterexample.hpp"

namespace stokeslab {

/// Polar line element data of one circle.
struct PolarDu {
  double u = 0.0;
  double du_r = 0.0;
  double du_theta = 0.0;
  double length = 0.0;  // L(r)
};

class CylindricalModel {
 public:
  static constexpr double kSlopeCap = 1024.0;

  explicit CylindricalModel(SurfaceParams p) : p_(p) {
    p_.validate();
    K_ = p_.truncation();
    for (int k = 0; k <= K_ + 1; ++k) {
      radius_.push_back(std::pow(p_.a, k));
      amp_.push_back(k == 0 ? 0.0 : std::pow(p_.h, k));
      freq_.push_back(std::pow(static_cast<double>(p_.inv_lambda), k));
    }
  }

  const SurfaceParams& params() const { return p_; }
  int rings() const { return K_; }
  double r_k(int k) const { return radius_[k]; }
  double ring_width(int k) const { return radius_[k] - radius_[k + 1]; }

  /// Ring index of r: k with r_{k+1} <= r < r_k, -1 outside the disk,
  /// K inside the truncated core.
  int ring(double r) const {
    if (r >= 1.0) return -1;
    if (r < radius_[K_]) return K_;
    int k = static_cast<int>(std::floor(std::log(r) / std::log(p_.a)));
    k = std::clamp(k, 0, K_ - 1);
    while (k > 0 && r >= radius_[k]) --k;
    while (k < K_ - 1 && r < radius_[k + 1]) ++k;
    return k;
  }

  double g(int k, double t) const { return amp_[k] * std::sin(t * freq_[k]); }
  double gp(int k, double t) const { return amp_[k] * freq_[k] * std::cos(t * freq_[k]); }

  struct Local {
    int k;
    double phi, dphi_dr;
  };
  Local local(double r) const {
    const int k = ring(r);
    if (k < 0 || k >= K_) return {k, 0.0, 0.0};
    const double s = (radius_[k] - r) / ring_width(k);
    return {k, phi_(s), -phi_.derivative(s) / ring_width(k)};
  }

  double psi(double r, double t) const {
    const auto l = local(r);
    if (l.k < 0) return 0.0;
    if (l.k >= K_) return g(K_, t);
    return (1.0 - l.phi) * g(l.k, t) + l.phi * g(l.k + 1, t);
  }
  double psi_t(double r, double t) const {
    const auto l = local(r);
    if (l.k < 0) return 0.0;
    if (l.k >= K_) return gp(K_, t);
    return (1.0 - l.phi) * gp(l.k, t) + l.phi * gp(l.k + 1, t);
  }
  double psi_r(double r, double t) const {
    const auto l = local(r);
    if (l.k < 0 || l.k >= K_) return 0.0;
    return l.dphi_dr * (g(l.k + 1, t) - g(l.k, t));
  }

  /// Angular period of psi_theta^2 on ring k.
  double period(int k) const {
    return k == 0 ? 2.0 * std::numbers::pi / freq_[1] : 2.0 * std::numbers::pi / freq_[k];
  }

  int panels(int k, double r) const {
    const double fast = std::numbers::pi / freq_[k + 1];
    const double count = std::max(1.0, std::round(period(k) / fast));
    // The slope relative to r explodes on inner rings.  The cap leaves rings
    // 0..4 untouched (smooth enough for differencing); further in it only
    // limits how sharply kinks of area share r^2 / slope are resolved.
    const double amp = std::max(amp_[k] * freq_[k], amp_[k + 1] * freq_[k + 1]) / std::max(r, 1e-300);
    return static_cast<int>(count * (8.0 + std::ceil(3.0 * std::min(amp, kSlopeCap))));
  }

  /// (int sqrt(r^2 + psi_t^2), int d/dr of it) over [0, len] on circle r.
  std::pair<double, double> section(int k, double r, double len, int n) const {
    if (len <= 0.0) return {0.0, 0.0};
    const auto& rule = GaussLegendreRule<12>::get();
    const auto lc = local(r);
    const double hw = 0.5 * len / n;
    double l = 0.0, dl = 0.0;
    for (int i = 0; i < n; ++i) {
      const double c = (2 * i + 1) * hw;
      for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
        const double t = c + hw * rule.nodes[j];
        const double a = gp(k, t), b = gp(k + 1, t);
        const double pt = (1.0 - lc.phi) * a + lc.phi * b;
        const double ptr = lc.dphi_dr * (b - a);
        const double e = std::sqrt(r * r + pt * pt);
        l += rule.weights[j] * e;
        dl += rule.weights[j] * (r + pt * ptr) / e;
      }
    }
    return {l * hw, dl * hw};
  }

  PolarDu du(double r, double t) const {
    const double two_pi = 2.0 * std::numbers::pi;
    t = std::fmod(t, two_pi);
    if (t < 0.0) t += two_pi;
    PolarDu d;
    const int k = ring(r);
    if (k < 0) {
      d.u = t / two_pi;
      d.du_theta = 1.0 / two_pi;
      d.length = two_pi * r;
      return d;
    }
    if (k >= K_) return d;  // truncated core: the form vanishes
    const double P = period(k);
    const double N = std::round(two_pi / P);
    const int n = panels(k, r);
    if (!(cache_k_ == k && cache_r_ == r)) {
      cache_ = section(k, r, P, n);
      cache_k_ = k;
      cache_r_ = r;
    }
    const auto [lp, dlp] = cache_;
    double q = std::floor(t / P);
    double rem = t - q * P;
    if (rem > P * (1.0 - 1e-12)) {
      q += 1.0;
      rem = 0.0;
    }
    const auto [l, dl] = section(k, r, rem, n);
    const double pt = psi_t(r, t);
    d.length = N * lp;
    d.u = (q * lp + l) / d.length;
    d.du_theta = std::sqrt(r * r + pt * pt) / d.length;
    d.du_r = (lp * dl - l * dlp) / (N * lp * lp);
    return d;
  }

  Point3 chart(double r, double t) const { return {r * std::cos(t), r * std::sin(t), psi(r, t)}; }

  /// Covector on R^3 matching du on the tangent plane and vanishing on the
  /// normal.
  KCovector<3> omega_on_surface(double r, double t) const {
    KCovector<3> w(1);
    const auto d = du(r, t);
    if (d.length == 0.0) return w;
    const Point3 er{std::cos(t), std::sin(t), psi_r(r, t)};
    const Point3 et{-r * std::sin(t), r * std::cos(t), psi_t(r, t)};
    const double g11 = dot(er, er), g12 = dot(er, et), g22 = dot(et, et);
    const double det = g11 * g22 - g12 * g12;
    const double al = (g22 * d.du_r - g12 * d.du_theta) / det;
    const double be = (g11 * d.du_theta - g12 * d.du_r) / det;
    for (int i = 0; i < 3; ++i) w[i] = al * er[i] + be * et[i];
    return w;
  }

  /// Ambient form: cut off in the distance to the surface and beyond r = 2.
  KCovector<3> omega(const Point3& p) const {
    const double r = std::hypot(p[0], p[1]);
    KCovector<3> zero(1);
    if (r == 0.0) return zero;
    const double t = std::atan2(p[1], p[0]);
    double c = cutoff(p[2] - psi(r, t));
    if (r > 1.0) c *= cutoff(r);
    if (c == 0.0) return zero;
    auto w = omega_on_surface(r, t);
    w *= c;
    return w;
  }

  ExceptionalSet<3> singular_set() const { return ExceptionalSet<3>::box({0.0, 0.0, -1.0}, {0.0, 0.0, 1.0}); }

  /// Area element sqrt(r^2 + psi_t^2 + r^2 psi_r^2).
  double area_element(double r, double t) const {
    const double a = psi_t(r, t), b = psi_r(r, t);
    return std::sqrt(r * r + a * a + r * r * b * b);
  }

  /// Closed-form majorant of the area of ring k.
  double ring_area_bound(int k) const {
    const double rk = radius_[k], rk1 = radius_[k + 1];
    const double br = TransitionFn{}.max_derivative() / ring_width(k) * (amp_[k] + amp_[k + 1]);
    const double bt = (amp_[k] * freq_[k] + amp_[k + 1] * freq_[k + 1]) / rk1;
    return std::numbers::pi * (rk * rk - rk1 * rk1) * std::sqrt(1.0 + br * br + bt * bt);
  }

 private:
  SurfaceParams p_;
  TransitionFn phi_;
  int K_ = 0;
  std::vector<double> radius_, amp_, freq_;
  mutable int cache_k_ = -1;
  mutable double cache_r_ = -1.0;
  mutable std::pair<double, double> cache_{};
};

struct RingRow {
  int k = 0;
  double radius = 0.0;
  double length = 0.0, length_floor = 0.0;
  double area = 0.0, area_error = 0.0, bound = 0.0;
  double sup = 0.0;
};

struct CylindricalReport {
  bool experimental = true;
  SurfaceParams params;
  std::vector<std::string> violations;
  bool refused = false;
  Certified circulation;
  std::vector<RingRow> rings;
  double area_sum = 0.0;
  double tail_bound = 0.0;
  bool sup_decreasing = true;
  int tangential_samples = 0;
  double tangential_max = 0.0;
  bool failure_shown = false;
};

/// Circulation along the unit circle, ring areas against their bound, the
/// sup of omega on the circles r_k and sampled tangential closedness.
inline CylindricalReport verify_cylindrical(const CylindricalModel& m, int samples = 200, std::uint64_t seed = 1,
                                            int rows = 10, int sampled_rings = 5) {
  const double two_pi = 2.0 * std::numbers::pi;
  CylindricalReport rep;
  rep.params = m.params();
  rep.violations = rep.params.violations();
  if (!rep.violations.empty()) {
    rep.refused = true;
    return rep;
  }
  rep.circulation = integrate(
                        [&](double t) {
                          KVector<3> v(1);
                          v[0] = -std::sin(t);
                          v[1] = std::cos(t);
                          return pair(m.omega({std::cos(t), std::sin(t), 0.0}), v);
                        },
                        0.0, two_pi, {1e-12, 1e-12, 10000})
                        .certified("circle circulation");

  const auto& rule = GaussLegendreRule<6>::get();
  for (int k = 0; k < std::min(rows, m.rings()); ++k) {
    RingRow row;
    row.k = k;
    row.radius = m.r_k(k);
    row.length = m.du(row.radius * (1.0 - 1e-15), 0.0).length;
    if (k == 0) row.length = two_pi;
    row.length_floor = 4.0 * std::pow(m.params().h * m.params().inv_lambda, k);
    // one angular period times its copies, tensor Gauss with doubling
    const double P = m.period(k);
    const double copies = std::round(two_pi / P);
    auto tensor = [&](int nt, int nr) {
      const double r0 = m.r_k(k + 1), r1 = m.r_k(k);
      const double ht = P / nt, hr = (r1 - r0) / nr;
      double s = 0.0;
      for (int i = 0; i < nt; ++i) {
        for (int j = 0; j < nr; ++j) {
          for (int a = 0; a < 6; ++a) {
            for (int b = 0; b < 6; ++b) {
              const double t = (i + 0.5) * ht + 0.5 * ht * rule.nodes[a];
              const double r = r0 + (j + 0.5) * hr + 0.5 * hr * rule.nodes[b];
              s += rule.weights[a] * rule.weights[b] * m.area_element(r, t);
            }
          }
        }
      }
      return 0.25 * ht * hr * s;
    };
    const int nt = 4 * m.params().inv_lambda;
    const double coarse = tensor(nt, 4), fine = tensor(2 * nt, 8);
    row.area = copies * fine;
    row.area_error = copies * std::abs(fine - coarse);
    row.bound = m.ring_area_bound(k);
    for (int i = 0; i < 256; ++i) {
      row.sup = std::max(row.sup, m.omega_on_surface(row.radius * (1.0 - 1e-15), two_pi * i / 256).norm());
    }
    if (k >= 2 && !rep.rings.empty() && !(row.sup < rep.rings.back().sup)) rep.sup_decreasing = false;
    rep.area_sum += row.area;
    rep.rings.push_back(row);
  }
  for (int k = std::min(rows, m.rings()); k < m.rings(); ++k) rep.tail_bound += m.ring_area_bound(k);

  // <d omega, tau1 ^ tau2> = (d_r du_theta - d_theta du_r) / |e_r x e_theta|
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ut(0.0, two_pi), us(0.0, 1.0);
  std::uniform_int_distribution<int> uk(0, std::min(sampled_rings, m.rings()) - 1);
  for (int i = 0; i < samples; ++i) {
    const int k = uk(rng);
    const double r = m.r_k(k + 1) + (0.02 + 0.96 * us(rng)) * m.ring_width(k);
    const double t = ut(rng);
    const double slope = 1.0 + std::pow(m.params().h * m.params().inv_lambda, k + 1) / r;
    // 1e-2 leaves visible truncation near the core, 1e-3 hits quadrature roundoff
    const double hr = 3e-3 * m.ring_width(k) / slope;
    const double ht = 3e-3 * std::pow(m.params().lambda(), k + 1) / slope;
    auto d4 = [](auto f, double h) { return (8.0 * (f(h) - f(-h)) - (f(2 * h) - f(-2 * h))) / (12.0 * h); };
    const double a = d4([&](double e) { return m.du(r + e, t).du_theta; }, hr);
    const double b = d4([&](double e) { return m.du(r, t + e).du_r; }, ht);
    const Point3 er{std::cos(t), std::sin(t), m.psi_r(r, t)};
    const Point3 et{-r * std::sin(t), r * std::cos(t), m.psi_t(r, t)};
    rep.tangential_max = std::max(rep.tangential_max, std::abs(a - b) / norm(cross(er, et)));
    ++rep.tangential_samples;
  }
  rep.failure_shown = std::abs(rep.circulation.value - 1.0) <= 1e-4 && rep.tangential_max <= 1e-3;
  return rep;
}

}  // namespace stokeslab
