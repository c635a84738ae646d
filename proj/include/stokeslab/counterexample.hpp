#pragma once

// Oscillating graph over [0, pi] x [0, y_inf) whose section lengths blow up
// at y = y_inf, together with the closed 1-form du pulled back to it.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "stokeslab/circulation.hpp"
#include "stokeslab/currents.hpp"
#include "stokeslab/error.hpp"
#include "stokeslab/forms.hpp"
#include "stokeslab/minkowski.hpp"
#include "stokeslab/quadrature.hpp"

namespace stokeslab {

struct SurfaceParams {
  double a = 1.0 / 3.0;
  double h = 1.0 / 3.0;
  int inv_lambda = 4;
  /// Number of resolved strips; 0 picks the first k with a^k < 1e-12.
  int k_max = 0;

  double lambda() const { return 1.0 / inv_lambda; }
  double y_inf() const { return a / (1.0 - a); }
  double y(int k) const { return a * (1.0 - std::pow(a, k)) / (1.0 - a); }
  int truncation() const {
    if (k_max > 0) return k_max;
    int k = 0;
    for (double p = 1.0; p >= 1e-12; p *= a) ++k;
    return k - 1;
  }

  bool area_flag() const { return h * a * inv_lambda < 1.0; }
  bool length_flag() const { return h * inv_lambda > 1.0; }
  bool continuity_flag() const { return a * inv_lambda > 1.0; }

  std::vector<std::string> violations() const {
    std::vector<std::string> v;
    if (!area_flag()) v.emplace_back("area: h a / lambda < 1 fails");
    if (!length_flag()) v.emplace_back("length: h / lambda > 1 fails");
    if (!continuity_flag()) v.emplace_back("continuity: a > lambda fails");
    return v;
  }

  void validate() const {
    if (!(a > 0.0 && a < 1.0)) throw DomainError("a must lie in (0, 1)");
    if (!(h >= 0.0 && h < 1.0)) throw DomainError("h must lie in [0, 1)");
    if (inv_lambda < 2) throw DomainError("1/lambda must be an integer >= 2");
    if (k_max < 0 || k_max > 60) throw DomainError("k_max must lie in [0, 60]");
  }
};

/// Smooth nondecreasing step, flat on [0, 1/8] and [7/8, 1].
struct TransitionFn {
  static constexpr double kSharpness = 0.6;
  static constexpr double kLo = 0.125;
  static constexpr double kWidth = 0.75;

  /// 1 / (1 + exp(c (1/t - 1/(1-t)))) on (0, 1).
  static double step(double t) {
    if (t <= 0.0) return 0.0;
    if (t >= 1.0) return 1.0;
    const double u = kSharpness * (1.0 / t - 1.0 / (1.0 - t));
    if (u > 700.0) return 0.0;
    if (u < -700.0) return 1.0;
    return 1.0 / (1.0 + std::exp(u));
  }
  static double step_derivative(double t) {
    if (t <= 0.0 || t >= 1.0) return 0.0;
    const double u = kSharpness * (1.0 / t - 1.0 / (1.0 - t));
    if (std::abs(u) > 700.0) return 0.0;
    const double du = -kSharpness * (1.0 / (t * t) + 1.0 / ((1.0 - t) * (1.0 - t)));
    const double s = 1.0 / (1.0 + std::exp(u));
    return -du * s * (1.0 - s);
  }

  double operator()(double s) const { return step((s - kLo) / kWidth); }
  double derivative(double s) const { return step_derivative((s - kLo) / kWidth) / kWidth; }

  /// Largest derivative on a uniform grid of [0, 1].
  double max_derivative(int grid = 10000) const {
    double m = 0.0;
    for (int i = 0; i <= grid; ++i) m = std::max(m, derivative(static_cast<double>(i) / grid));
    return m;
  }
};

/// 1 on [-1, 1], 0 outside [-2, 2].
inline double cutoff(double s) { return 1.0 - TransitionFn::step(std::abs(s) - 1.0); }

struct TangentFrame {
  Point3 t1, t2, t3;
};

struct DuValue {
  double u = 0.0;
  KCovector<2> du = KCovector<2>(1);
  double length = 0.0;  // L(y)
};

class SurfaceModel final : public HeightField {
 public:
  /// Declared sup of the transition derivative (checked by max_derivative).
  static constexpr double kTransitionSlope = 2.0;

  explicit SurfaceModel(SurfaceParams p) : p_(p) {
    p_.validate();
    K_ = p_.truncation();
    ys_.resize(K_ + 1);
    widths_.resize(K_ + 1);
    freq_.resize(K_ + 2);
    amp_.resize(K_ + 2);
    for (int k = 0; k <= K_; ++k) {
      ys_[k] = p_.y(k);
      widths_[k] = std::pow(p_.a, k + 1);
    }
    for (int k = 0; k <= K_ + 1; ++k) {
      freq_[k] = std::pow(static_cast<double>(p_.inv_lambda), k);
      amp_[k] = k == 0 ? 0.0 : std::pow(p_.h, k);
    }
    areas_.resize(K_);
  }

  const SurfaceParams& params() const { return p_; }
  /// Strips 0..K-1 are resolved; [y_K, y_inf) is the truncated tail.
  int strips() const { return K_; }
  double y_k(int k) const { return ys_.at(k); }
  double strip_width(int k) const { return widths_.at(k); }
  double y_inf() const { return p_.y_inf(); }

  /// Strip index of y: 0 below y_1 (including y < 0), -1 from y_K on.
  int strip(double y) const {
    if (y >= ys_[K_]) return -1;
    const auto it = std::upper_bound(ys_.begin(), ys_.end(), y);
    return std::max(0, static_cast<int>(it - ys_.begin()) - 1);
  }
  /// Local strip coordinate s = (y - y_k) / a^{k+1}.
  double local(int k, double y) const { return (y - ys_[k]) / widths_[k]; }

  // f_k and derivatives
  double f(int k, double x) const { return amp_[k] * std::sin(x * freq_[k]); }
  double fp(int k, double x) const { return amp_[k] * freq_[k] * std::cos(x * freq_[k]); }

  double psi_local(int k, double x, double s) const {
    const double t = phi_(s);
    return (1.0 - t) * f(k, x) + t * f(k + 1, x);
  }
  double psi_x_local(int k, double x, double s) const {
    const double t = phi_(s);
    return (1.0 - t) * fp(k, x) + t * fp(k + 1, x);
  }
  double psi_y_local(int k, double x, double s) const {
    return phi_.derivative(s) / widths_[k] * (f(k + 1, x) - f(k, x));
  }
  double psi_xy_local(int k, double x, double s) const {
    return phi_.derivative(s) / widths_[k] * (fp(k + 1, x) - fp(k, x));
  }

  double value(double x, double y) const override {
    const int k = strip(y);
    return k < 0 ? 0.0 : psi_local(k, x, local(k, y));
  }
  double dx(double x, double y) const override {
    const int k = strip(y);
    return k < 0 ? 0.0 : psi_x_local(k, x, local(k, y));
  }
  double dy(double x, double y) const override {
    const int k = strip(y);
    return k < 0 ? 0.0 : psi_y_local(k, x, local(k, y));
  }
  double dxy(double x, double y) const {
    const int k = strip(y);
    return k < 0 ? 0.0 : psi_xy_local(k, x, local(k, y));
  }

  /// Per-strip bounds |psi_x| <= Bx, |psi_y| <= By.
  double slope_x_bound(int k) const { return std::max(amp_[k] * freq_[k], amp_[k + 1] * freq_[k + 1]); }
  double slope_y_bound(int k) const { return kTransitionSlope / widths_[k] * (amp_[k] + amp_[k + 1]); }
  double strip_slope_bound(int k) const {
    const double bx = slope_x_bound(k), by = slope_y_bound(k);
    return std::sqrt(1.0 + bx * bx + by * by);
  }

  double slope_bound(const Rect& r) const override {
    if (r.y1 <= 0.0 || r.y0 >= y_inf()) return 1.0;
    const int k0 = std::max(0, strip(std::max(r.y0, 0.0)));
    const int k1 = strip(r.y1);
    if (k1 < 0 && r.y1 > ys_[K_]) {
      // the tail strips are not resolved: bounded only if the slopes do not grow
      if (p_.h * p_.inv_lambda > 1.0 || p_.h > p_.a) return kInf;
    }
    const int top = k1 < 0 ? K_ - 1 : k1;
    double m = 1.0;
    for (int k = k0; k <= top; ++k) {
      // a strip touched only at its lower edge contributes its flat start
      if (ys_[k] >= r.y1 && k > k0) break;
      m = std::max(m, strip_slope_bound(k));
    }
    if (k1 < 0) {
      for (int k = K_; k < K_ + 60; ++k) {
        const double bx = std::max(std::pow(p_.h * p_.inv_lambda, k), std::pow(p_.h * p_.inv_lambda, k + 1));
        const double by = kTransitionSlope * std::pow(p_.h / p_.a, k) * (1.0 + p_.h) / p_.a;
        m = std::max(m, std::sqrt(1.0 + bx * bx + by * by));
      }
    }
    return m;
  }

  double height_bound(const Rect& r) const override {
    if (r.y1 <= 0.0 || r.y0 >= ys_[K_]) return r.y0 >= ys_[K_] ? std::pow(p_.h, K_) : 0.0;
    const int k0 = std::max(0, strip(std::max(r.y0, 0.0)));
    return k0 == 0 ? p_.h : std::pow(p_.h, k0);
  }

  std::vector<double> y_breaks(double y0, double y1) const override {
    std::vector<double> out;
    for (int k = 1; k <= K_; ++k) {
      if (ys_[k] > y0 && ys_[k] < y1) out.push_back(ys_[k]);
    }
    return out;
  }

  /// Fast oscillation length, floored at pi / 2^16 for the generic
  /// quadrature paths (the periodic overrides below never use the floor).
  double x_period(double y0, double y1) const override {
    if (y1 < 0.0 || y0 >= ys_[K_]) return kInf;
    int k = strip(y1);
    if (k < 0) k = K_ - 1;
    return std::max(2.0 * std::numbers::pi / freq_[k + 1], std::numbers::pi / 65536.0);
  }

  /// Period in x of |grad psi|^2 on strip k, and how many fit in [0, pi].
  double length_period(int k) const {
    const double pi = std::numbers::pi;
    if (k == 0) return pi / p_.inv_lambda;
    if (p_.inv_lambda % 2 == 0) return 2.0 * pi / freq_[k];
    return pi / freq_[k];
  }
  double periods_in_pi(int k) const { return std::round(std::numbers::pi / length_period(k)); }
  /// Period in x of psi itself (and of the pulled-back form) on strip k.
  double form_period(int k) const { return 2.0 * std::numbers::pi / freq_[std::max(k, 1)]; }

  /// Integral of a periodic f(x, s) over [x0, x1] x [s0, s1] of strip k,
  /// integrating one period and multiplying.
  template <class F>
  QuadratureResult periodic_integral_2d(F&& fn, double period, int k, double x0, double x1, double s0, double s1,
                                        const QuadratureOptions& opt) const {
    QuadratureResult out{0.0, 0.0, 0, true};
    if (!(x1 > x0) || !(s1 > s0)) return out;
    double n = std::floor((x1 - x0) / period);
    double rem = (x1 - x0) - n * period;
    if (rem > period * (1.0 - 1e-12)) {
      n += 1.0;
      rem = 0.0;
    }
    if (rem < period * 1e-12) rem = 0.0;
    const double fast = 2.0 * std::numbers::pi / freq_[k + 1];
    auto piece = [&](double a, double b, const QuadratureOptions& o) {
      const auto xb = panel_breaks(a, b, fast / 4.0);
      const auto sb = panel_breaks(s0, s1, 0.25);
      return integrate_2d(fn, xb, sb, o);
    };
    if (n > 0.0) {
      QuadratureOptions o = opt;
      o.abs_tol = opt.abs_tol / n;
      const auto one = piece(x0, x0 + period, o);
      out.value += n * one.value;
      out.error += n * one.error;
      out.panels += one.panels;
      out.converged = out.converged && one.converged;
    }
    if (rem > 0.0) {
      const auto tail = piece(x0 + n * period, x1, opt);
      out.value += tail.value;
      out.error += tail.error;
      out.panels += tail.panels;
      out.converged = out.converged && tail.converged;
    }
    return out;
  }

  /// Closed-form area bound of strip k.
  double strip_area_bound(int k) const {
    const double a = p_.a, h = p_.h, il = p_.inv_lambda;
    const double hk = std::pow(h, k);
    return std::numbers::pi * std::pow(a, k) *
           std::sqrt(1.0 + 16.0 * hk * hk * std::pow(il, 2 * k) + 4.0 * hk * hk * std::pow(a, -2 * k));
  }
  /// Sum of the closed-form bounds over k >= K (geometric majorant).
  double tail_area_bound(int K) const {
    const double a = p_.a, h = p_.h, r = h * a * p_.inv_lambda;
    if (!(r < 1.0)) return kInf;
    // sqrt(1 + u^2 + v^2) <= 1 + u + v termwise
    return std::numbers::pi * (std::pow(a, K) / (1.0 - a) + 4.0 * std::pow(r, K) / (1.0 - r) +
                               (h > 0.0 ? 2.0 * std::pow(h, K) / (1.0 - h) : 0.0));
  }

  /// Area A_k of strip k over [0, pi]; cached.
  QuadratureResult strip_area(int k) const {
    if (k < 0 || k >= K_) throw DomainError("strip index outside the resolved range");
    if (!areas_[k]) {
      const QuadratureOptions opt{1e-12 * std::max(1.0, strip_area_bound(k)), 1e-11, 400000};
      areas_[k] = band_area(k, 0.0, std::numbers::pi, 0.0, 1.0, opt);
    }
    return *areas_[k];
  }

  QuadratureResult area(const Rect& r, const QuadratureOptions& opt) const override {
    QuadratureResult out{0.0, 0.0, 0, true};
    const double w = r.x1 - r.x0;
    if (!(w > 0.0) || !(r.y1 > r.y0)) return out;
    auto add = [&](const QuadratureResult& q) {
      out.value += q.value;
      out.error += q.error;
      out.panels += q.panels;
      out.converged = out.converged && q.converged;
    };
    // flat below y = 0 and above y_inf
    if (r.y0 < 0.0) out.value += w * (std::min(r.y1, 0.0) - r.y0);
    if (r.y1 > y_inf()) out.value += w * (r.y1 - std::max(r.y0, y_inf()));
    const bool full_x = r.x0 == 0.0 && r.x1 == std::numbers::pi;
    for (int k = 0; k < K_; ++k) {
      const double lo = std::max(r.y0, ys_[k]), hi = std::min(r.y1, ys_[k + 1]);
      if (!(hi > lo)) continue;
      if (full_x && lo == ys_[k] && hi == ys_[k + 1]) {
        add(strip_area(k));
      } else {
        add(band_area(k, r.x0, r.x1, local(k, lo), local(k, hi), opt));
      }
    }
    const double lo = std::max(r.y0, ys_[K_]), hi = std::min(r.y1, y_inf());
    if (hi > lo) {
      // truncated tail: at least flat, at most the geometric majorant
      out.value += w * (hi - lo);
      out.error += tail_area_bound(K_);
    }
    return out;
  }

  QuadratureResult section_length(double x0, double x1, double y, const QuadratureOptions& opt) const override {
    const int k = strip(y);
    if (k < 0 || y < 0.0 || !(x1 > x0)) return {std::max(x1 - x0, 0.0), 0.0, 1, true};
    const double s = local(k, y);
    const double period = length_period(k);
    double n = std::floor((x1 - x0) / period);
    double rem = (x1 - x0) - n * period;
    if (rem > period * (1.0 - 1e-12)) {
      n += 1.0;
      rem = 0.0;
    }
    auto g = [this, k, s](double x) {
      const double gx = psi_x_local(k, x, s);
      return std::sqrt(1.0 + gx * gx);
    };
    const double fast = 2.0 * std::numbers::pi / freq_[k + 1];
    QuadratureResult out{0.0, 0.0, 0, true};
    if (n > 0.0) {
      QuadratureOptions o = opt;
      o.abs_tol = opt.abs_tol / n;
      const auto one = integrate(g, panel_breaks(x0, x0 + period, fast / 4.0), o);
      out = {n * one.value, n * one.error, one.panels, one.converged};
    }
    if (rem > period * 1e-12) {
      const double a = x0 + n * period;
      const auto t = integrate(g, panel_breaks(a, x1, fast / 4.0), opt);
      out.value += t.value;
      out.error += t.error;
      out.panels += t.panels;
      out.converged = out.converged && t.converged;
    }
    return out;
  }

  std::string name() const override { return "oscillating surface"; }

  // Fixed-rule section integrals.  The rule depends only on the strip, so
  // the results are smooth in y inside a strip and finite differences of
  // du stay clean.

  /// Panels per length period on strip k.
  int fixed_panels(int k) const {
    const double fast = std::numbers::pi / freq_[k + 1];  // period of cos^2 of the fast term
    const double count = std::max(1.0, std::round(length_period(k) / fast));
    const double amp = std::max(amp_[k] * freq_[k], amp_[k + 1] * freq_[k + 1]);
    return static_cast<int>(count * (8.0 + std::ceil(3.0 * amp)));
  }

  /// (integral of sqrt(1+psi_x^2), integral of psi_x psi_xy / sqrt(1+psi_x^2))
  /// over [0, len] at local height s, with the fixed rule.
  std::pair<double, double> fixed_section(int k, double s, double len, int panels) const {
    if (len <= 0.0 || panels <= 0) return {0.0, 0.0};
    const auto& rule = GaussLegendreRule<12>::get();
    const double t = phi_(s);
    const double dt = phi_.derivative(s) / widths_[k];
    const double hw = 0.5 * len / panels;
    double l = 0.0, dl = 0.0;
    for (int i = 0; i < panels; ++i) {
      const double c = (2 * i + 1) * hw;
      for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
        const double x = c + hw * rule.nodes[j];
        const double a = fp(k, x), b = fp(k + 1, x);
        const double gx = (1.0 - t) * a + t * b;
        const double n = std::sqrt(1.0 + gx * gx);
        l += rule.weights[j] * n;
        dl += rule.weights[j] * gx * dt * (b - a) / n;
      }
    }
    return {l * hw, dl * hw};
  }

  /// u = L(x, y) / L(y) and du, from the periodic decomposition
  /// L(x, y) = n L_P(y) + l(x - nP, y) with L(y) = N L_P(y).
  DuValue u_and_du(double x, double y) const {
    const double pi = std::numbers::pi;
    DuValue d;
    const int k = strip(y);
    if (k < 0) {
      d.u = x / pi;
      d.du[0] = 1.0 / pi;
      d.length = pi;
      return d;
    }
    const double s = local(k, y);
    const double period = length_period(k);
    const double N = periods_in_pi(k);
    const int panels = fixed_panels(k);
    const auto [lp, dlp] = fixed_section_cached(k, s, period, panels);
    double n = std::floor(x / period);
    double rem = x - n * period;
    if (rem > period * (1.0 - 1e-12)) {
      n += 1.0;
      rem = 0.0;
    }
    // same panel count on [0, rem] so the value is smooth in x as well
    const auto [l, dl] = fixed_section(k, s, rem, panels);
    const double gx = psi_x_local(k, x, s);
    d.length = N * lp;
    d.u = (n * lp + l) / d.length;
    d.du[0] = std::sqrt(1.0 + gx * gx) / d.length;
    // (L dL(x) - L(x) dL) / L^2 with the n-terms cancelled
    d.du[1] = (lp * dl - l * dlp) / (N * lp * lp);
    return d;
  }

  TangentFrame tangent_frame(double x, double y) const {
    const double gx = dx(x, y), gy = dy(x, y);
    const double n1 = std::sqrt(1.0 + gx * gx);
    const double n3 = std::sqrt(1.0 + gx * gx + gy * gy);
    TangentFrame f;
    f.t1 = {1.0 / n1, 0.0, gx / n1};
    f.t2 = {-gx * gy / (n1 * n3), (1.0 + gx * gx) / (n1 * n3), gy / (n1 * n3)};
    f.t3 = {-gx / n3, -gy / n3, 1.0 / n3};
    return f;
  }

  /// du pulled back by the projection, restricted to the tangent plane.
  KCovector<3> omega_on_surface(double x, double y) const {
    KCovector<3> w(1);
    if (y >= ys_[K_]) return w;
    const auto d = u_and_du(x, y);
    const auto fr = tangent_frame(x, y);
    const Point3 c{d.du[0], d.du[1], 0.0};
    const double cn = dot(c, fr.t3);
    for (int i = 0; i < 3; ++i) w[i] = c[i] - cn * fr.t3[i];
    return w;
  }

  /// The form on R^3: periodic in x with a cutoff outside [0, pi], cut off
  /// below y = 0 and in the distance to the surface, zero from y_K on.
  KCovector<3> omega(const Point3& p) const {
    const double pi = std::numbers::pi;
    double x = p[0];
    const double y = p[1];
    KCovector<3> zero(1);
    if (y >= ys_[K_]) return zero;
    double c = y < 0.0 ? cutoff(y) : 1.0;
    if (x < 0.0 || x > pi) {
      c *= cutoff((2.0 * x - pi) / pi);
      if (c == 0.0) return zero;
      x += x < 0.0 ? pi : -pi;
    }
    if (c == 0.0) return zero;
    c *= cutoff(p[2] - value(x, y));
    if (c == 0.0) return zero;
    auto w = omega_on_surface(x, y);
    w *= c;
    return w;
  }

  /// E = [0, pi] x {y_inf} x [-1, 1].
  ExceptionalSet<3> singular_set() const {
    return ExceptionalSet<3>::box({0.0, y_inf(), -1.0}, {std::numbers::pi, y_inf(), 1.0});
  }

  /// Finite-difference step adapted to the strip of p.
  double fd_step(const Point3& p) const {
    int k = strip(p[1]);
    if (k < 0) k = K_ - 1;
    // the x scale is the fast period shrunk by the slope, which sharpens
    // the kinks of sqrt(1 + psi_x^2)
    return 3e-3 * std::min(std::pow(p_.lambda(), k + 1) / (1.0 + slope_x_bound(k)), widths_[k]);
  }

  Point3 chart(double x, double y) const { return {x, y, value(x, y)}; }

 private:
  QuadratureResult band_area(int k, double x0, double x1, double s0, double s1, const QuadratureOptions& opt) const {
    auto g = [this, k](double x, double s) {
      const double gx = psi_x_local(k, x, s), gy = psi_y_local(k, x, s);
      return std::sqrt(1.0 + gx * gx + gy * gy);
    };
    QuadratureOptions o = opt;
    o.abs_tol = opt.abs_tol / widths_[k];
    auto q = periodic_integral_2d(g, length_period(k), k, x0, x1, s0, s1, o);
    q.value *= widths_[k];
    q.error *= widths_[k];
    return q;
  }

  std::pair<double, double> fixed_section_cached(int k, double s, double len, int panels) const {
    for (const auto& e : cache_) {
      if (e.k == k && e.s == s) return e.value;
    }
    const auto v = fixed_section(k, s, len, panels);
    cache_[cache_next_] = {k, s, v};
    cache_next_ = (cache_next_ + 1) % cache_.size();
    return v;
  }

  struct CacheEntry {
    int k = -1;
    double s = std::numeric_limits<double>::quiet_NaN();
    std::pair<double, double> value;
  };

  SurfaceParams p_;
  TransitionFn phi_;
  int K_ = 0;
  std::vector<double> ys_, widths_, freq_, amp_;
  mutable std::vector<std::optional<QuadratureResult>> areas_;
  mutable std::array<CacheEntry, 8> cache_{};
  mutable std::size_t cache_next_ = 0;
};

/// The oscillating surface as a chart current over [0, pi] x [0, y_inf].
inline ChartCurrent surface_of(const std::shared_ptr<const SurfaceModel>& m) {
  return surface_current({0.0, std::numbers::pi, 0.0, m->y_inf()}, m);
}

/// Strip k as a chart current with a finite Lipschitz bound.
inline ChartCurrent strip_current(const std::shared_ptr<const SurfaceModel>& m, int k) {
  return surface_current({0.0, std::numbers::pi, m->y_k(k), m->y_k(k + 1)}, m);
}

/// The ambient form as a FormField with its adaptive difference step.
inline FormField<3> omega_field(const std::shared_ptr<const SurfaceModel>& m) {
  FormField<3> w;
  w.degree = 1;
  w.eval = [m](const Point3& p) { return m->omega(p); };
  w.singular = m->singular_set();
  w.fd_step = [m](const Point3& p) { return m->fd_step(p); };
  w.name = "normalised arclength form";
  return w;
}

struct StripArea {
  int k = 0;
  QuadratureResult area;
  double bound = 0.0;
};

inline StripArea strip_area(const SurfaceModel& m, int k) {
  StripArea s{k, m.strip_area(k), m.strip_area_bound(k)};
  if (s.area.value - s.area.error > s.bound) {
    throw InvariantError("strip area exceeds its closed-form bound at k = " + std::to_string(k));
  }
  return s;
}

/// L(y) by adaptive quadrature.
inline QuadratureResult section_length(const SurfaceModel& m, double y, const QuadratureOptions& opt = {}) {
  return m.section_length(0.0, std::numbers::pi, y, opt);
}

/// L(x, y) by adaptive quadrature.
inline QuadratureResult partial_length(const SurfaceModel& m, double x, double y, const QuadratureOptions& opt = {}) {
  return m.section_length(0.0, x, y, opt);
}

/// <d omega, tau1 ^ tau2> at Psi(x, y), with the form's difference step.
inline double tangential_differential(const SurfaceModel& m, const FormField<3>& omega, double x, double y) {
  const auto fr = m.tangent_frame(x, y);
  const auto d = differential(omega, m.chart(x, y));
  return pair(d, wedge(as_vector<3>(fr.t1), as_vector<3>(fr.t2)));
}

/// Integral of <d omega, S> over strips 0..K-1, one form period per strip,
/// by a tensor Gauss rule whose error is estimated by panel doubling.  The
/// remaining strips are bounded by the sampled sup times their mass.
struct TangentialIntegral {
  Certified computed;
  double tail_mass = 0.0;
  double tail_sup = 0.0;
  Certified total() const { return {computed.value, computed.error + tail_mass * tail_sup}; }
};

namespace detail {

template <class F>
double tensor_gauss(F&& f, double x0, double x1, int nx, double s0, double s1, int ns) {
  const auto& rule = GaussLegendreRule<6>::get();
  const double hx = (x1 - x0) / nx, hs = (s1 - s0) / ns;
  double sum = 0.0;
  for (int i = 0; i < nx; ++i) {
    for (int j = 0; j < ns; ++j) {
      const double cx = x0 + (i + 0.5) * hx, cs = s0 + (j + 0.5) * hs;
      for (int a = 0; a < 6; ++a) {
        for (int b = 0; b < 6; ++b) {
          sum += rule.weights[a] * rule.weights[b] * f(cx + 0.5 * hx * rule.nodes[a], cs + 0.5 * hs * rule.nodes[b]);
        }
      }
    }
  }
  return sum * 0.25 * hx * hs;
}

}  // namespace detail

inline TangentialIntegral tangential_integral(const SurfaceModel& m, const FormField<3>& omega, int strips = 4,
                                              int tail_samples = 64, std::uint64_t seed = 7) {
  const double pi = std::numbers::pi;
  strips = std::min(strips, m.strips());
  TangentialIntegral out;
  out.computed = {0.0, 0.0};
  for (int k = 0; k < strips; ++k) {
    auto g = [&](double x, double s) {
      const double y = m.y_k(k) + s * m.strip_width(k);
      const Point3 ex{1.0, 0.0, m.dx(x, y)}, ey{0.0, 1.0, m.dy(x, y)};
      return pair(differential(omega, m.chart(x, y)), wedge(as_vector<3>(ex), as_vector<3>(ey)));
    };
    const double period = m.form_period(k);
    const double copies = pi / period;  // integer when 1/lambda is even
    const int nx = 2 * m.params().inv_lambda;
    const double coarse = detail::tensor_gauss(g, 0.0, period, nx, 0.0, 1.0, 2);
    const double fine = detail::tensor_gauss(g, 0.0, period, 2 * nx, 0.0, 1.0, 4);
    const double scale = copies * m.strip_width(k);
    out.computed += Certified{scale * fine, scale * std::abs(fine - coarse)};
  }
  for (int k = strips; k < m.strips(); ++k) out.tail_mass += m.strip_area(k).value;
  out.tail_mass += m.tail_area_bound(m.strips());
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ux(0.0, pi), us(0.0, 1.0);
  const int hi = std::min(m.strips(), strips + 6);
  for (int k = strips; k < hi; ++k) {
    for (int i = 0; i < tail_samples; ++i) {
      const double y = m.y_k(k) + us(rng) * m.strip_width(k);
      out.tail_sup = std::max(out.tail_sup, std::abs(tangential_differential(m, omega, ux(rng), y)));
    }
  }
  return out;
}

struct FailureConfig {
  int samples = 1000;
  std::uint64_t seed = 1;
  int sample_strips = 10;   // tangential samples drawn from strips 0..sample_strips-1
  int sup_from = 2, sup_to = 10;
  int sup_grid = 2048;
  ContentBudget content{0.4, 1.0 / 3.0, 18};
  double tangential_tol = 1e-3;
  double circulation_tol = 1e-4;
};

struct SupRow {
  int k = 0;
  double y = 0.0, sup = 0.0, envelope = 0.0;
};

struct MassRow {
  int k = 0;
  double area = 0.0, error = 0.0, bound = 0.0, partial_sum = 0.0;
};

struct FailureReport {
  SurfaceParams params;
  std::vector<std::string> violations;
  bool refused = false;
  Certified circulation;
  int tangential_samples = 0;
  double tangential_max = 0.0, tangential_mean = 0.0;
  std::vector<SupRow> sup_table;
  bool sup_decreasing = true;
  /// K with sup ~ K * envelope (geometric mean of the ratios), and whether
  /// every row stays below 10 K * envelope.
  double envelope_constant = 0.0;
  bool within_envelope = false;
  ContentProfile content;
  std::vector<MassRow> mass_table;
  double tail_bound = 0.0;
  Certified mass;
  Certified boundary_mass;
  double expected_boundary_mass = 0.0;
  bool failure_shown = false;
};

inline FailureReport verify_failure(const std::shared_ptr<const SurfaceModel>& m, const FailureConfig& cfg = {}) {
  const double pi = std::numbers::pi;
  FailureReport r;
  r.params = m->params();
  r.violations = r.params.violations();
  if (!r.violations.empty()) {
    r.refused = true;
    return r;
  }
  const auto s = Current{surface_of(m)};
  const auto w = omega_field(m);
  r.circulation = circulation(w, s);

  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> ux(0.0, pi), us(0.0, 1.0);
  std::uniform_int_distribution<int> uk(0, std::min(cfg.sample_strips, m->strips()) - 1);
  double sum = 0.0;
  for (int i = 0; i < cfg.samples; ++i) {
    const int k = uk(rng);
    const double y = m->y_k(k) + us(rng) * m->strip_width(k);
    const double v = std::abs(tangential_differential(*m, w, ux(rng), y));
    r.tangential_max = std::max(r.tangential_max, v);
    sum += v;
  }
  r.tangential_samples = cfg.samples;
  r.tangential_mean = cfg.samples > 0 ? sum / cfg.samples : 0.0;

  const auto& p = r.params;
  for (int k = cfg.sup_from; k <= std::min(cfg.sup_to, m->strips() - 1); ++k) {
    SupRow row{k, m->y_k(k), 0.0, 0.0};
    for (int i = 0; i <= cfg.sup_grid; ++i) {
      row.sup = std::max(row.sup, m->omega(m->chart(pi * i / cfg.sup_grid, row.y)).norm());
    }
    row.envelope = std::max(std::pow(p.lambda() / p.h, k), std::pow(p.lambda() / p.a, k));
    if (!r.sup_table.empty() && !(row.sup < r.sup_table.back().sup)) r.sup_decreasing = false;
    r.sup_table.push_back(row);
  }

  if (!r.sup_table.empty()) {
    double lsum = 0.0;
    for (const auto& row : r.sup_table) lsum += std::log(row.sup / row.envelope);
    r.envelope_constant = std::exp(lsum / static_cast<double>(r.sup_table.size()));
    r.within_envelope = std::all_of(r.sup_table.begin(), r.sup_table.end(), [&](const SupRow& row) {
      return row.sup <= 10.0 * r.envelope_constant * row.envelope;
    });
  }

  r.content = intrinsic_content(s, m->singular_set(), cfg.content.r0, cfg.content.q, cfg.content.steps);

  double partial = 0.0, err = 0.0;
  for (int k = 0; k < m->strips(); ++k) {
    const auto a = strip_area(*m, k);
    partial += a.area.value;
    err += a.area.error;
    r.mass_table.push_back({k, a.area.value, a.area.error, a.bound, partial});
  }
  r.tail_bound = m->tail_area_bound(m->strips());
  r.mass = {partial + 0.5 * r.tail_bound, err + 0.5 * r.tail_bound};
  r.boundary_mass = boundary_mass(s);
  r.expected_boundary_mass = 2.0 * pi + 2.0 * m->y_inf();
  r.failure_shown = std::abs(r.circulation.value - 1.0) <= cfg.circulation_tol &&
                    r.tangential_max <= cfg.tangential_tol;
  return r;
}

}  // namespace stokeslab
