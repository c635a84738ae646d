#pragma once

// Gauss-Legendre quadrature: fixed composite rules and adaptive panel
// refinement with an embedded (coarse vs. split) error estimate.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <queue>
#include <span>
#include <string>
#include <vector>

#include "stokeslab/error.hpp"

namespace stokeslab {

/// A real value together with an absolute error bound.
struct Certified {
  double value = 0.0;
  double error = 0.0;

  Certified& operator+=(const Certified& o) {
    value += o.value;
    error += o.error;
    return *this;
  }
  friend Certified operator+(Certified a, const Certified& b) { return a += b; }
  friend Certified operator-(Certified a, const Certified& b) {
    a.value -= b.value;
    a.error += b.error;
    return a;
  }
  friend Certified operator*(double s, Certified a) {
    a.value *= s;
    a.error *= std::abs(s);
    return a;
  }
};

/// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1].
template <int Order>
struct GaussLegendreRule {
  std::array<double, Order> nodes{};
  std::array<double, Order> weights{};

  GaussLegendreRule() {
    for (int i = 0; i < Order; ++i) {
      double x = std::cos(std::numbers::pi * (i + 0.75) / (Order + 0.5));
      double dp = 0.0;
      for (int it = 0; it < 100; ++it) {
        double p0 = 1.0;
        double p1 = x;
        for (int k = 2; k <= Order; ++k) {
          const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
          p0 = p1;
          p1 = p2;
        }
        dp = Order * (x * p1 - p0) / (x * x - 1.0);
        const double dx = p1 / dp;
        x -= dx;
        if (std::abs(dx) < 1e-16) break;
      }
      nodes[i] = x;
      weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
  }

  static const GaussLegendreRule& get() {
    static const GaussLegendreRule rule;
    return rule;
  }
};

/// Single-panel Gauss-Legendre rule of the given order on [a, b].
template <int Order = 12, class F>
double gauss_legendre(F&& f, double a, double b) {
  const auto& rule = GaussLegendreRule<Order>::get();
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double sum = 0.0;
  for (int i = 0; i < Order; ++i) sum += rule.weights[i] * f(mid + half * rule.nodes[i]);
  return half * sum;
}

/// Composite rule with `panels` equal panels on [a, b].
template <int Order = 12, class F>
double gauss_legendre_composite(F&& f, double a, double b, int panels) {
  double sum = 0.0;
  const double h = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    const double lo = a + p * h;
    const double hi = (p + 1 == panels) ? b : lo + h;
    sum += gauss_legendre<Order>(f, lo, hi);
  }
  return sum;
}

/// Tensor Gauss-Legendre rule on the rectangle [x0,x1] x [y0,y1].
template <int Order = 12, class F>
double gauss_legendre_2d(F&& f, double x0, double x1, double y0, double y1) {
  return gauss_legendre<Order>(
      [&](double y) { return gauss_legendre<Order>([&](double x) { return f(x, y); }, x0, x1); },
      y0, y1);
}

struct QuadratureOptions {
  double abs_tol = 1e-10;
  double rel_tol = 1e-12;
  int max_panels = 200000;
};

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
  int panels = 0;
  bool converged = false;

  /// Returns the certified value, raising CertificateError when the error
  /// target was not met.
  Certified certified(const char* what = "quadrature") const {
    if (!converged) {
      throw CertificateError(std::string(what) + ": no convergence after " +
                             std::to_string(panels) + " panels (error estimate " +
                             std::to_string(error) + ")");
    }
    return {value, error};
  }
};

/// Adaptive Gauss-Legendre (order 12) integration over [breaks.front(), breaks.back()].
/// The breakpoints seed the initial panels; the panel with the largest
/// estimated error is bisected until the total estimate is below
/// max(abs_tol, rel_tol * |value|).
template <class F>
QuadratureResult integrate(F&& f, std::span<const double> breaks, const QuadratureOptions& opt = {}) {
  struct Panel {
    double a, b, value, error;
    bool operator<(const Panel& o) const { return error < o.error; }
  };
  auto make = [&](double a, double b) {
    const double coarse = gauss_legendre<12>(f, a, b);
    const double m = 0.5 * (a + b);
    const double fine = gauss_legendre<12>(f, a, m) + gauss_legendre<12>(f, m, b);
    return Panel{a, b, fine, std::abs(fine - coarse)};
  };

  QuadratureResult out;
  if (breaks.size() < 2) return out.converged = true, out;
  std::priority_queue<Panel> heap;
  double value = 0.0;
  double error = 0.0;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    if (!(breaks[i + 1] > breaks[i])) continue;
    Panel p = make(breaks[i], breaks[i + 1]);
    value += p.value;
    error += p.error;
    heap.push(p);
  }
  int count = static_cast<int>(heap.size());
  auto target = [&] { return std::max(opt.abs_tol, opt.rel_tol * std::abs(value)); };
  while (!heap.empty() && error > target() && count < opt.max_panels) {
    Panel p = heap.top();
    heap.pop();
    const double m = 0.5 * (p.a + p.b);
    if (!(m > p.a && m < p.b)) {  // panel is at machine resolution
      heap.push(Panel{p.a, p.b, p.value, 0.0});
      error -= p.error;
      continue;
    }
    Panel l = make(p.a, m);
    Panel r = make(m, p.b);
    value += l.value + r.value - p.value;
    error += l.error + r.error - p.error;
    heap.push(l);
    heap.push(r);
    ++count;
  }
  // Re-sum from the final panels to avoid drift from incremental updates.
  value = 0.0;
  error = 0.0;
  while (!heap.empty()) {
    value += heap.top().value;
    error += heap.top().error;
    heap.pop();
  }
  out.value = value;
  out.error = error;
  out.panels = count;
  out.converged = error <= std::max(opt.abs_tol, opt.rel_tol * std::abs(value));
  return out;
}

template <class F>
QuadratureResult integrate(F&& f, double a, double b, const QuadratureOptions& opt = {}) {
  const std::array<double, 2> br{a, b};
  return integrate(std::forward<F>(f), std::span<const double>(br), opt);
}

/// Breakpoints splitting [a, b] into panels no longer than `max_width`,
/// merged with the extra breakpoints that fall inside (a, b).
inline std::vector<double> panel_breaks(double a, double b, double max_width,
                                        std::span<const double> extra = {}) {
  std::vector<double> out;
  int n = 1;
  if (std::isfinite(max_width) && max_width > 0.0) {
    n = std::max(1, static_cast<int>(std::ceil((b - a) / max_width)));
  }
  out.reserve(n + 1 + extra.size());
  for (int i = 0; i <= n; ++i) out.push_back(i == n ? b : a + (b - a) * i / n);
  for (double e : extra) {
    if (e > a && e < b) out.push_back(e);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

/// Adaptive tensor Gauss-Legendre integration over a rectangle, refining the
/// cell with the largest coarse-vs-quadrisected discrepancy.
template <class F>
QuadratureResult integrate_2d(F&& f, std::span<const double> xbreaks, std::span<const double> ybreaks,
                              const QuadratureOptions& opt = {}) {
  struct Cell {
    double x0, x1, y0, y1, value, error;
    bool operator<(const Cell& o) const { return error < o.error; }
  };
  auto rule = [&](double x0, double x1, double y0, double y1) {
    return gauss_legendre_2d<12>(f, x0, x1, y0, y1);
  };
  auto make = [&](double x0, double x1, double y0, double y1) {
    const double coarse = rule(x0, x1, y0, y1);
    const double xm = 0.5 * (x0 + x1);
    const double ym = 0.5 * (y0 + y1);
    const double fine = rule(x0, xm, y0, ym) + rule(xm, x1, y0, ym) + rule(x0, xm, ym, y1) +
                        rule(xm, x1, ym, y1);
    return Cell{x0, x1, y0, y1, fine, std::abs(fine - coarse)};
  };
  QuadratureResult out;
  std::priority_queue<Cell> heap;
  double value = 0.0;
  double error = 0.0;
  for (std::size_t i = 0; i + 1 < xbreaks.size(); ++i) {
    for (std::size_t j = 0; j + 1 < ybreaks.size(); ++j) {
      if (!(xbreaks[i + 1] > xbreaks[i]) || !(ybreaks[j + 1] > ybreaks[j])) continue;
      Cell c = make(xbreaks[i], xbreaks[i + 1], ybreaks[j], ybreaks[j + 1]);
      value += c.value;
      error += c.error;
      heap.push(c);
    }
  }
  int count = static_cast<int>(heap.size());
  auto target = [&] { return std::max(opt.abs_tol, opt.rel_tol * std::abs(value)); };
  while (!heap.empty() && error > target() && count < opt.max_panels) {
    Cell c = heap.top();
    heap.pop();
    const double xm = 0.5 * (c.x0 + c.x1);
    const double ym = 0.5 * (c.y0 + c.y1);
    const std::array<Cell, 4> kids{make(c.x0, xm, c.y0, ym), make(xm, c.x1, c.y0, ym),
                                   make(c.x0, xm, ym, c.y1), make(xm, c.x1, ym, c.y1)};
    value -= c.value;
    error -= c.error;
    for (const Cell& k : kids) {
      value += k.value;
      error += k.error;
      heap.push(k);
    }
    count += 3;
  }
  value = 0.0;
  error = 0.0;
  while (!heap.empty()) {
    value += heap.top().value;
    error += heap.top().error;
    heap.pop();
  }
  out.value = value;
  out.error = error;
  out.panels = count;
  out.converged = error <= std::max(opt.abs_tol, opt.rel_tol * std::abs(value));
  return out;
}

}  // namespace stokeslab
