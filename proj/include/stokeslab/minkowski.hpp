#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "stokeslab/currents.hpp"
#include "stokeslab/error.hpp"

namespace stokeslab {

enum class ContentTrend { Bounded, Divergent, Vanishing, Inconclusive };

inline const char* to_string(ContentTrend t) {
  switch (t) {
    case ContentTrend::Bounded: return "BOUNDED";
    case ContentTrend::Divergent: return "DIVERGENT";
    case ContentTrend::Vanishing: return "VANISHING";
    case ContentTrend::Inconclusive: return "INCONCLUSIVE";
  }
  return "?";
}

/// Decision thresholds for the trend of v_j = ||T||(B(E, r_j)) / (2 r_j).
struct TrendRule {
  int window = 5;              // number of trailing ratios inspected
  double growth = 1.1;         // each ratio >= growth => divergent
  double plateau = 0.05;       // (max - min) / max over the tail half
};

struct ContentProfile {
  std::vector<double> radii;
  std::vector<Certified> measure;
  std::vector<double> values;
  ContentTrend trend = ContentTrend::Inconclusive;
  double sup = 0.0;
  /// -slope of log v against log r over the tail half.
  double exponent = 0.0;
  /// Set when a quadrature certificate failed before the last radius.
  bool partial = false;
  std::string note;
};

/// Least-squares slope of ys against xs.
inline double fitted_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
  const auto n = static_cast<double>(xs.size());
  if (xs.size() < 2) return 0.0;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  const double den = n * sxx - sx * sx;
  return den == 0.0 ? 0.0 : (n * sxy - sx * sy) / den;
}

inline void classify(ContentProfile& p, const TrendRule& rule = {}) {
  const auto& v = p.values;
  p.sup = v.empty() ? 0.0 : *std::max_element(v.begin(), v.end());
  if (v.empty()) {
    p.trend = ContentTrend::Inconclusive;
    return;
  }
  const std::size_t half = v.size() / 2;
  std::vector<double> lr, lv;
  for (std::size_t i = half; i < v.size(); ++i) {
    if (v[i] > 0.0) {
      lr.push_back(std::log(p.radii[i]));
      lv.push_back(std::log(v[i]));
    }
  }
  p.exponent = -fitted_slope(lr, lv);
  if (p.sup == 0.0) {
    p.trend = ContentTrend::Bounded;
    return;
  }
  const auto w = static_cast<std::size_t>(rule.window);
  if (v.size() > w) {
    bool up = true, down = true;
    for (std::size_t i = v.size() - w; i < v.size(); ++i) {
      const double ratio = v[i] / v[i - 1];
      up = up && ratio >= rule.growth;
      down = down && ratio <= 1.0 / rule.growth;
    }
    if (up) {
      p.trend = ContentTrend::Divergent;
      return;
    }
    if (down) {
      p.trend = ContentTrend::Vanishing;
      return;
    }
  }
  const auto [lo, hi] = std::minmax_element(v.begin() + static_cast<std::ptrdiff_t>(half), v.end());
  if (*hi == 0.0 || (*hi - *lo) / *hi <= rule.plateau) {
    p.trend = ContentTrend::Bounded;
    return;
  }
  p.trend = ContentTrend::Inconclusive;
}

/// Profile of the intrinsic content on r_j = r0 q^j, j = 0..steps-1.
inline ContentProfile intrinsic_content(const Current& t, const ExceptionalSet<3>& e, double r0, double q, int steps,
                                        const TrendRule& rule = {}) {
  if (!(q > 0.0 && q < 1.0)) throw DomainError("radius ratio must lie in (0, 1)");
  if (!(r0 > 0.0) || steps < 1) throw DomainError("content grid needs r0 > 0 and at least one step");
  if (!(r0 < diameter_bounds(t).upper)) throw DomainError("r0 must be smaller than the support diameter");
  ContentProfile p;
  double r = r0;
  for (int j = 0; j < steps; ++j, r *= q) {
    Certified m;
    try {
      m = e.empty() ? Certified{0.0, 0.0} : neighborhood_mass(t, e, r);
    } catch (const CertificateError& err) {
      p.partial = true;
      p.note = err.what();
      break;
    }
    p.radii.push_back(r);
    p.measure.push_back(m);
    p.values.push_back(m.value / (2.0 * r));
  }
  classify(p, rule);
  return p;
}

/// Lower bound check of the content against a known H^{m-1} measure.
struct HausdorffComparison {
  double measured = 0.0;  // min of v_j over the tail half
  double bound = 0.0;     // C * known_H
  bool holds = false;
  bool divergent = false;
};

inline HausdorffComparison hausdorff_comparison_check(const ContentProfile& p, double known_h, double c = 0.5) {
  HausdorffComparison h;
  h.bound = c * known_h;
  h.divergent = p.trend == ContentTrend::Divergent;
  if (p.values.empty()) return h;
  h.measured = *std::min_element(p.values.begin() + static_cast<std::ptrdiff_t>(p.values.size() / 2), p.values.end());
  // allow the tail values their own certificate
  double err = 0.0;
  for (std::size_t i = p.values.size() / 2; i < p.values.size(); ++i) {
    err = std::max(err, p.measure[i].error / (2.0 * p.radii[i]));
  }
  h.holds = h.measured + err >= h.bound;
  return h;
}

inline HausdorffComparison hausdorff_comparison_check(const Current& t, const ExceptionalSet<3>& e, double known_h,
                                                      double r0 = 0.4, double q = 0.5, int steps = 12,
                                                      double c = 0.5) {
  const auto h = hausdorff_comparison_check(intrinsic_content(t, e, r0, q, steps), known_h, c);
  if (!h.holds && !h.divergent) throw InvariantError("content falls below C times the Hausdorff measure");
  return h;
}

/// Grid on which disposability is judged.
struct ContentBudget {
  double r0 = 0.4;
  double q = 1.0 / 3.0;
  int steps = 12;
};

/// Outcome of the disposability test: a certificate carrying C = sup v_j,
/// or a refusal naming the trend.
struct DisposabilityEvidence {
  bool certified = false;
  double constant = 0.0;
  ContentProfile profile;
  std::string reason;
};

inline DisposabilityEvidence disposability_evidence(const Current& t, const ExceptionalSet<3>& e,
                                                    const ContentBudget& budget = {}) {
  DisposabilityEvidence d;
  if (e.empty()) {
    d.certified = true;
    d.reason = "empty exceptional set";
    return d;
  }
  d.profile = intrinsic_content(t, e, budget.r0, budget.q, budget.steps);
  switch (d.profile.trend) {
    case ContentTrend::Bounded:
    case ContentTrend::Vanishing:
      d.certified = !d.profile.partial;
      d.constant = d.profile.sup;
      d.reason = d.profile.partial ? "profile incomplete: " + d.profile.note
                                   : std::string("content ") + to_string(d.profile.trend);
      break;
    case ContentTrend::Divergent:
      d.reason = "content DIVERGENT with fitted exponent " + std::to_string(d.profile.exponent);
      break;
    case ContentTrend::Inconclusive:
      d.reason = "content INCONCLUSIVE within the radius budget";
      break;
  }
  return d;
}

}  // namespace stokeslab
