#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <type_traits>
#include <vector>

#include "stokeslab/error.hpp"
#include "stokeslab/vec.hpp"

namespace stokeslab {

/// Closed axis-aligned box [lo, hi]; a segment when all but one extent
/// vanish, a point when all do.
template <int N>
struct Box {
  Point<N> lo{};
  Point<N> hi{};

  double distance(const Point<N>& x) const {
    double s = 0.0;
    for (int i = 0; i < N; ++i) {
      const double d = std::max({lo[i] - x[i], 0.0, x[i] - hi[i]});
      s += d * d;
    }
    return std::sqrt(s);
  }

  /// Number of axes with positive extent.
  int rank() const {
    int r = 0;
    for (int i = 0; i < N; ++i) r += hi[i] > lo[i];
    return r;
  }

  /// Hausdorff measure in its own dimension (length of a segment, area of a
  /// rectangle, 1 for a point).
  double content() const {
    double c = 1.0;
    for (int i = 0; i < N; ++i) {
      if (hi[i] > lo[i]) c *= hi[i] - lo[i];
    }
    return c;
  }

  bool operator==(const Box&) const = default;
};

/// Finite union of points and axis-aligned boxes with an exact distance
/// evaluator.  Boxes are restricted to rank <= N-1 by callers that need the
/// set to be H^{N-1} sigma-finite; the container itself does not care.
template <int N>
class ExceptionalSet {
 public:
  ExceptionalSet() = default;

  static ExceptionalSet point(const Point<N>& p) {
    ExceptionalSet e;
    e.add_point(p);
    return e;
  }

  static ExceptionalSet segment(const Point<N>& a, const Point<N>& b) {
    ExceptionalSet e;
    e.add_segment(a, b);
    return e;
  }

  static ExceptionalSet box(const Point<N>& lo, const Point<N>& hi) {
    ExceptionalSet e;
    e.add_box(lo, hi);
    return e;
  }

  void add_point(const Point<N>& p) { boxes_.push_back({p, p}); }

  /// Axis-aligned segment; raises StructuralError if a and b differ in more
  /// than one coordinate.
  void add_segment(const Point<N>& a, const Point<N>& b) {
    int differing = 0;
    for (int i = 0; i < N; ++i) differing += a[i] != b[i];
    if (differing > 1) throw StructuralError("segment is not axis-aligned");
    add_box(a, b);
  }

  void add_box(Point<N> lo, Point<N> hi) {
    for (int i = 0; i < N; ++i) {
      if (lo[i] > hi[i]) std::swap(lo[i], hi[i]);
    }
    boxes_.push_back({lo, hi});
  }

  void merge(const ExceptionalSet& o) { boxes_.insert(boxes_.end(), o.boxes_.begin(), o.boxes_.end()); }

  bool empty() const { return boxes_.empty(); }
  const std::vector<Box<N>>& components() const { return boxes_; }

  /// Exact Euclidean distance; +infinity for the empty set.
  double distance(const Point<N>& x) const {
    double d = std::numeric_limits<double>::infinity();
    for (const auto& b : boxes_) d = std::min(d, b.distance(x));
    return d;
  }

  bool contains(const Point<N>& x) const { return distance(x) == 0.0; }

  /// True iff dist(x, E) < r (open neighbourhood).
  bool neighborhood_indicator(double r, const Point<N>& x) const {
    if (!(r > 0.0)) throw DomainError("neighbourhood radius must be positive");
    return distance(x) < r;
  }

  /// True when every component lies inside some component of `other`.
  bool subset_of(const ExceptionalSet& other) const {
    for (const auto& b : boxes_) {
      bool inside = false;
      for (const auto& o : other.boxes_) {
        bool ok = true;
        for (int i = 0; i < N; ++i) ok = ok && o.lo[i] <= b.lo[i] && b.hi[i] <= o.hi[i];
        inside = inside || ok;
      }
      if (!inside) return false;
    }
    return true;
  }

  bool operator==(const ExceptionalSet&) const = default;

 private:
  std::vector<Box<N>> boxes_;
};

/// Free-function form of ExceptionalSet::neighborhood_indicator.
template <int N>
bool neighborhood_indicator(const ExceptionalSet<N>& e, double r, const std::type_identity_t<Point<N>>& x) {
  return e.neighborhood_indicator(r, x);
}

}  // namespace stokeslab
