#pragma once

// Dyadic cubes and finite cube complexes: the computable model of bounded
// sets of finite perimeter.  Coordinates are integers at a generation, so
// measure, perimeter and set operations are exact.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <tuple>
#include <unordered_set>
#include <vector>

#include "stokeslab/error.hpp"
#include "stokeslab/vec.hpp"

namespace stokeslab {

inline constexpr int kDefaultMaxGeneration = 40;

/// Axis-aligned root box; every dyadic cube lives inside one.  Sides may
/// differ per axis, in which case "cubes" are similar copies of the root.
template <int M>
struct RootBox {
  Point<M> corner{};
  Point<M> side{};

  static RootBox unit() {
    RootBox r;
    r.side.fill(1.0);
    return r;
  }
  static RootBox cube(const Point<M>& corner, double side) {
    RootBox r;
    r.corner = corner;
    r.side.fill(side);
    return r;
  }

  bool operator==(const RootBox&) const = default;
};

template <int M>
struct DyadicCube {
  int generation = 0;
  std::array<std::int64_t, M> corner{};
  RootBox<M> root = RootBox<M>::unit();

  double side(int axis) const { return std::ldexp(root.side[axis], -generation); }
  double lo(int axis) const { return root.corner[axis] + side(axis) * static_cast<double>(corner[axis]); }
  double hi(int axis) const { return root.corner[axis] + side(axis) * static_cast<double>(corner[axis] + 1); }

  Point<M> center() const {
    Point<M> c{};
    for (int i = 0; i < M; ++i) c[i] = 0.5 * (lo(i) + hi(i));
    return c;
  }

  /// The 2^M vertices, ordered by the bit pattern of the axes taken at hi.
  std::vector<Point<M>> vertices() const {
    std::vector<Point<M>> out;
    out.reserve(1u << M);
    for (unsigned b = 0; b < (1u << M); ++b) {
      Point<M> p{};
      for (int i = 0; i < M; ++i) p[i] = (b >> i & 1u) ? hi(i) : lo(i);
      out.push_back(p);
    }
    return out;
  }

  double measure() const {
    double v = 1.0;
    for (int i = 0; i < M; ++i) v *= side(i);
    return v;
  }

  double perimeter() const {
    double p = 0.0;
    for (int i = 0; i < M; ++i) {
      double face = 1.0;
      for (int j = 0; j < M; ++j) {
        if (j != i) face *= side(j);
      }
      p += 2.0 * face;
    }
    return p;
  }

  double diameter() const {
    double s = 0.0;
    for (int i = 0; i < M; ++i) s += side(i) * side(i);
    return std::sqrt(s);
  }

  bool contains(const Point<M>& x) const {
    for (int i = 0; i < M; ++i) {
      if (x[i] < lo(i) || x[i] > hi(i)) return false;
    }
    return true;
  }

  DyadicCube parent() const {
    if (generation == 0) throw StructuralError("root cube has no parent");
    DyadicCube p = *this;
    --p.generation;
    for (auto& c : p.corner) c = c >> 1;  // arithmetic shift floors negatives
    return p;
  }

  /// True when this cube equals `o` or lies inside it.
  bool inside(const DyadicCube& o) const {
    if (o.generation > generation) return false;
    const int shift = generation - o.generation;
    for (int i = 0; i < M; ++i) {
      if ((corner[i] >> shift) != o.corner[i]) return false;
    }
    return true;
  }

  auto key() const { return std::tuple(generation, corner); }
  bool operator==(const DyadicCube& o) const { return key() == o.key(); }
  bool operator<(const DyadicCube& o) const { return key() < o.key(); }
};

/// The 2^M children of Q; raises DepthError past `max_generation`.
template <int M>
std::vector<DyadicCube<M>> subdivide(const DyadicCube<M>& q, int max_generation = kDefaultMaxGeneration) {
  if (q.generation + 1 > max_generation) {
    std::string where;
    for (int i = 0; i < M; ++i) where += (i ? ", " : "") + std::to_string(q.lo(i));
    throw DepthError("subdivision beyond generation " + std::to_string(max_generation) + " at cube with corner (" +
                     where + ")");
  }
  std::vector<DyadicCube<M>> out;
  out.reserve(1u << M);
  for (unsigned b = 0; b < (1u << M); ++b) {
    DyadicCube<M> c = q;
    c.generation = q.generation + 1;
    for (int i = 0; i < M; ++i) c.corner[i] = 2 * q.corner[i] + ((b >> i) & 1u);
    out.push_back(c);
  }
  return out;
}

namespace detail {

template <int M>
struct CubeKeyHash {
  std::size_t operator()(const DyadicCube<M>& c) const {
    std::size_t h = std::hash<int>{}(c.generation);
    for (auto v : c.corner) h = h * 1000003u ^ std::hash<std::int64_t>{}(v);
    return h;
  }
};

template <int M>
using CubeHashSet = std::unordered_set<DyadicCube<M>, CubeKeyHash<M>>;

}  // namespace detail

/// Finite union of dyadic cubes of one root box in canonical form: no cube
/// contains another, no complete sibling group remains, sorted by
/// (generation, corner).
template <int M>
class CubeSet {
 public:
  CubeSet() : root_(RootBox<M>::unit()) {}
  explicit CubeSet(RootBox<M> root) : root_(root) {}
  CubeSet(RootBox<M> root, std::vector<DyadicCube<M>> cubes) : root_(root), cubes_(std::move(cubes)) {
    for (auto& c : cubes_) c.root = root_;
    canonicalize();
  }

  /// The whole root box.
  static CubeSet full(RootBox<M> root = RootBox<M>::unit()) {
    DyadicCube<M> q;
    q.root = root;
    return CubeSet(root, {q});
  }

  /// All generation-g cubes of the root box.
  static CubeSet uniform(RootBox<M> root, int generation) {
    std::vector<DyadicCube<M>> cubes;
    const std::int64_t n = std::int64_t{1} << generation;
    std::int64_t total = 1;
    for (int i = 0; i < M; ++i) total *= n;
    for (std::int64_t idx = 0; idx < total; ++idx) {
      DyadicCube<M> c;
      c.generation = generation;
      c.root = root;
      std::int64_t r = idx;
      for (int i = 0; i < M; ++i) {
        c.corner[i] = r % n;
        r /= n;
      }
      cubes.push_back(c);
    }
    CubeSet s(root);
    s.cubes_ = std::move(cubes);  // already canonical only when g == 0
    s.canonicalize();
    return s;
  }

  /// Non-canonical view: the same set split into generation-g cubes
  /// (cubes finer than g are kept as they are).
  std::vector<DyadicCube<M>> refined(int generation) const {
    std::vector<DyadicCube<M>> out;
    std::vector<DyadicCube<M>> stack(cubes_.rbegin(), cubes_.rend());
    while (!stack.empty()) {
      DyadicCube<M> c = stack.back();
      stack.pop_back();
      if (c.generation >= generation) {
        out.push_back(c);
        continue;
      }
      auto kids = subdivide(c);
      for (auto it = kids.rbegin(); it != kids.rend(); ++it) stack.push_back(*it);
    }
    return out;
  }

  const RootBox<M>& root() const { return root_; }
  const std::vector<DyadicCube<M>>& cubes() const { return cubes_; }
  bool empty() const { return cubes_.empty(); }
  std::size_t size() const { return cubes_.size(); }

  int finest_generation() const {
    int g = 0;
    for (const auto& c : cubes_) g = std::max(g, c.generation);
    return g;
  }

  /// Exact Lebesgue measure.
  double measure() const {
    double s = 0.0;
    for (const auto& c : cubes_) s += c.measure();
    return s;
  }

  /// Boundary measure: facets shared by two cubes of the set cancel.
  /// For M = 1 this counts boundary points.
  double perimeter() const {
    double total = 0.0;
    for (const auto& c : cubes_) total += c.perimeter();
    return total - 2.0 * contact_measure();
  }

  /// Exact diameter of the closed union.
  double diameter() const {
    if (cubes_.empty()) throw DomainError("diameter of an empty cube set");
    std::vector<Point<M>> pts;
    for (const auto& c : cubes_) {
      for (const auto& v : c.vertices()) pts.push_back(v);
    }
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    if constexpr (M == 2) pts = hull(std::move(pts));
    double best = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      for (std::size_t j = i + 1; j < pts.size(); ++j) best = std::max(best, distance(pts[i], pts[j]));
    }
    return best;
  }

  bool contains(const Point<M>& x) const {
    for (const auto& c : cubes_) {
      if (c.contains(x)) return true;
    }
    return false;
  }

  /// Bounding box [lo, hi] of the union.
  std::pair<Point<M>, Point<M>> bounds() const {
    if (cubes_.empty()) throw DomainError("bounds of an empty cube set");
    Point<M> lo{}, hi{};
    lo.fill(INFINITY);
    hi.fill(-INFINITY);
    for (const auto& c : cubes_) {
      for (int i = 0; i < M; ++i) {
        lo[i] = std::min(lo[i], c.lo(i));
        hi[i] = std::max(hi[i], c.hi(i));
      }
    }
    return {lo, hi};
  }

  CubeSet unite(const CubeSet& o) const {
    require_same_root(o);
    std::vector<DyadicCube<M>> all = cubes_;
    all.insert(all.end(), o.cubes_.begin(), o.cubes_.end());
    return CubeSet(root_, std::move(all));
  }

  CubeSet intersect(const CubeSet& o) const {
    require_same_root(o);
    const auto mine = as_set();
    const auto theirs = o.as_set();
    std::vector<DyadicCube<M>> out;
    auto collect = [&out](const std::vector<DyadicCube<M>>& xs, const detail::CubeHashSet<M>& other) {
      for (const auto& c : xs) {
        if (has_ancestor_or_self(c, other)) out.push_back(c);
      }
    };
    collect(cubes_, theirs);
    collect(o.cubes_, mine);
    return CubeSet(root_, std::move(out));
  }

  CubeSet subtract(const CubeSet& o) const {
    require_same_root(o);
    const auto theirs = o.as_set();
    detail::CubeHashSet<M> covers_part;  // proper ancestors of cubes of o
    for (const auto& c : o.cubes_) {
      DyadicCube<M> p = c;
      while (p.generation > 0) {
        p = p.parent();
        if (!covers_part.insert(p).second) break;
      }
    }
    std::vector<DyadicCube<M>> out;
    std::vector<DyadicCube<M>> stack;
    for (const auto& c : cubes_) {
      if (has_ancestor_or_self(c, theirs)) continue;
      stack.push_back(c);
      while (!stack.empty()) {
        DyadicCube<M> q = stack.back();
        stack.pop_back();
        if (theirs.count(q)) continue;
        if (covers_part.count(q)) {
          for (const auto& k : subdivide(q)) stack.push_back(k);
        } else {
          out.push_back(q);
        }
      }
    }
    return CubeSet(root_, std::move(out));
  }

  /// Root box minus this set.
  CubeSet complement() const { return full(root_).subtract(*this); }

  /// Part on the side {x_axis <= t} (below) or {x_axis >= t}; t must be a
  /// grid line at generation <= max_generation.
  CubeSet clip(int axis, double t, bool below, int max_generation = kDefaultMaxGeneration) const {
    const double u = (t - root_.corner[axis]) / root_.side[axis];
    int g = 0;
    double scaled = u;
    while (scaled != std::floor(scaled)) {
      if (++g > max_generation) {
        throw StructuralError("half-space boundary " + std::to_string(t) + " is not on the dyadic grid");
      }
      scaled = std::ldexp(u, g);
    }
    std::vector<DyadicCube<M>> out;
    std::vector<DyadicCube<M>> stack(cubes_.begin(), cubes_.end());
    while (!stack.empty()) {
      DyadicCube<M> q = stack.back();
      stack.pop_back();
      if (q.hi(axis) <= t) {
        if (below) out.push_back(q);
      } else if (q.lo(axis) >= t) {
        if (!below) out.push_back(q);
      } else {
        for (const auto& k : subdivide(q, max_generation)) stack.push_back(k);
      }
    }
    return CubeSet(root_, std::move(out));
  }

  bool operator==(const CubeSet& o) const { return root_ == o.root_ && cubes_ == o.cubes_; }

  /// Sum over pairs of cubes of the (M-1)-measure of their common facet.
  double contact_measure() const {
    if (cubes_.empty()) return 0.0;
    const int g = finest_generation();
    struct Face {
      std::array<std::int64_t, M> lo, hi;  // integer box at the finest generation; [axis] unused
    };
    double total = 0.0;
    for (int axis = 0; axis < M; ++axis) {
      // coordinate of the facet plane -> (faces on the low side, faces on the high side)
      std::map<std::int64_t, std::pair<std::vector<Face>, std::vector<Face>>> planes;
      for (const auto& c : cubes_) {
        const int s = g - c.generation;
        Face f{};
        for (int i = 0; i < M; ++i) {
          f.lo[i] = c.corner[i] << s;
          f.hi[i] = (c.corner[i] + 1) << s;
        }
        planes[f.hi[axis]].first.push_back(f);
        planes[f.lo[axis]].second.push_back(f);
      }
      double unit = 1.0;
      for (int i = 0; i < M; ++i) {
        if (i != axis) unit *= std::ldexp(root_.side[i], -g);
      }
      const int t0 = (axis == 0) ? 1 : 0;
      for (auto& [coord, sides] : planes) {
        auto& [lows, highs] = sides;
        if (lows.empty() || highs.empty()) continue;
        if constexpr (M == 1) {
          total += static_cast<double>(std::min(lows.size(), highs.size()));
          continue;
        } else {
          std::sort(highs.begin(), highs.end(), [t0](const Face& a, const Face& b) { return a.lo[t0] < b.lo[t0]; });
          std::int64_t widest = 0;
          for (const auto& h : highs) widest = std::max(widest, h.hi[t0] - h.lo[t0]);
          for (const auto& l : lows) {
            auto it = std::lower_bound(highs.begin(), highs.end(), l.lo[t0] - widest,
                                       [t0](const Face& h, std::int64_t v) { return h.lo[t0] < v; });
            for (; it != highs.end() && it->lo[t0] < l.hi[t0]; ++it) {
              double overlap = 1.0;
              for (int i = 0; i < M && overlap > 0.0; ++i) {
                if (i == axis) continue;
                const std::int64_t w = std::min(l.hi[i], it->hi[i]) - std::max(l.lo[i], it->lo[i]);
                overlap *= w > 0 ? static_cast<double>(w) : 0.0;
              }
              total += overlap * unit;
            }
          }
        }
      }
    }
    return total;
  }

 private:
  void require_same_root(const CubeSet& o) const {
    if (!(root_ == o.root_)) throw StructuralError("cube sets live on different dyadic grids");
  }

  detail::CubeHashSet<M> as_set() const { return {cubes_.begin(), cubes_.end()}; }

  static bool has_ancestor_or_self(DyadicCube<M> c, const detail::CubeHashSet<M>& set) {
    while (true) {
      if (set.count(c)) return true;
      if (c.generation == 0) return false;
      c = c.parent();
    }
  }

  void canonicalize() {
    for (const auto& c : cubes_) {
      for (int i = 0; i < M; ++i) {
        if (c.corner[i] < 0 || c.corner[i] >= (std::int64_t{1} << c.generation)) {
          throw StructuralError("dyadic cube outside its root box");
        }
      }
    }
    std::sort(cubes_.begin(), cubes_.end());
    cubes_.erase(std::unique(cubes_.begin(), cubes_.end()), cubes_.end());
    // Drop cubes covered by a coarser one.
    auto set = as_set();
    std::vector<DyadicCube<M>> kept;
    for (const auto& c : cubes_) {
      bool covered = false;
      DyadicCube<M> p = c;
      while (p.generation > 0 && !covered) {
        p = p.parent();
        covered = set.count(p) > 0;
      }
      if (!covered) kept.push_back(c);
    }
    // Merge complete sibling groups, finest generation first.
    set = detail::CubeHashSet<M>(kept.begin(), kept.end());
    int g = 0;
    for (const auto& c : kept) g = std::max(g, c.generation);
    for (; g > 0; --g) {
      std::vector<DyadicCube<M>> level;
      for (const auto& c : set) {
        if (c.generation == g) level.push_back(c);
      }
      std::sort(level.begin(), level.end());
      for (const auto& c : level) {
        if (!set.count(c)) continue;
        const DyadicCube<M> p = c.parent();
        const auto kids = subdivide(p);
        bool complete = true;
        for (const auto& k : kids) complete = complete && set.count(k);
        if (!complete) continue;
        for (const auto& k : kids) set.erase(k);
        set.insert(p);
      }
    }
    cubes_.assign(set.begin(), set.end());
    std::sort(cubes_.begin(), cubes_.end());
    for (auto& c : cubes_) c.root = root_;
  }

  static std::vector<Point<M>> hull(std::vector<Point<M>> pts) {
    if (pts.size() < 3) return pts;
    auto cross2 = [](const Point<M>& o, const Point<M>& a, const Point<M>& b) {
      return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
    };
    std::vector<Point<M>> h(2 * pts.size());
    std::size_t k = 0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      while (k >= 2 && cross2(h[k - 2], h[k - 1], pts[i]) <= 0) --k;
      h[k++] = pts[i];
    }
    for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
      while (k >= t && cross2(h[k - 2], h[k - 1], pts[i]) <= 0) --k;
      h[k++] = pts[i];
    }
    h.resize(k - 1);
    return h;
  }

  RootBox<M> root_;
  std::vector<DyadicCube<M>> cubes_;
};

/// Free-function forms of the CubeSet queries.
template <int M>
double measure(const CubeSet<M>& a) {
  return a.measure();
}
template <int M>
double perimeter(const CubeSet<M>& a) {
  return a.perimeter();
}
template <int M>
double diameter(const CubeSet<M>& a) {
  return a.diameter();
}

/// Convenience: cube of generation g with the given integer corner.
template <int M>
DyadicCube<M> make_cube(int generation, std::array<std::int64_t, M> corner, RootBox<M> root = RootBox<M>::unit()) {
  DyadicCube<M> c;
  c.generation = generation;
  c.corner = corner;
  c.root = root;
  return c;
}

}  // namespace stokeslab
