#pragma once

// Exterior algebra of R^2 and R^3: k-vectors, k-covectors, and continuous
// form fields with an optional closed-form differential.

#include <array>
#include <bit>
#include <cmath>
#include <functional>
#include <string>
#include <type_traits>
#include <vector>

#include "stokeslab/error.hpp"
#include "stokeslab/exceptional_set.hpp"
#include "stokeslab/vec.hpp"

namespace stokeslab {

enum class Variance { Vector, Covector };

namespace detail {

/// Lexicographic basis of Lambda_k(R^n) as index bitmasks (bit i <-> e_{i+1}).
template <int N>
struct BasisTable {
  std::array<std::array<unsigned, 3>, N + 1> masks{};
  std::array<int, N + 1> count{};

  constexpr BasisTable() {
    for (int k = 0; k <= N; ++k) {
      // For n <= 3, increasing masks list index sets lexicographically:
      // {1},{2},{3} and {12},{13},{23}.
      int c = 0;
      for (unsigned m = 0; m < (1u << N); ++m) {
        if (std::popcount(m) == k) masks[k][c++] = m;
      }
      count[k] = c;
    }
  }

  constexpr int index_of(int k, unsigned mask) const {
    for (int i = 0; i < count[k]; ++i) {
      if (masks[k][i] == mask) return i;
    }
    return -1;
  }
};

template <int N>
inline constexpr BasisTable<N> basis_table{};

/// Sign of the permutation sorting the concatenation (A, B) of disjoint
/// ascending index sets.
constexpr int merge_sign(unsigned a, unsigned b) {
  int inversions = 0;
  for (int i = 0; i < 3; ++i) {
    if (a & (1u << i)) inversions += std::popcount(b & ((1u << i) - 1u));
  }
  return (inversions % 2) ? -1 : 1;
}

}  // namespace detail

/// Element of Lambda_k(R^N) (Variance::Vector) or Lambda^k(R^N)
/// (Variance::Covector), stored densely in lexicographic basis order.
template <int N, Variance V>
class Graded {
  static_assert(N == 2 || N == 3, "ambient dimension must be 2 or 3");

 public:
  Graded() = default;

  explicit Graded(int degree) : degree_(check_degree(degree)) {}

  Graded(int degree, std::initializer_list<double> coeffs) : degree_(check_degree(degree)) {
    if (static_cast<int>(coeffs.size()) != size()) {
      throw StructuralError("expected " + std::to_string(size()) + " coefficients for degree " +
                            std::to_string(degree));
    }
    int i = 0;
    for (double c : coeffs) c_[i++] = c;
  }

  /// Basis element e_{i+1} (or e*_{i+1}).
  static Graded unit(int i) {
    Graded g(1);
    g.c_.at(i) = 1.0;
    return g;
  }

  static Graded scalar(double s) {
    Graded g(0);
    g.c_[0] = s;
    return g;
  }

  static Graded from_mask(unsigned mask, double value = 1.0) {
    Graded g(std::popcount(mask));
    g.c_[detail::basis_table<N>.index_of(g.degree_, mask)] = value;
    return g;
  }

  int degree() const { return degree_; }
  int size() const { return detail::basis_table<N>.count[degree_]; }
  static constexpr int dimension() { return N; }
  unsigned mask(int i) const { return detail::basis_table<N>.masks[degree_][i]; }

  double& operator[](int i) { return c_.at(i); }
  double operator[](int i) const { return c_.at(i); }

  double coefficient(unsigned mask) const {
    const int i = detail::basis_table<N>.index_of(degree_, mask);
    return i < 0 ? 0.0 : c_[i];
  }

  double norm() const {
    double s = 0.0;
    for (int i = 0; i < size(); ++i) s += c_[i] * c_[i];
    return std::sqrt(s);
  }

  Graded& operator+=(const Graded& o) {
    require_same_degree(o);
    for (int i = 0; i < size(); ++i) c_[i] += o.c_[i];
    return *this;
  }
  Graded& operator-=(const Graded& o) {
    require_same_degree(o);
    for (int i = 0; i < size(); ++i) c_[i] -= o.c_[i];
    return *this;
  }
  Graded& operator*=(double s) {
    for (double& c : c_) c *= s;
    return *this;
  }
  friend Graded operator+(Graded a, const Graded& b) { return a += b; }
  friend Graded operator-(Graded a, const Graded& b) { return a -= b; }
  friend Graded operator*(double s, Graded a) { return a *= s; }
  friend Graded operator-(Graded a) { return a *= -1.0; }

  bool operator==(const Graded&) const = default;

 private:
  static int check_degree(int degree) {
    if (degree < 0 || degree > N) {
      throw StructuralError("degree " + std::to_string(degree) + " out of range for R^" + std::to_string(N));
    }
    return degree;
  }
  void require_same_degree(const Graded& o) const {
    if (o.degree_ != degree_) throw StructuralError("degree mismatch in linear combination");
  }

  int degree_ = 0;
  std::array<double, 3> c_{};
};

template <int N>
using KVector = Graded<N, Variance::Vector>;
template <int N>
using KCovector = Graded<N, Variance::Covector>;

/// Degree-1 vector with the given coordinates.
template <int N>
KVector<N> as_vector(const std::type_identity_t<Point<N>>& p) {
  KVector<N> v(1);
  for (int i = 0; i < N; ++i) v[i] = p[i];
  return v;
}

/// Degree-1 covector with the given coordinates.
template <int N>
KCovector<N> as_covector(const std::type_identity_t<Point<N>>& p) {
  KCovector<N> v(1);
  for (int i = 0; i < N; ++i) v[i] = p[i];
  return v;
}

/// Duality pairing <xi, v>.
template <int N>
double pair(const KCovector<N>& xi, const KVector<N>& v) {
  if (xi.degree() != v.degree()) {
    throw StructuralError("pairing degree mismatch: " + std::to_string(xi.degree()) + " vs " +
                          std::to_string(v.degree()));
  }
  double s = 0.0;
  for (int i = 0; i < xi.size(); ++i) s += xi[i] * v[i];
  return s;
}

template <int N, Variance V>
Graded<N, V> wedge(const Graded<N, V>& a, const Graded<N, V>& b) {
  const int k = a.degree() + b.degree();
  if (k > N) throw StructuralError("wedge degree exceeds the ambient dimension");
  Graded<N, V> out(k);
  for (int i = 0; i < a.size(); ++i) {
    for (int j = 0; j < b.size(); ++j) {
      const unsigned ma = a.mask(i);
      const unsigned mb = b.mask(j);
      if (ma & mb) continue;
      const int idx = detail::basis_table<N>.index_of(k, ma | mb);
      out[idx] += detail::merge_sign(ma, mb) * a[i] * b[j];
    }
  }
  return out;
}

/// Interior product v _| xi, characterised by <v _| xi, w> = <xi, v ^ w>.
template <int N>
KCovector<N> interior_product(const KVector<N>& v, const KCovector<N>& xi) {
  if (v.degree() != 1) throw StructuralError("interior product needs a 1-vector");
  if (xi.degree() < 1) throw StructuralError("interior product of a 0-covector is undefined");
  KCovector<N> out(xi.degree() - 1);
  for (int o = 0; o < out.size(); ++o) {
    const unsigned mi = out.mask(o);
    double s = 0.0;
    for (int i = 0; i < N; ++i) {
      const unsigned bit = 1u << i;
      if (mi & bit) continue;
      s += detail::merge_sign(bit, mi) * v[i] * xi.coefficient(mi | bit);
    }
    out[o] = s;
  }
  return out;
}

/// Continuous k-form on R^N, continuous off an explicit exceptional set.
template <int N>
struct FormField {
  int degree = 1;
  std::function<KCovector<N>(const Point<N>&)> eval;
  /// Closed-form exterior derivative when available.
  std::function<KCovector<N>(const Point<N>&)> differential;
  /// Points where the form may fail to be differentiable.
  ExceptionalSet<N> singular;
  /// Finite-difference step suited to the local scale of the form.
  std::function<double(const Point<N>&)> fd_step;
  std::string name;

  KCovector<N> operator()(const Point<N>& x) const { return eval(x); }
  bool has_differential() const { return static_cast<bool>(differential); }
};

/// Fourth-order central-difference exterior derivative
/// d omega = sum_i e*_i ^ d_i omega; the stencil reaches 2 * step.
inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

template <int N>
KCovector<N> numeric_differential(const FormField<N>& omega, const std::type_identity_t<Point<N>>& x, double step = 1e-4) {
  if (!(step > 0.0)) throw DomainError("finite-difference step must be positive");
  if (omega.degree >= N) return KCovector<N>(N);
  if (!omega.singular.empty() && omega.singular.distance(x) <= 2.0 * step) {
    throw DomainError("finite-difference stencil meets the exceptional set");
  }
  KCovector<N> out(omega.degree + 1);
  for (int i = 0; i < N; ++i) {
    // snap the step to a multiple of 2 ulp(x_i) so that x_i +- step and
    // x_i +- 2 step are exact and the stencil stays symmetric
    const double ulp2 = 2.0 * (std::nextafter(std::abs(x[i]), kInfinity) - std::abs(x[i]));
    const double h = std::max(ulp2, std::round(step / ulp2) * ulp2);
    auto at = [&](double t) {
      Point<N> p = x;
      p[i] += t;
      return omega.eval(p);
    };
    KCovector<N> partial = 8.0 * (at(h) - at(-h)) - (at(2.0 * h) - at(-2.0 * h));
    partial *= 1.0 / (12.0 * h);
    out += wedge(KCovector<N>::unit(i), partial);
  }
  return out;
}

/// Exterior derivative, analytic when the field provides one.
template <int N>
KCovector<N> differential(const FormField<N>& omega, const std::type_identity_t<Point<N>>& x, double step = 1e-4) {
  if (omega.has_differential()) return omega.differential(x);
  return numeric_differential(omega, x, omega.fd_step ? omega.fd_step(x) : step);
}

/// Monomial c * x^px * y^py * z^pz (the z power is ignored in R^2).
struct Monomial {
  double coefficient = 1.0;
  std::array<int, 3> powers{};
};

namespace detail {

template <int N>
double eval_poly(const std::vector<Monomial>& p, const Point<N>& x, int diff_axis = -1) {
  double s = 0.0;
  for (const auto& m : p) {
    double term = m.coefficient;
    for (int i = 0; i < N; ++i) {
      int e = m.powers[i];
      if (i == diff_axis) {
        if (e == 0) {
          term = 0.0;
          break;
        }
        term *= e;
        --e;
      }
      term *= std::pow(x[i], e);
    }
    s += term;
  }
  return s;
}

}  // namespace detail

/// 1-form sum_i P_i dx_i with polynomial coefficients and its closed-form
/// differential sum_{i<j} (d_i P_j - d_j P_i) dx_i ^ dx_j.
template <int N>
FormField<N> polynomial_one_form(std::array<std::vector<Monomial>, N> coeffs, std::string name = "polynomial") {
  FormField<N> f;
  f.degree = 1;
  f.name = std::move(name);
  f.eval = [coeffs](const Point<N>& x) {
    KCovector<N> out(1);
    for (int i = 0; i < N; ++i) out[i] = detail::eval_poly<N>(coeffs[i], x);
    return out;
  };
  f.differential = [coeffs](const Point<N>& x) {
    KCovector<N> out(2);
    for (int i = 0; i < N; ++i) {
      for (int j = i + 1; j < N; ++j) {
        const double v = detail::eval_poly<N>(coeffs[j], x, i) - detail::eval_poly<N>(coeffs[i], x, j);
        out[detail::basis_table<N>.index_of(2, (1u << i) | (1u << j))] = v;
      }
    }
    return out;
  };
  return f;
}

/// The 1-form x dy (area form primitive).
template <int N>
FormField<N> x_dy() {
  std::array<std::vector<Monomial>, N> c{};
  c[1] = {Monomial{1.0, {1, 0, 0}}};
  return polynomial_one_form<N>(c, "x dy");
}

}  // namespace stokeslab
