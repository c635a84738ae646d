#pragma once

#include <array>
#include <cmath>
#include <cstddef>

namespace stokeslab {

template <int N>
using Point = std::array<double, N>;

using Point2 = Point<2>;
using Point3 = Point<3>;

template <std::size_t N>
std::array<double, N> operator+(std::array<double, N> a, const std::array<double, N>& b) {
  for (std::size_t i = 0; i < N; ++i) a[i] += b[i];
  return a;
}

template <std::size_t N>
std::array<double, N> operator-(std::array<double, N> a, const std::array<double, N>& b) {
  for (std::size_t i = 0; i < N; ++i) a[i] -= b[i];
  return a;
}

template <std::size_t N>
std::array<double, N> operator*(double s, std::array<double, N> a) {
  for (std::size_t i = 0; i < N; ++i) a[i] *= s;
  return a;
}

template <std::size_t N>
double dot(const std::array<double, N>& a, const std::array<double, N>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < N; ++i) s += a[i] * b[i];
  return s;
}

template <std::size_t N>
double norm(const std::array<double, N>& a) {
  return std::sqrt(dot(a, a));
}

template <std::size_t N>
double distance(const std::array<double, N>& a, const std::array<double, N>& b) {
  return norm(a - b);
}

inline Point3 cross(const Point3& a, const Point3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

/// Planar point lifted to the z = 0 plane.
inline Point3 lift(const Point2& p, double z = 0.0) { return {p[0], p[1], z}; }

}  // namespace stokeslab
