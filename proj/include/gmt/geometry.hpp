#pragma once

#include <array>
#include <cmath>
#include <cstddef>

namespace gmt {

inline constexpr int kMaxDim = 4;

// Coordinates past the ambient dimension are kept at zero, so norms and
// distances never need to know the dimension.
using Point = std::array<double, kMaxDim>;

inline Point operator+(const Point& a, const Point& b) {
  Point r;
  for (int i = 0; i < kMaxDim; ++i) r[i] = a[i] + b[i];
  return r;
}

inline Point operator-(const Point& a, const Point& b) {
  Point r;
  for (int i = 0; i < kMaxDim; ++i) r[i] = a[i] - b[i];
  return r;
}

inline Point operator*(double s, const Point& a) {
  Point r;
  for (int i = 0; i < kMaxDim; ++i) r[i] = s * a[i];
  return r;
}

inline Point& operator+=(Point& a, const Point& b) {
  for (int i = 0; i < kMaxDim; ++i) a[i] += b[i];
  return a;
}

inline double dot(const Point& a, const Point& b) {
  double s = 0.0;
  for (int i = 0; i < kMaxDim; ++i) s += a[i] * b[i];
  return s;
}

inline double norm2(const Point& a) { return dot(a, a); }
inline double norm(const Point& a) { return std::sqrt(norm2(a)); }

inline double dist2(const Point& a, const Point& b) {
  double s = 0.0;
  for (int i = 0; i < kMaxDim; ++i) {
    const double t = a[i] - b[i];
    s += t * t;
  }
  return s;
}

inline double dist(const Point& a, const Point& b) { return std::sqrt(dist2(a, b)); }

// Closed ball.
struct Ball {
  Point center{};
  double radius = 1.0;

  Ball scaled(double factor) const { return Ball{center, radius * factor}; }
  bool contains(const Point& p) const { return dist2(p, center) <= radius * radius; }
};

// r^n for small integer n, exact for powers of two.
inline double ipow(double r, int n) {
  double v = 1.0;
  for (int i = 0; i < n; ++i) v *= r;
  return v;
}

}  // namespace gmt
