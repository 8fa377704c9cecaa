#pragma once

#include <array>
#include <cmath>
#include <ostream>

namespace quake {

/// A general real 2x2 matrix [[a, b], [c, d]].
struct Mat2 {
  double a = 0, b = 0, c = 0, d = 0;

  static constexpr Mat2 identity() { return {1, 0, 0, 1}; }

  constexpr double det() const { return a * d - b * c; }
  constexpr double trace() const { return a + d; }
  constexpr Mat2 adj() const { return {d, -b, -c, a}; }
  constexpr Mat2 transpose() const { return {a, c, b, d}; }

  double norm() const { return std::sqrt(a * a + b * b + c * c + d * d); }
  double max_abs() const {
    return std::fmax(std::fmax(std::fabs(a), std::fabs(b)), std::fmax(std::fabs(c), std::fabs(d)));
  }

  /// Inverse of an invertible matrix; the caller guarantees det != 0.
  Mat2 inverse() const {
    const double k = 1.0 / det();
    return {d * k, -b * k, -c * k, a * k};
  }

  constexpr std::array<double, 2> apply(double u, double v) const {
    return {a * u + b * v, c * u + d * v};
  }

  constexpr Mat2 operator-() const { return {-a, -b, -c, -d}; }
  constexpr Mat2& operator+=(const Mat2& o) {
    a += o.a; b += o.b; c += o.c; d += o.d;
    return *this;
  }
  constexpr Mat2& operator-=(const Mat2& o) {
    a -= o.a; b -= o.b; c -= o.c; d -= o.d;
    return *this;
  }
  constexpr Mat2& operator*=(double s) {
    a *= s; b *= s; c *= s; d *= s;
    return *this;
  }
};

constexpr Mat2 operator+(Mat2 x, const Mat2& y) { return x += y; }
constexpr Mat2 operator-(Mat2 x, const Mat2& y) { return x -= y; }
constexpr Mat2 operator*(Mat2 x, double s) { return x *= s; }
constexpr Mat2 operator*(double s, Mat2 x) { return x *= s; }
constexpr Mat2 operator*(const Mat2& x, const Mat2& y) {
  return {x.a * y.a + x.b * y.c, x.a * y.b + x.b * y.d, x.c * y.a + x.d * y.c,
          x.c * y.b + x.d * y.d};
}

/// Distance between projective classes: min over the sign of the representative.
inline double projective_distance(const Mat2& x, const Mat2& y) {
  return std::fmin((x - y).max_abs(), (x + y).max_abs());
}

inline std::ostream& operator<<(std::ostream& os, const Mat2& m) {
  return os << "[[" << m.a << ", " << m.b << "], [" << m.c << ", " << m.d << "]]";
}

}  // namespace quake
