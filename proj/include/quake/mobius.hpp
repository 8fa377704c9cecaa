#pragma once

// Hyperbolic plane kernel in the upper half-plane model: Mobius maps, ideal points,
// classification, fixed points, rotations and the one-parameter subgroups.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <variant>

#include "quake/error.hpp"
#include "quake/mat2.hpp"

namespace quake {

using Complex = std::complex<double>;

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr double kTraceBand = 1e-9;        // parabolic band on |tr| - 2
inline constexpr double kIdentityTol = 1e-9;      // entrywise, canonical form
inline constexpr double kDistinctTol = 1e-12;     // angular separation of ideal points

enum class Side { Left, Right };

inline std::string to_string(Side s) { return s == Side::Left ? "left" : "right"; }

// ---------------------------------------------------------------------------
// Ideal points

/// A point of RP^1 = boundary of H^2, stored as a unit homogeneous pair (u, v)
/// with the first nonzero coordinate positive. Its real value is u / v.
class RP1Point {
 public:
  RP1Point() : u_(1), v_(0) {}

  static RP1Point homogeneous(double u, double v) {
    const double n = std::hypot(u, v);
    if (!(n > 0) || !std::isfinite(n)) {
      throw GeometryError(ErrorCode::InvalidInput, "homogeneous pair must be finite and nonzero");
    }
    if (std::fabs(n - 1) > 4 * std::numeric_limits<double>::epsilon()) {
      u /= n;
      v /= n;
    }
    if (u < 0 || (u == 0 && v < 0)) {
      u = -u;
      v = -v;
    }
    return RP1Point(u, v);
  }
  static RP1Point real(double x) {
    if (std::isinf(x)) return infinity();
    return homogeneous(x, 1.0);
  }
  static RP1Point infinity() { return RP1Point(1.0, 0.0); }

  /// Inverse of angle(): the point whose Cayley image on the unit circle is e^{i theta}.
  static RP1Point from_angle(double theta) {
    return homogeneous(std::cos(0.5 * theta), -std::sin(0.5 * theta));
  }

  double u() const { return u_; }
  double v() const { return v_; }
  bool is_infinity() const { return v_ == 0; }
  double value() const { return v_ == 0 ? std::numeric_limits<double>::infinity() : u_ / v_; }

  /// Angle in [0, 2pi) of the image under z -> (z - i)/(z + i). Increasing reals
  /// run counterclockwise; infinity sits at angle 0 and 0 at angle pi.
  double angle() const {
    double t = -2.0 * std::atan2(v_, u_);
    if (t < 0) t += kTwoPi;
    if (t >= kTwoPi) t -= kTwoPi;
    return t;
  }

 private:
  RP1Point(double u, double v) : u_(u), v_(v) {}
  double u_, v_;
};

/// det of the 2x2 matrix with columns p, q.
inline double hdet(const RP1Point& p, const RP1Point& q) { return p.u() * q.v() - p.v() * q.u(); }

/// Counterclockwise angular offset from `from` to `to`, in [0, 2pi).
inline double ccw_offset(const RP1Point& from, const RP1Point& to) {
  double t = to.angle() - from.angle();
  if (t < 0) t += kTwoPi;
  if (t >= kTwoPi) t -= kTwoPi;
  return t;
}

/// Arc-length distance on the unit circle between the Cayley images.
inline double circle_distance(const RP1Point& p, const RP1Point& q) {
  const double t = ccw_offset(p, q);
  return std::min(t, kTwoPi - t);
}

/// Midpoint of the counterclockwise arc from a to b.
inline RP1Point ccw_midpoint(const RP1Point& a, const RP1Point& b) {
  double len = ccw_offset(a, b);
  if (len == 0) len = kTwoPi;
  return RP1Point::from_angle(a.angle() + 0.5 * len);
}

/// True when x lies on the closed counterclockwise arc from a to b (angular tolerance tol).
inline bool on_ccw_arc(const RP1Point& x, const RP1Point& a, const RP1Point& b, double tol = 0) {
  const double len = ccw_offset(a, b);
  const double off = ccw_offset(a, x);
  return off <= len + tol || off >= kTwoPi - tol;
}

/// +1 if (a, b, c) is in counterclockwise cyclic order, -1 otherwise. Division free:
/// the sign of det(a,b) det(b,c) det(c,a) does not depend on representatives.
inline int triple_orientation(const RP1Point& a, const RP1Point& b, const RP1Point& c) {
  const double ab = hdet(a, b), bc = hdet(b, c), ca = hdet(c, a);
  if (std::fabs(ab) < kDistinctTol || std::fabs(bc) < kDistinctTol || std::fabs(ca) < kDistinctTol) {
    throw GeometryError(ErrorCode::DegenerateTriple, "triple_orientation needs distinct points");
  }
  return ab * bc * ca > 0 ? 1 : -1;
}

// ---------------------------------------------------------------------------
// Interior points

class H2Point {
 public:
  H2Point() : z_(0, 1) {}
  explicit H2Point(Complex z) : z_(z) {
    if (!(z.imag() > 0) || !std::isfinite(z.real()) || !std::isfinite(z.imag())) {
      throw GeometryError(ErrorCode::InvalidInput, "H2Point requires Im(z) > 0");
    }
  }
  H2Point(double x, double y) : H2Point(Complex(x, y)) {}

  Complex z() const { return z_; }
  double x() const { return z_.real(); }
  double y() const { return z_.imag(); }

 private:
  Complex z_;
};

/// Cayley map z -> (z - i)/(z + i) from H^2 to the unit disc.
inline Complex to_disc(const H2Point& p) {
  const Complex i(0, 1);
  return (p.z() - i) / (p.z() + i);
}
inline Complex to_disc(const RP1Point& p) { return std::polar(1.0, p.angle()); }
inline H2Point from_disc(Complex w) {
  const Complex i(0, 1);
  return H2Point(i * (1.0 + w) / (1.0 - w));
}

/// Hyperbolic distance in H^2.
inline double hyperbolic_distance(const H2Point& p, const H2Point& q) {
  const double num = std::norm(p.z() - q.z());
  return std::acosh(1.0 + num / (2.0 * p.y() * q.y()));
}

// ---------------------------------------------------------------------------
// Geodesics

class Geodesic {
 public:
  Geodesic(const RP1Point& p, const RP1Point& q) : p_(p), q_(q) {
    if (circle_distance(p, q) <= kDistinctTol) {
      throw GeometryError(ErrorCode::DegenerateTriple, "geodesic endpoints must be distinct");
    }
  }
  const RP1Point& first() const { return p_; }
  const RP1Point& second() const { return q_; }

  /// Whether two geodesics cross in H^2 (endpoint pairs linked on the circle).
  bool crosses(const Geodesic& o) const {
    const double tol = 1e-12;
    const RP1Point* pts[4] = {&p_, &q_, &o.p_, &o.q_};
    for (int i = 0; i < 2; ++i)
      for (int j = 2; j < 4; ++j)
        if (circle_distance(*pts[i], *pts[j]) <= tol) return false;
    const bool a = on_ccw_arc(o.p_, p_, q_);
    const bool b = on_ccw_arc(o.q_, p_, q_);
    return a != b;
  }

  bool same_as(const Geodesic& o, double tol) const {
    return (circle_distance(p_, o.p_) <= tol && circle_distance(q_, o.q_) <= tol) ||
           (circle_distance(p_, o.q_) <= tol && circle_distance(q_, o.p_) <= tol);
  }

 private:
  RP1Point p_, q_;
};

/// Signed position of z relative to the geodesic directed from p to q: positive on the
/// left, negative on the right. The magnitude is scale-free (a sine of angles).
inline double geodesic_side(const RP1Point& p, const RP1Point& q, const H2Point& z) {
  const Complex w = z.z();
  const Complex num = w * p.v() - p.u();
  const Complex den = w * q.v() - q.u();
  const double re = (num * std::conj(den)).real();
  const double s = -(hdet(p, q) > 0 ? 1.0 : -1.0) * re;
  return s / (std::abs(num) * std::abs(den));
}

// ---------------------------------------------------------------------------
// Mobius maps

/// Orientation-preserving isometry of H^2: a det-1 matrix up to sign, stored with the
/// first nonzero entry positive.
class Mobius {
 public:
  Mobius() : m_(Mat2::identity()) {}
  explicit Mobius(const Mat2& m) : m_(normalize(m)) {}
  Mobius(double a, double b, double c, double d) : Mobius(Mat2{a, b, c, d}) {}

  static Mobius identity() { return Mobius(); }

  const Mat2& matrix() const { return m_; }
  double trace() const { return m_.trace(); }

  Mobius inverse() const { return Mobius(m_.adj()); }

  RP1Point apply(const RP1Point& p) const {
    const auto r = m_.apply(p.u(), p.v());
    return RP1Point::homogeneous(r[0], r[1]);
  }
  H2Point apply(const H2Point& p) const {
    const Complex z = p.z();
    const Complex den = m_.c * z + m_.d;
    const Complex w = (m_.a * z + m_.b) / den;
    // det 1 gives Im(w) = Im(z) / |cz + d|^2, which keeps the sign exact.
    return H2Point(Complex(w.real(), z.imag() / std::norm(den)));
  }

  /// Distance between the projective classes, entrywise.
  double distance(const Mobius& o) const { return projective_distance(m_, o.m_); }
  bool approx_equal(const Mobius& o, double tol = kIdentityTol) const { return distance(o) <= tol; }
  bool is_identity(double tol = kIdentityTol) const { return approx_equal(Mobius(), tol); }

  friend Mobius operator*(const Mobius& x, const Mobius& y) { return Mobius(x.m_ * y.m_); }

 private:
  static Mat2 normalize(Mat2 m) {
    const double det = m.det();
    if (!(det > 0) || !std::isfinite(det)) {
      throw GeometryError(ErrorCode::InvalidInput, "Mobius needs a finite matrix with det > 0");
    }
    // Left alone when already unimodular up to rounding, so normalizing is idempotent.
    const double slack = 16 * std::numeric_limits<double>::epsilon() * (std::fabs(m.a * m.d) + std::fabs(m.b * m.c));
    if (std::fabs(det - 1) > slack) m *= 1.0 / std::sqrt(det);
    const double first = m.a != 0 ? m.a : (m.b != 0 ? m.b : (m.c != 0 ? m.c : m.d));
    if (first < 0) m = -m;
    return m;
  }

  Mat2 m_;
};

inline std::ostream& operator<<(std::ostream& os, const Mobius& m) { return os << m.matrix(); }

/// Orientation-reversing isometry: a det -1 matrix acting by z -> (a conj(z) + b)/(c conj(z) + d).
class AntiMobius {
 public:
  explicit AntiMobius(const Mat2& m) : m_(normalize(m)) {}

  const Mat2& matrix() const { return m_; }
  AntiMobius inverse() const { return AntiMobius(m_.adj()); }

  /// Reflection in a geodesic exactly when the trace vanishes.
  bool is_reflection(double tol = 1e-9) const { return std::fabs(m_.trace()) <= tol; }

  RP1Point apply(const RP1Point& p) const {
    const auto r = m_.apply(p.u(), p.v());
    return RP1Point::homogeneous(r[0], r[1]);
  }
  H2Point apply(const H2Point& p) const {
    const Complex z = std::conj(p.z());
    const Complex den = m_.c * z + m_.d;
    const Complex w = (m_.a * z + m_.b) / den;
    return H2Point(Complex(w.real(), p.y() / std::norm(den)));
  }

 private:
  static Mat2 normalize(Mat2 m) {
    const double det = m.det();
    if (!(det < 0) || !std::isfinite(det)) {
      throw GeometryError(ErrorCode::InvalidInput, "AntiMobius needs a finite matrix with det < 0");
    }
    m *= 1.0 / std::sqrt(-det);
    const double first = m.a != 0 ? m.a : (m.b != 0 ? m.b : (m.c != 0 ? m.c : m.d));
    if (first < 0) m = -m;
    return m;
  }

  Mat2 m_;
};

/// Traceless element of sl(2, R).
class SL2Tangent {
 public:
  SL2Tangent(double a, double b, double c) : a_(a), b_(b), c_(c) {}
  static SL2Tangent from_matrix(const Mat2& m) {
    const double h = 0.5 * (m.a - m.d);
    return SL2Tangent(h, m.b, m.c);
  }
  Mat2 matrix() const { return {a_, b_, c_, -a_}; }
  double det() const { return -a_ * a_ - b_ * c_; }

 private:
  double a_, b_, c_;
};

enum class MobiusKind { Identity, Elliptic, Parabolic, Hyperbolic };

inline std::string to_string(MobiusKind k) {
  switch (k) {
    case MobiusKind::Identity: return "identity";
    case MobiusKind::Elliptic: return "elliptic";
    case MobiusKind::Parabolic: return "parabolic";
    case MobiusKind::Hyperbolic: return "hyperbolic";
  }
  return "?";
}

inline MobiusKind classify(const Mobius& m) {
  const double t = std::fabs(m.trace());
  if (t < 2.0 - kTraceBand) return MobiusKind::Elliptic;
  if (t > 2.0 + kTraceBand) return MobiusKind::Hyperbolic;
  return m.is_identity() ? MobiusKind::Identity : MobiusKind::Parabolic;
}

namespace detail {
// Eigenvector of m for eigenvalue lambda, from whichever row of (m - lambda I) is larger.
inline RP1Point eigenvector(const Mat2& m, double lambda) {
  const double r1u = m.b, r1v = lambda - m.a;
  const double r2u = lambda - m.d, r2v = m.c;
  if (std::hypot(r1u, r1v) >= std::hypot(r2u, r2v)) return RP1Point::homogeneous(r1u, r1v);
  return RP1Point::homogeneous(r2u, r2v);
}

inline Mat2 positive_trace(const Mat2& m) { return m.trace() < 0 ? -m : m; }
}  // namespace detail

struct HyperbolicFixedPoints {
  RP1Point attracting;
  RP1Point repelling;
  Geodesic axis() const { return Geodesic(repelling, attracting); }
};

/// The unique fixed point in H^2 of an elliptic map.
inline H2Point fix_elliptic(const Mobius& m) {
  if (classify(m) != MobiusKind::Elliptic) {
    throw GeometryError(ErrorCode::NotElliptic, "fix_elliptic requires an elliptic map");
  }
  const Mat2& x = m.matrix();
  const double disc = std::sqrt(std::max(0.0, 4.0 - x.trace() * x.trace()));
  auto solve = [disc](const Mat2& y) {
    const double s = y.c > 0 ? 1.0 : -1.0;
    return Complex((y.a - y.d) / (2.0 * y.c), s * disc / (2.0 * y.c));
  };
  if (std::fabs(x.c) >= std::fabs(x.b)) return H2Point(solve(x));
  // Conjugate by z -> -1/z so that the lower-left entry is the larger one.
  const Complex w = solve(Mat2{x.d, -x.c, -x.b, x.a});
  const Complex z = -1.0 / w;
  return H2Point(Complex(z.real(), w.imag() / std::norm(w)));
}

using FixedPointSet = std::variant<HyperbolicFixedPoints, RP1Point, H2Point>;

inline FixedPointSet fixed_points(const Mobius& m) {
  const MobiusKind kind = classify(m);
  const Mat2 x = detail::positive_trace(m.matrix());
  const double t = x.trace();
  switch (kind) {
    case MobiusKind::Identity:
      throw GeometryError(ErrorCode::IdentityInput, "identity has no isolated fixed points");
    case MobiusKind::Hyperbolic: {
      const double root = std::sqrt(t * t - 4.0);
      const double big = 0.5 * (t + root);
      const double small = 1.0 / big;
      return HyperbolicFixedPoints{detail::eigenvector(x, big), detail::eigenvector(x, small)};
    }
    case MobiusKind::Parabolic:
      return detail::eigenvector(x, 0.5 * t);
    case MobiusKind::Elliptic:
      return fix_elliptic(m);
  }
  throw GeometryError(ErrorCode::InvalidInput, "unreachable");
}

inline HyperbolicFixedPoints hyperbolic_fixed_points(const Mobius& m) {
  if (classify(m) != MobiusKind::Hyperbolic) {
    throw GeometryError(ErrorCode::NotHyperbolic, "expected a hyperbolic map");
  }
  return std::get<HyperbolicFixedPoints>(fixed_points(m));
}

/// The order-two elliptic isometry fixing z.
inline Mobius rotation_about(const H2Point& z) {
  const double x = z.x(), y = z.y();
  return Mobius(Mat2{-x / y, (x * x + y * y) / y, -1.0 / y, x / y});
}

/// The Mobius map sending i to z: z -> y * w + x.
inline Mobius translation_to(const H2Point& z) {
  const double s = std::sqrt(z.y());
  return Mobius(Mat2{s, z.x() / s, 0, 1.0 / s});
}

/// Elliptic isometry fixing z rotating clockwise by theta radians.
inline Mobius elliptic_about(const H2Point& z, double theta) {
  const double h = 0.5 * theta;
  const Mobius r(Mat2{std::cos(h), -std::sin(h), std::sin(h), std::cos(h)});
  const Mobius t = translation_to(z);
  return t * r * t.inverse();
}

/// exp(t a) for traceless a, in closed form split on the sign of det(t a).
inline Mobius exp_sl2(double t, const SL2Tangent& a) {
  const Mat2 m = a.matrix() * t;
  const double det = -m.a * m.a - m.b * m.c;
  double c0, c1;
  if (std::fabs(det) < 1e-8) {
    c0 = 1.0 - det / 2.0 + det * det / 24.0;
    c1 = 1.0 - det / 6.0 + det * det / 120.0;
  } else if (det > 0) {
    const double k = std::sqrt(det);
    c0 = std::cos(k);
    c1 = std::sin(k) / k;
  } else {
    const double k = std::sqrt(-det);
    c0 = std::cosh(k);
    c1 = std::sinh(k) / k;
  }
  return Mobius(Mat2::identity() * c0 + m * c1);
}

/// The traceless a with exp(a) = m, using the positive-trace lift of a hyperbolic m.
inline SL2Tangent log_hyperbolic(const Mobius& m) {
  if (classify(m) != MobiusKind::Hyperbolic) {
    throw GeometryError(ErrorCode::NotHyperbolic, "log_hyperbolic requires a hyperbolic map");
  }
  const Mat2 x = detail::positive_trace(m.matrix());
  const double half = 0.5 * x.trace();
  const double k = std::acosh(half);
  const double coef = k / std::sinh(k);
  return SL2Tangent::from_matrix((x - Mat2::identity() * half) * coef);
}

/// exp(t log(m)): the point at parameter t on the one-parameter subgroup through m.
inline Mobius hyperbolic_power(const Mobius& m, double t) { return exp_sl2(t, log_hyperbolic(m)); }

/// Translation length of a hyperbolic map.
inline double translation_length(const Mobius& m) {
  return 2.0 * std::acosh(0.5 * std::fabs(m.trace()));
}

namespace detail {
// Matrix sending (p, q, r) to (0, 1, inf); its determinant has the sign of the orientation.
inline Mat2 to_reference_triple(const RP1Point& p, const RP1Point& q, const RP1Point& r) {
  const double lp_q = hdet(q, p);
  const double lr_q = hdet(q, r);
  return Mat2{lr_q * p.v(), -lr_q * p.u(), lp_q * r.v(), -lp_q * r.u()};
}
}  // namespace detail

/// The unique Mobius map with src[k] -> dst[k].
inline Mobius mobius_from_triples(const std::array<RP1Point, 3>& src, const std::array<RP1Point, 3>& dst) {
  const int os = triple_orientation(src[0], src[1], src[2]);
  const int od = triple_orientation(dst[0], dst[1], dst[2]);
  if (os != od) {
    throw GeometryError(ErrorCode::OrientationMismatch, "triples have opposite cyclic orientation");
  }
  const Mat2 a = detail::to_reference_triple(src[0], src[1], src[2]);
  const Mat2 b = detail::to_reference_triple(dst[0], dst[1], dst[2]);
  return Mobius(b.adj() * a);
}

/// Mobius map with 0 -> p and infinity -> q.
inline Mobius mobius_from_pair(const RP1Point& p, const RP1Point& q) {
  // Columns are images of infinity = (1,0) and 0 = (0,1).
  double qu = q.u(), qv = q.v();
  if (qu * p.v() - qv * p.u() < 0) {
    qu = -qu;
    qv = -qv;
  }
  return Mobius(Mat2{qu, p.u(), qv, p.v()});
}

/// Hyperbolic map with the given axis and translation length, attracting toward `toward`.
inline Mobius hyperbolic_along(const RP1Point& from, const RP1Point& toward, double length) {
  const Mobius frame = mobius_from_pair(from, toward);
  const double s = std::exp(0.5 * length);
  return frame * Mobius(Mat2{s, 0, 0, 1.0 / s}) * frame.inverse();
}

/// Direction of translation of a hyperbolic g seen from the side of s to the side of s'.
inline Side translate_side(const Mobius& g, const RP1Point& s, const RP1Point& s_prime) {
  const HyperbolicFixedPoints fp = hyperbolic_fixed_points(g);
  const int o1 = triple_orientation(fp.attracting, s, fp.repelling);
  const int o2 = triple_orientation(fp.attracting, s_prime, fp.repelling);
  if (o1 == o2) {
    throw GeometryError(ErrorCode::NotSeparated, "points lie on the same side of the axis");
  }
  return triple_orientation(s, s_prime, fp.attracting) > 0 ? Side::Left : Side::Right;
}

/// The geodesic through two distinct interior points.
inline Geodesic geodesic_through(const H2Point& z1, const H2Point& z2) {
  const Mobius t = translation_to(z1);
  const H2Point w = t.inverse().apply(z2);
  const double phi = std::arg(to_disc(w));
  const RP1Point e1 = RP1Point::homogeneous(std::cos(0.5 * phi), -std::sin(0.5 * phi));
  const RP1Point e2 = RP1Point::homogeneous(-std::sin(0.5 * phi), -std::cos(0.5 * phi));
  return Geodesic(t.apply(e1), t.apply(e2));
}

}  // namespace quake
