#pragma once

// AdS^3 = PSL(2,R) inside the projectivized space of 2x2 matrices: the form q = -det,
// the boundary identification with RP^1 x RP^1, plane duality and affine charts.

#include <array>
#include <cmath>
#include <utility>
#include <variant>

#include "quake/error.hpp"
#include "quake/mat2.hpp"
#include "quake/mobius.hpp"

namespace quake {

/// Points of AdS^3 are exactly det-1 classes up to sign.
using AdSPoint = Mobius;

/// Orthonormal oriented basis of sl(2,R); U is future-pointing.
inline constexpr Mat2 kBasisV{0, 1, 1, 0};
inline constexpr Mat2 kBasisW{1, 0, 0, -1};
inline constexpr Mat2 kBasisU{0, -1, 1, 0};

inline constexpr double kPlaneKindTol = 1e-10;

/// Polarization of q(A) = -det(A).
inline double bilinear(const Mat2& a, const Mat2& b) { return -0.5 * (a * b.adj()).trace(); }
inline double quadratic(const Mat2& a) { return bilinear(a, a); }

// ---------------------------------------------------------------------------
// Boundary

struct AdSBoundaryPoint {
  RP1Point x;
  RP1Point y;
};

/// Rank-one matrix with image x and kernel y.
inline Mat2 boundary_encode(const RP1Point& x, const RP1Point& y) {
  return {x.u() * y.v(), -x.u() * y.u(), x.v() * y.v(), -x.v() * y.u()};
}
inline Mat2 boundary_encode(const AdSBoundaryPoint& p) { return boundary_encode(p.x, p.y); }

inline AdSBoundaryPoint boundary_decode(const Mat2& m, double tol = 1e-9) {
  const double n2 = m.a * m.a + m.b * m.b + m.c * m.c + m.d * m.d;
  if (!(n2 > 0) || std::fabs(m.det()) > tol * n2) {
    throw GeometryError(ErrorCode::NotRankOne, "boundary_decode needs a nonzero rank-one matrix");
  }
  const bool first_col = std::hypot(m.a, m.c) >= std::hypot(m.b, m.d);
  const RP1Point x = first_col ? RP1Point::homogeneous(m.a, m.c) : RP1Point::homogeneous(m.b, m.d);
  const bool first_row = std::hypot(m.a, m.b) >= std::hypot(m.c, m.d);
  const double r1 = first_row ? m.a : m.c;
  const double r2 = first_row ? m.b : m.d;
  return {x, RP1Point::homogeneous(-r2, r1)};
}

// ---------------------------------------------------------------------------
// Planes

enum class PlaneKind { Spacelike, Timelike, Lightlike };

inline std::string to_string(PlaneKind k) {
  switch (k) {
    case PlaneKind::Spacelike: return "spacelike";
    case PlaneKind::Timelike: return "timelike";
    case PlaneKind::Lightlike: return "lightlike";
  }
  return "?";
}

inline PlaneKind plane_kind(const Mat2& a) {
  const double n2 = a.a * a.a + a.b * a.b + a.c * a.c + a.d * a.d;
  if (!(n2 > 0)) throw GeometryError(ErrorCode::ZeroMatrix, "plane matrix is zero");
  const double det = a.det();
  if (det > kPlaneKindTol * n2) return PlaneKind::Spacelike;
  if (det < -kPlaneKindTol * n2) return PlaneKind::Timelike;
  return PlaneKind::Lightlike;
}

/// The totally geodesic plane {X : <X, A> = 0}, stored with unit Frobenius norm.
class AdSPlane {
 public:
  explicit AdSPlane(Mat2 a) {
    kind_ = plane_kind(a);
    a *= 1.0 / a.norm();
    const double first = a.a != 0 ? a.a : (a.b != 0 ? a.b : (a.c != 0 ? a.c : a.d));
    if (first < 0) a = -a;
    a_ = a;
  }
  static AdSPlane dual_to(const Mobius& g) { return AdSPlane(g.matrix()); }

  const Mat2& matrix() const { return a_; }
  PlaneKind kind() const { return kind_; }

  Mobius dual() const {
    if (kind_ != PlaneKind::Spacelike) {
      throw GeometryError(ErrorCode::DegeneratePlane, "only spacelike planes have a dual point");
    }
    return Mobius(a_);
  }

  /// Normalized incidence value: <X, A> for X scaled to unit norm.
  double incidence(const Mat2& x) const { return bilinear(x, a_) / x.norm(); }

  bool same_as(const AdSPlane& o, double tol) const { return projective_distance(a_, o.a_) <= tol; }

 private:
  Mat2 a_;
  PlaneKind kind_;
};

/// Boundary at infinity of a plane: graph of a Mobius (spacelike), graph of an
/// AntiMobius (timelike), or two circles {Im A} x RP^1 and RP^1 x {Ker A} (lightlike).
struct LightlikeBoundary {
  RP1Point image;
  RP1Point kernel;
};
using PlaneBoundary = std::variant<Mobius, AntiMobius, LightlikeBoundary>;

inline PlaneBoundary plane_boundary(const AdSPlane& p) {
  const Mat2& a = p.matrix();
  switch (p.kind()) {
    case PlaneKind::Spacelike: return Mobius(a.adj());
    case PlaneKind::Timelike: return AntiMobius(a.adj());
    case PlaneKind::Lightlike: {
      const AdSBoundaryPoint ik = boundary_decode(a, 1e-6);
      return LightlikeBoundary{ik.x, ik.y};
    }
  }
  throw GeometryError(ErrorCode::ZeroMatrix, "unreachable");
}

// ---------------------------------------------------------------------------
// Isometries (alpha, beta) . X = alpha X beta^{-1}

inline AdSPoint isometry_apply(const Mobius& alpha, const Mobius& beta, const AdSPoint& p) {
  return alpha * p * beta.inverse();
}
inline AdSBoundaryPoint isometry_apply(const Mobius& alpha, const Mobius& beta, const AdSBoundaryPoint& p) {
  return {alpha.apply(p.x), beta.apply(p.y)};
}
inline AdSPlane isometry_apply(const Mobius& alpha, const Mobius& beta, const AdSPlane& p) {
  return AdSPlane(alpha.matrix() * p.matrix() * beta.inverse().matrix());
}

// ---------------------------------------------------------------------------
// Affine charts

/// Coordinates (w, b, c) of gamma0^{-1} X rescaled to [[1+w, b], [c, 1-w]].
struct ChartCoords {
  Mobius gamma0;
  double w = 0, b = 0, c = 0;

  std::array<double, 3> vec() const { return {w, b, c}; }
  /// 1 - w^2 - bc: positive inside AdS^3, zero on its boundary.
  double det() const { return 1.0 - w * w - b * c; }
};

inline ChartCoords chart_embed(const Mobius& gamma0, const Mat2& x) {
  Mat2 y = gamma0.inverse().matrix() * x;
  const double tr = y.trace();
  if (std::fabs(tr) <= 1e-12 * y.norm()) {
    throw GeometryError(ErrorCode::OnChartPlane, "point lies on the plane removed by the chart");
  }
  y *= 2.0 / tr;
  return {gamma0, 0.5 * (y.a - y.d), y.b, y.c};
}
inline ChartCoords chart_embed(const Mobius& gamma0, const AdSPoint& p) { return chart_embed(gamma0, p.matrix()); }
inline ChartCoords chart_embed(const Mobius& gamma0, const AdSBoundaryPoint& p) {
  return chart_embed(gamma0, boundary_encode(p));
}

inline Mat2 chart_extract(const ChartCoords& cc) {
  return cc.gamma0.matrix() * Mat2{1 + cc.w, cc.b, cc.c, 1 - cc.w};
}

/// The plane whose trace in the chart at gamma0 is {n . (w,b,c) = k}.
inline AdSPlane plane_from_affine(const Mobius& gamma0, const std::array<double, 3>& n, double k) {
  const Mat2 local{k + n[0], 2.0 * n[2], 2.0 * n[1], k - n[0]};
  if (local.max_abs() == 0) {
    throw GeometryError(ErrorCode::SingularSystem, "affine plane coefficients are all zero");
  }
  return AdSPlane(gamma0.matrix() * local);
}

// ---------------------------------------------------------------------------
// Time orientation

enum class TimeSide { Past, Future, On };

inline std::string to_string(TimeSide s) {
  switch (s) {
    case TimeSide::Past: return "past";
    case TimeSide::Future: return "future";
    case TimeSide::On: return "on";
  }
  return "?";
}

/// Position of x (det > 0) relative to a spacelike plane. The plane is compared against
/// the future-directed flow t -> exp(tU) p0 at the foot point p0 of x on the plane.
inline TimeSide side_sign(const AdSPlane& plane, const Mat2& x, double tol = 1e-9) {
  if (plane.kind() != PlaneKind::Spacelike) {
    throw GeometryError(ErrorCode::DegeneratePlane, "side_sign needs a spacelike plane");
  }
  const double det = x.det();
  if (!(det > 0)) throw GeometryError(ErrorCode::InvalidInput, "side_sign needs a point of AdS^3");
  const Mat2 g = plane.dual().matrix();
  const Mat2 p = x * (1.0 / std::sqrt(det));
  const double h = bilinear(p, g);
  if (std::fabs(h) <= tol) return TimeSide::On;
  if (std::fabs(h) >= 1.0 - 1e-12) {
    throw GeometryError(ErrorCode::DegeneratePlane, "point is dual to the plane; side undefined");
  }
  const Mat2 foot = p + g * h;
  const double flow = bilinear(kBasisU * foot, g);
  return (h > 0) == (flow > 0) ? TimeSide::Future : TimeSide::Past;
}
inline TimeSide side_sign(const AdSPlane& plane, const AdSPoint& p, double tol = 1e-9) {
  return side_sign(plane, p.matrix(), tol);
}

}  // namespace quake
