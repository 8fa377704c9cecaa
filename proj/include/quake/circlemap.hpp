#pragma once

// Piecewise-Mobius homeomorphisms of the circle: validation, evaluation, composition,
// separating planes for their graphs, simple two-piece maps and finite earthquakes.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <queue>
#include <sstream>
#include <string>
#include <vector>

#include "quake/adsgeom.hpp"
#include "quake/error.hpp"
#include "quake/mobius.hpp"
#include "quake/strata.hpp"

namespace quake {

inline constexpr double kContinuityTol = 1e-9;

/// Unvalidated input: piece k acts on the counterclockwise arc from breakpoint k to k+1.
/// No breakpoints means a single global piece.
struct CircleMapData {
  std::vector<RP1Point> breakpoints;
  std::vector<Mat2> pieces;
};

struct ValidationReport {
  bool ok = true;
  std::string message;
  long location = -1;
  double continuity_error = 0;
};

inline ValidationReport validate(const CircleMapData& d, double continuity_tol = kContinuityTol) {
  ValidationReport r;
  auto fail = [&r](long where, const std::string& what) {
    r.ok = false;
    r.location = where;
    r.message = what;
    return r;
  };
  const std::size_t n = d.breakpoints.size();
  if (d.pieces.size() != std::max<std::size_t>(n, 1)) {
    return fail(-1, "expected " + std::to_string(std::max<std::size_t>(n, 1)) + " pieces, got " +
                        std::to_string(d.pieces.size()));
  }
  for (std::size_t k = 0; k < d.pieces.size(); ++k) {
    const Mat2& m = d.pieces[k];
    const double det = m.det();
    if (!std::isfinite(m.a) || !std::isfinite(m.b) || !std::isfinite(m.c) || !std::isfinite(m.d)) {
      return fail(static_cast<long>(k), "piece " + std::to_string(k) + " is not finite");
    }
    if (det < 0) return fail(static_cast<long>(k), "piece " + std::to_string(k) + " reverses orientation");
    if (!(det > 1e-300)) return fail(static_cast<long>(k), "piece " + std::to_string(k) + " is singular");
  }
  if (n == 0) return r;

  for (std::size_t k = 1; k < n; ++k) {
    const double prev = k == 1 ? 0.0 : ccw_offset(d.breakpoints[0], d.breakpoints[k - 1]);
    const double cur = ccw_offset(d.breakpoints[0], d.breakpoints[k]);
    if (cur <= prev + kDistinctTol) {
      return fail(static_cast<long>(k), "breakpoint " + std::to_string(k) + " is repeated or out of cyclic order");
    }
  }
  std::vector<Mobius> pieces;
  for (const Mat2& m : d.pieces) pieces.emplace_back(m);

  std::vector<RP1Point> images(n);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t prev = (k + n - 1) % n;
    const RP1Point a = pieces[prev].apply(d.breakpoints[k]);
    const RP1Point b = pieces[k].apply(d.breakpoints[k]);
    const double err = circle_distance(a, b);
    r.continuity_error = std::max(r.continuity_error, err);
    if (err > continuity_tol) {
      std::ostringstream os;
      os << "discontinuity at breakpoint " << k << " (jump " << err << ")";
      return fail(static_cast<long>(k), os.str());
    }
    images[k] = b;
  }
  if (n >= 2) {
    double total = 0;
    for (std::size_t k = 0; k < n; ++k) {
      const double off = ccw_offset(images[k], images[(k + 1) % n]);
      if (off <= kDistinctTol) return fail(static_cast<long>(k), "map is not injective near breakpoint " + std::to_string(k));
      total += off;
    }
    if (std::fabs(total - kTwoPi) > 1e-7) return fail(-1, "breakpoint images are not in cyclic order (degree != 1)");
  }
  for (std::size_t k = 0; k < n && n >= 2; ++k) {
    const std::size_t prev = (k + n - 1) % n;
    if (pieces[prev].approx_equal(pieces[k], 1e-12 * std::max(1.0, pieces[k].matrix().max_abs()))) {
      return fail(static_cast<long>(k), "breakpoint " + std::to_string(k) + " is redundant (equal adjacent pieces)");
    }
  }
  return r;
}

// ---------------------------------------------------------------------------

class CircleMap {
 public:
  CircleMap() : pieces_{Mobius()} {}
  explicit CircleMap(const Mobius& g) : pieces_{g} {}

  /// Validates and stores the map with breakpoints sorted by angle.
  static CircleMap from_data(const CircleMapData& d) {
    const ValidationReport r = validate(d);
    if (!r.ok) throw GeometryError(ErrorCode::InvalidInput, "invalid circle map: " + r.message);
    std::vector<Mobius> pieces;
    for (const Mat2& m : d.pieces) pieces.emplace_back(m);
    return from_sorted(d.breakpoints, std::move(pieces));
  }

  /// Trusted construction from cyclically ordered data; merges equal neighbours.
  static CircleMap from_cyclic(std::vector<RP1Point> bps, std::vector<Mobius> pieces) {
    return from_sorted(std::move(bps), std::move(pieces)).canonical();
  }

  std::size_t size() const { return breakpoints_.size(); }
  bool is_mobius() const { return pieces_.size() == 1; }
  const std::vector<RP1Point>& breakpoints() const { return breakpoints_; }
  const std::vector<Mobius>& pieces() const { return pieces_; }

  /// Index of the arc [bp_k, bp_{k+1}] containing x.
  std::size_t arc_of(const RP1Point& x) const {
    if (breakpoints_.empty()) return 0;
    const double t = x.angle();
    const auto it = std::upper_bound(angles_.begin(), angles_.end(), t);
    if (it == angles_.begin()) return breakpoints_.size() - 1;
    return static_cast<std::size_t>(it - angles_.begin()) - 1;
  }

  RP1Point eval(const RP1Point& x) const { return pieces_[arc_of(x)].apply(x); }

  CircleMap inverse() const {
    if (breakpoints_.empty()) return CircleMap(pieces_[0].inverse());
    std::vector<RP1Point> bps;
    std::vector<Mobius> pieces;
    for (std::size_t k = 0; k < breakpoints_.size(); ++k) {
      bps.push_back(pieces_[k].apply(breakpoints_[k]));
      pieces.push_back(pieces_[k].inverse());
    }
    return from_sorted(std::move(bps), std::move(pieces));
  }

  CircleMap canonical(double tol = 1e-9) const {
    const std::size_t n = breakpoints_.size();
    if (n == 0) return *this;
    std::vector<RP1Point> bps;
    std::vector<Mobius> pieces;
    for (std::size_t k = 0; k < n; ++k) {
      const Mobius& before = pieces_[(k + n - 1) % n];
      if (!before.approx_equal(pieces_[k], tol * std::max(1.0, pieces_[k].matrix().max_abs()))) {
        bps.push_back(breakpoints_[k]);
        pieces.push_back(pieces_[k]);
      }
    }
    if (bps.size() <= 1) return CircleMap(pieces_[0]);
    return from_sorted(std::move(bps), std::move(pieces));
  }

  CircleMapData data() const {
    CircleMapData d{breakpoints_, {}};
    for (const Mobius& m : pieces_) d.pieces.push_back(m.matrix());
    return d;
  }

 private:
  static CircleMap from_sorted(std::vector<RP1Point> bps, std::vector<Mobius> pieces) {
    CircleMap f;
    const std::size_t n = bps.size();
    if (n == 0) {
      f.pieces_ = {pieces.at(0)};
      return f;
    }
    std::size_t first = 0;
    for (std::size_t k = 1; k < n; ++k)
      if (bps[k].angle() < bps[first].angle()) first = k;
    std::rotate(bps.begin(), bps.begin() + static_cast<long>(first), bps.end());
    std::rotate(pieces.begin(), pieces.begin() + static_cast<long>(first), pieces.end());
    f.breakpoints_ = std::move(bps);
    f.pieces_ = std::move(pieces);
    for (const RP1Point& p : f.breakpoints_) f.angles_.push_back(p.angle());
    return f;
  }

  std::vector<RP1Point> breakpoints_;
  std::vector<double> angles_;
  std::vector<Mobius> pieces_;
};

/// f o g.
inline CircleMap compose(const CircleMap& f, const CircleMap& g) {
  std::vector<std::pair<double, RP1Point>> cuts;
  for (const RP1Point& b : g.breakpoints()) cuts.emplace_back(b.angle(), b);
  const CircleMap gi = g.inverse();
  for (const RP1Point& b : f.breakpoints()) {
    const RP1Point p = gi.eval(b);
    cuts.emplace_back(p.angle(), p);
  }
  std::sort(cuts.begin(), cuts.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<RP1Point> bps;
  for (const auto& c : cuts) {
    if (!bps.empty() && circle_distance(bps.back(), c.second) <= kDistinctTol) continue;
    bps.push_back(c.second);
  }
  if (bps.size() > 1 && circle_distance(bps.front(), bps.back()) <= kDistinctTol) bps.pop_back();
  if (bps.empty()) return CircleMap(f.pieces()[0] * g.pieces()[0]);
  std::vector<Mobius> pieces;
  for (std::size_t k = 0; k < bps.size(); ++k) {
    const RP1Point m = ccw_midpoint(bps[k], bps[(k + 1) % bps.size()]);
    pieces.push_back(f.pieces()[f.arc_of(g.eval(m))] * g.pieces()[g.arc_of(m)]);
  }
  return CircleMap::from_cyclic(std::move(bps), std::move(pieces));
}

/// f~ = alpha o f with f~(0) = 0 and f~(inf) = inf; alpha is the identity when f already
/// fixes both points.
struct Normalized {
  Mobius alpha;
  CircleMap map;
};

inline Normalized normalize(const CircleMap& f) {
  const RP1Point f0 = f.eval(RP1Point::real(0));
  const RP1Point finf = f.eval(RP1Point::infinity());
  const Mobius alpha = mobius_from_pair(f0, finf).inverse();
  return {alpha, compose(CircleMap(alpha), f)};
}

// ---------------------------------------------------------------------------
// Crossings of graph(f) with the graph of a projective map N (det of either sign)

struct Crossings {
  std::vector<RP1Point> points;
  bool coincident = false;  // N agrees with a piece of f on a whole arc
};

namespace detail {

// Roots in RP^1 of A u^2 + B uv + C v^2, empty when none are real.
inline std::vector<RP1Point> binary_quadratic_roots(double A, double B, double C) {
  const double D = B * B - 4.0 * A * C;
  const double scale = B * B + std::fabs(4.0 * A * C);
  if (D < -1e-14 * scale) return {};
  const double root = std::sqrt(std::max(D, 0.0));
  const double q = -0.5 * (B + (B >= 0 ? root : -root));
  if (q == 0) {
    if (A == 0 && C == 0) return {};
    return {A == 0 ? RP1Point::infinity() : RP1Point::real(0)};
  }
  return {RP1Point::homogeneous(q, A), RP1Point::homogeneous(C, q)};
}

// det(M x, N x) as a binary quadratic form in x.
inline std::array<double, 3> crossing_form(const Mat2& m, const Mat2& n) {
  return {m.a * n.c - m.c * n.a, m.a * n.d + m.b * n.c - m.c * n.b - m.d * n.a, m.b * n.d - m.d * n.b};
}

}  // namespace detail

inline Crossings graph_crossings(const CircleMap& f, const Mat2& n, double arc_tol = 1e-12) {
  Crossings out;
  const Mat2 nn = n * (1.0 / n.norm());
  const std::size_t arcs = f.pieces().size();
  for (std::size_t k = 0; k < arcs; ++k) {
    const Mat2 m = f.pieces()[k].matrix() * (1.0 / f.pieces()[k].matrix().norm());
    const auto c = detail::crossing_form(m, nn);
    if (std::max({std::fabs(c[0]), std::fabs(c[1]), std::fabs(c[2])}) <= 1e-13) {
      out.coincident = true;
      continue;
    }
    for (const RP1Point& x : detail::binary_quadratic_roots(c[0], c[1], c[2])) {
      const bool on_arc = f.size() == 0 ||
                          on_ccw_arc(x, f.breakpoints()[k], f.breakpoints()[(k + 1) % f.size()], arc_tol);
      if (!on_arc) continue;
      const bool dup = std::any_of(out.points.begin(), out.points.end(),
                                   [&](const RP1Point& p) { return circle_distance(p, x) <= 1e-9; });
      if (!dup) out.points.push_back(x);
    }
  }
  return out;
}

/// Smallest circle distance between f(x) and N(x) over angle-uniform samples and breakpoints.
inline double graph_gap(const CircleMap& f, const Mat2& n, int samples = 1000) {
  auto gap_at = [&](const RP1Point& x) {
    const auto r = n.apply(x.u(), x.v());
    return circle_distance(f.eval(x), RP1Point::homogeneous(r[0], r[1]));
  };
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < samples; ++i) best = std::min(best, gap_at(RP1Point::from_angle(kTwoPi * (i + 0.5) / samples)));
  for (const RP1Point& b : f.breakpoints()) best = std::min(best, gap_at(b));
  return best;
}

// ---------------------------------------------------------------------------
// Separating planes

/// gamma with graph(gamma^{-1}) disjoint from graph(f).
inline Mobius separating_plane(const CircleMap& f) {
  const Normalized nf = normalize(f);
  const Mobius gamma = rotation_about(H2Point(0, 1)) * nf.alpha;
  const Crossings c = graph_crossings(f, gamma.inverse().matrix());
  if (c.coincident || !c.points.empty()) {
    throw GeometryError(ErrorCode::SeparationFailed, "graph of gamma^{-1} meets graph(f)");
  }
  return gamma;
}

/// gamma with graph(gamma^{-1}) disjoint from graph(f) and passing through (x0, y0).
inline Mobius separating_plane_through(const CircleMap& f, const RP1Point& x0, const RP1Point& y0) {
  if (circle_distance(f.eval(x0), y0) <= kDistinctTol) {
    throw GeometryError(ErrorCode::OnGraph, "(x0, y0) lies on graph(f)");
  }
  // Orientation-reversing g with g(x0) = y0: x -> -x conjugated so 0 goes to x0 and y0.
  auto frame = [](const RP1Point& p) { return Mat2{p.v(), p.u(), -p.u(), p.v()}; };
  const Mat2 g = frame(y0) * Mat2{-1, 0, 0, 1} * frame(x0).adj();
  const Crossings c = graph_crossings(f, g);
  if (c.coincident || c.points.size() != 2) {
    throw GeometryError(ErrorCode::SeparationFailed, "expected exactly two crossings with the reversing map");
  }
  RP1Point x = c.points[0], xp = c.points[1];
  if (triple_orientation(x, x0, xp) < 0) std::swap(x, xp);
  const RP1Point inf = RP1Point::infinity();
  const Mobius alpha = mobius_from_triples({x, x0, xp}, {RP1Point::real(0), RP1Point::real(1), inf});
  const Mobius beta = mobius_from_triples({f.eval(x), y0, f.eval(xp)}, {RP1Point::real(0), RP1Point::real(-1), inf});
  const Mobius gamma = alpha.inverse() * rotation_about(H2Point(0, 1)) * beta;

  const Mat2 gi = gamma.inverse().matrix();
  const Crossings check = graph_crossings(f, gi);
  const double incidence = std::fabs(bilinear(boundary_encode(x0, y0), gamma.matrix())) /
                           (boundary_encode(x0, y0).norm() * gamma.matrix().norm());
  if (check.coincident || !check.points.empty() || incidence > 1e-9) {
    throw GeometryError(ErrorCode::SeparationFailed, "constructed plane fails disjointness or incidence");
  }
  return gamma;
}

// ---------------------------------------------------------------------------
// Elliptic maps through two pairs

/// An elliptic sigma with sigma(x) = y and sigma(x') = y'.
inline Mobius elliptic_two_pairs(const RP1Point& x, const RP1Point& y, const RP1Point& xp, const RP1Point& yp) {
  if (circle_distance(x, xp) <= kDistinctTol || circle_distance(y, yp) <= kDistinctTol) {
    throw GeometryError(ErrorCode::NoEllipticSolution, "pairs must have distinct sources and targets");
  }
  // Frames sending 0 -> x, inf -> x' (resp. y, y'), normalized to det 1.
  auto frame = [](const RP1Point& zero, const RP1Point& inf) {
    Mat2 m{inf.u(), zero.u(), inf.v(), zero.v()};
    if (m.det() < 0) m.a = -m.a, m.c = -m.c;
    return m * (1.0 / std::sqrt(m.det()));
  };
  const Mat2 A = frame(x, xp), B = frame(y, yp);
  const Mat2 C = A.adj() * B;
  // tr(B diag(s, 1/s) A^{-1}) = s c11 + c22 / s for s > 0.
  const double c11 = C.a, c22 = C.d;
  double s;
  const double eps = 1e-14;
  if (std::fabs(c11) <= eps && std::fabs(c22) <= eps) {
    s = 1.0;
  } else if (std::fabs(c11) <= eps) {
    s = std::fabs(c22);
  } else if (std::fabs(c22) <= eps) {
    s = 1.0 / std::fabs(c11);
  } else if (c11 * c22 < 0) {
    s = std::sqrt(-c22 / c11);
  } else if (c11 * c22 < 1.0) {
    s = std::sqrt(c22 / c11);
  } else {
    throw GeometryError(ErrorCode::NoEllipticSolution, "no elliptic map realizes both pairs");
  }
  const Mobius sigma(B * Mat2{s, 0, 0, 1.0 / s} * A.adj());
  if (classify(sigma) != MobiusKind::Elliptic) {
    throw GeometryError(ErrorCode::NoEllipticSolution, "no elliptic map realizes both pairs");
  }
  return sigma;
}

// ---------------------------------------------------------------------------
// Two-piece maps

enum class Variant { Plus, Minus };

/// Arcs of a two-plane configuration: I1 runs counterclockwise from the repelling to the
/// attracting fixed point of gamma2 gamma1^{-1}, I2 is the complementary arc.
struct TwoPlaneArcs {
  RP1Point i1_start, i1_end;
};

inline TwoPlaneArcs two_plane_arcs(const Mobius& gamma1, const Mobius& gamma2, bool swap_arcs = false) {
  const Mobius h = gamma2 * gamma1.inverse();
  if (classify(h) != MobiusKind::Hyperbolic) {
    throw GeometryError(ErrorCode::NotHyperbolicComposition, "gamma2 gamma1^{-1} is not hyperbolic");
  }
  const auto fp = hyperbolic_fixed_points(h);
  return swap_arcs ? TwoPlaneArcs{fp.attracting, fp.repelling} : TwoPlaneArcs{fp.repelling, fp.attracting};
}

/// Plus: gamma1^{-1} on I1 and gamma2^{-1} on I2; Minus swaps the pieces.
inline CircleMap two_plane_map(const Mobius& gamma1, const Mobius& gamma2, Variant variant,
                               bool swap_arcs = false) {
  const TwoPlaneArcs arcs = two_plane_arcs(gamma1, gamma2, swap_arcs);
  const Mobius a = gamma1.inverse(), b = gamma2.inverse();
  if (variant == Variant::Plus) return CircleMap::from_cyclic({arcs.i1_start, arcs.i1_end}, {a, b});
  return CircleMap::from_cyclic({arcs.i1_start, arcs.i1_end}, {b, a});
}

// ---------------------------------------------------------------------------
// Finite earthquakes

struct LaminationSpec {
  std::vector<Geodesic> leaves;
  std::vector<double> weights;
  std::size_t base = 0;
  Side side = Side::Left;
};

/// Complementary regions of a finite family of disjoint geodesics.
struct GapStructure {
  std::vector<RP1Point> endpoints;             // sorted by angle
  std::vector<std::size_t> leaf_of;            // endpoint -> leaf
  std::vector<std::size_t> gap_of_arc;         // arc [e_j, e_{j+1}] -> gap
  std::vector<Stratum> gaps;                   // vertices and edge kinds; isometry unset
  std::vector<std::vector<std::size_t>> gap_arcs;
  std::vector<std::array<std::size_t, 2>> leaf_gaps;  // the two gaps along each leaf, ascending
};

inline void check_lamination(const std::vector<Geodesic>& leaves) {
  for (std::size_t i = 0; i < leaves.size(); ++i) {
    for (std::size_t j = i + 1; j < leaves.size(); ++j) {
      const Geodesic &a = leaves[i], &b = leaves[j];
      const double touch = std::min({circle_distance(a.first(), b.first()), circle_distance(a.first(), b.second()),
                                     circle_distance(a.second(), b.first()), circle_distance(a.second(), b.second())});
      if (touch <= kDistinctTol || a.crosses(b)) {
        throw GeometryError(ErrorCode::CrossingLeaves,
                            "leaves " + std::to_string(i) + " and " + std::to_string(j) + " are not disjoint");
      }
    }
  }
}

inline GapStructure gap_structure(const std::vector<Geodesic>& leaves) {
  check_lamination(leaves);
  GapStructure gs;
  const std::size_t k = leaves.size();
  if (k == 0) {
    gs.gaps.push_back({});
    gs.gap_arcs.push_back({});
    return gs;
  }
  std::vector<std::pair<double, std::size_t>> order;  // (angle, 2*leaf + end)
  for (std::size_t i = 0; i < k; ++i) {
    order.emplace_back(leaves[i].first().angle(), 2 * i);
    order.emplace_back(leaves[i].second().angle(), 2 * i + 1);
  }
  std::sort(order.begin(), order.end());
  const std::size_t m = 2 * k;
  std::vector<std::size_t> pos_of(m);
  for (std::size_t j = 0; j < m; ++j) {
    const std::size_t id = order[j].second;
    const Geodesic& g = leaves[id / 2];
    gs.endpoints.push_back(id % 2 == 0 ? g.first() : g.second());
    gs.leaf_of.push_back(id / 2);
    pos_of[id] = j;
  }
  auto partner = [&](std::size_t j) { return pos_of[order[j].second ^ 1u]; };

  gs.gap_of_arc.assign(m, static_cast<std::size_t>(-1));
  gs.leaf_gaps.assign(k, {static_cast<std::size_t>(-1), static_cast<std::size_t>(-1)});
  for (std::size_t start = 0; start < m; ++start) {
    if (gs.gap_of_arc[start] != static_cast<std::size_t>(-1)) continue;
    const std::size_t gap = gs.gaps.size();
    Stratum s;
    std::vector<std::size_t> arcs;
    std::size_t cur = start;
    do {
      gs.gap_of_arc[cur] = gap;
      arcs.push_back(cur);
      const std::size_t next = (cur + 1) % m;
      s.vertices.push_back(gs.endpoints[cur]);
      s.edges.push_back(EdgeKind::Arc);
      s.vertices.push_back(gs.endpoints[next]);
      s.edges.push_back(EdgeKind::Leaf);
      auto& lg = gs.leaf_gaps[gs.leaf_of[next]];
      (lg[0] == static_cast<std::size_t>(-1) ? lg[0] : lg[1]) = gap;
      cur = partner(next);
    } while (cur != start);
    gs.gaps.push_back(std::move(s));
    gs.gap_arcs.push_back(std::move(arcs));
  }
  for (auto& lg : gs.leaf_gaps)
    if (lg[0] > lg[1]) std::swap(lg[0], lg[1]);
  return gs;
}

struct FiniteEarthquake {
  CircleMap boundary;
  EarthquakeMap truth;
};

/// Boundary map and exact earthquake of a finite weighted lamination; the base gap is fixed.
inline FiniteEarthquake finite_earthquake_boundary(const LaminationSpec& spec, double leaf_t = 0.5) {
  if (spec.weights.size() != spec.leaves.size()) {
    throw GeometryError(ErrorCode::InvalidInput, "one weight per leaf is required");
  }
  for (double w : spec.weights) {
    if (!(w > 0) || !std::isfinite(w)) throw GeometryError(ErrorCode::NonPositiveWeight, "weights must be positive");
  }
  const GapStructure gs = gap_structure(spec.leaves);
  if (spec.base >= gs.gaps.size()) throw GeometryError(ErrorCode::InvalidInput, "base gap index out of range");

  const std::size_t ng = gs.gaps.size();
  const std::size_t m = gs.endpoints.size();
  auto arc_mid = [&](std::size_t gap) {
    const std::size_t j = gs.gap_arcs[gap].front();
    return ccw_midpoint(gs.endpoints[j], gs.endpoints[(j + 1) % m]);
  };

  std::vector<std::optional<Mobius>> iso(ng);
  iso[spec.base] = Mobius();
  std::vector<std::vector<std::size_t>> leaves_of_gap(ng);
  for (std::size_t l = 0; l < gs.leaf_gaps.size(); ++l) {
    leaves_of_gap[gs.leaf_gaps[l][0]].push_back(l);
    leaves_of_gap[gs.leaf_gaps[l][1]].push_back(l);
  }
  std::queue<std::size_t> todo;
  todo.push(spec.base);
  while (!todo.empty()) {
    const std::size_t g = todo.front();
    todo.pop();
    for (std::size_t l : leaves_of_gap[g]) {
      const std::size_t h = gs.leaf_gaps[l][0] == g ? gs.leaf_gaps[l][1] : gs.leaf_gaps[l][0];
      if (iso[h]) continue;
      const Geodesic& leaf = spec.leaves[l];
      Mobius step = hyperbolic_along(leaf.first(), leaf.second(), spec.weights[l]);
      if (translate_side(step, arc_mid(g), arc_mid(h)) != spec.side) step = step.inverse();
      iso[h] = *iso[g] * step;
      todo.push(h);
    }
  }

  FiniteEarthquake out;
  out.truth.side = spec.side;
  out.truth.leaves = spec.leaves;
  for (std::size_t g = 0; g < ng; ++g) {
    Stratum s = gs.gaps[g];
    s.isometry = *iso[g];
    out.truth.strata.push_back(std::move(s));
  }
  for (std::size_t l = 0; l < spec.leaves.size(); ++l) {
    const auto [a, b] = gs.leaf_gaps[l];
    const Mobius comp = comparison(out.truth.strata, a, b);
    out.truth.leaf_choices.push_back({l, leaf_t, out.truth.strata[a].isometry * hyperbolic_power(comp, leaf_t)});
  }
  if (m == 0) {
    out.boundary = CircleMap();
    return out;
  }
  std::vector<Mobius> pieces;
  for (std::size_t j = 0; j < m; ++j) pieces.push_back(*iso[gs.gap_of_arc[j]]);
  out.boundary = CircleMap::from_cyclic(gs.endpoints, std::move(pieces));
  return out;
}

}  // namespace quake
