#pragma once

// Earthquake maps: projections, assembly from pleated surfaces, evaluation and the
// verifier of the earthquake axioms.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "quake/adsgeom.hpp"
#include "quake/circlemap.hpp"
#include "quake/error.hpp"
#include "quake/hull.hpp"
#include "quake/mobius.hpp"
#include "quake/strata.hpp"

namespace quake {

inline constexpr double kOnPlaneTol = 1e-6;
inline constexpr double kSeparationTol = 1e-9;

enum class Projection { Left, Right };

/// pi_l(p) = Fix(p gamma^{-1}), pi_r(p) = Fix(gamma^{-1} p) for p on the plane dual to gamma.
inline H2Point project(const Mat2& p, const Mobius& gamma, Projection which) {
  if (!(p.det() > 0)) throw GeometryError(ErrorCode::InvalidInput, "project needs a point of AdS^3");
  const Mat2 pn = p * (1.0 / std::sqrt(p.det()));
  if (std::fabs(bilinear(pn, gamma.matrix())) > kOnPlaneTol) {
    throw GeometryError(ErrorCode::NotOnPlane, "point is not on the plane dual to gamma");
  }
  const Mat2 g_inv = gamma.inverse().matrix();
  const Mobius r(which == Projection::Left ? pn * g_inv : g_inv * pn);
  if (classify(r) != MobiusKind::Elliptic) throw GeometryError(ErrorCode::NotElliptic, "projection is not elliptic");
  return fix_elliptic(r);
}
inline H2Point project(const AdSPoint& p, const Mobius& gamma, Projection which) {
  return project(p.matrix(), gamma, which);
}

// ---------------------------------------------------------------------------
// Assembly

inline Side side_of_surface(TimeSide s) { return s == TimeSide::Past ? Side::Left : Side::Right; }

/// Earthquake of a pleated surface: each face with dual gamma gives a stratum with isometry
/// gamma^{-1}; each ridge gives a leaf. Leaf choices interpolate at t between the two faces.
inline EarthquakeMap strata_map(const PleatedSurface& ps, double leaf_t = 0.5) {
  EarthquakeMap e;
  e.side = side_of_surface(ps.side);
  const std::size_t nf = ps.faces.size();

  for (const Ridge& r : ps.ridges) {
    for (std::size_t f : {r.face_a, r.face_b}) {
      const Mat2 g = ps.faces[f].dual.matrix();
      for (const AdSBoundaryPoint& p : {r.p, r.q}) {
        const Mat2 x = boundary_encode(p);
        if (std::fabs(bilinear(x, g)) / x.norm() > kOnPlaneTol) {
          throw GeometryError(ErrorCode::InconsistentRidge, "ridge point is off the plane of an adjacent face");
        }
      }
    }
  }

  std::vector<std::size_t> order(nf);
  std::vector<std::vector<RP1Point>> verts(nf);
  std::vector<std::vector<std::pair<RP1Point, RP1Point>>> ridges_of(nf);
  for (const Ridge& r : ps.ridges) {
    ridges_of[r.face_a].emplace_back(r.p.x, r.q.x);
    ridges_of[r.face_b].emplace_back(r.p.x, r.q.x);
  }
  auto same = [](const RP1Point& a, const RP1Point& b) { return circle_distance(a, b) <= kDistinctTol; };
  std::vector<Stratum> strata(nf);
  for (std::size_t f = 0; f < nf; ++f) {
    std::vector<RP1Point> vs;
    for (const auto& [p, q] : ridges_of[f]) {
      for (const RP1Point& v : {p, q})
        if (std::none_of(vs.begin(), vs.end(), [&](const RP1Point& w) { return same(v, w); })) vs.push_back(v);
    }
    std::sort(vs.begin(), vs.end(), [](const RP1Point& a, const RP1Point& b) { return a.angle() < b.angle(); });
    Stratum s;
    s.kind = StratumKind::Gap;
    s.isometry = ps.faces[f].dual.inverse();
    s.vertices = vs;
    for (std::size_t i = 0; i < vs.size(); ++i) {
      const RP1Point& a = vs[i];
      const RP1Point& b = vs[(i + 1) % vs.size()];
      const bool sampled_between = std::any_of(ps.faces[f].vertices.begin(), ps.faces[f].vertices.end(),
                                               [&](const AdSBoundaryPoint& v) {
                                                 return !same(v.x, a) && !same(v.x, b) && on_ccw_arc(v.x, a, b);
                                               });
      const bool ridge = std::any_of(ridges_of[f].begin(), ridges_of[f].end(), [&](const auto& pq) {
        return (same(pq.first, a) && same(pq.second, b)) || (same(pq.first, b) && same(pq.second, a));
      });
      s.edges.push_back(ridge && !sampled_between ? EdgeKind::Leaf : EdgeKind::Arc);
    }
    strata[f] = std::move(s);
  }

  // Canonical order: by the smallest vertex angle; the whole-plane stratum first.
  for (std::size_t f = 0; f < nf; ++f) order[f] = f;
  auto key = [&](std::size_t f) { return strata[f].vertices.empty() ? -1.0 : strata[f].vertices.front().angle(); };
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return key(a) < key(b); });
  std::vector<std::size_t> rank(nf);
  for (std::size_t i = 0; i < nf; ++i) {
    rank[order[i]] = i;
    e.strata.push_back(strata[order[i]]);
  }

  struct LeafRec {
    Geodesic g;
    std::size_t a, b;
  };
  std::vector<LeafRec> leaves;
  for (const Ridge& r : ps.ridges) {
    RP1Point p = r.p.x, q = r.q.x;
    if (q.angle() < p.angle()) std::swap(p, q);
    leaves.push_back({Geodesic(p, q), std::min(rank[r.face_a], rank[r.face_b]), std::max(rank[r.face_a], rank[r.face_b])});
  }
  std::stable_sort(leaves.begin(), leaves.end(),
                   [](const LeafRec& x, const LeafRec& y) { return x.g.first().angle() < y.g.first().angle(); });
  for (std::size_t l = 0; l < leaves.size(); ++l) {
    e.leaves.push_back(leaves[l].g);
    const Mobius comp = comparison(e.strata, leaves[l].a, leaves[l].b);
    e.leaf_choices.push_back({l, leaf_t, e.strata[leaves[l].a].isometry * hyperbolic_power(comp, leaf_t)});
  }
  return e;
}

/// Analytic earthquake of the two-plane map f+ (or f-) of gamma1, gamma2.
inline EarthquakeMap simple_earthquake(const Mobius& gamma1, const Mobius& gamma2, Variant variant = Variant::Plus,
                                       double leaf_t = 0.5) {
  const TwoPlaneArcs arcs = two_plane_arcs(gamma1, gamma2);
  const RP1Point r = arcs.i1_start, a = arcs.i1_end;
  Mobius e1 = gamma1.inverse(), e2 = gamma2.inverse();
  if (variant == Variant::Minus) std::swap(e1, e2);
  EarthquakeMap e;
  Stratum d1{StratumKind::Gap, {r, a}, {EdgeKind::Arc, EdgeKind::Leaf}, e1};
  Stratum d2{StratumKind::Gap, {a, r}, {EdgeKind::Arc, EdgeKind::Leaf}, e2};
  const Mobius comp = e1.inverse() * e2;
  e.side = translate_side(comp, ccw_midpoint(r, a), ccw_midpoint(a, r));
  e.leaves.push_back(r.angle() < a.angle() ? Geodesic(r, a) : Geodesic(a, r));
  e.strata = {d1, d2};
  if (d2.vertices.front().angle() < d1.vertices.front().angle()) std::swap(e.strata[0], e.strata[1]);
  const Mobius c = comparison(e.strata, 0, 1);
  e.leaf_choices.push_back({0, leaf_t, e.strata[0].isometry * hyperbolic_power(c, leaf_t)});
  return e;
}

// ---------------------------------------------------------------------------
// Evaluation

namespace detail {

inline std::optional<std::size_t> leaf_index(const EarthquakeMap& e, const RP1Point& p, const RP1Point& q) {
  for (std::size_t l = 0; l < e.leaves.size(); ++l) {
    if (e.leaves[l].same_as(Geodesic(p, q), 1e-9)) return l;
  }
  return std::nullopt;
}

inline const Mobius& leaf_isometry(const EarthquakeMap& e, std::size_t leaf, const Mobius& fallback) {
  for (const LeafChoice& c : e.leaf_choices)
    if (c.leaf_index == leaf) return c.isometry;
  return fallback;
}

}  // namespace detail

/// Index into e.strata of a gap whose closed boundary arcs contain x.
inline std::size_t locate(const EarthquakeMap& e, const RP1Point& x) {
  for (std::size_t s = 0; s < e.strata.size(); ++s) {
    const Stratum& st = e.strata[s];
    if (st.vertices.empty()) return s;
    for (std::size_t i = 0; i < st.vertices.size(); ++i) {
      if (st.edges[i] != EdgeKind::Arc) continue;
      if (on_ccw_arc(x, st.vertices[i], st.vertices[(i + 1) % st.vertices.size()])) return s;
    }
  }
  throw GeometryError(ErrorCode::InvalidInput, "strata do not cover the circle");
}

inline RP1Point eval_earthquake(const EarthquakeMap& e, const RP1Point& x) {
  return e.strata.at(locate(e, x)).isometry.apply(x);
}

/// Interior evaluation; points within tol of a leaf use that leaf's choice.
inline H2Point eval_earthquake(const EarthquakeMap& e, const H2Point& z, double tol = 1e-12) {
  for (const Stratum& st : e.strata) {
    const std::size_t n = st.vertices.size();
    bool inside = true;
    for (std::size_t i = 0; i < n && inside; ++i) {
      if (st.edges[i] != EdgeKind::Leaf) continue;
      const RP1Point& p = st.vertices[i];
      const RP1Point& q = st.vertices[(i + 1) % n];
      const double side = geodesic_side(p, q, z);
      if (std::fabs(side) <= tol) {
        if (auto l = detail::leaf_index(e, p, q)) return detail::leaf_isometry(e, *l, st.isometry).apply(z);
      }
      inside = side > 0;
    }
    if (inside) return st.isometry.apply(z);
  }
  throw GeometryError(ErrorCode::InvalidInput, "strata do not cover the plane");
}

/// Geodesic image under the left projection of the ridge over a leaf, using the support
/// plane at parameter t in the pencil between the two adjacent strata.
inline Geodesic leaf_geodesic(const EarthquakeMap& e, std::size_t leaf, double t) {
  std::size_t a = e.strata.size(), b = e.strata.size();
  const Geodesic& g = e.leaves.at(leaf);
  for (std::size_t s = 0; s < e.strata.size(); ++s) {
    const Stratum& st = e.strata[s];
    for (std::size_t i = 0; i < st.vertices.size(); ++i) {
      if (st.edges[i] != EdgeKind::Leaf) continue;
      if (!Geodesic(st.vertices[i], st.vertices[(i + 1) % st.vertices.size()]).same_as(g, 1e-9)) continue;
      (a == e.strata.size() ? a : b) = s;
    }
  }
  if (b == e.strata.size()) throw GeometryError(ErrorCode::InconsistentRidge, "leaf does not bound two strata");
  const Mobius gamma1 = e.strata[a].isometry.inverse();
  const Mobius gamma2 = e.strata[b].isometry.inverse();
  const Mobius gamma_t = hyperbolic_power(gamma2 * gamma1.inverse(), t) * gamma1;
  const Mat2 x = boundary_encode(g.first(), e.strata[a].isometry.apply(g.first()));
  const Mat2 y = boundary_encode(g.second(), e.strata[a].isometry.apply(g.second()));
  const double s = bilinear(x, y) > 0 ? -1.0 : 1.0;
  const Mat2 xn = x * (1.0 / x.norm()), yn = y * (1.0 / y.norm());
  const H2Point z1 = project(xn + yn * s, gamma_t, Projection::Left);
  const H2Point z2 = project(xn + yn * (3.0 * s), gamma_t, Projection::Left);
  return geodesic_through(z1, z2);
}

// ---------------------------------------------------------------------------
// Verification

struct PairRecord {
  std::size_t i = 0, j = 0;
  Mobius comparison;
  MobiusKind kind = MobiusKind::Identity;
  std::optional<Side> side;
  double trace_margin = 0;       // |tr| - 2
  double separation_margin = 0;  // angular; negative when the axis fails to separate
  bool ok = true;
  std::string reason;
};

struct VerificationReport {
  std::vector<PairRecord> records;
  std::vector<PairRecord> failures;
  double worst_trace_margin = std::numeric_limits<double>::infinity();
  double worst_separation_margin = std::numeric_limits<double>::infinity();
  std::optional<double> boundary_error;
  bool pass = true;
};

namespace detail {

/// Ideal vertices and arc midpoints of a stratum.
inline std::vector<RP1Point> marker_points(const Stratum& s) {
  std::vector<RP1Point> out = s.vertices;
  for (std::size_t i = 0; i < s.vertices.size(); ++i) {
    if (s.edges[i] == EdgeKind::Arc) out.push_back(ccw_midpoint(s.vertices[i], s.vertices[(i + 1) % s.vertices.size()]));
  }
  return out;
}

/// Signed angular margin of x in the closed counterclockwise arc from a to b.
inline double arc_margin(const RP1Point& x, const RP1Point& a, const RP1Point& b) {
  const double len = ccw_offset(a, b), off = ccw_offset(a, x);
  if (off <= len) return std::min(off, len - off);
  return -std::min(off - len, kTwoPi - off);
}

inline bool contains_closure(const Stratum& gap, const Stratum& leaf) {
  if (leaf.kind != StratumKind::Leaf || gap.kind != StratumKind::Gap) return false;
  const Geodesic g(leaf.vertices[0], leaf.vertices[1]);
  for (std::size_t i = 0; i < gap.vertices.size(); ++i) {
    if (gap.edges[i] != EdgeKind::Leaf) continue;
    if (Geodesic(gap.vertices[i], gap.vertices[(i + 1) % gap.vertices.size()]).same_as(g, 1e-9)) return true;
  }
  return false;
}

inline PairRecord check_pair(const EarthquakeMap& e, const std::vector<Stratum>& all, std::size_t i, std::size_t j) {
  PairRecord r;
  r.i = i;
  r.j = j;
  r.comparison = comparison(all, i, j);
  r.kind = classify(r.comparison);
  const bool nested = contains_closure(all[i], all[j]) || contains_closure(all[j], all[i]);
  if (r.kind == MobiusKind::Identity) {
    r.ok = nested;
    if (!r.ok) r.reason = "identity comparison between strata that are not nested";
    return r;
  }
  r.trace_margin = std::fabs(r.comparison.trace()) - 2.0;
  if (r.kind != MobiusKind::Hyperbolic || r.trace_margin < kTraceBand) {
    r.ok = false;
    r.reason = "comparison is " + to_string(r.kind) + ", not hyperbolic";
    return r;
  }
  const HyperbolicFixedPoints fp = hyperbolic_fixed_points(r.comparison);
  const RP1Point p = fp.repelling, q = fp.attracting;
  const auto mi = marker_points(all[i]), mj = marker_points(all[j]);
  auto worst = [&](const std::vector<RP1Point>& pts, const RP1Point& a, const RP1Point& b) {
    double m = std::numeric_limits<double>::infinity();
    for (const RP1Point& x : pts) m = std::min(m, arc_margin(x, a, b));
    return m;
  };
  const double m1 = std::min(worst(mi, p, q), worst(mj, q, p));
  const double m2 = std::min(worst(mi, q, p), worst(mj, p, q));
  const bool i_on_pq = m1 >= m2;
  r.separation_margin = std::max(m1, m2);
  if (r.separation_margin < -kSeparationTol) {
    r.ok = false;
    r.reason = "axis does not weakly separate the strata";
    return r;
  }
  // Representatives strictly off the axis; a stratum lying on the axis takes the midpoint
  // of its side's arc.
  auto rep = [&](const std::vector<RP1Point>& pts, bool on_pq) {
    const RP1Point& a = on_pq ? p : q;
    const RP1Point& b = on_pq ? q : p;
    for (const RP1Point& x : pts) {
      if (arc_margin(x, a, b) > 1e-9) return x;
    }
    return ccw_midpoint(a, b);
  };
  try {
    r.side = translate_side(r.comparison, rep(mi, i_on_pq), rep(mj, !i_on_pq));
  } catch (const GeometryError& err) {
    r.ok = false;
    r.reason = std::string("side undefined: ") + err.what();
    return r;
  }
  if (*r.side != e.side) {
    r.ok = false;
    r.reason = "comparison translates " + to_string(*r.side) + ", expected " + to_string(e.side);
  }
  return r;
}

}  // namespace detail

/// Checks the earthquake axioms over all ordered pairs of strata, leaf strata included.
inline VerificationReport verify_earthquake(const EarthquakeMap& e, unsigned threads = 1) {
  const std::vector<Stratum> all = e.all_strata();
  const std::size_t n = all.size();
  std::vector<std::vector<PairRecord>> rows(n);
  auto work = [&](std::size_t begin, std::size_t step) {
    for (std::size_t i = begin; i < n; i += step) {
      for (std::size_t j = 0; j < n; ++j)
        if (i != j) rows[i].push_back(detail::check_pair(e, all, i, j));
    }
  };
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
  if (threads == 1) {
    work(0, 1);
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work, t, threads);
    for (auto& th : pool) th.join();
  }
  VerificationReport rep;
  for (auto& row : rows) {
    for (PairRecord& r : row) {
      if (r.kind == MobiusKind::Hyperbolic) {
        rep.worst_trace_margin = std::min(rep.worst_trace_margin, r.trace_margin);
        rep.worst_separation_margin = std::min(rep.worst_separation_margin, r.separation_margin);
      }
      if (!r.ok) {
        rep.pass = false;
        rep.failures.push_back(r);
      }
      rep.records.push_back(std::move(r));
    }
  }
  return rep;
}

/// Sup of circle distance between E and f over equidistributed samples and both sides of
/// every breakpoint of f.
inline double boundary_agreement(const EarthquakeMap& e, const CircleMap& f, int samples = 1000, double delta = 1e-7) {
  double worst = 0;
  auto probe = [&](const RP1Point& x) { worst = std::max(worst, circle_distance(eval_earthquake(e, x), f.eval(x))); };
  for (int i = 0; i < samples; ++i) probe(RP1Point::from_angle(kTwoPi * (i + 0.5) / samples));
  for (const RP1Point& b : f.breakpoints()) {
    probe(b);
    probe(RP1Point::from_angle(b.angle() - delta));
    probe(RP1Point::from_angle(b.angle() + delta));
  }
  return worst;
}

// ---------------------------------------------------------------------------
// Pipeline

struct ExtractOptions {
  int samples = 2000;
  Side side = Side::Left;
  double leaf_t = 0.5;
  std::uint64_t seed = 0;
};

struct Extraction {
  EarthquakeMap map;
  HullComplex hull;
  PleatedSurface surface;
  FaceClassification classes;
  double boundary_error = 0;
};

/// Sample phase in [0, 1) drawn from the seed; seed 0 gives phase 0.
inline double sample_phase(std::uint64_t seed) {
  if (seed == 0) return 0.0;
  std::mt19937_64 rng(seed);
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// f -> chart -> sampled hull -> pleated boundary -> earthquake. A left earthquake comes
/// from the past boundary, a right one from the future boundary.
inline Extraction extract_earthquake(const CircleMap& f, const ExtractOptions& opt = {}) {
  if (opt.leaf_t < 0 || opt.leaf_t > 1) throw GeometryError(ErrorCode::InvalidInput, "leaf parameter must lie in [0, 1]");
  Extraction out;
  const double phase = sample_phase(opt.seed);
  out.hull = graph_hull(f, opt.samples, phase);
  out.classes = classify_faces(out.hull);
  const TimeSide side = opt.side == Side::Left ? TimeSide::Past : TimeSide::Future;
  out.surface = refine_pleated(extract_pleated(out.hull, out.classes, side, &f), f, opt.samples, phase);
  out.map = strata_map(out.surface, opt.leaf_t);
  out.boundary_error = boundary_agreement(out.map, f);
  return out;
}

}  // namespace quake
