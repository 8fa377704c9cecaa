#pragma once

// Convex hull of graph(f) in an affine chart of AdS^3 and its pleated boundary surfaces.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <ostream>
#include <random>
#include <set>
#include <unordered_map>
#include <utility>
#include <vector>

#include <Eigen/SVD>

#include "quake/adsgeom.hpp"
#include "quake/circlemap.hpp"
#include "quake/error.hpp"
#include "quake/mobius.hpp"

namespace quake {

using Vec3 = std::array<double, 3>;

inline Vec3 operator-(const Vec3& a, const Vec3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
inline Vec3 operator+(const Vec3& a, const Vec3& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }
inline Vec3 operator*(const Vec3& a, double s) { return {a[0] * s, a[1] * s, a[2] * s}; }
inline double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
inline Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}
inline double length(const Vec3& a) { return std::sqrt(dot(a, a)); }

inline constexpr double kHullRelTol = 1e-9;     // eps_h relative to the diameter
inline constexpr double kMergeNormalTol = 1e-7;  // eps_m
inline constexpr double kLightlikeBand = 1e-12;  // on det(L) / |L|^2, L the plane matrix in the chart frame
inline constexpr double kTimelikeNoise = 1e-8;   // slightly timelike faces are unresolved slivers
inline constexpr double kFlatRidgeMargin = 1e-9;  // |tr| - 2 below this joins two faces
inline constexpr double kLooseFaceTol = 1e-9;  // vertex residual |<v, dual>| of a resolved face
inline constexpr double kSnapTol = 1e-6;

// ---------------------------------------------------------------------------
// Sampling

/// N points (x, f(x)) with x equidistributed in angle, shifted by phase * 2pi / N, plus the
/// breakpoints of f and their images when refine is set.
inline std::vector<AdSBoundaryPoint> sample_graph(const CircleMap& f, int n, bool refine = true, double phase = 0.0) {
  if (n < 4) throw GeometryError(ErrorCode::InvalidInput, "at least 4 samples are required");
  std::vector<AdSBoundaryPoint> out;
  const auto& bps = f.breakpoints();
  for (int i = 0; i < n; ++i) {
    const RP1Point x = RP1Point::from_angle(kTwoPi * (i + phase) / n);
    if (refine) {
      const bool dup = std::any_of(bps.begin(), bps.end(), [&](const RP1Point& b) { return circle_distance(b, x) <= 1e-9; });
      if (dup) continue;
    }
    out.push_back({x, f.eval(x)});
  }
  if (refine) {
    for (const RP1Point& b : bps) out.push_back({b, f.eval(b)});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Hull complex

struct HullFace {
  Vec3 normal{};  // outward unit normal
  double offset = 0;
  std::vector<std::size_t> cycle;  // counterclockwise seen from outside
};

/// Two faces sharing an edge; v0, v1 are the ends of the shared boundary.
struct HullEdge {
  std::size_t face_a = 0, face_b = 0;
  std::size_t v0 = 0, v1 = 0;
};

struct HullComplex {
  std::vector<Vec3> points;
  std::vector<AdSBoundaryPoint> sources;  // empty for plain point clouds
  Mobius gamma0;
  std::vector<HullFace> faces;
  std::vector<HullEdge> adjacency;
  double eps_h = 0;
  double eps_m = kMergeNormalTol;

  std::vector<std::size_t> vertex_indices() const {
    std::set<std::size_t> s;
    for (const HullFace& f : faces) s.insert(f.cycle.begin(), f.cycle.end());
    return {s.begin(), s.end()};
  }
};

namespace detail {

inline std::uint64_t edge_key(std::size_t a, std::size_t b) {
  return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint64_t>(b);
}

inline double diameter(const std::vector<Vec3>& pts) {
  Vec3 lo = pts.front(), hi = pts.front();
  for (const Vec3& p : pts) {
    for (int k = 0; k < 3; ++k) {
      lo[k] = std::min(lo[k], p[k]);
      hi[k] = std::max(hi[k], p[k]);
    }
  }
  return length(hi - lo);
}

/// Shared-edge adjacency of faces given as oriented cycles.
inline std::vector<HullEdge> cycle_adjacency(const std::vector<HullFace>& faces) {
  std::unordered_map<std::uint64_t, std::size_t> owner;
  for (std::size_t f = 0; f < faces.size(); ++f) {
    const auto& c = faces[f].cycle;
    for (std::size_t i = 0; i < c.size(); ++i) owner[edge_key(c[i], c[(i + 1) % c.size()])] = f;
  }
  std::map<std::pair<std::size_t, std::size_t>, std::vector<std::pair<std::size_t, std::size_t>>> shared;
  for (std::size_t f = 0; f < faces.size(); ++f) {
    const auto& c = faces[f].cycle;
    for (std::size_t i = 0; i < c.size(); ++i) {
      const std::size_t a = c[i], b = c[(i + 1) % c.size()];
      const auto it = owner.find(edge_key(b, a));
      if (it == owner.end() || it->second <= f) continue;
      shared[{f, it->second}].emplace_back(a, b);
    }
  }
  std::vector<HullEdge> out;
  for (const auto& [pair, edges] : shared) {
    // Ends of the shared chain: vertices used by exactly one of its edges.
    std::map<std::size_t, int> count;
    for (const auto& [a, b] : edges) {
      ++count[a];
      ++count[b];
    }
    std::vector<std::size_t> ends;
    for (const auto& [v, n] : count)
      if (n == 1) ends.push_back(v);
    if (ends.size() != 2) ends = {edges.front().first, edges.front().second};
    out.push_back({pair.first, pair.second, ends[0], ends[1]});
  }
  return out;
}

}  // namespace detail

/// Quickhull. Faces are triangles with outward normals; a point counts as outside a face
/// only when it is farther than eps_h = 1e-9 * diameter.
inline HullComplex convex_hull_3d(const std::vector<Vec3>& pts) {
  const std::size_t n = pts.size();
  if (n < 4) throw GeometryError(ErrorCode::DegenerateFlat, "fewer than 4 points");
  const double eps = kHullRelTol * detail::diameter(pts);

  // Initial simplex.
  std::array<std::size_t, 6> ext{};
  for (std::size_t i = 0; i < n; ++i) {
    for (int k = 0; k < 3; ++k) {
      if (pts[i][k] < pts[ext[2 * k]][k]) ext[2 * k] = i;
      if (pts[i][k] > pts[ext[2 * k + 1]][k]) ext[2 * k + 1] = i;
    }
  }
  std::size_t i0 = 0, i1 = 0;
  double best = -1;
  for (std::size_t a = 0; a < 6; ++a) {
    for (std::size_t b = a + 1; b < 6; ++b) {
      const double d = length(pts[ext[a]] - pts[ext[b]]);
      if (d > best) {
        best = d;
        i0 = std::min(ext[a], ext[b]);
        i1 = std::max(ext[a], ext[b]);
      }
    }
  }
  if (best <= eps) throw GeometryError(ErrorCode::DegenerateFlat, "all points coincide");
  const Vec3 dir = pts[i1] - pts[i0];
  std::size_t i2 = n;
  best = eps;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = length(cross(dir, pts[i] - pts[i0])) / length(dir);
    if (d > best) {
      best = d;
      i2 = i;
    }
  }
  if (i2 == n) throw GeometryError(ErrorCode::DegenerateFlat, "all points are collinear");
  Vec3 nrm = cross(pts[i1] - pts[i0], pts[i2] - pts[i0]);
  nrm = nrm * (1.0 / length(nrm));
  std::size_t i3 = n;
  best = eps;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = std::fabs(dot(nrm, pts[i] - pts[i0]));
    if (d > best) {
      best = d;
      i3 = i;
    }
  }
  if (i3 == n) throw GeometryError(ErrorCode::DegenerateFlat, "all points are coplanar");

  struct Face {
    std::array<std::size_t, 3> v;
    Vec3 normal;
    double offset;
    bool alive = true;
    std::vector<std::size_t> outside;
  };
  std::vector<Face> faces;
  std::unordered_map<std::uint64_t, std::size_t> edge_face;

  auto make_face = [&](std::size_t a, std::size_t b, std::size_t c) {
    Vec3 nn = cross(pts[b] - pts[a], pts[c] - pts[a]);
    nn = nn * (1.0 / length(nn));
    faces.push_back({{a, b, c}, nn, dot(nn, pts[a]), true, {}});
    const std::size_t id = faces.size() - 1;
    edge_face[detail::edge_key(a, b)] = id;
    edge_face[detail::edge_key(b, c)] = id;
    edge_face[detail::edge_key(c, a)] = id;
    return id;
  };
  auto dist = [&](const Face& f, std::size_t p) { return dot(f.normal, pts[p]) - f.offset; };

  const bool flip = dot(nrm, pts[i3] - pts[i0]) > 0;
  std::array<std::array<std::size_t, 3>, 4> tet;
  if (flip) {
    tet = {{{i0, i2, i1}, {i0, i1, i3}, {i1, i2, i3}, {i2, i0, i3}}};
  } else {
    tet = {{{i0, i1, i2}, {i0, i3, i1}, {i1, i3, i2}, {i2, i3, i0}}};
  }
  for (const auto& t : tet) make_face(t[0], t[1], t[2]);

  auto assign = [&](std::size_t p, const std::vector<std::size_t>& candidates) {
    for (std::size_t f : candidates) {
      if (dist(faces[f], p) > eps) {
        faces[f].outside.push_back(p);
        return;
      }
    }
  };
  {
    const std::vector<std::size_t> all{0, 1, 2, 3};
    for (std::size_t i = 0; i < n; ++i) {
      if (i == i0 || i == i1 || i == i2 || i == i3) continue;
      assign(i, all);
    }
  }

  // Points lost to rounding while redistributing are picked up by a final sweep.
  auto sweep = [&]() {
    bool found = false;
    std::vector<std::size_t> on_hull(n, 0);
    for (const Face& f : faces)
      if (f.alive) on_hull[f.v[0]] = on_hull[f.v[1]] = on_hull[f.v[2]] = 1;
    for (std::size_t p = 0; p < n; ++p) {
      if (on_hull[p]) continue;
      for (std::size_t fi = 0; fi < faces.size(); ++fi) {
        if (faces[fi].alive && dist(faces[fi], p) > eps) {
          faces[fi].outside.push_back(p);
          found = true;
          break;
        }
      }
    }
    return found;
  };
  std::size_t cursor = 0;
  int sweeps = 0;
  for (;;) {
    while (cursor < faces.size() && (!faces[cursor].alive || faces[cursor].outside.empty())) ++cursor;
    if (cursor == faces.size()) {
      if (sweeps++ < 8 && sweep()) {
        cursor = 0;
        continue;
      }
      break;
    }
    Face& seed = faces[cursor];
    std::size_t apex = seed.outside.front();
    double far = dist(seed, apex);
    for (std::size_t p : seed.outside) {
      const double d = dist(seed, p);
      if (d > far || (d == far && p < apex)) {
        far = d;
        apex = p;
      }
    }

    // Visible region by flood fill from the seed face.
    std::vector<std::size_t> visible{cursor};
    std::vector<char> is_visible(faces.size(), 0);
    is_visible[cursor] = 1;
    for (std::size_t k = 0; k < visible.size(); ++k) {
      const Face& f = faces[visible[k]];
      for (int e = 0; e < 3; ++e) {
        const std::size_t g = edge_face.at(detail::edge_key(f.v[(e + 1) % 3], f.v[e]));
        if (is_visible[g]) continue;
        if (dist(faces[g], apex) > 0) {
          is_visible[g] = 1;
          visible.push_back(g);
        }
      }
    }
    std::vector<std::pair<std::size_t, std::size_t>> horizon;
    std::vector<std::size_t> orphans;
    for (std::size_t fi : visible) {
      Face& f = faces[fi];
      for (int e = 0; e < 3; ++e) {
        const std::size_t a = f.v[e], b = f.v[(e + 1) % 3];
        const std::size_t g = edge_face.at(detail::edge_key(b, a));
        if (!is_visible[g]) horizon.emplace_back(a, b);
      }
      for (std::size_t p : f.outside)
        if (p != apex) orphans.push_back(p);
      f.outside.clear();
      f.alive = false;
    }
    for (std::size_t fi : visible) {
      const Face& f = faces[fi];
      for (int e = 0; e < 3; ++e) {
        const auto it = edge_face.find(detail::edge_key(f.v[e], f.v[(e + 1) % 3]));
        if (it != edge_face.end() && it->second == fi) edge_face.erase(it);
      }
    }
    std::vector<std::size_t> created;
    for (const auto& [a, b] : horizon) created.push_back(make_face(a, b, apex));
    std::sort(orphans.begin(), orphans.end());
    for (std::size_t p : orphans) assign(p, created);
    cursor = 0;
  }

  HullComplex hc;
  hc.points = pts;
  hc.eps_h = eps;
  for (const Face& f : faces) {
    if (!f.alive) continue;
    hc.faces.push_back({f.normal, f.offset, {f.v[0], f.v[1], f.v[2]}});
  }
  hc.adjacency = detail::cycle_adjacency(hc.faces);
  return hc;
}

/// Greedy region merge of adjacent faces whose normals agree within eps_m and whose
/// vertices lie within eps_h of the seed plane.
inline HullComplex merge_coplanar(const HullComplex& hc, double eps_m = kMergeNormalTol) {
  const std::size_t nf = hc.faces.size();
  std::vector<std::vector<std::size_t>> nbrs(nf);
  for (const HullEdge& e : hc.adjacency) {
    nbrs[e.face_a].push_back(e.face_b);
    nbrs[e.face_b].push_back(e.face_a);
  }
  for (auto& v : nbrs) std::sort(v.begin(), v.end());

  constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> region(nf, kNone);
  std::vector<std::vector<std::size_t>> members;
  std::vector<double> area(nf), altitude(nf);
  for (std::size_t f = 0; f < nf; ++f) {
    const auto& c = hc.faces[f].cycle;
    area[f] = length(cross(hc.points[c[1]] - hc.points[c[0]], hc.points[c[2]] - hc.points[c[0]]));
    double longest = 0;
    for (std::size_t i = 0; i < 3; ++i) longest = std::max(longest, length(hc.points[c[(i + 1) % 3]] - hc.points[c[i]]));
    altitude[f] = longest > 0 ? area[f] / longest : 0;
  }
  std::vector<std::size_t> seeds(nf);
  std::iota(seeds.begin(), seeds.end(), std::size_t{0});
  std::stable_sort(seeds.begin(), seeds.end(), [&](std::size_t a, std::size_t b) { return area[a] > area[b]; });
  for (std::size_t s : seeds) {
    if (region[s] != kNone) continue;
    const std::size_t r = members.size();
    members.push_back({s});
    region[s] = r;
    const HullFace& seed = hc.faces[s];
    for (std::size_t k = 0; k < members[r].size(); ++k) {
      for (std::size_t g : nbrs[members[r][k]]) {
        if (region[g] != kNone) continue;
        const HullFace& cand = hc.faces[g];
        const double noise = altitude[g] > 0 ? hc.eps_h / altitude[g] : std::numeric_limits<double>::infinity();
        if (length(cand.normal - seed.normal) > eps_m + noise) continue;
        const bool flat = std::all_of(cand.cycle.begin(), cand.cycle.end(), [&](std::size_t v) {
          return std::fabs(dot(seed.normal, hc.points[v]) - seed.offset) <= hc.eps_h;
        });
        if (!flat) continue;
        region[g] = r;
        members[r].push_back(g);
      }
    }
  }

  HullComplex out = hc;
  out.eps_m = eps_m;
  out.faces.clear();
  for (std::size_t r = 0; r < members.size(); ++r) {
    std::set<std::uint64_t> inner;
    std::vector<std::pair<std::size_t, std::size_t>> edges;
    for (std::size_t f : members[r]) {
      const auto& c = hc.faces[f].cycle;
      for (std::size_t i = 0; i < c.size(); ++i) edges.emplace_back(c[i], c[(i + 1) % c.size()]);
    }
    for (const auto& [a, b] : edges) inner.insert(detail::edge_key(a, b));
    std::map<std::size_t, std::size_t> next;
    for (const auto& [a, b] : edges)
      if (!inner.count(detail::edge_key(b, a))) next[a] = b;
    HullFace merged;
    const std::size_t start = next.begin()->first;
    std::size_t cur = start;
    do {
      merged.cycle.push_back(cur);
      cur = next.at(cur);
    } while (cur != start && merged.cycle.size() <= next.size());
    Vec3 acc{0, 0, 0};
    for (std::size_t f : members[r]) {
      const auto& c = hc.faces[f].cycle;
      acc = acc + cross(hc.points[c[1]] - hc.points[c[0]], hc.points[c[2]] - hc.points[c[0]]);
    }
    merged.normal = acc * (1.0 / length(acc));
    double k = 0;
    for (std::size_t v : merged.cycle) k += dot(merged.normal, hc.points[v]);
    merged.offset = k / merged.cycle.size();
    out.faces.push_back(std::move(merged));
  }
  out.adjacency = detail::cycle_adjacency(out.faces);
  return out;
}

/// Faces as sorted vertex-index sets, in lexicographic order.
inline std::vector<std::vector<std::size_t>> face_index_sets(const HullComplex& hc) {
  std::vector<std::vector<std::size_t>> out;
  for (const HullFace& f : hc.faces) {
    std::vector<std::size_t> s = f.cycle;
    std::sort(s.begin(), s.end());
    out.push_back(std::move(s));
  }
  std::sort(out.begin(), out.end());
  return out;
}

/// O(n^4) oracle: every supporting plane through three points, with all points within
/// eps of it forming the face. Duplicate points are reduced to their first index.
inline std::vector<std::vector<std::size_t>> brute_force_hull(const std::vector<Vec3>& pts) {
  if (pts.size() > 50) throw GeometryError(ErrorCode::InvalidInput, "brute_force_hull is limited to 50 points");
  if (pts.size() < 4) throw GeometryError(ErrorCode::DegenerateFlat, "fewer than 4 points");
  const double eps = kHullRelTol * detail::diameter(pts);
  std::vector<std::size_t> ids;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const bool dup = std::any_of(ids.begin(), ids.end(), [&](std::size_t j) { return length(pts[i] - pts[j]) <= eps; });
    if (!dup) ids.push_back(i);
  }
  std::set<std::vector<std::size_t>> faces;
  for (std::size_t a = 0; a < ids.size(); ++a) {
    for (std::size_t b = a + 1; b < ids.size(); ++b) {
      for (std::size_t c = b + 1; c < ids.size(); ++c) {
        Vec3 nn = cross(pts[ids[b]] - pts[ids[a]], pts[ids[c]] - pts[ids[a]]);
        const double len = length(nn);
        if (len <= eps * eps) continue;
        nn = nn * (1.0 / len);
        const double k = dot(nn, pts[ids[a]]);
        bool above = false, below = false;
        std::vector<std::size_t> on;
        for (std::size_t i : ids) {
          const double d = dot(nn, pts[i]) - k;
          if (d > eps) above = true;
          else if (d < -eps) below = true;
          else on.push_back(i);
        }
        if (above && below) continue;
        faces.insert(on);
      }
    }
  }
  if (faces.empty()) throw GeometryError(ErrorCode::DegenerateFlat, "all points are coplanar");
  return {faces.begin(), faces.end()};
}

/// ASCII OFF mesh of the hull in chart coordinates.
inline void write_off(std::ostream& os, const HullComplex& hc) {
  os.precision(17);
  os << "OFF\n" << hc.points.size() << ' ' << hc.faces.size() << " 0\n";
  for (const Vec3& p : hc.points) os << p[0] << ' ' << p[1] << ' ' << p[2] << '\n';
  for (const HullFace& f : hc.faces) {
    os << f.cycle.size();
    for (std::size_t v : f.cycle) os << ' ' << v;
    os << '\n';
  }
}

// ---------------------------------------------------------------------------
// Hull of a graph

/// Largest chart coordinate norm of graph(f) over equidistributed samples and breakpoints.
inline double chart_spread(const CircleMap& f, const Mobius& gamma0, const std::vector<RP1Point>& xs) {
  double worst = 0;
  for (const RP1Point& x : xs) {
    worst = std::max(worst, length(chart_embed(gamma0, AdSBoundaryPoint{x, f.eval(x)}).vec()));
  }
  return worst;
}

inline double chart_spread(const CircleMap& f, const Mobius& gamma0, int samples = 512) {
  std::vector<RP1Point> xs;
  for (int i = 0; i < samples; ++i) xs.push_back(RP1Point::from_angle(kTwoPi * i / samples));
  xs.insert(xs.end(), f.breakpoints().begin(), f.breakpoints().end());
  return chart_spread(f, gamma0, xs);
}

/// Counterclockwise closed arc from `from` to `to`.
struct CircleArc {
  RP1Point from, to;
  bool contains(const RP1Point& x, double tol = 1e-12) const {
    return ccw_offset(from, x) <= ccw_offset(from, to) + tol || circle_distance(x, from) <= tol;
  }
};

/// Worst conditioning det(L) / |L|^2, L = gamma0^-1 * piece^-1, over the support planes of
/// the given pieces as seen from the chart at gamma0.
inline double chart_conditioning(const std::vector<Mobius>& pieces, const Mobius& gamma0) {
  double worst = std::numeric_limits<double>::infinity();
  for (const Mobius& p : pieces) {
    const Mat2 l = (gamma0.inverse() * p.inverse()).matrix();
    worst = std::min(worst, l.det() / (l.norm() * l.norm()));
  }
  return worst;
}

/// Separating plane chosen for conditioning. Candidates are x -> -1/m(x) with m either the
/// Mobius map through three points of graph(f) equally spaced in the arclength dx + dy, or a
/// piece of f or an interpolant between two pieces, each composed with rotations. The plain
/// separating_plane(f) is kept as a fallback. Among candidates whose spread is within
/// spread_slack times the smallest, the one whose chart sees the pieces' support planes best
/// conditioned wins; chart spread breaks ties. With a focus arc the chart only has to avoid
/// the graph over that arc, and only the pieces there are scored.
inline Mobius chart_plane(const CircleMap& f, int phases = 12, const CircleArc* focus = nullptr,
                          double spread_slack = std::numeric_limits<double>::infinity()) {
  std::vector<Mobius> scored;
  std::vector<RP1Point> probes;
  if (focus) {
    for (int i = 0; i < 512; ++i) {
      const RP1Point x = RP1Point::from_angle(kTwoPi * i / 512);
      if (focus->contains(x)) probes.push_back(x);
    }
    for (const RP1Point& b : f.breakpoints()) {
      if (focus->contains(b)) probes.push_back(b);
    }
    std::set<std::size_t> arcs;
    for (const RP1Point& x : probes) arcs.insert(f.arc_of(x));
    for (std::size_t k : arcs) scored.push_back(f.pieces()[k]);
  } else {
    scored = f.pieces();
  }
  constexpr int kGrid = 4096;
  std::vector<double> arc(kGrid + 1, 0.0);
  std::vector<RP1Point> xs;
  RP1Point prev = f.eval(RP1Point::from_angle(0));
  for (int i = 0; i <= kGrid; ++i) {
    const RP1Point x = RP1Point::from_angle(kTwoPi * i / kGrid);
    xs.push_back(x);
    if (i == 0) continue;
    const RP1Point y = f.eval(x);
    arc[i] = arc[i - 1] + kTwoPi / kGrid + ccw_offset(prev, y);
    prev = y;
  }
  std::vector<Mobius> candidates;
  auto consider = [&](const Mobius& m) {
    const Mobius g = Mobius(0, -1, 1, 0) * m;
    const Crossings c = graph_crossings(f, g.matrix());
    if (c.coincident) return;
    const bool clear = focus ? std::none_of(c.points.begin(), c.points.end(),
                                            [&](const RP1Point& x) { return focus->contains(x, 1e-6); })
                             : c.points.empty();
    if (clear) candidates.push_back(g.inverse());
  };
  for (int j = 0; j < phases; ++j) {
    std::array<RP1Point, 3> src, dst;
    for (int t = 0; t < 3; ++t) {
      const double target = arc[kGrid] * (t / 3.0 + j / (3.0 * phases));
      auto i = static_cast<std::size_t>(std::lower_bound(arc.begin(), arc.end(), target) - arc.begin());
      i = std::min<std::size_t>(i, kGrid - 1);
      src[t] = xs[i];
      dst[t] = f.eval(xs[i]);
    }
    try {
      consider(mobius_from_triples(src, dst));
    } catch (const GeometryError&) {
    }
  }
  if (scored.size() > 1) {
    std::vector<Mobius> centers;
    for (const Mobius& a : scored) {
      for (const Mobius& b : scored) {
        const Mobius ab = a.inverse() * b;
        if (classify(ab) != MobiusKind::Hyperbolic) continue;
        for (double t : {0.25, 0.5}) centers.push_back(a * hyperbolic_power(ab, t));
      }
      centers.push_back(a);
    }
    for (const Mobius& h : centers) {
      for (int r = 0; r < 8; ++r) {
        try {
          consider(elliptic_about(H2Point(0, 1), kTwoPi * r / 16) * h);
        } catch (const GeometryError&) {
        }
      }
    }
  }
  if (!focus) candidates.push_back(separating_plane(f));
  if (candidates.empty()) throw GeometryError(ErrorCode::SeparationFailed, "no chart avoids the graph over the arc");
  std::vector<double> spread(candidates.size(), -1.0);
  auto spread_of = [&](std::size_t i) {
    if (spread[i] < 0) spread[i] = focus ? chart_spread(f, candidates[i], probes) : chart_spread(f, candidates[i]);
    return spread[i];
  };
  double cap = std::numeric_limits<double>::infinity();
  if (std::isfinite(spread_slack)) {
    cap = spread_of(0);
    for (std::size_t i = 1; i < candidates.size(); ++i) cap = std::min(cap, spread_of(i));
    cap *= spread_slack;
  }
  std::size_t best = 0;
  double best_cond = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (std::isfinite(cap) && spread_of(i) > cap) continue;
    const double c = scored.size() > 1 ? chart_conditioning(scored, candidates[i]) : 0.0;
    if (c > best_cond || (c == best_cond && spread_of(i) < spread_of(best))) {
      best_cond = c;
      best = i;
    }
  }
  return candidates[best];
}

/// Hull of the given graph points in the chart at gamma0, merged.
inline HullComplex hull_in_chart(const std::vector<AdSBoundaryPoint>& src, const Mobius& gamma0) {
  std::vector<Vec3> pts;
  pts.reserve(src.size());
  for (const AdSBoundaryPoint& p : src) pts.push_back(chart_embed(gamma0, p).vec());
  HullComplex hc = merge_coplanar(convex_hull_3d(pts));
  hc.sources = src;
  hc.gamma0 = gamma0;
  return hc;
}

/// Hull of sampled graph(f) in the chart of chart_plane(f), retried in the chart of smallest
/// spread when that hull is flat. Throws DegenerateFlat when f is a single Mobius map.
inline HullComplex graph_hull(const CircleMap& f, int samples, double phase = 0.0) {
  const std::vector<AdSBoundaryPoint> src = sample_graph(f, samples, true, phase);
  try {
    return hull_in_chart(src, chart_plane(f));
  } catch (const GeometryError& e) {
    if (e.code() != ErrorCode::DegenerateFlat || f.is_mobius()) throw;
  }
  return hull_in_chart(src, chart_plane(f, 12, nullptr, 1.0));
}

/// Hull of the sampled graph of f over a closed arc, in a chart tuned to the pieces there.
inline HullComplex arc_hull(const CircleMap& f, const CircleArc& arc, int samples, double phase = 0.0) {
  std::vector<AdSBoundaryPoint> src;
  for (const AdSBoundaryPoint& p : sample_graph(f, samples, true, phase)) {
    if (arc.contains(p.x)) src.push_back(p);
  }
  return hull_in_chart(src, chart_plane(f, 12, &arc));
}

/// Barycenter of the hull vertices in chart coordinates.
inline Vec3 hull_centroid(const HullComplex& hc) {
  Vec3 acc{0, 0, 0};
  const auto verts = hc.vertex_indices();
  for (std::size_t v : verts) acc = acc + hc.points[v];
  return acc * (1.0 / verts.size());
}

struct FaceClassification {
  std::vector<std::size_t> future, past, lightlike;
};

inline AdSPlane face_plane(const HullComplex& hc, std::size_t f) {
  return plane_from_affine(hc.gamma0, hc.faces[f].normal, hc.faces[f].offset);
}

/// Time side of the chart point x relative to a spacelike face plane. In the chart lift the
/// functional <., gamma> is continuous, and the time flow X -> exp(tU) X crosses the plane at
/// the face barycenter c in the direction of U c.
inline TimeSide chart_side(const HullComplex& hc, const AdSPlane& plane, const Vec3& c, const Vec3& x) {
  const ChartCoords cc{hc.gamma0, c[0], c[1], c[2]};
  if (!(cc.det() > 0)) throw GeometryError(ErrorCode::UnclassifiableFace, "face barycenter is outside AdS^3");
  const Mat2 g = plane.matrix();
  const double flow = bilinear(kBasisU * chart_extract(cc), g);
  const double here = bilinear(chart_extract({hc.gamma0, x[0], x[1], x[2]}), g);
  if (here == 0 || flow == 0) return TimeSide::On;
  return (here > 0) == (flow > 0) ? TimeSide::Future : TimeSide::Past;
}

/// Future faces carry future support planes: the hull lies in their past.
inline FaceClassification classify_faces(const HullComplex& hc) {
  FaceClassification out;
  const Vec3 inside = hull_centroid(hc);
  for (std::size_t f = 0; f < hc.faces.size(); ++f) {
    const AdSPlane plane = face_plane(hc, f);
    const Mat2 local = hc.gamma0.inverse().matrix() * plane.matrix();
    const double det = local.det() / (local.norm() * local.norm());
    if (det <= kLightlikeBand && det >= -kTimelikeNoise) {
      out.lightlike.push_back(f);
      continue;
    }
    if (det < 0) throw GeometryError(ErrorCode::UnclassifiableFace, "face " + std::to_string(f) + " is timelike");
    Vec3 c{0, 0, 0};
    for (std::size_t v : hc.faces[f].cycle) c = c + hc.points[v];
    c = c * (1.0 / hc.faces[f].cycle.size());
    const TimeSide s = chart_side(hc, plane, c, inside);
    if (s == TimeSide::On) throw GeometryError(ErrorCode::UnclassifiableFace, "face " + std::to_string(f) + " has no side");
    (s == TimeSide::Past ? out.future : out.past).push_back(f);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Pleated surfaces

struct PleatedFace {
  Mobius dual;
  std::vector<AdSBoundaryPoint> vertices;  // cyclic, from the hull face
  std::size_t hull_face = 0;  // index in the hull it came from; kNoHullFace after refinement
};

inline constexpr std::size_t kNoHullFace = static_cast<std::size_t>(-1);

struct Ridge {
  std::size_t face_a = 0, face_b = 0;  // indices into PleatedSurface::faces
  AdSBoundaryPoint p, q;
};

struct PleatedSurface {
  TimeSide side = TimeSide::Past;
  std::vector<PleatedFace> faces;
  std::vector<Ridge> ridges;
};

/// Plane through the given ideal points in the least-squares sense: the right singular vector
/// of the incidence rows bilinear(encode(p), .) = 0 for the smallest singular value. Returns
/// the fallback when the fit is not spacelike or leaves a residual above kSnapTol.
inline Mobius refit_dual(const std::vector<AdSBoundaryPoint>& pts, const Mobius& fallback) {
  if (pts.size() < 3) return fallback;
  Eigen::MatrixXd rows(static_cast<Eigen::Index>(pts.size()), 4);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const Mat2 x = boundary_encode(pts[i]);
    Eigen::Vector4d r(x.d, -x.c, -x.b, x.a);
    rows.row(static_cast<Eigen::Index>(i)) = r.normalized().transpose();
  }
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(rows, Eigen::ComputeFullV);
  const Eigen::Vector4d v = svd.matrixV().col(3);
  const Mat2 g{v[0], v[1], v[2], v[3]};
  if (plane_kind(g) != PlaneKind::Spacelike) return fallback;
  const Mobius dual = AdSPlane(g).dual();
  for (const AdSBoundaryPoint& p : pts) {
    if (std::fabs(bilinear(boundary_encode(p), dual.matrix())) > kSnapTol) return fallback;
  }
  return dual;
}

/// Boundary component on one time side. Ridge points within 1e-6 of a breakpoint of f
/// (when given) are snapped to it.
inline PleatedSurface extract_pleated(const HullComplex& hc, const FaceClassification& fc, TimeSide side,
                                      const CircleMap* f = nullptr) {
  if (side == TimeSide::On) throw GeometryError(ErrorCode::InvalidInput, "side must be past or future");
  const auto& chosen = side == TimeSide::Past ? fc.past : fc.future;
  PleatedSurface ps;
  ps.side = side;
  std::map<std::size_t, std::size_t> index_of;
  for (std::size_t f_idx : chosen) {
    index_of[f_idx] = ps.faces.size();
    PleatedFace face;
    face.hull_face = f_idx;
    for (std::size_t v : hc.faces[f_idx].cycle) face.vertices.push_back(hc.sources.at(v));
    face.dual = refit_dual(face.vertices, face_plane(hc, f_idx).dual());
    ps.faces.push_back(std::move(face));
  }
  auto snap = [&](AdSBoundaryPoint p) {
    if (!f) return p;
    for (const RP1Point& b : f->breakpoints()) {
      if (circle_distance(b, p.x) <= kSnapTol) return AdSBoundaryPoint{b, f->eval(b)};
    }
    return p;
  };
  for (const HullEdge& e : hc.adjacency) {
    const auto a = index_of.find(e.face_a), b = index_of.find(e.face_b);
    if (a == index_of.end() || b == index_of.end()) continue;
    ps.ridges.push_back({a->second, b->second, snap(hc.sources.at(e.v0)), snap(hc.sources.at(e.v1))});
  }
  return ps;
}

namespace detail {

inline bool at_breakpoint(const CircleMap& f, const RP1Point& x) {
  return std::any_of(f.breakpoints().begin(), f.breakpoints().end(),
                     [&](const RP1Point& b) { return circle_distance(b, x) <= 1e-12; });
}

inline bool face_within(const PleatedFace& face, const CircleArc& arc) {
  return std::all_of(face.vertices.begin(), face.vertices.end(),
                     [&](const AdSBoundaryPoint& v) { return arc.contains(v.x); });
}

/// Same-side surface of the hull of graph(f) over the arc. The arc is first spread over three
/// quarters of the circle by alpha and the piece at its middle is undone by beta; the hull of
/// beta o f o alpha is mapped back by (x, y) -> (alpha x, f(alpha x)).
inline PleatedSurface arc_surface(const CircleMap& f, const CircleArc& arc, TimeSide side, int samples,
                                  double phase) {
  const double span = ccw_offset(arc.from, arc.to);
  const RP1Point mid = RP1Point::from_angle(arc.from.angle() + span / 2);
  const bool single_piece = std::none_of(f.breakpoints().begin(), f.breakpoints().end(), [&](const RP1Point& b) {
    return arc.contains(b) && circle_distance(b, arc.from) > 1e-12 && circle_distance(b, arc.to) > 1e-12;
  });
  if (single_piece) {
    PleatedFace face;
    for (const AdSBoundaryPoint& p : sample_graph(f, samples, true, phase)) {
      if (arc.contains(p.x)) face.vertices.push_back(p);
    }
    std::stable_sort(face.vertices.begin(), face.vertices.end(),
                     [&](const AdSBoundaryPoint& a, const AdSBoundaryPoint& b) {
                       return ccw_offset(arc.from, a.x) < ccw_offset(arc.from, b.x);
                     });
    face.dual = f.pieces()[f.arc_of(mid)].inverse();
    face.hull_face = kNoHullFace;
    PleatedSurface one;
    one.side = side;
    one.faces.push_back(std::move(face));
    return one;
  }
  const Mobius alpha = mobius_from_triples({RP1Point::from_angle(kTwoPi / 8), RP1Point::from_angle(kTwoPi / 2),
                                            RP1Point::from_angle(7 * kTwoPi / 8)},
                                           {arc.from, mid, arc.to});
  const Mobius beta = (f.pieces()[f.arc_of(mid)] * alpha).inverse();
  const CircleMap g = compose(CircleMap(beta), compose(f, CircleMap(alpha)));
  const CircleArc local{RP1Point::from_angle(kTwoPi / 8), RP1Point::from_angle(7 * kTwoPi / 8)};
  const HullComplex hc = arc_hull(g, local, samples, phase);
  PleatedSurface sub = extract_pleated(hc, classify_faces(hc), side, &g);
  auto back = [&](const AdSBoundaryPoint& p) {
    const RP1Point x = alpha.apply(p.x);
    for (const RP1Point& b : f.breakpoints()) {
      if (circle_distance(b, x) <= 1e-9) return AdSBoundaryPoint{b, f.eval(b)};
    }
    return AdSBoundaryPoint{x, f.eval(x)};
  };
  for (PleatedFace& face : sub.faces) {
    for (AdSBoundaryPoint& v : face.vertices) v = back(v);
    face.dual = refit_dual(face.vertices, alpha * face.dual * beta);
    face.hull_face = kNoHullFace;
  }
  for (Ridge& r : sub.ridges) {
    r.p = back(r.p);
    r.q = back(r.q);
  }
  return sub;
}

/// Replaces the faces of ps over the arc by the same-side surface of the arc's own hull.
/// Returns false when the arc hull does not reproduce the bounding ridge.
inline bool splice_arc(PleatedSurface& ps, const CircleMap& f, const CircleArc& arc, int samples, double phase) {
  PleatedSurface sub;
  try {
    sub = arc_surface(f, arc, ps.side, samples, phase);
  } catch (const GeometryError&) {
    return false;
  }
  std::vector<std::size_t> remap(ps.faces.size(), kNoHullFace);
  PleatedSurface out;
  out.side = ps.side;
  for (std::size_t i = 0; i < ps.faces.size(); ++i) {
    if (face_within(ps.faces[i], arc)) continue;
    remap[i] = out.faces.size();
    out.faces.push_back(ps.faces[i]);
  }
  const std::size_t base = out.faces.size();
  for (PleatedFace& face : sub.faces) out.faces.push_back(std::move(face));
  for (const Ridge& r : sub.ridges) out.ridges.push_back({base + r.face_a, base + r.face_b, r.p, r.q});
  auto has_vertex = [](const PleatedFace& face, const RP1Point& x) {
    return std::any_of(face.vertices.begin(), face.vertices.end(),
                       [&](const AdSBoundaryPoint& v) { return circle_distance(v.x, x) <= 1e-12; });
  };
  for (const Ridge& r : ps.ridges) {
    const std::size_t a = remap[r.face_a], b = remap[r.face_b];
    if (a != kNoHullFace && b != kNoHullFace) {
      out.ridges.push_back({a, b, r.p, r.q});
      continue;
    }
    if (a == kNoHullFace && b == kNoHullFace) continue;
    std::size_t inner = kNoHullFace;
    for (std::size_t j = base; j < out.faces.size(); ++j) {
      if (has_vertex(out.faces[j], r.p.x) && has_vertex(out.faces[j], r.q.x)) inner = j;
    }
    if (inner == kNoHullFace) return false;
    out.ridges.push_back({a != kNoHullFace ? a : inner, a != kNoHullFace ? inner : b, r.p, r.q});
  }
  ps = std::move(out);
  return true;
}

/// Merges faces joined by a ridge whose comparison is not clearly hyperbolic: adjacent support
/// planes meet in a spacelike geodesic, so such a ridge separates two copies of one plane.
inline void fuse_flat_ridges(PleatedSurface& ps) {
  for (;;) {
    auto it = std::find_if(ps.ridges.begin(), ps.ridges.end(), [&](const Ridge& r) {
      const Mobius c = ps.faces[r.face_a].dual.inverse() * ps.faces[r.face_b].dual;
      return classify(c) != MobiusKind::Hyperbolic || std::fabs(c.matrix().trace()) - 2 < kFlatRidgeMargin;
    });
    if (it == ps.ridges.end()) return;
    const std::size_t keep = std::min(it->face_a, it->face_b), drop = std::max(it->face_a, it->face_b);
    std::vector<AdSBoundaryPoint> verts = ps.faces[keep].vertices;
    for (const AdSBoundaryPoint& v : ps.faces[drop].vertices) {
      const bool dup = std::any_of(verts.begin(), verts.end(),
                                   [&](const AdSBoundaryPoint& w) { return circle_distance(v.x, w.x) <= 1e-12; });
      if (!dup) verts.push_back(v);
    }
    const RP1Point origin = verts.front().x;
    std::stable_sort(verts.begin(), verts.end(), [&](const AdSBoundaryPoint& a, const AdSBoundaryPoint& b) {
      return ccw_offset(origin, a.x) < ccw_offset(origin, b.x);
    });
    ps.faces[keep].dual = refit_dual(verts, ps.faces[keep].dual);
    ps.faces[keep].vertices = std::move(verts);
    ps.faces[keep].hull_face = kNoHullFace;
    ps.faces.erase(ps.faces.begin() + static_cast<std::ptrdiff_t>(drop));
    std::vector<Ridge> ridges;
    for (Ridge r : ps.ridges) {
      if (r.face_a == drop) r.face_a = keep;
      if (r.face_b == drop) r.face_b = keep;
      if (r.face_a == r.face_b) continue;
      if (r.face_a > drop) --r.face_a;
      if (r.face_b > drop) --r.face_b;
      ridges.push_back(r);
    }
    ps.ridges = std::move(ridges);
  }
}

/// Chords (a, b) between breakpoints where the pieces meeting at a differ by a translation
/// along (a, b) to the given side, and the same holds at b. For a finite earthquake these are
/// the leaves with no other leaf sharing an endpoint.
inline std::vector<CircleArc> comparison_chords(const CircleMap& f, Side side, double tol = 1e-7) {
  const std::vector<RP1Point>& bps = f.breakpoints();
  const std::size_t n = bps.size();
  std::vector<std::size_t> partner(n, kNoHullFace);
  for (std::size_t k = 0; k < n; ++k) {
    const Mobius c = f.pieces()[(k + n - 1) % n].inverse() * f.pieces()[k];
    if (classify(c) != MobiusKind::Hyperbolic) continue;
    const HyperbolicFixedPoints fp = hyperbolic_fixed_points(c);
    const RP1Point other =
        circle_distance(fp.repelling, bps[k]) < circle_distance(fp.attracting, bps[k]) ? fp.attracting : fp.repelling;
    for (std::size_t j = 0; j < n; ++j) {
      if (j != k && circle_distance(bps[j], other) <= tol) partner[k] = j;
    }
  }
  std::vector<CircleArc> out;
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t j = partner[k];
    if (j == kNoHullFace || j < k || partner[j] != k) continue;
    const Mobius c = f.pieces()[(k + n - 1) % n].inverse() * f.pieces()[k];
    if (translate_side(c, ccw_midpoint(bps[j], bps[k]), ccw_midpoint(bps[k], bps[j])) == side)
      out.push_back({bps[k], bps[j]});
  }
  return out;
}

/// Builds the surface from the chords alone: the gap touching the middle of the longest
/// breakpoint arc is one face, and each maximal chord closes off an arc whose surface comes
/// from its own hull.
inline std::optional<PleatedSurface> rebuild_from_chords(const CircleMap& f, TimeSide side, int samples,
                                                         double phase) {
  const std::vector<CircleArc> chords = comparison_chords(f, side == TimeSide::Past ? Side::Left : Side::Right);
  if (chords.empty()) return std::nullopt;
  const std::vector<RP1Point>& bps = f.breakpoints();
  std::size_t widest = 0;
  for (std::size_t k = 0; k < bps.size(); ++k) {
    if (ccw_offset(bps[k], bps[(k + 1) % bps.size()]) > ccw_offset(bps[widest], bps[(widest + 1) % bps.size()]))
      widest = k;
  }
  const RP1Point x0 = RP1Point::from_angle(
      bps[widest].angle() + ccw_offset(bps[widest], bps[(widest + 1) % bps.size()]) / 2);

  std::vector<CircleArc> arcs;
  for (const CircleArc& c : chords) arcs.push_back(c.contains(x0) ? CircleArc{c.to, c.from} : c);
  std::vector<CircleArc> maximal;
  for (const CircleArc& a : arcs) {
    const bool nested = std::any_of(arcs.begin(), arcs.end(), [&](const CircleArc& b) {
      return ccw_offset(b.from, b.to) > ccw_offset(a.from, a.to) && b.contains(a.from) && b.contains(a.to);
    });
    if (!nested) maximal.push_back(a);
  }

  auto endpoint = [](const CircleArc& a, const RP1Point& x) {
    return circle_distance(a.from, x) <= 1e-12 || circle_distance(a.to, x) <= 1e-12;
  };
  PleatedFace outer;
  for (const AdSBoundaryPoint& p : sample_graph(f, samples, true, phase)) {
    const bool inside = std::any_of(maximal.begin(), maximal.end(),
                                    [&](const CircleArc& a) { return a.contains(p.x) && !endpoint(a, p.x); });
    if (!inside) outer.vertices.push_back(p);
  }
  std::stable_sort(outer.vertices.begin(), outer.vertices.end(), [&](const AdSBoundaryPoint& a, const AdSBoundaryPoint& b) {
    return ccw_offset(x0, a.x) < ccw_offset(x0, b.x);
  });
  outer.dual = refit_dual(outer.vertices, f.pieces()[f.arc_of(x0)].inverse());
  outer.hull_face = kNoHullFace;

  PleatedSurface ps;
  ps.side = side;
  ps.faces.push_back(std::move(outer));
  for (const CircleArc& arc : maximal) {
    PleatedSurface sub;
    try {
      sub = arc_surface(f, arc, side, samples, phase);
    } catch (const GeometryError&) {
      return std::nullopt;
    }
    const std::size_t base = ps.faces.size();
    std::size_t inner = kNoHullFace;
    for (std::size_t j = 0; j < sub.faces.size(); ++j) {
      const auto& vs = sub.faces[j].vertices;
      auto has = [&](const RP1Point& x) {
        return std::any_of(vs.begin(), vs.end(), [&](const AdSBoundaryPoint& v) { return circle_distance(v.x, x) <= 1e-12; });
      };
      if (has(arc.from) && has(arc.to)) inner = base + j;
    }
    if (inner == kNoHullFace) return std::nullopt;
    for (PleatedFace& face : sub.faces) ps.faces.push_back(std::move(face));
    for (const Ridge& r : sub.ridges) ps.ridges.push_back({base + r.face_a, base + r.face_b, r.p, r.q});
    ps.ridges.push_back({0, inner, {arc.from, f.eval(arc.from)}, {arc.to, f.eval(arc.to)}});
  }
  return ps;
}

struct Diagnosis {
  std::vector<const Ridge*> trusted;  // both ends on breakpoints
  std::vector<std::vector<RP1Point>> suspects;
};

/// Ridges with an end off the breakpoints, faces whose vertices miss their plane, and
/// breakpoints on no ridge.
inline Diagnosis diagnose(const PleatedSurface& ps, const CircleMap& f) {
  Diagnosis d;
  for (const Ridge& r : ps.ridges) {
    if (at_breakpoint(f, r.p.x) && at_breakpoint(f, r.q.x)) {
      d.trusted.push_back(&r);
    } else {
      d.suspects.push_back({r.p.x, r.q.x});
    }
  }
  for (const PleatedFace& face : ps.faces) {
    const bool loose = std::any_of(face.vertices.begin(), face.vertices.end(), [&](const AdSBoundaryPoint& v) {
      return std::fabs(bilinear(boundary_encode(v), face.dual.matrix())) > kLooseFaceTol;
    });
    if (!loose) continue;
    std::vector<RP1Point> xs;
    for (const AdSBoundaryPoint& v : face.vertices) xs.push_back(v.x);
    d.suspects.push_back(std::move(xs));
  }
  for (const RP1Point& b : f.breakpoints()) {
    const bool used = std::any_of(ps.ridges.begin(), ps.ridges.end(), [&](const Ridge& r) {
      return circle_distance(r.p.x, b) <= 1e-12 || circle_distance(r.q.x, b) <= 1e-12;
    });
    if (!used) d.suspects.push_back({b});
  }
  return d;
}

}  // namespace detail

/// Local refinement for piecewise Mobius maps. A ridge with an end off the breakpoints of f,
/// a face whose vertices miss its plane by more than kLooseFaceTol, or a breakpoint on no
/// ridge marks a region the global chart could not resolve. The smallest enclosing ridge with
/// both ends on breakpoints bounds an arc whose hull is recomputed in its own chart. Before the
/// first such pass the surface rebuilt from the comparison chords of f is tried, and kept when
/// it leaves fewer suspects.
inline PleatedSurface refine_pleated(PleatedSurface ps, const CircleMap& f, int samples, double phase = 0.0,
                                     int rounds = 4) {
  bool rebuilt = false;
  for (int round = 0; round < rounds; ++round) {
    detail::fuse_flat_ridges(ps);
    auto [trusted, suspects] = detail::diagnose(ps, f);
    if (suspects.empty()) return ps;
    if (!rebuilt) {
      rebuilt = true;
      if (auto whole = detail::rebuild_from_chords(f, ps.side, samples, phase)) {
        detail::fuse_flat_ridges(*whole);
        if (detail::diagnose(*whole, f).suspects.size() < suspects.size()) {
          ps = std::move(*whole);
          continue;
        }
      }
    }
    std::vector<CircleArc> regions;
    for (const auto& xs : suspects) {
      std::optional<CircleArc> best;
      for (const Ridge* t : trusted) {
        for (const CircleArc arc : {CircleArc{t->p.x, t->q.x}, CircleArc{t->q.x, t->p.x}}) {
          if (!std::all_of(xs.begin(), xs.end(), [&](const RP1Point& x) { return arc.contains(x); })) continue;
          if (!best || ccw_offset(arc.from, arc.to) < ccw_offset(best->from, best->to)) best = arc;
        }
      }
      if (best) regions.push_back(*best);
    }
    std::vector<CircleArc> outer;
    for (std::size_t i = 0; i < regions.size(); ++i) {
      const CircleArc& a = regions[i];
      bool nested = false;
      for (std::size_t j = 0; j < regions.size(); ++j) {
        const CircleArc& b = regions[j];
        const double la = ccw_offset(a.from, a.to), lb = ccw_offset(b.from, b.to);
        if (b.contains(a.from) && b.contains(a.to) && (lb > la || (lb == la && j < i))) nested = true;
      }
      if (!nested) outer.push_back(a);
    }
    if (outer.empty()) return ps;
    for (const CircleArc& arc : outer) {
      if (!detail::splice_arc(ps, f, arc, samples, phase)) break;
    }
  }
  detail::fuse_flat_ridges(ps);
  return ps;
}

}  // namespace quake
