#pragma once

// JSON schemas for circle maps, laminations and earthquakes.
//
// An ideal point is written as its homogeneous pair [u, v]; on input a plain number or the
// string "inf" is also accepted. Matrices are row-major [[a, b], [c, d]].

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "quake/circlemap.hpp"
#include "quake/earthquake.hpp"
#include "quake/error.hpp"
#include "quake/strata.hpp"

namespace quake::io {

using nlohmann::json;

namespace detail {

[[noreturn]] inline void bad(const std::string& what) { throw GeometryError(ErrorCode::InvalidInput, what); }

inline double number(const json& j, const char* what) {
  if (!j.is_number()) bad(std::string(what) + " must be a number");
  const double x = j.get<double>();
  if (!std::isfinite(x)) bad(std::string(what) + " must be finite");
  return x;
}

inline const json& field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) bad(std::string("missing field '") + key + "'");
  return j.at(key);
}

inline const json& array(const json& j, const char* what) {
  if (!j.is_array()) bad(std::string(what) + " must be an array");
  return j;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Primitives

inline json to_json(const RP1Point& p) { return json::array({p.u(), p.v()}); }

inline RP1Point point_from_json(const json& j) {
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "inf" || s == "infinity") return RP1Point::infinity();
    detail::bad("unknown ideal point '" + s + "'");
  }
  if (j.is_number()) return RP1Point::real(detail::number(j, "ideal point"));
  if (!j.is_array() || j.size() != 2) detail::bad("ideal point must be [u, v], a number or \"inf\"");
  return RP1Point::homogeneous(detail::number(j[0], "u"), detail::number(j[1], "v"));
}

inline json to_json(const Mat2& m) { return json::array({json::array({m.a, m.b}), json::array({m.c, m.d})}); }

inline Mat2 matrix_from_json(const json& j) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_array() || !j[1].is_array() || j[0].size() != 2 || j[1].size() != 2)
    detail::bad("matrix must be [[a, b], [c, d]]");
  return {detail::number(j[0][0], "a"), detail::number(j[0][1], "b"), detail::number(j[1][0], "c"),
          detail::number(j[1][1], "d")};
}

inline Side side_from_json(const json& j) {
  if (j == "left") return Side::Left;
  if (j == "right") return Side::Right;
  detail::bad("side must be \"left\" or \"right\"");
}

// ---------------------------------------------------------------------------
// Circle maps

inline json to_json(const CircleMap& f) {
  json bps = json::array(), pieces = json::array();
  for (const RP1Point& b : f.breakpoints()) bps.push_back(to_json(b));
  for (const Mobius& m : f.pieces()) pieces.push_back(to_json(m.matrix()));
  return {{"breakpoints", bps}, {"pieces", pieces}};
}

inline CircleMap circle_map_from_json(const json& j) {
  CircleMapData d;
  for (const json& b : detail::array(detail::field(j, "breakpoints"), "breakpoints")) d.breakpoints.push_back(point_from_json(b));
  for (const json& m : detail::array(detail::field(j, "pieces"), "pieces")) d.pieces.push_back(matrix_from_json(m));
  if (d.breakpoints.empty() && d.pieces.size() == 1) return CircleMap(Mobius(d.pieces[0]));
  return CircleMap::from_data(d);
}

// ---------------------------------------------------------------------------
// Laminations

inline json to_json(const Geodesic& g) { return json::array({to_json(g.first()), to_json(g.second())}); }

inline Geodesic geodesic_from_json(const json& j) {
  if (!j.is_array() || j.size() != 2) detail::bad("leaf must be a pair of ideal points");
  return Geodesic(point_from_json(j[0]), point_from_json(j[1]));
}

inline json to_json(const LaminationSpec& s) {
  json leaves = json::array();
  for (const Geodesic& g : s.leaves) leaves.push_back(to_json(g));
  return {{"leaves", leaves}, {"weights", s.weights}, {"base", s.base}, {"side", to_string(s.side)}};
}

inline LaminationSpec lamination_from_json(const json& j) {
  LaminationSpec s;
  for (const json& g : detail::array(detail::field(j, "leaves"), "leaves")) s.leaves.push_back(geodesic_from_json(g));
  if (j.contains("weights")) {
    for (const json& w : detail::array(j.at("weights"), "weights")) s.weights.push_back(detail::number(w, "weight"));
  }
  if (j.contains("base")) {
    if (!j.at("base").is_number_unsigned()) detail::bad("base must be a gap index");
    s.base = j.at("base").get<std::size_t>();
  }
  if (j.contains("side")) s.side = side_from_json(j.at("side"));
  return s;
}

// ---------------------------------------------------------------------------
// Earthquakes

inline json to_json(const EarthquakeMap& e) {
  json leaves = json::array(), strata = json::array(), choices = json::array();
  for (const Geodesic& g : e.leaves) leaves.push_back(to_json(g));
  for (const Stratum& s : e.strata) {
    json verts = json::array(), edges = json::array();
    for (const RP1Point& p : s.vertices) verts.push_back(to_json(p));
    for (EdgeKind k : s.edges) edges.push_back(k == EdgeKind::Leaf ? "leaf" : "arc");
    strata.push_back({{"ideal_vertices", verts}, {"edges", edges}, {"matrix", to_json(s.isometry.matrix())}});
  }
  for (const LeafChoice& c : e.leaf_choices)
    choices.push_back({{"leaf_index", c.leaf_index}, {"t", c.t}, {"matrix", to_json(c.isometry.matrix())}});
  return {{"side", to_string(e.side)}, {"leaves", leaves}, {"strata", strata}, {"leaf_choices", choices}};
}

/// Strata without an "edges" list get Leaf edges exactly where consecutive vertices span a
/// leaf; a two-vertex stratum takes the second edge as the leaf.
inline EarthquakeMap earthquake_from_json(const json& j) {
  EarthquakeMap e;
  e.side = side_from_json(detail::field(j, "side"));
  for (const json& g : detail::array(detail::field(j, "leaves"), "leaves")) e.leaves.push_back(geodesic_from_json(g));
  for (const json& js : detail::array(detail::field(j, "strata"), "strata")) {
    Stratum s;
    s.kind = StratumKind::Gap;
    for (const json& p : detail::array(detail::field(js, "ideal_vertices"), "ideal_vertices"))
      s.vertices.push_back(point_from_json(p));
    s.isometry = Mobius(matrix_from_json(detail::field(js, "matrix")));
    const std::size_t n = s.vertices.size();
    if (js.contains("edges")) {
      for (const json& k : detail::array(js.at("edges"), "edges")) {
        if (k == "leaf") {
          s.edges.push_back(EdgeKind::Leaf);
        } else if (k == "arc") {
          s.edges.push_back(EdgeKind::Arc);
        } else {
          detail::bad("edge kind must be \"arc\" or \"leaf\"");
        }
      }
      if (s.edges.size() != n) detail::bad("one edge kind per ideal vertex is required");
    } else {
      for (std::size_t i = 0; i < n; ++i) {
        const RP1Point& a = s.vertices[i];
        const RP1Point& b = s.vertices[(i + 1) % n];
        const bool leaf = n >= 2 && circle_distance(a, b) > kDistinctTol &&
                          std::any_of(e.leaves.begin(), e.leaves.end(),
                                      [&](const Geodesic& g) { return g.same_as(Geodesic(a, b), 1e-12); });
        // Two vertices: the counterclockwise arc from the first one is on the circle.
        s.edges.push_back(leaf && !(n == 2 && i == 0) ? EdgeKind::Leaf : EdgeKind::Arc);
      }
    }
    e.strata.push_back(std::move(s));
  }
  if (j.contains("leaf_choices")) {
    for (const json& jc : detail::array(j.at("leaf_choices"), "leaf_choices")) {
      LeafChoice c;
      if (!detail::field(jc, "leaf_index").is_number_unsigned()) detail::bad("leaf_index must be an index");
      c.leaf_index = jc.at("leaf_index").get<std::size_t>();
      if (c.leaf_index >= e.leaves.size()) detail::bad("leaf_index out of range");
      c.t = detail::number(detail::field(jc, "t"), "t");
      c.isometry = Mobius(matrix_from_json(detail::field(jc, "matrix")));
      e.leaf_choices.push_back(c);
    }
  }
  return e;
}

inline json to_json(const VerificationReport& r) {
  json failures = json::array();
  for (const PairRecord& p : r.failures) {
    failures.push_back({{"i", p.i},
                        {"j", p.j},
                        {"kind", to_string(p.kind)},
                        {"trace_margin", p.trace_margin},
                        {"separation_margin", p.separation_margin},
                        {"reason", p.reason}});
  }
  auto finite_or_null = [](double x) { return std::isfinite(x) ? json(x) : json(nullptr); };
  return {{"pass", r.pass},
          {"pairs", r.records.size()},
          {"worst_trace_margin", finite_or_null(r.worst_trace_margin)},
          {"worst_separation_margin", finite_or_null(r.worst_separation_margin)},
          {"boundary_error", r.boundary_error ? finite_or_null(*r.boundary_error) : json(nullptr)},
          {"failures", failures}};
}

// ---------------------------------------------------------------------------
// Files

inline json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) detail::bad("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    detail::bad(path + ": " + e.what());
  }
}

/// Two-space indentation and a trailing newline; object keys come out sorted.
inline std::string dump(const json& j) { return j.dump(2) + "\n"; }

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) detail::bad("cannot write " + path);
  out << text;
}

}  // namespace quake::io
