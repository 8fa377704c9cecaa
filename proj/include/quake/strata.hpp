#pragma once

// Data model of a finite earthquake: a lamination, its complementary gaps with one
// isometry each, and the isometries chosen on the discontinuity leaves.

#include <cstddef>
#include <vector>

#include "quake/mobius.hpp"

namespace quake {

enum class StratumKind { Gap, Leaf };
enum class EdgeKind { Arc, Leaf };

/// An ideal polygon listed counterclockwise. edges[i] joins vertices[i] to vertices[i+1];
/// an Arc edge is a piece of the circle at infinity, a Leaf edge is a geodesic.
/// A gap with no vertices is the whole plane.
struct Stratum {
  StratumKind kind = StratumKind::Gap;
  std::vector<RP1Point> vertices;
  std::vector<EdgeKind> edges;
  Mobius isometry;
};

struct LeafChoice {
  std::size_t leaf_index = 0;
  double t = 0.5;
  Mobius isometry;
};

struct EarthquakeMap {
  Side side = Side::Left;
  std::vector<Geodesic> leaves;
  std::vector<Stratum> strata;  // gaps
  std::vector<LeafChoice> leaf_choices;

  /// Gaps followed by one two-vertex stratum per leaf choice.
  std::vector<Stratum> all_strata() const {
    std::vector<Stratum> out = strata;
    for (const LeafChoice& c : leaf_choices) {
      const Geodesic& g = leaves.at(c.leaf_index);
      out.push_back({StratumKind::Leaf, {g.first(), g.second()}, {EdgeKind::Leaf, EdgeKind::Leaf}, c.isometry});
    }
    return out;
  }
};

/// E|_i^{-1} o E|_j. The product is accumulated in extended precision: stratum isometries
/// can be large while their comparison is not, and the cancellation moves its axis.
inline Mobius comparison(const std::vector<Stratum>& strata, std::size_t i, std::size_t j) {
  using L = long double;
  const Mat2 a = strata.at(i).isometry.matrix().adj();
  const Mat2& b = strata.at(j).isometry.matrix();
  auto dot = [](double x, double y, double z, double w) {
    return static_cast<double>(static_cast<L>(x) * y + static_cast<L>(z) * w);
  };
  return Mobius(Mat2{dot(a.a, b.a, a.b, b.c), dot(a.a, b.b, a.b, b.d), dot(a.c, b.a, a.d, b.c),
                     dot(a.c, b.b, a.d, b.d)});
}
inline Mobius comparison(const EarthquakeMap& e, std::size_t i, std::size_t j) {
  return comparison(e.strata, i, j);
}

}  // namespace quake
