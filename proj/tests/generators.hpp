#pragma once

#include <algorithm>
#include <limits>
#include <optional>
#include <vector>

#include "quake/circlemap.hpp"
#include "support.hpp"

namespace quake::testing {

/// k pairwise disjoint geodesics: a random non-crossing matching of 2k sorted angles.
inline std::vector<Geodesic> random_leaves(Rng& rng, int k, double min_gap = 0.02) {
  for (;;) {
    std::vector<double> angles;
    for (int i = 0; i < 2 * k; ++i) angles.push_back(rng.uniform(0, kTwoPi));
    std::sort(angles.begin(), angles.end());
    bool spaced = true;
    for (int i = 0; i < 2 * k; ++i) {
      const double next = i + 1 < 2 * k ? angles[i + 1] : angles[0] + kTwoPi;
      spaced = spaced && next - angles[i] > min_gap;
    }
    if (!spaced) continue;
    std::vector<Geodesic> leaves;
    std::vector<int> stack;
    int open_left = k;
    for (int i = 0; i < 2 * k; ++i) {
      const bool can_close = !stack.empty();
      const bool must_close = open_left == 0;
      if (must_close || (can_close && rng.uniform(0, 1) < 0.5)) {
        leaves.emplace_back(RP1Point::from_angle(angles[stack.back()]), RP1Point::from_angle(angles[i]));
        stack.pop_back();
      } else {
        stack.push_back(i);
        --open_left;
      }
    }
    return leaves;
  }
}

inline LaminationSpec random_spec(Rng& rng, int k, std::optional<Side> side = std::nullopt) {
  LaminationSpec spec;
  spec.leaves = random_leaves(rng, k);
  for (int i = 0; i < k; ++i) spec.weights.push_back(rng.uniform(0.1, 2.0));
  spec.base = static_cast<std::size_t>(rng.integer(0, k));
  spec.side = side ? *side : (rng.uniform(0, 1) < 0.5 ? Side::Left : Side::Right);
  return spec;
}

/// beta o f o alpha for a random finite-earthquake boundary f with 1..max_leaves leaves.
inline CircleMap random_circle_map(Rng& rng, int max_leaves = 6) {
  const LaminationSpec spec = random_spec(rng, rng.integer(1, max_leaves));
  const CircleMap f = finite_earthquake_boundary(spec).boundary;
  return compose(CircleMap(rng.mobius()), compose(f, CircleMap(rng.mobius())));
}

/// Hausdorff distance between leaf sets, each leaf an unordered endpoint pair in the circle metric.
inline double leaf_hausdorff(const std::vector<Geodesic>& a, const std::vector<Geodesic>& b) {
  auto d = [](const Geodesic& x, const Geodesic& y) {
    return std::min(std::max(circle_distance(x.first(), y.first()), circle_distance(x.second(), y.second())),
                    std::max(circle_distance(x.first(), y.second()), circle_distance(x.second(), y.first())));
  };
  auto one_way = [&](const std::vector<Geodesic>& p, const std::vector<Geodesic>& q) {
    double h = 0;
    for (const Geodesic& x : p) {
      double m = std::numeric_limits<double>::infinity();
      for (const Geodesic& y : q) m = std::min(m, d(x, y));
      h = std::max(h, m);
    }
    return h;
  };
  return std::max(one_way(a, b), one_way(b, a));
}

}  // namespace quake::testing
