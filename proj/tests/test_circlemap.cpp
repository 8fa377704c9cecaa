#include <gtest/gtest.h>

#include "generators.hpp"
#include "quake/circlemap.hpp"

using namespace quake;
using quake::testing::Rng;

namespace {

const RP1Point kInf = RP1Point::infinity();
RP1Point R(double x) { return RP1Point::real(x); }

// Identity on the negative reals, z -> b z on the positive reals.
CircleMap simple_map(double b) {
  const double s = std::sqrt(b);
  return CircleMap::from_data({{R(0), kInf}, {{s, 0, 0, 1 / s}, Mat2::identity()}});
}

}  // namespace

TEST(CircleMap, EvalComposeInvert) {
  const CircleMap f = simple_map(4);
  EXPECT_NEAR(f.eval(R(1)).value(), 4.0, 1e-14);
  EXPECT_NEAR(f.eval(R(-3)).value(), -3.0, 1e-14);
  EXPECT_NEAR(f.inverse().eval(R(4)).value(), 1.0, 1e-14);
  const CircleMap id = compose(f, f.inverse());
  EXPECT_EQ(id.size(), 0u);
  EXPECT_TRUE(id.pieces()[0].is_identity());
}

TEST(CircleMap, ComposeMatchesPointwise) {
  Rng rng(31);
  for (int k = 0; k < 100; ++k) {
    const CircleMap f = quake::testing::random_circle_map(rng);
    const CircleMap g = quake::testing::random_circle_map(rng);
    const CircleMap fg = compose(f, g);
    EXPECT_TRUE(validate(fg.data(), 1e-8).ok) << validate(fg.data(), 1e-8).message;
    for (int i = 0; i < 50; ++i) {
      const RP1Point x = rng.ideal();
      EXPECT_LT(circle_distance(fg.eval(x), f.eval(g.eval(x))), 1e-9);
      EXPECT_LT(circle_distance(f.inverse().eval(f.eval(x)), x), 1e-9);
    }
  }
}

TEST(CircleMap, Validate) {
  EXPECT_TRUE(validate(simple_map(4).data()).ok);

  const ValidationReport jump = validate({{R(0), kInf}, {Mat2::identity(), {1, 1, 0, 1}}});
  EXPECT_FALSE(jump.ok);
  EXPECT_EQ(jump.location, 0);
  EXPECT_NE(jump.message.find("discontinuity"), std::string::npos);

  const ValidationReport flip = validate({{}, {{-1, 0, 0, 1}}});
  EXPECT_FALSE(flip.ok);
  EXPECT_NE(flip.message.find("orientation"), std::string::npos);

  const ValidationReport order = validate({{kInf, R(1), R(0)}, {Mat2::identity(), Mat2::identity(), Mat2::identity()}});
  EXPECT_FALSE(order.ok);

  const ValidationReport count = validate({{R(0), kInf}, {Mat2::identity()}});
  EXPECT_FALSE(count.ok);

  EXPECT_THROW(CircleMap::from_data({{R(0), kInf}, {Mat2::identity(), {1, 1, 0, 1}}}), GeometryError);
}

TEST(CircleMap, GeneratedMapsPreserveCyclicOrder) {
  Rng rng(32);
  for (int k = 0; k < 20; ++k) {
    const CircleMap f = quake::testing::random_circle_map(rng);
    EXPECT_TRUE(validate(f.data()).ok);
    for (int i = 0; i < 1000 / 20; ++i) {
      const RP1Point a = rng.ideal(), b = rng.ideal(), c = rng.ideal();
      if (circle_distance(a, b) < 1e-6 || circle_distance(b, c) < 1e-6 || circle_distance(a, c) < 1e-6) continue;
      EXPECT_EQ(triple_orientation(a, b, c), triple_orientation(f.eval(a), f.eval(b), f.eval(c)));
    }
  }
}

TEST(CircleMap, Normalize) {
  const Normalized same = normalize(simple_map(4));
  EXPECT_TRUE(same.alpha.is_identity());

  const Normalized shifted = normalize(CircleMap(Mobius(1, 1, 0, 1)));
  EXPECT_LT(circle_distance(shifted.map.eval(R(0)), R(0)), 1e-15);
  EXPECT_TRUE(shifted.map.eval(kInf).is_infinity());
  EXPECT_TRUE(normalize(shifted.map).alpha.is_identity(1e-12));

  Rng rng(33);
  for (int k = 0; k < 100; ++k) {
    const Normalized n = normalize(quake::testing::random_circle_map(rng));
    EXPECT_LT(circle_distance(n.map.eval(R(0)), R(0)), 1e-9);
    EXPECT_LT(circle_distance(n.map.eval(kInf), kInf), 1e-9);
    EXPECT_GT(n.map.eval(R(1)).value(), 0);
    EXPECT_TRUE(normalize(n.map).alpha.is_identity(1e-7));
  }
}

TEST(CircleMap, SeparatingPlane) {
  const Mobius ri(0, 1, -1, 0);
  EXPECT_TRUE(separating_plane(simple_map(4)).approx_equal(ri));
  EXPECT_TRUE(separating_plane(CircleMap(Mobius(2, 0, 0, 0.5))).approx_equal(ri));
  // Per-arc quadratic for z -> -1/x against the simple map has no real roots.
  EXPECT_TRUE(graph_crossings(simple_map(4), ri.inverse().matrix()).points.empty());

  const Mobius sigma = elliptic_about(H2Point(0.5, 2.0), 1.0);
  const Mobius g = separating_plane(CircleMap(sigma));
  EXPECT_TRUE(graph_crossings(CircleMap(sigma), g.inverse().matrix()).points.empty());

  Rng rng(34);
  for (int k = 0; k < 200; ++k) {
    const CircleMap f = quake::testing::random_circle_map(rng);
    const Mobius gamma = separating_plane(f);
    EXPECT_GT(graph_gap(f, gamma.inverse().matrix()), 0.0);
  }
}

// Counterclockwise step of an increasing map; a rounding step backwards reads as zero.
double forward_step(const RP1Point& a, const RP1Point& b) {
  const double t = ccw_offset(a, b);
  return t > kTwoPi - 1e-6 ? 0.0 : t;
}

TEST(CircleMap, CrossingsAgainstSampling) {
  // Both maps are increasing, so their lifts to R are sums of counterclockwise steps; every
  // transversal crossing is a level 2 pi k passed by the difference of the lifts.
  Rng rng(35);
  for (int k = 0; k < 50; ++k) {
    const CircleMap f = quake::testing::random_circle_map(rng);
    const Mobius n = rng.mobius();
    const Crossings c = graph_crossings(f, n.matrix());
    const int samples = 20000;
    RP1Point fp = f.eval(RP1Point::from_angle(0)), np = n.apply(RP1Point::from_angle(0));
    double lift_f = 0, lift_n = ccw_offset(fp, np);
    long levels = 0;
    for (int i = 1; i <= samples; ++i) {
      const RP1Point x = RP1Point::from_angle(kTwoPi * i / samples);
      const RP1Point fc = f.eval(x), nc = n.apply(x);
      const double before = lift_f - lift_n;
      lift_f += forward_step(fp, fc);
      lift_n += forward_step(np, nc);
      const double after = lift_f - lift_n;
      levels += std::labs(static_cast<long>(std::floor(after / kTwoPi)) - static_cast<long>(std::floor(before / kTwoPi)));
      fp = fc;
      np = nc;
    }
    EXPECT_EQ(static_cast<long>(c.points.size()), levels);
  }
}

TEST(CircleMap, SeparatingPlaneThrough) {
  const Mobius gamma = separating_plane_through(CircleMap(Mobius(2, 0, 0, 0.5)), R(1), R(-1));
  EXPECT_NEAR(bilinear(boundary_encode(R(1), R(-1)), gamma.matrix()), 0.0, 1e-12);
  EXPECT_LT(circle_distance(gamma.inverse().apply(R(1)), R(-1)), 1e-12);

  const CircleMap small = CircleMap(elliptic_about(H2Point(0, 1), 0.01));
  const Mobius g2 = separating_plane_through(small, R(1), R(-1));
  EXPECT_TRUE(graph_crossings(small, g2.inverse().matrix()).points.empty());
  EXPECT_LT(circle_distance(g2.inverse().apply(R(1)), R(-1)), 1e-12);

  EXPECT_THROW(separating_plane_through(simple_map(4), R(1), R(4)), GeometryError);

  Rng rng(36);
  for (int k = 0; k < 200; ++k) {
    const CircleMap f = quake::testing::random_circle_map(rng);
    const RP1Point x0 = rng.ideal(), y0 = rng.ideal();
    if (circle_distance(f.eval(x0), y0) < 1e-6) continue;
    const Mobius g = separating_plane_through(f, x0, y0);
    const Mat2 e = boundary_encode(x0, y0);
    EXPECT_LT(std::fabs(bilinear(e, g.matrix())) / (e.norm() * g.matrix().norm()), 1e-9);
    EXPECT_GT(graph_gap(f, g.inverse().matrix()), 0.0);
  }
}

TEST(CircleMap, EllipticTwoPairs) {
  const Mobius s1 = elliptic_two_pairs(R(0), kInf, kInf, R(0));
  EXPECT_EQ(classify(s1), MobiusKind::Elliptic);
  EXPECT_TRUE(s1.apply(R(0)).is_infinity());
  EXPECT_LT(circle_distance(s1.apply(kInf), R(0)), 1e-15);

  const Mobius s2 = elliptic_two_pairs(R(0), R(1), kInf, R(-1));
  EXPECT_EQ(classify(s2), MobiusKind::Elliptic);
  EXPECT_LT(circle_distance(s2.apply(R(0)), R(1)), 1e-14);
  EXPECT_LT(circle_distance(s2.apply(kInf), R(-1)), 1e-14);
}

TEST(CircleMap, EllipticTwoPairsAgainstParameterScan) {
  // Brute force: scan the family sigma_s = B diag(s, 1/s) A^{-1} over a log grid.
  Rng rng(37);
  int solved = 0, refused = 0;
  for (int k = 0; k < 500; ++k) {
    const RP1Point x = rng.ideal(), y = rng.ideal(), xp = rng.ideal(), yp = rng.ideal();
    if (circle_distance(x, xp) < 1e-3 || circle_distance(y, yp) < 1e-3) continue;
    // All Mobius maps with x -> y, x' -> y' have the form below for some s > 0.
    auto frame = [](const RP1Point& z, const RP1Point& i) {
      Mat2 m{i.u(), z.u(), i.v(), z.v()};
      if (m.det() < 0) m.a = -m.a, m.c = -m.c;
      return m;
    };
    const Mat2 A = frame(x, xp), B = frame(y, yp);
    bool exists = false;
    for (double e = -12; e <= 12 && !exists; e += 0.001) {
      const double s = std::exp(e);
      exists = classify(Mobius(B * Mat2{s, 0, 0, 1 / s} * A.adj())) == MobiusKind::Elliptic;
    }
    try {
      const Mobius sigma = elliptic_two_pairs(x, y, xp, yp);
      EXPECT_EQ(classify(sigma), MobiusKind::Elliptic);
      EXPECT_LT(circle_distance(sigma.apply(x), y), 1e-9);
      EXPECT_LT(circle_distance(sigma.apply(xp), yp), 1e-9);
      ++solved;
    } catch (const GeometryError& err) {
      EXPECT_EQ(err.code(), ErrorCode::NoEllipticSolution);
      EXPECT_FALSE(exists);
      ++refused;
    }
  }
  EXPECT_GT(solved, 0);
  EXPECT_GT(refused, 0);

  // Pairs taken from the graph of z -> 4z: an elliptic map would fix nothing but must
  // agree with a hyperbolic map at two points, which the parameter family still allows.
  const Mobius four(2, 0, 0, 0.5);
  const RP1Point a = R(1), b = R(-3);
  try {
    EXPECT_EQ(classify(elliptic_two_pairs(a, four.apply(a), b, four.apply(b))), MobiusKind::Elliptic);
  } catch (const GeometryError& err) {
    EXPECT_EQ(err.code(), ErrorCode::NoEllipticSolution);
  }
}

TEST(CircleMap, TwoPlaneMap) {
  const Mobius quarter(0.5, 0, 0, 2);
  const CircleMap plus = two_plane_map(Mobius(), quarter, Variant::Plus);
  EXPECT_EQ(plus.size(), 2u);
  for (double x : {-5.0, -1.0, -0.1}) EXPECT_NEAR(plus.eval(R(x)).value(), x, 1e-14);
  for (double x : {0.1, 1.0, 5.0}) EXPECT_NEAR(plus.eval(R(x)).value(), 4 * x, 1e-13);

  const CircleMap minus = two_plane_map(Mobius(), quarter, Variant::Minus);
  for (double x : {-5.0, -1.0}) EXPECT_NEAR(minus.eval(R(x)).value(), 4 * x, 1e-13);
  for (double x : {0.1, 5.0}) EXPECT_NEAR(minus.eval(R(x)).value(), x, 1e-14);

  EXPECT_THROW(two_plane_map(Mobius(), Mobius(0, 1, -1, 0), Variant::Plus), GeometryError);

  Rng rng(38);
  for (int k = 0; k < 100; ++k) {
    const Mobius g1 = rng.mobius();
    const Mobius g2 = rng.hyperbolic() * g1;
    const CircleMap f = two_plane_map(g1, g2, Variant::Plus);
    EXPECT_TRUE(validate(f.data()).ok);
    const TwoPlaneArcs arcs = two_plane_arcs(g1, g2);
    const std::size_t k1 = f.arc_of(ccw_midpoint(arcs.i1_start, arcs.i1_end));
    EXPECT_EQ(f.pieces()[k1].matrix().a, g1.inverse().matrix().a);
    EXPECT_EQ(f.pieces()[k1].matrix().d, g1.inverse().matrix().d);
  }
}

TEST(FiniteEarthquake, SingleLeaf) {
  LaminationSpec spec;
  spec.leaves = {Geodesic(R(0), kInf)};
  spec.weights = {std::log(4.0)};
  spec.side = Side::Left;
  spec.base = 0;
  const FiniteEarthquake fe = finite_earthquake_boundary(spec);
  for (double x : {-3.0, -1.0}) EXPECT_NEAR(fe.boundary.eval(R(x)).value(), x, 1e-13);
  for (double x : {0.5, 3.0}) EXPECT_NEAR(fe.boundary.eval(R(x)).value(), 4 * x, 1e-12);
  ASSERT_EQ(fe.truth.strata.size(), 2u);
  EXPECT_TRUE(fe.truth.strata[0].isometry.is_identity());
  EXPECT_TRUE(fe.truth.strata[1].isometry.approx_equal(Mobius(2, 0, 0, 0.5), 1e-12));
  EXPECT_TRUE(fe.truth.leaf_choices[0].isometry.approx_equal(Mobius(std::sqrt(2.0), 0, 0, 1 / std::sqrt(2.0)), 1e-12));

  spec.side = Side::Right;
  const FiniteEarthquake right = finite_earthquake_boundary(spec);
  EXPECT_NEAR(right.boundary.eval(R(4)).value(), 1.0, 1e-12);
}

TEST(FiniteEarthquake, EmptyAndInvalid) {
  const FiniteEarthquake id = finite_earthquake_boundary({});
  EXPECT_TRUE(id.boundary.is_mobius());
  EXPECT_TRUE(id.boundary.pieces()[0].is_identity());
  ASSERT_EQ(id.truth.strata.size(), 1u);

  LaminationSpec crossing;
  crossing.leaves = {Geodesic(R(-1), R(1)), Geodesic(R(0), kInf)};
  crossing.weights = {1, 1};
  try {
    finite_earthquake_boundary(crossing);
    FAIL();
  } catch (const GeometryError& e) {
    EXPECT_EQ(e.code(), ErrorCode::CrossingLeaves);
  }
  LaminationSpec zero;
  zero.leaves = {Geodesic(R(-1), R(1))};
  zero.weights = {0};
  try {
    finite_earthquake_boundary(zero);
    FAIL();
  } catch (const GeometryError& e) {
    EXPECT_EQ(e.code(), ErrorCode::NonPositiveWeight);
  }
}

TEST(FiniteEarthquake, NestedLeavesGapStructure) {
  const GapStructure gs = gap_structure({Geodesic(R(-1), R(1)), Geodesic(R(-2), R(2))});
  ASSERT_EQ(gs.gaps.size(), 3u);
  // The annular gap between the leaves has two arc edges and two leaf edges.
  int four_sided = 0;
  for (const Stratum& s : gs.gaps) four_sided += s.vertices.size() == 4;
  EXPECT_EQ(four_sided, 1);
}

TEST(FiniteEarthquake, ComparisonsAndSides) {
  Rng rng(39);
  for (int trial = 0; trial < 50; ++trial) {
    const LaminationSpec spec = quake::testing::random_spec(rng, rng.integer(1, 8));
    const FiniteEarthquake fe = finite_earthquake_boundary(spec);
    EXPECT_TRUE(validate(fe.boundary.data()).ok);
    const GapStructure gs = gap_structure(spec.leaves);
    auto mid = [&](std::size_t gap) {
      const std::size_t j = gs.gap_arcs[gap].front();
      return ccw_midpoint(gs.endpoints[j], gs.endpoints[(j + 1) % gs.endpoints.size()]);
    };
    for (std::size_t l = 0; l < spec.leaves.size(); ++l) {
      const auto [a, b] = gs.leaf_gaps[l];
      const Mobius comp = comparison(fe.truth, a, b);
      EXPECT_NEAR(translation_length(comp), spec.weights[l], 1e-9);
      const auto fp = hyperbolic_fixed_points(comp);
      EXPECT_TRUE(Geodesic(fp.repelling, fp.attracting).same_as(spec.leaves[l], 1e-9));
      EXPECT_EQ(translate_side(comp, mid(a), mid(b)), spec.side);
    }
    // Non-adjacent pairs translate the same way.
    for (int p = 0; p < 10; ++p) {
      const std::size_t a = static_cast<std::size_t>(rng.integer(0, static_cast<int>(gs.gaps.size()) - 1));
      const std::size_t b = static_cast<std::size_t>(rng.integer(0, static_cast<int>(gs.gaps.size()) - 1));
      if (a == b) continue;
      EXPECT_EQ(translate_side(comparison(fe.truth, a, b), mid(a), mid(b)), spec.side);
    }
  }
}
