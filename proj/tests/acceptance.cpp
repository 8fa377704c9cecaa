// Acceptance run: one PASS/FAIL line per criterion. Exit status is the number of failures.

#include <chrono>
#include <cstdio>
#include <string>
#include <vector>

#include "dynamics.hpp"
#include "generators.hpp"
#include "quake/earthquake.hpp"
#include "quake/io.hpp"

using namespace quake;
using quake::testing::Rng;

namespace {

int failures = 0;

void report(int id, bool ok, const std::string& detail) {
  std::printf("criterion %d: %s  %s\n", id, ok ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

class Stopwatch {
 public:
  double seconds() const { return std::chrono::duration<double>(Clock::now() - start_).count(); }

 private:
  using Clock = std::chrono::steady_clock;
  Clock::time_point start_ = Clock::now();
};

bool has_isometry(const EarthquakeMap& e, const Mobius& g, double tol) {
  for (const Stratum& s : e.strata)
    if (s.isometry.distance(g) <= tol) return true;
  return false;
}

// Worst |expected - measured| over the dual planes, or infinity if one is missing.
double dual_error(const PleatedSurface& ps, const std::vector<Mobius>& duals) {
  double worst = 0;
  for (const Mobius& g : duals) {
    double best = std::numeric_limits<double>::infinity();
    for (const PleatedFace& f : ps.faces) best = std::min(best, f.dual.distance(g));
    worst = std::max(worst, best);
  }
  return worst;
}

struct VerifierTally {
  std::size_t maps = 0, pairs = 0, bad = 0;
  double worst_trace = std::numeric_limits<double>::infinity();
  double worst_separation = std::numeric_limits<double>::infinity();

  void add(const EarthquakeMap& e) {
    const VerificationReport rep = verify_earthquake(e);
    ++maps;
    pairs += rep.records.size();
    bad += rep.failures.size();
    for (const PairRecord& r : rep.records) {
      if (r.kind == MobiusKind::Identity) continue;
      worst_trace = std::min(worst_trace, r.trace_margin);
      worst_separation = std::min(worst_separation, r.separation_margin);
      const bool ok = r.kind == MobiusKind::Hyperbolic && r.trace_margin >= 1e-9 && r.separation_margin >= -1e-9 &&
                      r.side == e.side;
      if (!ok && r.ok) ++bad;  // the verifier must agree with the pinned thresholds
    }
  }
};

VerifierTally tally;
std::vector<EarthquakeMap> round_trips;

void simple_case() {
  const Mobius quarter(1, 0, 0, 4);
  const CircleMap f = two_plane_map(Mobius(), quarter, Variant::Plus);
  const Stopwatch sw;
  const Extraction x = extract_earthquake(f, {500, Side::Left, 0.5, 0});
  const double secs = sw.seconds();

  const double dual = dual_error(x.surface, {Mobius(), quarter});
  const bool strata = x.map.strata.size() == 2 && has_isometry(x.map, Mobius(), 1e-6) &&
                      has_isometry(x.map, Mobius(4, 0, 0, 1), 1e-6);
  const bool leaf = x.map.leaves.size() == 1 &&
                    x.map.leaves[0].same_as(Geodesic(RP1Point::real(0), RP1Point::infinity()), 1e-9);
  tally.add(x.map);
  report(1, strata && leaf && x.map.side == Side::Left && dual <= 1e-6 && secs < 1.0,
         fmt("strata {id, 4z} %.0f, leaf (0,inf) %.0f, dual error %.2e, %.3f s", strata, leaf, dual, secs));
}

void round_trip_cases() {
  Rng rng(2);
  double worst_h = 0, worst_b = 0, worst_t = 0;
  int bad = 0, left = 0;
  for (int c = 0; c < 50; ++c) {
    const Side side = c % 2 == 0 ? Side::Left : Side::Right;
    const LaminationSpec spec = quake::testing::random_spec(rng, rng.integer(1, 8), side);
    left += side == Side::Left;
    const CircleMap truth_map = finite_earthquake_boundary(spec).boundary;
    // Through the file formats, as the command line tool does it.
    const CircleMap f = io::circle_map_from_json(nlohmann::json::parse(io::dump(io::to_json(truth_map))));
    const Stopwatch sw;
    const Extraction x = extract_earthquake(f, {2000, side, 0.5, 0});
    const double secs = sw.seconds();
    const EarthquakeMap e = io::earthquake_from_json(nlohmann::json::parse(io::dump(io::to_json(x.map))));

    const double h = quake::testing::leaf_hausdorff(e.leaves, spec.leaves);
    const double b = boundary_agreement(e, f, 1000);
    worst_h = std::max(worst_h, h);
    worst_b = std::max(worst_b, b);
    worst_t = std::max(worst_t, secs);
    if (!(h <= 1e-5 && b <= 1e-5 && secs < 5.0 && e.side == side)) ++bad;
    tally.add(e);
    round_trips.push_back(e);
  }
  report(2, bad == 0,
         fmt("50 specs (%.0f left), Hausdorff %.2e, boundary %.2e, slowest %.3f s", left, worst_h, worst_b, worst_t) +
             ", " + std::to_string(bad) + " bad");
}

void verifier_cases() {
  report(3, tally.bad == 0,
         std::to_string(tally.maps) + " maps, " + std::to_string(tally.pairs) + " pairs, " + std::to_string(tally.bad) +
             " failures" + fmt(", worst |tr|-2 %.2e, worst separation %.2e", tally.worst_trace, tally.worst_separation));
}

void hull_cases() {
  Rng rng(4);
  int mismatches = 0;
  const Stopwatch sw;
  for (int k = 0; k < 100; ++k) {
    std::vector<Vec3> pts;
    for (int i = 0; i < 30; ++i) pts.push_back({rng.normal(), rng.normal(), rng.normal()});
    if (face_index_sets(merge_coplanar(convex_hull_3d(pts))) != brute_force_hull(pts)) ++mismatches;
  }
  const double secs = sw.seconds();
  report(4, mismatches == 0 && secs < 2.0, std::to_string(mismatches) + fmt(" mismatches in 100 clouds, %.3f s", secs));
}

void kernel_cases() {
  const double eps = 4 * std::numeric_limits<double>::epsilon();
  const double basis = std::max({std::fabs(quadratic(kBasisV) - 1), std::fabs(quadratic(kBasisW) - 1),
                                 std::fabs(quadratic(kBasisU) + 1), std::fabs(bilinear(kBasisV, kBasisW)),
                                 std::fabs(bilinear(kBasisV, kBasisU)), std::fabs(bilinear(kBasisW, kBasisU))});
  Rng rng(5);
  double equivariance = 0, incidence = 0;
  for (int k = 0; k < 10000; ++k) {
    const Mobius alpha = rng.mobius(), beta = rng.mobius();
    const RP1Point x = rng.ideal(), y = rng.ideal();
    const AdSBoundaryPoint r = boundary_decode(alpha.matrix() * boundary_encode(x, y) * beta.inverse().matrix());
    equivariance = std::max({equivariance, circle_distance(r.x, alpha.apply(x)), circle_distance(r.y, beta.apply(y))});
  }
  for (int k = 0; k < 10000; ++k) {
    const Mobius g = rng.mobius();
    const RP1Point x = rng.ideal();
    const Mat2 e = boundary_encode(x, g.inverse().apply(x));
    incidence = std::max(incidence, std::fabs(bilinear(e, g.matrix())) / (e.norm() * g.matrix().norm()));
  }
  report(5, basis <= eps && equivariance <= 1e-9 && incidence <= 1e-12,
         fmt("basis %.1e, equivariance %.2e, incidence %.2e", basis, equivariance, incidence));
}

void dynamics_cases() {
  const auto grid = quake::testing::disc_grid(100, 100);
  Rng rng(6);
  Stopwatch sw;
  const Complex w = std::polar(rng.uniform(0, 0.8), rng.uniform(0, kTwoPi));
  const Complex dir = std::polar(0.1, rng.uniform(0, kTwoPi));
  double sup = 0;
  const long n = quake::testing::uniform_convergence_index(w, dir, grid, 1e-3, 1000000, &sup);
  const double t1 = sw.seconds();

  sw = Stopwatch();
  const Complex target = std::polar(1.0, rng.uniform(0, kTwoPi));
  std::vector<long> n0;
  for (double r : {0.5, 0.1, 0.02}) n0.push_back(quake::testing::north_south_index(target, r, grid, 1000000));
  const double t2 = sw.seconds();
  const bool ns = n0[0] > 0 && n0[1] > 0 && n0[2] > 0;
  report(6, grid.size() == 10000 && n > 0 && sup < 1e-3 && t1 < 5 && ns && t2 < 5,
         fmt("sup error %.2e at n = %.0f (%.3f s); ", sup, double(n), t1) +
             fmt("north-south n0 = %.0f, %.0f, %.0f (%.3f s)", double(n0[0]), double(n0[1]), double(n0[2]), t2));
}

void separating_cases() {
  Rng rng(7);
  int crossed = 0, skipped = 0;
  double incidence = 0;
  for (int k = 0; k < 1000; ++k) {
    const CircleMap f = quake::testing::random_circle_map(rng);
    const Crossings c1 = graph_crossings(f, separating_plane(f).inverse().matrix());
    if (!c1.points.empty() || c1.coincident) ++crossed;

    RP1Point x0 = rng.ideal(), y0 = rng.ideal();
    while (circle_distance(f.eval(x0), y0) < 1e-6) ++skipped, y0 = rng.ideal();
    const Mobius g = separating_plane_through(f, x0, y0);
    const Crossings c2 = graph_crossings(f, g.inverse().matrix());
    if (!c2.points.empty() || c2.coincident) ++crossed;
    const Mat2 e = boundary_encode(x0, y0);
    incidence = std::max(incidence, std::fabs(bilinear(e, g.matrix())) / (e.norm() * g.matrix().norm()));
  }
  report(7, crossed == 0 && incidence <= 1e-9,
         std::to_string(crossed) + fmt(" planes meeting the graph in 1000 maps, incidence %.2e", incidence) +
             (skipped ? ", " + std::to_string(skipped) + " redrawn points" : std::string()));
}

void choice_cases() {
  double worst = 0;
  std::size_t leaves = 0;
  for (const EarthquakeMap& e : round_trips) {
    for (std::size_t l = 0; l < e.leaves.size(); ++l, ++leaves) {
      const Geodesic g0 = leaf_geodesic(e, l, 0.0);
      for (double t : {0.5, 1.0}) {
        const Geodesic g = leaf_geodesic(e, l, t);
        worst = std::max(worst, std::min(std::max(circle_distance(g.first(), g0.first()), circle_distance(g.second(), g0.second())),
                                         std::max(circle_distance(g.first(), g0.second()), circle_distance(g.second(), g0.first()))));
      }
    }
  }
  report(8, !round_trips.empty() && worst <= 1e-9,
         std::to_string(leaves) + fmt(" leaves, worst endpoint spread %.2e", worst));
}

}  // namespace

int main() {
  const std::vector<std::pair<int, void (*)()>> steps = {
      {1, simple_case}, {2, round_trip_cases}, {3, verifier_cases}, {4, hull_cases},
      {5, kernel_cases}, {6, dynamics_cases},  {7, separating_cases}, {8, choice_cases}};
  for (const auto& [id, run] : steps) {
    try {
      run();
    } catch (const std::exception& e) {
      report(id, false, std::string("threw: ") + e.what());
    }
  }
  return failures;
}
