// quake: synthesize boundary maps, extract and verify earthquakes, render figures.
//
// Exit codes: 0 success / verification passed, 1 verification failed, 2 malformed input,
// 3 the circle map is a single Mobius map, 4 extraction failed.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "quake/earthquake.hpp"
#include "quake/io.hpp"
#include "quake/svg.hpp"

namespace {

using namespace quake;
using nlohmann::json;

constexpr int kExitFail = 1;
constexpr int kExitInput = 2;
constexpr int kExitMobius = 3;
constexpr int kExitExtract = 4;

struct Options {
  std::string input;
  std::string out;
  std::string truth;
  std::string map;
  std::string diagnostics;
  std::string dump_hull;
  std::string side = "left";
  int samples = 2000;
  int torus_samples = 720;
  double leaf_t = 0.5;
  double boundary_tol = 1e-5;
  double size = 512;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  bool overlay = false;
};

void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
  } else {
    io::write_text(path, text);
  }
}

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.3e", x == 0 ? 0.0 : x);
  return buf;
}

int synthesize(const Options& o) {
  const LaminationSpec spec = io::lamination_from_json(io::read_json(o.input));
  const FiniteEarthquake fe = finite_earthquake_boundary(spec, o.leaf_t);
  emit(o.out, io::dump(io::to_json(fe.boundary)));
  if (!o.truth.empty()) io::write_text(o.truth, io::dump(io::to_json(fe.truth)));
  const VerificationReport rep = verify_earthquake(fe.truth, o.threads);
  std::cerr << "synthesized " << spec.leaves.size() << " leaves, " << fe.boundary.size() << " breakpoints; "
            << "ground truth " << (rep.pass ? "passes" : "FAILS") << " the verifier (" << rep.records.size()
            << " pairs)\n";
  return 0;
}

json mobius_report(const Mobius& g) {
  return {{"mobius", io::to_json(g.matrix())}, {"kind", to_string(classify(g))}, {"trace", g.trace()}};
}

int extract(const Options& o) {
  const CircleMap f = io::circle_map_from_json(io::read_json(o.input));
  if (f.is_mobius()) {
    emit(o.out, io::dump(mobius_report(f.pieces()[0])));
    std::cerr << "f is a single Mobius map: its graph spans a plane and the earthquake is that isometry\n";
    return kExitMobius;
  }
  ExtractOptions opt;
  opt.samples = o.samples;
  opt.side = io::side_from_json(o.side);
  opt.leaf_t = o.leaf_t;
  opt.seed = o.seed;
  Extraction x;
  try {
    x = extract_earthquake(f, opt);
  } catch (const GeometryError& e) {
    if (e.code() == ErrorCode::DegenerateFlat) {
      emit(o.out, io::dump(mobius_report(f.pieces()[0])));
      std::cerr << "the sampled graph is flat: " << e.what() << '\n';
      return kExitMobius;
    }
    std::cerr << "extraction failed: " << e.what() << '\n';
    return kExitExtract;
  }
  emit(o.out, io::dump(io::to_json(x.map)));

  if (!o.dump_hull.empty()) {
    std::ostringstream off;
    write_off(off, x.hull);
    io::write_text(o.dump_hull, off.str());
  }
  const VerificationReport rep = verify_earthquake(x.map, o.threads);
  const json diag = {{"samples", o.samples},
                     {"hull_faces", x.hull.faces.size()},
                     {"surface_faces", x.surface.faces.size()},
                     {"ridges", x.surface.ridges.size()},
                     {"leaves", x.map.leaves.size()},
                     {"boundary_error", x.boundary_error},
                     {"verifier", io::to_json(rep)}};
  if (!o.diagnostics.empty()) io::write_text(o.diagnostics, io::dump(diag));
  std::cerr << x.map.leaves.size() << " leaves, " << x.surface.faces.size() << " faces (hull " << x.hull.faces.size()
            << "), boundary error " << fmt(x.boundary_error) << ", worst separation margin "
            << fmt(rep.worst_separation_margin) << '\n';
  return 0;
}

int verify(const Options& o) {
  const EarthquakeMap e = io::earthquake_from_json(io::read_json(o.input));
  std::optional<CircleMap> f;
  if (!o.map.empty()) f = io::circle_map_from_json(io::read_json(o.map));
  VerificationReport rep = verify_earthquake(e, o.threads);
  if (f) {
    rep.boundary_error = boundary_agreement(e, *f);
    rep.pass = rep.pass && *rep.boundary_error <= o.boundary_tol;
  }

  std::cout << "side " << to_string(e.side) << ", " << e.leaves.size() << " leaves, " << e.strata.size()
            << " strata, " << rep.records.size() << " pairs checked\n";
  std::cout << "worst trace margin      " << fmt(rep.worst_trace_margin) << '\n';
  std::cout << "worst separation margin " << fmt(rep.worst_separation_margin) << '\n';
  if (rep.boundary_error) {
    std::cout << "boundary error          " << fmt(*rep.boundary_error) << " (tolerance " << fmt(o.boundary_tol)
              << ")\n";
  }
  for (const PairRecord& p : rep.failures) {
    std::cout << "FAIL pair (" << p.i << ", " << p.j << ") " << to_string(p.kind) << ": " << p.reason << '\n';
  }
  std::cout << (rep.pass ? "PASS" : "FAIL") << '\n';
  if (!o.out.empty()) io::write_text(o.out, io::dump(io::to_json(rep)));
  return rep.pass ? 0 : kExitFail;
}

int render(const Options& o) {
  const json j = io::read_json(o.input);
  if (j.is_object() && j.contains("strata")) {
    emit(o.out, svg::render_disc(io::earthquake_from_json(j), {o.size, o.overlay}));
  } else {
    emit(o.out, svg::render_torus(io::circle_map_from_json(j), o.torus_samples, o.size));
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Earthquake maps of the circle through Anti-de Sitter convex hulls"};
  app.require_subcommand(1);
  Options o;

  auto* syn = app.add_subcommand("synthesize", "Boundary map of a finite weighted lamination");
  syn->add_option("lamination", o.input, "Lamination JSON")->required();
  syn->add_option("--out", o.out, "Circle map JSON (default stdout)");
  syn->add_option("--truth", o.truth, "Also write the exact earthquake here");
  syn->add_option("--leaf-t", o.leaf_t, "Leaf parameter of the ground truth")->check(CLI::Range(0.0, 1.0));

  auto* ext = app.add_subcommand("extract", "Earthquake extending a circle map");
  ext->add_option("map", o.input, "Circle map JSON")->required();
  ext->add_option("--out", o.out, "Earthquake JSON (default stdout)");
  ext->add_option("--side", o.side, "left or right")->check(CLI::IsMember({"left", "right"}));
  ext->add_option("--samples", o.samples, "Boundary samples")->check(CLI::Range(4, 1 << 24));
  ext->add_option("--leaf-t", o.leaf_t, "Leaf parameter")->check(CLI::Range(0.0, 1.0));
  ext->add_option("--seed", o.seed, "Sampling phase seed; 0 samples from angle 0");
  ext->add_option("--diagnostics", o.diagnostics, "Write extraction diagnostics JSON");
  ext->add_option("--dump-hull", o.dump_hull, "Write the chart hull as an OFF mesh");

  auto* ver = app.add_subcommand("verify", "Check the earthquake axioms, and the boundary values if a map is given");
  ver->add_option("earthquake", o.input, "Earthquake JSON")->required();
  ver->add_option("--map", o.map, "Circle map the earthquake should extend");
  ver->add_option("--boundary-tol", o.boundary_tol, "Allowed boundary error");
  ver->add_option("--out", o.out, "Write the JSON report");

  auto* ren = app.add_subcommand("render", "Disc picture of an earthquake or torus plot of a circle map");
  ren->add_option("input", o.input, "Earthquake or circle map JSON")->required();
  ren->add_option("--out", o.out, "SVG (default stdout)");
  ren->add_option("--size", o.size, "Picture size")->check(CLI::Range(64.0, 8192.0));
  ren->add_option("--samples", o.torus_samples, "Torus plot samples")->check(CLI::Range(4, 1 << 20));
  ren->add_flag("--overlay", o.overlay, "Draw leaf images under the earthquake");

  for (auto* sub : {syn, ext, ver}) sub->add_option("--threads", o.threads, "Verifier threads")->check(CLI::Range(1u, 256u));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInput;
  }

  try {
    if (syn->parsed()) return synthesize(o);
    if (ext->parsed()) return extract(o);
    if (ver->parsed()) return verify(o);
    return render(o);
  } catch (const GeometryError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  }
}
