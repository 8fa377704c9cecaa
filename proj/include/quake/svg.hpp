#pragma once

// SVG figures: laminations and strata in the Poincare disc, circle maps on the flat torus.

#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include "quake/circlemap.hpp"
#include "quake/mobius.hpp"
#include "quake/strata.hpp"

namespace quake::svg {

struct DiscStyle {
  double size = 512;
  bool overlay_image = false;  // leaves moved by their leaf choices
};

namespace detail {

inline std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", std::fabs(x) < 5e-5 ? 0.0 : x);
  return buf;
}

struct Canvas {
  double c, r;
  std::string xy(double x, double y) const { return fmt(c + r * x) + ' ' + fmt(c - r * y); }
  std::string at(const RP1Point& p) const {
    const double t = p.angle();
    return xy(std::cos(t), std::sin(t));
  }
};

/// Path command continuing from p to q along the geodesic between them.
inline std::string geodesic_to(const Canvas& cv, const RP1Point& p, const RP1Point& q) {
  const double a = p.angle(), b = q.angle();
  double gap = std::fabs(b - a);
  if (gap > kTwoPi / 2) gap = kTwoPi - gap;
  if (std::fabs(gap - kTwoPi / 2) < 1e-9) return "L " + cv.at(q);
  // Circle orthogonal to the unit circle, centred on the bisector of p and q.
  const double mid = std::atan2(std::sin(a) + std::sin(b), std::cos(a) + std::cos(b));
  const double dist = 1 / std::cos(gap / 2), rad = std::tan(gap / 2);
  const double cx = dist * std::cos(mid), cy = dist * std::sin(mid);
  // Screen coordinates flip y, so the orientation test flips sign.
  const double px = std::cos(a) - cx, py = std::sin(a) - cy, qx = std::cos(b) - cx, qy = std::sin(b) - cy;
  const int sweep = px * qy - py * qx < 0 ? 1 : 0;
  return "A " + fmt(cv.r * rad) + ' ' + fmt(cv.r * rad) + " 0 0 " + std::to_string(sweep) + ' ' + cv.at(q);
}

/// Counterclockwise along the boundary circle from p to q.
inline std::string boundary_to(const Canvas& cv, const RP1Point& p, const RP1Point& q) {
  const int large = ccw_offset(p, q) > kTwoPi / 2 ? 1 : 0;
  return "A " + fmt(cv.r) + ' ' + fmt(cv.r) + " 0 " + std::to_string(large) + " 0 " + cv.at(q);
}

inline std::string fill_colour(std::size_t i) {
  static const char* palette[] = {"#dce9f5", "#f5e6d3", "#e0f0dc", "#efdcef", "#f7f2cf", "#d9efef"};
  return palette[i % (sizeof palette / sizeof *palette)];
}

inline std::string header(double w, double h) {
  return "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" +
         fmt(w) + "\" height=\"" + fmt(h) + "\" viewBox=\"0 0 " + fmt(w) + ' ' + fmt(h) + "\">\n";
}

}  // namespace detail

/// Poincare disc picture of an earthquake: shaded strata, leaves as geodesic arcs.
inline std::string render_disc(const EarthquakeMap& e, const DiscStyle& style = {}) {
  const detail::Canvas cv{style.size / 2, style.size / 2 - 8};
  std::ostringstream os;
  os << detail::header(style.size, style.size);
  os << "<style>.stratum{stroke:none}.leaf{fill:none;stroke:#1f3b73;stroke-width:1.5}"
        ".image{fill:none;stroke:#b8412c;stroke-width:1;stroke-dasharray:4 3}"
        ".boundary{fill:none;stroke:#333;stroke-width:1}</style>\n";
  for (std::size_t s = 0; s < e.strata.size(); ++s) {
    const Stratum& st = e.strata[s];
    const std::size_t n = st.vertices.size();
    os << "<path class=\"stratum\" fill=\"" << detail::fill_colour(s) << "\" d=\"";
    if (n < 2) {
      os << "M " << cv.xy(1, 0) << " A " << detail::fmt(cv.r) << ' ' << detail::fmt(cv.r) << " 0 1 0 " << cv.xy(-1, 0)
         << " A " << detail::fmt(cv.r) << ' ' << detail::fmt(cv.r) << " 0 1 0 " << cv.xy(1, 0);
    } else {
      os << "M " << cv.at(st.vertices[0]);
      for (std::size_t i = 0; i < n; ++i) {
        const RP1Point& p = st.vertices[i];
        const RP1Point& q = st.vertices[(i + 1) % n];
        os << ' ' << (st.edges[i] == EdgeKind::Leaf ? detail::geodesic_to(cv, p, q) : detail::boundary_to(cv, p, q));
      }
    }
    os << " Z\"/>\n";
  }
  os << "<circle class=\"boundary\" cx=\"" << detail::fmt(cv.c) << "\" cy=\"" << detail::fmt(cv.c) << "\" r=\""
     << detail::fmt(cv.r) << "\"/>\n";
  for (const Geodesic& g : e.leaves) {
    os << "<path class=\"leaf\" d=\"M " << cv.at(g.first()) << ' ' << detail::geodesic_to(cv, g.first(), g.second())
       << "\"/>\n";
  }
  if (style.overlay_image) {
    for (const LeafChoice& c : e.leaf_choices) {
      const Geodesic& g = e.leaves.at(c.leaf_index);
      const RP1Point p = c.isometry.apply(g.first()), q = c.isometry.apply(g.second());
      os << "<path class=\"image\" d=\"M " << cv.at(p) << ' ' << detail::geodesic_to(cv, p, q) << "\"/>\n";
    }
  }
  os << "</svg>\n";
  return os.str();
}

/// Graph of f on the torus [0, 2pi)^2 in angle coordinates, one polyline per wrap-free run.
inline std::string render_torus(const CircleMap& f, int samples = 720, double size = 512) {
  const double pad = 16, side = size - 2 * pad;
  auto px = [&](double t) { return detail::fmt(pad + side * t / kTwoPi); };
  auto py = [&](double t) { return detail::fmt(size - pad - side * t / kTwoPi); };
  std::ostringstream os;
  os << detail::header(size, size);
  os << "<style>.frame{fill:none;stroke:#333}.diagonal{stroke:#999;stroke-dasharray:3 3}"
        ".graph{fill:none;stroke:#1f3b73;stroke-width:1.5}.breakpoint{fill:#b8412c}</style>\n";
  os << "<rect class=\"frame\" x=\"" << detail::fmt(pad) << "\" y=\"" << detail::fmt(pad) << "\" width=\""
     << detail::fmt(side) << "\" height=\"" << detail::fmt(side) << "\"/>\n";
  os << "<line class=\"diagonal\" x1=\"" << px(0) << "\" y1=\"" << py(0) << "\" x2=\"" << px(kTwoPi) << "\" y2=\""
     << py(kTwoPi) << "\"/>\n";
  std::vector<std::vector<std::pair<double, double>>> runs(1);
  double last = -1;
  for (int i = 0; i <= samples; ++i) {
    const double t = kTwoPi * i / samples;
    double y = f.eval(RP1Point::from_angle(t)).angle();
    if (i == samples && std::fabs(y - last) > kTwoPi / 2) y += y < last ? kTwoPi : -kTwoPi;
    if (i > 0 && std::fabs(y - last) > kTwoPi / 2) runs.emplace_back();
    runs.back().emplace_back(t, y);
    last = y;
  }
  for (const auto& run : runs) {
    if (run.size() < 2) continue;
    os << "<polyline class=\"graph\" points=\"";
    for (std::size_t i = 0; i < run.size(); ++i) os << (i ? " " : "") << px(run[i].first) << ',' << py(run[i].second);
    os << "\"/>\n";
  }
  for (const RP1Point& b : f.breakpoints()) {
    os << "<circle class=\"breakpoint\" cx=\"" << px(b.angle()) << "\" cy=\"" << py(f.eval(b).angle())
       << "\" r=\"2.5\"/>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace quake::svg
