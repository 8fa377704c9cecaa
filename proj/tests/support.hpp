#pragma once

#include <cmath>
#include <random>

#include "quake/mobius.hpp"

namespace quake::testing {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(gen_); }
  double normal() { return std::normal_distribution<double>(0.0, 1.0)(gen_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(gen_); }

  RP1Point ideal() { return RP1Point::from_angle(uniform(0.0, kTwoPi)); }
  H2Point interior() { return from_disc(std::polar(std::sqrt(uniform(0.0, 0.81)), uniform(0.0, kTwoPi))); }

  /// A Mobius map with entries of moderate size.
  Mobius mobius() {
    for (;;) {
      Mat2 m{normal(), normal(), normal(), normal()};
      if (m.det() < 0) m.a = -m.a, m.c = -m.c;
      if (m.det() > 0.05) return Mobius(m);
    }
  }
  Mobius hyperbolic(double min_trace = 2.1) {
    for (;;) {
      const Mobius m = mobius();
      if (std::fabs(m.trace()) > min_trace) return m;
    }
  }
  Mobius elliptic() {
    for (;;) {
      const Mobius m = mobius();
      if (std::fabs(m.trace()) < 1.9) return m;
    }
  }

  std::mt19937_64& engine() { return gen_; }

 private:
  std::mt19937_64 gen_;
};

inline double point_error(const RP1Point& a, const RP1Point& b) { return circle_distance(a, b); }
inline double point_error(const H2Point& a, const H2Point& b) { return std::abs(a.z() - b.z()); }

}  // namespace quake::testing
