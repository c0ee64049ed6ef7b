#pragma once

// Shared fixtures for the unit tests.

#include "charfol/contact.hpp"
#include "charfol/surface.hpp"

#include <random>

namespace charfol::test {

inline Box box(double x, double y, double z) { return Box{{Interval{-x, x}, Interval{-y, y}, Interval{-z, z}}}; }

// A frame with non-constant structure constants, contact on its domain.
inline ContactStructure generic_frame() {
  auto f = [](const char* a, const char* b, const char* c) {
    return ContactStructure::FieldExprs{parse(a, 3), parse(b, 3), parse(c, 3)};
  };
  return ContactStructure(f("0.1*y", "0.05*x", "1"), f("1 + 0.2*x*y", "0.1*z", "-y/2"),
                          f("0.1*z^2", "1 + 0.1*x", "x/2"), box(2, 2, 2.5));
}

inline std::mt19937_64 rng(unsigned long seed = 20261016) { return std::mt19937_64(seed); }

inline double uniform(std::mt19937_64& g, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(g);
}

inline Vec3 random_point(std::mt19937_64& g, double r) {
  return {uniform(g, -r, r), uniform(g, -r, r), uniform(g, -r, r)};
}

// Central-difference Jacobian of a vector field, the finite-difference oracle
// for bracket computations.
template <typename F>
Mat3 fd_jacobian(const F& field, const Vec3& p, double h = 1e-5) {
  Mat3 J;
  for (int n = 0; n < 3; ++n) {
    const Vec3 e = h * Vec3::Unit(n);
    J.col(n) = (field(p + e) - field(p - e)) / (2 * h);
  }
  return J;
}

}  // namespace charfol::test
