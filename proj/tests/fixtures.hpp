#pragma once

// Shared test norms.

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "planenorm/norm2d.hpp"

namespace fixtures {

using planenorm::Mat2;
using planenorm::Norm2;
using planenorm::Vec2;

inline constexpr double kPi = 3.14159265358979323846;

/// Regular hexagon with circumradius 1 and a vertex at (1, 0).
inline Norm2 hexagon() {
  std::vector<Vec2> v;
  for (int k = 0; k < 3; ++k) v.push_back({std::cos(k * kPi / 3.0), std::sin(k * kPi / 3.0)});
  return Norm2::polygon(v);
}

/// Symmetric 16-gon: angles k pi / 8 jittered by up to 0.05, radii in [0.95, 1.05].
inline Norm2 random_16gon(std::uint64_t seed = 1234) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> jitter(-0.05, 0.05), radius(0.95, 1.05);
  std::vector<Vec2> v;
  for (int k = 0; k < 8; ++k) {
    const double a = k * kPi / 8.0 + jitter(rng);
    const double r = radius(rng);
    v.push_back({r * std::cos(a), r * std::sin(a)});
  }
  return Norm2::polygon(v);
}

/// Ellipse norm with random eigenvalues in [0.3, 3] and a random axis.
inline Norm2 random_ellipse(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ev(0.3, 3.0), ang(0.0, kPi);
  const Mat2 r = Mat2::rotation(ang(rng));
  const Mat2 d = Mat2::diagonal(ev(rng), ev(rng));
  return Norm2::ellipse(r * d * r.transpose());
}

/// Random symmetric convex polygon with `half` vertices per half.
inline Norm2 random_polygon(std::mt19937_64& rng, int half) {
  std::uniform_real_distribution<double> jitter(-0.25, 0.25), radius(0.8, 1.25);
  for (;;) {
    std::vector<Vec2> v;
    for (int k = 0; k < half; ++k) {
      const double a = (k + 0.5 + jitter(rng)) * kPi / half;
      const double r = radius(rng);
      v.push_back({r * std::cos(a), r * std::sin(a)});
    }
    try {
      return Norm2::polygon(v);
    } catch (const planenorm::ValidationError&) {
      // not convex, draw again
    }
  }
}

inline Norm2 l1() { return Norm2::lp(1.0); }
inline Norm2 l15() { return Norm2::lp(1.5); }
inline Norm2 l2() { return Norm2::euclidean(); }
inline Norm2 l3() { return Norm2::lp(3.0); }
inline Norm2 linf() { return Norm2::lp_infinity(); }

struct NormPair {
  std::string name;
  Norm2 x, y;
};

/// The six end-to-end (domain, codomain) pairs.
inline std::vector<NormPair> end_to_end_pairs() {
  return {{"l2/linf", l2(), linf()},           {"l2/hexagon", l2(), hexagon()},
          {"linf/linf", linf(), linf()},       {"l1/linf", l1(), linf()},
          {"l1.5/hexagon", l15(), hexagon()},  {"16-gon/l1", random_16gon(), l1()}};
}

}  // namespace fixtures
