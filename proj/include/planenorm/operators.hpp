#pragma once

// Linear maps between normed planes: operator norm, the attaining set, the
// adjoint, faces of the unit ball and distances to unions of faces.

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "planenorm/norm2d.hpp"
#include "planenorm/numeric.hpp"

namespace planenorm {

struct Operator2 {
  Mat2 matrix;
  Norm2 domain;
  Norm2 codomain;

  Operator2 scaled(double s) const { return {matrix * s, domain, codomain}; }
  /// Value of ||T gamma_domain(theta)||.
  double profile(double theta) const { return codomain.value(matrix * sphere_point(domain, theta)); }
};

inline Operator2 make_operator(const Mat2& m, const Norm2& domain, const Norm2& codomain) {
  if (!m.finite()) throw ValidationError("operator matrix is not finite");
  return {m, domain, codomain};
}

inline Vec2 apply(const Operator2& t, Vec2 x) { return t.matrix * x; }

/// Composition left after right (codomain of right should be domain of left).
inline Operator2 compose(const Operator2& left, const Operator2& right) {
  return {left.matrix * right.matrix, right.domain, left.codomain};
}

/// Closed arc {gamma(theta) : lo <= theta <= hi}, lo in [0, 2pi).
struct ArcInterval {
  double lo = 0.0;
  double hi = 0.0;

  double width() const { return hi - lo; }
  bool degenerate() const { return hi == lo; }
  double mid() const { return 0.5 * (lo + hi); }
};

inline ArcInterval make_arc(double lo, double hi) {
  if (!(hi >= lo) || hi - lo > kTwoPi + 1e-12) throw ValidationError("arc must satisfy 0 <= hi - lo <= 2pi");
  const double w = hi - lo;
  const double l = wrap(lo);
  return {l, l + w};
}

struct FacePair {
  Functional2 functional;
  ArcInterval plus_face;
  ArcInterval minus_face;
};

struct OperatorNorm {
  double norm = 0.0;
  double argmax = 0.0;
};

/// ||T|| as the max of ||T gamma(theta)|| over [0, pi).
inline OperatorNorm operator_norm(const Operator2& t, const SweepOptions& opt = {}) {
  if (t.matrix.max_abs() == 0.0) return {0.0, 0.0};
  const Extremum e = maximize_periodic([&](double th) { return t.profile(th); }, 0.0, kPi, opt);
  return {e.value, e.arg};
}

/// Adjoint: transpose between the dual spaces, so (T* y*)(x) = y*(T x).
inline Operator2 adjoint(const Operator2& t) {
  return {t.matrix.transpose(), dual_norm(t.codomain), dual_norm(t.domain)};
}

inline Functional2 apply_adjoint(const Operator2& t, Functional2 f) {
  const Vec2 v = t.matrix.transpose() * f.as_vector();
  return {v.x, v.y};
}

/// Arcs of [0, pi) where ||T gamma(theta)|| >= 1 - tol. The rest of the set is
/// the antipodal copy. Arcs may extend past pi when they wrap.
inline std::vector<ArcInterval> attaining_set(const Operator2& t, double tol = 1e-9,
                                              std::size_t grid = kDefaultGrid) {
  const OperatorNorm on = operator_norm(t, {grid, 4, kRefineWidth});
  if (std::abs(on.norm - 1.0) > tol)
    throw ValidationError("attaining_set: operator norm " + std::to_string(on.norm) + " is not 1");
  const double level = 1.0 - tol;
  auto g = [&](double th) { return t.profile(th) - level; };
  const std::size_t n = grid;
  const double h = kPi / static_cast<double>(n);
  std::vector<double> xs(n);
  for (std::size_t i = 0; i < n; ++i) xs[i] = h * static_cast<double>(i);
  const std::vector<double> vs = sample([&](double th) { return t.profile(th); }, xs);

  std::vector<char> above(n);
  for (std::size_t i = 0; i < n; ++i) above[i] = vs[i] >= level;
  if (std::all_of(above.begin(), above.end(), [](char c) { return c != 0; })) return {{0.0, kPi}};

  std::vector<ArcInterval> arcs;
  // runs of above-level samples, walked from a below-level start so that
  // runs crossing theta = pi come out whole
  std::size_t start = 0;
  while (above[start]) ++start;
  for (std::size_t k = 1; k <= n; ++k) {
    const std::size_t i = (start + k) % n;
    if (!above[i]) continue;
    std::size_t len = 0;
    while (above[(i + len) % n]) ++len;
    const double first = xs[i] + (i < start ? kPi : 0.0);
    const double last = first + h * static_cast<double>(len - 1);
    const double lo = bisect(g, first - h, first, 1e-11).hi;
    const double hi = bisect(g, last, last + h, 1e-11).lo;
    arcs.push_back({lo, hi});
    k += len;
  }
  // isolated peaks narrower than the grid
  const auto peaks = detail::local_maxima(vs, true);
  for (std::size_t k = 0; k < std::min<std::size_t>(peaks.size(), 64); ++k) {
    const std::size_t i = peaks[k];
    if (vs[i] < 1.0 - 0.05) break;
    if (above[i]) continue;
    Extremum e = golden_max([&](double th) { return t.profile(th); }, xs[i] - h, xs[i] + h);
    if (e.value < level) continue;
    const double c = wrap(e.arg, kPi);
    const double lo = bisect(g, c - h, c, 1e-11).hi;
    const double hi = bisect(g, c, c + h, 1e-11).lo;
    arcs.push_back({lo, hi});
  }
  for (ArcInterval& a : arcs) {
    const double w = a.hi - a.lo;
    a.lo = wrap(a.lo, kPi);
    a.hi = a.lo + w;
  }
  std::sort(arcs.begin(), arcs.end(), [](const ArcInterval& a, const ArcInterval& b) { return a.lo < b.lo; });
  return arcs;
}

/// Dual norm of a functional: ||x*|| = max over the sphere of x*(gamma).
inline double dual_value(const Norm2& norm, Functional2 f) { return functional_norm(norm, f); }

/// F(x*) = {x on the sphere : x*(x) = 1} as a closed arc.
inline ArcInterval face(const Norm2& norm, Functional2 f) {
  if (!f.finite()) throw ValidationError("face: functional is not finite");
  const double fn = functional_norm(norm, f);
  if (std::abs(fn - 1.0) > 1e-9) throw ValidationError("face: functional does not have dual norm 1");
  const LpNorm* lp = norm.as_lp();
  if (norm.as_ellipse() || (lp && !lp->infinite && lp->p > 1.0)) {
    // strictly convex: the face is the single point where the dual norm's
    // gradient at f lands
    const Functional2 g = supporting_functional(dual_norm(norm), f.as_vector() / fn);
    const double th = sphere_parameter({g.a1, g.a2});
    return {th, th};
  }
  auto val = [&](double th) { return f(sphere_point(norm, th)); };
  const double level = 1.0 - 1e-12;
  const Extremum e = maximize_periodic(val, 0.0, kTwoPi);
  double c = e.arg;
  if (e.value < level) {
    // the exact maximizer of a strictly convex piece
    return {wrap(c), wrap(c)};
  }
  auto g = [&](double th) { return val(th) - level; };
  const double lo = bisect(g, c - kPi, c, 1e-13).hi;
  const double hi = bisect(g, c, c + kPi, 1e-13).lo;
  return make_arc(lo, hi);
}

inline FacePair face_pair(const Norm2& norm, Functional2 f) { return {f, face(norm, f), face(norm, -f)}; }

/// min over theta in the arc of ||y - gamma(theta)||.
inline double dist_to_arc(const Norm2& norm, Vec2 y, const ArcInterval& arc) {
  auto d = [&](double th) { return norm.value(y - sphere_point(norm, th)); };
  if (arc.width() <= 1e-12) return std::min(d(arc.lo), d(arc.hi));
  return minimize(d, arc.lo, arc.hi, {1024, 4, kRefineWidth}).value;
}

inline double dist_to_face_union(const Norm2& norm, Vec2 y, const FacePair& fp) {
  return std::min(dist_to_arc(norm, y, fp.plus_face), dist_to_arc(norm, y, fp.minus_face));
}

/// If x*(gamma(theta1)) >= 1 and x*(gamma(theta2)) >= 1 then x*(gamma(theta))
/// >= 1 on [theta1, theta2]; checked on a 1024-point sub-grid.
inline bool check_face_interval(const Norm2& norm, Functional2 f, double theta1, double theta2) {
  if (!(theta2 - theta1 >= 0.0 && theta2 - theta1 <= kPi)) throw ValidationError("check_face_interval: need 0 <= theta2 - theta1 <= pi");
  auto val = [&](double th) { return f(sphere_point(norm, th)); };
  if (val(theta1) < 1.0 - 1e-12 || val(theta2) < 1.0 - 1e-12) return true;
  for (std::size_t i = 0; i <= 1024; ++i) {
    const double th = theta1 + (theta2 - theta1) * static_cast<double>(i) / 1024.0;
    if (val(th) < 1.0 - 1e-9) return false;
  }
  return true;
}

}  // namespace planenorm
