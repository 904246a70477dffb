#pragma once

// Symmetric norms on the plane: l_p, centrally symmetric polygons and
// ellipses. Provides evaluation, duality, supporting functionals and the
// normalized sphere curve theta -> (cos, sin) / ||(cos, sin)||.

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "planenorm/numeric.hpp"

namespace planenorm {

struct LpNorm {
  double p = 2.0;  ///< meaningless when infinite
  bool infinite = false;
};

/// Centrally symmetric convex polygon, vertices counter-clockwise, sorted by
/// polar angle starting from the smallest angle in [0, 2pi). facets[k] is the
/// functional equal to 1 on the edge vertices[k] -> vertices[k+1].
struct PolygonNorm {
  std::vector<Vec2> vertices;
  std::vector<Functional2> facets;
  std::vector<double> angles;
};

/// ||v|| = sqrt(v^T M v) with M symmetric positive definite.
struct EllipseNorm {
  Mat2 m;
};

namespace detail {

inline double polygon_gauge(const PolygonNorm& poly, Vec2 v) {
  const std::size_t n = poly.vertices.size();
  const double phi = wrap(polar_angle(v));
  auto it = std::upper_bound(poly.angles.begin(), poly.angles.end(), phi);
  const std::size_t k = it == poly.angles.begin() ? n - 1 : static_cast<std::size_t>(it - poly.angles.begin()) - 1;
  // the containing sector's facet, hedged against angle rounding at vertices
  const double here = poly.facets[k](v);
  const double prev = poly.facets[(k + n - 1) % n](v);
  const double next = poly.facets[(k + 1) % n](v);
  return std::max({here, prev, next});
}

inline double lp_value(const LpNorm& lp, Vec2 v) {
  const double ax = std::abs(v.x), ay = std::abs(v.y);
  if (lp.infinite) return std::max(ax, ay);
  if (lp.p == 1.0) return ax + ay;
  if (lp.p == 2.0) return std::hypot(ax, ay);
  const double big = std::max(ax, ay);
  if (big == 0.0) return 0.0;
  const double r = std::min(ax, ay) / big;
  return big * std::pow(1.0 + std::pow(r, lp.p), 1.0 / lp.p);
}

inline bool nearly_collinear(Vec2 e1, Vec2 e2) {
  return std::abs(cross(e1, e2)) <= 1e-12 * euclidean(e1) * euclidean(e2) && dot(e1, e2) > 0.0;
}

inline bool symmetric_list(const std::vector<Vec2>& v, double tol) {
  if (v.size() % 2 != 0) return false;
  const std::size_t h = v.size() / 2;
  for (std::size_t k = 0; k < h; ++k)
    if (euclidean(v[k] + v[k + h]) > tol) return false;
  return true;
}

inline double max_radius(const std::vector<Vec2>& v) {
  double r = 0.0;
  for (Vec2 p : v) r = std::max(r, euclidean(p));
  return r;
}

/// Orients, merges collinear runs, checks convexity and symmetry, and builds
/// the facet functionals. Throws ValidationError on failure.
inline std::shared_ptr<const PolygonNorm> build_polygon(std::vector<Vec2> pts) {
  if (pts.size() < 2) throw ValidationError("polygon needs at least two vertices");
  for (Vec2 p : pts)
    if (!p.finite()) throw ValidationError("polygon vertex is not finite");
  const double scale = max_radius(pts);
  if (!(scale > 0.0)) throw ValidationError("polygon vertices are all zero");
  const double sym_tol = 1e-9 * scale;

  const bool halved = !symmetric_list(pts, sym_tol);
  if (halved) {
    // one half given: synthesize the other half by negation
    const std::size_t h = pts.size();
    for (std::size_t k = 0; k < h; ++k) pts.push_back(-pts[k]);
  }

  double area2 = 0.0;
  for (std::size_t k = 0; k < pts.size(); ++k) area2 += cross(pts[k], pts[(k + 1) % pts.size()]);
  if (area2 < 0.0) std::reverse(pts.begin(), pts.end());

  // drop duplicates and straight-through vertices
  bool changed = true;
  while (changed && pts.size() >= 3) {
    changed = false;
    for (std::size_t k = 0; k < pts.size(); ++k) {
      const std::size_t n = pts.size();
      const Vec2 prev = pts[(k + n - 1) % n], cur = pts[k], next = pts[(k + 1) % n];
      if (euclidean(cur - prev) <= 1e-14 * scale || nearly_collinear(cur - prev, next - cur)) {
        pts.erase(pts.begin() + static_cast<std::ptrdiff_t>(k));
        changed = true;
        break;
      }
    }
  }
  const std::size_t n = pts.size();
  if (n < 4 || n % 2 != 0) throw ValidationError("polygon is not centrally symmetric with at least 4 vertices");
  for (std::size_t k = 0; k < n; ++k) {
    const Vec2 e1 = pts[k] - pts[(k + n - 1) % n];
    const Vec2 e2 = pts[(k + 1) % n] - pts[k];
    if (!(cross(e1, e2) > 0.0))
      throw ValidationError(halved ? "polygon is not centrally symmetric (and not one half of a symmetric convex polygon)"
                                   : "polygon vertices are not in convex position");
  }

  // rotate so polar angles ascend from the smallest one
  std::size_t start = 0;
  for (std::size_t k = 1; k < n; ++k)
    if (wrap(polar_angle(pts[k])) < wrap(polar_angle(pts[start]))) start = k;
  std::rotate(pts.begin(), pts.begin() + static_cast<std::ptrdiff_t>(start), pts.end());

  auto poly = std::make_shared<PolygonNorm>();
  poly->vertices = pts;
  poly->angles.resize(n);
  for (std::size_t k = 0; k < n; ++k) poly->angles[k] = wrap(polar_angle(pts[k]));
  for (std::size_t k = 1; k < n; ++k)
    if (!(poly->angles[k] > poly->angles[k - 1]))
      throw ValidationError("polygon does not wind once around the origin");
  if (!symmetric_list(pts, sym_tol)) throw ValidationError("polygon is not centrally symmetric");
  poly->facets.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    const Vec2 p = pts[k], q = pts[(k + 1) % n];
    const Vec2 normal{q.y - p.y, p.x - q.x};  // outward for CCW order
    const double h = dot(normal, p);
    if (!(h > 0.0)) throw ValidationError("origin is not interior to the polygon");
    poly->facets[k] = {normal.x / h, normal.y / h};
  }
  return poly;
}

}  // namespace detail

/// A symmetric norm on R^2. Immutable, cheap to copy.
class Norm2 {
 public:
  static Norm2 lp(double p) {
    if (std::isinf(p) && p > 0) return lp_infinity();
    if (!(p >= 1.0) || !std::isfinite(p)) throw ValidationError("l_p norm needs p >= 1");
    Norm2 n;
    n.rep_ = LpNorm{p, false};
    return n;
  }
  static Norm2 lp_infinity() {
    Norm2 n;
    n.rep_ = LpNorm{std::numeric_limits<double>::infinity(), true};
    return n;
  }
  static Norm2 euclidean() { return ellipse(Mat2::identity()); }
  static Norm2 ellipse(const Mat2& m) {
    if (!m.finite()) throw ValidationError("ellipse matrix is not finite");
    if (std::abs(m.b - m.c) > 1e-12 * std::max(1.0, m.max_abs()))
      throw ValidationError("ellipse matrix is not symmetric");
    const Mat2 s{m.a, 0.5 * (m.b + m.c), 0.5 * (m.b + m.c), m.d};
    if (!(symmetric_eigen(s).lo > 0.0)) throw ValidationError("ellipse matrix is not positive definite");
    Norm2 n;
    n.rep_ = EllipseNorm{s};
    return n;
  }
  /// Vertices in order; either the full symmetric list or one half of it.
  static Norm2 polygon(std::vector<Vec2> vertices) {
    Norm2 n;
    n.rep_ = detail::build_polygon(std::move(vertices));
    return n;
  }

  double operator()(Vec2 v) const {
    if (!v.finite()) throw ValidationError("norm evaluated at a non-finite vector");
    return value(v);
  }

  /// Evaluation without the finiteness check; for inner loops.
  double value(Vec2 v) const {
    switch (rep_.index()) {
      case 0: return detail::lp_value(std::get<0>(rep_), v);
      case 1: return detail::polygon_gauge(*std::get<1>(rep_), v);
      default: {
        const Mat2& m = std::get<2>(rep_).m;
        return std::sqrt(std::max(0.0, dot(v, m * v)));
      }
    }
  }

  const LpNorm* as_lp() const { return std::get_if<LpNorm>(&rep_); }
  const PolygonNorm* as_polygon() const {
    auto p = std::get_if<std::shared_ptr<const PolygonNorm>>(&rep_);
    return p ? p->get() : nullptr;
  }
  const EllipseNorm* as_ellipse() const { return std::get_if<EllipseNorm>(&rep_); }

  bool is_ellipse() const {
    if (as_ellipse()) return true;
    const LpNorm* lp = as_lp();
    return lp && !lp->infinite && lp->p == 2.0;
  }

  /// Polygonal view of polygon, l_1 and l_inf norms.
  std::optional<Norm2> polygonal() const {
    if (as_polygon()) return *this;
    if (const LpNorm* lp = as_lp()) {
      if (lp->infinite) return polygon({{1, 1}, {-1, 1}, {-1, -1}, {1, -1}});
      if (lp->p == 1.0) return polygon({{1, 0}, {0, 1}, {-1, 0}, {0, -1}});
    }
    return std::nullopt;
  }

  std::string describe() const {
    if (const LpNorm* lp = as_lp()) return lp->infinite ? "l_inf" : "l_" + std::to_string(lp->p);
    if (const PolygonNorm* p = as_polygon()) return std::to_string(p->vertices.size()) + "-gon";
    return "ellipse";
  }

 private:
  std::variant<LpNorm, std::shared_ptr<const PolygonNorm>, EllipseNorm> rep_ = LpNorm{};
};

inline double eval_norm(const Norm2& norm, Vec2 v) { return norm(v); }

/// Returns the dual norm: l_p -> l_q, ellipse(M) -> ellipse(M^-1), polygon ->
/// its polar polygon.
inline Norm2 dual_norm(const Norm2& norm) {
  if (const LpNorm* lp = norm.as_lp()) {
    if (lp->infinite) return Norm2::lp(1.0);
    if (lp->p == 1.0) return Norm2::lp_infinity();
    return Norm2::lp(lp->p / (lp->p - 1.0));
  }
  if (const EllipseNorm* e = norm.as_ellipse()) return Norm2::ellipse(e->m.inverse());
  const PolygonNorm& poly = *norm.as_polygon();
  std::vector<Vec2> v;
  v.reserve(poly.facets.size());
  for (const Functional2& f : poly.facets) v.push_back(f.as_vector());
  return Norm2::polygon(std::move(v));
}

/// Dual norm of a functional, i.e. sup of |f(x)| over the unit ball.
inline double functional_norm(const Norm2& norm, Functional2 f) {
  if (const LpNorm* lp = norm.as_lp()) {
    LpNorm q{};
    if (lp->infinite) {
      q = {1.0, false};
    } else if (lp->p == 1.0) {
      q = {0.0, true};
    } else {
      q = {lp->p / (lp->p - 1.0), false};
    }
    return detail::lp_value(q, f.as_vector());
  }
  if (const EllipseNorm* e = norm.as_ellipse()) {
    const Vec2 a = f.as_vector();
    return std::sqrt(dot(a, e->m.inverse() * a));
  }
  double best = 0.0;
  for (Vec2 v : norm.as_polygon()->vertices) best = std::max(best, std::abs(f(v)));
  return best;
}

/// The normalized sphere curve theta -> gamma(theta + offset).
struct SphereCurve {
  Norm2 norm;
  double offset = 0.0;

  Vec2 point(double theta) const {
    const Vec2 u = unit_direction(theta + offset);
    return u / norm.value(u);
  }
};

inline Vec2 sphere_point(const SphereCurve& curve, double theta) { return curve.point(theta); }
inline Vec2 sphere_point(const Norm2& norm, double theta) { return SphereCurve{norm, 0.0}.point(theta); }

/// Euclidean length of the unit-sphere point in direction theta.
inline double radial_function(const Norm2& norm, double theta) {
  return 1.0 / norm.value(unit_direction(theta));
}

/// Parameter of x on the sphere curve (its polar angle in [0, 2pi)).
inline double sphere_parameter(Vec2 x) { return wrap(polar_angle(x)); }

namespace detail {

inline void require_unit(const Norm2& norm, Vec2 x, const char* who) {
  if (!x.finite()) throw ValidationError(std::string(who) + ": non-finite point");
  const double n = norm.value(x);
  if (std::abs(n - 1.0) > 1e-9)
    throw ValidationError(std::string(who) + ": point is not on the unit sphere (norm " + std::to_string(n) + ")");
}

/// Facet index of the sector containing x, and whether x sits on a vertex
/// (then `vertex` is the index of that vertex).
struct PolygonLocation {
  std::size_t facet = 0;
  std::optional<std::size_t> vertex;
};

inline PolygonLocation locate(const PolygonNorm& poly, Vec2 x) {
  const std::size_t n = poly.vertices.size();
  const double phi = wrap(polar_angle(x));
  auto it = std::upper_bound(poly.angles.begin(), poly.angles.end(), phi);
  const std::size_t k = it == poly.angles.begin() ? n - 1 : static_cast<std::size_t>(it - poly.angles.begin()) - 1;
  PolygonLocation loc{k, std::nullopt};
  const double scale = euclidean(x);
  for (std::size_t j : {k, (k + 1) % n}) {
    if (euclidean(poly.vertices[j] - x) <= 1e-10 * std::max(1.0, scale)) loc.vertex = j;
  }
  return loc;
}

}  // namespace detail

/// A norm-one functional x* with x*(x) = 1 for a unit vector x. At polygon
/// corners the two adjacent facet functionals are averaged and renormalized.
inline Functional2 supporting_functional(const Norm2& norm, Vec2 x) {
  detail::require_unit(norm, x, "supporting_functional");
  if (auto poly_norm = norm.polygonal()) {
    const PolygonNorm& poly = *poly_norm->as_polygon();
    const auto loc = detail::locate(poly, x);
    if (loc.vertex) {
      const std::size_t n = poly.vertices.size();
      const std::size_t v = *loc.vertex;
      const Functional2 avg = (poly.facets[(v + n - 1) % n] + poly.facets[v]) * 0.5;
      return avg * (1.0 / functional_norm(*poly_norm, avg));
    }
    // pick the facet actually attaining the gauge at x
    const std::size_t n = poly.vertices.size();
    std::size_t best = loc.facet;
    for (std::size_t j : {(loc.facet + n - 1) % n, (loc.facet + 1) % n})
      if (poly.facets[j](x) > poly.facets[best](x)) best = j;
    return poly.facets[best];
  }
  if (const EllipseNorm* e = norm.as_ellipse()) {
    const Vec2 g = e->m * x;
    const Functional2 f{g.x, g.y};
    return f * (1.0 / functional_norm(norm, f));
  }
  const LpNorm& lp = *norm.as_lp();  // 1 < p < inf here
  auto comp = [&](double c) { return std::copysign(std::pow(std::abs(c), lp.p - 1.0), c); };
  const Functional2 f{comp(x.x), comp(x.y)};
  return f * (1.0 / functional_norm(norm, f));
}

/// Every "extreme" supporting functional at x: the averaged one, plus both
/// adjacent facet functionals when x is a polygon corner.
inline std::vector<Functional2> extreme_supporting_functionals(const Norm2& norm, Vec2 x) {
  std::vector<Functional2> out{supporting_functional(norm, x)};
  if (auto poly_norm = norm.polygonal()) {
    const PolygonNorm& poly = *poly_norm->as_polygon();
    const std::size_t n = poly.vertices.size();
    // any facet active at x within tolerance supports x
    for (std::size_t k = 0; k < n; ++k)
      if (poly.facets[k](x) >= 1.0 - 1e-9) out.push_back(poly.facets[k]);
  }
  return out;
}

}  // namespace planenorm
