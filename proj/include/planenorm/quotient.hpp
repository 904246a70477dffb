#pragma once

// Norms on R^n given explicitly, quotients by codimension-2 subspaces,
// restriction to 2D subspaces, and the lift of a planar certificate to the
// ambient pair of spaces.

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "planenorm/certificate.hpp"
#include "planenorm/norm2d.hpp"
#include "planenorm/numeric.hpp"

namespace planenorm {

using VecN = Eigen::VectorXd;
using MatN = Eigen::MatrixXd;

/// A norm on R^n: l_p, max |f_i(x)| over facet functionals, or sqrt(x^T M x).
class NormN {
 public:
  enum class Kind { Lp, Polytope, Ellipsoid };

  static NormN lp(int dim, double p) {
    if (std::isinf(p) && p > 0) return lp_infinity(dim);
    if (!(p >= 1.0) || !std::isfinite(p)) throw ValidationError("l_p norm needs p >= 1");
    NormN n(dim);
    n.kind_ = Kind::Lp;
    n.p_ = p;
    return n;
  }
  static NormN lp_infinity(int dim) {
    NormN n(dim);
    n.kind_ = Kind::Lp;
    n.infinite_ = true;
    return n;
  }
  static NormN polytope(std::vector<VecN> facets) {
    if (facets.empty()) throw ValidationError("polytope needs facets");
    const int dim = static_cast<int>(facets.front().size());
    NormN n(dim);
    MatN f(static_cast<Eigen::Index>(facets.size()), dim);
    for (std::size_t i = 0; i < facets.size(); ++i) {
      if (facets[i].size() != dim) throw ValidationError("facet functionals differ in dimension");
      if (!facets[i].allFinite()) throw ValidationError("facet functional is not finite");
      f.row(static_cast<Eigen::Index>(i)) = facets[i].transpose();
    }
    if (Eigen::ColPivHouseholderQR<MatN>(f).rank() < dim) throw ValidationError("facets do not span the dual space (ball is unbounded)");
    n.kind_ = Kind::Polytope;
    n.facets_ = std::move(facets);
    return n;
  }
  static NormN ellipsoid(const MatN& m) {
    if (m.rows() != m.cols() || m.rows() < 2) throw ValidationError("ellipsoid matrix must be square");
    if (!m.allFinite() || (m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, m.cwiseAbs().maxCoeff()))
      throw ValidationError("ellipsoid matrix must be finite and symmetric");
    Eigen::SelfAdjointEigenSolver<MatN> es(m);
    if (!(es.eigenvalues().minCoeff() > 0.0)) throw ValidationError("ellipsoid matrix is not positive definite");
    NormN n(static_cast<int>(m.rows()));
    n.kind_ = Kind::Ellipsoid;
    n.m_ = 0.5 * (m + m.transpose());
    return n;
  }

  int dim() const { return dim_; }
  Kind kind() const { return kind_; }
  double p() const { return p_; }
  bool infinite() const { return infinite_; }
  const MatN& matrix() const { return m_; }

  double operator()(const VecN& x) const {
    if (x.size() != dim_) throw ValidationError("vector dimension does not match the norm");
    if (!x.allFinite()) throw ValidationError("norm evaluated at a non-finite vector");
    return value(x);
  }

  double value(const VecN& x) const {
    switch (kind_) {
      case Kind::Lp:
        if (infinite_) return x.cwiseAbs().maxCoeff();
        if (p_ == 1.0) return x.cwiseAbs().sum();
        if (p_ == 2.0) return x.norm();
        return x.lpNorm<Eigen::Infinity>() == 0.0 ? 0.0 : lp_scaled(x);
      case Kind::Polytope: {
        double best = 0.0;
        for (const VecN& f : facets_) best = std::max(best, std::abs(f.dot(x)));
        return best;
      }
      default:
        return std::sqrt(std::max(0.0, x.dot(m_ * x)));
    }
  }

  /// Facet functionals when the ball is a polytope (including l_1, l_inf).
  std::optional<std::vector<VecN>> facet_list() const {
    if (kind_ == Kind::Polytope) return facets_;
    if (kind_ == Kind::Lp && infinite_) {
      std::vector<VecN> out;
      for (int i = 0; i < dim_; ++i) out.push_back(VecN::Unit(dim_, i));
      return out;
    }
    if (kind_ == Kind::Lp && p_ == 1.0) {
      // one functional per sign pattern up to overall sign
      std::vector<VecN> out;
      for (unsigned mask = 0; mask < (1u << (dim_ - 1)); ++mask) {
        VecN f = VecN::Ones(dim_);
        for (int i = 1; i < dim_; ++i)
          if (mask & (1u << (i - 1))) f[i] = -1.0;
        out.push_back(f);
      }
      return out;
    }
    return std::nullopt;
  }

  /// Shape matrix when the norm is Euclidean-type.
  std::optional<MatN> ellipsoid_matrix() const {
    if (kind_ == Kind::Ellipsoid) return m_;
    if (kind_ == Kind::Lp && !infinite_ && p_ == 2.0) return MatN::Identity(dim_, dim_);
    return std::nullopt;
  }

  std::string describe() const {
    const std::string d = std::to_string(dim_);
    if (kind_ == Kind::Lp) return infinite_ ? "l_inf^" + d : "l_" + std::to_string(p_) + "^" + d;
    if (kind_ == Kind::Polytope) return "polytope(" + std::to_string(facets_.size()) + " facets)^" + d;
    return "ellipsoid^" + d;
  }

  const std::vector<VecN>& facets() const { return facets_; }

 private:
  explicit NormN(int dim) : dim_(dim) {
    if (dim < 2) throw ValidationError("ambient dimension must be at least 2");
  }
  double lp_scaled(const VecN& x) const {
    const double big = x.cwiseAbs().maxCoeff();
    double s = 0.0;
    for (Eigen::Index i = 0; i < x.size(); ++i) s += std::pow(std::abs(x[i]) / big, p_);
    return big * std::pow(s, 1.0 / p_);
  }

  int dim_ = 2;
  Kind kind_ = Kind::Lp;
  double p_ = 2.0;
  bool infinite_ = false;
  std::vector<VecN> facets_;
  MatN m_;
};

/// Maximum number of active-set systems a polytope quotient evaluation may try.
inline constexpr std::size_t kMaxActiveSets = 200000;

namespace detail {

inline MatN stack_columns(const std::vector<VecN>& vs, int dim, const char* what) {
  MatN b(dim, static_cast<Eigen::Index>(vs.size()));
  for (std::size_t i = 0; i < vs.size(); ++i) {
    if (vs[i].size() != dim) throw ValidationError(std::string(what) + ": basis vector has the wrong dimension");
    if (!vs[i].allFinite()) throw ValidationError(std::string(what) + ": basis vector is not finite");
    b.col(static_cast<Eigen::Index>(i)) = vs[i];
  }
  if (!vs.empty() && Eigen::ColPivHouseholderQR<MatN>(b).rank() < static_cast<Eigen::Index>(vs.size()))
    throw ValidationError(std::string(what) + ": basis vectors are dependent");
  return b;
}

inline std::size_t binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0;
  double r = 1.0;
  for (std::size_t i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
  return static_cast<std::size_t>(std::llround(r));
}

/// Convex hull (counter-clockwise, no collinear points) of planar points.
inline std::vector<Vec2> convex_hull(std::vector<Vec2> pts) {
  std::sort(pts.begin(), pts.end(), [](Vec2 a, Vec2 b) { return a.x < b.x || (a.x == b.x && a.y < b.y); });
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() < 3) return pts;
  std::vector<Vec2> h(2 * pts.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    while (k >= 2 && cross(h[k - 1] - h[k - 2], pts[i] - h[k - 2]) <= 0.0) --k;
    h[k++] = pts[i];
  }
  for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && cross(h[k - 1] - h[k - 2], pts[i] - h[k - 2]) <= 0.0) --k;
    h[k++] = pts[i];
  }
  h.resize(k - 1);
  return h;
}

}  // namespace detail

/// X / X0 presented on the orthogonal complement of X0: the class of x is
/// identified with Q x = W^T x where W is an orthonormal basis of X0-perp.
struct QuotientPresentation {
  NormN ambient = NormN::lp(2, 2.0);
  MatN x0_basis;  ///< n x (n-2), as given
  MatN z;         ///< orthonormal basis of X0
  MatN w;         ///< orthonormal basis of the complement
  Norm2 induced;  ///< polygonal approximation (720 vertices before merging)
  double approx_gap = 0.0;  ///< sup relative gap of `induced` over a finer grid
  std::size_t active_sets = 0;

  MatN q() const { return w.transpose(); }

  /// argmin over c of ||W v + Z c||.
  VecN best_shift(Vec2 v) const {
    const VecN base = w.col(0) * v.x + w.col(1) * v.y;
    const Eigen::Index k = z.cols();
    if (auto m = ambient.ellipsoid_matrix()) {
      const MatN zm = z.transpose() * (*m);
      return -(zm * z).ldlt().solve(zm * base);
    }
    if (auto fs = ambient.facet_list()) return polytope_shift(base, *fs);
    // smooth l_p: cyclic coordinate descent with golden-section line searches
    VecN c = VecN::Zero(k);
    const double scale = ambient.value(base) + 1.0;
    // the argmin of a smooth function is only resolved to about sqrt(eps), so
    // stop on the objective rather than on the step
    double current = ambient.value(base);
    for (int sweep = 0; sweep < 200; ++sweep) {
      for (Eigen::Index j = 0; j < k; ++j) {
        auto f = [&](double t) {
          VecN cc = c;
          cc[j] = t;
          return -ambient.value(base + z * cc);
        };
        const Extremum e = golden_max(f, c[j] - 2.0 * scale, c[j] + 2.0 * scale, 1e-12);
        if (-e.value < ambient.value(base + z * c)) c[j] = e.arg;
      }
      const double next = ambient.value(base + z * c);
      if (k == 1 || current - next < 1e-15 * (1.0 + next)) break;
      current = next;
    }
    return c;
  }

  /// Exact quotient norm of the class with complement coordinates v.
  double exact(Vec2 v) const {
    const VecN base = w.col(0) * v.x + w.col(1) * v.y;
    return ambient.value(base + z * best_shift(v));
  }

  /// The minimizing representative W v + Z c of the class.
  VecN representative(Vec2 v) const { return w.col(0) * v.x + w.col(1) * v.y + z * best_shift(v); }

 private:
  /// min over c of max_i |f_i . (base + Z c)| by enumerating active sets of
  /// k + 1 signed facets (the optimum of this small LP sits at such a vertex).
  VecN polytope_shift(const VecN& base, const std::vector<VecN>& fs) const {
    const Eigen::Index k = z.cols();
    if (k == 0) return VecN::Zero(0);
    const std::size_t m = fs.size();
    const std::size_t r = static_cast<std::size_t>(k) + 1;
    std::vector<double> fb(m);
    MatN fz(static_cast<Eigen::Index>(m), k);
    for (std::size_t i = 0; i < m; ++i) {
      fb[i] = fs[i].dot(base);
      fz.row(static_cast<Eigen::Index>(i)) = (fs[i].transpose() * z);
    }
    double best_t = INFINITY;
    VecN best = VecN::Zero(k);
    std::vector<std::size_t> idx(r);
    for (std::size_t i = 0; i < r; ++i) idx[i] = i;
    MatN a(static_cast<Eigen::Index>(r), k + 1);
    VecN rhs(static_cast<Eigen::Index>(r));
    while (true) {
      for (unsigned signs = 0; signs < (1u << r); ++signs) {
        for (std::size_t j = 0; j < r; ++j) {
          const double s = (signs & (1u << j)) ? -1.0 : 1.0;
          const auto row = static_cast<Eigen::Index>(j);
          a.row(row).head(k) = s * fz.row(static_cast<Eigen::Index>(idx[j]));
          a(row, k) = -1.0;
          rhs[row] = -s * fb[idx[j]];
        }
        Eigen::FullPivLU<MatN> lu(a);
        if (!lu.isInvertible()) continue;
        const VecN sol = lu.solve(rhs);
        const double t = sol[k];
        if (!(t < best_t)) continue;
        const VecN c = sol.head(k);
        bool feasible = true;
        for (std::size_t i = 0; i < m && feasible; ++i)
          if (std::abs(fb[i] + fz.row(static_cast<Eigen::Index>(i)).dot(c)) > t * (1.0 + 1e-12) + 1e-15) feasible = false;
        if (feasible) {
          best_t = t;
          best = c;
        }
      }
      // next combination
      std::size_t pos = r;
      while (pos > 0 && idx[pos - 1] == m - r + pos - 1) --pos;
      if (pos == 0) break;
      ++idx[pos - 1];
      for (std::size_t j = pos; j < r; ++j) idx[j] = idx[j - 1] + 1;
    }
    return best;
  }
};

/// Polygon through the unit-sphere points of a planar norm given only by
/// evaluation, at `half` directions of [0, pi) and their negatives. Intervals
/// whose midpoint sits farther than `refine` (relative) outside the chord are
/// bisected, up to 16 times; this only triggers near corners of the ball.
template <class F>
Norm2 polygonalize(F&& eval, std::size_t half = 360, double refine = 1e-4) {
  auto point = [&](double th) {
    const Vec2 u = unit_direction(th);
    return u / eval(u);
  };
  std::vector<Vec2> base(half + 1);
  parallel_for(half, [&](std::size_t i) { base[i] = point(kPi * static_cast<double>(i) / static_cast<double>(half)); }, 16);
  base[half] = -base[0];
  std::vector<Vec2> pts;
  std::function<void(double, Vec2, double, Vec2, int)> split = [&](double a, Vec2 pa, double b, Vec2 pb, int depth) {
    const double m = 0.5 * (a + b);
    const Vec2 pm = point(m);
    // radius of the chord pa-pb along the direction m
    const Vec2 u = unit_direction(m);
    const double chord = cross(pa, pb) / cross(u, pb - pa);
    if (depth < 16 && euclidean(pm) > chord * (1.0 + refine)) {
      split(a, pa, m, pm, depth + 1);
      pts.push_back(pm);
      split(m, pm, b, pb, depth + 1);
    }
  };
  for (std::size_t i = 0; i < half; ++i) {
    pts.push_back(base[i]);
    const double a = kPi * static_cast<double>(i) / static_cast<double>(half);
    split(a, base[i], a + kPi / static_cast<double>(half), base[i + 1], 0);
  }
  return Norm2::polygon(std::move(pts));
}

/// Sup over `factor` times as many directions as `half` of
/// |approx(u) / exact(u) - 1|; the grid contains every chord midpoint.
template <class F>
double polygon_gap(const Norm2& approx, F&& exact, std::size_t half = 360, std::size_t factor = 10) {
  const std::size_t fine = half * factor;
  std::vector<double> gaps(fine);
  parallel_for(fine, [&](std::size_t i) {
    const Vec2 u = unit_direction(kPi * static_cast<double>(i) / static_cast<double>(fine));
    gaps[i] = std::abs(approx.value(u) / exact(u) - 1.0);
  }, 16);
  return *std::max_element(gaps.begin(), gaps.end());
}

/// The quotient X / X0 for a codimension-2 subspace X0 (n - 2 basis vectors).
inline QuotientPresentation quotient_norm(const NormN& ambient, const std::vector<VecN>& x0_basis) {
  const int n = ambient.dim();
  if (n > 8) throw ValidationError("quotient: ambient dimension above the supported limit of 8");
  if (static_cast<int>(x0_basis.size()) != n - 2) throw ValidationError("quotient: subspace must have codimension 2");
  QuotientPresentation qp;
  qp.ambient = ambient;
  qp.x0_basis = detail::stack_columns(x0_basis, n, "quotient");
  if (n == 2) {
    qp.z = MatN::Zero(n, 0);
  } else {
    Eigen::HouseholderQR<MatN> qr(qp.x0_basis);
    qp.z = (qr.householderQ() * MatN::Identity(n, n)).leftCols(n - 2);
  }
  // complement from the projected standard axes, in order, so that
  // coordinate subspaces give coordinate quotients
  qp.w = MatN::Zero(n, 2);
  int found = 0;
  for (int i = 0; i < n && found < 2; ++i) {
    VecN v = VecN::Unit(n, i) - qp.z * (qp.z.transpose() * VecN::Unit(n, i));
    for (int j = 0; j < found; ++j) v -= qp.w.col(j) * qp.w.col(j).dot(v);
    if (v.norm() > 1e-6) qp.w.col(found++) = v.normalized();
  }
  if (auto fs = ambient.facet_list()) {
    const std::size_t r = static_cast<std::size_t>(n - 1);
    qp.active_sets = detail::binomial(fs->size(), r) * (std::size_t{1} << r);
    if (qp.active_sets > kMaxActiveSets) throw ValidationError("quotient: polytope has too many facets for active-set enumeration");
  }
  auto exact = [&](Vec2 v) { return qp.exact(v); };
  qp.induced = polygonalize(exact);
  qp.approx_gap = polygon_gap(qp.induced, exact);
  if (!(qp.approx_gap < 1e-3)) throw StageError("quotient", "polygonal approximation gap " + std::to_string(qp.approx_gap) + " exceeds 1e-3");
  return qp;
}

/// The restriction of an ambient norm to span(b1, b2) in basis coordinates.
struct RestrictedCodomain {
  Norm2 norm;
  MatN embed;  ///< n x 2, columns b1, b2
  bool exact = true;
  double approx_gap = 0.0;

  VecN embed_vec(Vec2 v) const { return embed.col(0) * v.x + embed.col(1) * v.y; }
};

inline RestrictedCodomain restrict_codomain(const NormN& ambient, const std::vector<VecN>& y0_basis) {
  const int n = ambient.dim();
  if (y0_basis.size() != 2) throw ValidationError("restrict_codomain: need exactly two basis vectors");
  RestrictedCodomain rc;
  rc.embed = detail::stack_columns(y0_basis, n, "restrict_codomain");
  const MatN& b = rc.embed;

  // l_p on two distinct coordinate axes stays l_p
  if (ambient.kind() == NormN::Kind::Lp) {
    int axis[2] = {-1, -1};
    for (int j = 0; j < 2; ++j) {
      for (int i = 0; i < n; ++i) {
        if (std::abs(b(i, j)) == 1.0 && b.col(j).cwiseAbs().sum() == 1.0) axis[j] = i;
      }
    }
    if (axis[0] >= 0 && axis[1] >= 0 && axis[0] != axis[1]) {
      rc.norm = ambient.infinite() ? Norm2::lp_infinity() : Norm2::lp(ambient.p());
      return rc;
    }
  }
  if (auto m = ambient.ellipsoid_matrix()) {
    const MatN g = b.transpose() * (*m) * b;
    rc.norm = Norm2::ellipse({g(0, 0), g(0, 1), g(1, 0), g(1, 1)});
    return rc;
  }
  if (auto fs = ambient.facet_list()) {
    // ||B v|| = max |(B^T f_i) . v|: the dual ball is the hull of the +-B^T f_i
    std::vector<Vec2> g;
    for (const VecN& f : *fs) {
      const VecN gi = b.transpose() * f;
      g.push_back({gi[0], gi[1]});
      g.push_back({-gi[0], -gi[1]});
    }
    rc.norm = dual_norm(Norm2::polygon(detail::convex_hull(g)));
    return rc;
  }
  auto exact = [&](Vec2 v) { return ambient.value(b.col(0) * v.x + b.col(1) * v.y); };
  rc.norm = polygonalize(exact);
  rc.exact = false;
  rc.approx_gap = polygon_gap(rc.norm, exact);
  return rc;
}

struct LiftOptions {
  std::size_t samples = 1000000;
  double band = 1e-9;
  /// Ambient dimension above which only the analytic identities are checked.
  int max_scan_dim = 4;
};

struct LiftReport {
  VecN x0_hat;
  double x0_class_norm = 0.0;  ///< exact quotient norm of [x0] before normalizing
  std::vector<MatN> operators;
  std::vector<double> norms_2d;
  std::vector<double> ambient_norms;
  std::vector<double> values;
  std::vector<double> distances;
  double delta = 0.0;
  double slack = 0.0;
  double delta_prime = 0.0;
  bool scanned = false;
  bool pass = false;
  std::string detail;
};

namespace detail {

/// Deterministic, roughly uniform points on the Euclidean unit sphere of R^n.
inline std::vector<VecN> sphere_cloud(int n, std::size_t count) {
  std::vector<VecN> pts(count, VecN(n));
  if (n == 2) {
    for (std::size_t i = 0; i < count; ++i) {
      const Vec2 u = unit_direction(kTwoPi * static_cast<double>(i) / static_cast<double>(count));
      pts[i] << u.x, u.y;
    }
  } else if (n == 3) {
    // Fibonacci lattice
    const double golden = kPi * (3.0 - std::sqrt(5.0));
    for (std::size_t i = 0; i < count; ++i) {
      const double zc = 1.0 - 2.0 * (static_cast<double>(i) + 0.5) / static_cast<double>(count);
      const double r = std::sqrt(std::max(0.0, 1.0 - zc * zc));
      const double phi = golden * static_cast<double>(i);
      pts[i] << r * std::cos(phi), r * std::sin(phi), zc;
    }
  } else {
    std::mt19937_64 rng(20240611);
    std::normal_distribution<double> g;
    for (auto& p : pts) {
      for (int j = 0; j < n; ++j) p[j] = g(rng);
      p.normalize();
    }
  }
  return pts;
}

/// Local maximization of ||T x||_Y / ||x||_X from a start point by compass
/// search, returning the point scaled onto the unit sphere of X.
inline VecN polish_ratio(const NormN& x, const NormN& y, const MatN& t, VecN p) {
  auto ratio = [&](const VecN& v) { return y.value(t * v) / x.value(v); };
  double best = ratio(p);
  const int n = static_cast<int>(p.size());
  for (double step = 1e-2; step > 1e-13; step *= 0.5) {
    bool improved = true;
    while (improved) {
      improved = false;
      for (int j = 0; j < n; ++j) {
        for (double s : {step, -step}) {
          VecN q = p;
          q[j] += s;
          const double r = ratio(q);
          if (r > best) {
            best = r;
            p = q / x.value(q);
            improved = true;
          }
        }
      }
    }
  }
  return p / x.value(p);
}

}  // namespace detail

/// Lifts each planar T_lambda to embed o T_lambda o Q and re-verifies norms,
/// values and distances in the ambient spaces.
inline LiftReport lift_certificate(const QuotientPresentation& qx, const NormN& ambient_y,
                                   const RestrictedCodomain& ry, const Certificate& cert, const LiftOptions& opt = {}) {
  const NormN& ax = qx.ambient;
  const int n = ax.dim();
  if (ry.embed.rows() != ambient_y.dim()) throw ValidationError("lift: codomain embedding does not match the ambient norm");
  LiftReport rep;
  rep.delta = cert.seed.delta;
  rep.x0_hat = qx.representative(cert.seed.x0);
  rep.x0_class_norm = ax.value(rep.x0_hat);
  rep.x0_hat /= rep.x0_class_norm;
  // approximation budget: both planar norms may overstate the exact ones by
  // their recorded gaps, and x0 was rescaled onto the ambient sphere
  rep.slack = rep.delta * (qx.approx_gap + ry.approx_gap) + std::abs(1.0 - rep.x0_class_norm);
  rep.delta_prime = rep.delta - rep.slack;

  const MatN q = qx.q();
  for (const Operator2& t : cert.operators) {
    MatN tm(2, 2);
    tm << t.matrix.a, t.matrix.b, t.matrix.c, t.matrix.d;
    rep.operators.push_back(ry.embed * tm * q);
    rep.norms_2d.push_back(operator_norm(t).norm);
    rep.values.push_back(ambient_y.value(rep.operators.back() * rep.x0_hat));
  }

  bool ok = rep.delta_prime > 0.0;
  if (!ok) rep.detail = "lift slack " + std::to_string(rep.slack) + " consumes delta " + std::to_string(rep.delta);
  if (n <= opt.max_scan_dim) {
    rep.scanned = true;
    std::vector<VecN> pts = detail::sphere_cloud(n, opt.samples);
    for (VecN& p : pts) p /= ax.value(p);
    std::vector<double> vals(pts.size());
    for (std::size_t k = 0; k < rep.operators.size(); ++k) {
      const MatN& tm = rep.operators[k];
      parallel_for(pts.size(), [&](std::size_t i) { vals[i] = ambient_y.value(tm * pts[i]); });
      const double m_sample = *std::max_element(vals.begin(), vals.end());
      // polish the best candidates
      std::vector<std::size_t> cand;
      for (std::size_t i = 0; i < pts.size(); ++i)
        if (vals[i] >= m_sample - 1e-2) cand.push_back(i);
      std::sort(cand.begin(), cand.end(), [&](std::size_t a, std::size_t b) { return vals[a] > vals[b]; });
      if (cand.size() > 64) cand.resize(64);
      std::vector<VecN> polished;
      double m = m_sample;
      for (std::size_t i : cand) {
        polished.push_back(detail::polish_ratio(ax, ambient_y, tm, pts[i]));
        m = std::max(m, ambient_y.value(tm * polished.back()));
      }
      const double level = m - opt.band;
      double d = INFINITY;
      auto consider = [&](const VecN& p) {
        d = std::min({d, ax.value(p - rep.x0_hat), ax.value(-p - rep.x0_hat)});
      };
      for (const VecN& p : polished)
        if (ambient_y.value(tm * p) >= level) consider(p);
      for (std::size_t i = 0; i < pts.size(); ++i)
        if (vals[i] >= level) consider(pts[i]);
      rep.ambient_norms.push_back(m);
      rep.distances.push_back(d);
      if (std::abs(m - rep.norms_2d[k]) > 1e-6 && ok) {
        ok = false;
        rep.detail = "ambient norm " + std::to_string(m) + " differs from planar norm " + std::to_string(rep.norms_2d[k]);
      }
      if (!(d >= rep.delta_prime) && ok) {
        ok = false;
        rep.detail = "ambient band at distance " + std::to_string(d) + " below delta' " + std::to_string(rep.delta_prime);
      }
    }
  }
  if (!rep.values.empty() && rep.values.back() < 1.0 - 1e-4 && ok) {
    ok = false;
    rep.detail = "lifted values do not approach 1";
  }
  rep.pass = ok;
  if (ok) rep.detail = "lift verified";
  return rep;
}

}  // namespace planenorm
