#pragma once

// Maximal-area ellipse inscribed in a symmetric planar unit ball, its contact
// points, and the operator from a Hilbert plane onto that ellipse.

#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "planenorm/norm2d.hpp"
#include "planenorm/numeric.hpp"
#include "planenorm/operators.hpp"

namespace planenorm {

/// The ellipse {A u : |u|_2 <= 1} with A symmetric positive definite.
struct JohnEllipse {
  Mat2 a;
  /// Contact points A u on the unit sphere, one per antipodal pair.
  std::vector<Vec2> contacts;
  /// Parameters phi of the contacts, u = (cos phi, sin phi), in [0, pi).
  std::vector<double> contact_angles;
  /// det A after each barrier stage.
  std::vector<double> det_history;
  /// max over the boundary of ||A u|| - 1 (<= 0 means feasible).
  double violation = 0.0;
};

namespace detail {

/// Entries (a, b, c) of A = [[a, b], [b, c]].
inline Mat2 sym(const Eigen::Vector3d& p) { return {p[0], p[1], p[1], p[2]}; }

/// Barrier objective log det A + mu * sum log(1 - |A f_j|^2) with gradient and
/// Hessian in the entries. Returns false outside the domain.
inline bool barrier_eval(const Eigen::Vector3d& p, const std::vector<Vec2>& fs, double mu, double& val,
                         Eigen::Vector3d* grad, Eigen::Matrix3d* hess) {
  const double d = p[0] * p[2] - p[1] * p[1];
  if (!(d > 0.0) || !(p[0] > 0.0)) return false;
  val = std::log(d);
  Eigen::Vector3d gd(p[2], -2.0 * p[1], p[0]);
  if (grad) *grad = gd / d;
  if (hess) {
    Eigen::Matrix3d h2;
    h2 << 0, 0, 1, 0, -2, 0, 1, 0, 0;
    *hess = h2 / d - gd * gd.transpose() / (d * d);
  }
  const Mat2 a = sym(p);
  for (const Vec2& f : fs) {
    const Vec2 g = a * f;
    const double q = dot(g, g);
    if (!(q < 1.0)) return false;
    val += mu * std::log(1.0 - q);
    if (grad || hess) {
      // dA/da = E11, dA/db = E12 + E21, dA/dc = E22 applied to f
      const Vec2 w[3] = {{f.x, 0.0}, {f.y, f.x}, {0.0, f.y}};
      Eigen::Vector3d dq;
      for (int k = 0; k < 3; ++k) dq[k] = 2.0 * dot(g, w[k]);
      if (grad) *grad -= mu * dq / (1.0 - q);
      if (hess) {
        Eigen::Matrix3d d2q;
        for (int k = 0; k < 3; ++k)
          for (int l = 0; l < 3; ++l) d2q(k, l) = 2.0 * dot(w[k], w[l]);
        *hess -= mu * (d2q / (1.0 - q) + dq * dq.transpose() / ((1.0 - q) * (1.0 - q)));
      }
    }
  }
  return true;
}

/// Damped Newton ascent of the (concave) barrier objective.
inline Eigen::Vector3d barrier_maximize(Eigen::Vector3d p, const std::vector<Vec2>& fs, double mu) {
  for (int it = 0; it < 200; ++it) {
    double f0 = 0.0;
    Eigen::Vector3d g;
    Eigen::Matrix3d h;
    if (!barrier_eval(p, fs, mu, f0, &g, &h)) break;
    Eigen::Vector3d step = (-h).ldlt().solve(g);
    if (!step.allFinite() || g.dot(step) <= 0.0) step = g;
    const double decrement = g.dot(step);
    if (decrement < 1e-20) break;
    double s = 1.0;
    bool moved = false;
    for (int ls = 0; ls < 60; ++ls, s *= 0.5) {
      double f1 = 0.0;
      const Eigen::Vector3d cand = p + s * step;
      if (barrier_eval(cand, fs, mu, f1, nullptr, nullptr) && f1 >= f0 + 0.25 * s * decrement) {
        p = cand;
        moved = true;
        break;
      }
    }
    if (!moved) break;
  }
  return p;
}

/// Functionals whose constraints |A f| <= 1 describe containment in the ball.
inline std::vector<Vec2> dual_sample(const Norm2& norm, std::size_t count) {
  if (auto poly = norm.polygonal()) {
    std::vector<Vec2> fs;
    for (const Functional2& f : poly->as_polygon()->facets) fs.push_back(f.as_vector());
    return fs;
  }
  const Norm2 dual = dual_norm(norm);
  std::vector<Vec2> fs(count);
  for (std::size_t i = 0; i < count; ++i) fs[i] = sphere_point(dual, kTwoPi * static_cast<double>(i) / static_cast<double>(count));
  return fs;
}

}  // namespace detail

/// Largest ||A u|| over unit u, i.e. how far {A u} sticks out of the ball.
inline Extremum ellipse_excess(const Norm2& norm, const Mat2& a, const SweepOptions& opt = {}) {
  return maximize_periodic([&](double phi) { return norm.value(a * unit_direction(phi)); }, 0.0, kPi, opt);
}

inline JohnEllipse john_ellipse(const Norm2& norm) {
  std::vector<Vec2> fs = detail::dual_sample(norm, 512);
  const bool exact = norm.polygonal().has_value();
  const Norm2 dual = dual_norm(norm);

  // start from a small disk
  double rmax = 0.0;
  for (const Vec2& f : fs) rmax = std::max(rmax, euclidean(f));
  Eigen::Vector3d p(0.5 / rmax, 0.0, 0.5 / rmax);

  JohnEllipse out;
  for (int round = 0; round < 40; ++round) {
    out.det_history.clear();
    double mu = 1.0;
    while (mu > 1e-13) {
      p = detail::barrier_maximize(p, fs, mu / static_cast<double>(fs.size()));
      out.det_history.push_back(detail::sym(p).det());
      mu *= 0.1;
    }
    if (exact) break;
    // add the most violated functional of the continuous constraint
    const Mat2 a = detail::sym(p);
    const Extremum worst = maximize_periodic([&](double phi) {
      const Vec2 g = a * sphere_point(dual, phi);
      return dot(g, g);
    }, 0.0, kPi);
    if (worst.value <= 1.0 + 1e-13) break;
    fs.push_back(sphere_point(dual, worst.arg));
    fs.push_back(-sphere_point(dual, worst.arg));
    // step back into the interior for the next round
    p *= 1.0 / std::sqrt(worst.value) * (1.0 - 1e-6);
  }

  // exact feasibility: scale onto the boundary
  Mat2 a = detail::sym(p);
  const double excess = ellipse_excess(norm, a).value;
  a = a * (1.0 / excess);
  out.a = a;
  out.det_history.push_back(a.det());
  out.violation = ellipse_excess(norm, a).value - 1.0;

  // contacts: directions where the ellipse touches the sphere
  const std::size_t n = kDefaultGrid;
  const double h = kPi / static_cast<double>(n);
  auto touch = [&](double phi) { return norm.value(a * unit_direction(phi)); };
  std::vector<double> xs(n);
  for (std::size_t i = 0; i < n; ++i) xs[i] = h * static_cast<double>(i);
  const std::vector<double> vs = sample(touch, xs);
  if (*std::min_element(vs.begin(), vs.end()) >= 1.0 - 1e-7) {
    out.contact_angles = {0.0, 0.5 * kPi};
  } else {
    for (std::size_t i : detail::local_maxima(vs, true)) {
      if (vs[i] < 1.0 - 1e-3) break;
      const Extremum e = golden_max(touch, xs[i] - h, xs[i] + h);
      if (e.value < 1.0 - 1e-7) continue;
      double phi = wrap(e.arg, kPi);
      // a contact at 0 refined to just below zero wraps to pi
      if (kPi - phi < 1e-7) phi = 0.0;
      bool dup = false;
      for (double c : out.contact_angles) {
        const double d = std::abs(phi - c);
        if (std::min(d, kPi - d) < 1e-4) dup = true;
      }
      if (!dup) out.contact_angles.push_back(phi);
    }
    std::sort(out.contact_angles.begin(), out.contact_angles.end());
  }
  for (double phi : out.contact_angles) out.contacts.push_back(a * unit_direction(phi));
  bool independent = false;
  for (std::size_t i = 0; i < out.contacts.size(); ++i)
    for (std::size_t j = i + 1; j < out.contacts.size(); ++j)
      if (std::abs(cross(out.contacts[i], out.contacts[j])) > 1e-6) independent = true;
  if (!independent) throw StageError("john_ellipse", "fewer than two independent contact points");
  return out;
}

struct Case1Result {
  Operator2 t;
  Vec2 x0;
  Vec2 y1, y2;
  Functional2 y1_star;
  double separation = 0.0;
  JohnEllipse ellipse;
};

/// For a Hilbert domain Ellipse(M): T = A M^(1/2) maps B_X onto the John
/// ellipse of B_Y. Picks the contact pair with the largest face separation.
inline Case1Result case1_operator(const Norm2& x, const Norm2& y) {
  Mat2 m;
  if (const EllipseNorm* e = x.as_ellipse()) {
    m = e->m;
  } else if (x.is_ellipse()) {
    m = Mat2::identity();
  } else {
    throw ValidationError("case1_operator: domain is not a Hilbert (ellipse) norm");
  }
  const JohnEllipse je = john_ellipse(y);
  const Mat2 root = symmetric_sqrt(m);
  const Mat2 t = je.a * root;
  const Mat2 root_inv = root.inverse();

  Case1Result best;
  best.separation = -1.0;
  for (std::size_t i = 0; i < je.contacts.size(); ++i) {
    for (std::size_t j = 0; j < je.contacts.size(); ++j) {
      if (i == j || std::abs(cross(je.contacts[i], je.contacts[j])) <= 1e-6) continue;
      const Vec2 y1 = je.contacts[i] / y(je.contacts[i]);
      const Vec2 y2 = je.contacts[j] / y(je.contacts[j]);
      const Functional2 ys = supporting_functional(y, y1);
      const double d = dist_to_face_union(y, y2, face_pair(y, ys));
      if (d > best.separation + 1e-12) {
        best.separation = d;
        best.y1 = y1;
        best.y2 = y2;
        best.y1_star = ys;
        best.x0 = root_inv * unit_direction(je.contact_angles[j]);
      }
    }
  }
  best.t = {t, x, y};
  best.ellipse = je;
  return best;
}

}  // namespace planenorm
