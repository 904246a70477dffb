#pragma once

// Midpoints of sphere chords of fixed norm-length, the radial defect
// Delta(eps, theta) of the midpoint curve, the area ratio of that curve, the
// modulus of convexity, and the gap search used to build operators on
// non-Hilbert domains.

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "planenorm/norm2d.hpp"
#include "planenorm/numeric.hpp"

namespace planenorm {

struct ChordMidpoint {
  double theta = 0.0;
  double delta = 0.0;  ///< 1 - ||z||
  Vec2 z;              ///< midpoint, on the ray through gamma(theta)
  Vec2 z1, z2;         ///< chord endpoints, ||z1 - z2|| = eps
};

struct ProfileSample {
  double theta = 0.0;
  double delta = 0.0;
  Vec2 z;
};

/// Delta(eps, .) on a uniform grid of [0, pi). Delta is pi-periodic.
struct ChordMidpointProfile {
  Norm2 norm;
  double epsilon = 0.0;
  std::vector<ProfileSample> samples;
};

struct DayNordlanderGap {
  double epsilon = 0.0;
  double theta_below = 0.0;  ///< (1 - Delta)^2 < 1 - eps^2/4 here
  double theta_above = 0.0;  ///< (1 - Delta)^2 > 1 - eps^2/4 here
  double margin_below = 0.0;
  double margin_above = 0.0;
  /// Length of the shortened chord that produced x1, x2.
  double chord_length = 0.0;
  Vec2 x1, x2;
};

struct EqualityDirection {
  double theta = 0.0;
  Vec2 y1, y2;
};

namespace detail {

inline void require_epsilon(double eps) {
  if (!(eps > 0.0 && eps < 2.0)) throw ValidationError("epsilon must lie in (0, 2)");
}

/// Chords gamma(m - t), gamma(m + t); t(m) solves ||gamma(m+t) - gamma(m-t)|| = eps.
class ChordSolver {
 public:
  ChordSolver(const Norm2& norm, double eps) : norm_(norm), eps_(eps) {}

  double half_width(double m) const {
    auto f = [&](double t) { return length(m, t) - eps_; };
    const Bracket b = root_bracketed(f, 0.0, 0.5 * kPi, -eps_, 2.0 - eps_, 1e-15);
    return std::abs(b.f_lo) <= std::abs(b.f_hi) ? b.lo : b.hi;
  }

  double length(double m, double t) const {
    return norm_.value(sphere_point(norm_, m + t) - sphere_point(norm_, m - t));
  }

  ChordMidpoint chord(double m, double t, double theta) const {
    ChordMidpoint c;
    c.theta = theta;
    c.z1 = sphere_point(norm_, m - t);
    c.z2 = sphere_point(norm_, m + t);
    c.z = (c.z1 + c.z2) * 0.5;
    c.delta = 1.0 - norm_.value(c.z);
    return c;
  }

  const Norm2& norm() const { return norm_; }
  double eps() const { return eps_; }

 private:
  Norm2 norm_;
  double eps_;
};

}  // namespace detail

/// The chord of norm-length eps whose midpoint lies on the ray through
/// gamma(theta), and Delta = 1 - ||midpoint||.
inline ChordMidpoint chord_midpoint(const Norm2& norm, double eps, double theta) {
  detail::require_epsilon(eps);
  const detail::ChordSolver solver(norm, eps);
  const Vec2 dir = unit_direction(theta);
  auto defect_at = [&](double m, double t) {
    const Vec2 z = (sphere_point(norm, m - t) + sphere_point(norm, m + t)) * 0.5;
    return angle_between(dir, z);
  };
  auto defect = [&](double m) { return defect_at(m, solver.half_width(m)); };

  // the midpoint angle lies strictly between m - t and m + t with t < pi/2
  const double lo = theta - 0.5 * kPi, hi = theta + 0.5 * kPi;
  const Bracket br = root_bracketed(defect, lo, hi, defect(lo), defect(hi), 1e-14);
  const double m = std::abs(br.f_lo) <= std::abs(br.f_hi) ? br.lo : br.hi;
  double t = solver.half_width(m);
  if (std::abs(defect_at(m, t)) > 1e-11) {
    // t(m) jumps across a flat piece of the sphere; slide along it instead
    const double ta = solver.half_width(br.lo), tb = solver.half_width(br.hi);
    auto g = [&](double s) { return defect_at(m, s); };
    const Bracket inner = root_bracketed(g, std::min(ta, tb), std::max(ta, tb), g(std::min(ta, tb)),
                                         g(std::max(ta, tb)), 1e-15);
    t = std::abs(inner.f_lo) <= std::abs(inner.f_hi) ? inner.lo : inner.hi;
    if (std::abs(solver.length(m, t) - eps) > 1e-9)
      throw StageError("chord_midpoint", "midpoint curve is discontinuous at theta = " + std::to_string(theta));
  }
  return solver.chord(m, t, theta);
}

inline double delta_profile_value(const Norm2& norm, double eps, double theta) {
  return chord_midpoint(norm, eps, theta).delta;
}

/// Delta on `grid` uniform samples of [0, pi).
inline ChordMidpointProfile chord_midpoint_profile(const Norm2& norm, double eps,
                                                   std::size_t grid = kDefaultGrid) {
  detail::require_epsilon(eps);
  ChordMidpointProfile prof{norm, eps, std::vector<ProfileSample>(grid)};
  parallel_for(grid, [&](std::size_t i) {
    const double th = kPi * static_cast<double>(i) / static_cast<double>(grid);
    const ChordMidpoint c = chord_midpoint(norm, eps, th);
    prof.samples[i] = {th, c.delta, c.z};
  }, 64);
  return prof;
}

/// delta_X(eps): the infimum of Delta(eps, theta) over theta.
inline double modulus_of_convexity(const Norm2& norm, double eps, const SweepOptions& opt = {}) {
  detail::require_epsilon(eps);
  const Extremum e = minimize_periodic([&](double th) { return delta_profile_value(norm, eps, th); }, 0.0, kPi, opt);
  return std::max(0.0, e.value);
}

/// 1 - sqrt(1 - eps^2/4), the modulus of a Hilbert plane.
inline double hilbert_modulus(double eps) { return 1.0 - std::sqrt(1.0 - 0.25 * eps * eps); }

struct AreaRatio {
  double ball_area = 0.0;
  double midpoint_area = 0.0;
  double ratio = 0.0;
  std::size_t nodes = 0;
};

/// Area inside the midpoint curve divided by the area of the unit ball, both
/// by composite Simpson in polar form with node doubling.
inline AreaRatio nordlander_area(const Norm2& norm, double eps, std::size_t min_nodes = 4096,
                                 std::size_t max_nodes = std::size_t{1} << 15, double rel_tol = 1e-8) {
  detail::require_epsilon(eps);
  // both integrands are pi-periodic; integrate over [0, pi] and double
  auto integrands = [&](double th) {
    const double r = radial_function(norm, th);
    const double d = delta_profile_value(norm, eps, th);
    return std::pair{r * r, (1.0 - d) * (1.0 - d) * r * r};
  };
  std::size_t n = std::max<std::size_t>(min_nodes, 2);
  n += n % 2;
  // cached samples at theta_i = i * pi / n; refined by doubling
  std::vector<std::pair<double, double>> vals(n + 1);
  parallel_for(n + 1, [&](std::size_t i) { vals[i] = integrands(kPi * static_cast<double>(i) / static_cast<double>(n)); }, 64);
  auto simpson = [&](const std::vector<std::pair<double, double>>& v) {
    const std::size_t m = v.size() - 1;
    const double h = kPi / static_cast<double>(m);
    double a = v[0].first + v[m].first, b = v[0].second + v[m].second;
    for (std::size_t i = 1; i < m; ++i) {
      const double w = (i % 2 == 1) ? 4.0 : 2.0;
      a += w * v[i].first;
      b += w * v[i].second;
    }
    return std::pair{a * h / 3.0, b * h / 3.0};
  };
  auto [ball, mid] = simpson(vals);
  while (2 * n <= max_nodes) {
    const std::size_t n2 = 2 * n;
    std::vector<std::pair<double, double>> next(n2 + 1);
    for (std::size_t i = 0; i <= n; ++i) next[2 * i] = vals[i];
    parallel_for(n, [&](std::size_t i) {
      next[2 * i + 1] = integrands(kPi * static_cast<double>(2 * i + 1) / static_cast<double>(n2));
    }, 64);
    vals.swap(next);
    n = n2;
    const auto [ball2, mid2] = simpson(vals);
    const bool done = std::abs(ball2 - ball) <= rel_tol * ball2 && std::abs(mid2 - mid) <= rel_tol * ball2;
    ball = ball2;
    mid = mid2;
    if (done) break;
  }
  // half of the full-circle polar integral = the [0, pi] integral
  return {ball, mid, mid / ball, n};
}

inline double nordlander_area_ratio(const Norm2& norm, double eps) { return nordlander_area(norm, eps).ratio; }

/// (1 - Delta)^2 - (1 - eps^2/4): negative below the Hilbert value.
inline double hilbert_defect(double delta, double eps) {
  return (1.0 - delta) * (1.0 - delta) - (1.0 - 0.25 * eps * eps);
}

struct DefectRange {
  Extremum min;
  Extremum max;
};

namespace detail {

inline DefectRange defect_range(const Norm2& norm, double eps, std::size_t grid) {
  auto q = [&](double th) { return hilbert_defect(delta_profile_value(norm, eps, th), eps); };
  const ChordMidpointProfile prof = chord_midpoint_profile(norm, eps, grid);
  std::vector<double> v(grid);
  for (std::size_t i = 0; i < grid; ++i) v[i] = hilbert_defect(prof.samples[i].delta, eps);
  const double h = kPi / static_cast<double>(grid);
  auto polish = [&](bool want_max) {
    std::vector<double> s = v;
    if (!want_max)
      for (double& x : s) x = -x;
    const auto peaks = local_maxima(s, true);
    Extremum best{prof.samples[peaks[0]].theta, v[peaks[0]]};
    for (std::size_t k = 0; k < std::min<std::size_t>(4, peaks.size()); ++k) {
      const double c = prof.samples[peaks[k]].theta;
      Extremum e = want_max ? golden_max(q, c - h, c + h)
                            : golden_max([&](double th) { return -q(th); }, c - h, c + h);
      if (!want_max) e.value = -e.value;
      e.arg = wrap(e.arg, kPi);
      if (want_max ? e.value > best.value : e.value < best.value) best = e;
    }
    return best;
  };
  return {polish(false), polish(true)};
}

}  // namespace detail

/// Numeric Hilbert test at eps = 1 (ellipse representations are Hilbert).
inline bool is_hilbert(const Norm2& norm, std::size_t grid = kDefaultGrid) {
  if (norm.is_ellipse()) return true;
  const DefectRange r = detail::defect_range(norm, 1.0, grid);
  return std::max(std::abs(r.min.value), std::abs(r.max.value)) < 1e-8;
}

/// Finds eps and x1, x2 on the sphere with ||x1 - x2|| < eps and
/// ||x1 + x2|| < sqrt(4 - eps^2). Throws StageError("find_gap", "no gap ...")
/// when the norm is (numerically) Euclidean.
inline DayNordlanderGap find_gap(const Norm2& norm, std::size_t grid = kDefaultGrid) {
  constexpr double kMargin = 1e-8;
  if (norm.is_ellipse()) throw StageError("find_gap", "no gap: norm is an ellipse norm");
  {
    const DefectRange r = detail::defect_range(norm, 1.0, grid);
    if (std::max(std::abs(r.min.value), std::abs(r.max.value)) < kMargin)
      throw StageError("find_gap", "no gap: norm is numerically Euclidean");
  }
  for (int k = 1; k <= 19; ++k) {
    const double eps = 0.1 * k;
    const DefectRange r = detail::defect_range(norm, eps, grid);
    if (!(r.min.value < -kMargin && r.max.value > kMargin)) continue;

    DayNordlanderGap gap;
    gap.epsilon = eps;
    gap.theta_below = r.min.arg;
    gap.theta_above = r.max.arg;
    gap.margin_below = -r.min.value;
    gap.margin_above = r.max.value;

    // Shorten the chord on the same ray. ratio_minus = eps / e' falls to 1 as
    // e' -> eps while ratio_plus = sqrt(4 - eps^2) / ||x1 + x2|| stays above 1
    // near eps; balance the two.
    const double target = std::sqrt(4.0 - eps * eps);
    auto ratios = [&](double e) {
      const ChordMidpoint c = chord_midpoint(norm, e, gap.theta_below);
      return std::pair{eps / e, target / (2.0 * (1.0 - c.delta))};
    };
    auto balance = [&](double e) {
      const auto [rm, rp] = ratios(e);
      return rm - rp;
    };
    const double lo = 0.05 * eps;
    const double f_lo = balance(lo), f_hi = balance(eps);
    if (!(f_lo > 0.0 && f_hi < 0.0)) continue;
    const Bracket b = root_bracketed(balance, lo, eps, f_lo, f_hi, 1e-14);
    const double e = b.lo;  // eps / e is the larger ratio at the lower end
    const ChordMidpoint c = chord_midpoint(norm, e, gap.theta_below);
    gap.chord_length = e;
    gap.x1 = c.z1;
    gap.x2 = c.z2;
    // re-check from scratch
    const double minus = norm(gap.x1 - gap.x2), plus = norm(gap.x1 + gap.x2);
    if (minus < eps - kMargin && plus < target - kMargin) return gap;
  }
  throw StageError("find_gap", "no gap found over eps = 0.1 .. 1.9");
}

/// A direction where the midpoint curve meets the Hilbert value, with the
/// chord there: ||y1 - y2|| = eps and ||y1 + y2|| = sqrt(4 - eps^2).
inline EqualityDirection equality_direction(const Norm2& norm, double eps, std::size_t grid = kDefaultGrid) {
  detail::require_epsilon(eps);
  auto q = [&](double th) { return hilbert_defect(delta_profile_value(norm, eps, th), eps); };
  double theta = 0.0;
  if (!norm.is_ellipse()) {
    const DefectRange r = detail::defect_range(norm, eps, grid);
    if (std::max(std::abs(r.min.value), std::abs(r.max.value)) >= 1e-8) {
      if (!(r.min.value < 0.0 && r.max.value > 0.0))
        throw StageError("equality_direction", "defect profile does not change sign");
      double a = r.min.arg, b = r.max.arg;
      if (b < a) b += kPi;  // pi-periodic, so bracket on an increasing interval
      const Bracket br = bisect(q, a, b, 1e-15, 1e-10);
      theta = std::abs(br.f_lo) <= std::abs(br.f_hi) ? br.lo : br.hi;
      if (std::abs(q(theta)) > 1e-10)
        throw StageError("equality_direction", "defect jumps across zero at theta = " + std::to_string(theta));
      theta = wrap(theta, kPi);
    }
  }
  const ChordMidpoint c = chord_midpoint(norm, eps, theta);
  return {theta, c.z1, c.z2};
}

}  // namespace planenorm
