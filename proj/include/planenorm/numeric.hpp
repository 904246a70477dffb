#pragma once

// Small-vector types and the shared one-dimensional search machinery used by
// every module: coarse grid sweeps with golden-section polishing, bracketed
// root finding, and a deterministic parallel-for.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <boost/math/tools/toms748_solve.hpp>

namespace planenorm {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Default coarse resolution of every sphere-wide sweep.
inline constexpr std::size_t kDefaultGrid = 4096;
/// Golden-section refinement stops once the bracket is this narrow (radians).
inline constexpr double kRefineWidth = 1e-12;

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

/// Malformed or inadmissible input (bad norm spec, wrong precondition).
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A pipeline stage could not establish what it is supposed to establish.
class StageError : public std::runtime_error {
 public:
  StageError(std::string stage, const std::string& what)
      : std::runtime_error(what), stage_(std::move(stage)) {}
  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

// ---------------------------------------------------------------------------
// Vectors, functionals, 2x2 matrices
// ---------------------------------------------------------------------------

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  constexpr Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  constexpr Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  constexpr Vec2 operator-() const { return {-x, -y}; }
  constexpr Vec2 operator*(double s) const { return {x * s, y * s}; }
  constexpr Vec2 operator/(double s) const { return {x / s, y / s}; }
  friend constexpr Vec2 operator*(double s, Vec2 v) { return v * s; }
  constexpr bool operator==(const Vec2&) const = default;

  bool finite() const { return std::isfinite(x) && std::isfinite(y); }
};

constexpr double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double euclidean(Vec2 v) { return std::hypot(v.x, v.y); }
inline double polar_angle(Vec2 v) { return std::atan2(v.y, v.x); }
inline Vec2 unit_direction(double theta) { return {std::cos(theta), std::sin(theta)}; }

/// A linear functional v -> a1*v.x + a2*v.y on the plane.
struct Functional2 {
  double a1 = 0.0;
  double a2 = 0.0;

  constexpr double operator()(Vec2 v) const { return a1 * v.x + a2 * v.y; }
  constexpr Functional2 operator-() const { return {-a1, -a2}; }
  constexpr Functional2 operator*(double s) const { return {a1 * s, a2 * s}; }
  constexpr Functional2 operator+(Functional2 o) const { return {a1 + o.a1, a2 + o.a2}; }
  constexpr Vec2 as_vector() const { return {a1, a2}; }
  constexpr bool operator==(const Functional2&) const = default;
  bool finite() const { return std::isfinite(a1) && std::isfinite(a2); }
};

/// Row-major 2x2 matrix [[a, b], [c, d]].
struct Mat2 {
  double a = 0.0, b = 0.0, c = 0.0, d = 0.0;

  static constexpr Mat2 identity() { return {1.0, 0.0, 0.0, 1.0}; }
  static constexpr Mat2 diagonal(double p, double q) { return {p, 0.0, 0.0, q}; }
  /// The matrix whose columns are u and v.
  static constexpr Mat2 columns(Vec2 u, Vec2 v) { return {u.x, v.x, u.y, v.y}; }
  static Mat2 rotation(double phi) {
    const double cs = std::cos(phi), sn = std::sin(phi);
    return {cs, -sn, sn, cs};
  }

  constexpr Vec2 operator*(Vec2 v) const { return {a * v.x + b * v.y, c * v.x + d * v.y}; }
  constexpr Mat2 operator*(const Mat2& o) const {
    return {a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c, c * o.b + d * o.d};
  }
  constexpr Mat2 operator*(double s) const { return {a * s, b * s, c * s, d * s}; }
  constexpr Mat2 operator+(const Mat2& o) const { return {a + o.a, b + o.b, c + o.c, d + o.d}; }
  constexpr Mat2 operator-(const Mat2& o) const { return {a - o.a, b - o.b, c - o.c, d - o.d}; }
  constexpr bool operator==(const Mat2&) const = default;

  constexpr double det() const { return a * d - b * c; }
  constexpr double trace() const { return a + d; }
  constexpr Mat2 transpose() const { return {a, c, b, d}; }
  Mat2 inverse() const {
    const double dt = det();
    if (dt == 0.0 || !std::isfinite(dt)) throw ValidationError("singular 2x2 matrix");
    return {d / dt, -b / dt, -c / dt, a / dt};
  }
  bool finite() const {
    return std::isfinite(a) && std::isfinite(b) && std::isfinite(c) && std::isfinite(d);
  }
  double max_abs() const {
    return std::max({std::abs(a), std::abs(b), std::abs(c), std::abs(d)});
  }
};

/// Eigen-decomposition of a symmetric 2x2 matrix: eigenvalues ascending.
struct SymmetricEigen {
  double lo = 0.0, hi = 0.0;
  Vec2 v_lo, v_hi;
};

inline SymmetricEigen symmetric_eigen(const Mat2& m) {
  const double p = 0.5 * (m.a + m.d);
  const double q = 0.5 * (m.a - m.d);
  const double off = 0.5 * (m.b + m.c);
  const double r = std::hypot(q, off);
  const double phi = 0.5 * std::atan2(off, q);
  SymmetricEigen e;
  e.hi = p + r;
  e.lo = p - r;
  e.v_hi = unit_direction(phi);
  e.v_lo = {-e.v_hi.y, e.v_hi.x};
  return e;
}

/// f(M) for symmetric M via its eigen-decomposition.
template <class F>
Mat2 symmetric_function(const Mat2& m, F&& f) {
  const SymmetricEigen e = symmetric_eigen(m);
  const double fl = f(e.lo), fh = f(e.hi);
  auto outer = [](Vec2 v, double s) {
    return Mat2{s * v.x * v.x, s * v.x * v.y, s * v.y * v.x, s * v.y * v.y};
  };
  return outer(e.v_lo, fl) + outer(e.v_hi, fh);
}

inline Mat2 symmetric_sqrt(const Mat2& m) {
  return symmetric_function(m, [](double l) { return std::sqrt(std::max(l, 0.0)); });
}

// ---------------------------------------------------------------------------
// Angles
// ---------------------------------------------------------------------------

/// Wraps into [0, period).
inline double wrap(double theta, double period = kTwoPi) {
  double r = std::fmod(theta, period);
  if (r < 0.0) r += period;
  if (r >= period) r -= period;
  return r;
}

/// Signed angle from a to b in (-pi, pi].
inline double angle_between(Vec2 a, Vec2 b) { return std::atan2(cross(a, b), dot(a, b)); }

// ---------------------------------------------------------------------------
// Parallel sweep
// ---------------------------------------------------------------------------

namespace detail {
inline thread_local bool in_worker = false;
}

/// Worker count: PLANENORM_THREADS caps the hardware concurrency.
inline unsigned worker_count() {
  unsigned n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("PLANENORM_THREADS")) {
    const long cap = std::strtol(env, nullptr, 10);
    if (cap >= 1) n = std::min<unsigned>(n, static_cast<unsigned>(cap));
  }
  return n;
}

/// Calls body(i) for i in [0, n). Each index is written by exactly one
/// worker, so results stored per index are identical to a serial run.
template <class Body>
void parallel_for(std::size_t n, Body&& body, std::size_t min_chunk = 2048) {
  const unsigned workers = detail::in_worker ? 1u : worker_count();
  if (workers <= 1 || n < 2 * min_chunk) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  const std::size_t chunks = std::min<std::size_t>(workers, n / min_chunk);
  std::vector<std::thread> pool;
  pool.reserve(chunks);
  for (std::size_t c = 0; c < chunks; ++c) {
    const std::size_t lo = n * c / chunks, hi = n * (c + 1) / chunks;
    pool.emplace_back([lo, hi, &body] {
      detail::in_worker = true;
      for (std::size_t i = lo; i < hi; ++i) body(i);
    });
  }
  for (auto& t : pool) t.join();
}

/// Evaluates f on the given abscissae.
template <class F>
std::vector<double> sample(F&& f, const std::vector<double>& xs) {
  std::vector<double> out(xs.size());
  parallel_for(xs.size(), [&](std::size_t i) { out[i] = f(xs[i]); });
  return out;
}

// ---------------------------------------------------------------------------
// One-dimensional searches
// ---------------------------------------------------------------------------

struct Extremum {
  double arg = 0.0;
  double value = 0.0;
};

/// Golden-section maximization on [lo, hi]; returns the best point evaluated.
template <class F>
Extremum golden_max(F&& f, double lo, double hi, double width = kRefineWidth) {
  constexpr double inv_phi = 0.6180339887498948482;
  Extremum best{lo, f(lo)};
  auto consider = [&](double x, double v) {
    if (v > best.value || (v == best.value && x < best.arg)) best = {x, v};
  };
  consider(hi, f(hi));
  double x1 = hi - inv_phi * (hi - lo);
  double x2 = lo + inv_phi * (hi - lo);
  double f1 = f(x1), f2 = f(x2);
  consider(x1, f1);
  consider(x2, f2);
  for (int it = 0; it < 200 && hi - lo > width; ++it) {
    if (f1 >= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - inv_phi * (hi - lo);
      f1 = f(x1);
      consider(x1, f1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_phi * (hi - lo);
      f2 = f(x2);
      consider(x2, f2);
    }
  }
  return best;
}

struct SweepOptions {
  std::size_t grid = kDefaultGrid;
  /// Number of grid-local maxima polished by golden section.
  std::size_t refine_top = 4;
  double width = kRefineWidth;
};

namespace detail {

/// Indices of discrete local maxima (plateaus report their first index),
/// ordered by value descending then index ascending.
inline std::vector<std::size_t> local_maxima(const std::vector<double>& v, bool periodic) {
  const std::size_t n = v.size();
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < n; ++i) {
    const bool has_prev = periodic || i > 0;
    const bool has_next = periodic || i + 1 < n;
    const double prev = has_prev ? v[(i + n - 1) % n] : -INFINITY;
    const double next = has_next ? v[(i + 1) % n] : -INFINITY;
    if (v[i] > prev && v[i] >= next) idx.push_back(i);
  }
  if (idx.empty()) {
    // constant sample vector
    idx.push_back(static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin()));
  }
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] > v[b]; });
  return idx;
}

}  // namespace detail

/// Two-stage maximization over the closed interval [lo, hi]: a coarse grid of
/// `grid` cells, then golden section on the cells around the best few grid
/// maxima. Ties resolve to the smallest argument.
template <class F>
Extremum maximize(F&& f, double lo, double hi, const SweepOptions& opt = {}) {
  if (!(hi > lo)) return {lo, f(lo)};
  const std::size_t n = std::max<std::size_t>(opt.grid, 2);
  const double h = (hi - lo) / static_cast<double>(n);
  std::vector<double> xs(n + 1);
  for (std::size_t i = 0; i <= n; ++i) xs[i] = i == n ? hi : lo + h * static_cast<double>(i);
  const std::vector<double> vs = sample(f, xs);
  Extremum best{xs[0], vs[0]};
  for (std::size_t i = 1; i <= n; ++i)
    if (vs[i] > best.value) best = {xs[i], vs[i]};
  const auto peaks = detail::local_maxima(vs, false);
  for (std::size_t k = 0; k < std::min(opt.refine_top, peaks.size()); ++k) {
    const std::size_t i = peaks[k];
    const double a = xs[i == 0 ? 0 : i - 1];
    const double b = xs[std::min(i + 1, n)];
    const Extremum e = golden_max(f, a, b, opt.width);
    if (e.value > best.value || (e.value == best.value && e.arg < best.arg)) best = e;
  }
  return best;
}

/// Same as maximize() for a function with the given period; the argument is
/// returned wrapped into [lo, lo + period).
template <class F>
Extremum maximize_periodic(F&& f, double lo, double period, const SweepOptions& opt = {}) {
  const std::size_t n = std::max<std::size_t>(opt.grid, 3);
  const double h = period / static_cast<double>(n);
  std::vector<double> xs(n);
  for (std::size_t i = 0; i < n; ++i) xs[i] = lo + h * static_cast<double>(i);
  const std::vector<double> vs = sample(f, xs);
  Extremum best{xs[0], vs[0]};
  for (std::size_t i = 1; i < n; ++i)
    if (vs[i] > best.value) best = {xs[i], vs[i]};
  const auto peaks = detail::local_maxima(vs, true);
  for (std::size_t k = 0; k < std::min(opt.refine_top, peaks.size()); ++k) {
    const double c = xs[peaks[k]];
    Extremum e = golden_max(f, c - h, c + h, opt.width);
    e.arg = lo + wrap(e.arg - lo, period);
    if (e.value > best.value || (e.value == best.value && e.arg < best.arg)) best = e;
  }
  return best;
}

template <class F>
Extremum minimize(F&& f, double lo, double hi, const SweepOptions& opt = {}) {
  Extremum e = maximize([&](double x) { return -f(x); }, lo, hi, opt);
  e.value = -e.value;
  return e;
}

template <class F>
Extremum minimize_periodic(F&& f, double lo, double period, const SweepOptions& opt = {}) {
  Extremum e = maximize_periodic([&](double x) { return -f(x); }, lo, period, opt);
  e.value = -e.value;
  return e;
}

struct Bracket {
  double lo = 0.0;
  double hi = 0.0;
  double f_lo = 0.0;
  double f_hi = 0.0;
};

/// Plain bisection on a sign change. Requires f(lo) and f(hi) of opposite
/// signs (zero counts as either). Stops when the bracket is narrower than
/// xtol or when |f| at the midpoint drops below ftol.
template <class F>
Bracket bisect(F&& f, double lo, double hi, double xtol, double ftol = 0.0, int max_iter = 300) {
  double flo = f(lo), fhi = f(hi);
  if (flo == 0.0) return {lo, lo, flo, flo};
  if (fhi == 0.0) return {hi, hi, fhi, fhi};
  if ((flo < 0.0) == (fhi < 0.0)) throw StageError("bisect", "endpoints do not bracket a sign change");
  for (int it = 0; it < max_iter && std::abs(hi - lo) > xtol; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if (fm == 0.0 || std::abs(fm) <= ftol) return {mid, mid, fm, fm};
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
      fhi = fm;
    }
  }
  return {lo, hi, flo, fhi};
}

/// Bracketed root by TOMS 748 (Alefeld-Potra-Shi). Returns the final
/// bracket; converges to the jump for discontinuous f.
template <class F>
Bracket root_bracketed(F&& f, double lo, double hi, double f_lo, double f_hi, double xtol,
                       std::uintmax_t max_iter = 200) {
  if (f_lo == 0.0) return {lo, lo, f_lo, f_lo};
  if (f_hi == 0.0) return {hi, hi, f_hi, f_hi};
  if ((f_lo < 0.0) == (f_hi < 0.0)) throw StageError("root", "endpoints do not bracket a sign change");
  auto tol = [xtol](double a, double b) { return std::abs(b - a) <= xtol; };
  const auto r = boost::math::tools::toms748_solve(f, lo, hi, f_lo, f_hi, tol, max_iter);
  return {r.first, r.second, f(r.first), f(r.second)};
}

}  // namespace planenorm
