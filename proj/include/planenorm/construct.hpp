#pragma once

// Builds a norm-one operator T between two normed planes whose image touches
// the unit sphere at y1 and y2 with y2 a positive distance away from both
// faces F(y1*) and F(-y1*). Hilbert domains use the John ellipse; all other
// domains go through a chord gap of the domain and an equality chord of the
// codomain.

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "planenorm/convexity.hpp"
#include "planenorm/ellipsoid.hpp"
#include "planenorm/norm2d.hpp"
#include "planenorm/numeric.hpp"
#include "planenorm/operators.hpp"

namespace planenorm {

enum class CaseKind { Hilbert, NonHilbert };
enum class Subcase { None, AEqualsB, ALessB };

inline const char* to_string(CaseKind k) { return k == CaseKind::Hilbert ? "hilbert" : "non-hilbert"; }
inline const char* to_string(Subcase s) {
  switch (s) {
    case Subcase::AEqualsB: return "a=b";
    case Subcase::ALessB: return "a<b";
    default: return "none";
  }
}

struct ConstructionTrace {
  CaseKind kind = CaseKind::Hilbert;
  Subcase subcase = Subcase::None;
  double epsilon = 0.0;
  Vec2 x1, x2, y1, y2;
  double shrink = 0.0;  ///< S is scaled by 1 - shrink
  double a = 0.0, b = 0.0;
  int half_arc = 0;          ///< 1: starts at x1 + x2, 2: starts at x1 - x2
  double arc_start = 0.0;    ///< polar parameter of gamma_1(0)
  double t1 = 0.0, t2 = 0.0, t3 = 0.0;
  double s = 0.0;            ///< outer maximizer on gamma_1
  double s1 = 0.0, s2 = 0.0, s3 = 0.0;
  std::optional<double> lambda0;
  std::optional<Mat2> s_op, t1_op;
  Mat2 t_op;
  std::size_t grid = kDefaultGrid;
};

struct CounterexampleSeed {
  Operator2 t;
  Vec2 x0;        ///< T x0 = y2
  Vec2 x_y1;      ///< a sphere point with T x_y1 = y1
  Vec2 y1, y2;
  Functional2 y1_star;
  double delta = 0.0;          ///< face distance minus the safety margin
  double face_distance = 0.0;  ///< dist(y2, F(y1*) u F(-y1*))
  ConstructionTrace trace;
};

struct BuildOptions {
  std::size_t grid = kDefaultGrid;
};

inline constexpr double kDeltaMargin = 1e-8;

namespace detail {

template <class F>
auto run_stage(const char* stage, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const StageError& e) {
    if (e.stage() == stage) throw;
    throw StageError(stage, e.stage() + ": " + e.what());
  } catch (const std::exception& e) {
    throw StageError(stage, e.what());
  }
}

inline Vec2 on_sphere(const Norm2& norm, Vec2 v) { return v / norm.value(v); }

}  // namespace detail

/// Distances from T gamma(theta0 + theta_c) to the face pairs of every
/// extreme supporting functional at T gamma(theta0). Throws ValidationError
/// naming the hypothesis clause that fails.
inline std::vector<double> prop23_face_distances(const Operator2& t, double theta0, double theta_c, double theta1,
                                                 double theta2) {
  constexpr double kTol = 1e-8;
  if (!(0.0 <= theta1 && theta1 <= theta_c && theta_c <= theta2 && theta2 <= kPi))
    throw ValidationError("check_prop_2_3: need 0 <= theta1 <= theta_c <= theta2 <= pi");
  const double on = operator_norm(t).norm;
  if (std::abs(on - 1.0) > kTol) throw ValidationError("check_prop_2_3: ||T|| = " + std::to_string(on) + " is not 1");
  auto val = [&](double u) { return t.profile(theta0 + u); };
  for (auto [u, name] : {std::pair{0.0, "0"}, std::pair{theta_c, "theta_c"}, std::pair{kPi, "pi"}})
    if (std::abs(val(u) - 1.0) > kTol)
      throw ValidationError(std::string("check_prop_2_3: ||T gamma(") + name + ")|| is not 1");
  for (auto [u, name] : {std::pair{theta1, "theta1"}, std::pair{theta2, "theta2"}})
    if (val(u) > 1.0 - kTol)
      throw ValidationError(std::string("check_prop_2_3: T gamma(") + name + ") is not interior");

  const Norm2& y = t.codomain;
  const Vec2 tx = detail::on_sphere(y, t.matrix * sphere_point(t.domain, theta0));
  const Vec2 tc = t.matrix * sphere_point(t.domain, theta0 + theta_c);
  std::vector<double> out;
  for (const Functional2& ys : extreme_supporting_functionals(y, tx))
    out.push_back(dist_to_face_union(y, tc, face_pair(y, ys)));
  return out;
}

/// True iff T gamma(theta0 + theta_c) lies outside F(y*) u F(-y*) for every
/// extreme supporting functional y* of T gamma(theta0).
inline bool check_prop_2_3(const Operator2& t, double theta0, double theta_c, double theta1, double theta2) {
  const auto d = prop23_face_distances(t, theta0, theta_c, theta1, theta2);
  return std::all_of(d.begin(), d.end(), [](double v) { return v > kDeltaMargin; });
}

struct InitialOperator {
  Operator2 s;
  double shrink = 0.0;
};

/// S with S x1 = y1, S x2 = y2, scaled by 1 - shrink, shrink in {2^-k}, so
/// that ||S x_i|| < 1 and S expands the directions x1 - x2 and x1 + x2.
inline InitialOperator case2_initial_operator(const Norm2& x, const Norm2& y, const DayNordlanderGap& gap,
                                              const EqualityDirection& eq) {
  const Mat2 xs = Mat2::columns(gap.x1, gap.x2);
  if (std::abs(xs.det()) < 1e-14) throw StageError("case2_initial_operator", "x1 and x2 are dependent");
  const Mat2 s0 = Mat2::columns(eq.y1, eq.y2) * xs.inverse();
  const Vec2 dm = gap.x1 - gap.x2, dp = gap.x1 + gap.x2;
  const double n1 = y(s0 * gap.x1), n2 = y(s0 * gap.x2);
  const double rm = y(s0 * dm) / x(dm), rp = y(s0 * dp) / x(dp);
  double best_slack = 0.0, best = 0.0;
  for (int k = 1; k <= 52; ++k) {
    const double d = std::ldexp(1.0, -k);
    const double slack = std::min(1.0 - (1.0 - d) * std::max(n1, n2), (1.0 - d) * std::min(rm, rp) - 1.0);
    if (slack > best_slack) {
      best_slack = slack;
      best = d;
    }
  }
  if (!(best_slack >= 1e-8))
    throw StageError("case2_initial_operator", "no dyadic shrink factor leaves a margin of 1e-8");
  return {{s0 * (1.0 - best), x, y}, best};
}

struct HalfArcExtrema {
  double start = 0.0;  ///< polar parameter of gamma_1(0)
  double t1 = 0.0, t2 = 0.0, t3 = 0.0;
  double a = 0.0, b = 0.0;
  double s_outer = 0.0;  ///< maximizer of the outer region, in [t3 - pi, t1]
  double s_inner = 0.0;  ///< maximizer of the inner region, in [t1, t3]
};

/// The <1, >1, <1 pattern of ||S gamma_1(t)|| on [0, pi] and the maxima a
/// (outer region [0, t1] u [t3, pi]) and b (inner region [t1, t3]). `marks`
/// are directions whose parameters are added to the sample set.
inline std::optional<HalfArcExtrema> find_half_arc_pattern(const Operator2& s, double start, std::size_t grid,
                                                           const std::vector<Vec2>& marks = {}) {
  auto g = [&](double t) { return s.profile(start + t); };
  std::vector<double> ts(grid + 1);
  for (std::size_t i = 0; i <= grid; ++i) ts[i] = kPi * static_cast<double>(i) / static_cast<double>(grid);
  for (const Vec2& m : marks) {
    double t = wrap(polar_angle(m) - start);
    if (t > kPi) t -= kPi;
    ts.push_back(t);
  }
  std::sort(ts.begin(), ts.end());
  const std::vector<double> gs = sample(g, ts);

  // runs of samples strictly below 1
  struct Run {
    std::size_t lo, hi;
  };
  std::vector<Run> runs;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    if (gs[i] >= 1.0) continue;
    if (!runs.empty() && runs.back().hi + 1 == i) {
      runs.back().hi = i;
    } else {
      runs.push_back({i, i});
    }
  }
  if (runs.size() < 2 || gs.front() <= 1.0) return std::nullopt;
  auto argmin_in = [&](const Run& r) {
    std::size_t best = r.lo;
    for (std::size_t i = r.lo; i <= r.hi; ++i)
      if (gs[i] < gs[best]) best = i;
    return best;
  };
  HalfArcExtrema h;
  h.start = start;
  h.t1 = ts[argmin_in(runs.front())];
  h.t3 = ts[argmin_in(runs.back())];
  std::size_t peak = runs.front().hi + 1;
  for (std::size_t i = runs.front().hi + 1; i < runs.back().lo; ++i)
    if (gs[i] > gs[peak]) peak = i;
  h.t2 = ts[peak];
  if (!(gs[peak] > 1.0)) return std::nullopt;

  // g(t - pi) = g(t), so the outer region is the single interval [t3 - pi, t1]
  const SweepOptions opt{grid, 4, kRefineWidth};
  const Extremum outer = maximize(g, h.t3 - kPi, h.t1, opt);
  const Extremum inner = maximize(g, h.t1, h.t3, opt);
  h.a = outer.value;
  h.s_outer = outer.arg;
  h.b = inner.value;
  h.s_inner = inner.arg;
  return h;
}

inline HalfArcExtrema half_arc_extrema(const Operator2& s, double start, std::size_t grid = kDefaultGrid,
                                       const std::vector<Vec2>& marks = {}) {
  auto h = find_half_arc_pattern(s, start, grid, marks);
  if (!h) throw StageError("half_arc_extrema", "profile has no <1, >1, <1 pattern");
  return *h;
}

namespace detail {

inline CounterexampleSeed finish_seed(const Operator2& t, double theta0, double theta_c, double theta1,
                                      double theta2, ConstructionTrace trace) {
  const Norm2& y = t.codomain;
  CounterexampleSeed seed;
  seed.t = t;
  seed.x_y1 = sphere_point(t.domain, theta0);
  seed.x0 = sphere_point(t.domain, theta0 + theta_c);
  seed.y1 = t.matrix * seed.x_y1;
  seed.y2 = t.matrix * seed.x0;
  seed.y1_star = supporting_functional(y, on_sphere(y, seed.y1));
  const auto dists = prop23_face_distances(t, theta0, theta_c, theta1, theta2);
  if (!std::all_of(dists.begin(), dists.end(), [](double v) { return v > kDeltaMargin; }))
    throw StageError("prop_2_3", "T gamma(theta_c) lies on a face of a functional supporting T gamma(0)");
  seed.face_distance = dist_to_face_union(y, seed.y2, face_pair(y, seed.y1_star));
  seed.delta = seed.face_distance - kDeltaMargin;
  if (!(seed.delta > kDeltaMargin)) throw StageError("prop_2_3", "face separation is not positive");
  trace.t_op = t.matrix;
  seed.trace = std::move(trace);
  return seed;
}

}  // namespace detail

/// a = b: T = S / a touches the sphere at an outer and an inner maximizer.
inline CounterexampleSeed subcase1_finalize(const Operator2& s, const HalfArcExtrema& h, ConstructionTrace trace) {
  if (std::abs(h.a - h.b) > 1e-10) throw StageError("subcase1_finalize", "requires a = b");
  const Operator2 t = s.scaled(1.0 / h.a);
  trace.subcase = Subcase::AEqualsB;
  trace.s1 = h.s_outer;
  trace.s2 = h.s_inner;
  trace.s3 = h.s_outer + kPi;
  const double s1 = h.s_outer;
  return detail::finish_seed(t, h.start + s1, h.s_inner - s1, h.t1 - s1, h.t3 - s1, std::move(trace));
}

/// P_lambda = lambda I + (1 - lambda) y (x) y*.
inline Mat2 rank_one_blend(double lambda, Vec2 y, Functional2 ys) {
  const Mat2 p{y.x * ys.a1, y.x * ys.a2, y.y * ys.a1, y.y * ys.a2};
  return Mat2::identity() * lambda + p * (1.0 - lambda);
}

/// a < b: rescale by 1/a, restart the half arc at the outer maximizer, and
/// blend with the rank-one projection onto T1 gamma_2(0) until the inner
/// maximum drops to exactly 1.
inline CounterexampleSeed subcase2_finalize(const Operator2& s, const HalfArcExtrema& h, ConstructionTrace trace,
                                            std::size_t grid = kDefaultGrid) {
  if (!(h.a < h.b - 1e-10)) throw StageError("subcase2_finalize", "requires a < b");
  const Operator2 t1 = s.scaled(1.0 / h.a);
  const double start2 = h.start + h.s_outer;
  const double s1 = h.t1 - h.s_outer, s3 = h.t3 - h.s_outer;
  const Norm2& y = s.codomain;
  const Vec2 u = t1.matrix * sphere_point(s.domain, start2);
  const Functional2 ys = supporting_functional(y, detail::on_sphere(y, u));

  const SweepOptions opt{grid, 4, kRefineWidth};
  auto phi_ext = [&](double lambda) {
    const Operator2 tl{rank_one_blend(lambda, u, ys) * t1.matrix, s.domain, y};
    return maximize([&](double t) { return tl.profile(start2 + t); }, s1, s3, opt);
  };
  const Extremum phi0 = phi_ext(0.0);
  if (!(phi0.value < 1.0 - 1e-10))
    throw StageError("subcase2_finalize", "phi(0) = " + std::to_string(phi0.value) + " at t = " + std::to_string(phi0.arg) + " is not below 1");
  const Extremum phi1 = phi_ext(1.0);
  if (!(phi1.value > 1.0)) throw StageError("subcase2_finalize", "phi(1) is not above 1");
  const Bracket br = bisect([&](double l) { return phi_ext(l).value - 1.0; }, 0.0, 1.0, 1e-16, 1e-10);
  const double lambda0 = std::abs(br.f_lo) <= std::abs(br.f_hi) ? br.lo : br.hi;
  const Extremum at = phi_ext(lambda0);
  if (std::abs(at.value - 1.0) > 1e-10) throw StageError("subcase2_finalize", "bisection for lambda0 did not reach phi = 1");
  if (!(lambda0 > 0.0 && lambda0 < 1.0)) throw StageError("subcase2_finalize", "lambda0 is not inside (0, 1)");

  const Operator2 t{rank_one_blend(lambda0, u, ys) * t1.matrix, s.domain, y};
  trace.subcase = Subcase::ALessB;
  trace.s = h.s_outer;
  trace.s1 = s1;
  trace.s2 = at.arg;
  trace.s3 = s3;
  trace.lambda0 = lambda0;
  trace.t1_op = t1.matrix;
  return detail::finish_seed(t, start2, at.arg, s1, s3, std::move(trace));
}

/// Re-checks the strict inequalities the non-Hilbert construction relies on.
inline void validate_case2_trace(const ConstructionTrace& tr, const Norm2& x, const Norm2& y) {
  if (!tr.s_op) throw StageError("trace", "missing initial operator");
  const Mat2& s = *tr.s_op;
  const Vec2 dm = tr.x1 - tr.x2, dp = tr.x1 + tr.x2;
  if (!(y(s * tr.x1) < 1.0)) throw StageError("trace", "||S x1|| < 1 fails");
  if (!(y(s * tr.x2) < 1.0)) throw StageError("trace", "||S x2|| < 1 fails");
  if (!(y(s * dm) / x(dm) > 1.0)) throw StageError("trace", "||S (x1 - x2)/||x1 - x2|| || > 1 fails");
  if (!(y(s * dp) / x(dp) > 1.0)) throw StageError("trace", "||S (x1 + x2)/||x1 + x2|| || > 1 fails");
  if (!(tr.a <= tr.b + 1e-10)) throw StageError("trace", "a <= b fails");
}

/// The seed invariants: T x0 = y2 on the sphere, y1*(y1) = 1, ||T|| = 1 and a
/// positive separation. Throws StageError on violation.
inline void validate_seed(const CounterexampleSeed& seed) {
  const Norm2& x = seed.t.domain;
  const Norm2& y = seed.t.codomain;
  auto fail = [](const std::string& what) { throw StageError("seed", what); };
  if (std::abs(x(seed.x0) - 1.0) > 1e-9) fail("x0 is not on the unit sphere");
  if (euclidean(seed.t.matrix * seed.x0 - seed.y2) > 1e-9) fail("T x0 != y2");
  if (std::abs(y(seed.y2) - 1.0) > 1e-9) fail("||y2|| != 1");
  if (std::abs(y(seed.y1) - 1.0) > 1e-9) fail("||y1|| != 1");
  if (std::abs(seed.y1_star(seed.y1) - 1.0) > 1e-9) fail("y1*(y1) != 1");
  if (std::abs(operator_norm(seed.t).norm - 1.0) > 1e-9) fail("||T|| != 1");
  if (!(seed.delta > 0.0)) fail("separation is not positive");
  if (dist_to_face_union(y, seed.y2, face_pair(y, seed.y1_star)) < seed.delta) fail("face distance below delta");
}

inline CounterexampleSeed build_case1(const Norm2& x, const Norm2& y) {
  const Case1Result c1 = detail::run_stage("case1_operator", [&] { return case1_operator(x, y); });
  CounterexampleSeed seed;
  seed.t = c1.t;
  seed.x0 = c1.x0;
  seed.y1 = c1.y1;
  seed.y2 = c1.y2;
  seed.y1_star = c1.y1_star;
  seed.x_y1 = c1.t.matrix.inverse() * c1.y1;
  seed.face_distance = c1.separation;
  seed.delta = c1.separation - kDeltaMargin;
  if (!(seed.delta > kDeltaMargin)) throw StageError("case1_operator", "contact separation is not positive");
  seed.trace.kind = CaseKind::Hilbert;
  seed.trace.y1 = c1.y1;
  seed.trace.y2 = c1.y2;
  seed.trace.t_op = c1.t.matrix;
  return seed;
}

inline CounterexampleSeed build_case2(const Norm2& x, const Norm2& y, const BuildOptions& opt = {}) {
  const DayNordlanderGap gap = detail::run_stage("find_gap", [&] { return find_gap(x, opt.grid); });
  const EqualityDirection eq = detail::run_stage("equality_direction", [&] { return equality_direction(y, gap.epsilon, opt.grid); });
  const InitialOperator init = detail::run_stage("case2_initial_operator", [&] { return case2_initial_operator(x, y, gap, eq); });

  ConstructionTrace tr;
  tr.kind = CaseKind::NonHilbert;
  tr.epsilon = gap.epsilon;
  tr.x1 = gap.x1;
  tr.x2 = gap.x2;
  tr.y1 = eq.y1;
  tr.y2 = eq.y2;
  tr.shrink = init.shrink;
  tr.s_op = init.s.matrix;

  const std::vector<Vec2> marks{gap.x1, gap.x2, gap.x1 - gap.x2, gap.x1 + gap.x2};
  const double starts[2] = {polar_angle(gap.x1 + gap.x2), polar_angle(gap.x1 - gap.x2)};
  std::optional<HalfArcExtrema> chosen;
  for (std::size_t grid : {opt.grid, 8 * opt.grid}) {
    for (int arc = 0; arc < 2 && !chosen; ++arc) {
      auto h = find_half_arc_pattern(init.s, starts[arc], grid, marks);
      if (h && h->a <= h->b + 1e-10) {
        chosen = h;
        tr.half_arc = arc + 1;
        tr.grid = grid;
      }
    }
    if (chosen) break;
  }
  if (!chosen) throw StageError("half_arc_extrema", "pattern absent on both half arcs");
  const HalfArcExtrema& h = *chosen;
  tr.arc_start = h.start;
  tr.t1 = h.t1;
  tr.t2 = h.t2;
  tr.t3 = h.t3;
  tr.a = h.a;
  tr.b = h.b;
  detail::run_stage("trace", [&] {
    validate_case2_trace(tr, x, y);
    return 0;
  });
  if (std::abs(h.a - h.b) <= 1e-10)
    return detail::run_stage("subcase1_finalize", [&] { return subcase1_finalize(init.s, h, tr); });
  return detail::run_stage("subcase2_finalize", [&] { return subcase2_finalize(init.s, h, tr, tr.grid); });
}

/// Dispatches on whether the domain is a Hilbert plane.
inline CounterexampleSeed build_counterexample(const Norm2& x, const Norm2& y, const BuildOptions& opt = {}) {
  const bool hilbert = detail::run_stage("hilbert_test", [&] { return is_hilbert(x, opt.grid); });
  CounterexampleSeed seed = hilbert ? build_case1(x, y) : build_case2(x, y, opt);
  detail::run_stage("seed", [&] {
    validate_seed(seed);
    return 0;
  });
  return seed;
}

}  // namespace planenorm
