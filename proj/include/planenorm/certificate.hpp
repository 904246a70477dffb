#pragma once

// The family T_lambda = P_lambda T built from a seed, and an independent
// brute-force verifier that only evaluates norms.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "planenorm/construct.hpp"
#include "planenorm/norm2d.hpp"
#include "planenorm/numeric.hpp"
#include "planenorm/operators.hpp"

namespace planenorm {

struct AttainingReport {
  std::vector<ArcInterval> arcs;
  /// min over the attaining band (both antipodal copies) of ||x - x0||.
  double min_dist = 0.0;
  /// min over the band of |y1*(T x)|.
  double min_face_value = 0.0;
};

struct Certificate {
  CounterexampleSeed seed;
  std::vector<double> lambdas;
  std::vector<Operator2> operators;
  std::vector<double> values;  ///< ||T_lambda x0||
  std::vector<AttainingReport> attaining;
  /// 1 unless ||T_lambda|| drifted past 1e-9 and the operator was rescaled.
  std::vector<double> renormalized;
  bool valid = false;
  std::string witness;
  double tol = 1e-9;
};

/// lambda_n = 1 - 2^-n, n = 1..count.
inline std::vector<double> default_lambdas(int count = 20) {
  std::vector<double> out;
  for (int n = 1; n <= count; ++n) out.push_back(1.0 - std::ldexp(1.0, -n));
  return out;
}

namespace detail {

/// min over arc points x (and -x) of ||x - x0||, grid plus refinement.
inline double arc_distance(const Norm2& x, Vec2 x0, const ArcInterval& arc) {
  auto d = [&](double th) {
    const Vec2 p = sphere_point(x, th);
    return std::min(x.value(p - x0), x.value(-p - x0));
  };
  if (arc.width() <= 1e-12) return d(arc.lo);
  return minimize(d, arc.lo, arc.hi, {256, 4, kRefineWidth}).value;
}

inline double arc_min_face_value(const Operator2& t, Functional2 ys, const ArcInterval& arc) {
  auto f = [&](double th) { return std::abs(ys(t.matrix * sphere_point(t.domain, th))); };
  if (arc.width() <= 1e-12) return f(arc.lo);
  return minimize(f, arc.lo, arc.hi, {256, 4, kRefineWidth}).value;
}

}  // namespace detail

/// Builds T_lambda = (lambda I + (1 - lambda) y1 (x) y1*) T for each lambda
/// and records the attaining band of each with its distance to x0.
inline Certificate p2_failure_family(const CounterexampleSeed& seed, const std::vector<double>& lambdas,
                                     double tol = 1e-9, std::size_t grid = kDefaultGrid) {
  if (lambdas.empty()) throw ValidationError("lambda list is empty");
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    if (!(lambdas[i] >= 0.0 && lambdas[i] < 1.0)) throw ValidationError("lambdas must lie in [0, 1)");
    if (i > 0 && !(lambdas[i] > lambdas[i - 1])) throw ValidationError("lambdas must be strictly ascending");
  }
  if (!(tol > 0.0 && tol <= 1e-4)) throw ValidationError("tol must lie in (0, 1e-4]");
  Certificate cert;
  cert.seed = seed;
  cert.lambdas = lambdas;
  cert.tol = tol;
  cert.valid = true;
  const Norm2& x = seed.t.domain;
  cert.operators.resize(lambdas.size());
  cert.values.resize(lambdas.size());
  cert.attaining.resize(lambdas.size());
  cert.renormalized.resize(lambdas.size());

  // iterations are independent; run them sequentially (the sweeps inside
  // already use the parallel helper)
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    Operator2 tl{rank_one_blend(lambdas[i], seed.y1, seed.y1_star) * seed.t.matrix, x, seed.t.codomain};
    const double on = operator_norm(tl, {grid, 4, kRefineWidth}).norm;
    cert.renormalized[i] = 1.0;
    if (std::abs(on - 1.0) > 1e-9) {
      tl = tl.scaled(1.0 / on);
      cert.renormalized[i] = 1.0 / on;
    }
    cert.operators[i] = tl;
    cert.values[i] = tl.codomain(tl.matrix * seed.x0);
    AttainingReport rep;
    rep.arcs = attaining_set(tl, tol, grid);
    rep.min_dist = INFINITY;
    rep.min_face_value = INFINITY;
    for (const ArcInterval& a : rep.arcs) {
      rep.min_dist = std::min(rep.min_dist, detail::arc_distance(x, seed.x0, a));
      rep.min_face_value = std::min(rep.min_face_value, detail::arc_min_face_value(seed.t, seed.y1_star, a));
    }
    if (!(rep.min_dist > seed.delta) && cert.valid) {
      cert.valid = false;
      cert.witness = "lambda = " + std::to_string(lambdas[i]) + ": attaining band at distance " +
                     std::to_string(rep.min_dist) + " <= delta";
    }
    cert.attaining[i] = std::move(rep);
  }
  for (std::size_t i = 1; i < cert.values.size(); ++i) {
    if (cert.values[i] < cert.values[i - 1] - 1e-12 && cert.valid) {
      cert.valid = false;
      cert.witness = "values decrease at lambda = " + std::to_string(lambdas[i]);
    }
  }
  return cert;
}

struct VerificationClause {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct VerificationReport {
  std::vector<VerificationClause> clauses;
  std::vector<double> norms;      ///< re-measured ||T_n||
  std::vector<double> values;     ///< re-measured ||T_n x0||
  std::vector<double> distances;  ///< re-measured band distance to x0
  bool pass = false;
};

struct VerifyOptions {
  std::size_t samples = 1000000;
  double band = 1e-9;
  double norm_tol = 1e-6;
  double final_value = 1.0 - 1e-4;
  double distance_factor = 1.0 - 1e-3;
  double value_match = 1e-9;
};

/// Re-verifies a certificate from its operators, x0 and delta alone, by
/// scanning `samples` sphere points for every operator.
inline VerificationReport verify_certificate(const Certificate& cert, const VerifyOptions& opt = {}) {
  VerificationReport rep;
  auto clause = [&](std::string name, bool pass, std::string detail) {
    rep.clauses.push_back({std::move(name), pass, std::move(detail)});
  };
  const std::size_t count = cert.operators.size();
  if (count == 0 || count != cert.lambdas.size() || count != cert.values.size()) {
    clause("shape", false, "operators, lambdas and values differ in length or are empty");
    return rep;
  }
  const Norm2& x = cert.operators.front().domain;
  const Vec2 x0 = cert.seed.x0;
  const double delta = cert.seed.delta;

  // shared sphere sample of the domain on [0, pi); the rest is antipodal
  const std::size_t n = opt.samples;
  const double h = kPi / static_cast<double>(n);
  std::vector<Vec2> pts(n);
  parallel_for(n, [&](std::size_t i) { pts[i] = sphere_point(x, h * static_cast<double>(i)); });

  std::string norm_detail, dist_detail;
  bool norms_ok = true, dist_ok = true;
  std::vector<double> vals(n);
  for (std::size_t k = 0; k < count; ++k) {
    const Operator2& t = cert.operators[k];
    const Norm2& y = t.codomain;
    parallel_for(n, [&](std::size_t i) { vals[i] = y.value(t.matrix * pts[i]); });
    double m = *std::max_element(vals.begin(), vals.end());
    std::vector<Vec2> band_pts;
    // polish the largest sampled peaks on the continuous curve
    auto f = [&](double th) { return y.value(t.matrix * sphere_point(x, th)); };
    const auto peaks = detail::local_maxima(vals, true);
    for (std::size_t j = 0; j < std::min<std::size_t>(peaks.size(), 16); ++j) {
      const std::size_t i = peaks[j];
      if (vals[i] < m - 1e-3) break;
      const Extremum e = golden_max(f, h * (static_cast<double>(i) - 1.0), h * (static_cast<double>(i) + 1.0));
      if (e.value > m) m = e.value;
      band_pts.push_back(sphere_point(x, e.arg));
    }
    const double level = m - opt.band;
    band_pts.erase(std::remove_if(band_pts.begin(), band_pts.end(),
                                  [&](Vec2 p) { return y.value(t.matrix * p) < level; }),
                   band_pts.end());
    for (std::size_t i = 0; i < n; ++i)
      if (vals[i] >= level) band_pts.push_back(pts[i]);
    double d = INFINITY;
    for (Vec2 p : band_pts) d = std::min({d, x.value(p - x0), x.value(-p - x0)});
    rep.norms.push_back(m);
    rep.values.push_back(y.value(t.matrix * x0));
    rep.distances.push_back(d);
    if (std::abs(m - 1.0) > opt.norm_tol) {
      norms_ok = false;
      if (norm_detail.empty()) norm_detail = "||T_" + std::to_string(k + 1) + "|| = " + std::to_string(m);
    }
    if (!(d > delta * opt.distance_factor)) {
      dist_ok = false;
      if (dist_detail.empty())
        dist_detail = "lambda index " + std::to_string(k + 1) + ": distance " + std::to_string(d) + " <= " +
                      std::to_string(delta * opt.distance_factor);
    }
  }
  clause("x0_unit", std::abs(x(x0) - 1.0) <= 1e-9, "||x0|| = " + std::to_string(x(x0)));
  clause("delta_positive", delta > 0.0, "delta = " + std::to_string(delta));
  clause("operator_norms", norms_ok, norms_ok ? "all within 1e-6 of 1" : norm_detail);

  bool mono = true;
  for (std::size_t k = 1; k < count; ++k)
    if (rep.values[k] < rep.values[k - 1] - 1e-12) mono = false;
  clause("values_monotone", mono, mono ? "non-decreasing in lambda" : "values decrease");
  const double last = rep.values.back();
  clause("values_limit", last >= opt.final_value, "last value " + std::to_string(last));
  bool match = true;
  for (std::size_t k = 0; k < count; ++k)
    if (std::abs(rep.values[k] - cert.values[k]) > opt.value_match) match = false;
  clause("values_recorded", match, match ? "recorded values reproduce" : "recorded values differ from re-measured");
  clause("distance", dist_ok, dist_ok ? "every band stays farther than delta from x0" : dist_detail);
  rep.pass = std::all_of(rep.clauses.begin(), rep.clauses.end(), [](const VerificationClause& c) { return c.pass; });
  return rep;
}

}  // namespace planenorm
