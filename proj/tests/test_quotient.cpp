#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "planenorm/certificate.hpp"
#include "planenorm/quotient.hpp"

using namespace planenorm;

namespace {

VecN vec(std::initializer_list<double> v) {
  VecN out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

VecN axis(int n, int i) { return VecN::Unit(n, i); }

VecN gaussian(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> g;
  VecN v(n);
  for (int i = 0; i < n; ++i) v[i] = g(rng);
  return v;
}

NormN random_polytope(std::mt19937_64& rng, int n, int count) {
  std::vector<VecN> fs;
  for (int i = 0; i < count; ++i) fs.push_back(gaussian(rng, n));
  return NormN::polytope(fs);
}

NormN random_ellipsoid(std::mt19937_64& rng, int n) {
  const MatN a = MatN::NullaryExpr(n, n, [&]() { return std::normal_distribution<double>()(rng); });
  return NormN::ellipsoid(a * a.transpose() + MatN::Identity(n, n));
}

}  // namespace

TEST(Quotient, L1DropsThirdCoordinate) {
  const QuotientPresentation q = quotient_norm(NormN::lp(3, 1.0), {axis(3, 2)});
  for (double th = 0.0; th < 6.3; th += 0.05) {
    const Vec2 v = unit_direction(th) * 1.7;
    EXPECT_NEAR(q.exact(v), std::abs(v.x) + std::abs(v.y), 1e-12);
    EXPECT_NEAR(q.induced(v), std::abs(v.x) + std::abs(v.y), 1e-9);
  }
}

TEST(Quotient, LinfDropsThirdCoordinate) {
  const QuotientPresentation q = quotient_norm(NormN::lp_infinity(3), {axis(3, 2)});
  for (double th = 0.0; th < 6.3; th += 0.05) {
    const Vec2 v = unit_direction(th);
    EXPECT_NEAR(q.exact(v), std::max(std::abs(v.x), std::abs(v.y)), 1e-12);
    EXPECT_NEAR(q.induced(v), std::max(std::abs(v.x), std::abs(v.y)), 1e-9);
  }
}

TEST(Quotient, EuclideanIsOrthogonalProjection) {
  const QuotientPresentation q = quotient_norm(NormN::lp(4, 2.0), {axis(4, 2), axis(4, 3)});
  EXPECT_LT(q.approx_gap, 1e-3);
  for (double th = 0.0; th < 6.3; th += 0.05) {
    const Vec2 v = unit_direction(th);
    EXPECT_NEAR(q.exact(v), 1.0, 1e-9);
    EXPECT_NEAR(q.induced(v), 1.0, q.approx_gap + 1e-12);
  }
}

TEST(Quotient, MatchesIndependentMinimizer) {
  std::mt19937_64 rng(41);
  const std::vector<NormN> ambients{NormN::lp(3, 1.0), NormN::lp(3, 3.0), NormN::lp_infinity(4),
                                    random_polytope(rng, 3, 5), random_ellipsoid(rng, 4), NormN::lp(4, 1.5)};
  int samples = 0;
  for (const NormN& a : ambients) {
    const int n = a.dim();
    std::vector<VecN> basis;
    for (int i = 0; i < n - 2; ++i) basis.push_back(gaussian(rng, n));
    const QuotientPresentation q = quotient_norm(a, basis);
    EXPECT_LT(q.approx_gap, 1e-3) << a.describe();
    for (int k = 0; k < 170; ++k, ++samples) {
      const VecN x = gaussian(rng, n);
      const VecN qx = q.q() * x;
      const Vec2 v{qx[0], qx[1]};
      const double val = q.exact(v);
      const double ref = oracle::quotient_value(a, x, q.z);
      EXPECT_NEAR(val, ref, 1e-6 * (1.0 + ref)) << a.describe();
      // never above the norm of any representative
      EXPECT_LE(val, a.value(x) + 1e-10);
      const VecN r = q.representative(v);
      EXPECT_NEAR(a.value(r), val, 1e-9 * (1.0 + val));
      EXPECT_LE(q.induced(v), val * (1.0 + q.approx_gap) + 1e-12);
      EXPECT_GE(q.induced(v), val * (1.0 - q.approx_gap) - 1e-12);
    }
  }
  EXPECT_GE(samples, 1000);
}

TEST(Quotient, QuotientMapHasNormOne) {
  std::mt19937_64 rng(42);
  for (const NormN& a : {NormN::lp(3, 1.0), NormN::lp(3, 3.0), random_ellipsoid(rng, 3)}) {
    const QuotientPresentation q = quotient_norm(a, {gaussian(rng, 3)});
    double sup = 0.0;
    for (int k = 0; k < 2000; ++k) {
      const VecN x = gaussian(rng, 3);
      const VecN qx = q.q() * x;
      sup = std::max(sup, q.exact({qx[0], qx[1]}) / a.value(x));
    }
    EXPECT_LE(sup, 1.0 + 1e-10);
    // attained at minimizing representatives, which also cover the induced ball
    for (double th = 0.0; th < 6.3; th += 0.1) {
      const Vec2 v = unit_direction(th);
      const VecN r = q.representative(v);
      const VecN back = q.q() * r;
      EXPECT_NEAR(q.exact(v) / a.value(r), 1.0, 1e-8);
      EXPECT_NEAR(back[0], v.x, 1e-12);
      EXPECT_NEAR(back[1], v.y, 1e-12);
    }
  }
}

TEST(Quotient, Rejections) {
  EXPECT_THROW(quotient_norm(NormN::lp(4, 2.0), {axis(4, 2), axis(4, 2) * 2.0}), ValidationError);
  EXPECT_THROW(quotient_norm(NormN::lp(9, 2.0), std::vector<VecN>(7, axis(9, 0))), ValidationError);
  EXPECT_THROW(quotient_norm(NormN::lp(4, 2.0), {axis(4, 2)}), ValidationError);
  EXPECT_THROW(quotient_norm(NormN::lp(3, 2.0), {axis(4, 2)}), ValidationError);
}

TEST(Restriction, CoordinatePlanes) {
  const RestrictedCodomain r = restrict_codomain(NormN::lp_infinity(3), {axis(3, 0), axis(3, 1)});
  EXPECT_TRUE(r.exact);
  ASSERT_NE(r.norm.as_lp(), nullptr);
  EXPECT_TRUE(r.norm.as_lp()->infinite);
}

TEST(Restriction, EuclideanOrthonormalPair) {
  std::mt19937_64 rng(43);
  const MatN qm = Eigen::HouseholderQR<MatN>(MatN::NullaryExpr(5, 2, [&]() {
                    return std::normal_distribution<double>()(rng);
                  })).householderQ() * MatN::Identity(5, 2);
  const RestrictedCodomain r = restrict_codomain(NormN::lp(5, 2.0), {qm.col(0), qm.col(1)});
  for (double th = 0.0; th < 6.3; th += 0.1) EXPECT_NEAR(r.norm(unit_direction(th)), 1.0, 1e-12);
}

TEST(Restriction, WeightedL1) {
  const RestrictedCodomain r = restrict_codomain(NormN::lp(3, 1.0), {vec({1, 1, 0}), axis(3, 2)});
  EXPECT_TRUE(r.exact);
  std::mt19937_64 rng(44);
  std::normal_distribution<double> g;
  for (int k = 0; k < 200; ++k) {
    const double a = g(rng), b = g(rng);
    const VecN y = vec({a, a, b});
    EXPECT_NEAR(r.norm({a, b}), y.cwiseAbs().sum(), 1e-12);
    EXPECT_NEAR(r.norm({a, b}), 2.0 * std::abs(a) + std::abs(b), 1e-12);
  }
}

TEST(Restriction, SmoothObliquePlaneIsPolygonized) {
  const NormN a = NormN::lp(3, 3.0);
  const RestrictedCodomain r = restrict_codomain(a, {vec({1, 1, 0}), vec({0, 1, 1})});
  EXPECT_FALSE(r.exact);
  EXPECT_LT(r.approx_gap, 1e-3);
  for (double th = 0.0; th < 6.3; th += 0.07) {
    const Vec2 v = unit_direction(th);
    const double exact = a.value(r.embed_vec(v));
    EXPECT_NEAR(r.norm(v), exact, exact * r.approx_gap + 1e-12);
  }
}

TEST(Restriction, Rejections) {
  EXPECT_THROW(restrict_codomain(NormN::lp(3, 2.0), {axis(3, 0), axis(3, 0)}), ValidationError);
  EXPECT_THROW(restrict_codomain(NormN::lp(3, 2.0), {axis(3, 0)}), ValidationError);
}

TEST(Lift, IdentityOnRepresentatives) {
  const QuotientPresentation q = quotient_norm(NormN::lp(3, 1.5), {vec({1, 2, 3})});
  const RestrictedCodomain r = restrict_codomain(NormN::lp(3, 1.5), {axis(3, 0), axis(3, 1)});
  const Mat2 t{0.3, -1.1, 0.7, 0.2};
  MatN tm(2, 2);
  tm << t.a, t.b, t.c, t.d;
  const MatN lifted = r.embed * tm * q.q();
  for (double th = 0.0; th < 6.3; th += 0.3) {
    const Vec2 v = unit_direction(th) * 0.8;
    const VecN y = lifted * q.representative(v);
    const Vec2 want = t * v;
    EXPECT_NEAR(y[0], want.x, 1e-12);
    EXPECT_NEAR(y[1], want.y, 1e-12);
    EXPECT_NEAR(y[2], 0.0, 1e-15);
  }
}

TEST(Lift, SquareCertificateLiftsToThreeDimensions) {
  const NormN ax = NormN::lp_infinity(3), ay = NormN::lp_infinity(3);
  const QuotientPresentation q = quotient_norm(ax, {axis(3, 2)});
  const RestrictedCodomain r = restrict_codomain(ay, {axis(3, 0), axis(3, 1)});
  const CounterexampleSeed seed = build_counterexample(q.induced, r.norm);
  const Certificate cert = p2_failure_family(seed, default_lambdas());
  ASSERT_TRUE(cert.valid);
  const LiftReport rep = lift_certificate(q, ay, r, cert);
  EXPECT_TRUE(rep.pass) << rep.detail;
  EXPECT_TRUE(rep.scanned);
  EXPECT_GE(rep.delta_prime, 0.9 * rep.delta);
  ASSERT_EQ(rep.ambient_norms.size(), cert.operators.size());
  for (std::size_t k = 0; k < rep.ambient_norms.size(); ++k) {
    // the quotient map is a metric surjection
    EXPECT_NEAR(rep.ambient_norms[k], rep.norms_2d[k], 1e-8);
    const Operator2& t = cert.operators[k];
    EXPECT_NEAR(rep.norms_2d[k], oracle::operator_norm(t.matrix, t.domain, t.codomain, 100000), 1e-8);
    EXPECT_GE(rep.distances[k], rep.delta_prime);
  }
  EXPECT_NEAR(ax.value(rep.x0_hat), 1.0, 1e-12);
  EXPECT_GE(rep.values.back(), 1.0 - 1e-4);
}

TEST(Lift, RejectsMismatchedEmbedding) {
  const QuotientPresentation q = quotient_norm(NormN::lp_infinity(3), {axis(3, 2)});
  const RestrictedCodomain r = restrict_codomain(NormN::lp_infinity(3), {axis(3, 0), axis(3, 1)});
  const Certificate cert = p2_failure_family(build_counterexample(q.induced, r.norm), {0.5, 0.75});
  EXPECT_THROW(lift_certificate(q, NormN::lp_infinity(4), r, cert), ValidationError);
}
