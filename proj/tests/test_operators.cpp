#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "planenorm/operators.hpp"

using namespace planenorm;

namespace {

Mat2 random_matrix(std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  return {g(rng), g(rng), g(rng), g(rng)};
}

std::vector<Norm2> pool() {
  return {fixtures::l1(), fixtures::l15(), fixtures::l2(), fixtures::l3(), fixtures::linf(), fixtures::hexagon(),
          fixtures::random_16gon(), fixtures::random_ellipse(9)};
}

}  // namespace

TEST(Apply, Examples) {
  const Norm2 e = Norm2::euclidean();
  const Vec2 a = apply(make_operator(Mat2::identity(), e, e), {0.3, -2.0});
  EXPECT_EQ(a, (Vec2{0.3, -2.0}));
  EXPECT_EQ(apply(make_operator(Mat2::diagonal(2, 1), e, e), {1, 0}), (Vec2{2, 0}));
  // P y = y*(y) y1 kills the kernel of y*
  const Vec2 y1{1.0, 0.0};
  const Functional2 ys{1.0, 0.0};
  const Mat2 p{y1.x * ys.a1, y1.x * ys.a2, y1.y * ys.a1, y1.y * ys.a2};
  const Vec2 k = apply(make_operator(p, e, e), {0.0, 5.0});
  EXPECT_EQ(k, (Vec2{0.0, 0.0}));
  EXPECT_THROW(make_operator({NAN, 0, 0, 1}, e, e), ValidationError);
}

TEST(OperatorNorm, Examples) {
  const Norm2 l1 = Norm2::lp(1.0), li = Norm2::lp_infinity(), l2 = Norm2::euclidean();
  EXPECT_NEAR(operator_norm(make_operator(Mat2::identity(), l1, li)).norm, 1.0, 1e-14);
  const OperatorNorm b = operator_norm(make_operator(Mat2::identity(), li, l1));
  EXPECT_NEAR(b.norm, 2.0, 1e-14);
  const Vec2 at = sphere_point(li, b.argmax);
  EXPECT_NEAR(std::abs(at.x), 1.0, 1e-9);
  EXPECT_NEAR(std::abs(at.y), 1.0, 1e-9);
  EXPECT_NEAR(operator_norm(make_operator(Mat2::diagonal(2, 1), l2, l2)).norm, 2.0, 1e-14);
  const OperatorNorm z = operator_norm(make_operator({0, 0, 0, 0}, l2, l2));
  EXPECT_EQ(z.norm, 0.0);
  EXPECT_EQ(z.argmax, 0.0);
}

TEST(OperatorNorm, MatchesBruteForce) {
  std::mt19937_64 rng(21);
  const auto norms = pool();
  std::uniform_int_distribution<std::size_t> pick(0, norms.size() - 1);
  for (int i = 0; i < 30; ++i) {
    const Norm2& x = norms[pick(rng)];
    const Norm2& y = norms[pick(rng)];
    const Mat2 m = random_matrix(rng);
    const double on = operator_norm(make_operator(m, x, y)).norm;
    EXPECT_NEAR(on, oracle::operator_norm(m, x, y, 100000), 1e-9 * on) << x.describe() << " -> " << y.describe();
  }
}

TEST(OperatorNorm, HomogeneousAndSubmultiplicative) {
  std::mt19937_64 rng(22);
  std::normal_distribution<double> g;
  const auto norms = pool();
  for (int i = 0; i < 20; ++i) {
    const Norm2& x = norms[i % norms.size()];
    const Norm2& y = norms[(i * 3 + 1) % norms.size()];
    const Norm2& z = norms[(i * 5 + 2) % norms.size()];
    const Operator2 t = make_operator(random_matrix(rng), x, y);
    const double a = g(rng);
    EXPECT_NEAR(operator_norm(t.scaled(a)).norm, std::abs(a) * operator_norm(t).norm, 1e-12 * (1 + std::abs(a) * operator_norm(t).norm));
    const Operator2 p = make_operator(random_matrix(rng), y, z);
    EXPECT_LE(operator_norm(compose(p, t)).norm, operator_norm(p).norm * operator_norm(t).norm + 1e-9);
  }
}

TEST(Adjoint, Examples) {
  const Norm2 l2 = Norm2::euclidean();
  const Operator2 r = make_operator(Mat2::rotation(kPi / 2), l2, l2);
  const Operator2 ra = adjoint(r);
  const Mat2 expect = Mat2::rotation(-kPi / 2);
  EXPECT_NEAR((ra.matrix - expect).max_abs(), 0.0, 1e-15);
  const Operator2 i = adjoint(make_operator(Mat2::identity(), Norm2::lp(1.0), Norm2::lp_infinity()));
  EXPECT_EQ(i.matrix, Mat2::identity());
  EXPECT_NEAR(i.domain(Vec2{0.3, 0.4}), 0.7, 1e-15);    // dual of l_inf
  EXPECT_NEAR(i.codomain(Vec2{0.3, 0.4}), 0.4, 1e-15);  // dual of l_1
}

TEST(Adjoint, PairingNormAndInvolution) {
  std::mt19937_64 rng(23);
  std::normal_distribution<double> g;
  const auto norms = pool();
  for (int i = 0; i < 100; ++i) {
    const Operator2 t = make_operator(random_matrix(rng), norms[i % norms.size()], norms[(i * 7 + 3) % norms.size()]);
    const Operator2 ta = adjoint(t);
    const Functional2 f{g(rng), g(rng)};
    const Vec2 x{g(rng), g(rng)};
    EXPECT_NEAR(apply_adjoint(t, f)(x), f(t.matrix * x), 1e-12 * (1 + std::abs(f(t.matrix * x))));
    EXPECT_NEAR(operator_norm(ta).norm, operator_norm(t).norm, 1e-7 * operator_norm(t).norm);
    EXPECT_EQ(adjoint(ta).matrix, t.matrix);
  }
}

TEST(AttainingSet, IdentityOnSquareIsEverything) {
  const Norm2 li = Norm2::lp_infinity();
  const auto arcs = attaining_set(make_operator(Mat2::identity(), li, li), 1e-9);
  ASSERT_EQ(arcs.size(), 1u);
  EXPECT_EQ(arcs[0].lo, 0.0);
  EXPECT_NEAR(arcs[0].hi, kPi, 1e-15);
}

TEST(AttainingSet, DiagonalOnDisk) {
  const Norm2 l2 = Norm2::euclidean();
  const auto arcs = attaining_set(make_operator(Mat2::diagonal(1, 0.5), l2, l2), 1e-9);
  ASSERT_EQ(arcs.size(), 1u);
  // near e1 the profile is about 1 - 3 theta^2 / 8, so the band 1 - tol has
  // half-width sqrt(8 tol / 3)
  EXPECT_NEAR(arcs[0].width(), 2.0 * std::sqrt(8e-9 / 3.0), 1e-6);
  const double c = wrap(arcs[0].mid(), kPi);
  EXPECT_LT(std::min(c, kPi - c), 1e-4);
}

TEST(AttainingSet, RequiresUnitNorm) {
  const Norm2 l2 = Norm2::euclidean();
  EXPECT_THROW(attaining_set(make_operator(Mat2::diagonal(2, 1), l2, l2)), ValidationError);
}

TEST(AttainingSet, ArcsMapIntoBand) {
  std::mt19937_64 rng(24);
  const auto norms = pool();
  for (int i = 0; i < 20; ++i) {
    const Norm2& x = norms[i % norms.size()];
    const Norm2& y = norms[(i + 3) % norms.size()];
    Operator2 t = make_operator(random_matrix(rng), x, y);
    t = t.scaled(1.0 / operator_norm(t).norm);
    const double tol = 1e-9;
    const auto arcs = attaining_set(t, tol);
    ASSERT_FALSE(arcs.empty());
    for (const ArcInterval& a : arcs) {
      for (int k = 0; k <= 32; ++k) {
        const double th = a.lo + a.width() * k / 32.0;
        EXPECT_GE(t.profile(th), 1.0 - 2.0 * tol) << x.describe() << " -> " << y.describe();
      }
    }
    // brute force: every sampled point above the band lies in some arc
    for (int k = 0; k < 20000; ++k) {
      const double th = kPi * k / 20000.0;
      if (t.profile(th) < 1.0 - 0.5 * tol) continue;
      bool inside = false;
      for (const ArcInterval& a : arcs)
        for (double shift : {0.0, kPi, -kPi})
          if (th + shift >= a.lo - 1e-9 && th + shift <= a.hi + 1e-9) inside = true;
      EXPECT_TRUE(inside) << "theta " << th;
    }
  }
}

TEST(Face, Examples) {
  const ArcInterval a = face(Norm2::euclidean(), {1, 0});
  EXPECT_TRUE(a.degenerate());
  const double c = a.lo;
  EXPECT_LT(std::min(c, kTwoPi - c), 1e-6);
  const ArcInterval b = face(Norm2::lp_infinity(), {1, 0});
  EXPECT_NEAR(std::cos(b.lo), std::cos(-kPi / 4), 1e-9);
  EXPECT_NEAR(std::sin(b.lo), std::sin(-kPi / 4), 1e-9);
  EXPECT_NEAR(b.width(), kPi / 2, 1e-9);
  EXPECT_THROW(face(Norm2::lp_infinity(), {2, 0}), ValidationError);
}

TEST(Face, HexagonEdgeSpansAdjacentVertices) {
  const Norm2 h = fixtures::hexagon();
  const auto& poly = *h.as_polygon();
  for (std::size_t k = 0; k < poly.vertices.size(); ++k) {
    const ArcInterval a = face(h, poly.facets[k]);
    const Vec2 lo = sphere_point(h, a.lo), hi = sphere_point(h, a.hi);
    const Vec2 p = poly.vertices[k], q = poly.vertices[(k + 1) % poly.vertices.size()];
    EXPECT_NEAR(euclidean(lo - p), 0.0, 1e-9);
    EXPECT_NEAR(euclidean(hi - q), 0.0, 1e-9);
    EXPECT_TRUE(check_face_interval(h, poly.facets[k], a.lo, a.hi));
  }
}

TEST(Face, FacePairSamplesSatisfyFunctional) {
  for (const Norm2& n : pool()) {
    for (double th = 0.05; th < 3.1; th += 0.31) {
      const Functional2 f = supporting_functional(n, sphere_point(n, th));
      const FacePair fp = face_pair(n, f);
      for (int k = 0; k <= 16; ++k) {
        EXPECT_NEAR(f(sphere_point(n, fp.plus_face.lo + fp.plus_face.width() * k / 16.0)), 1.0, 1e-9);
        EXPECT_NEAR(f(sphere_point(n, fp.minus_face.lo + fp.minus_face.width() * k / 16.0)), -1.0, 1e-9);
      }
    }
  }
}

TEST(DistToFaceUnion, Examples) {
  const Norm2 li = Norm2::lp_infinity();
  const FacePair fp = face_pair(li, {1, 0});
  EXPECT_NEAR(dist_to_face_union(li, {0, 1}, fp), 1.0, 1e-9);
  EXPECT_NEAR(oracle::face_union_distance(li, {0, 1}, {1, 0}), 1.0, 1e-9);
  EXPECT_NEAR(dist_to_face_union(li, {1, 0.3}, fp), 0.0, 1e-12);
  for (double th = 0.0; th < 6.2; th += 0.4) {
    const Vec2 y = sphere_point(li, th);
    EXPECT_NEAR(dist_to_face_union(li, y, fp), dist_to_face_union(li, -y, fp), 1e-12);
  }
}

TEST(DistToFaceUnion, MatchesBruteForce) {
  std::mt19937_64 rng(25);
  std::uniform_real_distribution<double> ang(0.0, kTwoPi);
  for (const Norm2& n : pool()) {
    for (int i = 0; i < 4; ++i) {
      const Functional2 f = supporting_functional(n, sphere_point(n, ang(rng)));
      const Vec2 y = sphere_point(n, ang(rng));
      const double d = dist_to_face_union(n, y, face_pair(n, f));
      const double ref = oracle::face_union_distance(n, y, f);
      // the oracle only sees face points on its 1e5 grid (spacing ~6e-5)
      EXPECT_LE(d, ref + 1e-5) << n.describe();
      EXPECT_NEAR(d, ref, 1e-4) << n.describe();
    }
  }
}

TEST(CheckFaceInterval, Examples) {
  EXPECT_TRUE(check_face_interval(Norm2::lp_infinity(), {1, 0}, -kPi / 4, kPi / 4));
  EXPECT_TRUE(check_face_interval(Norm2::euclidean(), {1, 0}, 0.0, 0.0));
  EXPECT_THROW(check_face_interval(Norm2::euclidean(), {1, 0}, 1.0, 0.0), ValidationError);
  EXPECT_THROW(check_face_interval(Norm2::euclidean(), {1, 0}, 0.0, 4.0), ValidationError);
}

TEST(CheckFaceInterval, RandomCases) {
  std::mt19937_64 rng(26);
  std::uniform_real_distribution<double> ang(0.0, kTwoPi), w(0.0, kPi);
  const auto norms = pool();
  for (int i = 0; i < 1000; ++i) {
    const Norm2& n = norms[i % norms.size()];
    const Functional2 f = supporting_functional(n, sphere_point(n, ang(rng)));
    const double t1 = ang(rng);
    EXPECT_TRUE(check_face_interval(n, f, t1, t1 + w(rng)));
  }
}
