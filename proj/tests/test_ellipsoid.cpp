#include <algorithm>
#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "planenorm/ellipsoid.hpp"

using namespace planenorm;

namespace {

/// max over dense Euclidean directions of ||A u||_Y.
double excess(const Norm2& y, const Mat2& a, std::size_t n = 20000) {
  return oracle::dense_max([&](double phi) { return y.value(a * Vec2{std::cos(phi), std::sin(phi)}); }, 0.0,
                           oracle::kPi, n);
}

Norm2 scaled_polygon(const Norm2& p, double s) {
  std::vector<Vec2> v = p.as_polygon()->vertices;
  for (Vec2& q : v) q = q * s;
  return Norm2::polygon(v);
}

void expect_contacts_valid(const Norm2& y, const JohnEllipse& je) {
  ASSERT_GE(je.contacts.size(), 2u);
  ASSERT_EQ(je.contacts.size(), je.contact_angles.size());
  for (std::size_t i = 0; i < je.contacts.size(); ++i) {
    EXPECT_NEAR(y(je.contacts[i]), 1.0, 1e-8) << y.describe();
    const Vec2 u = je.a.inverse() * je.contacts[i];
    EXPECT_NEAR(euclidean(u), 1.0, 1e-9);
  }
}

}  // namespace

TEST(JohnEllipse, SquareIsUnitDisk) {
  const JohnEllipse je = john_ellipse(Norm2::lp_infinity());
  EXPECT_NEAR(je.a.det(), 1.0, 1e-7);
  EXPECT_NEAR((je.a - Mat2::identity()).max_abs(), 0.0, 1e-7);
  ASSERT_EQ(je.contact_angles.size(), 2u);
  EXPECT_NEAR(je.contact_angles[0], 0.0, 1e-6);
  EXPECT_NEAR(je.contact_angles[1], kPi / 2, 1e-6);
  expect_contacts_valid(Norm2::lp_infinity(), je);
}

TEST(JohnEllipse, PolygonSquareMatchesLpSquare) {
  const JohnEllipse je = john_ellipse(Norm2::polygon({{1, 1}, {-1, 1}}));
  EXPECT_NEAR(je.a.det(), 1.0, 1e-7);
}

TEST(JohnEllipse, DiskIsItself) {
  const JohnEllipse je = john_ellipse(Norm2::euclidean());
  EXPECT_NEAR((je.a - Mat2::identity()).max_abs(), 0.0, 1e-7);
  ASSERT_EQ(je.contact_angles.size(), 2u);
  EXPECT_EQ(je.contact_angles[0], 0.0);
  EXPECT_EQ(je.contact_angles[1], kPi / 2);
}

TEST(JohnEllipse, HexagonInscribedDisk) {
  const Norm2 h = fixtures::hexagon();
  const JohnEllipse je = john_ellipse(h);
  // apothem: distance from the center to each edge line, computed directly
  const auto& v = h.as_polygon()->vertices;
  double apothem = INFINITY;
  for (std::size_t k = 0; k < v.size(); ++k) {
    const Vec2 p = v[k], q = v[(k + 1) % v.size()];
    apothem = std::min(apothem, std::abs(cross(p, q)) / euclidean(q - p));
  }
  EXPECT_NEAR(apothem, std::sqrt(3.0) / 2.0, 1e-15);
  EXPECT_NEAR(je.a.det(), apothem * apothem, 1e-6);
  EXPECT_NEAR((je.a - Mat2::identity() * apothem).max_abs(), 0.0, 1e-6);
  ASSERT_EQ(je.contacts.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    // edge midpoints sit at 30, 90 and 150 degrees
    EXPECT_NEAR(je.contact_angles[i], kPi / 6 + i * kPi / 3, 1e-5);
  }
  expect_contacts_valid(h, je);
}

TEST(JohnEllipse, FeasibleAndNoLargerFeasibleNeighbor) {
  std::mt19937_64 rng(31);
  std::normal_distribution<double> g;
  for (const Norm2& y : {fixtures::hexagon(), fixtures::random_16gon(), fixtures::l3(), fixtures::l15(), fixtures::l1()}) {
    const JohnEllipse je = john_ellipse(y);
    EXPECT_LE(je.violation, 1e-9) << y.describe();
    EXPECT_LE(excess(y, je.a), 1.0 + 1e-9) << y.describe();
    expect_contacts_valid(y, je);
    // random symmetric perturbations, rescaled onto the ball by the oracle,
    // never have larger area
    for (int i = 0; i < 30; ++i) {
      const double e = 0.05 * g(rng), f = 0.05 * g(rng), h = 0.05 * g(rng);
      const Mat2 b = je.a + Mat2{e, f, f, h};
      if (b.det() <= 0.0) continue;
      const Mat2 c = b * (1.0 / excess(y, b, 4096));
      EXPECT_LE(c.det(), je.a.det() * (1.0 + 1e-6)) << y.describe();
    }
  }
}

TEST(JohnEllipse, ContactsSatisfyJohnCondition) {
  // I lies in the cone of u u^T exactly when the contact parameters, taken
  // mod pi, leave no gap wider than pi/2
  for (const Norm2& y : {fixtures::hexagon(), fixtures::random_16gon(), fixtures::l3(), fixtures::l1()}) {
    const JohnEllipse je = john_ellipse(y);
    std::vector<double> t;
    for (const Vec2& c : je.contacts) {
      const Vec2 u = je.a.inverse() * c;
      t.push_back(wrap(std::atan2(u.y, u.x), kPi));
    }
    std::sort(t.begin(), t.end());
    double gap = t.front() + kPi - t.back();
    for (std::size_t i = 1; i < t.size(); ++i) gap = std::max(gap, t[i] - t[i - 1]);
    EXPECT_LE(gap, kPi / 2 + 1e-4) << y.describe();
  }
}

TEST(JohnEllipse, DeterminantHistoryNonDecreasing) {
  for (const Norm2& y : {fixtures::hexagon(), fixtures::random_16gon(), fixtures::l3()}) {
    const JohnEllipse je = john_ellipse(y);
    ASSERT_GE(je.det_history.size(), 2u);
    for (std::size_t i = 1; i < je.det_history.size(); ++i)
      EXPECT_GE(je.det_history[i], je.det_history[i - 1] * (1.0 - 1e-12)) << y.describe() << " step " << i;
  }
}

TEST(JohnEllipse, ScaleEquivariance) {
  for (const Norm2& y : {fixtures::hexagon(), fixtures::random_16gon()}) {
    const JohnEllipse base = john_ellipse(y);
    for (double s : {2.0, 0.5}) {
      const JohnEllipse je = john_ellipse(scaled_polygon(y, s));
      EXPECT_NEAR((je.a - base.a * s).max_abs(), 0.0, 1e-8) << y.describe() << " s " << s;
    }
  }
  const Norm2 e = fixtures::random_ellipse(4);
  const JohnEllipse base = john_ellipse(e);
  for (double s : {2.0, 0.5}) {
    const JohnEllipse je = john_ellipse(Norm2::ellipse(e.as_ellipse()->m * (1.0 / (s * s))));
    EXPECT_NEAR((je.a - base.a * s).max_abs(), 0.0, 1e-8);
  }
}

TEST(JohnEllipse, EllipseCodomainReturnsItsOwnShape) {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const Norm2 y = fixtures::random_ellipse(seed);
    const JohnEllipse je = john_ellipse(y);
    // the image boundary lies on the sphere, so both curves coincide
    double h = 0.0;
    for (int i = 0; i < 4096; ++i) {
      const Vec2 p = je.a * unit_direction(kTwoPi * i / 4096.0);
      h = std::max(h, std::abs(y(p) - 1.0) * euclidean(p));
    }
    EXPECT_LE(h, 1e-7);
    const Mat2 aat = je.a * je.a.transpose();
    EXPECT_NEAR((aat - y.as_ellipse()->m.inverse()).max_abs(), 0.0, 1e-7);
  }
}

TEST(Case1, EuclideanIntoSquare) {
  const Case1Result r = case1_operator(Norm2::euclidean(), Norm2::lp_infinity());
  EXPECT_NEAR((r.t.matrix - Mat2::identity()).max_abs(), 0.0, 1e-7);
  EXPECT_NEAR(oracle::operator_norm(r.t.matrix, Norm2::euclidean(), Norm2::lp_infinity()), 1.0, 1e-7);
  EXPECT_NEAR(r.separation, 1.0, 1e-7);
  EXPECT_NEAR(oracle::face_union_distance(Norm2::lp_infinity(), r.y2, r.y1_star), 1.0, 1e-6);
  // the two contacts are the axis points
  EXPECT_NEAR(std::abs(cross(r.y1, r.y2)), 1.0, 1e-7);
}

TEST(Case1, EllipseIntoDisk) {
  const Norm2 x = Norm2::ellipse(Mat2::diagonal(4, 1));
  const Case1Result r = case1_operator(x, Norm2::euclidean());
  EXPECT_NEAR((r.t.matrix - Mat2::diagonal(2, 1)).max_abs(), 0.0, 1e-7);
  EXPECT_NEAR(oracle::operator_norm(r.t.matrix, x, Norm2::euclidean()), 1.0, 1e-9);
  // T maps B_X onto the disk
  for (double th = 0.0; th < 6.3; th += 0.1) EXPECT_NEAR(euclidean(r.t.matrix * oracle::unit(x, th)), 1.0, 1e-7);
}

TEST(Case1, EuclideanIntoHexagon) {
  const Norm2 h = fixtures::hexagon();
  const Case1Result r = case1_operator(Norm2::euclidean(), h);
  EXPECT_NEAR(oracle::operator_norm(r.t.matrix, Norm2::euclidean(), h), 1.0, 1e-7);
  EXPECT_GT(r.separation, 1e-3);
  EXPECT_NEAR(r.separation, oracle::face_union_distance(h, r.y2, r.y1_star), 1e-4);
  EXPECT_NEAR(h(r.t.matrix * r.x0), 1.0, 1e-7);
  EXPECT_NEAR(euclidean(r.t.matrix * r.x0 - r.y2), 0.0, 1e-7);
  // adjacent edge midpoints: 60 degrees apart
  const double ang = std::acos(dot(r.y1, r.y2) / (euclidean(r.y1) * euclidean(r.y2)));
  EXPECT_NEAR(std::min(ang, kPi - ang), kPi / 3, 1e-5);
}

TEST(Case1, RandomEllipseDomains) {
  for (std::uint64_t seed : {5u, 6u, 7u}) {
    const Norm2 x = fixtures::random_ellipse(seed);
    for (const Norm2& y : {fixtures::random_16gon(), fixtures::l3(), fixtures::l1()}) {
      const Case1Result r = case1_operator(x, y);
      EXPECT_NEAR(oracle::operator_norm(r.t.matrix, x, y, 200000), 1.0, 1e-8) << y.describe();
      EXPECT_NEAR(x(r.x0), 1.0, 1e-9);
      EXPECT_NEAR(y(r.y1), 1.0, 1e-9);
      EXPECT_NEAR(y(r.y2), 1.0, 1e-9);
      EXPECT_GT(r.separation, 0.0);
      EXPECT_NEAR(r.y1_star(r.y1), 1.0, 1e-9);
      EXPECT_NEAR(oracle::dual_value(y, r.y1_star, 20000), 1.0, 1e-9);
    }
  }
}

TEST(Case1, RejectsNonHilbertDomain) {
  EXPECT_THROW(case1_operator(fixtures::hexagon(), Norm2::euclidean()), ValidationError);
}
