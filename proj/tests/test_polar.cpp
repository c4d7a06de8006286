#include <gtest/gtest.h>

#include <numbers>

#include <lpgeom/oracle.hpp>
#include <lpgeom/polar.hpp>
#include <lpgeom/sampling.hpp>

using namespace lpgeom;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector x(static_cast<int>(v.size()));
  int i = 0;
  for (double a : v) x[i++] = a;
  return x;
}

}  // namespace

TEST(Polar, NormAtInfinityIsSupport) {
  std::mt19937_64 rng(3);
  const ConvexBody K = random_polygon(rng, 8);
  for (const Vector& u : circle_directions(50))
    EXPECT_NEAR(polar_norm(K, PExponent::infinity(), u), std::max(0.0, support_infty(K, u)), 1e-15);
}

TEST(Polar, NormIsHomogeneousAndMonotone) {
  std::mt19937_64 rng(4);
  const ConvexBody K = random_polygon(rng, 7);
  for (const Vector& u : circle_directions(24)) {
    const double a = polar_norm(K, 1.0, u);
    EXPECT_NEAR(polar_norm(K, 1.0, Vector(2.5 * u)), 2.5 * a, 1e-12 * a);
    double prev = 0.0;
    for (double p : {0.25, 1.0, 4.0}) {
      const double v = polar_norm(K, p, u);
      EXPECT_GE(v, prev * (1.0 - 1e-12));
      prev = v;
    }
    EXPECT_GE(polar_norm(K, PExponent::infinity(), u), prev * (1.0 - 1e-12));
  }
}

TEST(Polar, BoundaryPointsSolveTheDefiningEquation) {
  std::mt19937_64 rng(5);
  const ConvexBody K = random_polytope(rng, 3, 10);
  std::vector<Vector> dirs;
  for (int i = 0; i < 20; ++i) dirs.push_back(random_direction(rng, 3));
  for (double p : {0.5, 3.0})
    for (const BoundaryPoint& b : polar_boundary_sample(K, PExponent::finite(p), dirs)) {
      ASSERT_TRUE(b.bounded);
      // radial integral of e^{-h} along the ray matches that of e^{-||.||}
      EXPECT_GT(b.radius, 0.0);
      EXPECT_NEAR(polar_norm(K, p, b.point), 1.0, 1e-12);
    }
}

TEST(Polar, ZeroExponentIsAHalfSpace) {
  const ConvexBody S = ConvexBody::simplex(2);
  // ||y|| = <y, b> with b = (1/3, 1/3): boundary is the line x + y = 3
  for (const BoundaryPoint& b : polar_boundary_sample(S, PExponent::zero(), circle_directions(16))) {
    if (b.bounded)
      EXPECT_NEAR(b.point.sum(), 3.0, 1e-12);
    else
      EXPECT_LE(b.direction.sum(), 1e-12);
  }
  EXPECT_TRUE(std::isinf(polar_volume(S, PExponent::zero()).value));
}

TEST(Polar, ClosedFormVolumes) {
  // classical polars
  EXPECT_NEAR(polar_volume(ConvexBody::cube(3), PExponent::infinity()).value, 8.0 / 6.0, 1e-10);
  EXPECT_NEAR(polar_volume(ConvexBody::ball(2), PExponent::infinity()).value, std::numbers::pi, 1e-10);
  // int e^{-log(sinh y / y)} = int y / sinh y = pi^2 / 2
  const EvalReport c1 = polar_volume(ConvexBody::cube(1), 1.0);
  EXPECT_NEAR(c1.value, std::numbers::pi * std::numbers::pi / 2.0, 1e-10);
  const EvalReport c2 = polar_volume(ConvexBody::cube(2), 1.0);
  EXPECT_NEAR(c2.value, std::pow(std::numbers::pi, 4) / 8.0, 1e-8);
  EXPECT_LE(c2.error, 1e-6 * c2.value);
}

TEST(Polar, VolumeDecreasesInP) {
  std::mt19937_64 rng(6);
  const ConvexBody K = random_polygon(rng, 6);
  double prev = std::numeric_limits<double>::infinity();
  for (double p : {0.5, 1.0, 2.0, 8.0}) {
    const EvalReport r = polar_volume(K, p);
    EXPECT_LT(r.value, prev);
    prev = r.value;
  }
  EXPECT_GT(prev, polar_volume(K, PExponent::infinity()).value);
}

TEST(Polar, AgreesWithMonteCarlo) {
  std::mt19937_64 rng(7);
  for (int n = 2; n <= 3; ++n) {
    const ConvexBody K = random_polytope(rng, n, 9);
    for (double p : {1.0, 4.0}) {
      const EvalReport q = polar_volume(K, p);
      const McEstimate mc = mc_polar_volume(K, PExponent::finite(p), 200000, 42 + n);
      EXPECT_NEAR(q.value, mc.value, 3.0 * mc.sigma + 3.0 * q.error) << n << " " << p;
    }
  }
}

TEST(Polar, ClassicalPolarPolytope) {
  const ConvexBody P = classical_polar_polytope(ConvexBody::cube(3));
  EXPECT_NEAR(P.volume(), ConvexBody::cross_polytope(3).volume(), 1e-12);
  std::mt19937_64 rng(8);
  const ConvexBody K = random_polygon(rng, 9);
  const double exact = classical_polar_polytope(K).volume();
  EXPECT_NEAR(polar_volume(K, PExponent::infinity()).value, exact, 1e-12 * exact);
  // wrapped in an affine map the same body goes through the radial quadrature
  const EvalReport q = polar_volume(translate(K, Vector::Zero(2)), PExponent::infinity());
  EXPECT_EQ(q.method, Method::Quadrature);
  EXPECT_NEAR(q.value, exact, 1e-9 * exact);
  EXPECT_THROW(classical_polar_polytope(ConvexBody::ball(2)), CapabilityError);
}

TEST(Polar, UnboundedWhenOriginOutside) {
  const ConvexBody K = translate(ConvexBody::cube(2), vec({2.0, 0.0}));
  EXPECT_TRUE(std::isinf(polar_volume(K, 1.0).value));
  EXPECT_EQ(polar_norm(K, 1.0, vec({1.0, 0.0})), 0.0);
}
