#include <gtest/gtest.h>

#include <numbers>

#include <lpgeom/steiner.hpp>

using namespace lpgeom;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector x(static_cast<int>(v.size()));
  int i = 0;
  for (double a : v) x[i++] = a;
  return x;
}

// largest distance from a reflected vertex to the nearest vertex
double reflection_defect(const ConvexBody& K, const Vector& u) {
  const Matrix& V = K.hull().vertices;
  const Matrix R = Matrix::Identity(u.size(), u.size()) - 2.0 * u * u.transpose();
  double worst = 0.0;
  for (int i = 0; i < V.cols(); ++i) {
    const Vector r = R * V.col(i);
    double best = std::numeric_limits<double>::infinity();
    for (int j = 0; j < V.cols(); ++j) best = std::min(best, (V.col(j) - r).norm());
    worst = std::max(worst, best);
  }
  return worst;
}

ConvexBody regular_polygon(int m, double phase = 0.0) {
  Matrix v(2, m);
  for (int i = 0; i < m; ++i) {
    const double t = phase + 2.0 * std::numbers::pi * i / m;
    v.col(i) << std::cos(t), std::sin(t);
  }
  return ConvexBody::vpolytope(v);
}

}  // namespace

TEST(Symmetral, AlreadySymmetricBodyIsUnchanged) {
  Matrix v(2, 5);
  v << -1.0, 1.0, 1.5, 0.0, -1.5,
       -1.0, -1.0, 0.4, 2.0, 0.4;
  const ConvexBody K = ConvexBody::vpolytope(v);  // symmetric about the y axis
  const SymmetralResult r = steiner_symmetral(K, vec({1.0, 0.0}));
  EXPECT_TRUE(r.exact);
  EXPECT_LT(hausdorff_distance(r.body, K), 1e-12);
}

TEST(Symmetral, SquareAlongDiagonal) {
  const Vector u = vec({1.0, 1.0}).normalized();
  const SymmetralResult r = steiner_symmetral(ConvexBody::cube(2), u);
  EXPECT_LE(r.volume_defect(), 1e-12);
  EXPECT_LE(reflection_defect(r.body, u), 1e-10);
}

TEST(Symmetral, RandomPolygonsPreserveAreaAndGainSymmetry) {
  std::mt19937_64 rng(1);
  for (int t = 0; t < 30; ++t) {
    const ConvexBody K = random_polygon(rng, 4 + t % 8);
    const Vector u = random_direction(rng, 2);
    const SymmetralResult r = steiner_symmetral(K, u);
    EXPECT_LE(r.volume_defect(), 1e-12);
    EXPECT_LE(reflection_defect(r.body, u), 1e-10);
  }
}

TEST(Symmetral, ExactIn3D) {
  std::mt19937_64 rng(2);
  for (int t = 0; t < 5; ++t) {
    const ConvexBody K = t == 0 ? to_vpolytope(ConvexBody::cube(3)) : random_polytope(rng, 3, 10);
    const Vector u = random_direction(rng, 3);
    const SymmetralResult r = steiner_symmetral(K, u, SteinerMode::Exact);
    EXPECT_TRUE(r.exact);
    EXPECT_LE(r.volume_defect(), 1e-12);
    EXPECT_LE(reflection_defect(r.body, u), 1e-10);
  }
}

TEST(Symmetral, HigherDimensionIsApproximateOrRefused) {
  const Vector u = Vector::Unit(4, 0);
  EXPECT_THROW(steiner_symmetral(ConvexBody::cube(4), u, SteinerMode::Exact), CapabilityError);
  const SymmetralResult r = steiner_symmetral(ConvexBody::simplex(4), vec({0.5, 0.5, 0.5, 0.5}));
  EXPECT_FALSE(r.exact);
  // inner approximation
  EXPECT_LE(r.volume_after, r.volume_before * (1.0 + 1e-12));
  EXPECT_GT(r.volume_after, 0.5 * r.volume_before);
  EXPECT_THROW(steiner_symmetral(ConvexBody::ball(2), vec({1.0, 0.0})), CapabilityError);
}

TEST(Symmetral, OneDimensionalCentres) {
  const ConvexBody K = translate(ConvexBody::cube(1, 2.0), vec({0.7}));
  const SymmetralResult r = steiner_symmetral_1d(K);
  EXPECT_NEAR(support_infty(r.body, vec({1.0})), 2.0, 1e-15);
  EXPECT_NEAR(support_infty(r.body, vec({-1.0})), 2.0, 1e-15);
}

TEST(Driver, TriangleApproachesTheDisc) {
  const SteinerSequence seq = steiner_to_ball(ConvexBody::simplex(2), 60, 1);
  ASSERT_EQ(seq.hausdorff.size(), 60u);
  EXPECT_LT(seq.hausdorff.back(), 0.02);
  EXPECT_NEAR(seq.radius, std::sqrt(0.5 / std::numbers::pi), 1e-15);
  for (const ConvexBody& B : seq.bodies) EXPECT_NEAR(B.volume(), 0.5, 1e-10);
}

TEST(Driver, ReproducibleAndBounded) {
  const SteinerSequence a = steiner_to_ball(ConvexBody::cube(2), 10, 5), b = steiner_to_ball(ConvexBody::cube(2), 10, 5);
  EXPECT_EQ(a.hausdorff, b.hausdorff);
  EXPECT_THROW(steiner_to_ball(ConvexBody::cube(4), 1, 1), CapabilityError);
  const SteinerSequence c = steiner_to_ball(ConvexBody::cube(3), 8, 3);
  EXPECT_LT(c.hausdorff.back(), c.hausdorff.front());
  for (int k : c.vertex_counts) EXPECT_LE(k, 256);
}

TEST(Monotonicity, RandomSymmetricPolygons) {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 8; ++t) {
    const ConvexBody K = random_symmetric_polygon(rng);
    const Vector u = random_direction(rng, 2);
    for (double p : {1.0, 5.0}) {
      const MonotonicityCheck c = polar_volume_monotonicity_check(K, PExponent::finite(p), u);
      EXPECT_TRUE(c.holds);
      EXPECT_LE(c.volume_defect, 1e-10);
    }
  }
}

TEST(Monotonicity, EqualityForSymmetricDirection) {
  // a regular polygon is already symmetric about its axes
  const ConvexBody K = regular_polygon(16);
  const MonotonicityCheck c = polar_volume_monotonicity_check(K, PExponent::finite(1.0), vec({0.0, 1.0}));
  EXPECT_TRUE(c.holds);
  EXPECT_NEAR(c.after, c.before, 3.0 * c.error + 1e-12);
}

TEST(Monotonicity, StrictIncreaseForElongatedBody) {
  Matrix v(2, 4);
  v << 3.0, -3.0, -3.0, 3.0,
       0.3, 0.3, -0.3, -0.3;
  const double a = 0.5;
  Matrix R(2, 2);
  R << std::cos(a), -std::sin(a),
       std::sin(a), std::cos(a);
  const ConvexBody K = ConvexBody::vpolytope(Matrix(R * v));
  const MonotonicityCheck c = polar_volume_monotonicity_check(K, PExponent::finite(1.0), vec({0.0, 1.0}));
  EXPECT_GT(c.after, c.before + 3.0 * c.error);
  EXPECT_THROW(polar_volume_monotonicity_check(ConvexBody::simplex(2), PExponent::finite(1.0), vec({0.0, 1.0})),
               InvalidArgument);
}

TEST(ThreeParameter, DiagonalCaseAndRandomTrials) {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> nd;
  std::uniform_real_distribution<double> pos(0.1, 3.0);
  for (int t = 0; t < 20; ++t) {
    const ConvexBody K = random_polygon(rng, 5 + t % 5);
    const ConvexBody S = steiner_symmetral(K, vec({0.0, 1.0})).body;
    const double xi = nd(rng);
    EXPECT_TRUE(three_param_inequality_check(K, S, PExponent::finite(1.0), vec({xi}), vec({xi}), 0.0, 1.0, 1.0).holds);
    for (int k = 0; k < 25; ++k) {
      const PExponent p = PExponent::finite(std::exp(nd(rng)));
      const ThreeParamCheck c =
          three_param_inequality_check(K, S, p, vec({nd(rng)}), vec({nd(rng)}), nd(rng), pos(rng), pos(rng));
      EXPECT_TRUE(c.holds) << c.lhs << " " << c.rhs;
    }
  }
}

TEST(ThreeParameter, ClassicalSupports) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> nd;
  const ConvexBody K = random_polytope(rng, 3, 9);
  for (int k = 0; k < 50; ++k) {
    const ThreeParamCheck c = three_param_inequality_check(K, PExponent::infinity(), vec({nd(rng), nd(rng)}),
                                                           vec({nd(rng), nd(rng)}), nd(rng), 1.0, 1.0);
    EXPECT_TRUE(c.holds);
  }
}

TEST(SliceInclusion, AveragedSlicesLieInThePolarOfTheSymmetral) {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> ud(0.0, 1.0);
  const Vector u = vec({0.0, 1.0});
  for (int t = 0; t < 3; ++t) {
    const ConvexBody K = random_symmetric_polygon(rng);
    const ConvexBody S = steiner_symmetral(K, u).body;
    for (double p : {1.0, 4.0}) {
      int checked = 0;
      while (checked < 15) {
        Vector d1 = random_direction(rng, 2), d2 = random_direction(rng, 2);
        if (d1[1] < 0.0) d1[1] = -d1[1];
        if (d2[1] > 0.0) d2[1] = -d2[1];
        const double r1 = 1.0 / polar_norm(K, p, d1), r2 = 1.0 / polar_norm(K, p, d2);
        const double h = ud(rng) * r1 * d1[1];
        const double mu = h / (r2 * -d2[1]);
        if (mu > 1.0) continue;
        const double xi = (h / (r1 * d1[1])) * r1 * d1[0], xi2 = mu * r2 * d2[0];
        EXPECT_LE(polar_norm(S, p, vec({0.5 * (xi + xi2), h})), 1.0 + 1e-8);
        ++checked;
      }
    }
  }
}

TEST(HarmonicBrunnMinkowski, ExponentialIsTheEqualityCase) {
  const LogFunction f = [](double r) { return -r; };
  for (double q : {1.0, 2.0, 3.5}) {
    const HarmonicBmCheck c = ball_harmonic_bm_check(f, f, q);
    EXPECT_TRUE(c.holds);
    EXPECT_NEAR(c.lhs / c.rhs, 1.0, 1e-8);
  }
}

TEST(HarmonicBrunnMinkowski, RandomLogConcaveGrids) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> slope(0.2, 3.0), curve(0.0, 1.0);
  for (int t = 0; t < 5; ++t) {
    std::vector<double> x, yf, yg;
    const double a = slope(rng), b = curve(rng), c = slope(rng), d = curve(rng);
    for (int i = 0; i <= 400; ++i) {
      const double r = 40.0 * i / 400.0;
      x.push_back(r);
      yf.push_back(-a * r - b * r * r);
      yg.push_back(-c * r - d * r * r);
    }
    const TabulatedLogFunction F(x, yf), G(x, yg);
    for (double q : {1.0, 2.0}) EXPECT_TRUE(ball_harmonic_bm_check(F, G, q).holds);
  }
}

TEST(HarmonicBrunnMinkowski, SinhcIsLogConvexInScale) {
  for (double x : {0.01, 0.5, 3.0, 20.0}) EXPECT_GE(sinhc_min_second_difference(x, 0.01, 10.0, 400), -1e-12) << x;
}
