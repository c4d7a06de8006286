#include <gtest/gtest.h>

#include <lpgeom/isotropic.hpp>

using namespace lpgeom;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector x(static_cast<int>(v.size()));
  int i = 0;
  for (double a : v) x[i++] = a;
  return x;
}

}  // namespace

TEST(Isotropic, CubeConstant) {
  for (int n = 1; n <= 3; ++n) {
    const IsotropicReport r = isotropic_report(ConvexBody::cube(n));
    EXPECT_LT((r.cov - Matrix::Identity(n, n) / 3.0).norm(), 1e-13);
    EXPECT_NEAR(r.C / std::pow(12.0, n), 1.0, 1e-12);
    EXPECT_NEAR(r.L_K, 1.0 / std::sqrt(12.0), 1e-12);
  }
  // polytope representation of the same cube
  EXPECT_NEAR(isotropic_report(to_vpolytope(ConvexBody::cube(3))).C / 1728.0, 1.0, 1e-12);
}

TEST(Isotropic, AffineInvariance) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> nd;
  for (int n = 2; n <= 3; ++n) {
    const ConvexBody K = random_polytope(rng, n, 10);
    Matrix A(n, n);
    do {
      for (int i = 0; i < A.size(); ++i) A.data()[i] = nd(rng);
    } while (std::abs(A.determinant()) < 0.3);
    Vector b(n);
    for (int i = 0; i < n; ++i) b[i] = nd(rng);
    const double c0 = isotropic_report(K).C;
    EXPECT_NEAR(isotropic_report(ConvexBody::affine(A, b, K)).C / c0, 1.0, 1e-9);
    EXPECT_NEAR(isotropic_report(to_vpolytope(ConvexBody::affine(A, b, K))).C / c0, 1.0, 1e-9);
  }
}

TEST(Isotropic, HessianAtZeroIsCovariance) {
  std::mt19937_64 rng(2);
  for (const ConvexBody& K : {ConvexBody::simplex(3), ConvexBody::cross_polytope(2), random_polytope(rng, 3, 8)}) {
    const Matrix cov = covariance(K);
    EXPECT_LE((hp_hessian(K, 1.0, Vector::Zero(K.dim())) - cov).norm() / cov.norm(), 1e-10);
  }
}

TEST(Isotropic, GradientStaysInside) {
  std::mt19937_64 rng(3);
  const ConvexBody K = random_polytope(rng, 2, 7);
  for (int t = 0; t < 50; ++t) {
    const Vector y = sample_point(rng, 2, 1e-2, 50.0);
    EXPECT_GT(interior_margin(K, hp_gradient(K, 1.0, y)), 0.0);
  }
}

TEST(Isotropic, MongeAmpereMassBelowVolume) {
  for (const ConvexBody& K : {ConvexBody::cube(2), translate(ConvexBody::simplex(2), vec({0.3, 0.3}))}) {
    const EvalReport m = monge_ampere_mass(K);
    EXPECT_GT(m.value, 0.5 * K.volume());
    EXPECT_LE(m.value, K.volume() * (1.0 + 1e-6) + 3.0 * m.error);
  }
}

TEST(Isotropic, NuBarycenterVanishesAtTheSantaloPoint) {
  const ConvexBody S = ConvexBody::simplex(2);
  for (double p : {1.0, 3.0}) {
    const SantaloSolution x = santalo_point(S, PExponent::finite(1.0 / p), 1e-11);
    const NuMoments m = nu_measure_moments(translate(S, x.point), p);
    EXPECT_LE(m.barycenter.norm(), 1e-8);
    EXPECT_TRUE(m.mean_bound_holds);
    EXPECT_LE(m.mean_h1, m.bound);
  }
}

TEST(Isotropic, JensenChain) {
  const JensenCheck c = jensen_chain_check(ConvexBody::simplex(2), 3.0);
  EXPECT_TRUE(c.holds);
  EXPECT_LE(c.u_at_zero, c.u_average + 1e-9);
}

TEST(Isotropic, Fradelizi) {
  const std::vector<std::function<double(const Vector&)>> fs = {
      [](const Vector& x) { return x.squaredNorm(); },
      [](const Vector& x) { return std::abs(x[0]) + 0.5 * x[1] * x[1] + 0.3 * x[0]; },
      [](const Vector& x) { return hp(translate(ConvexBody::simplex(2), Vector::Constant(2, 1.0 / 3.0)), 1.0, x); }};
  for (const auto& f : fs) EXPECT_TRUE(fradelizi_check(f, 2).holds);
}

TEST(SimplexMeasure, DeterminantConstantAndCertificate) {
  for (int n = 2; n <= 3; ++n) {
    const DiscreteMeasure mu = DiscreteMeasure::simplex_vertices(n);
    const IsotropicReport r = isotropic_report(mu);
    EXPECT_NEAR(r.cov.determinant(), std::pow(n + 1.0, -(n + 1.0)), 1e-12);
    const double C = std::pow(n + 1.0, n + 1.0) / std::pow(factorial(n), 2);
    EXPECT_NEAR(r.C, C, 1e-10 * C);
    const ConvexityProbe probe(mu);
    const ConvexityCertificate ok = probe.certificate(n + 1.0), bad = probe.certificate(n - 0.5);
    EXPECT_TRUE(ok.pass);
    EXPECT_GE(ok.min_eigenvalue, -1e-6);
    EXPECT_FALSE(bad.pass);
    const auto smallest = probe.smallest_certified_B(2.0 * (n + 1));
    ASSERT_TRUE(smallest.has_value());
    EXPECT_LE(*smallest, n + 1.0 + 1e-3);
    EXPECT_GT(*smallest, n - 0.5);
  }
}

TEST(SlicingBounds, CubeAndTriangle) {
  const SlicingBounds c = conditional_slicing_bounds(ConvexBody::cube(2), 3.0);
  EXPECT_TRUE(c.all_hold());
  ASSERT_TRUE(c.bound_iii.has_value());
  EXPECT_GT(c.universal_margin(), 1.0);
  const SlicingBounds t = conditional_slicing_bounds(ConvexBody::simplex(2), 3.0);
  EXPECT_TRUE(t.all_hold());
  EXPECT_FALSE(t.bound_iii.has_value());
}
