#pragma once

#include <random>
#include <vector>

#include "simplex_integrals.hpp"

namespace lpgeom {

// L^p support function h_{p,K}(y) = (1/p) log( int_K e^{p<x,y>} dx / |K| ).
// p = inf gives the classical support function, p = 0 its limit <y, b(K)>.
inline double hp(const ConvexBody& K, PExponent p, const Vector& y) {
  check_dim(K, y);
  if (p.is_infinite()) return support_infty(K, y);
  if (p.is_zero()) return y.dot(K.barycenter());
  const double q = p.value();
  return (log_exp_integral_body(K, q * y) - std::log(K.volume())) / q;
}

inline double hp(const ConvexBody& K, double p, const Vector& y) { return hp(K, PExponent::finite(p), y); }

// Tilted barycenter.
inline Vector hp_gradient(const ConvexBody& K, double p, const Vector& y) {
  check_dim(K, y);
  if (!(p > 0.0)) throw InvalidArgument("gradient needs a finite positive p");
  return tilted_moments(K, p * y, 1).mean;
}

// p times the tilted covariance.
inline Matrix hp_hessian(const ConvexBody& K, double p, const Vector& y) {
  check_dim(K, y);
  if (!(p > 0.0)) throw InvalidArgument("Hessian needs a finite positive p");
  return p * tilted_moments(K, p * y, 2).cov;
}

// (1/p) sum_i log(sinh(p y_i)/(p y_i)), the support of [-1,1]^n.
inline double hp_cube_closed_form(const Vector& y, double p) {
  double s = 0.0;
  for (int i = 0; i < y.size(); ++i) s += detail::log_sinhc(p * y[i]);
  return s / p;
}

// Three-term sinh formula for the octahedron at pairwise distinct |x|,|y|,|z|.
inline double hp_cross_polytope3_closed_form(double x, double y, double z, double p) {
  const double s = x * std::sinh(p * x) / ((x * x - y * y) * (x * x - z * z)) +
                   y * std::sinh(p * y) / ((y * y - x * x) * (y * y - z * z)) +
                   z * std::sinh(p * z) / ((z * z - x * x) * (z * z - y * y));
  return std::log(6.0 / (p * p * p) * s) / p;
}

// Support of the standard triangle at x != y, both nonzero:
// (1/p) log( ((e^{px}-1)/(px) - (e^{py}-1)/(py)) / (p(x-y)/2) ).
inline double hp_simplex2_closed_form(double x, double y, double p) {
  const double a = std::expm1(p * x) / (p * x), b = std::expm1(p * y) / (p * y);
  return std::log((a - b) / (0.5 * p * (x - y))) / p;
}

// Finitely supported probability measure.
class DiscreteMeasure {
 public:
  DiscreteMeasure(Matrix atoms, Vector weights) : atoms_(std::move(atoms)), weights_(std::move(weights)) {
    if (atoms_.cols() != weights_.size() || atoms_.cols() == 0) throw InvalidArgument("atoms and weights differ in count");
    if ((weights_.array() <= 0.0).any()) throw InvalidArgument("weights must be positive");
    if (std::abs(weights_.sum() - 1.0) > 1e-12) throw InvalidArgument("weights must sum to 1");
    std::vector<int> all(atoms_.cols());
    for (int i = 0; i < atoms_.cols(); ++i) all[i] = i;
    if (detail::affine_rank(atoms_, all, 1e-10) < atoms_.rows())
      throw DegenerateBody("atoms do not span the ambient space affinely");
  }

  // Uniform weights on the vertices 0, e_1, ..., e_n of the standard simplex.
  static DiscreteMeasure simplex_vertices(int n) {
    Matrix a = Matrix::Zero(n, n + 1);
    for (int i = 0; i < n; ++i) a(i, i + 1) = 1.0;
    return DiscreteMeasure(a, Vector::Constant(n + 1, 1.0 / (n + 1)));
  }

  int dim() const { return static_cast<int>(atoms_.rows()); }
  const Matrix& atoms() const { return atoms_; }
  const Vector& weights() const { return weights_; }
  ConvexBody hull() const { return ConvexBody::vpolytope(atoms_); }

 private:
  Matrix atoms_;
  Vector weights_;
};

struct MeasureTilt {
  double value;  // h_{p,mu}(y)
  Vector gradient;
  Matrix hessian;
};

inline MeasureTilt hp_measure_full(const DiscreteMeasure& mu, double p, const Vector& y) {
  if (y.size() != mu.dim()) throw InvalidArgument("point dimension does not match the measure");
  if (!(p > 0.0)) throw InvalidArgument("measure support needs a finite positive p");
  const Matrix& X = mu.atoms();
  const int m = static_cast<int>(X.cols());
  Vector e = p * (X.transpose() * y);
  const double mx = e.maxCoeff();
  Vector w(m);
  for (int i = 0; i < m; ++i) w[i] = mu.weights()[i] * std::exp(e[i] - mx);
  const double z = w.sum();
  w /= z;
  MeasureTilt out;
  out.value = (mx + std::log(z)) / p;
  out.gradient = X * w;
  Matrix C = Matrix::Zero(mu.dim(), mu.dim());
  for (int i = 0; i < m; ++i) {
    Vector d = X.col(i) - out.gradient;
    C += w[i] * d * d.transpose();
  }
  out.hessian = p * C;
  return out;
}

inline double hp_measure(const DiscreteMeasure& mu, double p, const Vector& y) { return hp_measure_full(mu, p, y).value; }
inline Vector hp_measure_gradient(const DiscreteMeasure& mu, double p, const Vector& y) {
  return hp_measure_full(mu, p, y).gradient;
}
inline Matrix hp_measure_hessian(const DiscreteMeasure& mu, double p, const Vector& y) {
  return hp_measure_full(mu, p, y).hessian;
}

// Sampling used by the property checks: uniform direction, log-uniform radius
// in [1e-2, 1e2].
inline Vector sample_point(std::mt19937_64& rng, int n, double rmin = 1e-2, double rmax = 1e2) {
  std::normal_distribution<double> nd;
  std::uniform_real_distribution<double> ud(std::log(rmin), std::log(rmax));
  Vector u(n);
  for (int i = 0; i < n; ++i) u[i] = nd(rng);
  return u.normalized() * std::exp(ud(rng));
}

struct IdentityReport {
  int samples = 0;
  // largest of |lhs - rhs| / (1 + |rhs|); monotonicity records positive excess only
  double scaling = 0.0;
  double translation = 0.0;
  double linear_image = 0.0;
  double product = 0.0;
  double monotonicity = 0.0;
  double max_violation() const { return std::max({scaling, translation, linear_image, product, monotonicity}); }
};

// Structural identities of h_{p,K}: scaling in p, translation, linear images,
// products and monotonicity in p, each at sampled points.
inline IdentityReport verify_basic_identities(const ConvexBody& K, const ConvexBody& L, double p, double q,
                                              const Matrix& A, const Vector& a, int samples, std::uint64_t seed) {
  if (!(0.0 < p && p < q)) throw InvalidArgument("need 0 < p < q");
  const int n = K.dim(), m = L.dim();
  const ConvexBody Kt = translate(K, a);
  const ConvexBody AK = linear_image(K, A);
  const ConvexBody KL = product(K, L);
  std::mt19937_64 rng(seed);
  IdentityReport r;
  r.samples = samples;
  auto rel = [](double lhs, double rhs) { return std::abs(lhs - rhs) / (1.0 + std::abs(rhs)); };
  for (int s = 0; s < samples; ++s) {
    const Vector y = sample_point(rng, n);
    const Vector z = sample_point(rng, m);
    const double hpK = hp(K, p, y);
    r.scaling = std::max(r.scaling, rel(hpK, hp(K, 1.0, p * y) / p));
    r.translation = std::max(r.translation, rel(hp(Kt, p, y), hpK - a.dot(y)));
    r.linear_image = std::max(r.linear_image, rel(hp(AK, p, y), hp(K, p, Vector(A.transpose() * y))));
    Vector yz(n + m);
    yz << y, z;
    r.product = std::max(r.product, rel(hp(KL, p, yz), hpK + hp(L, p, z)));
    const double hq = hp(K, q, y), hinf = support_infty(K, y);
    const double scale = 1.0 + std::abs(hinf);
    r.monotonicity = std::max({r.monotonicity, (hpK - hq) / scale, (hq - hinf) / scale});
  }
  return r;
}

// h_K(y) <= h_{p,K}(y/lambda) - (n/p) log(1 - lambda) for bodies centred at
// their barycenter.
inline bool reverse_bound_check(const ConvexBody& K, double p, double lambda, const Vector& y) {
  if (K.barycenter().norm() > 1e-9) throw InvalidArgument("body must have its barycenter at the origin");
  if (!(lambda > 0.0 && lambda < 1.0)) throw InvalidArgument("lambda must lie in (0,1)");
  const double lhs = support_infty(K, y);
  const double rhs = hp(K, p, Vector(y / lambda)) - K.dim() / p * std::log1p(-lambda);
  return lhs <= rhs + 1e-10 * (1.0 + std::abs(rhs));
}

}  // namespace lpgeom
