#pragma once

#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "mahler.hpp"
#include "support.hpp"

namespace lpgeom {

inline Matrix covariance(const ConvexBody& K) { return tilted_moments(K, Vector::Zero(K.dim()), 2).cov; }

inline Matrix covariance(const DiscreteMeasure& mu) { return hp_measure_hessian(mu, 1.0, Vector::Zero(mu.dim())); }

struct IsotropicReport {
  std::string id;
  Matrix cov;
  double C = 0.0;    // |K|^2 / det Cov
  double L_K = 0.0;  // C^{-1/(2n)}
};

inline IsotropicReport isotropic_report(const ConvexBody& K, std::string id = {}) {
  IsotropicReport r;
  r.id = std::move(id);
  r.cov = covariance(K);
  const double det = r.cov.determinant();
  if (!(det > 0.0)) throw DegenerateBody("covariance is singular");
  const double v = K.volume();
  r.C = v * v / det;
  r.L_K = std::pow(r.C, -1.0 / (2.0 * K.dim()));
  return r;
}

// For a measure the volume is that of the hull of its support.
inline IsotropicReport isotropic_report(const DiscreteMeasure& mu, std::string id = {}) {
  IsotropicReport r;
  r.id = std::move(id);
  r.cov = covariance(mu);
  const double det = r.cov.determinant();
  if (!(det > 0.0)) throw DegenerateBody("covariance is singular");
  const double v = mu.hull().volume();
  r.C = v * v / det;
  r.L_K = std::pow(r.C, -1.0 / (2.0 * mu.dim()));
  return r;
}

// ---------------------------------------------------------------------------
// Convexity of u_B = log det Hess h_1 + B h_1

struct ConvexitySamples {
  std::vector<double> radii{0.1, 0.5, 1.0, 2.0, 5.0};  // divided by p
  double p = 1.0;
  int directions_per_shell = 0;  // 0 means 2n + 2
  bool include_origin = true;
  std::uint64_t seed = 17;
};

struct ConvexityCertificate {
  double B = 0.0;
  std::vector<Vector> samples;
  std::vector<double> min_eigenvalues;  // of the numerical Hessian of u_B, per kept sample
  double min_eigenvalue = std::numeric_limits<double>::infinity();
  int skipped = 0;  // ill-conditioned Hess h_1
  bool pass = false;
};

// h_1 and its Hessian at a point.
using SupportHessianFn = std::function<std::pair<double, Matrix>(const Vector&)>;

inline SupportHessianFn support_hessian_fn(const ConvexBody& K) {
  return [K](const Vector& y) {
    const TiltedMoments t = tilted_moments(K, y, 2);
    return std::make_pair(t.log_integral - std::log(K.volume()), Matrix(t.cov));
  };
}

inline SupportHessianFn support_hessian_fn(const DiscreteMeasure& mu) {
  return [mu](const Vector& y) {
    MeasureTilt t = hp_measure_full(mu, 1.0, y);
    return std::make_pair(t.value, std::move(t.hessian));
  };
}

inline std::vector<Vector> convexity_sample_points(int n, const ConvexitySamples& spec) {
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> nd;
  const int per = spec.directions_per_shell > 0 ? spec.directions_per_shell : 2 * n + 2;
  std::vector<Vector> pts;
  if (spec.include_origin) pts.push_back(Vector::Zero(n));
  for (double r : spec.radii)
    for (int d = 0; d < per; ++d) {
      Vector u(n);
      for (int i = 0; i < n; ++i) u[i] = nd(rng);
      pts.push_back(r / spec.p * u.normalized());
    }
  return pts;
}

namespace detail {

// Numerical Hessians of log det Hess h and of h at one point, by central
// differences with one Richardson step. Kept apart so that u_B for any B is
// a linear combination.
struct SplitHessian {
  double logdet = 0.0, h = 0.0;
  Matrix H_logdet, H_h;
  bool ill_conditioned = false;
};

inline SplitHessian split_numerical_hessian(const SupportHessianFn& f, const Vector& y) {
  const int n = static_cast<int>(y.size());
  SplitHessian out;
  auto eval = [&](const Vector& z) {
    const auto [h, H] = f(z);
    const Eigen::LDLT<Matrix> ldlt(H);
    double ld = 0.0;
    const Vector d = ldlt.vectorD();
    for (int i = 0; i < n; ++i) ld += std::log(d[i]);
    return std::make_pair(ld, h);
  };
  {
    const auto [h, H] = f(y);
    const Eigen::SelfAdjointEigenSolver<Matrix> es(H);
    const double lo = es.eigenvalues().minCoeff(), hi = es.eigenvalues().maxCoeff();
    out.ill_conditioned = !(lo > 0.0) || hi / lo > 1e12;
    out.h = h;
    if (out.ill_conditioned) return out;
    out.logdet = std::log(H.determinant());
  }
  auto stencil = [&](double d) {
    Matrix A(n, n), B(n, n);
    const auto c = eval(y);
    std::vector<std::pair<double, double>> plus(n), minus(n);
    for (int i = 0; i < n; ++i) {
      Vector e = Vector::Zero(n);
      e[i] = d;
      plus[i] = eval(y + e);
      minus[i] = eval(y - e);
      A(i, i) = (plus[i].first - 2.0 * c.first + minus[i].first) / (d * d);
      B(i, i) = (plus[i].second - 2.0 * c.second + minus[i].second) / (d * d);
    }
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        Vector ei = Vector::Zero(n), ej = Vector::Zero(n);
        ei[i] = d;
        ej[j] = d;
        const auto pp = eval(y + ei + ej), pm = eval(y + ei - ej), mp = eval(y - ei + ej), mm = eval(y - ei - ej);
        A(i, j) = A(j, i) = (pp.first - pm.first - mp.first + mm.first) / (4.0 * d * d);
        B(i, j) = B(j, i) = (pp.second - pm.second - mp.second + mm.second) / (4.0 * d * d);
      }
    return std::make_pair(A, B);
  };
  const double step = 1e-3 * (1.0 + y.norm());
  const auto coarse = stencil(step), fine = stencil(0.5 * step);
  out.H_logdet = (4.0 * fine.first - coarse.first) / 3.0;
  out.H_h = (4.0 * fine.second - coarse.second) / 3.0;
  return out;
}

inline double min_eig(const Matrix& H) { return Eigen::SelfAdjointEigenSolver<Matrix>(H, Eigen::EigenvaluesOnly).eigenvalues().minCoeff(); }

inline double convexity_tolerance(const SplitHessian& s, double B) { return 1e-6 * (1.0 + std::abs(s.logdet + B * s.h)); }

inline ConvexityCertificate certify(const std::vector<Vector>& pts, const std::vector<SplitHessian>& hs, double B) {
  ConvexityCertificate c;
  c.B = B;
  c.pass = true;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (hs[i].ill_conditioned) {
      ++c.skipped;
      continue;
    }
    const double e = min_eig(hs[i].H_logdet + B * hs[i].H_h);
    c.samples.push_back(pts[i]);
    c.min_eigenvalues.push_back(e);
    c.min_eigenvalue = std::min(c.min_eigenvalue, e);
    if (e < -convexity_tolerance(hs[i], B)) c.pass = false;
  }
  if (c.samples.empty()) c.pass = false;
  return c;
}

}  // namespace detail

// Precomputed split Hessians on a sample grid; certificates for any B follow
// without new evaluations.
class ConvexityProbe {
 public:
  ConvexityProbe(const SupportHessianFn& f, int n, const ConvexitySamples& spec = {})
      : pts_(convexity_sample_points(n, spec)) {
    for (const auto& y : pts_) hs_.push_back(detail::split_numerical_hessian(f, y));
  }
  ConvexityProbe(const ConvexBody& K, const ConvexitySamples& spec = {}) : ConvexityProbe(support_hessian_fn(K), K.dim(), spec) {}
  ConvexityProbe(const DiscreteMeasure& mu, const ConvexitySamples& spec = {})
      : ConvexityProbe(support_hessian_fn(mu), mu.dim(), spec) {}

  ConvexityCertificate certificate(double B) const {
    if (!(B >= 0.0)) throw InvalidArgument("B must be nonnegative");
    return detail::certify(pts_, hs_, B);
  }

  // Smallest B in [0, B_max] passing on this grid, by bisection; passing is
  // monotone in B since h_1 is convex.
  std::optional<double> smallest_certified_B(double B_max, double tol = 1e-4) const {
    if (!certificate(B_max).pass) return std::nullopt;
    if (certificate(0.0).pass) return 0.0;
    double lo = 0.0, hi = B_max;
    while (hi - lo > tol) {
      const double mid = 0.5 * (lo + hi);
      (certificate(mid).pass ? hi : lo) = mid;
    }
    return hi;
  }

 private:
  std::vector<Vector> pts_;
  std::vector<detail::SplitHessian> hs_;
};

inline ConvexityCertificate convexity_check(const ConvexBody& K, double B, const ConvexitySamples& spec = {}) {
  return ConvexityProbe(K, spec).certificate(B);
}

inline ConvexityCertificate convexity_check(const DiscreteMeasure& mu, double B, const ConvexitySamples& spec = {}) {
  return ConvexityProbe(mu, spec).certificate(B);
}

// ---------------------------------------------------------------------------
// Spherical-radial integration against log-concave densities on R^n

namespace detail {

struct DensitySweep {
  bool bounded = true;
  double log_mass = 0.0;
  double rel_error = 0.0;
  Vector mean;
  Matrix second;
  double extra_mean = 0.0;  // int extra * density / int density
};

// make_ray(u) returns {f, scale} with f(r) -> RadialPoint for the ray r u.
template <class MakeRay>
DensitySweep density_sweep(int n, const DirectionPlan& plan, MakeRay&& make_ray, double tol) {
  DensitySweep out;
  struct Totals {
    double mass = 0.0, coarse = 0.0, radial = 0.0, extra = 0.0;
    Vector m1;
    Matrix m2;
  };
  std::vector<Totals> totals;
  std::optional<double> shift;
  for (const auto& rule : plan.rules) {
    Totals t;
    t.m1 = Vector::Zero(n);
    t.m2 = Matrix::Zero(n, n);
    for (std::size_t i = 0; i < rule.dirs.size(); ++i) {
      const Vector& u = rule.dirs[i];
      auto [f, scale] = make_ray(u);
      const RadialMoments m = radial_moments(f, n, scale, tol);
      if (m.divergent) {
        out.bounded = false;
        return out;
      }
      if (!shift) shift = m.log_scale;
      const double s = std::exp(m.log_scale - *shift);
      const double w = rule.weights[i] * s;
      t.mass += w * m.m[0];
      if (!rule.coarse.empty()) t.coarse += rule.coarse[i] * s * m.m[0];
      t.radial += w * m.m[0] * m.rel_error;
      t.extra += w * m.extra;
      t.m1 += w * m.m[1] * u;
      t.m2 += w * m.m[2] * (u * u.transpose());
    }
    totals.push_back(std::move(t));
  }
  Totals agg = totals[0];
  double err = 0.0;
  switch (plan.mode) {
    case DirectionPlan::Mode::Embedded:
      err = std::abs(agg.mass - agg.coarse) + agg.radial;
      break;
    case DirectionPlan::Mode::Pair:
      err = std::abs(agg.mass - totals[1].mass) + agg.radial;
      break;
    case DirectionPlan::Mode::Batches: {
      const double b = static_cast<double>(totals.size());
      agg = Totals{0.0, 0.0, 0.0, 0.0, Vector::Zero(n), Matrix::Zero(n, n)};
      for (const auto& t : totals) {
        agg.mass += t.mass / b;
        agg.radial += t.radial / b;
        agg.extra += t.extra / b;
        agg.m1 += t.m1 / b;
        agg.m2 += t.m2 / b;
      }
      double s2 = 0.0;
      for (const auto& t : totals) s2 += (t.mass - agg.mass) * (t.mass - agg.mass);
      err = std::sqrt(s2 / (b * (b - 1.0))) + agg.radial;
      break;
    }
  }
  out.log_mass = *shift + std::log(agg.mass);
  out.rel_error = err / agg.mass;
  out.mean = agg.m1 / agg.mass;
  out.second = agg.m2 / agg.mass;
  out.extra_mean = agg.extra / agg.mass;
  return out;
}

inline DirectionPlan default_plan(int n, const QuadratureSpec& q) {
  return direction_plan(ConvexBody::cube(n), q);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// nu_{p,K}, proportional to e^{-p h_{1,K}(y)} dy

struct NuMoments {
  double log_normalizer = 0.0;  // log int e^{-p h_1}
  double rel_error = 0.0;
  Vector barycenter;
  Matrix second;       // E[y y^T]
  double mean_h1 = 0.0;  // int h_1 d nu
  double bound = 0.0;    // n / p
  bool mean_bound_holds = false;
};

inline NuMoments nu_measure_moments(const ConvexBody& K, double p, const QuadratureSpec& q = {}) {
  if (!(p > 0.0)) throw InvalidArgument("p must be positive");
  const int n = K.dim();
  if (interior_margin(K, Vector::Zero(n)) <= 0.0) throw InvalidArgument("origin must be interior: normalizer diverges");
  const double log_vol = std::log(K.volume());
  auto make = [&](const Vector& u) {
    auto L = std::make_shared<detail::RayLaplace>(K, u);
    auto f = [L, log_vol, p](double r) {
      const double h = (*L)(r)-log_vol;
      return RadialPoint{-p * h, h};
    };
    return std::make_pair(f, n / (p * support_infty(K, u)));
  };
  const detail::DensitySweep s = detail::density_sweep(n, direction_plan(K, q), make, q.radial_tol);
  if (!s.bounded) throw InvalidArgument("normalizer diverges");
  NuMoments m;
  m.log_normalizer = s.log_mass;
  m.rel_error = s.rel_error;
  m.barycenter = s.mean;
  m.second = s.second;
  m.mean_h1 = s.extra_mean;
  m.bound = n / p;
  m.mean_bound_holds = m.mean_h1 <= m.bound * (1.0 + 3.0 * s.rel_error) + 1e-10;
  return m;
}

// int det Hess h_1 over R^n, which equals |K| (mass of the Monge-Ampere
// measure). Integrated against e^{-s h_1} with the weight folded back in.
// The integrand decays slowly near facet normals and the radial cut-off
// drops part of that tail, so the value is a lower estimate (about 5e-4
// relative on the square).
inline EvalReport monge_ampere_mass(const ConvexBody& K, const QuadratureSpec& q = {}, double s = 0.01) {
  const int n = K.dim();
  if (interior_margin(K, Vector::Zero(n)) <= 0.0) throw InvalidArgument("origin must be interior");
  const double log_vol = std::log(K.volume());
  auto make = [&](const Vector& u) {
    auto f = [&K, u, log_vol, s](double r) {
      const TiltedMoments t = tilted_moments(K, Vector(r * u), 2);
      const double h = t.log_integral - log_vol;
      return RadialPoint{-s * h, t.cov.determinant() * std::exp(s * h)};
    };
    return std::make_pair(f, n / (s * support_infty(K, u)));
  };
  const detail::DensitySweep d = detail::density_sweep(n, direction_plan(K, q), make, q.radial_tol);
  const double v = d.extra_mean * std::exp(d.log_mass);
  return {v, v * d.rel_error, Method::Quadrature};
}

struct JensenCheck {
  Vector santalo_point;
  double u_at_zero = 0.0;  // log det Cov(K)
  double u_average = 0.0;  // int u_B d nu_{B, K - x}
  double rel_error = 0.0;
  bool holds = false;
};

// u_B(0) <= int u_B d nu after translating K so that nu_{B,K} has barycenter 0.
inline JensenCheck jensen_chain_check(const ConvexBody& K, double B, const QuadratureSpec& q = {}) {
  const int n = K.dim();
  JensenCheck c;
  const SantaloSolution sol = santalo_point(K, PExponent::finite(1.0 / B), 1e-10, q);
  if (!sol.converged) throw Error("Santalo solver did not converge");
  c.santalo_point = sol.point;
  const ConvexBody Kx = translate(K, sol.point);
  const double log_vol = std::log(Kx.volume());
  auto make = [&](const Vector& u) {
    auto f = [&Kx, u, log_vol, B](double r) {
      const TiltedMoments t = tilted_moments(Kx, Vector(r * u), 2);
      const double h = t.log_integral - log_vol;
      return RadialPoint{-B * h, std::log(t.cov.determinant()) + B * h};
    };
    return std::make_pair(f, n / (B * support_infty(Kx, u)));
  };
  const detail::DensitySweep d = detail::density_sweep(n, direction_plan(Kx, q), make, q.radial_tol);
  c.u_at_zero = std::log(covariance(Kx).determinant());
  c.u_average = d.extra_mean;
  c.rel_error = d.rel_error;
  c.holds = c.u_at_zero <= c.u_average + 3.0 * d.rel_error * (1.0 + std::abs(c.u_average)) + 1e-9;
  return c;
}

// ---------------------------------------------------------------------------
// Fradelizi: inf phi >= phi(b(phi)) - n, with b(phi) the barycenter of e^{-phi}.

struct FradeliziReport {
  Vector barycenter;
  double phi_at_barycenter = 0.0;
  double min_sampled = 0.0;
  double slack = 0.0;  // min_sampled - (phi(b) - n)
  bool holds = false;
};

inline FradeliziReport fradelizi_check(const std::function<double(const Vector&)>& phi, int n, int samples = 2000,
                                       std::uint64_t seed = 5, const Vector& center = Vector(),
                                       const QuadratureSpec& q = {}) {
  const Vector x0 = center.size() == n ? center : Vector(Vector::Zero(n));
  auto make = [&](const Vector& u) {
    auto f = [&phi, &x0, u](double r) { return RadialPoint{-phi(Vector(x0 + r * u))}; };
    return std::make_pair(f, 1.0);
  };
  const detail::DensitySweep d = detail::density_sweep(n, detail::default_plan(n, q), make, q.radial_tol);
  if (!d.bounded || !std::isfinite(d.log_mass)) throw InvalidArgument("e^{-phi} is not integrable");
  FradeliziReport r;
  r.barycenter = x0 + d.mean;
  r.phi_at_barycenter = phi(r.barycenter);
  // sample around b at spread set by the second moments
  const Matrix cov = d.second - d.mean * d.mean.transpose();
  const double spread = std::sqrt(std::max(cov.trace(), 1e-300));
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  std::uniform_real_distribution<double> ud(-4.0, 1.0);
  r.min_sampled = std::min(phi(r.barycenter), phi(x0));
  for (int s = 0; s < samples; ++s) {
    Vector z(n);
    for (int i = 0; i < n; ++i) z[i] = nd(rng);
    const Vector y = r.barycenter + spread * std::pow(10.0, ud(rng)) * z;
    r.min_sampled = std::min(r.min_sampled, phi(y));
  }
  r.slack = r.min_sampled - (r.phi_at_barycenter - n);
  r.holds = r.slack >= -1e-8;
  return r;
}

// ---------------------------------------------------------------------------
// Conditional lower bounds on C(K) from (*_B)

struct SlicingBounds {
  double B = 0.0;
  double C = 0.0;
  Vector santalo_point;  // L^{1/B} Santalo point x_K
  double bound_i = 0.0;   // M_{1/B}(K-x)^2 / M_{1/(2B)}(K-x) (2/(eB))^n
  double bound_ii = 0.0;  // M(K-x) / (e^{2n} B^n)
  std::optional<double> bound_iii;  // M(K) / (e^n B^n), symmetric K only
  double universal = 0.0;           // (pi / (2 e^2 n))^n
  double rel_error = 0.0;           // of the Mahler volumes entering the bounds
  bool hypothesis = false;          // certificate for (*_B) passed on the sample grid
  bool holds_i = false, holds_ii = false, holds_iii = true, holds_universal = false;
  bool all_hold() const { return holds_i && holds_ii && holds_iii && holds_universal; }
  double universal_margin() const { return C / universal; }
};

inline SlicingBounds conditional_slicing_bounds(const ConvexBody& K, double B, const QuadratureSpec& q = {},
                                                const ConvexitySamples& spec = {}) {
  if (!(B > 0.0)) throw InvalidArgument("B must be positive");
  const int n = K.dim();
  SlicingBounds r;
  r.B = B;
  r.C = isotropic_report(K).C;
  r.hypothesis = convexity_check(K, B, spec).pass;
  const SantaloSolution sol = santalo_point(K, PExponent::finite(1.0 / B), 1e-10, q);
  if (!sol.converged) throw Error("Santalo solver did not converge");
  r.santalo_point = sol.point;
  const ConvexBody Kx = translate(K, sol.point);
  const MahlerResult m1 = mahler_volume(Kx, PExponent::finite(1.0 / B), q);
  const MahlerResult m2 = mahler_volume(Kx, PExponent::finite(0.5 / B), q);
  const MahlerResult mi = mahler_volume(Kx, PExponent::infinity(), q);
  r.bound_i = m1.value * m1.value / m2.value * std::pow(2.0 / (std::exp(1.0) * B), n);
  r.bound_ii = mi.value / (std::exp(2.0 * n) * std::pow(B, n));
  r.rel_error = 2.0 * m1.rel_error() + m2.rel_error() + mi.rel_error();
  const double slack = 1.0 + 3.0 * r.rel_error + 1e-12;
  r.holds_i = r.C * slack >= r.bound_i;
  r.holds_ii = r.C * slack >= r.bound_ii;
  if (is_centrally_symmetric(K)) {
    const MahlerResult ms = mahler_volume(K, PExponent::infinity(), q);
    r.bound_iii = ms.value / (std::exp(1.0 * n) * std::pow(B, n));
    r.holds_iii = r.C * (1.0 + 3.0 * ms.rel_error() + 1e-12) >= *r.bound_iii;
  }
  r.universal = std::pow(std::numbers::pi / (2.0 * std::exp(2.0) * n), n);
  r.holds_universal = r.C >= r.universal;
  return r;
}

}  // namespace lpgeom
