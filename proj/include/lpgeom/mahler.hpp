#pragma once

#include <random>
#include <vector>

#include "polar.hpp"
#include "sampling.hpp"

namespace lpgeom {

struct MahlerResult {
  PExponent p = PExponent::infinity();
  double value = 0.0;
  double error = 0.0;
  Method method = Method::ClosedForm;
  double rel_error() const { return value > 0.0 && std::isfinite(value) ? error / value : 0.0; }
};

namespace detail {

inline MahlerResult infinite_mahler(PExponent p) {
  return {p, std::numeric_limits<double>::infinity(), 0.0, Method::ClosedForm};
}

// (1/p) int_0^inf (y / sinh y)^{1/p} dy.
inline EvalReport cube_factor(double p) {
  auto f = [p](double y) { return RadialPoint{-log_sinhc(y) / p}; };
  const RadialMoments m = radial_moments(f, 1, p, 1e-13);
  const double v = std::exp(m.log_moment(0)) / p;
  return {v, v * m.rel_error, Method::Quadrature};
}

inline MahlerResult general_mahler(const ConvexBody& K, PExponent p, const QuadratureSpec& q) {
  const EvalReport pv = polar_volume(K, p, q);
  if (!std::isfinite(pv.value)) return infinite_mahler(p);
  const double scale = factorial(K.dim()) * K.volume();
  return {p, scale * pv.value, scale * pv.error, pv.method};
}

}  // namespace detail

// M_p(K) = n! |K| |K^{o,p}|. With structural = true the value is assembled from
// closed forms and exact reductions (products, linear images, cube, ball)
// wherever possible; otherwise the spherical-radial sweep is used directly.
inline MahlerResult mahler_volume(const ConvexBody& K, PExponent p, const QuadratureSpec& q = {},
                                  bool structural = true) {
  const int n = K.dim();
  if (p.is_zero()) return detail::infinite_mahler(p);
  if (!structural) return detail::general_mahler(K, p, q);
  switch (K.kind()) {
    case BodyKind::Product: {
      const MahlerResult l = mahler_volume(K.left(), p, q), r = mahler_volume(K.right(), p, q);
      if (!std::isfinite(l.value) || !std::isfinite(r.value)) return detail::infinite_mahler(p);
      const Method m = (l.method == Method::ClosedForm) ? r.method : l.method;
      return {p, l.value * r.value, l.value * r.value * (l.rel_error() + r.rel_error()), m};
    }
    case BodyKind::AffineImage: {
      const Matrix& A = K.matrix();
      if (K.shift().norm() == 0.0) return mahler_volume(K.inner(), p, q);
      // A K' + b = A (K' + A^{-1} b)
      if ((A - Matrix::Identity(n, n)).cwiseAbs().maxCoeff() > 0.0)
        return mahler_volume(ConvexBody::affine(Matrix::Identity(n, n), A.partialPivLu().solve(K.shift()), K.inner()), p, q);
      return detail::general_mahler(K, p, q);
    }
    case BodyKind::Cube:
    case BodyKind::CrossPolytope:
      if (p.is_infinite()) return {p, std::pow(4.0, n), 0.0, Method::ClosedForm};
      if (K.kind() == BodyKind::Cube) {
        const EvalReport c = detail::cube_factor(p.value());
        const double v = std::pow(4.0 * c.value, n);
        return {p, v, v * n * c.error / c.value, Method::Quadrature};
      }
      return detail::general_mahler(K, p, q);
    case BodyKind::Ball2: {
      const double vol = K.volume();
      if (p.is_infinite()) return {p, factorial(n) * vol * vol, 0.0, Method::ClosedForm};
      const double pp = p.value(), lv = std::log(vol);
      auto f = [&](double r) { return RadialPoint{-(detail::ball_log_laplace(n, pp * r) - lv) / pp}; };
      const RadialMoments m = radial_moments(f, n, n, 1e-13);
      const double v = vol * sphere_area(n) * std::exp(m.log_moment(0));
      return {p, v, v * m.rel_error, Method::Quadrature};
    }
    default: return detail::general_mahler(K, p, q);
  }
}

inline MahlerResult mahler_volume(const ConvexBody& K, double p, const QuadratureSpec& q = {}) {
  return mahler_volume(K, PExponent::finite(p), q);
}

// |K| int_{R^n} e^{-h_{p,K}(y)} dy on a Cartesian Gauss-Legendre grid after
// y = L t / (1 - t^2); independent of the spherical-radial machinery.
inline MahlerResult mahler_volume_direct(const ConvexBody& K, PExponent p, int order = 0) {
  const int n = K.dim();
  if (n > 3) throw CapabilityError("direct Mahler integration limited to n <= 3");
  if (!p.is_finite()) throw InvalidArgument("direct Mahler integration needs a finite p");
  if (interior_margin(K, Vector::Zero(n)) <= 0.0) return detail::infinite_mahler(p);
  double hmin = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) {
    Vector e = Vector::Zero(n);
    e[i] = 1.0;
    hmin = std::min({hmin, support_infty(K, e), support_infty(K, Vector(-e))});
  }
  const double L = 2.0 * n / hmin;
  if (order <= 0) order = n == 1 ? 200 : n == 2 ? 96 : 40;
  auto integrate = [&](int m) {
    const auto& g = gauss_legendre(m);
    std::vector<double> ys(m), ws(m);
    for (int i = 0; i < m; ++i) {
      const double t = g.nodes[i], d = 1.0 - t * t;
      ys[i] = L * t / d;
      ws[i] = g.weights[i] * L * (1.0 + t * t) / (d * d);
    }
    long total = 1;
    for (int i = 0; i < n; ++i) total *= m;
    double sum = 0.0;
    Vector y(n);
    for (long idx = 0; idx < total; ++idx) {
      long r = idx;
      double w = 1.0;
      for (int i = 0; i < n; ++i) {
        const int j = static_cast<int>(r % m);
        r /= m;
        y[i] = ys[j];
        w *= ws[j];
      }
      sum += w * std::exp(-hp(K, p, y));
    }
    return sum;
  };
  const double fine = integrate(order), coarse = integrate(order / 2);
  const double vol = K.volume();
  return {p, vol * fine, vol * std::abs(fine - coarse), Method::Quadrature};
}

// log M_p(K - x) with its gradient and Hessian in x. The gradient is
// b(e^{-h_{p,K-x}}), the Hessian the covariance of that density.
struct TranslationObjective {
  bool bounded = false;
  double log_value = 0.0;
  double rel_error = 0.0;
  Vector gradient;
  Matrix hessian;
};

inline TranslationObjective translation_objective(const ConvexBody& K, PExponent p, const Vector& x,
                                                  const QuadratureSpec& q = {}) {
  TranslationObjective out;
  const SweepResult s = sweep(translate(K, x), p, q, 2);
  if (!s.bounded) return out;
  out.bounded = true;
  out.log_value = std::log(K.volume()) + s.log_mass;
  out.rel_error = s.rel_error;
  out.gradient = s.mean;
  out.hessian = s.second - s.mean * s.mean.transpose();
  return out;
}

struct SantaloSolution {
  Vector point;
  double gradient_norm = std::numeric_limits<double>::infinity();
  int iterations = 0;
  bool converged = false;
  double value = 0.0;  // M_p(K - x*)
  double rel_error = 0.0;
};

// Damped Newton on x -> log M_p(K - x), started at b(K).
inline SantaloSolution santalo_point(const ConvexBody& K, PExponent p, double tol = 1e-10,
                                     const QuadratureSpec& q = {}, int max_iter = 60) {
  if (p.is_zero()) throw InvalidArgument("the Santalo point needs p > 0");
  if (!(tol > 0.0)) throw InvalidArgument("tolerance must be positive");
  SantaloSolution sol;
  Vector x = K.barycenter();
  TranslationObjective cur = translation_objective(K, p, x, q);
  if (!cur.bounded) throw DegenerateBody("barycenter is not an interior point");
  for (int it = 0; it < max_iter; ++it) {
    sol.iterations = it;
    if (cur.gradient.norm() <= tol) {
      sol.converged = true;
      break;
    }
    const Vector step = -cur.hessian.ldlt().solve(cur.gradient);
    double t = 1.0;
    bool moved = false;
    for (int ls = 0; ls < 40; ++ls, t *= 0.5) {
      const Vector xn = x + t * step;
      if (interior_margin(K, xn) <= 0.0) continue;
      TranslationObjective nxt = translation_objective(K, p, xn, q);
      if (!nxt.bounded) continue;
      if (nxt.log_value <= cur.log_value + 1e-13 * (1.0 + std::abs(cur.log_value)) ||
          nxt.gradient.norm() < cur.gradient.norm()) {
        x = xn;
        cur = std::move(nxt);
        moved = true;
        break;
      }
    }
    sol.iterations = it + 1;
    if (!moved) break;
  }
  if (cur.gradient.norm() <= tol) sol.converged = true;
  sol.point = x;
  sol.gradient_norm = cur.gradient.norm();
  sol.value = std::exp(cur.log_value);
  sol.rel_error = cur.rel_error;
  return sol;
}

struct MahlerInequalityReport {
  double m_classical = 0.0, m_p = 0.0, rel_error = 0.0;
  bool classical_below = false;  // M(K) <= M_p(K)
  bool sandwich_checked = false;  // only when b(K) = 0
  double sandwich_factor = 0.0;   // (p / (1+p)^{1+1/p})^n
  bool sandwich_holds = false;
  double tensor_discrepancy = 0.0;  // |M_p(K x I) - M_p(K) M_p(I)| / M_p(K x I)
  double tensor_error = 0.0;
  double gl_discrepancy = 0.0;  // |M_p(AK) - M_p(K)| / M_p(K)
  double gl_error = 0.0;
  bool passed() const {
    return classical_below && (!sandwich_checked || sandwich_holds) && tensor_discrepancy <= 3.0 * tensor_error + 1e-9 &&
           gl_discrepancy <= 3.0 * gl_error + 1e-9;
  }
};

// M(K) <= M_p(K), the reverse sandwich for centred bodies, tensoriality with a
// segment and invariance under a random linear map. The last two are computed
// on vertex representations so that they exercise the sweep, not the exact
// structural reductions.
inline MahlerInequalityReport mahler_inequality_suite(const ConvexBody& K, double p, const QuadratureSpec& q = {},
                                                      std::uint64_t seed = 1) {
  const int n = K.dim();
  const PExponent P = PExponent::finite(p);
  MahlerInequalityReport r;
  const MahlerResult mp = mahler_volume(K, P, q), mi = mahler_volume(K, PExponent::infinity(), q);
  r.m_p = mp.value;
  r.m_classical = mi.value;
  r.rel_error = mp.rel_error() + mi.rel_error();
  r.classical_below = mi.value <= mp.value * (1.0 + 3.0 * r.rel_error) + 1e-12;
  if (K.barycenter().norm() <= 1e-9) {
    r.sandwich_checked = true;
    r.sandwich_factor = std::pow(p / std::pow(1.0 + p, 1.0 + 1.0 / p), n);
    r.sandwich_holds = r.sandwich_factor * mp.value <= mi.value * (1.0 + 3.0 * r.rel_error) + 1e-12;
  }
  if (is_polytope(K) && n + 1 <= 3) {
    Matrix seg(1, 2);
    seg << -1.0, 1.0;
    const ConvexBody KI = to_vpolytope(product(K, ConvexBody::vpolytope(seg)));
    const MahlerResult a = mahler_volume(KI, P, q, false);
    const MahlerResult b = mahler_volume(ConvexBody::cube(1), P, q);
    const MahlerResult c = mahler_volume(K, P, q, false);
    r.tensor_discrepancy = std::abs(a.value - b.value * c.value) / a.value;
    r.tensor_error = a.rel_error() + b.rel_error() + c.rel_error();
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  Matrix A(n, n);
  do {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) A(i, j) = nd(rng);
  } while (std::abs(A.determinant()) < 0.2);
  const ConvexBody AK = is_polytope(K) ? to_vpolytope(linear_image(K, A)) : linear_image(K, A);
  const MahlerResult ma = mahler_volume(AK, P, q, false), mk = mahler_volume(K, P, q, false);
  r.gl_discrepancy = std::abs(ma.value - mk.value) / mk.value;
  r.gl_error = ma.rel_error() + mk.rel_error();
  return r;
}

struct RatioRow {
  PExponent p = PExponent::infinity();
  double diamond = 0.0, cube = 0.0, ratio = 0.0, rel_error = 0.0;
};

// M_p(B_1^n) / M_p(B_inf^n) for each p.
inline std::vector<RatioRow> cube_diamond_ratio(int n, const std::vector<PExponent>& ps, const QuadratureSpec& q = {}) {
  if (n < 1 || n > 3) throw CapabilityError("cube/diamond ratio supported for n <= 3");
  std::vector<RatioRow> rows;
  const ConvexBody diamond = ConvexBody::cross_polytope(n), cube = ConvexBody::cube(n);
  for (const auto& p : ps) {
    if (p.is_zero()) throw InvalidArgument("ratio undefined at p = 0");
    RatioRow row;
    row.p = p;
    // n = 1: the two bodies coincide
    const MahlerResult d = n == 1 ? mahler_volume(cube, p, q) : mahler_volume(diamond, p, q);
    const MahlerResult c = mahler_volume(cube, p, q);
    row.diamond = d.value;
    row.cube = c.value;
    row.ratio = d.value / c.value;
    row.rel_error = d.rel_error() + c.rel_error();
    rows.push_back(row);
  }
  return rows;
}

struct SantaloProbeReport {
  int trials = 0;
  int violations = 0;
  double max_ratio = 0.0;  // largest M_p(K) / M_p(B_2^n) seen
  std::vector<double> ratios;
};

// M_p(K) <= M_p(B_2^2) (1 + 3 err) over seeded random symmetric polygons.
inline SantaloProbeReport santalo_upper_probe(int count, const std::vector<double>& ps, std::uint64_t seed,
                                              const QuadratureSpec& q = {}) {
  SantaloProbeReport r;
  std::mt19937_64 rng(seed);
  for (int i = 0; i < count; ++i) {
    const ConvexBody K = random_symmetric_polygon(rng);
    for (double p : ps) {
      const MahlerResult mk = mahler_volume(K, p, q), mb = mahler_volume(ConvexBody::ball(2), p, q);
      const double ratio = mk.value / mb.value;
      ++r.trials;
      r.ratios.push_back(ratio);
      r.max_ratio = std::max(r.max_ratio, ratio);
      if (mk.value > mb.value * (1.0 + 3.0 * (mk.rel_error() + mb.rel_error()))) ++r.violations;
    }
  }
  return r;
}

}  // namespace lpgeom
