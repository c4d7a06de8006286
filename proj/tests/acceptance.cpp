// Acceptance checks, one per criterion. `acceptance N` runs criterion N,
// `acceptance` runs all of them. Each prints one PASS or FAIL line; the exit
// code is nonzero when any selected criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <lpgeom/isotropic.hpp>
#include <lpgeom/mahler.hpp>
#include <lpgeom/oracle.hpp>
#include <lpgeom/polar.hpp>
#include <lpgeom/sampling.hpp>
#include <lpgeom/steiner.hpp>
#include <lpgeom/support.hpp>

using namespace lpgeom;

namespace {

constexpr double kPi = std::numbers::pi;

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// cube, diamond, simplex and 20 random polytopes in each of n = 2, 3
std::vector<std::pair<std::string, ConvexBody>> test_bodies() {
  std::vector<std::pair<std::string, ConvexBody>> out;
  std::mt19937_64 rng(2024);
  for (int n = 2; n <= 3; ++n) {
    out.emplace_back(fmt("cube%d", n), ConvexBody::cube(n));
    out.emplace_back(fmt("diamond%d", n), ConvexBody::cross_polytope(n));
    out.emplace_back(fmt("simplex%d", n), ConvexBody::simplex(n));
    for (int i = 0; i < 20; ++i) out.emplace_back(fmt("random%d_%d", n, i), random_polytope(rng, n, 5 + i % 8));
  }
  return out;
}

// Covariance from the vertex formula for simplices,
//   E[x x^T] = (sum v v^T + (sum v)(sum v)^T) / ((n+1)(n+2)),
// summed over a triangulation. Cubes use the closed form a^2/3 I.
Matrix reference_covariance(const ConvexBody& K) {
  const int n = K.dim();
  if (K.kind() == BodyKind::Cube) return Matrix::Identity(n, n) * K.half_width() * K.half_width() / 3.0;
  double mass = 0.0;
  Vector first = Vector::Zero(n);
  Matrix second = Matrix::Zero(n, n);
  for (const auto& s : triangulate(K)) {
    const double v = s.volume();
    const Vector sum = s.vertices.rowwise().sum();
    mass += v;
    first += v * sum / (n + 1.0);
    second += v * (s.vertices * s.vertices.transpose() + sum * sum.transpose()) / ((n + 1.0) * (n + 2.0));
  }
  const Vector mean = first / mass;
  return second / mass - mean * mean.transpose();
}

Verdict cube_mahler() {
  bool ok = true;
  std::ostringstream d;
  for (int n = 1; n <= 3; ++n) {
    const auto t0 = std::chrono::steady_clock::now();
    const ConvexBody K = ConvexBody::cube(n);
    const double exact = std::pow(kPi, 2 * n);
    const MahlerResult m = mahler_volume(K, 1.0);
    const McEstimate mc = mc_polar_volume(K, PExponent::finite(1.0), 400000, 100 + n);
    const double scale = factorial(n) * K.volume();
    const double rel = std::abs(m.value - exact) / exact;
    const double z = std::abs(scale * mc.value - exact) / (scale * mc.sigma);
    const double secs = seconds_since(t0);
    ok = ok && rel <= 1e-6 && z <= 3.0 && secs < 5.0;
    d << fmt(" n=%d rel=%.1e mc_z=%.2f t=%.2fs;", n, rel, z, secs);
  }
  return {ok, d.str()};
}

Verdict polar_norm_limits() {
  std::mt19937_64 rng(31);
  const std::vector<PExponent> ps = {PExponent::finite(0.25), PExponent::finite(1.0), PExponent::finite(4.0),
                                     PExponent::infinity()};
  int monotone_bad = 0, small_p_bad = 0;
  double inf_err = 0.0, small_p_err = 0.0, pos_err = 0.0, pos_err_5 = 0.0;
  for (int k = 0; k < 50; ++k) {
    const ConvexBody K = random_polygon(rng, 4 + k % 7);
    const Vector b = K.barycenter();
    for (int j = 0; j < 10; ++j) {
      const Vector u = random_direction(rng, 2);
      std::vector<double> v;
      for (const auto& p : ps) v.push_back(polar_norm(K, p, u));
      for (std::size_t i = 1; i < v.size(); ++i)
        if (v[i] < v[i - 1] * (1.0 - 1e-12)) ++monotone_bad;
      inf_err = std::max(inf_err, std::abs(v.back() - support_infty(K, u)));
      const double e = std::abs(polar_norm(K, 1e-3, u) - u.dot(b));
      small_p_err = std::max(small_p_err, e);
      if (e > 1e-4) ++small_p_bad;
      // diagnostics: distance to the positive part, and the same at p = 1e-5
      const double pos = std::max(u.dot(b), 0.0);
      pos_err = std::max(pos_err, std::abs(polar_norm(K, 1e-3, u) - pos));
      pos_err_5 = std::max(pos_err_5, std::abs(polar_norm(K, 1e-5, u) - pos));
    }
  }
  const bool ok = monotone_bad == 0 && inf_err <= 1e-10 && small_p_bad == 0;
  return {ok, fmt(" 500 directions, monotonicity violations=%d, max|norm_inf-h_K|=%.1e, p=1e-3 max err=%.2e (%d of 500 over 1e-4);"
                  " against max(<u,b>,0): %.2e at p=1e-3, %.2e at p=1e-5",
                  monotone_bad, inf_err, small_p_err, small_p_bad, pos_err, pos_err_5)};
}

Verdict hessian_identity() {
  double worst = 0.0, worst_fd = 0.0;
  const double h = 1e-4;
  for (const auto& [name, K] : test_bodies()) {
    const int n = K.dim();
    const Matrix cov = reference_covariance(K);
    for (double p : {0.5, 1.0, 3.0}) {
      const Matrix H = hp_hessian(K, p, Vector::Zero(n));
      worst = std::max(worst, (H - p * cov).norm() / (p * cov).norm());
      Matrix fd(n, n);
      for (int j = 0; j < n; ++j) {
        Vector e = Vector::Zero(n);
        e[j] = h;
        fd.col(j) = (hp_gradient(K, p, e) - hp_gradient(K, p, Vector(-e))) / (2.0 * h);
      }
      worst_fd = std::max(worst_fd, (fd - H).norm() / H.norm());
    }
  }
  return {worst <= 1e-10 && worst_fd <= 1e-5,
          fmt(" 46 bodies x p in {0.5,1,3}: max rel Frobenius=%.1e, finite differences=%.1e", worst, worst_fd)};
}

Verdict santalo_solver() {
  const ConvexBody T = ConvexBody::simplex(2);
  bool ok = true;
  std::ostringstream d;
  {
    const SantaloSolution s = santalo_point(T, PExponent::infinity());
    const double err = (s.point - Vector::Constant(2, 1.0 / 3.0)).norm();
    ok = ok && err <= 1e-7;
    d << fmt(" p=inf |x*-(1/3,1/3)|=%.1e;", err);
  }
  std::mt19937_64 rng(44);
  std::uniform_real_distribution<double> rad(0.005, 0.1);
  for (double p : {1.0, 2.0, 10.0}) {
    const PExponent pe = PExponent::finite(p);
    const SantaloSolution s = santalo_point(T, pe);
    const TranslationObjective at = translation_objective(T, pe, s.point);
    const double residual = at.gradient.norm();
    int not_larger = 0;
    for (int k = 0; k < 50; ++k) {
      const Vector x = s.point + rad(rng) * random_direction(rng, 2);
      const TranslationObjective o = translation_objective(T, pe, x);
      if (!(o.bounded && o.log_value > at.log_value)) ++not_larger;
    }
    ok = ok && residual <= 1e-8 && not_larger == 0;
    d << fmt(" p=%g residual=%.1e probes_not_larger=%d;", p, residual, not_larger);
  }
  return {ok, d.str()};
}

Verdict santalo_inequality() {
  const SantaloProbeReport r = santalo_upper_probe(200, {0.5, 1.0, 10.0}, 555);
  return {r.violations == 0 && r.trials > 0,
          fmt(" %d trials, violations=%d, max M_p(K)/M_p(B)=%.6f", r.trials, r.violations, r.max_ratio)};
}

Verdict steiner_monotonicity() {
  std::mt19937_64 rng(66);
  int bad = 0, checks = 0;
  double worst_defect = 0.0, min_gain = std::numeric_limits<double>::infinity();
  for (int k = 0; k < 100; ++k) {
    const ConvexBody K = random_symmetric_polygon(rng);
    const Vector u = random_direction(rng, 2);
    for (double p : {1.0, 5.0}) {
      const MonotonicityCheck c = polar_volume_monotonicity_check(K, PExponent::finite(p), u);
      ++checks;
      const double defect = c.volume_defect / K.volume();
      worst_defect = std::max(worst_defect, defect);
      min_gain = std::min(min_gain, (c.after - c.before + 3.0 * c.error) / c.before);
      if (!(c.after >= c.before - 3.0 * c.error) || defect > 1e-10) ++bad;
    }
  }
  return {bad == 0, fmt(" %d checks, violations=%d, max volume defect=%.1e, min relative slack=%.2e", checks, bad,
                        worst_defect, min_gain)};
}

Verdict ratio_shape() {
  std::vector<PExponent> ps;
  for (double p : {0.5, 1.0, 2.0, 5.0, 10.0, 20.0}) ps.push_back(PExponent::finite(p));
  const std::vector<RatioRow> rows = cube_diamond_ratio(3, ps);
  bool ok = rows.size() == ps.size();
  std::ostringstream d;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    ok = ok && rows[i].ratio > 1.0;
    if (i > 0) ok = ok && rows[i].ratio < rows[i - 1].ratio;
    d << fmt(" %g:%.6f", rows[i].p.value(), rows[i].ratio);
  }
  ok = ok && rows.back().ratio < rows.front().ratio;
  return {ok, d.str()};
}

Verdict measure_sharpness() {
  bool ok = true;
  std::ostringstream d;
  for (int n = 2; n <= 3; ++n) {
    const DiscreteMeasure mu = DiscreteMeasure::simplex_vertices(n);
    const double det = hp_measure_hessian(mu, 1.0, Vector::Zero(n)).determinant();
    const double det_exact = std::pow(n + 1.0, -(n + 1.0));
    const double C = isotropic_report(mu).C;
    const double C_exact = std::pow(n + 1.0, n + 1.0) / (factorial(n) * factorial(n));
    const ConvexityProbe probe(mu);
    const ConvexityCertificate good = probe.certificate(n + 1.0), bad = probe.certificate(n - 0.5);
    const bool pass = std::abs(det - det_exact) <= 1e-12 && std::abs(C - C_exact) <= 1e-10 && good.pass &&
                      std::abs(std::min(good.min_eigenvalue, 0.0)) <= 1e-6 && !bad.pass;
    ok = ok && pass;
    d << fmt(" n=%d det err=%.1e C err=%.1e min eig at n+1=%.1e at n-0.5=%.1e;", n, std::abs(det - det_exact),
             std::abs(C - C_exact), good.min_eigenvalue, bad.min_eigenvalue);
  }
  return {ok, d.str()};
}

Verdict isotropic_bound() {
  bool ok = true;
  double min_margin = std::numeric_limits<double>::infinity();
  std::string arg;
  for (const auto& [name, K] : test_bodies()) {
    const int n = K.dim();
    const double bound = std::pow(kPi / (2.0 * std::exp(2.0) * n), n);
    const double margin = isotropic_report(K).C / bound;
    ok = ok && margin >= 1.0;
    if (margin < min_margin) {
      min_margin = margin;
      arg = name;
    }
  }
  return {ok, fmt(" 46 bodies, min C(K)/bound=%.2f at %s", min_margin, arg.c_str())};
}

Verdict property_suites() {
  std::mt19937_64 rng(10);
  std::normal_distribution<double> nd;
  double identities = 0.0, convexity = 0.0, fradelizi = std::numeric_limits<double>::infinity();
  bool fradelizi_ok = true, lagrange_ok = true;
  double lagrange_err = 0.0;
  std::vector<ConvexBody> bodies = {ConvexBody::cube(2), ConvexBody::cross_polytope(3), ConvexBody::simplex(2),
                                    random_polygon(rng, 7), ConvexBody::ball(3)};
  for (const auto& K : bodies) {
    const int n = K.dim();
    Matrix A = Matrix::Identity(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) A(i, j) += 0.3 * nd(rng);
    Vector a(n);
    for (int i = 0; i < n; ++i) a[i] = 0.1 * nd(rng);
    for (double p : {0.5, 2.0})
      identities = std::max(identities, verify_basic_identities(K, ConvexBody::cube(1), p, 3.0 * p, A, a, 1000, 7).max_violation());
    for (int s = 0; s < 1000; ++s) {
      const Vector y = sample_point(rng, n), z = sample_point(rng, n);
      const double mid = hp(K, 1.0, Vector(0.5 * (y + z))), avg = 0.5 * (hp(K, 1.0, y) + hp(K, 1.0, z));
      convexity = std::max(convexity, (mid - avg) / (1.0 + std::abs(avg)));
    }
  }
  {
    // Fradelizi on centred bodies, a quadratic and a shifted quadratic
    const ConvexBody T = translate(ConvexBody::simplex(2), Vector::Constant(2, 1.0 / 3.0));
    const ConvexBody C3 = ConvexBody::cube(3);
    const std::vector<std::pair<int, std::function<double(const Vector&)>>> fs = {
        {2, [&T](const Vector& x) { return hp(T, 1.0, x); }},
        {3, [&C3](const Vector& x) { return hp(C3, 2.0, x); }},
        {2, [](const Vector& x) { return 0.5 * x.squaredNorm(); }},
        {3, [](const Vector& x) { return 0.5 * (x - Vector::Constant(3, 0.4)).squaredNorm() + x[0]; }}};
    for (const auto& [n, f] : fs) {
      const FradeliziReport r = fradelizi_check(f, n, 1000, 3);
      fradelizi = std::min(fradelizi, r.slack);
      fradelizi_ok = fradelizi_ok && r.holds;
    }
  }
  {
    std::uniform_real_distribution<double> ud(-2.0, 2.0);
    for (int t = 0; t < 300; ++t) {
      const int m = 2 + t % 6;
      std::vector<double> y(m);
      bool spaced;
      do {
        for (auto& v : y) v = ud(rng);
        spaced = true;
        for (int i = 0; i < m; ++i)
          for (int j = i + 1; j < m; ++j) spaced = spaced && std::abs(y[i] - y[j]) > 0.05;
      } while (!spaced);
      for (int k = 0; k < m; ++k) {
        const LagrangeCheck c = lagrange_identity_check(y, k);
        lagrange_err = std::max(lagrange_err, std::abs(c.value - c.expected));
        lagrange_ok = lagrange_ok && c.holds;
      }
    }
  }
  double dd = 0.0;
  {
    std::uniform_real_distribution<double> ud(-5.0, 5.0), tiny(-1e-9, 1e-9), near(-1e-4, 1e-4);
    for (int t = 0; t < 600; ++t) {
      const int m = 1 + t % 8;
      std::vector<double> c(m);
      const double base = ud(rng);
      for (int i = 0; i < m; ++i) {
        switch (t % 4) {
          case 0: c[i] = ud(rng); break;
          case 1: c[i] = base + tiny(rng); break;
          case 2: c[i] = base + near(rng); break;
          default: c[i] = i % 2 ? base : ud(rng); break;
        }
      }
      const double ref = highprec_divided_difference(c);
      dd = std::max(dd, std::abs(divided_difference_exp(c) - ref) / ref);
    }
  }
  const bool ok = identities <= 1e-10 && convexity <= 1e-10 && fradelizi_ok && lagrange_ok && lagrange_err <= 1e-9 &&
                  dd <= 1e-12;
  return {ok, fmt(" identities=%.1e midpoint=%.1e fradelizi min slack=%.3f lagrange=%.1e divided differences=%.1e",
                  identities, convexity, fradelizi, lagrange_err, dd)};
}

const std::vector<std::pair<const char*, Verdict (*)()>> kCriteria = {
    {"cube Mahler volume pi^{2n}", cube_mahler},
    {"polar norm limits", polar_norm_limits},
    {"Hessian equals p Cov", hessian_identity},
    {"Santalo point on the triangle", santalo_solver},
    {"Santalo upper bound probe", santalo_inequality},
    {"Steiner monotonicity of polar volume", steiner_monotonicity},
    {"cube/diamond ratio shape", ratio_shape},
    {"simplex-vertex measure sharpness", measure_sharpness},
    {"lower bound on C(K)", isotropic_bound},
    {"property suites", property_suites},
};

}  // namespace

int main(int argc, char** argv) {
  std::vector<int> which;
  if (argc > 1) {
    const int c = std::atoi(argv[1]);
    if (c < 1 || c > static_cast<int>(kCriteria.size())) {
      std::cerr << "usage: acceptance [1-" << kCriteria.size() << "]\n";
      return 2;
    }
    which.push_back(c);
  } else {
    for (int c = 1; c <= static_cast<int>(kCriteria.size()); ++c) which.push_back(c);
  }
  int failed = 0;
  for (int c : which) {
    const auto& [name, fn] = kCriteria[c - 1];
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = fn();
    } catch (const std::exception& e) {
      v = {false, std::string(" exception: ") + e.what()};
    }
    std::cout << (v.pass ? "PASS" : "FAIL") << " criterion " << c << " (" << name << "):" << v.detail
              << fmt(" [%.1fs]", seconds_since(t0)) << std::endl;
    if (!v.pass) ++failed;
  }
  return failed == 0 ? 0 : 1;
}
