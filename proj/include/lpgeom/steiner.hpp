#pragma once

#include <functional>
#include <random>
#include <vector>

#include "polar.hpp"
#include "sampling.hpp"

namespace lpgeom {

struct SymmetralResult {
  ConvexBody body;
  Vector direction;
  double volume_before = 0.0;
  double volume_after = 0.0;
  bool exact = true;
  double volume_defect() const { return std::abs(volume_after - volume_before) / volume_before; }
};

enum class SteinerMode { Exact, Auto };

namespace detail {

// Householder reflection taking u to e_n (its own inverse).
inline Matrix reflect_to_last_axis(const Vector& u) {
  const int n = static_cast<int>(u.size());
  Vector w = u;
  w[n - 1] -= 1.0;
  const double ww = w.squaredNorm();
  if (ww < 1e-30) return Matrix::Identity(n, n);
  return Matrix::Identity(n, n) - 2.0 * w * w.transpose() / ww;
}

inline bool segments_cross(const Vector& a, const Vector& b, const Vector& c, const Vector& d, Vector& out) {
  const Vector r = b - a, s = d - c;
  const double den = r[0] * s[1] - r[1] * s[0];
  if (std::abs(den) < 1e-14 * (r.norm() * s.norm() + 1e-300)) return false;
  const Vector ac = c - a;
  const double t = (ac[0] * s[1] - ac[1] * s[0]) / den;
  const double v = (ac[0] * r[1] - ac[1] * r[0]) / den;
  if (t < -1e-12 || t > 1.0 + 1e-12 || v < -1e-12 || v > 1.0 + 1e-12) return false;
  out = a + t * r;
  return true;
}

}  // namespace detail

// Steiner symmetral of a polytope. After rotating u to e_n the chord length
// l(z) is the difference of the upper (concave) and lower (convex) piecewise
// linear envelopes over the projection; the symmetral is the hull of
// (z, +-l(z)/2) over the breakpoints of l. In the plane the breakpoints are the
// projected vertices; in R^3 they also include crossings of projected edges.
inline SymmetralResult steiner_symmetral(const ConvexBody& K, const Vector& direction, SteinerMode mode = SteinerMode::Auto,
                                         std::uint64_t seed = 1) {
  const int n = K.dim();
  check_dim(K, direction);
  if (std::abs(direction.norm() - 1.0) > 1e-12) throw InvalidArgument("direction must be a unit vector");
  const auto verts = vertices(K);
  if (!verts) throw CapabilityError("Steiner symmetrization implemented for polytopes only");
  const detail::Hull hull = detail::build_hull(*verts);
  const std::size_t max_exact_facets = 64;
  bool exact = n <= 2 || (n == 3 && hull.facets.size() <= max_exact_facets);
  if (!exact && mode == SteinerMode::Exact)
    throw CapabilityError("exact Steiner symmetral needs n <= 3 and at most 64 facets");

  const Matrix Q = detail::reflect_to_last_axis(direction);
  const Matrix V = Q * hull.vertices;
  const int m = static_cast<int>(V.cols());
  std::vector<Vector> normals;
  std::vector<double> offsets;
  for (const auto& f : hull.facets) {
    normals.push_back(Q * f.normal);
    offsets.push_back(f.offset);
  }
  const double scale = detail::point_scale(V);
  auto chord = [&](const Vector& z, double& lo, double& hi) {
    hi = std::numeric_limits<double>::infinity();
    lo = -hi;
    for (std::size_t i = 0; i < normals.size(); ++i) {
      const double an = normals[i][n - 1];
      if (std::abs(an) < 1e-12) continue;
      const double rhs = offsets[i] - normals[i].head(n - 1).dot(z);
      if (an > 0.0)
        hi = std::min(hi, rhs / an);
      else
        lo = std::max(lo, rhs / an);
    }
    return std::max(0.0, hi - lo);
  };

  std::vector<Vector> zs;
  for (int i = 0; i < m; ++i) zs.push_back(V.col(i).head(n - 1));
  if (n == 3 && exact) {
    // edges: vertex pairs sharing two facets
    std::vector<std::vector<int>> on(m);
    for (std::size_t f = 0; f < hull.facets.size(); ++f)
      for (int id : hull.facets[f].ids) on[id].push_back(static_cast<int>(f));
    std::vector<std::pair<int, int>> edges;
    for (int i = 0; i < m; ++i)
      for (int j = i + 1; j < m; ++j) {
        int shared = 0;
        for (int a : on[i])
          for (int b : on[j]) shared += (a == b);
        if (shared >= 2) edges.emplace_back(i, j);
      }
    Vector x;
    for (std::size_t a = 0; a < edges.size(); ++a)
      for (std::size_t b = a + 1; b < edges.size(); ++b) {
        const auto [i, j] = edges[a];
        const auto [k, l] = edges[b];
        if (i == k || i == l || j == k || j == l) continue;
        if (detail::segments_cross(zs[i], zs[j], zs[k], zs[l], x)) zs.push_back(x);
      }
  } else if (!exact) {
    // inner approximation from random points of the projection
    std::mt19937_64 rng(seed);
    std::gamma_distribution<double> gd(1.0, 1.0);
    for (int s = 0; s < 400 * n; ++s) {
      Vector w(m);
      for (int i = 0; i < m; ++i) w[i] = gd(rng);
      zs.push_back(V.topRows(n - 1) * (w / w.sum()));
    }
  }
  std::vector<Vector> pts;
  for (const auto& z : zs) {
    double lo, hi;
    const double l = chord(z, lo, hi);
    Vector p(n);
    p.head(n - 1) = z;
    p[n - 1] = 0.5 * l;
    pts.push_back(Q * p);
    if (l > 1e-14 * scale) {
      p[n - 1] = -0.5 * l;
      pts.push_back(Q * p);
    }
  }
  SymmetralResult out{ConvexBody::vpolytope(pts), direction, K.volume(), 0.0, exact};
  out.volume_after = out.body.volume();
  return out;
}

// Symmetral of a segment: the centred segment of the same length.
inline SymmetralResult steiner_symmetral_1d(const ConvexBody& K) {
  const double len = support_infty(K, Vector::Constant(1, 1.0)) + support_infty(K, Vector::Constant(1, -1.0));
  Matrix v(1, 2);
  v << -0.5 * len, 0.5 * len;
  SymmetralResult out{ConvexBody::vpolytope(v), Vector::Constant(1, 1.0), K.volume(), len, true};
  return out;
}

namespace detail {

// Drop the vertex whose triangle with its neighbours has least area until
// at most max_vertices remain, then rescale about the centroid to restore
// the area.
inline Matrix simplify_polygon(const Matrix& ccw, int max_vertices, double target_area) {
  std::vector<Vector> v;
  for (int i = 0; i < ccw.cols(); ++i) v.push_back(ccw.col(i));
  while (static_cast<int>(v.size()) > max_vertices) {
    const int k = static_cast<int>(v.size());
    int best = 0;
    double best_area = std::numeric_limits<double>::infinity();
    for (int i = 0; i < k; ++i) {
      const double a = std::abs(cross2(v[(i + k - 1) % k], v[i], v[(i + 1) % k]));
      if (a < best_area) {
        best_area = a;
        best = i;
      }
    }
    v.erase(v.begin() + best);
  }
  Matrix out(2, static_cast<int>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) out.col(static_cast<int>(i)) = v[i];
  const ConvexBody P = ConvexBody::vpolytope(out);
  const Vector c = P.barycenter();
  const double f = std::sqrt(target_area / P.volume());
  out.colwise() -= c;
  out *= f;
  out.colwise() += c;
  return out;
}

}  // namespace detail

namespace detail {

// Support points of V along max_vertices Fibonacci directions, rescaled about
// the centroid to the target volume.
inline Matrix simplify_polytope3(const Matrix& V, int max_vertices, double target_volume) {
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  std::vector<int> pick;
  for (int i = 0; i < max_vertices; ++i) {
    const double z = 1.0 - 2.0 * (i + 0.5) / max_vertices;
    const double r = std::sqrt(1.0 - z * z);
    Vector u(3);
    u << r * std::cos(golden * i), r * std::sin(golden * i), z;
    int best = 0;
    (V.transpose() * u).maxCoeff(&best);
    if (std::find(pick.begin(), pick.end(), best) == pick.end()) pick.push_back(best);
  }
  Matrix out(3, static_cast<int>(pick.size()));
  for (std::size_t k = 0; k < pick.size(); ++k) out.col(static_cast<int>(k)) = V.col(pick[k]);
  const ConvexBody P = ConvexBody::vpolytope(out);
  const Vector c = P.barycenter();
  out.colwise() -= c;
  out *= std::cbrt(target_volume / P.volume());
  out.colwise() += c;
  return out;
}

}  // namespace detail

struct SteinerSequence {
  ConvexBody body;
  double radius = 0.0;               // radius of the ball of equal volume
  std::vector<double> hausdorff;     // distance to radius * B_2^n after each step
  std::vector<Vector> directions;
  std::vector<int> vertex_counts;
  std::vector<ConvexBody> bodies;    // iterates after each step
  bool approximate = false;          // set once a simplification step was applied
};

// Repeated symmetrization along the direction of largest width among a few
// fresh seeded random candidates. A large candidate pool keeps picking nearly
// the same direction and stalls with the body off centre. Iterates are kept to
// at most max_vertices vertices by volume-restoring simplification.
inline SteinerSequence steiner_to_ball(const ConvexBody& K, int iterations, std::uint64_t seed, int max_vertices = 256,
                                       int candidates = 4) {
  const int n = K.dim();
  if (n < 2 || n > 3) throw CapabilityError("Steiner driver supports n = 2, 3");
  SteinerSequence seq{to_vpolytope(K), 0.0, {}, {}, {}, {}, false};
  const double vol = K.volume();
  seq.radius = std::pow(vol / ConvexBody::ball(n).volume(), 1.0 / n);
  const ConvexBody ball = ConvexBody::affine(seq.radius * Matrix::Identity(n, n), Vector::Zero(n), ConvexBody::ball(n));
  std::mt19937_64 rng(seed);
  for (int it = 0; it < iterations; ++it) {
    Vector best;
    double width = -1.0;
    for (int c = 0; c < candidates; ++c) {
      const Vector u = random_direction(rng, n);
      const double w = support_infty(seq.body, u) + support_infty(seq.body, Vector(-u));
      if (w > width) {
        width = w;
        best = u;
      }
    }
    SymmetralResult r = steiner_symmetral(seq.body, best, SteinerMode::Auto, seed + it);
    seq.approximate = seq.approximate || !r.exact;
    ConvexBody next = r.body;
    if (next.hull().vertices.cols() > max_vertices) {
      const Matrix& V = next.hull().vertices;
      next = ConvexBody::vpolytope(n == 2 ? detail::simplify_polygon(V, max_vertices, vol)
                                          : detail::simplify_polytope3(V, max_vertices, vol));
      seq.approximate = true;
    }
    seq.body = next;
    seq.directions.push_back(best);
    seq.vertex_counts.push_back(static_cast<int>(seq.body.hull().vertices.cols()));
    seq.hausdorff.push_back(hausdorff_distance(seq.body, ball));
    seq.bodies.push_back(seq.body);
  }
  return seq;
}

struct MonotonicityCheck {
  double before = 0.0, after = 0.0;  // |K^{o,p}| and |(sigma_u K)^{o,p}|
  double error = 0.0;                // combined absolute error estimate
  double volume_defect = 0.0;
  bool holds = false;
};

// |(sigma_u K)^{o,p}| >= |K^{o,p}| - 3 err for symmetric K.
inline MonotonicityCheck polar_volume_monotonicity_check(const ConvexBody& K, PExponent p, const Vector& u,
                                                         const QuadratureSpec& q = {}) {
  if (!is_centrally_symmetric(K)) throw InvalidArgument("body must be centrally symmetric");
  const SymmetralResult s = steiner_symmetral(K, u);
  const EvalReport a = polar_volume(K, p, q), b = polar_volume(s.body, p, q);
  MonotonicityCheck c;
  c.before = a.value;
  c.after = b.value;
  c.error = a.error + b.error;
  c.volume_defect = s.volume_defect();
  c.holds = b.value >= a.value - 3.0 * c.error;
  return c;
}

struct ThreeParamCheck {
  double lhs = 0.0, rhs = 0.0;
  bool holds = false;
};

// h_{p,sigma K}(r (xi + xi')/2, r x_n) <= s/(t+s) h_{p,K}(t xi, t x_n) + t/(t+s) h_{p,K}(s xi', -s x_n)
// with 2/r = 1/t + 1/s and symmetrization along e_n.
inline ThreeParamCheck three_param_inequality_check(const ConvexBody& K, const ConvexBody& symmetral, PExponent p,
                                                    const Vector& xi, const Vector& xi2, double xn, double t, double s) {
  const int n = K.dim();
  if (!(t > 0.0 && s > 0.0)) throw InvalidArgument("t and s must be positive");
  if (xi.size() != n - 1 || xi2.size() != n - 1) throw InvalidArgument("xi must lie in R^{n-1}");
  const double r = 2.0 / (1.0 / t + 1.0 / s);
  Vector a(n), b(n), c(n);
  a << r * 0.5 * (xi + xi2), r * xn;
  b << t * xi, t * xn;
  c << s * xi2, -s * xn;
  ThreeParamCheck out;
  out.lhs = hp(symmetral, p, a);
  out.rhs = s / (t + s) * hp(K, p, b) + t / (t + s) * hp(K, p, c);
  out.holds = out.lhs <= out.rhs + 1e-9;
  return out;
}

inline ThreeParamCheck three_param_inequality_check(const ConvexBody& K, PExponent p, const Vector& xi, const Vector& xi2,
                                                    double xn, double t, double s) {
  Vector en = Vector::Zero(K.dim());
  en[K.dim() - 1] = 1.0;
  return three_param_inequality_check(K, steiner_symmetral(K, en).body, p, xi, xi2, xn, t, s);
}

// Piecewise linear interpolation of log f on a grid, extended linearly.
class TabulatedLogFunction {
 public:
  TabulatedLogFunction(std::vector<double> x, std::vector<double> logf) : x_(std::move(x)), y_(std::move(logf)) {
    if (x_.size() < 2 || x_.size() != y_.size()) throw InvalidArgument("need at least two grid points");
    for (std::size_t i = 1; i < x_.size(); ++i)
      if (!(x_[i] > x_[i - 1])) throw InvalidArgument("grid must be increasing");
  }
  double operator()(double t) const {
    auto it = std::upper_bound(x_.begin(), x_.end(), t);
    std::size_t i = it == x_.begin() ? 0 : std::min<std::size_t>(it - x_.begin() - 1, x_.size() - 2);
    const double w = (t - x_[i]) / (x_[i + 1] - x_[i]);
    return y_[i] + w * (y_[i + 1] - y_[i]);
  }

 private:
  std::vector<double> x_, y_;
};

using LogFunction = std::function<double(double)>;

// log of the minimal H with H(r) >= F(t)^{s/(t+s)} G(s)^{t/(t+s)} whenever 2/r = 1/t + 1/s:
// a log-grid search over t > r/2 followed by golden-section refinement.
inline double minimal_envelope_log(const LogFunction& logF, const LogFunction& logG, double r) {
  auto value = [&](double lt) {
    const double t = r / 2.0 + std::exp(lt);
    const double s = r * t / (2.0 * t - r);
    return s / (t + s) * logF(t) + t / (t + s) * logG(s);
  };
  const double lo = std::log(r) - 30.0, hi = std::log(r) + 30.0;
  const int m = 600;
  int best = 0;
  double bv = -std::numeric_limits<double>::infinity();
  for (int i = 0; i <= m; ++i) {
    const double v = value(lo + (hi - lo) * i / m);
    if (v > bv) {
      bv = v;
      best = i;
    }
  }
  double a = lo + (hi - lo) * std::max(0, best - 1) / m, b = lo + (hi - lo) * std::min(m, best + 1) / m;
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - g * (b - a), d = a + g * (b - a), fc = value(c), fd = value(d);
  for (int it = 0; it < 80; ++it) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = value(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = value(d);
    }
  }
  return std::max({bv, fc, fd});
}

struct HarmonicBmCheck {
  double lhs = 0.0, rhs = 0.0;
  bool holds = false;
};

namespace detail {

// int_0^inf r^{q-1} e^{g(r)} dr for real q >= 1.
inline double moment_integral(const LogFunction& g, double q) {
  auto f = [&](double r) { return RadialPoint{(q - 1.0) * std::log(r) + g(r)}; };
  const RadialMoments m = radial_moments(f, 1, 1.0, 1e-12);
  if (m.divergent) throw InvalidArgument("function is not integrable");
  return std::exp(m.log_moment(0));
}

}  // namespace detail

// 2 (int r^{q-1} H)^{-1/q} <= (int t^{q-1} F)^{-1/q} + (int s^{q-1} G)^{-1/q}
// with H the minimal admissible envelope of F and G.
inline HarmonicBmCheck ball_harmonic_bm_check(const LogFunction& logF, const LogFunction& logG, double q) {
  if (!(q >= 1.0)) throw InvalidArgument("q must be at least 1");
  const LogFunction logH = [&](double r) { return minimal_envelope_log(logF, logG, r); };
  HarmonicBmCheck out;
  out.lhs = 2.0 * std::pow(detail::moment_integral(logH, q), -1.0 / q);
  out.rhs = std::pow(detail::moment_integral(logF, q), -1.0 / q) + std::pow(detail::moment_integral(logG, q), -1.0 / q);
  out.holds = out.lhs <= out.rhs * (1.0 + 1e-9);
  return out;
}

// Smallest second difference of t -> log(sinh(t x)/t) on a grid of t for a
// fixed x > 0; convexity means it is nonnegative.
inline double sinhc_min_second_difference(double x, double t_min, double t_max, int points) {
  if (!(x > 0.0) || !(t_min > 0.0) || !(t_max > t_min) || points < 3) throw InvalidArgument("bad grid");
  const double h = (t_max - t_min) / (points - 1);
  auto f = [x](double t) { return detail::log_sinhc(t * x) + std::log(x); };
  double worst = std::numeric_limits<double>::infinity();
  for (int i = 1; i + 1 < points; ++i) {
    const double t = t_min + i * h;
    worst = std::min(worst, f(t + h) - 2.0 * f(t) + f(t - h));
  }
  return worst;
}

}  // namespace lpgeom
