#pragma once

#include <optional>
#include <vector>

#include "quadrature.hpp"
#include "support.hpp"

namespace lpgeom {

namespace detail {

// log of the integral of e^{<x,y>} over B_2^n as a function of t = |y|.
inline double ball_log_laplace(int n, double t) {
  const double nu = 0.5 * n;
  if (t < 1e-4) return 0.5 * n * std::log(std::numbers::pi) - std::lgamma(nu + 1.0) + t * t / (2.0 * (n + 2.0));
  return nu * std::log(2.0 * std::numbers::pi) + log_bessel_i(nu, t) - nu * std::log(t);
}

// s -> log int_K e^{s<x,u>} dx for a fixed direction u. The projections of all
// vertices onto u are taken once, so each call costs one divided difference
// per simplex.
class RayLaplace {
 public:
  RayLaplace(const ConvexBody& K, const Vector& u) { add(K, u); }

  double operator()(double s) const {
    double out = constant_ + s * slope_;
    for (double a : sinhc_) out += log_sinhc(s * a);
    for (const auto& [n, t] : balls_) out += ball_log_laplace(n, std::abs(s) * t);
    double c[kMaxDividedDifferenceNodes];
    for (const auto& g : groups_) {
      LogSumExp acc;
      const std::size_t m = g.log_sv.size();
      for (std::size_t j = 0; j < m; ++j) {
        for (int i = 0; i < g.k; ++i) c[i] = s * g.nodes[j * g.k + i];
        acc.add(g.log_sv[j] + log_divided_difference_exp(c, g.k));
      }
      out += acc.value();
    }
    return out;
  }

 private:
  struct Group {
    int k = 0;
    std::vector<double> nodes;
    std::vector<double> log_sv;
  };

  void add_simplices(const std::vector<Simplex>& simp, const std::vector<double>& log_sv, const Vector& u) {
    Group g;
    g.k = static_cast<int>(u.size()) + 1;
    g.log_sv = log_sv;
    g.nodes.reserve(simp.size() * g.k);
    for (const auto& s : simp)
      for (int i = 0; i < g.k; ++i) g.nodes.push_back(s.vertices.col(i).dot(u));
    groups_.push_back(std::move(g));
  }

  void add(const ConvexBody& K, const Vector& u) {
    const int n = K.dim();
    switch (K.kind()) {
      case BodyKind::VPolytope: add_simplices(K.hull().simplices, K.log_scaled_volumes(), u); return;
      case BodyKind::Cube:
        for (int i = 0; i < n; ++i) {
          constant_ += std::log(2.0 * K.half_width());
          sinhc_.push_back(K.half_width() * u[i]);
        }
        return;
      case BodyKind::CrossPolytope: {
        const auto& simp = orthant_simplices(n);
        add_simplices(simp, std::vector<double>(simp.size(), 0.0), u);
        return;
      }
      case BodyKind::Simplex: {
        Group g;
        g.k = n + 1;
        g.log_sv = {0.0};
        g.nodes.push_back(0.0);
        for (int i = 0; i < n; ++i) g.nodes.push_back(u[i]);
        groups_.push_back(std::move(g));
        return;
      }
      case BodyKind::Ball2: balls_.emplace_back(n, u.norm()); return;
      case BodyKind::Product: {
        const int m = K.left().dim();
        add(K.left(), u.head(m));
        add(K.right(), u.tail(n - m));
        return;
      }
      case BodyKind::AffineImage:
        constant_ += K.log_abs_det();
        slope_ += K.shift().dot(u);
        add(K.inner(), K.matrix().transpose() * u);
        return;
    }
  }

  double constant_ = 0.0, slope_ = 0.0;
  std::vector<double> sinhc_;
  std::vector<std::pair<int, double>> balls_;
  std::vector<Group> groups_;
};

}  // namespace detail

// Integrals J_k(u) = int_0^inf r^{n-1+k} e^{-h_{p,K}(ru)} dr, k = 0,1,2, in log form.
struct RayMoments {
  bool bounded = false;
  std::array<double, 3> log_j{0.0, 0.0, 0.0};
  double rel_error = 0.0;
  int evaluations = 0;
};

inline RayMoments ray_moments(const ConvexBody& K, PExponent p, const Vector& u, double tol = 1e-12) {
  const int n = K.dim();
  RayMoments out;
  const double a = p.is_zero() ? u.dot(K.barycenter()) : support_infty(K, u);
  // h_{p,K}(ru) <= r h_K(u), so no decay when h_K(u) <= 0
  if (!(a > 0.0)) return out;
  out.bounded = true;
  if (!p.is_finite()) {
    // e^{-a r} exactly: J_k = (n-1+k)! / a^{n+k}
    for (int k = 0; k < 3; ++k) out.log_j[k] = std::lgamma(n + k) - (n + k) * std::log(a);
    return out;
  }
  const double q = p.value();
  const double log_vol = std::log(K.volume());
  const detail::RayLaplace L(K, u);
  auto f = [&](double r) { return RadialPoint{-(L(q * r) - log_vol) / q}; };
  const RadialMoments m = radial_moments(f, n, n / a, tol);
  out.evaluations = m.evaluations;
  if (m.divergent) {
    out.bounded = false;
    return out;
  }
  for (int k = 0; k < 3; ++k) out.log_j[k] = m.log_moment(k);
  out.rel_error = m.rel_error;
  return out;
}

// ||y||_{K^{o,p}}; zero along directions in which the polar body is unbounded.
inline double polar_norm(const ConvexBody& K, PExponent p, const Vector& y, double tol = 1e-12) {
  check_dim(K, y);
  const double t = y.norm();
  if (t == 0.0) return 0.0;
  if (p.is_infinite()) return std::max(0.0, support_infty(K, y));
  if (p.is_zero()) {
    // roundoff-level values mean a direction tangent to the half-space
    const double v = y.dot(K.barycenter());
    return v > 1e-14 * t * K.barycenter().norm() ? v : 0.0;
  }
  const Vector u = y / t;
  const RayMoments m = ray_moments(K, p, u, tol);
  if (!m.bounded) return 0.0;
  const int n = K.dim();
  return t * std::exp(-(m.log_j[0] - std::lgamma(n)) / n);
}

inline double polar_norm(const ConvexBody& K, double p, const Vector& y) { return polar_norm(K, PExponent::finite(p), y); }

inline bool polar_membership(const ConvexBody& K, PExponent p, const Vector& y) { return polar_norm(K, p, y) <= 1.0; }

struct BoundaryPoint {
  Vector direction;
  double radius;  // infinite when the polar body is unbounded along the direction
  Vector point;
  bool bounded;
};

inline std::vector<BoundaryPoint> polar_boundary_sample(const ConvexBody& K, PExponent p,
                                                        const std::vector<Vector>& directions) {
  std::vector<BoundaryPoint> out;
  out.reserve(directions.size());
  for (const auto& d : directions) {
    const Vector u = d.normalized();
    const double nu = polar_norm(K, p, u);
    BoundaryPoint b{u, 0.0, Vector(), nu > 0.0};
    b.radius = b.bounded ? 1.0 / nu : std::numeric_limits<double>::infinity();
    b.point = b.bounded ? Vector(u * b.radius) : Vector::Constant(u.size(), std::numeric_limits<double>::infinity());
    out.push_back(std::move(b));
  }
  return out;
}

// Evenly spaced directions on the circle, used for boundary curves.
inline std::vector<Vector> circle_directions(int count) {
  std::vector<Vector> dirs;
  for (int i = 0; i < count; ++i) {
    const double t = 2.0 * std::numbers::pi * i / count;
    Vector u(2);
    u << std::cos(t), std::sin(t);
    dirs.push_back(u);
  }
  return dirs;
}

// How directions on the sphere are integrated. Embedded: one rule carrying
// coarse weights. Pair: fine and coarse rules evaluated separately. Batches:
// independently shifted QMC rules.
struct DirectionPlan {
  enum class Mode { Embedded, Pair, Batches } mode = Mode::Embedded;
  std::vector<DirectionRule> rules;
};

namespace detail {

// Outer facet normal angles of a planar polytope: the angles at which
// h_K(u), and hence the integrands, lose smoothness. The derivative of h_K
// jumps by the edge length there, so for many-sided polygons only the
// max_breaks longest edges become panel ends; the Kronrod gap accounts for the rest.
inline std::vector<double> kink_angles(const ConvexBody& K, std::size_t max_breaks = 48) {
  std::vector<double> out;
  if (!is_polytope(K)) return out;
  const Matrix v = *vertices(K);
  const Hull h = build_hull(v);
  std::vector<std::pair<double, double>> kinks;  // (edge length, angle)
  for (const auto& f : h.facets)
    kinks.emplace_back((h.vertices.col(f.ids.front()) - h.vertices.col(f.ids.back())).norm(),
                       std::atan2(f.normal[1], f.normal[0]));
  if (kinks.size() > max_breaks) {
    std::stable_sort(kinks.begin(), kinks.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
    kinks.resize(max_breaks);
  }
  for (const auto& k : kinks) out.push_back(k.second);
  return out;
}

}  // namespace detail

inline DirectionPlan direction_plan(const ConvexBody& K, const QuadratureSpec& q) {
  const int n = K.dim();
  DirectionPlan plan;
  if (n == 1) {
    DirectionRule r;
    r.dirs = {Vector::Constant(1, 1.0), Vector::Constant(1, -1.0)};
    r.weights = {1.0, 1.0};
    r.coarse = r.weights;
    plan.rules.push_back(r);
  } else if (n == 2) {
    const int panels = q.directions > 0 ? std::max(1, q.directions / 15) : 16;
    plan.rules.push_back(circle_rule_kronrod(detail::kink_angles(K), panels));
  } else if (n == 3) {
    const int order = q.directions > 0 ? q.directions : 8;
    plan.mode = DirectionPlan::Mode::Pair;
    plan.rules.push_back(cube_sphere_rule(order));
    plan.rules.push_back(cube_sphere_rule(std::max(2, order / 2)));
  } else {
    plan.mode = DirectionPlan::Mode::Batches;
    const int batches = std::max(2, q.qmc_batches);
    const int count = q.directions > 0 ? q.directions : 4096;
    plan.rules = qmc_sphere_batches(n, count, batches, q.seed);
  }
  return plan;
}

// Moments of the density e^{-h_{p,K}} on R^n from one spherical-radial pass:
// mass = int e^{-h}, mean = E[y], second = E[y y^T].
struct SweepResult {
  bool bounded = true;
  double log_mass = std::numeric_limits<double>::infinity();
  double rel_error = 0.0;
  Vector mean;
  Matrix second;
  long evaluations = 0;
  int directions = 0;
};

inline SweepResult sweep(const ConvexBody& K, PExponent p, const QuadratureSpec& q, int order = 0) {
  if (p.is_zero()) {
    SweepResult r;
    r.bounded = false;
    return r;
  }
  const int n = K.dim();
  const DirectionPlan plan = direction_plan(K, q);
  SweepResult out;
  out.mean = Vector::Zero(n);
  out.second = Matrix::Zero(n, n);
  struct Totals {
    double mass = 0.0, coarse = 0.0, radial = 0.0;
    Vector m1;
    Matrix m2;
  };
  std::vector<Totals> totals;
  // a common scale keeps the sums finite; fixed from the first direction
  std::optional<double> shift;
  for (const auto& rule : plan.rules) {
    std::vector<RayMoments> rays;
    rays.reserve(rule.dirs.size());
    for (const auto& u : rule.dirs) {
      rays.push_back(ray_moments(K, p, u, q.radial_tol));
      out.evaluations += rays.back().evaluations;
      if (!rays.back().bounded) {
        out.bounded = false;
        return out;
      }
      if (!shift) shift = rays.back().log_j[0];
    }
    Totals t;
    t.m1 = Vector::Zero(n);
    t.m2 = Matrix::Zero(n, n);
    for (std::size_t i = 0; i < rule.dirs.size(); ++i) {
      const Vector& u = rule.dirs[i];
      const double j0 = std::exp(rays[i].log_j[0] - *shift);
      t.mass += rule.weights[i] * j0;
      if (!rule.coarse.empty()) t.coarse += rule.coarse[i] * j0;
      t.radial += rule.weights[i] * j0 * rays[i].rel_error;
      if (order >= 1) t.m1 += rule.weights[i] * std::exp(rays[i].log_j[1] - *shift) * u;
      if (order >= 2) t.m2 += rule.weights[i] * std::exp(rays[i].log_j[2] - *shift) * (u * u.transpose());
    }
    out.directions += static_cast<int>(rule.dirs.size());
    totals.push_back(std::move(t));
  }
  double mass = 0.0, err = 0.0;
  Vector m1 = Vector::Zero(n);
  Matrix m2 = Matrix::Zero(n, n);
  switch (plan.mode) {
    case DirectionPlan::Mode::Embedded:
      mass = totals[0].mass;
      err = std::abs(totals[0].mass - totals[0].coarse) + totals[0].radial;
      m1 = totals[0].m1;
      m2 = totals[0].m2;
      break;
    case DirectionPlan::Mode::Pair:
      mass = totals[0].mass;
      err = std::abs(totals[0].mass - totals[1].mass) + totals[0].radial;
      m1 = totals[0].m1;
      m2 = totals[0].m2;
      break;
    case DirectionPlan::Mode::Batches: {
      const double b = static_cast<double>(totals.size());
      double s2 = 0.0, rad = 0.0;
      for (const auto& t : totals) {
        mass += t.mass / b;
        m1 += t.m1 / b;
        m2 += t.m2 / b;
        rad += t.radial / b;
      }
      for (const auto& t : totals) s2 += (t.mass - mass) * (t.mass - mass);
      err = std::sqrt(s2 / (b * (b - 1.0))) + rad;
      break;
    }
  }
  out.log_mass = *shift + std::log(mass);
  out.rel_error = err / mass;
  if (order >= 1) out.mean = m1 / mass;
  if (order >= 2) out.second = m2 / mass;
  return out;
}

// Classical polar of a polytope containing the origin in its interior: the
// facet <a,x> = 1 becomes the vertex a.
inline ConvexBody classical_polar_polytope(const ConvexBody& K) {
  const auto v = vertices(K);
  if (!v) throw CapabilityError("classical polar needs a polytope");
  const detail::Hull h = detail::build_hull(*v);
  const double scale = detail::point_scale(*v);
  Matrix out(K.dim(), static_cast<int>(h.facets.size()));
  for (std::size_t i = 0; i < h.facets.size(); ++i) {
    const auto& f = h.facets[i];
    if (!(f.offset > 1e-12 * scale)) throw InvalidArgument("origin is not an interior point");
    out.col(static_cast<int>(i)) = f.normal / f.offset;
  }
  return ConvexBody::vpolytope(out);
}

// |K^{o,p}| = (1/n!) int e^{-h_{p,K}(y)} dy.
inline EvalReport polar_volume(const ConvexBody& K, PExponent p, const QuadratureSpec& q = {}) {
  const int n = K.dim();
  // at p = infinity a listed polytope has an exact answer through its facets
  if (p.is_infinite() && K.kind() == BodyKind::VPolytope && n <= 3 && interior_margin(K, Vector::Zero(n)) > 0.0) {
    const double v = classical_polar_polytope(K).volume();
    return {v, 1e-13 * v, Method::ClosedForm};
  }
  const DirectionPlan plan = direction_plan(K, q);
  const Method method = plan.mode == DirectionPlan::Mode::Batches ? Method::MonteCarlo : Method::Quadrature;
  const SweepResult s = sweep(K, p, q, 0);
  if (!s.bounded) return {std::numeric_limits<double>::infinity(), 0.0, method};
  const double v = std::exp(s.log_mass - log_factorial(n));
  return {v, v * s.rel_error, method};
}

inline EvalReport polar_volume(const ConvexBody& K, double p, const QuadratureSpec& q = {}) {
  return polar_volume(K, PExponent::finite(p), q);
}

}  // namespace lpgeom
