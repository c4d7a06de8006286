#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <mutex>
#include <utility>
#include <vector>

#include "bodies.hpp"
#include "detail/special.hpp"

namespace lpgeom {

inline constexpr int kMaxDividedDifferenceNodes = 12;

namespace detail {

// Corner entry of exp(T), T upper bidiagonal with diagonal d (sorted
// descending, max 0) and unit superdiagonal, by scaling and squaring. Every
// entry of the exponential is positive, so squaring never cancels.
template <int K>
double opitz_corner(const double* d_in, double spread) {
  const int s = std::max(0, static_cast<int>(std::ceil(std::log2((spread + 1.0) / 0.0625))));
  const double sc = std::ldexp(1.0, -s);
  double d[K];
  for (int i = 0; i < K; ++i) d[i] = d_in[i] * sc;
  double E[K][K], term[K][K];
  for (int i = 0; i < K; ++i)
    for (int j = i; j < K; ++j) E[i][j] = term[i][j] = (i == j) ? 1.0 : 0.0;
  for (int m = 1; m < 40; ++m) {
    // term <- term * (sc T) / m, in place with j descending
    const double inv = 1.0 / m;
    double worst = 0.0;
    for (int i = 0; i < K; ++i) {
      for (int j = K - 1; j > i; --j) {
        const double v = (term[i][j] * d[j] + term[i][j - 1] * sc) * inv;
        term[i][j] = v;
        E[i][j] += v;
        worst = std::max(worst, std::abs(v) - 1e-18 * E[i][j]);
      }
      const double v = term[i][i] * d[i] * inv;
      term[i][i] = v;
      E[i][i] += v;
      worst = std::max(worst, std::abs(v) - 1e-18 * E[i][i]);
    }
    if (worst <= 0.0) break;
  }
  double F[K][K];
  for (int q = 0; q < s; ++q) {
    for (int i = 0; i < K; ++i)
      for (int j = i; j < K; ++j) {
        double v = 0.0;
        for (int l = i; l <= j; ++l) v += E[i][l] * E[l][j];
        F[i][j] = v;
      }
    for (int i = 0; i < K; ++i)
      for (int j = i; j < K; ++j) E[i][j] = F[i][j];
  }
  return E[0][K - 1];
}

template <int... Ks>
double opitz_dispatch(int k, const double* d, double spread, std::integer_sequence<int, Ks...>) {
  double out = 0.0;
  ((k == Ks + 2 ? (out = opitz_corner<Ks + 2>(d, spread), true) : false) || ...);
  return out;
}

}  // namespace detail

// log of the divided difference of exp at the given nodes (repeats allowed).
// Clustered nodes use a Taylor expansion about their mean; otherwise the value
// is the corner entry of exp of the bidiagonal matrix with the nodes on the
// diagonal.
inline double log_divided_difference_exp(const double* c, int k) {
  if (k < 1 || k > kMaxDividedDifferenceNodes) throw InvalidArgument("unsupported number of divided-difference nodes");
  if (k == 1) return c[0];
  double mx = c[0], mn = c[0], mean = 0.0;
  for (int i = 0; i < k; ++i) {
    mx = std::max(mx, c[i]);
    mn = std::min(mn, c[i]);
    mean += c[i];
  }
  if (!std::isfinite(mx) || !std::isfinite(mn)) throw InvalidArgument("non-finite divided-difference node");
  mean /= k;
  const double spread = mx - mn;
  if (k == 2) return mx + std::log(spread > 0.0 ? -std::expm1(-spread) / spread : 1.0);
  if (k == 3 && spread >= 0.5) {
    // (E(a) - e^{-a} E(b-a)) / b with E(z) = (1 - e^{-z})/z, nodes mx, mx-a, mx-b;
    // the subtraction loses at most a factor ten once b >= 1/2
    double d[3] = {c[0], c[1], c[2]};
    std::sort(d, d + 3, [](double x, double y) { return x > y; });
    const double a = d[0] - d[1], b = d[0] - d[2];
    auto E = [](double z) { return z > 0.0 ? -std::expm1(-z) / z : 1.0; };
    return mx + std::log((E(a) - std::exp(-a) * E(b - a)) / b);
  }
  if (spread < 1e-3 || (k == 3 && spread < 0.5)) {
    // sum_j h_j(d) / (j+k-1)!, h_j complete homogeneous in d = c - mean
    constexpr int Jmax = 18;
    const int J = spread < 1e-3 ? 10 : Jmax;
    double h[Jmax + 1] = {1.0};
    for (int i = 0; i < k; ++i) {
      const double d = c[i] - mean;
      for (int j = 1; j <= J; ++j) h[j] += d * h[j - 1];
    }
    double fact = factorial(k - 1), sum = 0.0;
    for (int j = 0; j <= J; ++j) {
      sum += h[j] / fact;
      fact *= (j + k);
    }
    return mean + std::log(sum);
  }
  double d[kMaxDividedDifferenceNodes];
  for (int i = 0; i < k; ++i) d[i] = c[i] - mx;
  std::sort(d, d + k, [](double a, double b) { return a > b; });
  const double corner =
      detail::opitz_dispatch(k, d, spread, std::make_integer_sequence<int, kMaxDividedDifferenceNodes - 1>{});
  return mx + std::log(corner);
}

inline double log_divided_difference_exp(const std::vector<double>& c) {
  return log_divided_difference_exp(c.data(), static_cast<int>(c.size()));
}

inline double divided_difference_exp(const std::vector<double>& c) { return std::exp(log_divided_difference_exp(c)); }

namespace detail {

// Tilted mean and second moment (about the origin of the given coordinates)
// of the uniform measure on a simplex, weighted by e^{<x,y>}.
struct SimplexTilt {
  double log_mass = 0.0;
  Vector mean;
  Matrix second;
};

inline SimplexTilt simplex_tilt(const Matrix& V, const Vector& y, double log_scaled_volume, int order) {
  const int n = static_cast<int>(V.rows());
  const int k = n + 1;
  double c[kMaxDividedDifferenceNodes];
  for (int i = 0; i < k; ++i) c[i] = V.col(i).dot(y);
  SimplexTilt out;
  const double logD = log_divided_difference_exp(c, k);
  out.log_mass = log_scaled_volume + logD;
  if (order < 1) return out;
  std::vector<double> lam(k);
  for (int i = 0; i < k; ++i) {
    c[k] = c[i];
    lam[i] = std::exp(log_divided_difference_exp(c, k + 1) - logD);
  }
  out.mean = V * Eigen::Map<Vector>(lam.data(), k);
  if (order < 2) return out;
  Matrix W(k, k);
  for (int i = 0; i < k; ++i)
    for (int j = i; j < k; ++j) {
      c[k] = c[i];
      c[k + 1] = c[j];
      const double v = std::exp(log_divided_difference_exp(c, k + 2) - logD) * (i == j ? 2.0 : 1.0);
      W(i, j) = W(j, i) = v;
    }
  out.second = V * W * V.transpose();
  return out;
}

inline void check_simplex(const Simplex& S) {
  const int n = S.dim();
  if (S.vertices.cols() != n + 1) throw InvalidArgument("simplex needs n+1 vertices");
  if (n + 3 > kMaxDividedDifferenceNodes) throw CapabilityError("simplex dimension too large");
  if (!(S.volume() > 0.0)) throw DegenerateBody("degenerate simplex");
}

}  // namespace detail

inline double log_exp_integral_simplex(const Simplex& S, const Vector& y) {
  detail::check_simplex(S);
  const int n = S.dim();
  return detail::simplex_tilt(S.vertices, y, std::log(S.volume()) + log_factorial(n), 0).log_mass;
}

// Integral of e^{<x,y>} over S.
inline double exp_integral_simplex(const Simplex& S, const Vector& y) { return std::exp(log_exp_integral_simplex(S, y)); }

// Integral of x e^{<x,y>} over S.
inline Vector exp_first_moments(const Simplex& S, const Vector& y) {
  detail::check_simplex(S);
  const int n = S.dim();
  auto t = detail::simplex_tilt(S.vertices, y, std::log(S.volume()) + log_factorial(n), 1);
  return std::exp(t.log_mass) * t.mean;
}

// Integral of x x^T e^{<x,y>} over S.
inline Matrix exp_second_moments(const Simplex& S, const Vector& y) {
  detail::check_simplex(S);
  const int n = S.dim();
  auto t = detail::simplex_tilt(S.vertices, y, std::log(S.volume()) + log_factorial(n), 2);
  return std::exp(t.log_mass) * t.second;
}

// Interior-disjoint simplices covering a polytopal body.
inline std::vector<Simplex> triangulate(const ConvexBody& K) {
  if (K.kind() == BodyKind::VPolytope) return K.hull().simplices;
  if (K.kind() == BodyKind::Simplex) {
    Simplex s;
    s.vertices = *vertices(K);
    return {s};
  }
  return to_vpolytope(K).hull().simplices;
}

// Uniform measure on K tilted by e^{<x,y>}: log of its total mass, mean and
// covariance (order selects how much is computed).
struct TiltedMoments {
  double log_integral = 0.0;
  Vector mean;
  Matrix cov;
};

namespace detail {

inline TiltedMoments tilt_simplex_family(const std::vector<Simplex>& simplices, const std::vector<double>& log_sv,
                                         const Vector& y, int order) {
  const int n = static_cast<int>(y.size());
  TiltedMoments out;
  if (order == 0) {
    LogSumExp acc;
    for (std::size_t s = 0; s < simplices.size(); ++s)
      acc.add(simplex_tilt(simplices[s].vertices, y, log_sv[s], 0).log_mass);
    out.log_integral = acc.value();
    return out;
  }
  // moments about the vertex where <x,y> is largest limit cancellation
  Vector center = simplices.front().vertices.col(0);
  double best = center.dot(y);
  for (const auto& s : simplices)
    for (int i = 0; i < s.vertices.cols(); ++i)
      if (s.vertices.col(i).dot(y) > best) {
        best = s.vertices.col(i).dot(y);
        center = s.vertices.col(i);
      }
  std::vector<SimplexTilt> parts;
  LogSumExp acc;
  for (std::size_t s = 0; s < simplices.size(); ++s) {
    Matrix V = simplices[s].vertices.colwise() - center;
    parts.push_back(simplex_tilt(V, y, log_sv[s], order));
    acc.add(parts.back().log_mass);
  }
  out.log_integral = acc.value() + center.dot(y);
  Vector m = Vector::Zero(n);
  Matrix S = Matrix::Zero(n, n);
  for (const auto& p : parts) {
    const double w = std::exp(p.log_mass - acc.value());
    m += w * p.mean;
    if (order >= 2) S += w * p.second;
  }
  out.mean = m + center;
  if (order >= 2) {
    out.cov = S - m * m.transpose();
    out.cov = 0.5 * (out.cov + out.cov.transpose());
  }
  return out;
}

inline const std::vector<Simplex>& orthant_simplices(int n) {
  static std::mutex mu;
  static std::map<int, std::vector<Simplex>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  std::vector<Simplex> out;
  for (int m = 0; m < (1 << n); ++m) {
    Simplex s;
    s.vertices = Matrix::Zero(n, n + 1);
    for (int i = 0; i < n; ++i) s.vertices(i, i + 1) = (m >> i & 1) ? -1.0 : 1.0;
    out.push_back(s);
  }
  return cache.emplace(n, std::move(out)).first->second;
}

}  // namespace detail

inline TiltedMoments tilted_moments(const ConvexBody& K, const Vector& y, int order = 0) {
  check_dim(K, y);
  const int n = K.dim();
  TiltedMoments out;
  switch (K.kind()) {
    case BodyKind::VPolytope:
      return detail::tilt_simplex_family(K.hull().simplices, K.log_scaled_volumes(), y, order);
    case BodyKind::Cube: {
      const double a = K.half_width();
      out.log_integral = 0.0;
      if (order >= 1) out.mean.resize(n);
      if (order >= 2) out.cov = Matrix::Zero(n, n);
      for (int i = 0; i < n; ++i) {
        const double t = a * y[i];
        out.log_integral += std::log(2.0 * a) + detail::log_sinhc(t);
        if (order >= 1) out.mean[i] = a * detail::langevin(t);
        if (order >= 2) out.cov(i, i) = a * a * detail::langevin_variance(t);
      }
      return out;
    }
    case BodyKind::CrossPolytope: {
      if (n + 3 > kMaxDividedDifferenceNodes || n > 10) throw CapabilityError("cross-polytope dimension too large");
      const auto& simp = detail::orthant_simplices(n);
      std::vector<double> lsv(simp.size(), 0.0);  // n! |S| = 1 for each orthant piece
      return detail::tilt_simplex_family(simp, lsv, y, order);
    }
    case BodyKind::Simplex: {
      if (n + 3 > kMaxDividedDifferenceNodes) throw CapabilityError("simplex dimension too large");
      Matrix V = *vertices(K);
      std::vector<Simplex> one{Simplex{V}};
      return detail::tilt_simplex_family(one, {0.0}, y, order);
    }
    case BodyKind::Ball2: {
      const double nu = 0.5 * n;
      const double t = y.norm();
      if (t < 1e-4)
        out.log_integral = std::log(K.volume()) + t * t / (2.0 * (n + 2.0));
      else
        out.log_integral = nu * std::log(2.0 * std::numbers::pi) + detail::log_bessel_i(nu, t) - nu * std::log(t);
      if (order >= 1) {
        const double R = detail::bessel_ratio(nu, t);
        out.mean = t > 0.0 ? Vector(y * (R / t)) : Vector::Zero(n);
        if (order >= 2) {
          double r_over_t, second;
          if (t < 1e-3) {
            r_over_t = 1.0 / (2.0 * nu + 2.0) - t * t / (8.0 * (nu + 1.0) * (nu + 1.0) * (nu + 2.0));
            second = 1.0 / (2.0 * nu + 2.0) - 3.0 * t * t / (8.0 * (nu + 1.0) * (nu + 1.0) * (nu + 2.0));
          } else {
            r_over_t = R / t;
            second = 1.0 - (2.0 * nu + 1.0) * R / t - R * R;
          }
          Matrix P = t > 0.0 ? Matrix(y * y.transpose() / (t * t)) : Matrix(Matrix::Zero(n, n));
          out.cov = second * P + r_over_t * (Matrix::Identity(n, n) - P);
        }
      }
      return out;
    }
    case BodyKind::Product: {
      const int m = K.left().dim();
      auto l = tilted_moments(K.left(), y.head(m), order);
      auto r = tilted_moments(K.right(), y.tail(n - m), order);
      out.log_integral = l.log_integral + r.log_integral;
      if (order >= 1) {
        out.mean.resize(n);
        out.mean << l.mean, r.mean;
      }
      if (order >= 2) {
        out.cov = Matrix::Zero(n, n);
        out.cov.topLeftCorner(m, m) = l.cov;
        out.cov.bottomRightCorner(n - m, n - m) = r.cov;
      }
      return out;
    }
    case BodyKind::AffineImage: {
      const Matrix& A = K.matrix();
      auto in = tilted_moments(K.inner(), A.transpose() * y, order);
      out.log_integral = K.log_abs_det() + K.shift().dot(y) + in.log_integral;
      if (order >= 1) out.mean = A * in.mean + K.shift();
      if (order >= 2) out.cov = A * in.cov * A.transpose();
      return out;
    }
  }
  return out;
}

inline double log_exp_integral_body(const ConvexBody& K, const Vector& y) { return tilted_moments(K, y, 0).log_integral; }

// Integral of e^{<x,y>} over K.
inline double exp_integral_body(const ConvexBody& K, const Vector& y) { return std::exp(log_exp_integral_body(K, y)); }

// Closed form for the cross-polytope integral as a sum over coordinates,
// 2^{n-1} sum_j y_j^{n-2}(e^{y_j} + (-1)^n e^{-y_j}) / prod_{k!=j}(y_j^2 - y_k^2),
// valid when the |y_i| are distinct and nonzero. Used as an independent check
// of the orthant-simplex path.
inline double cross_polytope_exp_integral_closed_form(const Vector& y) {
  const int n = static_cast<int>(y.size());
  double sum = 0.0;
  for (int j = 0; j < n; ++j) {
    double den = 1.0;
    for (int k = 0; k < n; ++k)
      if (k != j) den *= y[j] * y[j] - y[k] * y[k];
    const double ej = std::exp(y[j]) + ((n % 2 == 0) ? 1.0 : -1.0) * std::exp(-y[j]);
    sum += std::pow(y[j], n - 2) * ej / den;
  }
  return std::ldexp(sum, n - 1);
}

}  // namespace lpgeom
