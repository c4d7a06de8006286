#pragma once

#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "core.hpp"
#include "detail/hull.hpp"

namespace lpgeom {

enum class BodyKind { VPolytope, Cube, CrossPolytope, Ball2, Simplex, Product, AffineImage };

inline const char* body_kind_name(BodyKind k) {
  switch (k) {
    case BodyKind::VPolytope: return "vpolytope";
    case BodyKind::Cube: return "cube";
    case BodyKind::CrossPolytope: return "crosspolytope";
    case BodyKind::Ball2: return "ball2";
    case BodyKind::Simplex: return "simplex";
    case BodyKind::Product: return "product";
    case BodyKind::AffineImage: return "affine";
  }
  return "unknown";
}

// Immutable convex body. Copies share the underlying representation, so a
// body can be passed around and read from several threads freely.
class ConvexBody {
 public:
  struct Impl {
    BodyKind kind;
    int n = 0;
    double a = 1.0;                      // Cube half-width
    std::shared_ptr<const detail::Hull> hull;
    std::vector<double> log_scaled_volumes;  // log(n! |S|) per simplex of the hull
    std::vector<ConvexBody> children;    // Product: left, right; AffineImage: inner
    Matrix A;
    Vector b;
    double log_abs_det = 0.0;
    double volume = 0.0;
    Vector barycenter;
  };

  static ConvexBody vpolytope(const Matrix& vertices) {
    auto impl = std::make_shared<Impl>();
    impl->kind = BodyKind::VPolytope;
    impl->n = static_cast<int>(vertices.rows());
    auto hull = std::make_shared<detail::Hull>(detail::build_hull(vertices));
    const int n = impl->n;
    double vol = 0.0;
    Vector m = Vector::Zero(n);
    for (const auto& s : hull->simplices) {
      const double v = s.volume();
      if (!(v > 0.0)) continue;
      vol += v;
      m += v * s.vertices.rowwise().mean();
    }
    if (!(vol > 0.0)) throw DegenerateBody("polytope has zero volume");
    // drop zero-volume pieces that can appear from coplanar rounding
    std::vector<Simplex> kept;
    for (const auto& s : hull->simplices) {
      const double v = s.volume();
      if (v > 1e-15 * vol) {
        kept.push_back(s);
        impl->log_scaled_volumes.push_back(std::log(v) + log_factorial(n));
      }
    }
    hull->simplices = std::move(kept);
    impl->hull = hull;
    impl->volume = vol;
    impl->barycenter = m / vol;
    return ConvexBody(impl);
  }

  static ConvexBody vpolytope(const std::vector<Vector>& pts) {
    if (pts.empty()) throw DegenerateBody("empty vertex list");
    Matrix m(pts.front().size(), pts.size());
    for (std::size_t j = 0; j < pts.size(); ++j) {
      if (pts[j].size() != m.rows()) throw InvalidArgument("vertices of mixed dimension");
      m.col(j) = pts[j];
    }
    return vpolytope(m);
  }

  static ConvexBody cube(int n, double a = 1.0) {
    if (n < 1) throw InvalidArgument("dimension must be positive");
    if (!(a > 0.0)) throw InvalidArgument("cube half-width must be positive");
    auto impl = std::make_shared<Impl>();
    impl->kind = BodyKind::Cube;
    impl->n = n;
    impl->a = a;
    impl->volume = std::pow(2.0 * a, n);
    impl->barycenter = Vector::Zero(n);
    return ConvexBody(impl);
  }

  static ConvexBody cross_polytope(int n) {
    if (n < 1) throw InvalidArgument("dimension must be positive");
    auto impl = std::make_shared<Impl>();
    impl->kind = BodyKind::CrossPolytope;
    impl->n = n;
    impl->volume = std::pow(2.0, n) / factorial(n);
    impl->barycenter = Vector::Zero(n);
    return ConvexBody(impl);
  }

  static ConvexBody ball(int n) {
    if (n < 1) throw InvalidArgument("dimension must be positive");
    auto impl = std::make_shared<Impl>();
    impl->kind = BodyKind::Ball2;
    impl->n = n;
    impl->volume = std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n + 1.0);
    impl->barycenter = Vector::Zero(n);
    return ConvexBody(impl);
  }

  // Standard simplex conv{0, e_1, ..., e_n}.
  static ConvexBody simplex(int n) {
    if (n < 1) throw InvalidArgument("dimension must be positive");
    auto impl = std::make_shared<Impl>();
    impl->kind = BodyKind::Simplex;
    impl->n = n;
    impl->volume = 1.0 / factorial(n);
    impl->barycenter = Vector::Constant(n, 1.0 / (n + 1.0));
    return ConvexBody(impl);
  }

  static ConvexBody product(const ConvexBody& left, const ConvexBody& right) {
    auto impl = std::make_shared<Impl>();
    impl->kind = BodyKind::Product;
    impl->n = left.dim() + right.dim();
    impl->children = {left, right};
    impl->volume = left.volume() * right.volume();
    impl->barycenter.resize(impl->n);
    impl->barycenter << left.barycenter(), right.barycenter();
    return ConvexBody(impl);
  }

  // {A x + b : x in inner}; nested images are composed into one.
  static ConvexBody affine(const Matrix& A, const Vector& b, const ConvexBody& inner) {
    const int n = inner.dim();
    if (A.rows() != n || A.cols() != n || b.size() != n) throw InvalidArgument("affine map dimension mismatch");
    if (!A.allFinite() || !b.allFinite()) throw InvalidArgument("affine map has non-finite entries");
    if (inner.kind() == BodyKind::AffineImage)
      return affine(A * inner.matrix(), A * inner.shift() + b, inner.inner());
    const double det = A.determinant();
    const double scale = std::max(A.cwiseAbs().maxCoeff(), 1e-300);
    if (!(std::abs(det) > 1e-13 * std::pow(scale, n))) throw InvalidArgument("affine map is singular");
    auto impl = std::make_shared<Impl>();
    impl->kind = BodyKind::AffineImage;
    impl->n = n;
    impl->children = {inner};
    impl->A = A;
    impl->b = b;
    impl->log_abs_det = std::log(std::abs(det));
    impl->volume = std::abs(det) * inner.volume();
    impl->barycenter = A * inner.barycenter() + b;
    return ConvexBody(impl);
  }

  BodyKind kind() const { return impl_->kind; }
  int dim() const { return impl_->n; }
  double volume() const { return impl_->volume; }
  const Vector& barycenter() const { return impl_->barycenter; }
  double half_width() const { return impl_->a; }
  const detail::Hull& hull() const { return *impl_->hull; }
  const std::vector<double>& log_scaled_volumes() const { return impl_->log_scaled_volumes; }
  const ConvexBody& left() const { return impl_->children.at(0); }
  const ConvexBody& right() const { return impl_->children.at(1); }
  const ConvexBody& inner() const { return impl_->children.at(0); }
  const Matrix& matrix() const { return impl_->A; }
  const Vector& shift() const { return impl_->b; }
  double log_abs_det() const { return impl_->log_abs_det; }

 private:
  explicit ConvexBody(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
  std::shared_ptr<const Impl> impl_;
};

inline double volume(const ConvexBody& K) { return K.volume(); }
inline Vector barycenter(const ConvexBody& K) { return K.barycenter(); }

inline void check_dim(const ConvexBody& K, const Vector& y) {
  if (y.size() != K.dim()) throw InvalidArgument("point dimension does not match the body");
}

inline double support_infty(const ConvexBody& K, const Vector& y) {
  check_dim(K, y);
  switch (K.kind()) {
    case BodyKind::VPolytope: return (K.hull().vertices.transpose() * y).maxCoeff();
    case BodyKind::Cube: return K.half_width() * y.cwiseAbs().sum();
    case BodyKind::CrossPolytope: return y.cwiseAbs().maxCoeff();
    case BodyKind::Ball2: return y.norm();
    case BodyKind::Simplex: return std::max(0.0, y.maxCoeff());
    case BodyKind::Product: {
      const int m = K.left().dim();
      return support_infty(K.left(), y.head(m)) + support_infty(K.right(), y.tail(K.dim() - m));
    }
    case BodyKind::AffineImage:
      return support_infty(K.inner(), K.matrix().transpose() * y) + K.shift().dot(y);
  }
  return 0.0;
}

// K - x, following the convention used throughout the library.
inline ConvexBody translate(const ConvexBody& K, const Vector& x) {
  check_dim(K, x);
  const int n = K.dim();
  return ConvexBody::affine(Matrix::Identity(n, n), -x, K);
}

inline ConvexBody linear_image(const ConvexBody& K, const Matrix& A) {
  return ConvexBody::affine(A, Vector::Zero(K.dim()), K);
}

inline ConvexBody product(const ConvexBody& K, const ConvexBody& L) { return ConvexBody::product(K, L); }

// Signed slack: positive inside, zero on the boundary (in the body's own
// parametrisation for affine images, so only the sign is geometric there).
inline double interior_margin(const ConvexBody& K, const Vector& x) {
  check_dim(K, x);
  switch (K.kind()) {
    case BodyKind::VPolytope: {
      double m = std::numeric_limits<double>::infinity();
      for (const auto& f : K.hull().facets) m = std::min(m, f.offset - f.normal.dot(x));
      return m;
    }
    case BodyKind::Cube: return K.half_width() - x.cwiseAbs().maxCoeff();
    case BodyKind::CrossPolytope: return (1.0 - x.cwiseAbs().sum()) / std::sqrt(static_cast<double>(K.dim()));
    case BodyKind::Ball2: return 1.0 - x.norm();
    case BodyKind::Simplex:
      return std::min(x.minCoeff(), (1.0 - x.sum()) / std::sqrt(static_cast<double>(K.dim())));
    case BodyKind::Product: {
      const int m = K.left().dim();
      return std::min(interior_margin(K.left(), x.head(m)), interior_margin(K.right(), x.tail(K.dim() - m)));
    }
    case BodyKind::AffineImage:
      return interior_margin(K.inner(), K.matrix().partialPivLu().solve(x - K.shift()));
  }
  return 0.0;
}

inline bool contains(const ConvexBody& K, const Vector& x, double tol = 1e-12) {
  return interior_margin(K, x) >= -tol;
}

inline bool is_polytope(const ConvexBody& K) {
  switch (K.kind()) {
    case BodyKind::Ball2: return false;
    case BodyKind::Product: return is_polytope(K.left()) && is_polytope(K.right());
    case BodyKind::AffineImage: return is_polytope(K.inner());
    default: return true;
  }
}

// Vertex set (possibly with redundant points for products) of a polytopal body.
inline std::optional<Matrix> vertices(const ConvexBody& K) {
  const int n = K.dim();
  switch (K.kind()) {
    case BodyKind::VPolytope: return K.hull().vertices;
    case BodyKind::Cube: {
      if (n > 20) throw CapabilityError("cube vertex enumeration limited to n <= 20");
      Matrix v(n, 1 << n);
      for (int m = 0; m < (1 << n); ++m)
        for (int i = 0; i < n; ++i) v(i, m) = (m >> i & 1) ? K.half_width() : -K.half_width();
      return v;
    }
    case BodyKind::CrossPolytope: {
      Matrix v = Matrix::Zero(n, 2 * n);
      for (int i = 0; i < n; ++i) {
        v(i, 2 * i) = 1.0;
        v(i, 2 * i + 1) = -1.0;
      }
      return v;
    }
    case BodyKind::Simplex: {
      Matrix v = Matrix::Zero(n, n + 1);
      for (int i = 0; i < n; ++i) v(i, i + 1) = 1.0;
      return v;
    }
    case BodyKind::Ball2: return std::nullopt;
    case BodyKind::Product: {
      auto l = vertices(K.left()), r = vertices(K.right());
      if (!l || !r) return std::nullopt;
      Matrix v(n, l->cols() * r->cols());
      int c = 0;
      for (int i = 0; i < l->cols(); ++i)
        for (int j = 0; j < r->cols(); ++j) {
          v.col(c) << l->col(i), r->col(j);
          ++c;
        }
      return v;
    }
    case BodyKind::AffineImage: {
      auto in = vertices(K.inner());
      if (!in) return std::nullopt;
      Matrix v = K.matrix() * *in;
      v.colwise() += K.shift();
      return v;
    }
  }
  return std::nullopt;
}

inline ConvexBody to_vpolytope(const ConvexBody& K) {
  if (K.kind() == BodyKind::VPolytope) return K;
  auto v = vertices(K);
  if (!v) throw CapabilityError(std::string(body_kind_name(K.kind())) + " has no vertex representation");
  return ConvexBody::vpolytope(*v);
}

inline bool is_centrally_symmetric(const ConvexBody& K, double tol = 1e-10) {
  switch (K.kind()) {
    case BodyKind::Cube:
    case BodyKind::CrossPolytope:
    case BodyKind::Ball2: return true;
    case BodyKind::Simplex: return false;
    case BodyKind::Product: return is_centrally_symmetric(K.left(), tol) && is_centrally_symmetric(K.right(), tol);
    case BodyKind::AffineImage:
      return K.shift().norm() <= tol && is_centrally_symmetric(K.inner(), tol);
    case BodyKind::VPolytope: {
      const Matrix& v = K.hull().vertices;
      const double s = detail::point_scale(v);
      for (int i = 0; i < v.cols(); ++i) {
        bool found = false;
        for (int j = 0; j < v.cols() && !found; ++j) found = (v.col(i) + v.col(j)).cwiseAbs().maxCoeff() <= tol * s;
        if (!found) return false;
      }
      return true;
    }
  }
  return false;
}

// Directions used by hausdorff_distance: a dense fixed set plus the facet
// normals of any polytopal argument.
inline std::vector<Vector> hausdorff_directions(int n, const std::vector<const ConvexBody*>& bodies) {
  std::vector<Vector> dirs;
  if (n == 1) {
    dirs.push_back(Vector::Constant(1, 1.0));
    dirs.push_back(Vector::Constant(1, -1.0));
    return dirs;
  }
  if (n == 2) {
    const int m = 3600;
    for (int i = 0; i < m; ++i) {
      Vector u(2);
      const double t = 2.0 * std::numbers::pi * i / m;
      u << std::cos(t), std::sin(t);
      dirs.push_back(u);
    }
  } else if (n == 3) {
    const int m = 4000;
    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (int i = 0; i < m; ++i) {
      const double z = 1.0 - 2.0 * (i + 0.5) / m;
      const double r = std::sqrt(1.0 - z * z);
      Vector u(3);
      u << r * std::cos(golden * i), r * std::sin(golden * i), z;
      dirs.push_back(u);
    }
  } else {
    std::mt19937_64 rng(7);
    std::normal_distribution<double> nd;
    for (int i = 0; i < 20000; ++i) {
      Vector u(n);
      for (int k = 0; k < n; ++k) u[k] = nd(rng);
      dirs.push_back(u.normalized());
    }
  }
  for (const ConvexBody* b : bodies)
    if (b->kind() == BodyKind::VPolytope)
      for (const auto& f : b->hull().facets) dirs.push_back(f.normal);
  return dirs;
}

inline double hausdorff_distance(const ConvexBody& K, const ConvexBody& L) {
  if (K.dim() != L.dim()) throw InvalidArgument("bodies of different dimension");
  double d = 0.0;
  for (const auto& u : hausdorff_directions(K.dim(), {&K, &L}))
    d = std::max(d, std::abs(support_infty(K, u) - support_infty(L, u)));
  return d;
}

}  // namespace lpgeom
